"""Exact multilinear polynomials in the Mayer functions f_ij.

A monomial is an edge mask; Boltzmann factors expand as f~ = 1 + f.  This is
the independent oracle for the graph-sum identities on small n.
"""
from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from . import blc, graphs, trees
from .errors import BudgetError, GraphError
from .graphs import Edge, MarkedGraph

MAX_BOLTZMANN = 24
MAX_VERIFY_ORDER = {"tree": 6, "rh": 5, "partition": 6}


class FormalPolynomial:
    def __init__(self, n: int, coeffs: Mapping[int, int | Fraction] | None = None):
        self.n = n
        self.coeffs: dict[int, int | Fraction] = {m: c for m, c in (coeffs or {}).items() if c}

    def __add__(self, other: "FormalPolynomial") -> "FormalPolynomial":
        _same_order(self, other)
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            out[m] = out.get(m, 0) + c
        return FormalPolynomial(self.n, out)

    def __eq__(self, other):
        return isinstance(other, FormalPolynomial) and self.n == other.n and self.coeffs == other.coeffs

    def __len__(self):
        return len(self.coeffs)

    def __repr__(self):
        return f"FormalPolynomial(n={self.n}, terms={len(self.coeffs)})"

    def monomial_edges(self, mask: int) -> frozenset[Edge]:
        return graphs.mask_to_edges(self.n, mask)

    def evaluate(self, values: Mapping[Edge, Fraction | float]):
        """Numeric value at the given f_ij assignment (missing pairs count as 0)."""
        slots = graphs.pair_slots(self.n)
        per_bit = [values.get(Edge(u, v), 0) for u, v in slots]
        total = 0
        for mask, c in self.coeffs.items():
            term = c
            k = 0
            while mask:
                if mask & 1:
                    term *= per_bit[k]
                mask >>= 1
                k += 1
            total += term
        return total

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for mask in sorted(self.coeffs, key=lambda m: (m.bit_count(), m)):
            c = self.coeffs[mask]
            mono = "*".join(f"f{e.u}{e.v}" for e in sorted(self.monomial_edges(mask))) or "1"
            parts.append(mono if c == 1 else f"{c}*{mono}")
        return " + ".join(parts)


def _same_order(a: FormalPolynomial, b: FormalPolynomial):
    if a.n != b.n:
        raise GraphError(f"polynomials of different order: {a.n} vs {b.n}")


def _subsets(mask: int):
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def _accumulate(acc: dict, g: MarkedGraph, coeff):
    if g.boltzmann_count > MAX_BOLTZMANN:
        raise BudgetError(f"expansion of {g.boltzmann_count} Boltzmann factors exceeds {MAX_BOLTZMANN}")
    for sub in _subsets(g.ft):
        key = g.f | sub
        acc[key] = acc.get(key, 0) + coeff


def expand_term(g: MarkedGraph) -> FormalPolynomial:
    """prod_{X_f} f * prod_{X_f~} (1 + f), fully expanded."""
    if not g.is_basic:
        raise GraphError("expansion is defined for basic graphs")
    acc: dict = {}
    _accumulate(acc, g, 1)
    return FormalPolynomial(g.n, acc)


def _plain(c: Fraction):
    return c.numerator if c.denominator == 1 else c


def expand_blc(L: blc.BasicLinearCombination) -> FormalPolynomial:
    """Linear extension of :func:`expand_term`; the prefactor is left out."""
    acc: dict = defaultdict(int)
    for coeff, g in L.terms:
        _accumulate(acc, g, _plain(coeff))
    return FormalPolynomial(L.order, acc)


@dataclass(frozen=True)
class IdentityResult:
    holds: bool
    witness: frozenset[Edge] | None = None
    lhs_coeff: int | Fraction = 0
    rhs_coeff: int | Fraction = 0

    def __bool__(self):
        return self.holds

    def to_dict(self) -> dict:
        if self.holds:
            return {"holds": True}
        return {"holds": False, "witness": sorted(str(e) for e in self.witness),
                "lhs": str(self.lhs_coeff), "rhs": str(self.rhs_coeff)}


def verify_identity(lhs: FormalPolynomial, rhs: FormalPolynomial) -> IdentityResult:
    _same_order(lhs, rhs)
    for mask in sorted(set(lhs.coeffs) | set(rhs.coeffs), key=lambda m: (m.bit_count(), m)):
        a, b = lhs.coeffs.get(mask, 0), rhs.coeffs.get(mask, 0)
        if a != b:
            return IdentityResult(False, lhs.monomial_edges(mask), a, b)
    return IdentityResult(True)


def connected_sum(n: int) -> FormalPolynomial:
    return expand_blc(blc.mayer_bn_blc(n))


def _check(identity: str, n: int):
    hi = MAX_VERIFY_ORDER[identity]
    if not 2 <= n <= hi:
        raise BudgetError(f"{identity} identity is verified for 2 <= n <= {hi}, got {n}")


def tree_identity(n: int) -> IdentityResult:
    """Sum over every tree of T_n equals the connected-graph sum."""
    _check("tree", n)
    return verify_identity(expand_blc(blc.all_trees_blc(n)), connected_sum(n))


def ree_hoover_identity(n: int) -> IdentityResult:
    """Labeled Ree-Hoover expansion equals the labeled block sum."""
    _check("rh", n)
    return verify_identity(expand_blc(blc.ree_hoover_blc(n, reduce=False)),
                           expand_blc(blc.virial_block_blc(n)))


def _class_profile(poly: FormalPolynomial) -> Counter:
    ids = graphs.graph_class_table(poly.n)
    prof: Counter = Counter()
    for mask, c in poly.coeffs.items():
        prof[int(ids[mask])] += c
    return Counter({k: v for k, v in prof.items() if v})


def partition_identity_check(n: int) -> bool:
    """Check that the admissible-edge scheme partitions the connected graphs.

    (i) the all-trees expansion equals the connected-graph sum exactly;
    (ii) the class-reduced sum agrees with it once monomials are collected
    per isomorphism class, since members of one class differ by relabeling.
    """
    _check("partition", n)
    all_trees = expand_blc(blc.all_trees_blc(n))
    if not verify_identity(all_trees, connected_sum(n)):
        return False
    reduced = expand_blc(blc.tree_sum_bn_blc(n))
    return _class_profile(reduced) == _class_profile(all_trees)


def admissible_weight_total(n: int) -> int:
    """sum over T_n of 2^|X_ad(t)|, the monomial count of the all-trees sum."""
    table = trees.tree_table(n)
    return sum(1 << int(m).bit_count() for m in table.ad_mask)
