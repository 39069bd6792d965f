"""Representations of series coefficients as basic linear combinations (BLCs)."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Iterable

import numpy as np

from . import graphs, trees
from .errors import BudgetError, GraphError, IngestionError
from .graphs import Edge, MarkedGraph

# Lengths of the frame-sum BLCs for n=2..6, for table reproduction only;
# the ensembles themselves come from external data.
FRAME_SUM_LENGTHS = {2: 1, 3: 1, 4: 5, 5: 49, 6: 784}

MAX_MAYER_ORDER = 6
MAX_BLOCK_ORDER = 6
MAX_TREE_SUM_ORDER = 8
MAX_RH_ORDER = 7


@dataclass(frozen=True)
class BasicLinearCombination:
    """prefactor * sum(coeff * I(graph)) over basic graphs of one order."""

    order: int
    terms: tuple[tuple[Fraction, MarkedGraph], ...]
    prefactor: Fraction = Fraction(1)
    provenance: str = ""

    def __post_init__(self):
        for coeff, g in self.terms:
            if g.n != self.order:
                raise GraphError(f"term of order {g.n} in a BLC of order {self.order}")
            if not g.is_basic:
                raise GraphError(f"non-basic term {graphs.format_graph(g)}")

    def __len__(self):
        return len(self.terms)

    @property
    def term_graphs(self) -> list[MarkedGraph]:
        return [g for _, g in self.terms]

    def to_dict(self) -> dict:
        def frac(x):
            return {"num": x.numerator, "den": x.denominator}

        return {
            "order": self.order,
            "provenance": self.provenance,
            "prefactor": frac(self.prefactor),
            "terms": [
                {"coeff": frac(c),
                 "f": [[e.u, e.v] for e in sorted(g.mayer_edges)],
                 "ft": [[e.u, e.v] for e in sorted(g.boltzmann_edges)]}
                for c, g in self.terms
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "BasicLinearCombination":
        n = int(data["order"])

        def frac(d):
            return Fraction(int(d["num"]), int(d["den"]))

        terms = tuple(
            (frac(t["coeff"]), MarkedGraph.from_edges(n, [tuple(e) for e in t["f"]], [tuple(e) for e in t["ft"]]))
            for t in data["terms"]
        )
        return cls(n, terms, frac(data["prefactor"]), data.get("provenance", ""))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_json(cls, text: str) -> "BasicLinearCombination":
        return cls.from_dict(json.loads(text))


def _check_range(n: int, hi: int, what: str):
    if not 2 <= n <= hi:
        raise BudgetError(f"{what} supports 2 <= n <= {hi}, got {n}")


def _all_f_terms(n: int, table: np.ndarray):
    return tuple((Fraction(1), MarkedGraph(n, int(m))) for m in np.flatnonzero(table))


def mayer_bn_blc(n: int) -> BasicLinearCombination:
    """b_n as 1/n! times the sum over connected labeled graphs."""
    _check_range(n, MAX_MAYER_ORDER, "Mayer connected-graph sum")
    return BasicLinearCombination(n, _all_f_terms(n, graphs.connected_table(n)),
                                  Fraction(1, factorial(n)), "mayer-b")


def virial_block_blc(n: int) -> BasicLinearCombination:
    """B_n as -(n-1)/n! times the sum over labeled blocks."""
    _check_range(n, MAX_BLOCK_ORDER, "block sum")
    return BasicLinearCombination(n, _all_f_terms(n, graphs.biconnected_table(n)),
                                  Fraction(-(n - 1), factorial(n)), "blocks")


def _tree_sum(n: int, keep, tag: str) -> BasicLinearCombination:
    terms = tuple(
        (Fraction(c.size), c.admissible.marked_graph())
        for c in trees.tree_classes(n)
        if keep(c.representative)
    )
    return BasicLinearCombination(n, terms, Fraction(1, factorial(n)), tag)


def tree_sum_bn_blc(n: int) -> BasicLinearCombination:
    """b_n as a class-reduced tree sum weighted by class sizes."""
    _check_range(n, MAX_TREE_SUM_ORDER, "tree sum")
    return _tree_sum(n, lambda t: True, "tree-b")


def tree_sum_an_blc(n: int) -> BasicLinearCombination:
    """a_n as the tree sum restricted to T(n,0)."""
    _check_range(n, MAX_TREE_SUM_ORDER, "tree sum")
    return _tree_sum(n, trees.in_t_n0, "tree-a")


def all_trees_blc(n: int) -> BasicLinearCombination:
    """Unreduced tree sum: every tree of T_n with coefficient 1."""
    table = trees.tree_table(n)
    terms = tuple((Fraction(1), MarkedGraph(n, int(f), int(a))) for f, a in zip(table.tree_mask, table.ad_mask))
    return BasicLinearCombination(n, terms, Fraction(1, factorial(n)), "tree-all")


def ree_hoover_coefficients(n: int) -> np.ndarray:
    """Signed subset sums c(E) = sum over blocks F within E of (-1)^|E \\ F|.

    Computed for every edge set E of the complete graph by an in-place
    Moebius transform over the subset lattice.
    """
    _check_range(n, MAX_RH_ORDER, "Ree-Hoover expansion")
    c = graphs.biconnected_table(n).astype(np.int64)
    for k in range(graphs.edge_count(n)):
        view = c.reshape(-1, 2, 1 << k)
        view[:, 1, :] -= view[:, 0, :]
    return c


def ree_hoover_blc(n: int, reduce: bool = True) -> BasicLinearCombination:
    """B_n over complete graphs whose pairs carry f (in E) or f~ (outside E).

    With ``reduce`` the labeled diagrams are grouped into isomorphism classes;
    each class is kept once with its coefficient times the class size.
    """
    c = ree_hoover_coefficients(n)
    full = graphs.full_mask(n)
    nonzero = np.flatnonzero(c)
    if reduce:
        picked = []
        for orbit in graphs.orbit_partition(n, nonzero):
            values = set(c[orbit].tolist())
            assert len(values) == 1, "Ree-Hoover coefficient is not relabeling invariant"
            rep = int(orbit[0])
            picked.append((Fraction(int(c[rep]) * len(orbit)), rep))
    else:
        picked = [(Fraction(int(c[m])), int(m)) for m in nonzero]
    terms = tuple((coeff, MarkedGraph(n, m, full & ~m)) for coeff, m in picked)
    return BasicLinearCombination(n, terms, Fraction(-(n - 1), factorial(n)),
                                  "ree-hoover" if reduce else "ree-hoover-labeled")


# -- frame sums (ingested) ---------------------------------------------------------


@dataclass(frozen=True)
class FrameSumRecord:
    """Externally supplied ensembles: (cycle-union edges, admissible edges) pairs."""

    order: int
    ensembles: tuple[tuple[frozenset[Edge], frozenset[Edge]], ...] = field(default=())

    def validate(self) -> None:
        n = self.order
        everyone = (1 << n) - 1
        for i, (cycles, ad) in enumerate(self.ensembles):
            for e in cycles | ad:
                if max(e) > n:
                    raise IngestionError(f"ensemble {i}: edge {e} outside 1..{n}")
            if cycles & ad:
                raise IngestionError(f"ensemble {i}: admissible edges overlap the cycle union")
            s_mask = graphs.edges_to_mask(n, cycles)
            if graphs.covered_vertices(n, s_mask | graphs.edges_to_mask(n, ad)) != everyone:
                raise IngestionError(f"ensemble {i}: vertices do not cover 1..{n}")
            if not graphs.mask_is_biconnected(n, s_mask):
                raise IngestionError(f"ensemble {i}: cycle union is not biconnected on 1..{n}")


def parse_frame_records(lines: Iterable[str]) -> list[FrameSumRecord]:
    """Read ``n=<int>; s=<i-j,...>; ad=<i-j,...>`` lines, grouped by n in first-seen order."""
    grouped: dict[int, list] = {}
    for raw in lines:
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = graphs.parse_fields(line)
        try:
            n = int(fields["n"])
        except (KeyError, ValueError):
            raise IngestionError(f"frame record lacks a valid n: {raw!r}") from None
        ens = (frozenset(graphs.parse_edge_list(fields.get("s", ""))),
               frozenset(graphs.parse_edge_list(fields.get("ad", ""))))
        grouped.setdefault(n, []).append(ens)
    return [FrameSumRecord(n, tuple(ens)) for n, ens in grouped.items()]


def format_frame_record(record: FrameSumRecord) -> str:
    return "\n".join(
        f"n={record.order}; s={graphs.format_edge_list(s)}; ad={graphs.format_edge_list(a)}"
        for s, a in record.ensembles
    )


def load_frame_sum(record: FrameSumRecord) -> BasicLinearCombination:
    record.validate()
    n = record.order
    terms = tuple(
        (Fraction(1), MarkedGraph(n, graphs.edges_to_mask(n, s), graphs.edges_to_mask(n, a)))
        for s, a in record.ensembles
    )
    return BasicLinearCombination(n, terms, Fraction(-(n - 1), factorial(n)), "frame")


REPRESENTATIONS = {
    "tree-b": tree_sum_bn_blc,
    "tree-a": tree_sum_an_blc,
    "blocks": virial_block_blc,
    "mayer": mayer_bn_blc,
    "rh": ree_hoover_blc,
}


def build(rep: str, n: int) -> BasicLinearCombination:
    try:
        builder = REPRESENTATIONS[rep]
    except KeyError:
        raise ValueError(f"unknown representation {rep!r}; choose from {sorted(REPRESENTATIONS)}") from None
    return builder(n)
