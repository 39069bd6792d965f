"""Complexity criteria on basic linear combinations and their collections."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

from . import blc, graphs
from .blc import BasicLinearCombination
from .errors import GraphError


@dataclass(frozen=True)
class ComplexityReport:
    order: int
    cr1: int
    cr2: int
    cr3: int
    complete: bool
    n1_terms: tuple[int, ...]

    def criterion(self, i: int) -> int:
        return {1: self.cr1, 2: self.cr2, 3: self.cr3}[_index(i)]

    def to_dict(self) -> dict:
        return {"order": self.order, "cr1": self.cr1, "cr2": self.cr2, "cr3": self.cr3,
                "complete": self.complete, "n1_terms": list(self.n1_terms)}


def _index(i: int) -> int:
    if i not in (1, 2, 3):
        raise ValueError(f"criterion index must be 1, 2 or 3, got {i}")
    return i


def cr1(L: BasicLinearCombination) -> int:
    return len(L.terms)


def cr2(L: BasicLinearCombination) -> int:
    return sum(g.mayer_count + g.boltzmann_count for g in L.term_graphs)


def cr3(L: BasicLinearCombination) -> int:
    return sum(graphs.n1_complexity(g) for g in L.term_graphs)


def is_complete(L: BasicLinearCombination) -> bool:
    return all(g.is_complete for g in L.term_graphs)


def report(L: BasicLinearCombination) -> ComplexityReport:
    n1 = tuple(graphs.n1_complexity(g) for g in L.term_graphs)
    return ComplexityReport(L.order, cr1(L), cr2(L), sum(n1), is_complete(L), n1)


def criterion(L: BasicLinearCombination, i: int) -> int:
    return (cr1, cr2, cr3)[_index(i) - 1](L)


def cr_prime(collection: Iterable[BasicLinearCombination], i: int) -> int:
    """Sum of criterion ``i`` over a collection of BLCs."""
    _index(i)
    return sum(criterion(L, i) for L in collection)


def tree_collection(kind: str, n: int) -> list[BasicLinearCombination]:
    """The tree sums of orders 2..n that a virial coefficient of order n is assembled from."""
    builder = {"tree-b": blc.tree_sum_bn_blc, "tree-a": blc.tree_sum_an_blc}.get(kind)
    if builder is None:
        raise ValueError(f"collections are defined for tree-b and tree-a, got {kind!r}")
    return [builder(k) for k in range(2, n + 1)]


class Verdict(str, Enum):
    SIGNIFICANTLY_SIMPLER = "significantly_simpler"
    APPROXIMATELY_EQUAL = "approximately_equal"
    SIGNIFICANTLY_MORE_COMPLEX = "significantly_more_complex"


@dataclass(frozen=True)
class Comparison:
    """Verdict on the first argument relative to the second."""

    verdict: Verdict
    criterion: int
    score_a: int
    score_b: int
    # caller-supplied knowledge that the first is more complex despite equal scores
    marginally_more_complex: bool = False

    def to_dict(self) -> dict:
        return {"verdict": self.verdict.value, "criterion": self.criterion,
                "score_a": self.score_a, "score_b": self.score_b,
                "marginally_more_complex": self.marginally_more_complex}


Scored = int | ComplexityReport | BasicLinearCombination | Sequence[BasicLinearCombination]


def score(x: Scored, i: int) -> int:
    if isinstance(x, bool):
        raise TypeError("a boolean is not a score")
    if isinstance(x, int):
        return x
    if isinstance(x, ComplexityReport):
        return x.criterion(i)
    if isinstance(x, BasicLinearCombination):
        return criterion(x, i)
    if isinstance(x, Sequence) and all(isinstance(L, BasicLinearCombination) for L in x):
        return cr_prime(x, i)
    raise TypeError(f"cannot score {type(x).__name__}")


def compare(a: Scored, b: Scored, criterion: int, marginally_more_complex: bool = False) -> Comparison:
    """Three-way comparison of scores; the flag only annotates a tie."""
    _index(criterion)
    sa, sb = score(a, criterion), score(b, criterion)
    if sa > sb:
        verdict = Verdict.SIGNIFICANTLY_MORE_COMPLEX
    elif sa < sb:
        verdict = Verdict.SIGNIFICANTLY_SIMPLER
    else:
        verdict = Verdict.APPROXIMATELY_EQUAL
    if marginally_more_complex and verdict is not Verdict.APPROXIMATELY_EQUAL:
        raise GraphError("the marginal annotation applies only to equal scores")
    return Comparison(verdict, criterion, sa, sb, marginally_more_complex)
