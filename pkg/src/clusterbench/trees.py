"""Rooted labeled trees on {1..n} (root 1), admissible edges and class reduction."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from math import comb, factorial, prod
from typing import Callable, Iterator, Protocol

import numpy as np
from sympy.functions.combinatorial.numbers import partition as _sympy_partition
from sympy.utilities.iterables import partitions as _sympy_partitions

from . import graphs
from .errors import BudgetError, GraphError
from .graphs import Edge, MarkedGraph

MAX_ENUM_ORDER = 9
MAX_CLASS_ORDER = 8


@dataclass(frozen=True)
class RootedLabeledTree:
    """Parent-array tree: ``parents[k]`` is the parent of vertex k+2."""

    n: int
    parents: tuple[int, ...]

    def __post_init__(self):
        if self.n < 2 or len(self.parents) != self.n - 1:
            raise GraphError(f"need n-1 parents for n={self.n}, got {len(self.parents)}")
        for v, p in zip(range(2, self.n + 1), self.parents):
            if not 1 <= p <= self.n or p == v:
                raise GraphError(f"vertex {v} has invalid parent {p}")
        for v in range(2, self.n + 1):
            seen, w = set(), v
            while w != 1:
                if w in seen:
                    raise GraphError(f"parent map has a cycle through vertex {w}")
                seen.add(w)
                w = self.parent(w)

    def parent(self, v: int) -> int:
        return self.parents[v - 2]

    @cached_property
    def depths(self) -> dict[int, int]:
        depth = {1: 0}

        def walk(v):
            if v not in depth:
                depth[v] = walk(self.parent(v)) + 1
            return depth[v]

        for v in range(2, self.n + 1):
            walk(v)
        return depth

    def depth(self, v: int) -> int:
        return self.depths[v]

    @cached_property
    def layers(self) -> tuple[tuple[int, ...], ...]:
        out = [[] for _ in range(self.height + 1)]
        for v in range(1, self.n + 1):
            out[self.depths[v]].append(v)
        return tuple(tuple(layer) for layer in out)

    @property
    def height(self) -> int:
        return max(self.depths.values())

    @cached_property
    def child_counts(self) -> dict[int, int]:
        counts = dict.fromkeys(range(1, self.n + 1), 0)
        for p in self.parents:
            counts[p] += 1
        return counts

    @property
    def edges(self) -> frozenset[Edge]:
        return frozenset(Edge(v, p) for v, p in zip(range(2, self.n + 1), self.parents))

    @property
    def mask(self) -> int:
        return graphs.edges_to_mask(self.n, self.edges)

    def __str__(self):
        return f"n={self.n}; parents={','.join(map(str, self.parents))}"


class AdmissibleRule(Protocol):
    def __call__(self, tree: RootedLabeledTree) -> frozenset[Edge]: ...


def penrose_rule(tree: RootedLabeledTree) -> frozenset[Edge]:
    """Breadth-first minimal-parent scheme.

    A non-tree pair is admissible when both ends sit in one layer, or when they
    sit in adjacent layers and the shallower end carries a larger label than
    the deeper end's parent.
    """
    tree_edges = tree.edges
    out = set()
    for u, v in graphs.pair_slots(tree.n):
        e = Edge(u, v)
        if e in tree_edges:
            continue
        du, dv = tree.depth(u), tree.depth(v)
        if du == dv:
            out.add(e)
        elif du + 1 == dv and u > tree.parent(v):
            out.add(e)
        elif dv + 1 == du and v > tree.parent(u):
            out.add(e)
    return frozenset(out)


def _penrose_bulk(parents: np.ndarray, depth: np.ndarray) -> np.ndarray:
    n = parents.shape[1]
    ad = np.zeros(parents.shape[0], dtype=np.int64)
    for k, (u, v) in enumerate(graphs.pair_slots(n)):
        u, v = u - 1, v - 1
        pu, pv, du, dv = parents[:, u], parents[:, v], depth[:, u], depth[:, v]
        tree_edge = (pv == u) | ((pu == v) & (u > 0))
        ok = (du == dv) | ((du + 1 == dv) & (u > pv)) | ((dv + 1 == du) & (v > pu))
        ad |= (ok & ~tree_edge).astype(np.int64) << k
    return ad


penrose_rule.bulk = _penrose_bulk


@dataclass(frozen=True)
class AdmissibleEdgeSet:
    tree: RootedLabeledTree
    edges: frozenset[Edge]

    def __post_init__(self):
        if self.edges & self.tree.edges:
            raise GraphError("admissible edges overlap the tree")
        for e in self.edges:
            if max(e) > self.tree.n:
                raise GraphError(f"admissible edge {e} outside 1..{self.tree.n}")

    @property
    def mask(self) -> int:
        return graphs.edges_to_mask(self.tree.n, self.edges)

    def marked_graph(self) -> MarkedGraph:
        return MarkedGraph(self.tree.n, self.tree.mask, self.mask)


def admissible_edges(t: RootedLabeledTree, rule: AdmissibleRule = penrose_rule) -> AdmissibleEdgeSet:
    return AdmissibleEdgeSet(t, frozenset(rule(t)))


def format_tree(t: RootedLabeledTree, ad: AdmissibleEdgeSet | None = None) -> str:
    ad = ad if ad is not None else admissible_edges(t)
    return f"{t}; ad={graphs.format_edge_list(ad.edges)}"


def parse_tree(line: str) -> tuple[RootedLabeledTree, AdmissibleEdgeSet]:
    fields = graphs.parse_fields(line)
    try:
        n = int(fields["n"])
        parents = tuple(int(p) for p in fields["parents"].split(",") if p.strip())
    except (KeyError, ValueError):
        raise GraphError(f"malformed tree record {line!r}") from None
    t = RootedLabeledTree(n, parents)
    return t, AdmissibleEdgeSet(t, frozenset(graphs.parse_edge_list(fields.get("ad", ""))))


# -- bulk enumeration -----------------------------------------------------------


@dataclass
class TreeTable:
    """All of T_n as arrays: 0-based parents (root maps to itself), depths, masks."""

    n: int
    parents: np.ndarray
    depth: np.ndarray
    tree_mask: np.ndarray
    ad_mask: np.ndarray

    def __len__(self):
        return len(self.parents)

    def tree(self, i: int) -> RootedLabeledTree:
        return RootedLabeledTree(self.n, tuple(int(p) + 1 for p in self.parents[i, 1:]))


def _parent_chunks(n: int, chunk: int = 1 << 19) -> Iterator[np.ndarray]:
    free = n - 1
    fixed = 0
    while n ** (free - fixed) > chunk and fixed < free:
        fixed += 1
    tail = free - fixed
    tail_grid = np.array(np.unravel_index(np.arange(n**tail), (n,) * tail), dtype=np.int8).T
    for head in itertools.product(range(n), repeat=fixed):
        block = np.empty((len(tail_grid), n), dtype=np.int8)
        block[:, 0] = 0
        block[:, 1:1 + fixed] = head
        block[:, 1 + fixed:] = tail_grid
        yield block


def _depths(parents: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = parents.shape[1]
    depth = np.zeros(parents.shape, dtype=np.int8)
    anc = np.tile(np.arange(n, dtype=np.int8), (len(parents), 1))
    for _ in range(n - 1):
        depth += anc != 0
        anc = np.take_along_axis(parents, anc.astype(np.intp), axis=1)
    return depth, (anc == 0).all(axis=1)


@lru_cache(maxsize=4)
def tree_table(n: int) -> TreeTable:
    if not 2 <= n <= MAX_ENUM_ORDER:
        raise BudgetError(f"tree enumeration supports 2 <= n <= {MAX_ENUM_ORDER}, got {n}")
    parts = []
    for block in _parent_chunks(n):
        depth, ok = _depths(block)
        parts.append((block[ok], depth[ok]))
    parents = np.concatenate([p for p, _ in parts])
    depth = np.concatenate([d for _, d in parts])
    tree_mask = np.zeros(len(parents), dtype=np.int64)
    for k, (u, v) in enumerate(graphs.pair_slots(n)):
        hit = (parents[:, v - 1] == u - 1) | ((parents[:, u - 1] == v - 1) & (u > 1))
        tree_mask |= hit.astype(np.int64) << k
    ad_mask = _penrose_bulk(parents, depth)
    return TreeTable(n, parents, depth, tree_mask, ad_mask)


def enumerate_trees(n: int) -> Iterator[RootedLabeledTree]:
    """Every labeled tree on {1..n} rooted at 1, once each (n**(n-2) of them)."""
    table = tree_table(n)
    for row in table.parents:
        yield RootedLabeledTree(n, tuple(int(p) + 1 for p in row[1:]))


def _ad_masks(table: TreeTable, rule) -> np.ndarray:
    if rule is penrose_rule:
        return table.ad_mask
    bulk = getattr(rule, "bulk", None)
    if bulk is not None:
        return bulk(table.parents, table.depth)
    return np.array([graphs.edges_to_mask(table.n, rule(table.tree(i))) for i in range(len(table))],
                    dtype=np.int64)


# -- maximal-isomorphism classes ------------------------------------------------


@dataclass(frozen=True)
class TreeClass:
    representative: RootedLabeledTree
    admissible: AdmissibleEdgeSet
    size: int
    members: np.ndarray = field(repr=False, compare=False)


def _layer_signatures(table: TreeTable) -> np.ndarray:
    """Per-tree key shared exactly by maximally isomorphic trees.

    Vertices are listed by (depth, label), except that the deepest layer is
    listed by parent rank, so only the deepest layer may be permuted freely.
    Each entry records depth and the parent's rank inside its own layer.
    """
    parents, depth = table.parents.astype(np.intp), table.depth.astype(np.int64)
    n = table.n
    rank = np.zeros_like(depth)
    for v in range(1, n):
        rank[:, v] = (depth[:, :v] == depth[:, v:v + 1]).sum(axis=1)
    parent_rank = np.take_along_axis(rank, parents, axis=1)
    height = depth.max(axis=1, keepdims=True)
    labels = np.broadcast_to(np.arange(n), depth.shape)
    sort_key = depth * 256 + np.where(depth < height, labels, parent_rank)
    pick = np.argsort(sort_key[:, 1:], axis=1) + 1
    codes = (np.take_along_axis(depth, pick, axis=1) * 16
             + np.take_along_axis(parent_rank, pick, axis=1)).astype(np.uint64)
    key = np.zeros(len(table), dtype=np.uint64)
    for col in range(codes.shape[1]):
        key = (key << np.uint64(8)) | codes[:, col]
    return key


def _orbit_groups(table: TreeTable, ad: np.ndarray) -> list[np.ndarray]:
    order = np.argsort(table.tree_mask)
    keys, keyed_ad = table.tree_mask[order], ad[order]
    emap = graphs.permutation_edge_map(table.n, fix_root=True)
    left = np.ones(len(table), dtype=bool)
    groups = []
    for i in range(len(table)):
        if not left[i]:
            continue
        img_f = graphs.relabel_mask_all(int(table.tree_mask[i]), emap)
        img_ad = graphs.relabel_mask_all(int(ad[i]), emap)
        pos = np.searchsorted(keys, img_f)
        members = np.unique(order[pos[keyed_ad[pos] == img_ad]])
        left[members] = False
        groups.append(members)
    return groups


@lru_cache(maxsize=8)
def tree_classes(n: int, rule: Callable = penrose_rule, relation: str = "maximal") -> tuple[TreeClass, ...]:
    """Partition T_n into classes whose tree integrals coincide.

    ``relation="maximal"`` joins trees related by a root-fixing relabeling that
    maps tree edges onto tree edges and keeps label order inside every layer
    but the deepest; its class sizes obey the closed form in :func:`class_size`.
    ``relation="isomorphism"`` drops the order condition and instead demands
    that admissible edges map onto admissible edges; it is coarser from n=7 on.
    The representative of each class is the member with the smallest
    (tree mask, admissible mask) encoding.
    """
    if not 2 <= n <= MAX_CLASS_ORDER:
        raise BudgetError(f"class reduction supports 2 <= n <= {MAX_CLASS_ORDER}, got {n}")
    table = tree_table(n)
    ad = _ad_masks(table, rule)
    if relation == "maximal":
        _, inverse = np.unique(_layer_signatures(table), return_inverse=True)
        by_class = np.argsort(inverse, kind="stable")
        groups = np.split(by_class, np.flatnonzero(np.diff(inverse[by_class])) + 1)
    elif relation == "isomorphism":
        groups = _orbit_groups(table, ad)
    else:
        raise ValueError(f"unknown relation {relation!r}")
    found = []
    shift = graphs.edge_count(n)
    for members in groups:
        enc = (table.tree_mask[members] << shift) | ad[members]
        rep = int(members[np.argmin(enc)])
        t = table.tree(rep)
        cls = TreeClass(t, AdmissibleEdgeSet(t, graphs.mask_to_edges(n, int(ad[rep]))), len(members), members)
        found.append((int(enc.min()), cls))
    found.sort(key=lambda item: item[0])
    return tuple(c for _, c in found)


def enumerate_tr(n: int, rule: Callable = penrose_rule) -> list[tuple[RootedLabeledTree, AdmissibleEdgeSet]]:
    """One representative per maximal-isomorphism class of T_n."""
    return [(c.representative, c.admissible) for c in tree_classes(n, rule)]


def class_size(t: RootedLabeledTree) -> int:
    """Number of trees maximally isomorphic to ``t`` via the closed form.

    The factor for the vertices one layer above the deepest uses their child
    counts (degree minus the parent edge, which the root lacks).
    """
    h = t.height
    layer_sizes = prod(factorial(len(t.layers[i])) for i in range(1, h))
    fans = prod(factorial(t.child_counts[v]) for v in t.layers[h - 1])
    size, rem = divmod(factorial(t.n - 1), layer_sizes * fans)
    assert rem == 0
    return size


# -- the a_n subset T(n,0) ------------------------------------------------------------


def in_t_n0(t: RootedLabeledTree) -> bool:
    """Layers 1..H-1 hold at least two vertices, and no layer below the root
    has its largest label as the only vertex with children."""
    layers = t.layers
    h = t.height
    if any(len(layers[i]) < 2 for i in range(1, h)):
        return False
    for i in range(1, h + 1):
        parents = {v for v in layers[i] if t.child_counts[v]}
        if parents == {max(layers[i])}:
            return False
    return True


# -- closed-form counts -----------------------------------------------------------------


def compositions(total: int, parts: int, minimums=None) -> Iterator[tuple[int, ...]]:
    """Ordered vectors of ``parts`` integers (each >= its minimum) summing to ``total``."""
    mins = list(minimums) if minimums is not None else [1] * parts
    slack = total - sum(mins)
    if slack < 0:
        return
    for cuts in itertools.combinations(range(slack + parts - 1), parts - 1):
        bounds = (-1,) + cuts + (slack + parts - 1,)
        yield tuple(mins[i] + bounds[i + 1] - bounds[i] - 1 for i in range(parts))


def _last_layer(vec) -> int:
    above, last = vec[-2], vec[-1]
    return comb(above + last - 1, last)


def count_tr(n: int) -> int:
    """Closed-form number of maximal-isomorphism classes of T_n."""
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    total = 1 + (2 ** (n - 2) - 1)
    for h in range(3, n):
        for vec in compositions(n - 1, h):
            total += _last_layer(vec) * prod(vec[i - 1] ** vec[i] for i in range(1, h - 1))
    return total


def count_tr0(n: int) -> int:
    """Closed-form number of classes inside T(n,0)."""
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    total = 1
    for h in range(2, -(-n // 2) + 1):
        for vec in compositions(n - 1, h, [2] * (h - 1) + [1]):
            total += (_last_layer(vec) - 1) * prod(vec[i - 1] ** vec[i] - 1 for i in range(1, h - 1))
    return total


# -- integer partitions -------------------------------------------------------------------


@dataclass(frozen=True)
class PartitionVector:
    """m = (m_1..m_k) with sum j*m_j fixed; m_j counts parts equal to j."""

    m: tuple[int, ...]

    @property
    def norm(self) -> int:
        return sum(self.m)

    @property
    def weight(self) -> int:
        return sum(j * mj for j, mj in enumerate(self.m, start=1))


def partition_vectors(n: int) -> list[PartitionVector]:
    """All (n-1)-vectors of multiplicities with sum j*m_j = n-1."""
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    k = n - 1
    out = []
    for parts in _sympy_partitions(k):
        out.append(PartitionVector(tuple(parts.get(j, 0) for j in range(1, k + 1))))
    out.sort(key=lambda pv: pv.m, reverse=True)
    return out


def partition_count(k: int) -> int:
    if k < 0:
        raise ValueError(f"k must be non-negative, got {k}")
    return int(_sympy_partition(k))
