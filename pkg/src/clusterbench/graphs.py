"""Labeled graphs whose edges carry either a Mayer or a Boltzmann label.

Edges on the vertex set {1..n} are addressed by bit positions in the
lexicographic order of pairs (1,2), (1,3), ..., (1,n), (2,3), ..., so an
edge set is a plain integer mask and all subsets of the complete graph are
the integers 0 .. 2**(n(n-1)/2) - 1.  Every public interface speaks 1-based
vertex labels.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

import numpy as np

from .errors import BudgetError, GraphError

MAX_CANONICAL_ORDER = 9
MAX_TABLE_ORDER = 7


@dataclass(frozen=True, order=True)
class Edge:
    """Unordered pair of distinct vertices, stored as (smaller, larger)."""

    u: int
    v: int

    def __post_init__(self):
        if self.u == self.v:
            raise GraphError(f"edge endpoints must differ, got {self.u}-{self.v}")
        if self.u < 1 or self.v < 1:
            raise GraphError(f"vertex labels are positive, got {self.u}-{self.v}")
        if self.u > self.v:
            u, v = self.v, self.u
            object.__setattr__(self, "u", u)
            object.__setattr__(self, "v", v)

    def __iter__(self):
        yield self.u
        yield self.v

    def __str__(self):
        return f"{self.u}-{self.v}"


def edge_count(n: int) -> int:
    return n * (n - 1) // 2


@lru_cache(maxsize=None)
def pair_slots(n: int) -> tuple[tuple[int, int], ...]:
    """All vertex pairs of {1..n} in bit order."""
    return tuple(itertools.combinations(range(1, n + 1), 2))


@lru_cache(maxsize=None)
def _bit_lookup(n: int) -> dict[tuple[int, int], int]:
    return {p: k for k, p in enumerate(pair_slots(n))}


def bit_of(n: int, u: int, v: int) -> int:
    if u > v:
        u, v = v, u
    try:
        return _bit_lookup(n)[(u, v)]
    except KeyError:
        raise GraphError(f"edge {u}-{v} out of range for n={n}") from None


def edges_to_mask(n: int, edges: Iterable[Edge | tuple[int, int]]) -> int:
    mask = 0
    for e in edges:
        u, v = e
        mask |= 1 << bit_of(n, u, v)
    return mask


def mask_to_edges(n: int, mask: int) -> frozenset[Edge]:
    slots = pair_slots(n)
    return frozenset(Edge(*slots[k]) for k in range(len(slots)) if mask >> k & 1)


def full_mask(n: int) -> int:
    return (1 << edge_count(n)) - 1


def covered_vertices(n: int, mask: int) -> int:
    """Bitmask (bit v-1 for vertex v) of endpoints touched by the edges."""
    seen = 0
    for k, (u, v) in enumerate(pair_slots(n)):
        if mask >> k & 1:
            seen |= (1 << (u - 1)) | (1 << (v - 1))
    return seen


def _adjacency(n: int, mask: int) -> list[int]:
    adj = [0] * n
    for k, (u, v) in enumerate(pair_slots(n)):
        if mask >> k & 1:
            adj[u - 1] |= 1 << (v - 1)
            adj[v - 1] |= 1 << (u - 1)
    return adj


def _reach(adj: list[int], start: int, allowed: int) -> int:
    seen = 1 << start
    frontier = seen
    while frontier:
        nxt = 0
        bits = frontier
        while bits:
            low = bits & -bits
            nxt |= adj[low.bit_length() - 1]
            bits ^= low
        nxt &= allowed & ~seen
        seen |= nxt
        frontier = nxt
    return seen


def mask_is_connected(n: int, mask: int) -> bool:
    everyone = (1 << n) - 1
    return _reach(_adjacency(n, mask), 0, everyone) == everyone


def mask_is_biconnected(n: int, mask: int) -> bool:
    adj = _adjacency(n, mask)
    everyone = (1 << n) - 1
    if n < 2 or _reach(adj, 0, everyone) != everyone:
        return False
    for cut in range(n):
        rest = everyone & ~(1 << cut)
        start = 0 if cut else 1
        if _reach(adj, start, rest) != rest:
            return False
    return True


def _checked_mask(n: int, edges) -> int:
    if n < 1:
        raise GraphError(f"vertex count must be positive, got {n}")
    for e in edges:
        u, v = e
        if not (1 <= u <= n and 1 <= v <= n):
            raise GraphError(f"edge {u}-{v} has an endpoint outside 1..{n}")
    return edges_to_mask(n, edges)


def is_connected(n: int, edges: Iterable[Edge | tuple[int, int]]) -> bool:
    """True iff the graph on {1..n} with these edges is connected."""
    return mask_is_connected(n, _checked_mask(n, list(edges)))


def is_biconnected(n: int, edges: Iterable[Edge | tuple[int, int]]) -> bool:
    """Connected and free of cut vertices; a lone edge on two vertices counts."""
    return mask_is_biconnected(n, _checked_mask(n, list(edges)))


@dataclass(frozen=True)
class CanonicalPair:
    """Disjoint Mayer/Boltzmann edge sets whose endpoints are exactly {1..n}."""

    mayer_edges: frozenset[Edge]
    boltzmann_edges: frozenset[Edge]
    order: int

    def __post_init__(self):
        if self.mayer_edges & self.boltzmann_edges:
            both = sorted(self.mayer_edges & self.boltzmann_edges)
            raise GraphError(f"edges labeled both Mayer and Boltzmann: {', '.join(map(str, both))}")
        labels = {x for e in self.mayer_edges | self.boltzmann_edges for x in e}
        if labels != set(range(1, self.order + 1)):
            raise GraphError(f"edge endpoints {sorted(labels)} do not cover exactly 1..{self.order}")


@dataclass(frozen=True)
class MarkedGraph:
    """Graph G(V_n; X_f, X_f~) held as two disjoint edge masks."""

    n: int
    f: int
    ft: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise GraphError(f"order must be at least 2, got {self.n}")
        if self.f & self.ft:
            raise GraphError("Mayer and Boltzmann edge sets overlap")
        if (self.f | self.ft) >> edge_count(self.n):
            raise GraphError(f"edge mask out of range for n={self.n}")
        if covered_vertices(self.n, self.f | self.ft) != (1 << self.n) - 1:
            raise GraphError(f"edge endpoints do not cover exactly 1..{self.n}")

    @classmethod
    def from_edges(cls, n: int, mayer, boltzmann=()) -> "MarkedGraph":
        mayer, boltzmann = list(mayer), list(boltzmann)
        return cls(n, _checked_mask(n, mayer), _checked_mask(n, boltzmann))

    @property
    def mayer_edges(self) -> frozenset[Edge]:
        return mask_to_edges(self.n, self.f)

    @property
    def boltzmann_edges(self) -> frozenset[Edge]:
        return mask_to_edges(self.n, self.ft)

    @property
    def pair(self) -> CanonicalPair:
        return CanonicalPair(self.mayer_edges, self.boltzmann_edges, self.n)

    @property
    def mayer_count(self) -> int:
        return self.f.bit_count()

    @property
    def boltzmann_count(self) -> int:
        return self.ft.bit_count()

    @property
    def is_basic(self) -> bool:
        return mask_is_connected(self.n, self.f)

    @property
    def is_complete(self) -> bool:
        return (self.f | self.ft) == full_mask(self.n)

    def relabel(self, perm) -> "MarkedGraph":
        """Apply the vertex map ``v -> perm[v-1]`` (1-based image labels)."""
        slots = pair_slots(self.n)

        def move(mask):
            out = 0
            for k, (u, v) in enumerate(slots):
                if mask >> k & 1:
                    out |= 1 << bit_of(self.n, perm[u - 1], perm[v - 1])
            return out

        return MarkedGraph(self.n, move(self.f), move(self.ft))

    def __str__(self):
        return format_graph(self)


def check_lemma1(g: MarkedGraph) -> None:
    """Every Boltzmann edge of a basic graph joins R(G)-non-adjacent vertices."""
    if g.is_basic and g.f & g.ft:
        raise GraphError("Boltzmann edge doubles a Mayer edge")


def mayer_subgraph(g: MarkedGraph) -> tuple[int, frozenset[Edge]]:
    return g.n, g.mayer_edges


def n1_complexity(g: MarkedGraph) -> int:
    """|X_f| - n + 1 + |X_f~|: function evaluations beyond a spanning tree."""
    if not g.is_basic:
        raise GraphError("N1 is defined for basic graphs only (Mayer subgraph disconnected)")
    return g.mayer_count - g.n + 1 + g.boltzmann_count


# -- permutations and canonical forms ---------------------------------------


@lru_cache(maxsize=None)
def permutation_edge_map(n: int, fix_root: bool = False) -> np.ndarray:
    """Row p gives, for every edge bit, its bit position after permutation p."""
    verts = range(1, n) if fix_root else range(n)
    perms = np.array(list(itertools.permutations(verts)), dtype=np.int8)
    if fix_root:
        perms = np.hstack([np.zeros((len(perms), 1), dtype=np.int8), perms])
    slots = np.array(pair_slots(n), dtype=np.int16) - 1
    index = np.full((n, n), -1, dtype=np.int16)
    for k, (u, v) in enumerate(slots):
        index[u, v] = index[v, u] = k
    return index[perms[:, slots[:, 0]], perms[:, slots[:, 1]]].astype(np.int8)


def relabel_mask_all(mask: int, emap: np.ndarray) -> np.ndarray:
    """Images of one edge mask under every permutation row of ``emap``."""
    out = np.zeros(len(emap), dtype=np.int64)
    k = 0
    while mask:
        if mask & 1:
            out |= np.left_shift(np.int64(1), emap[:, k].astype(np.int64))
        mask >>= 1
        k += 1
    return out


def canonical_form(g: MarkedGraph) -> bytes:
    """Lexicographic minimum of (Mayer mask, Boltzmann mask) over all n! relabelings."""
    if g.n > MAX_CANONICAL_ORDER:
        raise BudgetError(f"brute-force canonical form supports n <= {MAX_CANONICAL_ORDER}, got {g.n}")
    emap = permutation_edge_map(g.n)
    fs = relabel_mask_all(g.f, emap)
    fts = relabel_mask_all(g.ft, emap)
    best = np.lexsort((fts, fs))[0]
    return bytes([g.n]) + int(fs[best]).to_bytes(8, "big") + int(fts[best]).to_bytes(8, "big")


# -- whole-lattice tables -----------------------------------------------------


def _lattice_adjacency(n: int) -> np.ndarray:
    masks = np.arange(1 << edge_count(n), dtype=np.int64)
    adj = np.zeros((n, masks.size), dtype=np.uint8)
    for k, (u, v) in enumerate(pair_slots(n)):
        present = ((masks >> k) & 1).astype(np.uint8)
        adj[u - 1] |= present << (v - 1)
        adj[v - 1] |= present << (u - 1)
    return adj


def _lattice_reach(adj: np.ndarray, start: int, allowed: int) -> np.ndarray:
    n = adj.shape[0]
    reach = np.full(adj.shape[1], 1 << start, dtype=np.uint8)
    for _ in range(n - 1):
        grown = reach.copy()
        for v in range(n):
            if allowed >> v & 1:
                grown |= adj[v] * ((reach >> v) & 1)
        reach = grown & allowed
    return reach


def _check_table_order(n: int):
    if not 1 <= n <= MAX_TABLE_ORDER:
        raise BudgetError(f"lattice tables cover n <= {MAX_TABLE_ORDER}, got {n}")


@lru_cache(maxsize=None)
def connected_table(n: int) -> np.ndarray:
    """Boolean array over all edge masks on {1..n}: is the graph connected."""
    _check_table_order(n)
    everyone = (1 << n) - 1
    return _lattice_reach(_lattice_adjacency(n), 0, everyone) == everyone


@lru_cache(maxsize=None)
def biconnected_table(n: int) -> np.ndarray:
    """Boolean array over all edge masks on {1..n}: is the graph biconnected."""
    _check_table_order(n)
    if n < 2:
        return np.zeros(1, dtype=bool)
    adj = _lattice_adjacency(n)
    everyone = (1 << n) - 1
    ok = _lattice_reach(adj, 0, everyone) == everyone
    for cut in range(n):
        rest = everyone & ~(1 << cut)
        ok &= _lattice_reach(adj, 0 if cut else 1, rest) == rest
    return ok


def orbit_partition(n: int, masks: Iterable[int], fix_root: bool = False) -> list[np.ndarray]:
    """Group Mayer-only edge masks into relabeling orbits.

    Returns one sorted array per orbit that meets ``masks``; each array holds
    only the members present in ``masks``.
    """
    emap = permutation_edge_map(n, fix_root)
    pool = np.unique(np.fromiter(masks, dtype=np.int64))
    left = np.ones(pool.size, dtype=bool)
    orbits = []
    cursor = 0
    while cursor < pool.size:
        if not left[cursor]:
            cursor += 1
            continue
        images = np.unique(relabel_mask_all(int(pool[cursor]), emap))
        hit = np.searchsorted(pool, images[np.isin(images, pool)])
        left[hit] = False
        orbits.append(pool[hit])
    return orbits


@lru_cache(maxsize=None)
def graph_class_table(n: int) -> np.ndarray:
    """Isomorphism-class id for every edge mask on {1..n} (ids by first member)."""
    _check_table_order(n)
    size = 1 << edge_count(n)
    ids = np.full(size, -1, dtype=np.int32)
    emap = permutation_edge_map(n)
    cls = 0
    for mask in range(size):
        if ids[mask] >= 0:
            continue
        ids[relabel_mask_all(mask, emap)] = cls
        cls += 1
    return ids


# -- text records ---------------------------------------------------------------

_FIELD = re.compile(r"\s*(\w+)\s*=\s*(.*?)\s*$")


def parse_fields(line: str) -> dict[str, str]:
    fields = {}
    for chunk in line.split(";"):
        if not chunk.strip():
            continue
        m = _FIELD.match(chunk)
        if not m:
            raise GraphError(f"malformed record field {chunk!r}")
        fields[m.group(1)] = m.group(2)
    return fields


def parse_edge_list(text: str) -> list[Edge]:
    edges = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        try:
            u, v = (int(x) for x in item.split("-"))
        except ValueError:
            raise GraphError(f"malformed edge {item!r}") from None
        edges.append(Edge(u, v))
    return edges


def format_edge_list(edges: Iterable[Edge]) -> str:
    return ",".join(str(e) for e in sorted(edges))


def format_graph(g: MarkedGraph) -> str:
    return f"n={g.n}; f={format_edge_list(g.mayer_edges)}; ft={format_edge_list(g.boltzmann_edges)}"


def parse_graph(line: str) -> MarkedGraph:
    fields = parse_fields(line)
    try:
        n = int(fields["n"])
    except (KeyError, ValueError):
        raise GraphError(f"record lacks a valid n: {line!r}") from None
    return MarkedGraph.from_edges(n, parse_edge_list(fields.get("f", "")),
                                  parse_edge_list(fields.get("ft", "")))
