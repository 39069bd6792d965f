"""Pair potentials, Mayer functions and estimates of basic integrals.

Monte Carlo draws one displacement per edge of a spanning tree of the Mayer
subgraph from a density q close to |f|, multiplies the edge weights f/q, and
multiplies in the remaining Mayer and Boltzmann factors at the induced
separations.  For hard cores q = |f|/C exactly, so each edge weight is
-C.

Samples are generated in fixed chunks, each with its own seeded stream, and
reduced in chunk order, so estimates do not depend on the worker count.
"""
from __future__ import annotations

import itertools
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np

from . import blc, graphs, series
from .blc import BasicLinearCombination
from .errors import BudgetError, GraphError
from .graphs import MarkedGraph
from .trees import AdmissibleEdgeSet, RootedLabeledTree

KINDS = ("hard-rod", "hard-sphere", "square-well", "lennard-jones")
CHUNK = 1 << 16
LJ_TAIL = 1e-12


def _ball_volume(nu: int, radius: float) -> float:
    if nu == 1:
        return 2.0 * radius
    return math.pi ** (nu / 2) / math.gamma(nu / 2 + 1) * radius ** nu


@dataclass(frozen=True)
class PotentialModel:
    kind: str
    sigma: float = 1.0
    epsilon: float = 1.0
    nu: int = 1
    beta: float = 1.0
    well_width: float = 1.5  # square-well outer radius in units of sigma

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown potential {self.kind!r}; choose from {KINDS}")
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        if not self.beta > 0:
            raise ValueError("beta must be positive")
        if self.nu < 1:
            raise ValueError("dimension must be at least 1")
        if self.kind == "hard-rod" and self.nu != 1:
            raise ValueError("hard rods live in one dimension")
        if self.kind == "square-well" and not self.well_width > 1:
            raise ValueError("square-well width must exceed 1")

    def f_radial(self, r: np.ndarray) -> np.ndarray:
        """Mayer function of the pair distance, vectorized."""
        r = np.asarray(r, dtype=float)
        if self.kind in ("hard-rod", "hard-sphere"):
            return np.where(r < self.sigma, -1.0, 0.0)
        if self.kind == "square-well":
            well = math.expm1(self.beta * self.epsilon)
            return np.where(r < self.sigma, -1.0, np.where(r < self.well_width * self.sigma, well, 0.0))
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            s6 = (self.sigma / r) ** 6
            out = np.expm1(-self.beta * 4 * self.epsilon * (s6 * s6 - s6))
        return np.where(r > 0, out, -1.0)

    @cached_property
    def sampler(self) -> "EdgeSampler":
        return _make_sampler(self)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "sigma": self.sigma, "epsilon": self.epsilon, "nu": self.nu,
                "beta": self.beta, "well_width": self.well_width}


def mayer_f(model: PotentialModel, r) -> float:
    """exp(-beta phi(r)) - 1 at a displacement (scalar or vector)."""
    dist = float(np.linalg.norm(np.atleast_1d(np.asarray(r, dtype=float))))
    return float(model.f_radial(dist))


def boltzmann_f(model: PotentialModel, r) -> float:
    return 1.0 + mayer_f(model, r)


# -- edge samplers --------------------------------------------------------------------


def _directions(rng: np.random.Generator, size: int, nu: int) -> np.ndarray:
    if nu == 1:
        return rng.choice(np.array([-1.0, 1.0]), size=size)[:, None]
    v = rng.standard_normal((size, nu))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


@dataclass
class EdgeSampler:
    """Piecewise-uniform radial density q; ``draw`` returns displacements and f/q.

    Shell k spans radii [edges[k], edges[k+1]) and carries probability probs[k];
    where |f| is constant on every shell, q = |f|/C and f/q = sign(f) C.
    """

    model: PotentialModel
    edges: np.ndarray
    probs: np.ndarray
    norm: float  # integral of |f|, exact or tabulated

    def __post_init__(self):
        nu = self.model.nu
        self._cdf = np.cumsum(self.probs)
        self._cdf[-1] = 1.0
        self._lo = self.edges[:-1] ** nu
        self._hi = self.edges[1:] ** nu
        vol = _ball_volume(nu, 1.0) * (self._hi - self._lo)
        self._density = self.probs / vol

    def draw(self, rng: np.random.Generator, size: int) -> tuple[np.ndarray, np.ndarray]:
        nu = self.model.nu
        shell = np.searchsorted(self._cdf, rng.random(size), side="right")
        shell = np.minimum(shell, len(self.probs) - 1)
        u = rng.random(size)
        r = (self._lo[shell] + u * (self._hi[shell] - self._lo[shell])) ** (1.0 / nu)
        disp = _directions(rng, size, nu) * r[:, None]
        weight = self.model.f_radial(r) / self._density[shell]
        return disp, weight


def _make_sampler(model: PotentialModel) -> EdgeSampler:
    nu, s = model.nu, model.sigma
    if model.kind in ("hard-rod", "hard-sphere"):
        return EdgeSampler(model, np.array([0.0, s]), np.array([1.0]), _ball_volume(nu, s))
    if model.kind == "square-well":
        outer = model.well_width * s
        core = _ball_volume(nu, s)
        shell = abs(math.expm1(model.beta * model.epsilon)) * (_ball_volume(nu, outer) - core)
        total = core + shell
        if shell == 0:
            return EdgeSampler(model, np.array([0.0, s]), np.array([1.0]), core)
        return EdgeSampler(model, np.array([0.0, s, outer]), np.array([core, shell]) / total, total)
    return _lennard_jones_sampler(model)


def _lennard_jones_sampler(model: PotentialModel) -> EdgeSampler:
    nu, s = model.nu, model.sigma
    be = model.beta * model.epsilon
    # beyond r_cut, |f| ~ 4 beta eps (sigma/r)^6 < LJ_TAIL
    r_cut = s * max((4 * be / LJ_TAIL) ** (1 / 6), 3.0)
    edges = np.unique(np.concatenate([
        np.linspace(0.0, 0.8 * s, 17),
        np.linspace(0.8 * s, 3.0 * s, 4401),
        np.geomspace(3.0 * s, r_cut, 2001),
    ]))
    lo, hi = edges[:-1], edges[1:]
    probe = np.stack([model.f_radial(x) for x in (lo, 0.5 * (lo + hi), hi)])
    height = np.max(np.abs(probe), axis=0)
    height = np.maximum(height, 1e-300)
    vol = _ball_volume(nu, 1.0) * (hi ** nu - lo ** nu)
    mass = height * vol
    mid = 0.5 * (lo + hi)
    norm = float(np.sum(np.abs(model.f_radial(mid)) * vol))
    return EdgeSampler(model, edges, mass / mass.sum(), norm)


# -- estimators -----------------------------------------------------------------------


@dataclass
class EstimateReport:
    value: float
    std_error: float
    samples: int
    normalization: float
    evaluations: int
    elapsed_s: float = 0.0
    evaluations_per_sample: list[int] = field(default_factory=list)
    terms: list[dict] = field(default_factory=list)

    def __post_init__(self):
        if self.std_error < 0 or self.samples <= 0:
            raise ValueError("std_error must be non-negative and samples positive")

    def to_dict(self, timing: bool = False) -> dict:
        out = {"value": self.value, "std_error": self.std_error, "samples": self.samples,
               "normalization": self.normalization, "evaluations": self.evaluations,
               "evaluations_per_sample": self.evaluations_per_sample}
        if self.terms:
            out["terms"] = self.terms
        if timing:
            out["elapsed_s"] = self.elapsed_s
        return out


def spanning_tree(g: MarkedGraph) -> list[tuple[int, int]]:
    """Breadth-first tree of the Mayer subgraph from vertex 1, smallest labels first.

    Returns (child, parent) pairs in visiting order.
    """
    adj: dict[int, list[int]] = {v: [] for v in range(1, g.n + 1)}
    for e in g.mayer_edges:
        adj[e.u].append(e.v)
        adj[e.v].append(e.u)
    seen, order, queue = {1}, [], [1]
    for p in queue:
        for c in sorted(adj[p]):
            if c not in seen:
                seen.add(c)
                order.append((c, p))
                queue.append(c)
    if len(seen) != g.n:
        raise GraphError("Mayer subgraph is not connected")
    return order


@dataclass
class _Plan:
    n: int
    tree: list[tuple[int, int]]
    extra_f: list[tuple[int, int]]
    extra_ft: list[tuple[int, int]]

    @property
    def evaluations_per_sample(self) -> int:
        return len(self.tree) + len(self.extra_f) + len(self.extra_ft)


def _plan(g: MarkedGraph) -> _Plan:
    if not g.is_basic:
        raise GraphError("only basic graphs have finite integrals")
    tree = spanning_tree(g)
    used = {graphs.Edge(c, p) for c, p in tree}
    extra_f = [tuple(e) for e in sorted(g.mayer_edges - used)]
    extra_ft = [tuple(e) for e in sorted(g.boltzmann_edges)]
    return _Plan(g.n, tree, extra_f, extra_ft)


class _Counter:
    def __init__(self):
        self.calls = 0

    def __call__(self, f: Callable, x: np.ndarray) -> np.ndarray:
        self.calls += 1
        return f(x)


def _chunk_weights(plan: _Plan, model: PotentialModel, rng: np.random.Generator, size: int,
                   counter: _Counter) -> np.ndarray:
    sampler = model.sampler
    pos = np.zeros((size, plan.n + 1, model.nu))
    weight = np.ones(size)
    for child, parent in plan.tree:
        disp, w = counter(lambda k: sampler.draw(rng, k), size)
        pos[:, child] = pos[:, parent] + disp
        weight *= w
    for i, j in plan.extra_f:
        r = np.linalg.norm(pos[:, i] - pos[:, j], axis=1)
        weight *= counter(model.f_radial, r)
    for i, j in plan.extra_ft:
        r = np.linalg.norm(pos[:, i] - pos[:, j], axis=1)
        weight *= 1.0 + counter(model.f_radial, r)
    return weight


def _chunk_stats(plan, model, seed, key, size):
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=key)))
    counter = _Counter()
    w = _chunk_weights(plan, model, rng, size, counter)
    mean = float(w.mean())
    m2 = float(((w - mean) ** 2).sum())
    return size, mean, m2, counter.calls * size


def _combine(parts):
    """Ordered pairwise merge of (count, mean, M2) triples."""
    n, mean, m2 = 0, 0.0, 0.0
    for k, mk, m2k, _ in parts:
        delta = mk - mean
        tot = n + k
        mean += delta * k / tot
        m2 += m2k + delta * delta * n * k / tot
        n = tot
    return n, mean, m2


def _validate_samples(samples: int):
    if samples < 2:
        raise ValueError("need at least 2 samples")


def _estimate_plan(plan: _Plan, model: PotentialModel, samples: int, seed: int,
                   stream: tuple[int, ...], workers: int) -> EstimateReport:
    _validate_samples(samples)
    start = time.perf_counter()
    sizes = [CHUNK] * (samples // CHUNK) + ([samples % CHUNK] if samples % CHUNK else [])
    jobs = [(plan, model, seed, stream + (c,), size) for c, size in enumerate(sizes)]
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda a: _chunk_stats(*a), jobs))
    else:
        parts = [_chunk_stats(*a) for a in jobs]
    n, mean, m2 = _combine(parts)
    evaluations = sum(p[3] for p in parts)
    if evaluations != samples * plan.evaluations_per_sample:
        raise AssertionError("function-evaluation accounting is inconsistent")
    se = math.sqrt(m2 / (n - 1) / n)
    return EstimateReport(mean, se, n, model.sampler.norm, evaluations,
                          time.perf_counter() - start, [plan.evaluations_per_sample])


def estimate_graph_mc(g: MarkedGraph, model: PotentialModel, samples: int, seed: int,
                      workers: int = 1, stream: tuple[int, ...] = ()) -> EstimateReport:
    """Unbiased estimate of the basic integral I(g)."""
    return _estimate_plan(_plan(g), model, samples, seed, tuple(stream), workers)


def estimate_tree_integral_mc(t: RootedLabeledTree, ad: AdmissibleEdgeSet, model: PotentialModel,
                              samples: int, seed: int, workers: int = 1) -> EstimateReport:
    if ad.tree != t:
        raise GraphError("admissible set belongs to a different tree")
    return estimate_graph_mc(ad.marked_graph(), model, samples, seed, workers)


def estimate_blc(L: BasicLinearCombination, model: PotentialModel, samples: int, seed: int,
                 workers: int = 1, max_evaluations: int | None = None,
                 stream: int = 0) -> EstimateReport:
    """prefactor * sum(coeff * I(term)), each term on its own substream.

    ``samples`` is per term; ``max_evaluations`` caps the total count of
    Mayer/Boltzmann evaluations before any sampling starts.
    """
    _validate_samples(samples)
    plans = [_plan(g) for g in L.term_graphs]
    need = samples * sum(p.evaluations_per_sample for p in plans)
    if max_evaluations is not None and need > max_evaluations:
        raise BudgetError(f"{need} function evaluations exceed the budget of {max_evaluations}")
    start = time.perf_counter()
    value, var, evals, rows = 0.0, 0.0, 0, []
    pre = float(L.prefactor)
    for idx, ((coeff, g), plan) in enumerate(zip(L.terms, plans)):
        r = _estimate_plan(plan, model, samples, seed, (L.order, stream, idx), workers)
        c = float(coeff)
        value += c * r.value
        var += (c * r.std_error) ** 2
        evals += r.evaluations
        rows.append({"graph": graphs.format_graph(g), "coeff": f"{coeff.numerator}/{coeff.denominator}",
                     "value": r.value, "std_error": r.std_error})
    return EstimateReport(pre * value, abs(pre) * math.sqrt(var), samples, model.sampler.norm, evals,
                          time.perf_counter() - start, [p.evaluations_per_sample for p in plans], rows)


VIRIAL_ROUTES = ("blocks", "rh", "b", "a")


def estimate_virial(n: int, model: PotentialModel, route: str, samples: int, seed: int,
                    workers: int = 1) -> EstimateReport:
    """B_n directly from a block or Ree-Hoover sum, or through estimated b_k or a_k.

    The series routes propagate the per-coefficient errors to first order.
    """
    if route in ("blocks", "rh"):
        L = blc.virial_block_blc(n) if route == "blocks" else blc.ree_hoover_blc(n)
        return estimate_blc(L, model, samples, seed, workers)
    if route not in VIRIAL_ROUTES:
        raise ValueError(f"unknown route {route!r}; choose from {VIRIAL_ROUTES}")
    builder = blc.tree_sum_bn_blc if route == "b" else blc.tree_sum_an_blc
    start = time.perf_counter()
    values, errors, evals, per_sample = {1: 1.0}, {}, 0, []
    for k in range(2, n + 1):
        r = estimate_blc(builder(k), model, samples, seed, workers, stream=k)
        values[k], errors[k] = r.value, r.std_error
        evals += r.evaluations
        per_sample += r.evaluations_per_sample
    fn = (lambda v: series.virial_from_b(v, n)) if route == "b" else (lambda v: series.virial_from_a(v, n))
    value, se = series.propagate(fn, values, errors)
    terms = [{"coefficient": f"{route}_{k}", "value": values[k], "std_error": errors[k]} for k in range(2, n + 1)]
    return EstimateReport(value, se, samples, model.sampler.norm, evals, time.perf_counter() - start,
                          per_sample, terms)


# -- one-dimensional quadrature oracle -----------------------------------------------

QUADRATURE_MAX_ORDER = 4


def quadrature_1d_reference(g: MarkedGraph, model: PotentialModel, tol: float = 1e-9) -> float:
    """I(g) by nested Gauss-Legendre over the pieces where the integrand is polynomial.

    For hard rods and square wells in one dimension every factor is constant
    between the points x_j + s, s a signed sum of the potential's radii, so
    the rule is exact up to rounding; ``tol`` bounds the disagreement between
    two node counts.
    """
    if model.nu != 1 or model.kind not in ("hard-rod", "square-well"):
        raise BudgetError("the quadrature reference covers one-dimensional hard rods and square wells")
    if not 2 <= g.n <= QUADRATURE_MAX_ORDER:
        raise BudgetError(f"the quadrature reference supports 2 <= n <= {QUADRATURE_MAX_ORDER}")
    plan = _plan(g)
    hi = _nested(plan, model, 4)
    lo = _nested(plan, model, 3)
    if abs(hi - lo) > tol:
        raise ArithmeticError(f"quadrature did not converge: {hi} vs {lo}")
    return hi


def _offsets(model: PotentialModel, depth: int) -> np.ndarray:
    radii = [model.sigma]
    if model.kind == "square-well":
        radii.append(model.well_width * model.sigma)
    steps = [0.0] + [s * r for r in radii for s in (1.0, -1.0)]
    sums = {round(sum(c), 12) for k in range(depth + 1) for c in itertools.combinations_with_replacement(steps, k)}
    return np.array(sorted(sums))


def _nested(plan: _Plan, model: PotentialModel, nodes: int) -> float:
    n = plan.n
    reach = (n - 1) * model.sigma * (model.well_width if model.kind == "square-well" else 1.0)
    offs = _offsets(model, n - 1)
    gx, gw = np.polynomial.legendre.leggauss(nodes)
    pairs_f = [(c, p) for c, p in plan.tree] + plan.extra_f
    pairs_ft = plan.extra_ft

    def pieces(fixed: list[float]) -> tuple[np.ndarray, np.ndarray]:
        pts = np.unique(np.clip(np.add.outer(np.array(fixed), offs).ravel(), -reach, reach))
        a, b = pts[:-1], pts[1:]
        keep = b - a > 1e-13
        a, b = a[keep], b[keep]
        half, mid = 0.5 * (b - a), 0.5 * (b + a)
        x = (mid[:, None] + half[:, None] * gx[None, :]).ravel()
        w = (half[:, None] * gw[None, :]).ravel()
        return x, w

    def integrand(pos: list, last: np.ndarray) -> np.ndarray:
        coords = pos + [last]
        val = np.ones_like(last)
        for i, j in pairs_f:
            val = val * model.f_radial(np.abs(coords[i - 1] - coords[j - 1]))
        for i, j in pairs_ft:
            val = val * (1.0 + model.f_radial(np.abs(coords[i - 1] - coords[j - 1])))
        return val

    def level(pos: list[float]) -> float:
        x, w = pieces(pos)
        if len(pos) == n - 1:
            return float(np.dot(w, integrand(pos, x)))
        return float(sum(wk * level(pos + [xk]) for xk, wk in zip(x, w)))

    return level([0.0])
