"""Polynomial maps between coefficient families b, a, e, tau and B.

Every evaluator works on any field-like payload: Fractions give exact
results for identities and operation counting, floats carry Monte Carlo
estimates (with :func:`propagate` for first-order error bars).  An optional
:class:`OpCounter` tallies arithmetic as it is performed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Callable, Mapping, Sequence

from .trees import PartitionVector, partition_count, partition_vectors

_FACTORIALS = [factorial(k) for k in range(64)]


@dataclass
class OpCounter:
    additions: int = 0
    multiplications: int = 0
    divisions: int = 0
    factorial_lookups: int = 0
    # multiplications a from-scratch factorial would have cost
    factorial_work: int = 0

    def fact(self, k: int) -> int:
        self.factorial_lookups += 1
        self.factorial_work += max(k - 2, 0)
        return _FACTORIALS[k]

    @property
    def total(self) -> int:
        """Arithmetic operations, one per factorial lookup."""
        return self.additions + self.multiplications + self.divisions + self.factorial_lookups

    @property
    def strict_total(self) -> int:
        """Arithmetic operations with each factorial paid for in multiplications."""
        return self.additions + self.multiplications + self.divisions + self.factorial_work

    def __iadd__(self, other: "OpCounter"):
        self.additions += other.additions
        self.multiplications += other.multiplications
        self.divisions += other.divisions
        self.factorial_lookups += other.factorial_lookups
        self.factorial_work += other.factorial_work
        return self

    def to_dict(self) -> dict:
        return {"additions": self.additions, "multiplications": self.multiplications,
                "divisions": self.divisions, "factorial_lookups": self.factorial_lookups,
                "total": self.total, "strict_total": self.strict_total}


FAMILIES = ("b", "a", "e", "tau", "B")


@dataclass
class CoefficientVector:
    """Coefficients of one family keyed by index, with optional standard errors."""

    family: str
    values: dict[int, object]
    errors: dict[int, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown coefficient family {self.family!r}")

    def __getitem__(self, k: int):
        return self.values[k]

    @property
    def max_index(self) -> int:
        return max(self.values)

    def to_dict(self) -> dict:
        out = {"family": self.family, "values": {str(k): format_number(v) for k, v in sorted(self.values.items())}}
        if self.errors:
            out["errors"] = {str(k): float(v) for k, v in sorted(self.errors.items())}
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "CoefficientVector":
        values = {int(k): parse_number(v) for k, v in data["values"].items()}
        errors = {int(k): float(v) for k, v in data.get("errors", {}).items()}
        return cls(data["family"], values, errors)


def parse_number(text) -> Fraction | float:
    """``num/den`` or an integer gives an exact Fraction; other decimals give floats."""
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    if isinstance(text, float):
        return text
    s = str(text).strip()
    if "/" in s or s.lstrip("+-").isdigit():
        return Fraction(s)
    return float(s)


def format_number(x) -> str | float:
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)
    if isinstance(x, int):
        return str(x)
    return float(x)


def _values(v) -> Mapping[int, object]:
    return v.values if isinstance(v, CoefficientVector) else v


def _require(vals: Mapping[int, object], needed: range, family: str):
    missing = [k for k in needed if k not in vals]
    if missing:
        raise ValueError(f"missing {family} coefficients at indices {missing}")


def q_eval(x: Sequence, y: Sequence, m: PartitionVector, counter: OpCounter | None = None):
    """prod_j (y_j x_j)^{m_j} / m_j!"""
    counter = counter if counter is not None else OpCounter()
    if not (len(x) == len(y) == len(m.m)):
        raise ValueError(f"length mismatch: x={len(x)}, y={len(y)}, m={len(m.m)}")
    if m.weight <= 0:
        raise ValueError("partition vector must have positive weight")
    result = None
    for xj, yj, mj in zip(x, y, m.m):
        if mj == 0:
            continue
        if yj == 1:
            base = xj
        else:
            base = yj * xj
            counter.multiplications += 1
        power = base
        for _ in range(mj - 1):
            power = power * base
            counter.multiplications += 1
        if mj > 1:
            power = _div(power, counter.fact(mj))
            counter.divisions += 1
        if result is None:
            result = power
        else:
            result = result * power
            counter.multiplications += 1
    return result


def _div(x, k: int):
    # keeps integer payloads exact
    return Fraction(x, k) if isinstance(x, int) else x / k


def _accumulate(total, term, counter: OpCounter):
    if total is None:
        return term
    counter.additions += 1
    return total + term


def virial_from_b(b, n: int, counter: OpCounter | None = None):
    """B_n from b_2..b_n via Mayer's formula.

    B_n = (n-1)/n! * sum_m (n+|m|-2)! Q_n(x, y, m) with x_i = -b_{i+1},
    y_i = i+1; this sign gives B_2 = -b_2.
    """
    counter = counter if counter is not None else OpCounter()
    vals = _values(b)
    _require(vals, range(2, n + 1), "b")
    if n < 2:
        raise ValueError("virial coefficients start at n=2")
    x = [-vals[i + 1] for i in range(1, n)]
    counter.additions += n - 1
    y = [i + 1 for i in range(1, n)]
    total = None
    for m in partition_vectors(n):
        term = counter.fact(n + m.norm - 2) * q_eval(x, y, m, counter)
        counter.multiplications += 1
        total = _accumulate(total, term, counter)
    scale = Fraction(n - 1, counter.fact(n))
    counter.divisions += 1
    counter.multiplications += 1
    return total * scale


def a_from_b(b, up_to_n: int) -> CoefficientVector:
    """Solve n b_n = sum_{q=1}^{n-1} (q+1) a_{q+1} (n-q) b_{n-q} for a_2..a_n."""
    vals = _values(b)
    _require(vals, range(1, up_to_n + 1), "b")
    a: dict[int, object] = {}
    for n in range(2, up_to_n + 1):
        rest = sum(((q + 1) * a[q + 1] * (n - q) * vals[n - q] for q in range(1, n - 1)), 0)
        a[n] = _div(n * vals[n] - rest, 1) / (n * vals[1])
    return CoefficientVector("a", a)


def b_from_a(a, up_to_n: int) -> CoefficientVector:
    """Inverse of :func:`a_from_b` with b_1 = 1."""
    vals = _values(a)
    _require(vals, range(2, up_to_n + 1), "a")
    b: dict[int, object] = {1: 1}
    for n in range(2, up_to_n + 1):
        b[n] = _div(sum(((q + 1) * vals[q + 1] * (n - q) * b[n - q] for q in range(1, n)), 0), n)
    return CoefficientVector("b", b)


def e_coeffs(a, up_to_n: int, counter: OpCounter | None = None) -> CoefficientVector:
    """e_1 = 1, e_mu = mu^{-1} sum_{m in M(mu)} |m|! Q_mu(x, y, m), x_j = a_{j+1}, y_j = j+1."""
    counter = counter if counter is not None else OpCounter()
    vals = _values(a)
    _require(vals, range(2, up_to_n + 1), "a")
    e: dict[int, object] = {1: 1}
    for mu in range(2, up_to_n + 1):
        e[mu] = _single_e(vals, mu, counter)
    return CoefficientVector("e", e)


def tau_coeffs(a, up_to_n: int, counter: OpCounter | None = None) -> CoefficientVector:
    """tau_1 = 1, tau_mu = (mu-1)! sum_{m in M(mu)} Q_mu(x, -y, m) / (mu-|m|)!."""
    counter = counter if counter is not None else OpCounter()
    vals = _values(a)
    _require(vals, range(2, up_to_n + 1), "a")
    tau: dict[int, object] = {1: 1}
    for mu in range(2, up_to_n + 1):
        tau[mu] = _single_tau(vals, mu, counter)
    return CoefficientVector("tau", tau)


def virial_from_ea(e, tau, n: int, counter: OpCounter | None = None):
    """B_n = sum_{m in M(n+1)} |m|! e_{|m|} Q_{n+1}(tau, 1, m)."""
    counter = counter if counter is not None else OpCounter()
    ev, tv = _values(e), _values(tau)
    x = [tv[j] for j in range(1, n + 1)]
    ones = [1] * n
    total = None
    for m in partition_vectors(n + 1):
        term = counter.fact(m.norm) * ev[m.norm] * q_eval(x, ones, m, counter)
        counter.multiplications += 2
        total = _accumulate(total, term, counter)
    return total


def virial_from_a(a, n: int, counter: OpCounter | None = None):
    """B_n from a_2..a_n through e and tau."""
    counter = counter if counter is not None else OpCounter()
    if n < 2:
        raise ValueError("virial coefficients start at n=2")
    e = e_coeffs(a, n, counter)
    tau = tau_coeffs(a, n, counter)
    return virial_from_ea(e, tau, n, counter)


# -- closed-form operation bounds ------------------------------------------------------


MAYER_FORMULA_BOUND = 2440
A_ROUTE_BOUND = 21000


def bound_e_single(mu: int) -> int:
    return 7 * partition_count(mu - 1) * (mu - 1)


def bound_e_all(n: int) -> int:
    return 7 * partition_count(n - 1) * n * (n - 1) // 2


bound_tau_single = bound_e_single
bound_tau_all = bound_e_all


def bound_b_given_e_tau(n: int) -> int:
    return 5 * n * partition_count(n)


def bound_a_route(n: int) -> int:
    return 7 * partition_count(n - 1) * n * (n - 1) + 5 * n * partition_count(n)


@dataclass
class StageCount:
    name: str
    counted: int
    strict: int
    bound: int

    @property
    def within(self) -> bool:
        return self.counted <= self.bound

    def to_dict(self) -> dict:
        return {"stage": self.name, "ops_counted": self.counted, "ops_counted_strict": self.strict,
                "paper_bound": self.bound, "within_bound": self.within}


def mayer_route_report(b, n: int) -> tuple[object, list[StageCount]]:
    c = OpCounter()
    value = virial_from_b(b, n, c)
    return value, [StageCount("mayer_formula", c.total, c.strict_total, MAYER_FORMULA_BOUND)]


def a_route_report(a, n: int) -> tuple[object, list[StageCount]]:
    """Evaluate B_n from a and count each stage against its bound."""
    stages = []
    e_total, tau_total = OpCounter(), OpCounter()
    e = {1: 1}
    tau = {1: 1}
    vals = _values(a)
    _require(vals, range(2, n + 1), "a")
    for mu in range(2, n + 1):
        ce, ct = OpCounter(), OpCounter()
        e[mu] = _single_e(vals, mu, ce)
        tau[mu] = _single_tau(vals, mu, ct)
        stages.append(StageCount(f"e_{mu}", ce.total, ce.strict_total, bound_e_single(mu)))
        stages.append(StageCount(f"tau_{mu}", ct.total, ct.strict_total, bound_tau_single(mu)))
        e_total += ce
        tau_total += ct
    cb = OpCounter()
    value = virial_from_ea(e, tau, n, cb)
    stages.append(StageCount("e_all", e_total.total, e_total.strict_total, bound_e_all(n)))
    stages.append(StageCount("tau_all", tau_total.total, tau_total.strict_total, bound_tau_all(n)))
    stages.append(StageCount("B_given_e_tau", cb.total, cb.strict_total, bound_b_given_e_tau(n)))
    grand = OpCounter()
    for part in (e_total, tau_total, cb):
        grand += part
    stages.append(StageCount("a_route_total", grand.total, grand.strict_total, bound_a_route(n)))
    return value, stages


def _single_e(vals, mu: int, counter: OpCounter):
    x = [vals[j + 1] for j in range(1, mu)]
    y = [j + 1 for j in range(1, mu)]
    total = None
    for m in partition_vectors(mu):
        term = counter.fact(m.norm) * q_eval(x, y, m, counter)
        counter.multiplications += 1
        total = _accumulate(total, term, counter)
    counter.divisions += 1
    return _div(total, mu)


def _single_tau(vals, mu: int, counter: OpCounter):
    x = [vals[j + 1] for j in range(1, mu)]
    neg_y = [-(j + 1) for j in range(1, mu)]
    total = None
    for m in partition_vectors(mu):
        term = _div(q_eval(x, neg_y, m, counter), counter.fact(mu - m.norm))
        counter.divisions += 1
        total = _accumulate(total, term, counter)
    counter.multiplications += 1
    return counter.fact(mu - 1) * total


# -- float payloads ---------------------------------------------------------------------

_STEP = 1e-30


def propagate(fn: Callable[[Mapping[int, complex]], complex], values: Mapping[int, float],
              errors: Mapping[int, float]) -> tuple[float, float]:
    """Value and first-order standard error of ``fn`` at independent inputs.

    Partial derivatives come from complex-step differentiation, which is
    exact to rounding for the polynomial maps in this module.
    """
    base = {k: float(v) for k, v in values.items()}
    value = fn(base)
    var = 0.0
    for k, err in errors.items():
        if not err:
            continue
        bumped = dict(base)
        bumped[k] = complex(base[k], _STEP)
        slope = complex(fn(bumped)).imag / _STEP
        var += (slope * err) ** 2
    return float(complex(value).real), math.sqrt(var)
