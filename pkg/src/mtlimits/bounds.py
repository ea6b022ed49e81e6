"""Closed-form concentration and approximation inequalities.

Each function returns the bound value exactly as the formula states it,
un-clamped: values above 1 are legal and left to the caller to interpret.
That keeps formula-level regression tests meaningful.  Every bound here is
property-tested against exact binomial computations from
:mod:`mtlimits.discrete`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DomainError

__all__ = [
    "BoundEval",
    "chernoff_upper",
    "chernoff_lower",
    "slud_lower",
    "hoeffding_bound",
    "chernoff_hoeffding",
    "berry_esseen_bound",
    "stirling_bounds",
    "evaluate_bound",
    "BOUND_NAMES",
]


@dataclass(frozen=True)
class BoundEval:
    """A named bound evaluation: the inputs it was called with and its value.

    ``value`` holds single-valued bounds; the Stirling bracket populates
    ``lower``/``upper`` instead.
    """

    name: str
    inputs: dict = field(default_factory=dict)
    value: float | None = None
    lower: float | None = None
    upper: float | None = None


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise DomainError(msg)


def chernoff_upper(m: int, p: float, delta: float) -> float:
    """Multiplicative Chernoff bound on P(X >= (1+delta) m p), X ~ Bin(m, p):
    exp(-m p delta^2 / (2 + delta))."""
    _require(m >= 1, f"m must be >= 1, got {m}")
    _require(0.0 <= p <= 1.0, f"p must lie in [0, 1], got {p}")
    _require(delta > 0, f"delta must be positive, got {delta}")
    return math.exp(-m * p * delta * delta / (2.0 + delta))


def chernoff_lower(m: int, p: float, delta: float) -> float:
    """Multiplicative Chernoff bound on P(X <= (1-delta) m p):
    exp(-m p delta^2 / 2), for delta in (0, 1)."""
    _require(m >= 1, f"m must be >= 1, got {m}")
    _require(0.0 <= p <= 1.0, f"p must lie in [0, 1], got {p}")
    _require(0.0 < delta < 1.0, f"delta must lie in (0, 1), got {delta}")
    return math.exp(-m * p * delta * delta / 2.0)


def slud_lower(m: int, p: float, m0: float) -> float:
    """Slud's LOWER bound on the upper tail P(X >= m p + m0):
    (1/4) exp(-m0^2 / (m p (1-p))), valid for 0 < p <= 1/2 and
    0 <= m0 <= m (1 - 2p)."""
    _require(m >= 1, f"m must be >= 1, got {m}")
    _require(0.0 < p <= 0.5, f"p must lie in (0, 1/2], got {p}")
    _require(0.0 <= m0 <= m * (1.0 - 2.0 * p),
             f"m0 must lie in [0, m(1-2p)] = [0, {m * (1.0 - 2.0 * p)}], got {m0}")
    return 0.25 * math.exp(-m0 * m0 / (m * p * (1.0 - p)))


def hoeffding_bound(n: int, t: float, lo: float, hi: float) -> float:
    """Two-sided Hoeffding bound for means of independent variables in
    [lo, hi]: 2 exp(-2 n t^2 / (hi - lo)^2)."""
    _require(n >= 1, f"n must be >= 1, got {n}")
    _require(t >= 0, f"t must be non-negative, got {t}")
    _require(hi > lo, f"need hi > lo, got [{lo}, {hi}]")
    return 2.0 * math.exp(-2.0 * n * t * t / ((hi - lo) ** 2))


def chernoff_hoeffding(m: int, p: float, x: float) -> float:
    """Sub-Gaussian tail bound on P(X/m >= p + x) for X ~ Bin(m, p):
    exp(-x^2 m / (2 p (1-p)))."""
    _require(m >= 1, f"m must be >= 1, got {m}")
    _require(0.0 < p < 1.0, f"p must lie in (0, 1), got {p}")
    _require(x >= 0, f"x must be non-negative, got {x}")
    return math.exp(-x * x * m / (2.0 * p * (1.0 - p)))


def berry_esseen_bound(n: int, sigma: float, rho3: float) -> float:
    """Uniform normal-approximation error bound 3 rho3 / (sigma^3 sqrt(n)).

    Requires rho3 >= sigma^3 (third absolute moment dominates the 3/2 power
    of the variance, by Jensen).
    """
    _require(n >= 1, f"n must be >= 1, got {n}")
    _require(sigma > 0, f"sigma must be positive, got {sigma}")
    _require(rho3 > 0, f"rho3 must be positive, got {rho3}")
    _require(rho3 >= sigma**3 * (1.0 - 1e-12),
             f"moment consistency requires rho3 >= sigma^3, got {rho3} < {sigma**3}")
    return 3.0 * rho3 / (sigma**3 * math.sqrt(n))


def stirling_bounds(n: int) -> tuple[float, float]:
    """Two-sided factorial bracket:
    sqrt(2 pi) n^(n+1/2) e^(-n)  <=  n!  <=  e n^(n+1/2) e^(-n).

    Evaluated through logs so it stays finite for n up to 170.
    """
    _require(n >= 1, f"n must be >= 1, got {n}")
    core = (n + 0.5) * math.log(n) - n
    return math.exp(0.5 * math.log(2.0 * math.pi) + core), math.exp(1.0 + core)


_DISPATCH = {
    "chernoff-upper": (chernoff_upper, ("m", "p", "delta"), ("m",)),
    "chernoff-lower": (chernoff_lower, ("m", "p", "delta"), ("m",)),
    "slud": (slud_lower, ("m", "p", "m0"), ("m",)),
    "hoeffding": (hoeffding_bound, ("n", "t", "lo", "hi"), ("n",)),
    "chernoff-hoeffding": (chernoff_hoeffding, ("m", "p", "x"), ("m",)),
    "berry-esseen": (berry_esseen_bound, ("n", "sigma", "rho3"), ("n",)),
    "stirling": (stirling_bounds, ("n",), ("n",)),
}

BOUND_NAMES = tuple(_DISPATCH)


def evaluate_bound(name: str, **params: float) -> BoundEval:
    """Evaluate a named bound from keyword parameters (CLI entry point)."""
    if name not in _DISPATCH:
        raise DomainError(f"unknown bound {name!r}; choose from {sorted(_DISPATCH)}")
    fn, argnames, int_args = _DISPATCH[name]
    missing = [a for a in argnames if a not in params]
    extra = [a for a in params if a not in argnames]
    if missing or extra:
        raise DomainError(
            f"bound {name!r} takes parameters {argnames}; missing {missing}, unexpected {extra}")
    args = [int(params[a]) if a in int_args else float(params[a]) for a in argnames]
    result = fn(*args)
    inputs = dict(zip(argnames, args))
    if name == "stirling":
        return BoundEval(name=name, inputs=inputs, lower=result[0], upper=result[1])
    return BoundEval(name=name, inputs=inputs, value=float(result))
