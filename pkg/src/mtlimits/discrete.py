"""Finite discrete probability primitives.

Distributions over an indexed finite support, total variation, KL divergence
(natural log throughout), the log-sum inequality, binary-hypothesis-testing
error and its Pinsker / Bretagnolle-Huber relaxations, and an exact log-space
binomial backbone (pmf, survival function, convolution survival function).

Conventions: 0*log(0/q) = 0, and p > 0 with q = 0 yields +inf, never an
exception.  All probability accumulation happens in log space so that
products over ~1e6 samples do not underflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp

from .errors import DimensionError, DomainError

SUM_TOL = 1e-12

__all__ = [
    "FiniteDist",
    "tv_distance",
    "kl_divergence",
    "bayes_error_binary",
    "fano_bound",
    "log_sum_lhs_rhs",
    "binom_log_pmf",
    "binom_logpmf_vector",
    "binom_pmf_vector",
    "binom_cdf_table",
    "binom_sf",
    "binom_conv_sf",
]


@dataclass(frozen=True)
class FiniteDist:
    """A probability vector over an indexed finite support."""

    probs: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=np.float64)
        object.__setattr__(self, "probs", probs)
        if probs.ndim != 1 or probs.size == 0:
            raise DomainError("FiniteDist requires a non-empty 1-D probability vector")
        if np.any(probs < 0):
            raise DomainError("FiniteDist entries must be non-negative")
        if abs(float(probs.sum()) - 1.0) > SUM_TOL:
            raise DomainError(f"FiniteDist entries must sum to 1 (got {probs.sum()!r})")

    @property
    def size(self) -> int:
        return int(self.probs.size)


def _as_probs(p) -> np.ndarray:
    if isinstance(p, FiniteDist):
        return p.probs
    return np.asarray(p, dtype=np.float64)


def _paired(p, q) -> tuple[np.ndarray, np.ndarray]:
    pv, qv = _as_probs(p), _as_probs(q)
    if pv.shape != qv.shape:
        raise DimensionError(f"support sizes differ: {pv.shape} vs {qv.shape}")
    return pv, qv


def tv_distance(p, q) -> float:
    """Total variation distance (1/2) * sum_i |p_i - q_i|."""
    pv, qv = _paired(p, q)
    return 0.5 * float(np.abs(pv - qv).sum())


def kl_divergence(p, q) -> float:
    """sum_i p_i * log(p_i / q_i) with natural log; +inf if q vanishes on the
    support of p."""
    pv, qv = _paired(p, q)
    pos = pv > 0
    if np.any(qv[pos] == 0):
        return float("inf")
    return float(np.sum(pv[pos] * (np.log(pv[pos]) - np.log(qv[pos]))))


def bayes_error_binary(p, q) -> float:
    """Minimum error of any test deciding between two equiprobable hypotheses:
    (1/2) * (1 - TV(p, q))."""
    return 0.5 * (1.0 - tv_distance(p, q))


def fano_bound(kl: float, variant: str = "pinsker") -> float:
    """Lower bound on the binary-testing error implied by a KL divergence.

    ``pinsker`` gives max(0, (1/2)(1 - sqrt(kl/2))); it is vacuous (0) beyond
    kl = 2.  ``bretagnolle_huber`` gives (1/2)(1 - sqrt(1 - exp(-kl))) and
    stays positive for every finite kl.
    """
    if kl < 0:
        raise DomainError(f"kl must be non-negative, got {kl}")
    if variant == "pinsker":
        if math.isinf(kl):
            return 0.0
        return max(0.0, 0.5 * (1.0 - math.sqrt(kl / 2.0)))
    if variant == "bretagnolle_huber":
        return 0.5 * (1.0 - math.sqrt(max(0.0, 1.0 - math.exp(-kl))))
    raise DomainError(f"unknown variant {variant!r}")


def log_sum_lhs_rhs(a, b) -> tuple[float, float]:
    """Both sides of the log-sum inequality for strictly positive vectors.

    Returns (sum_i a_i log(a_i/b_i), (sum a) log(sum a / sum b)); the first
    is always >= the second.
    """
    av, bv = _paired(np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64))
    if np.any(av <= 0) or np.any(bv <= 0):
        raise DomainError("log-sum inequality requires strictly positive entries")
    lhs = float(np.sum(av * np.log(av / bv)))
    sa, sb = float(av.sum()), float(bv.sum())
    rhs = sa * np.log(sa / sb)
    return lhs, float(rhs)


# ---------------------------------------------------------------------------
# Binomial backbone.  Coefficients go through log-gamma, not factorial tables,
# so n up to ~1e6 stays usable.
# ---------------------------------------------------------------------------


def _check_np(n: int, p: float) -> None:
    if n < 0 or int(n) != n:
        raise DomainError(f"n must be a non-negative integer, got {n}")
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"p must lie in [0, 1], got {p}")


def binom_logpmf_vector(n: int, p: float, ks: np.ndarray) -> np.ndarray:
    """log P(X = k) for X ~ Bin(n, p), vectorized over integer ks in [0, n]."""
    _check_np(n, p)
    ks = np.asarray(ks, dtype=np.int64)
    if np.any(ks < 0) or np.any(ks > n):
        raise DomainError("k out of range [0, n]")
    if p == 0.0:
        return np.where(ks == 0, 0.0, -np.inf)
    if p == 1.0:
        return np.where(ks == n, 0.0, -np.inf)
    coef = gammaln(n + 1) - gammaln(ks + 1) - gammaln(n - ks + 1)
    return coef + ks * np.log(p) + (n - ks) * np.log1p(-p)


def binom_log_pmf(n: int, p: float, k: int) -> float:
    """log P(X = k) for X ~ Bin(n, p)."""
    return float(binom_logpmf_vector(n, p, np.array([k]))[0])


def binom_pmf_vector(n: int, p: float, ks: np.ndarray | None = None) -> np.ndarray:
    """P(X = k) over ks (default: the full support 0..n)."""
    if ks is None:
        ks = np.arange(n + 1)
    return np.exp(binom_logpmf_vector(n, p, ks))


def binom_cdf_table(n: int, p: float) -> np.ndarray:
    """CDF vector of Bin(n, p) with the last entry pinned to exactly 1.0.

    Monotone by construction; suitable for inversion sampling where the
    drawn value is the count of entries <= u for u in [0, 1).
    """
    cdf = np.minimum(np.cumsum(binom_pmf_vector(n, p)), 1.0)
    cdf[-1] = 1.0
    return cdf


def binom_sf(n: int, p: float, k: int) -> float:
    """P(X >= k) for X ~ Bin(n, p), exact via log-space summation."""
    _check_np(n, p)
    if k < 0 or k > n:
        raise DomainError(f"k must lie in [0, n], got {k}")
    if k == 0:
        return 1.0
    logs = binom_logpmf_vector(n, p, np.arange(k, n + 1))
    return float(min(1.0, np.exp(logsumexp(logs))))


def _log_sf_table(n: int, p: float) -> np.ndarray:
    """log P(X >= k) for k = 0..n+1 (last entry -inf)."""
    logs = binom_logpmf_vector(n, p, np.arange(n + 1))
    out = np.full(n + 2, -np.inf)
    rev = np.logaddexp.accumulate(logs[::-1])[::-1]
    out[: n + 1] = np.minimum(rev, 0.0)
    out[0] = 0.0
    return out


def binom_conv_sf(n1: int, p1: float, n2: int, p2: float, k: int) -> float:
    """P(A + B >= k) for independent A ~ Bin(n1, p1), B ~ Bin(n2, p2).

    Exact: sums A's pmf against B's survival function in log space.
    """
    _check_np(n1, p1)
    _check_np(n2, p2)
    if k < 0 or k > n1 + n2:
        raise DomainError(f"k must lie in [0, n1+n2], got {k}")
    if k == 0:
        return 1.0
    log_pmf_a = binom_logpmf_vector(n1, p1, np.arange(n1 + 1))
    log_sf_b = _log_sf_table(n2, p2)
    rem = np.clip(k - np.arange(n1 + 1), 0, n2 + 1)
    terms = log_pmf_a + log_sf_b[rem]
    return float(min(1.0, np.exp(logsumexp(terms))))
