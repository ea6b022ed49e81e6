"""Randomized verification suites shared by unit tests and the acceptance run.

Each suite draws a fixed-seed batch of random cases and returns the number of
violations (0 means pass).  Tolerances are pinned here, once.
"""

from __future__ import annotations

import math

import numpy as np

from mtlimits import bounds, discrete

ATOL = 1e-12


def random_dist(rng: np.random.Generator, size: int) -> np.ndarray:
    w = rng.random(size) + 1e-3
    return w / w.sum()


def exhaustive_binary_test_error(p: np.ndarray, q: np.ndarray) -> float:
    """Minimum error over all 2^m deterministic accept/reject tests:
    a test accepts a region A and predicts the second hypothesis there, so
    its error is (1/2)(p(A) + 1 - q(A)); enumerated via a bit matrix."""
    m = p.size
    masks = np.arange(1 << m, dtype=np.uint32)
    sel = (masks[:, None] >> np.arange(m, dtype=np.uint32)[None, :]) & 1
    errs = 0.5 * (sel @ p + 1.0 - sel @ q)
    return float(errs.min())


def suite_pinsker_bh(cases: int = 1000, seed: int = 20240801) -> int:
    """TV <= sqrt(KL/2) and TV <= sqrt(1 - exp(-KL)) on random pairs."""
    rng = np.random.default_rng(seed)
    bad = 0
    for _ in range(cases):
        m = int(rng.integers(2, 21))
        p, q = random_dist(rng, m), random_dist(rng, m)
        tv = discrete.tv_distance(p, q)
        kl = discrete.kl_divergence(p, q)
        if not math.isinf(kl):
            if tv > math.sqrt(kl / 2.0) + ATOL:
                bad += 1
            if tv > math.sqrt(1.0 - math.exp(-kl)) + ATOL:
                bad += 1
    return bad


def suite_log_sum(cases: int = 1000, seed: int = 20240802) -> int:
    rng = np.random.default_rng(seed)
    bad = 0
    for _ in range(cases):
        m = int(rng.integers(1, 20))
        a = rng.random(m) * 10 + 1e-6
        b = rng.random(m) * 10 + 1e-6
        lhs, rhs = discrete.log_sum_lhs_rhs(a, b)
        if lhs < rhs - ATOL:
            bad += 1
    return bad


def suite_fano_identity(cases: int = 1000, seed: int = 20240803, max_support: int = 12) -> int:
    """Exhaustive optimal test error equals (1/2)(1 - TV)."""
    rng = np.random.default_rng(seed)
    bad = 0
    for _ in range(cases):
        m = int(rng.integers(2, max_support + 1))
        p, q = random_dist(rng, m), random_dist(rng, m)
        direct = exhaustive_binary_test_error(p, q)
        if abs(direct - discrete.bayes_error_binary(p, q)) > ATOL:
            bad += 1
    return bad


def _upper_tail(m: int, p: float, thr: int) -> float:
    """P(X >= thr) for X ~ Bin(m, p); an empty event (thr > m) has mass 0."""
    if thr > m:
        return 0.0
    return discrete.binom_sf(m, p, max(0, thr))


def suite_chernoff_vs_exact(cases: int = 500, seed: int = 20240804) -> int:
    """Chernoff upper/lower bounds dominate the exact binomial tails."""
    rng = np.random.default_rng(seed)
    bad = 0
    for _ in range(cases):
        m = int(rng.integers(1, 201))
        p = float(rng.uniform(0.02, 0.98))
        delta = float(rng.uniform(1e-3, 0.999))
        up = bounds.chernoff_upper(m, p, delta)
        exact_up = _upper_tail(m, p, math.ceil((1 + delta) * m * p))
        if up < exact_up - ATOL:
            bad += 1
        lo = bounds.chernoff_lower(m, p, delta)
        thr = math.floor((1 - delta) * m * p)
        exact_lo = 1.0 - _upper_tail(m, p, thr + 1)
        if lo < exact_lo - ATOL:
            bad += 1
    return bad


def suite_slud_vs_exact(cases: int = 500, seed: int = 20240805) -> int:
    """Slud's bound stays BELOW the exact tail P(X >= mp + m0).

    The offset m0 is drawn so that mp + m0 is an achievable count, the form
    in which the inequality is a theorem; for a real-valued threshold the
    discrete tail jumps down at integer crossings while the bound moves
    continuously, so knife-edge violations just past a crossing would be
    artifacts of the parameterization, not of the implementation.
    """
    rng = np.random.default_rng(seed)
    bad = 0
    done = 0
    while done < cases:
        m = int(rng.integers(2, 201))
        p = float(rng.uniform(0.02, 0.5))
        k_lo, k_hi = math.ceil(m * p), math.floor(m * (1 - p))
        if k_hi < k_lo:
            continue
        k = int(rng.integers(k_lo, k_hi + 1))
        m0 = k - m * p
        if not 0 <= m0 <= m * (1 - 2 * p):
            continue
        done += 1
        lower = bounds.slud_lower(m, p, m0)
        exact = _upper_tail(m, p, k)
        if lower > exact + ATOL:
            bad += 1
    return bad


def suite_chernoff_hoeffding_vs_exact(cases: int = 200, seed: int = 20240806) -> int:
    """Sub-Gaussian binomial tail bound dominates the exact tail.

    Samples p in [1/2, 0.95]: the variance proxy p(1-p) bounds the Bernoulli
    KL curvature only on that side, which is also the only regime the bound
    is applied in; for p < 1/2 the stated form can undershoot the true tail.
    """
    rng = np.random.default_rng(seed)
    bad = 0
    for _ in range(cases):
        m = int(rng.integers(1, 201))
        p = float(rng.uniform(0.5, 0.95))
        x = float(rng.uniform(0, 1 - p))
        bound = bounds.chernoff_hoeffding(m, p, x)
        exact = _upper_tail(m, p, math.ceil(m * (p + x)))
        if bound < exact - ATOL:
            bad += 1
    return bad


def suite_hoeffding_vs_exact(cases: int = 200, seed: int = 20240807) -> int:
    """Two-sided Hoeffding bound dominates the exact two-sided deviation of
    Bin(n, p)/n around its mean."""
    rng = np.random.default_rng(seed)
    bad = 0
    for _ in range(cases):
        n = int(rng.integers(1, 201))
        p = float(rng.uniform(0.05, 0.95))
        t = float(rng.uniform(1e-3, 0.5))
        bound = bounds.hoeffding_bound(n, t, 0.0, 1.0)
        hi = math.ceil(n * (p + t))
        up = discrete.binom_sf(n, p, hi) if hi <= n else 0.0
        lo_thr = math.floor(n * (p - t))
        lo = 1.0 - discrete.binom_sf(n, p, lo_thr + 1) if lo_thr >= 0 else 0.0
        if bound < up + lo - ATOL:
            bad += 1
    return bad


def suite_stirling(n_max: int = 170) -> int:
    """Stirling bracket contains n! for all n <= n_max (checked in logs)."""
    from scipy.special import gammaln

    bad = 0
    for n in range(1, n_max + 1):
        lo, up = bounds.stirling_bounds(n)
        lf = float(gammaln(n + 1))
        if not (math.log(lo) <= lf + ATOL and lf <= math.log(up) + ATOL):
            bad += 1
    return bad


def phi(x: float) -> float:
    """Standard normal CDF via the error function."""
    return 0.5 * (1.0 + math.erf(x / math.sqrt(2.0)))


def suite_berry_esseen_grid(n: int = 100) -> int:
    """|F_n(x) - Phi(x)| <= bound on a grid, for the centred Bin(n, 1/2)."""
    sigma, rho3 = 0.5, 0.125  # per-sample moments of a centred Bernoulli(1/2)
    bound = bounds.berry_esseen_bound(n, sigma, rho3)
    pmf = discrete.binom_pmf_vector(n, 0.5)
    cdf = np.cumsum(pmf)
    bad = 0
    for k in range(n + 1):
        x = (k - n / 2.0) / (sigma * math.sqrt(n))
        if abs(cdf[k] - phi(x)) > bound + ATOL:
            bad += 1
    return bad
