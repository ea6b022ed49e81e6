"""Sampling and scoring tables shared by both kernel backends.

Kernels never call transcendental functions: every exp/log lives in a table
built here (once, with numpy), so the compiled per-trial path and the
vectorized path see identical floating-point inputs and produce identical
outputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..discrete import binom_cdf_table, binom_logpmf_vector
from ..errors import DomainError, GuardRefusal
from ..scenarios import MultitaskScenario, TwoPointDistribution

# label-inversion tables are (n+1)^2 floats; keep them bounded
MAX_TABLE_N = 4096

MODE_FIXED = 0
MODE_BERNOULLI = 1
MODE_SINGLE_SPECIAL = 2

__all__ = [
    "SamplingTables", "sampling_tables", "label_cdf_matrix",
    "fn_score_table", "agn_ratio_tables",
    "MODE_FIXED", "MODE_BERNOULLI", "MODE_SINGLE_SPECIAL", "MAX_TABLE_N",
]


def label_cdf_matrix(n: int, eta1: float) -> np.ndarray:
    """Row k: CDF of Bin(k, eta1) over j = 0..n, padded with 1.0 past j = k."""
    if n > MAX_TABLE_N:
        raise GuardRefusal(
            f"label inversion table needs n = {n} <= {MAX_TABLE_N}")
    out = np.ones((n + 1, n + 1))
    out[0, :] = 1.0
    for k in range(1, n + 1):
        pmf = np.exp(binom_logpmf_vector(k, eta1, np.arange(k + 1)))
        cdf = np.minimum(np.cumsum(pmf), 1.0)
        cdf[-1] = 1.0
        out[k, : k + 1] = cdf
    return out


@dataclass(frozen=True)
class SamplingTables:
    """Per-scenario sampling configuration for the trial kernels.

    Component 0 is the favorable source type (informative / fair / benign),
    component 1 the other one.  ``cdf_j`` holds the truth-label tables;
    ``cdf_j_both`` stacks both label orientations for test-error kernels.
    """

    n: int
    num_tasks: int
    mode: int
    alpha_f: float
    comp_fixed: np.ndarray  # int8 (num_tasks,)
    cdf_k: np.ndarray       # (2, n+1)
    cdf_j: np.ndarray       # (2, n+1, n+1), truth sigma
    cdf_j_both: np.ndarray  # (2, 2, n+1, n+1), [sigma, comp]
    excess: float
    ystar_sign: int


def _components(scenario: MultitaskScenario) -> tuple[TwoPointDistribution, TwoPointDistribution]:
    if scenario.family == "agnostic":
        good = scenario.sources[0]
        other = scenario.sources[-1] if scenario.num_tasks > 1 else good
        return good, other
    if scenario.family == "fair_noisy":
        good = scenario.target
        other = next((s for s in scenario.sources if s != good), good)
        return good, other
    # background: benign/noisy per the materialized assignment
    tags = scenario.assignment or ()
    good = next(s for s, t in zip(scenario.sources, tags) if t == "benign")
    other = next((s for s, t in zip(scenario.sources, tags) if t == "noisy"), good)
    return good, other


def sampling_tables(scenario: MultitaskScenario) -> SamplingTables:
    n, N = scenario.n_per_task, scenario.num_tasks
    good, other = _components(scenario)
    if scenario.family == "agnostic":
        mode, alpha_f = MODE_SINGLE_SPECIAL, 0.0
        comp_fixed = np.ones(N, dtype=np.int8)
    elif scenario.family == "fair_noisy":
        mode, alpha_f = MODE_BERNOULLI, float(scenario.params.alpha_f)
        comp_fixed = np.ones(N, dtype=np.int8)
    else:
        mode, alpha_f = MODE_FIXED, 0.0
        comp_fixed = np.array([0 if t == "benign" else 1
                               for t in (scenario.assignment or ())], dtype=np.int8)
    cdf_k = np.stack([binom_cdf_table(n, good.p_x1), binom_cdf_table(n, other.p_x1)])
    sigma = scenario.y_star

    def j_tables(sig: int) -> np.ndarray:
        g = good if good.y_star == sig else good.label_flipped()
        o = other if other.y_star == sig else other.label_flipped()
        return np.stack([label_cdf_matrix(n, g.eta1), label_cdf_matrix(n, o.eta1)])

    cdf_j_both = np.stack([j_tables(0), j_tables(1)])
    return SamplingTables(
        n=n, num_tasks=N, mode=mode, alpha_f=alpha_f, comp_fixed=comp_fixed,
        cdf_k=cdf_k, cdf_j=cdf_j_both[sigma], cdf_j_both=cdf_j_both,
        excess=scenario.target_excess, ystar_sign=1 if sigma == 1 else -1)


def _log_weights(n: int, dist: TwoPointDistribution) -> np.ndarray:
    """log of p_x1^k (1-p_x1)^(n-k) eta1^j (1-eta1)^(k-j) on the (k, j) grid,
    without the combinatorial coefficients (they cancel in likelihood ratios)."""
    k = np.arange(n + 1)[:, None]
    j = np.arange(n + 1)[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        lw = (k * np.log(dist.p_x1) if dist.p_x1 > 0 else np.where(k > 0, -np.inf, 0.0)) \
            + ((n - k) * np.log1p(-dist.p_x1) if dist.p_x1 < 1 else np.where(k < n, -np.inf, 0.0))
        lj = (j * np.log(dist.eta1) if dist.eta1 > 0 else np.where(j > 0, -np.inf, 0.0)) \
            + ((k - j) * np.log1p(-dist.eta1) if dist.eta1 < 1 else np.where(j < k, -np.inf, 0.0))
    out = lw + lj
    return np.where(j <= k, out, -np.inf)


def fn_score_table(scenario: MultitaskScenario) -> np.ndarray:
    """Per-task log-likelihood ratio ln(M_1 / M_0)(k, j) between the two
    label hypotheses of the fair/noisy mixture."""
    if scenario.family != "fair_noisy":
        raise DomainError("score table requires the fair_noisy family")
    n = scenario.n_per_task
    alpha = scenario.params.alpha_f
    fair = scenario.target
    noisy = next((s for s in scenario.sources if s != fair), fair)
    la_f = math.log(alpha) if alpha > 0 else -np.inf
    la_n = math.log1p(-alpha) if alpha < 1 else -np.inf

    def mixture_log(sig: int) -> np.ndarray:
        f = fair if fair.y_star == sig else fair.label_flipped()
        q = noisy if noisy.y_star == sig else noisy.label_flipped()
        return np.logaddexp(la_f + _log_weights(n, f), la_n + _log_weights(n, q))

    with np.errstate(invalid="ignore"):
        score = mixture_log(1) - mixture_log(0)
    # states with j > k are never sampled; zero them so lookups stay finite
    j_gt_k = np.arange(n + 1)[None, :] > np.arange(n + 1)[:, None]
    return np.where(j_gt_k, 0.0, score)


def agn_ratio_tables(n: int, eps: float) -> tuple[np.ndarray, np.ndarray]:
    """Scaled per-task likelihood weights exp(w - max w) for the two label
    hypotheses of the single-informative-source testing problem; c indexes
    the count of label-1 samples in a task."""
    c = np.arange(n + 1, dtype=np.float64)
    if eps == 0.0:
        w1 = np.zeros(n + 1)
    else:
        w1 = c * math.log(0.5 + eps) + (n - c) * math.log(0.5 - eps)
    w0 = w1[::-1].copy()
    m = float(np.max(w1))
    return np.exp(w1 - m), np.exp(w0 - m)
