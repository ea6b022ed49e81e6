"""Exact error probabilities, sufficient-statistic tables, mixture KL
divergences with their testing lower bounds, and the rate formulas.

Ties count as classification errors throughout (events of the form
"wrong-label count >= right-label count"), matching the ERM tie-break
toward the wrong hypothesis in the [wrong, h*] class ordering.

Enumerations are guarded by explicit size limits; callers can raise a guard
per call instead of editing code.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .discrete import (
    binom_conv_sf,
    binom_logpmf_vector,
    binom_pmf_vector,
    binom_sf,
    fano_bound,
    kl_divergence,
    tv_distance,
)
from .errors import DomainError, GuardRefusal
from .scenarios import MultitaskScenario, TwoPointDistribution

# default enumeration guards (overridable per call)
ORACLE_ENUM_LIMIT = 100_000
JOINT_STATES_LIMIT = 2_000_000
JOINT_MAX_TASKS = 3
JOINT_MAX_N = 4

__all__ = [
    "SuffStatDist",
    "RateBreakdown",
    "AdaptiveLowerBound",
    "erm_error_exact_agnostic",
    "pooling_error_exact_agnostic",
    "suffstat_dist",
    "mixture_suffstat_dist",
    "mixture_task_kl",
    "adaptive_error_lower_bound",
    "joint_bruteforce_test",
    "minimax_rate",
    "pooling_rate_bound",
    "pooling_rate_for_scenario",
    "fair_oracle_rate_bound",
    "oracle_error_exact_fair",
    "confidence_set_excess_bound",
    "canonical_noisy_exponent",
]


def erm_error_exact_agnostic(n: int, eps: float) -> float:
    """Exact error probability of ERM on one task whose wrong-label count is
    Bin(n, 1/2 - eps): P(X >= ceil(n/2)), ties counted as errors."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if not 0.0 <= eps < 0.5:
        raise DomainError(f"eps must lie in [0, 1/2), got {eps}")
    return binom_sf(n, 0.5 - eps, math.ceil(n / 2))


def pooling_error_exact_agnostic(n: int, N: int, eps: float) -> float:
    """Exact error probability of pooled ERM: P(A + B >= ceil(nN/2)) with
    A ~ Bin(n, 1/2 - eps) from the informative task and B ~ Bin((N-1)n, 1/2)
    from the noise tasks."""
    if n < 1 or N < 1:
        raise DomainError(f"need n >= 1 and N >= 1, got n={n}, N={N}")
    if not 0.0 <= eps < 0.5:
        raise DomainError(f"eps must lie in [0, 1/2), got {eps}")
    return binom_conv_sf(n, 0.5 - eps, (N - 1) * n, 0.5, math.ceil(n * N / 2))


@dataclass(frozen=True)
class SuffStatDist:
    """Exact law of the per-task statistic (k, j): k samples at x1 of which
    j carry label 1.  ``probs[k, j]`` is zero outside 0 <= j <= k <= n."""

    n: int
    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=np.float64)
        object.__setattr__(self, "probs", p)
        if p.shape != (self.n + 1, self.n + 1):
            raise DomainError(f"table must be ({self.n + 1}, {self.n + 1}), got {p.shape}")
        if abs(float(p.sum()) - 1.0) > 1e-12:
            raise DomainError(f"table must sum to 1, got {p.sum()!r}")

    def items(self):
        for k in range(self.n + 1):
            for j in range(k + 1):
                yield (k, j), float(self.probs[k, j])

    def flat(self) -> np.ndarray:
        """Probabilities over valid states in (k, j) lexicographic order."""
        return np.concatenate([self.probs[k, : k + 1] for k in range(self.n + 1)])

    def marginal_k(self) -> np.ndarray:
        return self.probs.sum(axis=1)

    def to_dict(self) -> dict:
        return {"n": self.n,
                "table": [[k, j, p] for (k, j), p in self.items() if p > 0.0]}


def suffstat_dist(dist: TwoPointDistribution, n: int) -> SuffStatDist:
    """Exact table P(k, j) = Bin(n, p_x1)(k) * Bin(k, eta1)(j), in log space."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    log_k = binom_logpmf_vector(n, dist.p_x1, np.arange(n + 1))
    probs = np.zeros((n + 1, n + 1))
    for k in range(n + 1):
        if log_k[k] == -np.inf:
            continue
        log_j = binom_logpmf_vector(k, dist.eta1, np.arange(k + 1)) if k > 0 \
            else np.array([0.0])
        probs[k, : k + 1] = np.exp(log_k[k] + log_j)
    return SuffStatDist(n=n, probs=probs)


def _fair_noisy_components(scenario: MultitaskScenario, sigma: int):
    """The two mixture components with optimal label sigma."""
    if scenario.family != "fair_noisy":
        raise DomainError(f"operation requires the fair_noisy family, got {scenario.family!r}")
    if sigma not in (0, 1):
        raise DomainError(f"sigma must be 0 or 1, got {sigma}")
    fair = scenario.target
    noisy = next((s for s in scenario.sources if s != fair), fair)
    if fair.p1_x0 != noisy.p1_x0:
        raise DomainError("mixture machinery requires equal P(Y=1|x0) across components")
    if fair.y_star != sigma:
        fair, noisy = fair.label_flipped(), noisy.label_flipped()
    return fair, noisy


def mixture_suffstat_dist(scenario: MultitaskScenario, sigma: int) -> SuffStatDist:
    """Per-task statistic law under the random source-type model: the
    alpha_f-weighted mixture of the fair and noisy components at label sigma."""
    fair, noisy = _fair_noisy_components(scenario, sigma)
    alpha_f = scenario.params.alpha_f
    n = scenario.n_per_task
    probs = alpha_f * suffstat_dist(fair, n).probs \
        + (1.0 - alpha_f) * suffstat_dist(noisy, n).probs
    return SuffStatDist(n=n, probs=probs)


def mixture_task_kl(scenario: MultitaskScenario) -> tuple[float, float]:
    """Exact per-task KL divergence between the sigma-truth and sigma-flipped
    mixtures of sufficient statistics, and its total N * per_task.

    The combinatorial multiplicities cancel inside the log-ratio, so the KL
    over (k, j) states equals the KL over full labeled samples.
    """
    sigma = scenario.y_star
    m1 = mixture_suffstat_dist(scenario, sigma).flat()
    m0 = mixture_suffstat_dist(scenario, 1 - sigma).flat()
    per_task = kl_divergence(m1, m0)
    return per_task, scenario.num_tasks * per_task


@dataclass(frozen=True)
class AdaptiveLowerBound:
    kl_total: float
    pinsker: float
    bretagnolle_huber: float
    risk_bound: float


def adaptive_error_lower_bound(scenario: MultitaskScenario) -> AdaptiveLowerBound:
    """Testing-error lower bounds from the exact total KL, and the induced
    expected-excess-risk lower bound (a wrong guess costs epsilon)."""
    _, kl_total = mixture_task_kl(scenario)
    p = fano_bound(kl_total, "pinsker")
    bh = fano_bound(kl_total, "bretagnolle_huber")
    eps = scenario.params.epsilon
    return AdaptiveLowerBound(kl_total=kl_total, pinsker=p, bretagnolle_huber=bh,
                              risk_bound=eps * max(p, bh))


def joint_bruteforce_test(scenario: MultitaskScenario, n_small: int,
                          max_tasks: int = JOINT_MAX_TASKS,
                          max_n: int = JOINT_MAX_N,
                          max_states: int = JOINT_STATES_LIMIT) -> tuple[float, float, float]:
    """Exact TV, Bayes test error and KL for the joint law of n_small tasks,
    by enumerating the product state space.  Independent of the per-task KL
    path; guards refuse joint spaces that would not fit."""
    n = scenario.n_per_task
    if n_small < 1 or n_small > max_tasks:
        raise GuardRefusal(
            f"joint enumeration supports 1..{max_tasks} tasks, got {n_small}")
    if n > max_n:
        raise GuardRefusal(
            f"joint enumeration supports n <= {max_n}, got n = {n}")
    states = (n + 1) * (n + 2) // 2
    if states**n_small > max_states:
        raise GuardRefusal(
            f"joint state space {states}^{n_small} exceeds the {max_states} guard")
    sigma = scenario.y_star
    p1 = mixture_suffstat_dist(scenario, sigma).flat()
    p0 = mixture_suffstat_dist(scenario, 1 - sigma).flat()
    joint1, joint0 = p1, p0
    for _ in range(n_small - 1):
        joint1 = np.outer(joint1, p1).ravel()
        joint0 = np.outer(joint0, p0).ravel()
    tv = tv_distance(joint1, joint0)
    return tv, 0.5 * (1.0 - tv), kl_divergence(joint1, joint0)


@dataclass(frozen=True)
class PrefixRate:
    t: int
    cumulative_n: int
    rho_bar: float
    rate: float


@dataclass(frozen=True)
class RateBreakdown:
    per_prefix: tuple
    argmin_t: int
    value: float

    def to_dict(self) -> dict:
        return {"per_prefix": [[p.t, p.cumulative_n, p.rho_bar, p.rate]
                               for p in self.per_prefix],
                "argmin_t": self.argmin_t, "value": self.value}


def minimax_rate(beta: float, sizes: Sequence[int], rhos: Sequence[float]) -> RateBreakdown:
    """min over prefixes t of (sum of the t best-transferring sample sizes)
    ^(-1 / ((2 - beta) rho_bar_t)), with rho_bar_t the size-weighted mean of
    the t smallest exponents."""
    if not 0.0 <= beta <= 1.0:
        raise DomainError(f"beta must lie in [0, 1], got {beta}")
    sizes = [int(s) for s in sizes]
    rhos = [float(r) for r in rhos]
    if not sizes or len(sizes) != len(rhos):
        raise DomainError("sizes and rhos must be non-empty and equal length")
    if any(s < 1 for s in sizes):
        raise DomainError("sizes must be >= 1")
    if any(r < 1.0 for r in rhos):
        raise DomainError("rhos must be >= 1")
    order = np.argsort(rhos, kind="stable")
    prefix = []
    cum_n = 0
    cum_nr = 0.0
    best_t, best_val = 1, float("inf")
    for t, idx in enumerate(order, start=1):
        cum_n += sizes[idx]
        cum_nr += sizes[idx] * rhos[idx]
        rho_bar = cum_nr / cum_n
        rate = cum_n ** (-1.0 / ((2.0 - beta) * rho_bar))
        prefix.append(PrefixRate(t=t, cumulative_n=cum_n, rho_bar=rho_bar, rate=rate))
        if rate < best_val:
            best_t, best_val = t, rate
    return RateBreakdown(per_prefix=tuple(prefix), argmin_t=best_t, value=best_val)


def pooling_rate_bound(alpha: float, beta: float, c_beta: float, c0: float,
                       c_rho: float, d: int, n: int, N: int, delta: float,
                       rho_bar_t_alpha: float) -> float:
    """High-probability pooling bound at quantile alpha:
    C_rho * (C (d log(nN/d) + log(1/delta)) / (nN)) ^ (1/((2-beta) rho_bar)),
    with C = (32 C0^2 / alpha)^(2-beta) C_beta."""
    if not 0.0 < alpha <= 1.0:
        raise DomainError(f"alpha must lie in (0, 1], got {alpha}")
    if not 0.0 <= beta <= 1.0:
        raise DomainError(f"beta must lie in [0, 1], got {beta}")
    if d < 1 or n < 1 or N < 1:
        raise DomainError("d, n, N must be >= 1")
    if not 0.0 < delta < 1.0:
        raise DomainError(f"delta must lie in (0, 1), got {delta}")
    if rho_bar_t_alpha <= 0:
        raise DomainError(f"rho_bar must be positive, got {rho_bar_t_alpha}")
    big_c = (32.0 * c0 * c0 / alpha) ** (2.0 - beta) * c_beta
    inner = big_c * (d * math.log(n * N / d) + math.log(1.0 / delta)) / (n * N)
    return c_rho * inner ** (1.0 / ((2.0 - beta) * rho_bar_t_alpha))


def canonical_noisy_exponent(scenario: MultitaskScenario) -> float:
    """Slack-free transfer exponent of the noisy source to the fair target:
    log(eps0) / log(eps); always > 1 since eps0 < eps."""
    p = scenario.params
    if scenario.family != "fair_noisy" or p.epsilon is None or p.epsilon0 is None:
        raise DomainError("canonical exponent needs a fair_noisy scenario")
    return math.log(p.epsilon0) / math.log(p.epsilon)


def pooling_rate_for_scenario(scenario: MultitaskScenario, c0: float, delta: float,
                              d: int = 1) -> float:
    """Pooling bound evaluated at alpha = alpha_f with the size-weighted mean
    exponent of the ceil(alpha N) best tasks (fair tasks at exponent 1, noisy
    at the slack-free canonical exponent)."""
    p = scenario.params
    if scenario.family != "fair_noisy" or p.alpha_f is None:
        raise DomainError("scenario pooling rate needs a fair_noisy scenario")
    N = scenario.num_tasks
    t_alpha = math.ceil(p.alpha_f * N)
    n_fair = sum(1 for tag in (scenario.assignment or ()) if tag == "fair")
    rho_q = canonical_noisy_exponent(scenario)
    fair_used = min(t_alpha, n_fair)
    rho_bar = (fair_used * 1.0 + (t_alpha - fair_used) * rho_q) / t_alpha
    return pooling_rate_bound(p.alpha_f, p.beta, p.c_beta, c0, 2.0, d,
                              scenario.n_per_task, N, delta, rho_bar)


def fair_oracle_rate_bound(n: int, N: int, beta: float, c_beta: float) -> float:
    """Closed-form risk bound for ERM over the fair tasks:
    (n sqrt(N))^(-1/(2-beta)) * 2 exp(-n^(n beta / (2 (2-beta))) / (8 c_beta))."""
    if n < 1 or N < 1:
        raise DomainError(f"need n >= 1 and N >= 1, got n={n}, N={N}")
    if not 0.0 < beta < 1.0:
        raise DomainError(f"beta must lie in (0, 1), got {beta}")
    eps = (n * math.sqrt(N)) ** (-1.0 / (2.0 - beta))
    return eps * 2.0 * math.exp(-(n ** (n * beta / (2.0 * (2.0 - beta)))) / (8.0 * c_beta))


def oracle_error_exact_fair(n: int, t_star_int: int, beta: float, c_beta: float,
                            N: int, max_enum: int = ORACLE_ENUM_LIMIT) -> float:
    """Exact error probability of ERM pooled over t_star_int fair tasks,
    conditioning on the total x1 count: sum_m P(M = m) P(Bin(m, p0) >= ceil(m/2))
    with M ~ Bin(n t*, p_x1) and p0 the wrong-label conditional."""
    if n < 1 or t_star_int < 1:
        raise DomainError("n and t_star_int must be >= 1")
    total = n * t_star_int
    if total > max_enum:
        raise GuardRefusal(
            f"oracle enumeration needs n*t* = {total} <= {max_enum}; raise max_enum to allow")
    expo = 1.0 / (2.0 - beta)
    eps = (n * math.sqrt(N)) ** (-expo)
    p_x1 = c_beta * eps**beta
    if p_x1 > 1.0:
        raise DomainError(f"c_beta * eps^beta = {p_x1:.4f} > 1")
    eta = 0.5 + 0.5 / c_beta * eps ** (1.0 - beta)
    p0 = 1.0 - eta
    pmf_m = binom_pmf_vector(total, p_x1)
    out = 0.0
    for m in range(total + 1):
        if pmf_m[m] == 0.0:
            continue
        # m = 0 leaves ERM tied, which counts as an error: sf(0, p0, 0) = 1
        out += pmf_m[m] * binom_sf(m, p0, math.ceil(m / 2))
    return float(out)


def confidence_set_excess_bound(c0: float, c_beta: float, beta: float,
                                eps_complexity: float) -> float:
    """Excess-risk guarantee for any hypothesis inside a Bernstein ball:
    32 c0^2 (c_beta * eps)^(1/(2-beta)).  Reported raw even when vacuous."""
    if eps_complexity < 0:
        raise DomainError(f"eps_complexity must be >= 0, got {eps_complexity}")
    if not 0.0 <= beta <= 1.0:
        raise DomainError(f"beta must lie in [0, 1], got {beta}")
    return 32.0 * c0 * c0 * (c_beta * eps_complexity) ** (1.0 / (2.0 - beta))
