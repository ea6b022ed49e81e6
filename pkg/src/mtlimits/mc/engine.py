"""Seeded Monte Carlo engine.

Each trial owns a counter-derived substream keyed by (seed, quantity salt,
trial index), so estimates are bit-identical for any worker count and any
backend.  Per-trial values land in a trial-indexed array; the mean and the
sample-standard-deviation-based standard error are then reduced in one
deterministic pass.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..errors import DomainError, ParameterError
from ..learners import DatasetCounts, epsilon_complexity
from ..scenarios import MultitaskScenario, TwoPointDistribution
from . import rng
from .backend import get_backend
from .tables import agn_ratio_tables, fn_score_table, sampling_tables

__all__ = [
    "RiskEstimate", "LearnerSpec",
    "sample_task_dataset", "sample_task_counts_batch",
    "simulate_learner_risk", "simulate_bayes_test_error",
    "estimate_mixture_kl_mc", "estimate_construction_feasibility",
]

_LEARNER_CODES = {"per_task_erm": 0, "pool": 1, "oracle": 2, "ibb": 3, "const_hstar": 4}


@dataclass(frozen=True)
class RiskEstimate:
    """Monte Carlo estimate with its provenance."""

    quantity: str
    mean: float
    stderr: float
    trials: int
    seed: int
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {"quantity": self.quantity, "mean": self.mean, "stderr": self.stderr,
               "trials": self.trials, "seed": self.seed}
        if self.extras:
            out["extras"] = dict(self.extras)
        return out


@dataclass(frozen=True)
class LearnerSpec:
    """Which learner a risk simulation runs.

    ``per_task_erm`` uses ``task``; ``ibb`` uses ``c0`` and ``delta``.
    """

    kind: str
    task: int = 0
    c0: float = 1.0
    delta: Optional[float] = None

    def __post_init__(self):
        if self.kind not in _LEARNER_CODES:
            raise DomainError(
                f"unknown learner {self.kind!r}; choose from {sorted(_LEARNER_CODES)}")

    @classmethod
    def per_task_erm(cls, task: int = 0):
        return cls(kind="per_task_erm", task=task)

    @classmethod
    def pool(cls):
        return cls(kind="pool")

    @classmethod
    def oracle(cls):
        return cls(kind="oracle")

    @classmethod
    def ibb(cls, c0: float = 1.0, delta: Optional[float] = None):
        return cls(kind="ibb", c0=c0, delta=delta)

    @classmethod
    def const_hstar(cls):
        return cls(kind="const_hstar")


def _estimate(quantity: str, values: np.ndarray, seed: int,
              extras: Optional[dict] = None) -> RiskEstimate:
    trials = values.size
    mean = float(np.mean(values))
    sd = float(np.std(values, ddof=1)) if trials > 1 else 0.0
    return RiskEstimate(quantity=quantity, mean=mean, stderr=sd / math.sqrt(trials),
                        trials=trials, seed=seed, extras=dict(extras or {}))


def _chunk_bounds(trials: int, target: int) -> list[tuple[int, int]]:
    target = max(64, target)
    return [(lo, min(lo + target, trials)) for lo in range(0, trials, target)]


def _run_chunks(fn, trials: int, threads: int, chunk_target: int) -> None:
    """Invoke fn(lo, hi) over a disjoint cover of [0, trials).

    Chunks write disjoint slices of trial-indexed output arrays, so results
    do not depend on thread count or completion order.
    """
    spans = _chunk_bounds(trials, chunk_target)
    if threads <= 1 or len(spans) == 1:
        for lo, hi in spans:
            fn(lo, hi)
        return
    with ThreadPoolExecutor(max_workers=threads) as pool:
        list(pool.map(lambda span: fn(*span), spans))


def _chunk_target(N: int, n: int) -> int:
    return max(64, min(65536, (1 << 21) // max(1, N * (n + 2))))


def _check_trials_seed(trials: int, seed: int) -> None:
    if trials < 1:
        raise DomainError(f"trials must be >= 1, got {trials}")
    if not 0 <= seed < 2**64:
        raise DomainError("seed must fit in 64 bits")


# ---------------------------------------------------------------------------
# dataset sampling
# ---------------------------------------------------------------------------


def sample_task_dataset(dist: TwoPointDistribution, n: int,
                        stream: rng.TrialStream) -> DatasetCounts:
    """One size-n i.i.d. dataset as a count matrix; consumes exactly three
    uniforms (x1 count, label-1 count at x1, label-1 count at x0)."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    from ..discrete import binom_cdf_table
    from .tables import label_cdf_matrix

    uk, uj, um = stream.uniform(), stream.uniform(), stream.uniform()
    k = int(np.searchsorted(binom_cdf_table(n, dist.p_x1), uk, side="right"))
    jrow = label_cdf_matrix(n, dist.eta1)[k]
    j = int(np.sum(jrow <= uj))
    mrow = label_cdf_matrix(n, dist.p1_x0)[n - k]
    m = int(np.sum(mrow <= um))
    return DatasetCounts.from_cells(x0y0=n - k - m, x0y1=m, x1y0=k - j, x1y1=j)


def sample_task_counts_batch(dist: TwoPointDistribution, n: int, seed: int,
                             trials: int, salt: int = rng.SALT_DATASET) -> np.ndarray:
    """Vectorized equivalent of sample_task_dataset over trial indices
    0..trials-1 (same substreams); returns an (trials, 4) array of cells
    [x0y0, x0y1, x1y0, x1y1]."""
    from ..discrete import binom_cdf_table
    from .tables import label_cdf_matrix

    _check_trials_seed(trials, seed)
    base = rng.stream_base(seed, salt, np.arange(trials, dtype=np.uint64))[:, None]
    u = rng.uniforms_from_base(base, np.arange(3, dtype=np.uint64))
    k = np.searchsorted(binom_cdf_table(n, dist.p_x1), u[:, 0], side="right").astype(np.int64)
    jtab = label_cdf_matrix(n, dist.eta1)
    j = (jtab[k] <= u[:, 1][:, None]).sum(axis=1).astype(np.int64)
    mtab = label_cdf_matrix(n, dist.p1_x0)
    m = (mtab[n - k] <= u[:, 2][:, None]).sum(axis=1).astype(np.int64)
    return np.stack([n - k - m, m, k - j, j], axis=1)


# ---------------------------------------------------------------------------
# simulations
# ---------------------------------------------------------------------------


def _ibb_eps_schedule(scenario: MultitaskScenario, delta: float) -> np.ndarray:
    n, N = scenario.n_per_task, scenario.num_tasks
    d = min(scenario.concept_class.vc_dim, n)
    t = np.arange(1, N + 1)
    return np.array([epsilon_complexity(d, n, delta / (6.0 * tt * tt)) for tt in t])


def simulate_learner_risk(scenario: MultitaskScenario, learner: LearnerSpec,
                          trials: int, seed: int, threads: int = 1,
                          backend: Optional[str] = None) -> RiskEstimate:
    """Mean excess risk on the target over seeded trials.

    fair_noisy re-draws each task's source type per trial with probability
    alpha_f; the agnostic family re-places its informative source uniformly;
    background keeps the materialized assignment.  The oracle learner pools
    the trial's realized favorable tasks (falling back to pooling everything
    in the measure-tiny event that none were drawn).  The ball-intersection
    learner scores empty intersections at the maximal excess risk and
    reports their rate plus the h* coverage frequency in ``extras``.
    """
    _check_trials_seed(trials, seed)
    tab = sampling_tables(scenario)
    if learner.kind == "per_task_erm" and not 0 <= learner.task < tab.num_tasks:
        raise DomainError(f"task index {learner.task} out of range")
    delta = learner.delta if learner.delta is not None else (scenario.params.delta or 0.05)
    eps_t = _ibb_eps_schedule(scenario, delta) if learner.kind == "ibb" \
        else np.zeros(tab.num_tasks)
    kern = get_backend(backend)
    out_val = np.empty(trials)
    out_cov = np.empty(trials, dtype=np.uint8)
    out_empty = np.empty(trials, dtype=np.uint8)
    # one shared stream for every learner: equal seeds mean equal multisamples,
    # so learner-vs-learner comparisons are paired
    salt = rng.SALT_RISK
    code = _LEARNER_CODES[learner.kind]
    seed64 = np.uint64(seed)

    def run(lo, hi):
        kern.risk_chunk(seed64, np.uint64(salt), lo, hi, tab.num_tasks, tab.n,
                        tab.mode, tab.alpha_f, tab.comp_fixed, tab.cdf_k, tab.cdf_j,
                        code, learner.task, float(learner.c0), eps_t,
                        1.0 / tab.n, tab.excess, tab.ystar_sign,
                        out_val[lo:hi], out_cov[lo:hi], out_empty[lo:hi])

    _run_chunks(run, trials, threads, _chunk_target(tab.num_tasks, tab.n))
    extras = {}
    if learner.kind == "ibb":
        extras = {"coverage_hstar": float(np.mean(out_cov)),
                  "empty_rate": float(np.mean(out_empty)),
                  "c0": learner.c0, "delta": delta}
    return _estimate(f"risk:{learner.kind}", out_val, seed, extras)


def simulate_bayes_test_error(scenario: MultitaskScenario, trials: int, seed: int,
                              threads: int = 1, backend: Optional[str] = None,
                              by_favorable_count: bool = False) -> RiskEstimate:
    """Error frequency of the exact likelihood-ratio rule deciding which of
    the two label hypotheses generated the multisample (ties predict 0).
    This rule attains the Bayes error of the testing problem.

    For the fair_noisy family, ``by_favorable_count`` additionally reports
    conditional error frequencies binned by the trial's realized number of
    favorable tasks (the marginal estimate averages over that randomness).
    """
    _check_trials_seed(trials, seed)
    if by_favorable_count and scenario.family != "fair_noisy":
        raise DomainError("conditional-by-favorable-count reporting needs the "
                          "fair_noisy family (random per-trial assignment)")
    kern = get_backend(backend)
    out_err = np.empty(trials)
    seed64 = np.uint64(seed)
    salt = np.uint64(rng.SALT_BAYES_TEST)
    extras: dict = {}
    if scenario.family == "fair_noisy":
        tab = sampling_tables(scenario)
        score = fn_score_table(scenario)
        out_nfav = np.empty(trials, dtype=np.int64)

        def run(lo, hi):
            kern.bayes_fn_chunk(seed64, salt, lo, hi, tab.num_tasks, tab.n,
                                tab.mode, tab.alpha_f, tab.comp_fixed, tab.cdf_k,
                                tab.cdf_j_both, score, out_err[lo:hi],
                                out_nfav[lo:hi])

        _run_chunks(run, trials, threads, _chunk_target(tab.num_tasks, tab.n))
        if by_favorable_count:
            split = {}
            for count in np.unique(out_nfav):
                mask = out_nfav == count
                split[int(count)] = {"trials": int(mask.sum()),
                                     "error": float(out_err[mask].mean())}
            extras["by_favorable_count"] = split
    elif scenario.family == "agnostic":
        from ..discrete import binom_cdf_table

        n, N = scenario.n_per_task, scenario.num_tasks
        eps = scenario.params.epsilon
        cdf_c_sig = np.stack([binom_cdf_table(n, 0.5 - eps), binom_cdf_table(n, 0.5 + eps)])
        cdf_q = binom_cdf_table(n, 0.5)
        r1, r0 = agn_ratio_tables(n, eps)

        def run(lo, hi):
            kern.bayes_agn_chunk(seed64, salt, lo, hi, N, n, cdf_c_sig, cdf_q,
                                 r1, r0, out_err[lo:hi])

        _run_chunks(run, trials, threads, _chunk_target(N, 1))
    else:
        raise DomainError("test-error simulation supports the agnostic and fair_noisy families")
    return _estimate("bayes_test_error", out_err, seed, extras)


def estimate_mixture_kl_mc(scenario: MultitaskScenario, trials: int, seed: int,
                           threads: int = 1, backend: Optional[str] = None) -> RiskEstimate:
    """Unbiased estimate of the total KL divergence: the mean over trials of
    the truth-vs-flipped log-likelihood ratio of a full multisample."""
    _check_trials_seed(trials, seed)
    if scenario.family != "fair_noisy":
        raise DomainError("mixture KL estimation requires the fair_noisy family")
    tab = sampling_tables(scenario)
    score = fn_score_table(scenario)
    score_truth = score if scenario.y_star == 1 else -score
    kern = get_backend(backend)
    out = np.empty(trials)
    seed64 = np.uint64(seed)
    salt = np.uint64(rng.SALT_MIXTURE_KL)

    def run(lo, hi):
        kern.kl_fn_chunk(seed64, salt, lo, hi, tab.num_tasks, tab.n, tab.mode,
                         tab.alpha_f, tab.comp_fixed, tab.cdf_k, tab.cdf_j,
                         score_truth, out[lo:hi])

    _run_chunks(run, trials, threads, _chunk_target(tab.num_tasks, tab.n))
    return _estimate("mixture_kl_total", out, seed)


def estimate_construction_feasibility(n_plus_1: int, trials: int, seed: int,
                                      threads: int = 1,
                                      backend: Optional[str] = None) -> RiskEstimate:
    """Frequency with which the uniform index construction admits the greedy
    matching (per the random-construction operation), over seeded trials."""
    _check_trials_seed(trials, seed)
    if n_plus_1 < 10:
        raise ParameterError(f"need at least 10 draws, got {n_plus_1}")
    m = n_plus_1 // 10
    kern = get_backend(backend)
    out = np.empty(trials)
    seed64 = np.uint64(seed)
    salt = np.uint64(rng.SALT_CONSTRUCTION)

    def run(lo, hi):
        kern.construction_chunk(seed64, salt, lo, hi, n_plus_1, m, out[lo:hi])

    _run_chunks(run, trials, threads, _chunk_target(n_plus_1, 0))
    return _estimate("construction_feasibility", out, seed)
