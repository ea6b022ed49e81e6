"""Seeded Monte Carlo: counter-based RNG, dual numba/numpy kernels, and the
risk / test-error / KL / feasibility estimators."""

from .backend import ENV_VAR, available_backends, get_backend
from .engine import (
    LearnerSpec,
    RiskEstimate,
    estimate_construction_feasibility,
    estimate_mixture_kl_mc,
    sample_task_counts_batch,
    sample_task_dataset,
    simulate_bayes_test_error,
    simulate_learner_risk,
)
from .rng import TrialStream

__all__ = [
    "ENV_VAR", "available_backends", "get_backend",
    "LearnerSpec", "RiskEstimate", "TrialStream",
    "sample_task_dataset", "sample_task_counts_batch",
    "simulate_learner_risk", "simulate_bayes_test_error",
    "estimate_mixture_kl_mc", "estimate_construction_feasibility",
]
