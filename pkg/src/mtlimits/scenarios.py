"""Multitask scenario families over a two-point instance space.

Every construction lives on X = {x0, x1}, Y = {0, 1} with a two-hypothesis
concept class that disagrees only at x1.  A scenario bundles N source
distributions, a target, per-task sample size, the construction parameters,
and (optionally) a materialized source-type assignment.

Three builders are provided:

* ``make_agnostic_scenario``  - one informative source among N, noise level
  eps = sqrt(log(1/delta)/n), margin exponent 0.
* ``make_fair_noisy_scenario`` - two noise levels eps > eps0 tied to (n, N)
  through the exponent beta, with the cut-off t* and fair-task fraction
  alpha_f = t*/N.
* ``make_background_scenario`` - a benign/noisy source pair plus a distinct
  target, with its regime constraints recorded as flags.

Builders refuse only mathematically invalid probabilities; regime
constraints are recorded in ``scenario.flags`` so the boundary can be
explored.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .errors import DomainError, ParameterError

BCC_TOL = 1e-12

SCENARIO_SCHEMA_VERSION = "scenario_v1"

__all__ = [
    "TwoPointDistribution",
    "ConceptClass",
    "ScenarioParams",
    "MultitaskScenario",
    "two_point_class",
    "bcc_threshold",
    "satisfies_bcc",
    "excess_risk",
    "TransferExponent",
    "minimal_transfer_exponent",
    "make_agnostic_scenario",
    "make_fair_noisy_scenario",
    "fair_noisy_scenario_from_params",
    "make_background_scenario",
    "random_construction",
    "feasible_from_draws",
    "scenario_to_json",
    "scenario_from_json",
]


@dataclass(frozen=True)
class TwoPointDistribution:
    """A distribution on {x0, x1} x {0, 1}.

    ``p_x1`` is the marginal mass at x1, ``eta_star`` = P(Y = y_star | X = x1)
    and ``p1_x0`` = P(Y = 1 | X = x0) (1 in every construction here).
    """

    p_x1: float
    eta_star: float
    y_star: int = 1
    p1_x0: float = 1.0

    def __post_init__(self):
        for name in ("p_x1", "eta_star", "p1_x0"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ParameterError(f"{name} must lie in [0, 1], got {v}")
        if self.y_star not in (0, 1):
            raise ParameterError(f"y_star must be 0 or 1, got {self.y_star}")

    @property
    def eta1(self) -> float:
        """P(Y = 1 | X = x1) in absolute labels."""
        return self.eta_star if self.y_star == 1 else 1.0 - self.eta_star

    def label_flipped(self) -> "TwoPointDistribution":
        """Same marginals, conditional label law at x1 flipped."""
        return TwoPointDistribution(self.p_x1, self.eta_star, 1 - self.y_star, self.p1_x0)

    def cell_probs(self) -> np.ndarray:
        """2x2 matrix of P(X = x, Y = y), rows x0/x1, columns y=0/y=1."""
        px0 = 1.0 - self.p_x1
        return np.array([
            [px0 * (1.0 - self.p1_x0), px0 * self.p1_x0],
            [self.p_x1 * (1.0 - self.eta1), self.p_x1 * self.eta1],
        ])


@dataclass(frozen=True)
class ConceptClass:
    """An ordered tuple of hypotheses, each a pair (h(x0), h(x1))."""

    hypotheses: tuple
    vc_dim: int

    def __post_init__(self):
        hyps = tuple(tuple(int(v) for v in h) for h in self.hypotheses)
        object.__setattr__(self, "hypotheses", hyps)
        if not hyps:
            raise ParameterError("concept class must be non-empty")
        if len(set(hyps)) != len(hyps):
            raise ParameterError("hypotheses must be pairwise distinct")
        if self.vc_dim < 1:
            raise ParameterError("vc_dim must be >= 1")

    def __len__(self) -> int:
        return len(self.hypotheses)

    def __getitem__(self, i: int):
        return self.hypotheses[i]


def two_point_class(y_star: int = 1) -> ConceptClass:
    """The two-hypothesis class used by every construction.

    Ordered [non-optimal hypothesis, h*]: with ERM breaking ties toward the
    lowest index, tied empirical counts resolve to the wrong hypothesis, so
    the exact error formulas (which count ties as errors) match simulation.
    """
    wrong = (1, 1 - y_star)
    hstar = (1, y_star)
    return ConceptClass(hypotheses=(wrong, hstar), vc_dim=1)


def bcc_threshold(beta: float, c_beta: float, p_x1: float) -> float:
    """Minimum admissible P(Y = y* | X = x1) for the margin condition to hold:
    (1/2) (1 + c_beta^(-1/beta) * p_x1^(1/beta - 1))."""
    if not 0.0 < beta <= 1.0:
        raise DomainError(f"beta must lie in (0, 1], got {beta}")
    if c_beta < 2.0:
        raise DomainError(f"c_beta must be >= 2, got {c_beta}")
    if not 0.0 < p_x1 <= 1.0:
        raise DomainError(f"p_x1 must lie in (0, 1], got {p_x1}")
    return 0.5 * (1.0 + c_beta ** (-1.0 / beta) * p_x1 ** (1.0 / beta - 1.0))


def satisfies_bcc(dist: TwoPointDistribution, beta: float, c_beta: float) -> bool:
    """Whether the margin condition with exponent beta and constant c_beta
    holds; beta = 0 always holds, and exact threshold ties pass."""
    if dist.eta_star < 0.5:
        raise DomainError("satisfies_bcc requires eta_star >= 1/2 (h* optimal at x1)")
    if not 0.0 <= beta <= 1.0:
        raise DomainError(f"beta must lie in [0, 1], got {beta}")
    if beta == 0.0:
        return True
    if dist.p_x1 == 0.0:
        return True  # P(h != h*) = 0, condition trivially satisfied
    return dist.eta_star >= bcc_threshold(beta, c_beta, dist.p_x1) - BCC_TOL


def excess_risk(dist: TwoPointDistribution, h_index: int, cls: ConceptClass) -> float:
    """Excess risk of cls[h_index] under dist: 0 for h*, else
    (2 eta_star - 1) * p_x1."""
    if not 0 <= h_index < len(cls):
        raise DomainError(f"hypothesis index {h_index} out of range")
    if dist.eta_star < 0.5:
        raise DomainError("excess_risk requires eta_star >= 1/2")
    h = cls[h_index]
    if h[1] == dist.y_star:
        return 0.0
    return (2.0 * dist.eta_star - 1.0) * dist.p_x1


class TransferExponent(NamedTuple):
    """Minimal admissible transfer exponent, plus the conventional value
    (1.0 when source equals target, else None)."""

    minimum: float
    convention: Optional[float]


def minimal_transfer_exponent(src: TwoPointDistribution, tgt: TwoPointDistribution,
                              c_rho: float, cls: ConceptClass) -> TransferExponent:
    """Least rho > 0 with tgt-excess <= c_rho * (src-excess)^(1/rho) for the
    unique non-optimal hypothesis.

    Because of the slack constant the minimum can fall below 1; a source
    identical to the target still conventionally transfers with exponent 1,
    reported separately.
    """
    if c_rho < 1.0:
        raise DomainError(f"c_rho must be >= 1, got {c_rho}")
    if len(cls) != 2:
        raise DomainError("transfer exponent computation requires the two-hypothesis class")
    wrong = 0 if cls[0][1] != tgt.y_star else 1
    e_src = excess_risk(src, wrong, cls)
    e_tgt = excess_risk(tgt, wrong, cls)
    if e_tgt == 0.0:
        return TransferExponent(np.finfo(float).tiny, 1.0 if src == tgt else None)
    if e_src == 0.0:
        return TransferExponent(float("inf"), None)
    if not (0.0 < e_src < 1.0 and 0.0 < e_tgt < 1.0):
        raise DomainError(
            f"degenerate excess risks outside (0, 1): src={e_src}, tgt={e_tgt}")
    if e_tgt >= c_rho:
        # inequality holds for every rho > 0
        return TransferExponent(np.finfo(float).tiny, 1.0 if src == tgt else None)
    rho = math.log(e_src) / math.log(e_tgt / c_rho)
    rho = max(rho, np.finfo(float).tiny)
    return TransferExponent(rho, 1.0 if src == tgt else None)


_PARAM_FIELDS = ("beta", "c_beta", "c_rho", "epsilon", "epsilon0", "t_star",
                 "alpha_f", "n_target", "n_p", "n_q", "c0_const", "c1_const", "delta")


@dataclass(frozen=True)
class ScenarioParams:
    """Construction parameters; fields not used by a family stay None."""

    beta: Optional[float] = None
    c_beta: Optional[float] = None
    c_rho: Optional[float] = None
    epsilon: Optional[float] = None
    epsilon0: Optional[float] = None
    t_star: Optional[float] = None
    alpha_f: Optional[float] = None
    n_target: Optional[int] = None
    n_p: Optional[int] = None
    n_q: Optional[int] = None
    c0_const: Optional[float] = None
    c1_const: Optional[float] = None
    delta: Optional[float] = None


@dataclass(frozen=True)
class MultitaskScenario:
    sources: tuple
    target: TwoPointDistribution
    n_per_task: int
    family: str
    params: ScenarioParams
    concept_class: ConceptClass
    assignment: Optional[tuple] = None
    flags: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "sources", tuple(self.sources))
        if self.assignment is not None:
            object.__setattr__(self, "assignment", tuple(self.assignment))
        if len(self.sources) < 1:
            raise ParameterError("scenario needs at least one source")
        if self.n_per_task < 1:
            raise ParameterError("n_per_task must be >= 1")
        if self.family not in ("agnostic", "fair_noisy", "background"):
            raise ParameterError(f"unknown family {self.family!r}")
        if self.family == "fair_noisy" and self.params.epsilon0 is not None \
                and self.params.epsilon is not None \
                and not self.params.epsilon0 < self.params.epsilon:
            raise ParameterError("fair_noisy requires epsilon0 < epsilon")

    @property
    def num_tasks(self) -> int:
        return len(self.sources)

    @property
    def y_star(self) -> int:
        return self.target.y_star

    @property
    def target_excess(self) -> float:
        """Excess risk on the target of the non-optimal hypothesis."""
        wrong = 0 if self.concept_class[0][1] != self.target.y_star else 1
        return excess_risk(self.target, wrong, self.concept_class)

    @property
    def scenario_id(self) -> str:
        payload = json.dumps(scenario_to_dict(self), sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()[:12]


def make_agnostic_scenario(n: int, N: int, delta: float) -> MultitaskScenario:
    """One source at noise level 1/2 - eps among N-1 pure-noise sources, with
    eps = sqrt(log(1/delta)/n); the informative source's position is drawn
    uniformly at simulation time."""
    if n < 1 or N < 1:
        raise ParameterError(f"need n >= 1 and N >= 1, got n={n}, N={N}")
    if not 0.0 < delta <= 1.0:
        raise ParameterError(f"delta must lie in (0, 1], got {delta}")
    eps = math.sqrt(math.log(1.0 / delta) / n)
    if eps >= 0.5:
        raise ParameterError(
            f"delta={delta} gives eps={eps:.4f} >= 1/2; conditional label probability would exceed 1")
    p_src = TwoPointDistribution(p_x1=1.0, eta_star=0.5 + eps, y_star=1)
    q_src = TwoPointDistribution(p_x1=1.0, eta_star=0.5, y_star=1)
    return MultitaskScenario(
        sources=(p_src,) + (q_src,) * (N - 1),
        target=p_src,
        n_per_task=n,
        family="agnostic",
        params=ScenarioParams(beta=0.0, epsilon=eps, delta=delta),
        concept_class=two_point_class(1),
        assignment=("target-like",) + ("noisy",) * (N - 1),
    )


def fair_noisy_scenario_from_params(n: int, N: int, beta: float, c_beta: float,
                                    epsilon: float, epsilon0: float, alpha_f: float,
                                    t_star: Optional[float] = None,
                                    y_star: int = 1,
                                    flags: Optional[dict] = None,
                                    clamp_marginal: bool = False) -> MultitaskScenario:
    """Assemble a fair/noisy scenario from explicit noise levels.

    The fair source has marginal c_beta * eps^beta and conditional
    1/2 + (1/2) c_beta^(-1) eps^(1-beta); the noisy source uses eps0 < eps.
    The materialized assignment marks round(alpha_f * N) fair tasks
    (round half up); simulation re-draws the assignment per trial.

    At coarse parameters c_beta * eps^beta can exceed 1: by default that is
    refused, but with ``clamp_marginal`` the marginal caps at 1 and the flag
    ``marginal_clamped`` records it (the excess risk then falls below eps).
    """
    if n < 1 or N < 1:
        raise ParameterError(f"need n >= 1 and N >= 1, got n={n}, N={N}")
    if not 0.0 < beta < 1.0:
        raise ParameterError(f"beta must lie in (0, 1), got {beta}")
    if c_beta < 2.0:
        raise ParameterError(f"c_beta must be >= 2, got {c_beta}")
    if not 0.0 < epsilon0 < epsilon < 1.0:
        raise ParameterError(f"need 0 < epsilon0 < epsilon < 1, got {epsilon0}, {epsilon}")
    if not 0.0 <= alpha_f <= 1.0:
        raise ParameterError(f"alpha_f must be a probability, got {alpha_f}")
    clamped = False
    for eps in (epsilon, epsilon0):
        if c_beta * eps**beta > 1.0:
            if not clamp_marginal:
                raise ParameterError(
                    f"c_beta * eps^beta = {c_beta * eps**beta:.4f} > 1: marginal exceeds 1")
            clamped = True
    fair = TwoPointDistribution(
        p_x1=min(1.0, c_beta * epsilon**beta),
        eta_star=0.5 + 0.5 / c_beta * epsilon ** (1.0 - beta),
        y_star=y_star)
    noisy = TwoPointDistribution(
        p_x1=min(1.0, c_beta * epsilon0**beta),
        eta_star=0.5 + 0.5 / c_beta * epsilon0 ** (1.0 - beta),
        y_star=y_star)
    flags = dict(flags or {})
    if clamped:
        flags["marginal_clamped"] = True
    n_fair = min(N, int(math.floor(alpha_f * N + 0.5)))
    return MultitaskScenario(
        sources=(fair,) * n_fair + (noisy,) * (N - n_fair),
        target=fair,
        n_per_task=n,
        family="fair_noisy",
        params=ScenarioParams(beta=beta, c_beta=c_beta, epsilon=epsilon,
                              epsilon0=epsilon0, t_star=t_star, alpha_f=alpha_f),
        concept_class=two_point_class(y_star),
        assignment=("fair",) * n_fair + ("noisy",) * (N - n_fair),
        flags=flags,
    )


def make_fair_noisy_scenario(n: int, N: int, beta: float, c_beta: float,
                             y_star: int = 1) -> MultitaskScenario:
    """Fair/noisy scenario at the canonical parameterization:
    eps = (n sqrt(N))^(-1/(2-beta)), eps0 = (n N)^(-1/(2-beta)),
    t* = sqrt(N * n^(n beta/(2-beta))), alpha_f = t*/N.

    Records whether N >= n^(n beta/(1-beta)) as the flag
    ``task_count_sufficient`` rather than refusing, so the regime boundary
    stays explorable; refuses only if alpha_f would exceed 1.  A fair
    marginal above 1 (coarse-parameter regime) is capped and flagged, in
    the same spirit as the 1-capped noise level of the background family.
    """
    if n < 1 or N < 1:
        raise ParameterError(f"need n >= 1 and N >= 1, got n={n}, N={N}")
    if not 0.0 < beta < 1.0:
        raise ParameterError(f"beta must lie in (0, 1), got {beta}")
    expo = 1.0 / (2.0 - beta)
    epsilon = (n * math.sqrt(N)) ** (-expo)
    epsilon0 = (n * N) ** (-expo)
    t_star = math.sqrt(N * n ** (n * beta / (2.0 - beta)))
    alpha_f = t_star / N
    if alpha_f > 1.0:
        raise ParameterError(
            f"t* = {t_star:.4f} exceeds N = {N}; alpha_f would not be a probability")
    # constraint from the construction, checked in logs to avoid overflow
    log_n_req = (n * beta / (1.0 - beta)) * math.log(n) if n > 1 else 0.0
    flags = {"task_count_sufficient": math.log(N) >= log_n_req - 1e-12}
    return fair_noisy_scenario_from_params(
        n, N, beta, c_beta, epsilon, epsilon0, alpha_f,
        t_star=t_star, y_star=y_star, flags=flags, clamp_marginal=True)


def make_background_scenario(n: int, N_P: int, N_Q: int, n_target: int,
                             beta: float, c0: float = 0.5, c1: float = 0.5,
                             y_star: int = 1) -> MultitaskScenario:
    """Benign/noisy source family with a separate target:
    eps0 = min(1, n_target^(-1/(2-beta))), eps = (n N_P)^(-1/(2-beta)).

    The regime constraints N_Q >= 3 N_P and
    N_Q^((2-(n+1)beta)/(2-beta)) >= 2^(15 n) N_P^2 are recorded as flags.
    """
    for name, v in (("n", n), ("N_P", N_P), ("N_Q", N_Q), ("n_target", n_target)):
        if v < 1:
            raise ParameterError(f"{name} must be >= 1, got {v}")
    if not 0.0 < beta < 1.0:
        raise ParameterError(f"beta must lie in (0, 1), got {beta}")
    if c0 <= 0 or c1 <= 0:
        raise ParameterError("c0 and c1 must be positive")
    expo = 1.0 / (2.0 - beta)
    eps0 = min(1.0, n_target ** (-expo))
    eps = (n * N_P) ** (-expo)
    if c0 * eps0 ** (1.0 - beta) > 0.5:
        raise ParameterError("target conditional 1/2 + c0*eps0^(1-beta) exceeds 1")
    if c1 * eps**beta > 1.0 or eps ** (1.0 - beta) > 0.5:
        raise ParameterError("noisy source probabilities exceed 1")
    target = TwoPointDistribution(p_x1=0.5 * eps0**beta,
                                  eta_star=0.5 + c0 * eps0 ** (1.0 - beta), y_star=y_star)
    benign = TwoPointDistribution(p_x1=1.0, eta_star=1.0, y_star=y_star)
    noisy = TwoPointDistribution(p_x1=c1 * eps**beta,
                                 eta_star=0.5 + eps ** (1.0 - beta), y_star=y_star)
    # second constraint compared in log space: 2^(15n) overflows beyond n ~ 68
    lhs_log = ((2.0 - (n + 1) * beta) / (2.0 - beta)) * math.log(N_Q)
    rhs_log = 15.0 * n * math.log(2.0) + 2.0 * math.log(N_P)
    flags = {
        "noisy_tasks_dominate": N_Q >= 3 * N_P,
        "task_count_sufficient": lhs_log >= rhs_log - 1e-12,
    }
    return MultitaskScenario(
        sources=(benign,) * N_P + (noisy,) * N_Q,
        target=target,
        n_per_task=n,
        family="background",
        params=ScenarioParams(beta=beta, epsilon=eps, epsilon0=eps0,
                              n_target=n_target, n_p=N_P, n_q=N_Q,
                              c0_const=c0, c1_const=c1),
        concept_class=two_point_class(y_star),
        assignment=("benign",) * N_P + ("noisy",) * N_Q,
        flags=flags,
    )


def feasible_from_draws(draws: Sequence[int], m: int) -> bool:
    """Greedy matching criterion: with S_i = #{draws <= i}, feasible iff
    S_i >= i for every i in 1..m."""
    counts = np.bincount(np.asarray(draws, dtype=np.int64), minlength=m + 1)[1: m + 1]
    return bool(np.all(np.cumsum(counts) >= np.arange(1, m + 1)))


def random_construction(rho_list: Sequence[float], seed: int) -> tuple[list[int], bool]:
    """Draw a uniform index i_t in {1..m}, m = floor((N+1)/10), for each of
    the N+1 (sorted) transfer exponents; report the draws and whether a
    permutation with i_t <= t exists (the greedy criterion).

    Reproducible: the draws come from the package's counter-based generator
    at stream (seed, construction-salt, trial 0).
    """
    from .mc import rng as _rng  # local import: mc.engine imports this module

    n_plus_1 = len(rho_list)
    if n_plus_1 < 10:
        raise ParameterError(f"need at least 10 exponents, got {n_plus_1}")
    rhos = sorted(float(r) for r in rho_list)  # the draws index this sorted order
    if rhos[0] < 1.0:
        raise DomainError(f"transfer exponents must be >= 1, got {rhos[0]}")
    m = n_plus_1 // 10
    u = _rng.stream_uniforms(seed, _rng.SALT_CONSTRUCTION, 0, n_plus_1)
    draws = (u * m).astype(np.int64) + 1
    return draws.tolist(), feasible_from_draws(draws, m)


# ---------------------------------------------------------------------------
# JSON serialization (self-describing, version "scenario_v1")
# ---------------------------------------------------------------------------


def scenario_to_dict(s: MultitaskScenario) -> dict:
    return {
        "version": SCENARIO_SCHEMA_VERSION,
        "family": s.family,
        "n_per_task": s.n_per_task,
        "sources": [asdict(d) for d in s.sources],
        "target": asdict(s.target),
        "params": asdict(s.params),
        "concept_class": {"hypotheses": [list(h) for h in s.concept_class.hypotheses],
                          "vc_dim": s.concept_class.vc_dim},
        "assignment": list(s.assignment) if s.assignment is not None else None,
        "flags": s.flags,
    }


def scenario_to_json(s: MultitaskScenario, path=None) -> str:
    doc = json.dumps(scenario_to_dict(s), indent=2, sort_keys=True)
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(doc + "\n")
    return doc


def scenario_from_dict(doc: dict) -> MultitaskScenario:
    if doc.get("version") != SCENARIO_SCHEMA_VERSION:
        raise ParameterError(
            f"unsupported scenario document version {doc.get('version')!r}")
    params = ScenarioParams(**{k: doc["params"].get(k) for k in _PARAM_FIELDS})
    cls = ConceptClass(hypotheses=tuple(tuple(h) for h in doc["concept_class"]["hypotheses"]),
                       vc_dim=int(doc["concept_class"]["vc_dim"]))
    return MultitaskScenario(
        sources=tuple(TwoPointDistribution(**d) for d in doc["sources"]),
        target=TwoPointDistribution(**doc["target"]),
        n_per_task=int(doc["n_per_task"]),
        family=doc["family"],
        params=params,
        concept_class=cls,
        assignment=tuple(doc["assignment"]) if doc.get("assignment") is not None else None,
        flags=dict(doc.get("flags") or {}),
    )


def scenario_from_json(text_or_path) -> MultitaskScenario:
    text = text_or_path
    if "\n" not in str(text_or_path) and str(text_or_path).endswith(".json"):
        with open(text_or_path, "r", encoding="utf-8") as fh:
            text = fh.read()
    return scenario_from_dict(json.loads(text))
