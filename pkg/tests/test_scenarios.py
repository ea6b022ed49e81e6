import math

import numpy as np
import pytest

from mtlimits import scenarios as sc
from mtlimits.errors import DomainError, ParameterError


class TestBccThreshold:
    def test_values(self):
        assert sc.bcc_threshold(0.5, 2.0, 0.25) == pytest.approx(0.53125, abs=1e-12)
        assert sc.bcc_threshold(0.5, 2.0, 1.0) == pytest.approx(0.625, abs=1e-12)

    def test_beta_one_kills_marginal(self):
        for p in (0.1, 0.42, 1.0):
            assert sc.bcc_threshold(1.0, 2.0, p) == pytest.approx(0.75, abs=1e-12)

    def test_domain(self):
        with pytest.raises(DomainError):
            sc.bcc_threshold(0.5, 2.0, 0.0)
        with pytest.raises(DomainError):
            sc.bcc_threshold(0.0, 2.0, 0.5)


class TestSatisfiesBcc:
    def test_beta_zero_always_holds(self):
        d = sc.TwoPointDistribution(p_x1=0.9, eta_star=0.5)
        assert sc.satisfies_bcc(d, 0.0, 2.0)

    def test_threshold_tie_passes(self):
        thr = sc.bcc_threshold(0.5, 2.0, 0.25)
        d = sc.TwoPointDistribution(p_x1=0.25, eta_star=thr)
        assert sc.satisfies_bcc(d, 0.5, 2.0)

    def test_just_below_threshold_fails(self):
        thr = sc.bcc_threshold(0.5, 2.0, 0.25)
        d = sc.TwoPointDistribution(p_x1=0.25, eta_star=thr - 1e-6)
        assert not sc.satisfies_bcc(d, 0.5, 2.0)

    def test_requires_optimal_hstar(self):
        d = sc.TwoPointDistribution(p_x1=0.5, eta_star=0.4)
        with pytest.raises(DomainError):
            sc.satisfies_bcc(d, 0.5, 2.0)


class TestExcessRisk:
    def test_hstar_is_zero(self):
        d = sc.TwoPointDistribution(p_x1=0.3, eta_star=0.8, y_star=1)
        cls = sc.two_point_class(1)
        assert sc.excess_risk(d, 1, cls) == 0.0

    def test_wrong_hypothesis(self):
        d = sc.TwoPointDistribution(p_x1=0.3, eta_star=0.8, y_star=1)
        cls = sc.two_point_class(1)
        assert sc.excess_risk(d, 0, cls) == pytest.approx(0.6 * 0.3, abs=1e-15)

    def test_fair_noisy_levels_exact(self):
        s = sc.make_fair_noisy_scenario(4, 16, 0.5, 2.0)
        cls = s.concept_class
        fair, noisy = s.sources[0], s.sources[-1]
        assert sc.excess_risk(fair, 0, cls) == pytest.approx(s.params.epsilon, abs=1e-14)
        assert sc.excess_risk(noisy, 0, cls) == pytest.approx(s.params.epsilon0, abs=1e-14)


class TestTransferExponent:
    def test_source_equals_target(self):
        d = sc.TwoPointDistribution(p_x1=0.4, eta_star=0.7)
        cls = sc.two_point_class(1)
        te = sc.minimal_transfer_exponent(d, d, 2.0, cls)
        assert te.minimum <= 1.0
        assert te.convention == 1.0

    def test_derived_value(self):
        # source excess 0.0625, target excess 0.157490, c_rho = 2
        cls = sc.two_point_class(1)
        src = sc.TwoPointDistribution(p_x1=0.25, eta_star=0.625)  # excess = 0.0625
        e_t = 0.157490
        tgt = sc.TwoPointDistribution(p_x1=0.5, eta_star=0.5 + e_t)  # excess = e_t
        te = sc.minimal_transfer_exponent(src, tgt, 2.0, cls)
        assert te.minimum == pytest.approx(math.log(0.0625) / math.log(e_t / 2.0), abs=1e-12)
        assert te.minimum == pytest.approx(1.0909, abs=2e-3)

    def test_grid_search_confirms_flip(self):
        cls = sc.two_point_class(1)
        src = sc.TwoPointDistribution(p_x1=0.25, eta_star=0.625)
        tgt = sc.TwoPointDistribution(p_x1=0.5, eta_star=0.657490)
        c_rho = 2.0
        rho_min = sc.minimal_transfer_exponent(src, tgt, c_rho, cls).minimum
        e_s, e_t = 0.0625, sc.excess_risk(tgt, 0, cls)
        for rho in np.linspace(0.2, 3.0, 57):
            holds = e_t <= c_rho * e_s ** (1.0 / rho)
            assert holds == (rho >= rho_min - 1e-9)

    def test_zero_source_signal_is_infinite(self):
        cls = sc.two_point_class(1)
        src = sc.TwoPointDistribution(p_x1=0.5, eta_star=0.5)  # excess 0
        tgt = sc.TwoPointDistribution(p_x1=0.5, eta_star=0.7)
        assert sc.minimal_transfer_exponent(src, tgt, 2.0, cls).minimum == math.inf


class TestAgnosticBuilder:
    def test_eps_values(self):
        s = sc.make_agnostic_scenario(100, 4, math.exp(-1))
        assert s.params.epsilon == pytest.approx(0.1, abs=1e-12)
        s2 = sc.make_agnostic_scenario(25, 2, math.exp(-4))
        assert s2.params.epsilon == pytest.approx(0.4, abs=1e-12)

    def test_delta_one_degenerates(self):
        s = sc.make_agnostic_scenario(10, 3, 1.0)
        assert s.params.epsilon == 0.0
        assert s.sources[0] == s.sources[1]

    def test_eps_half_rejected(self):
        with pytest.raises(ParameterError):
            sc.make_agnostic_scenario(4, 2, math.exp(-4 / 4) * 0.9)  # eps > 1/2

    def test_structure(self):
        s = sc.make_agnostic_scenario(50, 5, 0.1)
        assert s.num_tasks == 5
        assert s.target == s.sources[0]
        assert s.assignment == ("target-like",) + ("noisy",) * 4
        assert s.concept_class.hypotheses == ((1, 0), (1, 1))
        assert s.target_excess == pytest.approx(2 * s.params.epsilon)


class TestFairNoisyBuilder:
    def test_eq1_values(self):
        s = sc.make_fair_noisy_scenario(4, 16, 0.5, 2.0)
        assert s.params.epsilon == pytest.approx(2 ** (-8 / 3), abs=1e-12)
        assert s.params.epsilon0 == pytest.approx(1 / 16, abs=1e-14)

    def test_eq2_values(self):
        s = sc.make_fair_noisy_scenario(2, 4, 0.5, 2.0)
        assert s.params.t_star == pytest.approx(math.sqrt(4 * 2 ** (2 / 3)), abs=1e-12)
        assert s.params.t_star == pytest.approx(2.519842, abs=1e-6)
        assert s.params.alpha_f == pytest.approx(0.629961, abs=1e-6)

    def test_validity_flag(self):
        # n=2, beta=0.5 requires N >= 2^2 = 4
        assert sc.make_fair_noisy_scenario(2, 4, 0.5, 2.0).flags["task_count_sufficient"]
        assert not sc.make_fair_noisy_scenario(2, 3, 0.5, 2.0).flags["task_count_sufficient"]

    def test_both_sources_satisfy_bcc(self):
        for (n, N, beta) in [(2, 4, 0.5), (4, 16, 0.5), (2, 256, 0.3), (4, 1024, 0.3)]:
            s = sc.make_fair_noisy_scenario(n, N, beta, 2.0)
            for src in set(s.sources):
                assert sc.satisfies_bcc(src, beta, 2.0)

    def test_noisy_exponent_above_one_on_grid(self):
        # documented grid where the slack constant c_rho = 2 keeps the
        # minimal exponent of the noisy source above 1
        cls = sc.two_point_class(1)
        for (n, N, beta) in [(2, 64, 0.3), (2, 256, 0.5), (4, 256, 0.3),
                             (4, 1024, 0.5), (2, 1024, 0.3), (4, 64, 0.5)]:
            s = sc.make_fair_noisy_scenario(n, N, beta, 2.0)
            noisy = s.sources[-1]
            te = sc.minimal_transfer_exponent(noisy, s.target, 2.0, cls)
            assert te.minimum > 1.0, (n, N, beta)

    def test_deterministic(self):
        a = sc.make_fair_noisy_scenario(3, 50, 0.4, 2.5)
        b = sc.make_fair_noisy_scenario(3, 50, 0.4, 2.5)
        assert a == b
        assert a.scenario_id == b.scenario_id

    def test_materialized_assignment_rounds_half_up(self):
        s = sc.make_fair_noisy_scenario(4, 16, 0.5, 2.0)
        n_fair = sum(1 for t in s.assignment if t == "fair")
        assert n_fair == int(math.floor(s.params.t_star + 0.5)) == 10

    def test_coarse_marginal_clamped_and_flagged(self):
        # at (n=2, beta=0.3, N=256) the raw fair marginal is 2*eps^0.3 > 1
        s = sc.make_fair_noisy_scenario(2, 256, 0.3, 2.0)
        assert s.flags.get("marginal_clamped") is True
        assert s.target.p_x1 == 1.0
        assert sc.satisfies_bcc(s.target, 0.3, 2.0)
        # the explicit-parameter constructor stays strict by default
        with pytest.raises(ParameterError):
            sc.fair_noisy_scenario_from_params(
                2, 256, 0.3, 2.0, s.params.epsilon, s.params.epsilon0, s.params.alpha_f)


class TestBackgroundBuilder:
    def test_eps_values(self):
        s = sc.make_background_scenario(8, 8, 24, 8, 0.5)
        assert s.params.epsilon0 == pytest.approx(8 ** (-2 / 3), abs=1e-12)  # = 0.25
        assert s.params.epsilon == pytest.approx(64 ** (-2 / 3), abs=1e-12)  # = 0.0625

    def test_constraint_flags(self):
        s = sc.make_background_scenario(2, 4, 11, 8, 0.5)
        assert s.flags["noisy_tasks_dominate"] is False  # 11 < 12
        s2 = sc.make_background_scenario(2, 4, 12, 8, 0.5)
        assert s2.flags["noisy_tasks_dominate"] is True

    def test_bcc_with_derived_constant(self):
        c0 = 0.5
        for beta in (0.3, 0.5):
            s = sc.make_background_scenario(2, 4, 16, 16, beta, c0=c0, c1=0.5)
            c_beta = max(0.5 * c0 ** (-beta), 2.0)
            assert sc.satisfies_bcc(s.target, beta, c_beta)
            for src in set(s.sources):
                assert sc.satisfies_bcc(src, beta, c_beta)

    def test_rejects_invalid_probability(self):
        with pytest.raises(ParameterError):
            sc.make_background_scenario(2, 1, 3, 1, 0.5, c0=2.0)  # eta exceeds 1


class TestRandomConstruction:
    def test_draw_range_and_reproducibility(self):
        draws, feas = sc.random_construction([1.0] * 100, seed=42)
        draws2, feas2 = sc.random_construction([1.0] * 100, seed=42)
        assert draws == draws2 and feas == feas2
        assert all(1 <= d <= 10 for d in draws)

    def test_m_one_always_feasible(self):
        for seed in range(20):
            _, feas = sc.random_construction([1.0] * 10, seed=seed)
            assert feas

    def test_greedy_criterion(self):
        assert sc.feasible_from_draws([1] * 20, m=2)
        assert not sc.feasible_from_draws([2] * 20, m=2)  # S_1 = 0 < 1
        assert sc.feasible_from_draws([1, 2] + [2] * 18, m=2)

    def test_monotone_in_added_draws(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            m = int(rng.integers(1, 8))
            draws = list(rng.integers(1, m + 1, size=rng.integers(1, 40)))
            if sc.feasible_from_draws(draws, m):
                extra = int(rng.integers(1, m + 1))
                assert sc.feasible_from_draws(draws + [extra], m)

    def test_too_few_tasks_rejected(self):
        with pytest.raises(ParameterError):
            sc.random_construction([1.0] * 9, seed=0)


class TestSerialization:
    @pytest.mark.parametrize("maker", [
        lambda: sc.make_agnostic_scenario(50, 8, 0.05),
        lambda: sc.make_fair_noisy_scenario(4, 16, 0.5, 2.0),
        lambda: sc.make_background_scenario(2, 4, 16, 16, 0.5),
    ])
    def test_round_trip(self, maker, tmp_path):
        s = maker()
        path = tmp_path / "scenario.json"
        sc.scenario_to_json(s, path)
        back = sc.scenario_from_json(str(path))
        assert back == s
        assert back.scenario_id == s.scenario_id

    def test_version_field(self):
        s = sc.make_agnostic_scenario(10, 2, 0.5)
        doc = sc.scenario_to_dict(s)
        assert doc["version"] == "scenario_v1"

    def test_rejects_unknown_version(self):
        s = sc.make_agnostic_scenario(10, 2, 0.5)
        doc = sc.scenario_to_dict(s)
        doc["version"] = "scenario_v9"
        with pytest.raises(ParameterError):
            sc.scenario_from_dict(doc)

    def test_label_flip_option(self):
        s = sc.make_fair_noisy_scenario(4, 16, 0.5, 2.0, y_star=0)
        assert s.target.y_star == 0
        assert s.concept_class.hypotheses == ((1, 1), (1, 0))
        assert s.target.eta1 == pytest.approx(1.0 - s.target.eta_star)
