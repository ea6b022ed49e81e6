import math

import numpy as np
import pytest

from mtlimits import discrete
from mtlimits.errors import DimensionError, DomainError

from _suites import (
    suite_fano_identity,
    suite_log_sum,
    suite_pinsker_bh,
)


class TestTotalVariation:
    def test_identical(self):
        assert discrete.tv_distance([0.3, 0.7], [0.3, 0.7]) == 0.0

    def test_disjoint(self):
        assert discrete.tv_distance([1.0, 0.0], [0.0, 1.0]) == 1.0

    def test_half(self):
        assert discrete.tv_distance([0.75, 0.25], [0.25, 0.75]) == pytest.approx(0.5, abs=1e-15)

    def test_symmetry(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            p = rng.dirichlet(np.ones(6))
            q = rng.dirichlet(np.ones(6))
            assert discrete.tv_distance(p, q) == discrete.tv_distance(q, p)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            discrete.tv_distance([0.5, 0.5], [1.0, 0.0, 0.0])


class TestKL:
    def test_zero_on_equal(self):
        assert discrete.kl_divergence([0.4, 0.6], [0.4, 0.6]) == 0.0

    def test_point_mass_vs_uniform(self):
        assert discrete.kl_divergence([1.0, 0.0], [0.5, 0.5]) == pytest.approx(math.log(2), abs=1e-12)

    def test_infinite_when_q_vanishes(self):
        assert discrete.kl_divergence([0.5, 0.5], [1.0, 0.0]) == math.inf

    def test_nonnegative_and_zero_iff_tv_zero(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            p = rng.dirichlet(np.ones(8))
            q = rng.dirichlet(np.ones(8))
            kl = discrete.kl_divergence(p, q)
            assert kl >= 0
            tv = discrete.tv_distance(p, q)
            assert (kl < 1e-12) == (tv < 1e-12)


class TestBayesAndFano:
    def test_indistinguishable(self):
        assert discrete.bayes_error_binary([0.5, 0.5], [0.5, 0.5]) == 0.5

    def test_disjoint(self):
        assert discrete.bayes_error_binary([1.0, 0.0], [0.0, 1.0]) == 0.0

    def test_tv_half(self):
        assert discrete.bayes_error_binary([0.75, 0.25], [0.25, 0.75]) == pytest.approx(0.25)

    def test_fano_kl_zero(self):
        assert discrete.fano_bound(0.0, "pinsker") == 0.5
        assert discrete.fano_bound(0.0, "bretagnolle_huber") == 0.5

    def test_fano_values(self):
        assert discrete.fano_bound(0.5, "pinsker") == pytest.approx(0.25, abs=1e-12)
        assert discrete.fano_bound(0.5, "bretagnolle_huber") == pytest.approx(0.186364, abs=1e-6)
        assert discrete.fano_bound(2.0, "pinsker") == 0.0
        assert discrete.fano_bound(2.0, "bretagnolle_huber") == pytest.approx(0.035063, abs=1e-6)

    def test_fano_infinite_kl(self):
        assert discrete.fano_bound(math.inf, "pinsker") == 0.0
        assert discrete.fano_bound(math.inf, "bretagnolle_huber") == 0.0

    def test_fano_negative_kl_rejected(self):
        with pytest.raises(DomainError):
            discrete.fano_bound(-0.1)


class TestLogSum:
    def test_equal_vectors(self):
        assert discrete.log_sum_lhs_rhs([1.0, 2.0], [1.0, 2.0]) == (0.0, 0.0)

    def test_proportional_forces_equality(self):
        lhs, rhs = discrete.log_sum_lhs_rhs([1.0, 1.0], [2.0, 2.0])
        assert lhs == pytest.approx(2 * math.log(0.5), abs=1e-12)
        assert rhs == pytest.approx(lhs, abs=1e-12)

    def test_strict_case(self):
        lhs, rhs = discrete.log_sum_lhs_rhs([1.0, 2.0], [2.0, 1.0])
        assert lhs == pytest.approx(math.log(0.5) + 2 * math.log(2), abs=1e-12)
        assert rhs == pytest.approx(0.0, abs=1e-12)
        assert lhs > rhs

    def test_rejects_nonpositive(self):
        with pytest.raises(DomainError):
            discrete.log_sum_lhs_rhs([1.0, 0.0], [1.0, 1.0])


class TestBinomialBackbone:
    def test_sf_trivial(self):
        assert discrete.binom_sf(1, 0.5, 1) == pytest.approx(0.5, abs=1e-15)
        assert discrete.binom_sf(7, 0.3, 0) == 1.0

    def test_sf_enumerated(self):
        # P(Bin(4, 1/2) >= 2) = 11/16 by enumerating the 16 outcomes
        assert discrete.binom_sf(4, 0.5, 2) == pytest.approx(11 / 16, abs=1e-14)

    def test_sf_monotone_in_k_and_p(self):
        for p in (0.2, 0.5, 0.8):
            vals = [discrete.binom_sf(30, p, k) for k in range(31)]
            assert all(a >= b - 1e-15 for a, b in zip(vals, vals[1:]))
        for k in (3, 10, 17):
            vals = [discrete.binom_sf(20, p, k) for p in np.linspace(0.05, 0.95, 10)]
            assert all(b >= a - 1e-15 for a, b in zip(vals, vals[1:]))

    def test_pmf_normalization(self):
        for n in (1, 17, 256, 2000):
            total = discrete.binom_pmf_vector(n, 0.37).sum()
            assert total == pytest.approx(1.0, abs=1e-10)

    def test_pmf_degenerate_p(self):
        assert discrete.binom_log_pmf(5, 0.0, 0) == 0.0
        assert discrete.binom_log_pmf(5, 1.0, 5) == 0.0
        assert discrete.binom_log_pmf(5, 0.0, 3) == -math.inf

    def test_conv_sf_trivial(self):
        assert discrete.binom_conv_sf(1, 1.0, 1, 1.0, 2) == 1.0
        assert discrete.binom_conv_sf(3, 0.2, 5, 0.9, 0) == 1.0

    def test_conv_sf_enumerated(self):
        # two fair coins, P(sum >= 2) = 1/4
        assert discrete.binom_conv_sf(1, 0.5, 1, 0.5, 2) == pytest.approx(0.25, abs=1e-14)

    def test_conv_sf_degenerate_second(self):
        for k in range(6):
            assert discrete.binom_conv_sf(5, 0.3, 0, 0.5, k) == pytest.approx(
                discrete.binom_sf(5, 0.3, k), abs=1e-13)

    def test_conv_sf_against_enumeration(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            n1, n2 = int(rng.integers(1, 7)), int(rng.integers(1, 7))
            p1, p2 = rng.uniform(0.1, 0.9, 2)
            pa = discrete.binom_pmf_vector(n1, p1)
            pb = discrete.binom_pmf_vector(n2, p2)
            joint = np.outer(pa, pb)
            for k in range(n1 + n2 + 1):
                exact = sum(joint[a, b] for a in range(n1 + 1) for b in range(n2 + 1) if a + b >= k)
                assert discrete.binom_conv_sf(n1, p1, n2, p2, k) == pytest.approx(exact, abs=1e-12)

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            discrete.binom_sf(5, 1.2, 1)
        with pytest.raises(DomainError):
            discrete.binom_sf(5, 0.5, 6)
        with pytest.raises(DomainError):
            discrete.binom_log_pmf(5, 0.5, -1)


class TestRandomizedSuites:
    def test_pinsker_and_bretagnolle_huber(self):
        assert suite_pinsker_bh(1000) == 0

    def test_log_sum_suite(self):
        assert suite_log_sum(1000) == 0

    def test_fano_identity_exhaustive(self):
        assert suite_fano_identity(200, max_support=12) == 0


class TestFiniteDist:
    def test_valid(self):
        d = discrete.FiniteDist(np.array([0.25, 0.75]))
        assert d.size == 2

    def test_rejects_negative(self):
        with pytest.raises(DomainError):
            discrete.FiniteDist(np.array([-0.1, 1.1]))

    def test_rejects_unnormalized(self):
        with pytest.raises(DomainError):
            discrete.FiniteDist(np.array([0.5, 0.6]))

    def test_usable_in_ops(self):
        p = discrete.FiniteDist(np.array([1.0, 0.0]))
        q = discrete.FiniteDist(np.array([0.5, 0.5]))
        assert discrete.kl_divergence(p, q) == pytest.approx(math.log(2))
