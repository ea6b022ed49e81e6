"""The numpy fallback and the compiled kernels must agree bit for bit."""

import numpy as np
import pytest

from mtlimits import mc, scenarios
from mtlimits.errors import DomainError
from mtlimits.mc import backend, rng
from mtlimits.scenarios import fair_noisy_scenario_from_params

HAS_NUMBA = "numba" in backend.available_backends()

needs_numba = pytest.mark.skipif(not HAS_NUMBA, reason="numba not installed")


class TestRngPrimitives:
    def test_mix64_vector_matches_int(self):
        xs = np.random.default_rng(0).integers(0, 2**63, size=200, dtype=np.uint64)
        vec = rng.mix64(xs)
        for x, v in zip(xs.tolist(), vec.tolist()):
            assert rng.mix64_int(x) == v

    def test_stream_base_matches_int(self):
        for seed, salt in [(0, 0), (123456789, 3), (2**63, 8)]:
            vec = rng.stream_base(seed, salt, np.arange(50, dtype=np.uint64))
            for t in range(50):
                assert int(vec[t]) == rng.stream_base_int(seed, salt, t)

    def test_uniform_range(self):
        u = rng.stream_uniforms(99, 2, 5, 100000)
        assert u.min() >= 0.0 and u.max() < 1.0
        assert abs(u.mean() - 0.5) < 0.005

    def test_trial_stream_replays_batch(self):
        u = rng.stream_uniforms(7, rng.SALT_DATASET, 3, 20)
        s = rng.TrialStream(7, rng.SALT_DATASET, 3)
        assert all(s.uniform() == u[i] for i in range(20))


class TestBackendSelection:
    def test_env_override(self, monkeypatch):
        monkeypatch.setenv(backend.ENV_VAR, "numpy")
        assert backend.get_backend().BACKEND_NAME == "numpy"

    def test_explicit_name_beats_env(self, monkeypatch):
        monkeypatch.setenv(backend.ENV_VAR, "numpy")
        names = backend.available_backends()
        assert backend.get_backend(names[0]).BACKEND_NAME == names[0]

    def test_unknown_name_rejected(self):
        with pytest.raises(DomainError):
            backend.get_backend("cuda")

    @needs_numba
    def test_auto_prefers_numba(self, monkeypatch):
        monkeypatch.delenv(backend.ENV_VAR, raising=False)
        assert backend.get_backend().BACKEND_NAME == "numba"


@pytest.fixture(scope="module")
def scenario_zoo():
    return {
        "agnostic": scenarios.make_agnostic_scenario(23, 11, 0.1),
        "fair_noisy": scenarios.make_fair_noisy_scenario(3, 37, 0.4, 2.0),
        "background": scenarios.make_background_scenario(3, 4, 13, 9, 0.5),
    }


@needs_numba
class TestKernelEquality:
    """Every estimator, every family, both backends: identical RiskEstimate."""

    def pairs(self, fn, *args, **kwargs):
        a = fn(*args, **kwargs, backend="numpy")
        b = fn(*args, **kwargs, backend="numba")
        assert a == b

    @pytest.mark.parametrize("learner", [
        mc.LearnerSpec.per_task_erm(2),
        mc.LearnerSpec.pool(),
        mc.LearnerSpec.oracle(),
        mc.LearnerSpec.ibb(0.7, 0.03),
        mc.LearnerSpec.const_hstar(),
    ], ids=lambda spec: spec.kind)
    @pytest.mark.parametrize("family", ["agnostic", "fair_noisy", "background"])
    def test_risk(self, scenario_zoo, family, learner):
        self.pairs(mc.simulate_learner_risk, scenario_zoo[family], learner, 2500, 99)

    @pytest.mark.parametrize("family", ["agnostic", "fair_noisy"])
    def test_bayes(self, scenario_zoo, family):
        self.pairs(mc.simulate_bayes_test_error, scenario_zoo[family], 2500, 7)

    def test_kl(self, scenario_zoo):
        self.pairs(mc.estimate_mixture_kl_mc, scenario_zoo["fair_noisy"], 2500, 7)

    def test_construction(self):
        self.pairs(mc.estimate_construction_feasibility, 100, 2500, 7)

    def test_label_flipped_scenario(self):
        s = fair_noisy_scenario_from_params(3, 9, 0.5, 2.0, 0.2, 0.1, 0.5, y_star=0)
        self.pairs(mc.simulate_bayes_test_error, s, 2500, 3)
        self.pairs(mc.estimate_mixture_kl_mc, s, 2500, 3)
        self.pairs(mc.simulate_learner_risk, s, mc.LearnerSpec.pool(), 2500, 3)

    def test_threads_do_not_change_results(self, scenario_zoo):
        s = scenario_zoo["fair_noisy"]
        base = mc.simulate_bayes_test_error(s, 5000, 7, threads=1, backend="numba")
        for threads, name in [(4, "numba"), (3, "numpy")]:
            other = mc.simulate_bayes_test_error(s, 5000, 7, threads=threads, backend=name)
            assert other == base
