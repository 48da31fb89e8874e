import numpy as np
import pytest

from channels import make_channel
from core.errors import DivergenceError, ParameterError
from core.field import COMPLEX, REAL
from core.types import EstimateSource
from ensembles import calibrate_instance, generate_instance
from vamp import (
    channel_denoiser,
    initial_state,
    linear_estimator,
    linearization_oracle,
    predicted_operator,
    prior_denoiser,
    trivial_state,
    vamp_iterate,
    vamp_run,
)


class TestDenoisers:

    def test_prior_denoiser(self):
        T = np.array([1.0, -2.0])
        mean, var = prior_denoiser(T, 1.0, 2.0)
        np.testing.assert_allclose(mean, T / 1.5)
        assert var == pytest.approx(1.0 / 1.5)
        with pytest.raises(DivergenceError):
            prior_denoiser(T, -1.0, 1.0)

    def test_channel_denoiser_at_zero_field(self, calibrated_complex, noiseless_complex):
        """R=0 时后验均值为零，平均方差为 mean(y^2)"""
        inst = calibrated_complex
        mean, c, _ = channel_denoiser(inst, noiseless_complex, np.zeros(inst.m, dtype=complex), 1.0 / inst.sigma2)
        np.testing.assert_allclose(mean, 0.0, atol=1e-12)
        assert c == pytest.approx(np.mean(inst.y ** 2), rel=1e-10)
        with pytest.raises(DivergenceError):
            channel_denoiser(inst, noiseless_complex, np.zeros(inst.m), 0.0)

    def test_linear_estimator_zero_tau(self, small_real):
        """tau=0: x = T/gamma + A^H R / gamma"""
        rng = np.random.default_rng(0)
        T = rng.standard_normal(small_real.n)
        R = rng.standard_normal(small_real.m)
        x, _, _ = linear_estimator(small_real, T, R, 2.0, 0.0)
        np.testing.assert_allclose(x, (T + small_real.phi.adjoint(R)) / 2.0, atol=1e-10)
        with pytest.raises(DivergenceError):
            linear_estimator(small_real, T, R, 0.0, 0.0)


class TestIteration:

    def test_trivial_state_is_fixed_point(self, calibrated_complex, noiseless_complex):
        inst = calibrated_complex
        start = trivial_state(inst)
        after = vamp_iterate(inst, noiseless_complex, start, damping=1.0)
        for key, value in start.scalars().items():
            assert after.scalars()[key] == pytest.approx(value, rel=1e-8, abs=1e-10)
        np.testing.assert_allclose(after.R1, 0.0, atol=1e-12)
        np.testing.assert_allclose(after.T1, 0.0, atol=1e-12)
        assert after.iter == 1

    def test_invalid_damping(self, calibrated_complex, noiseless_complex):
        with pytest.raises(ParameterError):
            vamp_iterate(calibrated_complex, noiseless_complex, trivial_state(calibrated_complex), damping=0.0)

    def test_initial_modes(self, small_complex):
        with pytest.raises(ParameterError):
            initial_state(small_complex, "warm")
        with pytest.raises(ParameterError):
            initial_state(small_complex, "from_estimate")
        with pytest.raises(ParameterError):
            initial_state(small_complex, "from_estimate", x0=np.ones(3))
        state = initial_state(small_complex, "from_estimate", x0=small_complex.x_star)
        np.testing.assert_allclose(state.x_hat1, small_complex.x_star)
        perturbed = initial_state(small_complex, "trivial_perturbed", seed=1)
        assert np.all(perturbed.T1 == 0) and np.any(perturbed.R1 != 0)

    def test_run_records_trajectory(self, noiseless_complex):
        inst = calibrate_instance(
            generate_instance(COMPLEX, 40, 120, "gaussian_iid", noiseless_complex, 1.0, seed=3), noiseless_complex
        )
        estimate, trajectory = vamp_run(inst, noiseless_complex, max_iter=3, tol=0.0)
        assert estimate.source is EstimateSource.VAMP
        assert estimate.meta["iterations"] == 3
        assert not estimate.meta["converged"]
        assert len(trajectory) == 4
        assert [row["iter"] for row in trajectory] == [0, 1, 2, 3]
        assert set(trajectory[0]) >= {"overlap", "mse", "gamma1", "tau1", "damping", "bayes_gap"}

    def test_divergence_carries_trajectory(self, small_complex, noiseless_complex, monkeypatch):
        import vamp.gvamp as gvamp

        def broken(*args, **kwargs):
            raise DivergenceError("先验侧精度非正")

        monkeypatch.setattr(gvamp, "vamp_iterate", broken)
        with pytest.raises(DivergenceError) as info:
            gvamp.vamp_run(small_complex, noiseless_complex, max_iter=2)
        assert len(info.value.trajectory) == 1


class TestLinearization:

    @pytest.mark.parametrize("field", [REAL, COMPLEX])
    def test_jacobian_matches_mlamp(self, field):
        """平凡点处一轮 G-VAMP 的 Jacobian 等于 M_LAMP"""
        channel = make_channel("noiseless", field)
        inst = generate_instance(field, 24, 48, "gaussian_iid", channel, 1.0, seed=2)
        report = linearization_oracle(inst, channel)
        assert report.passed, report.to_dict()
        assert report.relative_error_mlamp < 1e-4

    def test_poisson_channel(self, poisson_complex):
        inst = generate_instance(COMPLEX, 24, 48, "gaussian_iid", poisson_complex, 1.0, seed=2)
        assert linearization_oracle(inst, poisson_complex).passed

    def test_predicted_operator_shape(self, small_complex, noiseless_complex):
        assert predicted_operator(small_complex, noiseless_complex).shape == (48, 48)

    def test_size_limit(self, noiseless_complex):
        inst = generate_instance(COMPLEX, 80, 160, "gaussian_iid", noiseless_complex, 1.0, seed=0)
        with pytest.raises(ParameterError):
            linearization_oracle(inst, noiseless_complex)
