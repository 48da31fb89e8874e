import numpy as np
import pytest

from channels import (
    ChannelKind,
    Channel,
    bayes_identities,
    bessel_ratio,
    channel_stats,
    gaussian_intensity_channel,
    inverse_bessel_ratio,
    make_channel,
    threshold_integral,
)
from channels.generic import GenericChannel
from core.errors import ChannelDefinitionError, ParameterError
from core.field import COMPLEX, REAL
from core.rng import make_rng


class TestFactory:

    def test_kinds(self):
        assert make_channel("noiseless", REAL).kind is ChannelKind.NOISELESS
        assert make_channel("poisson", COMPLEX, intensity=2.0).kind is ChannelKind.POISSON
        assert make_channel("gaussian_intensity", REAL, noise=0.5).kind is ChannelKind.GENERIC

    def test_unknown_and_invalid(self):
        with pytest.raises(ChannelDefinitionError):
            make_channel("erasure", REAL)
        with pytest.raises(ParameterError):
            make_channel("poisson", REAL, intensity=0.0)

    def test_generic_normalization_check(self):
        """网格上不可归一化的密度被拒绝"""
        grid = np.linspace(0.0, 5.0, 101)
        with pytest.raises(ChannelDefinitionError):
            GenericChannel(REAL, lambda y, r: np.ones_like(y * r), grid)
        gaussian_intensity_channel(REAL, 0.5)


class TestNoiseless:

    def test_sample_is_modulus(self, noiseless_complex):
        z = np.array([3 + 4j, -1j, 0.0])
        np.testing.assert_allclose(noiseless_complex.sample(z, None), [5.0, 1.0, 0.0])
        scaled = noiseless_complex.with_input_scale(2.0)
        np.testing.assert_allclose(scaled.sample(z, None), [2.5, 0.5, 0.0])

    def test_log_partition_at_zero_omega(self, noiseless_complex):
        """omega=0 时 Z 为 |z| 的 Rayleigh 密度"""
        y = np.array([0.3, 1.0, 2.2])
        b = 0.8
        logz, mean, second = noiseless_complex.posterior_moments(y, np.zeros(3), b)
        np.testing.assert_allclose(logz, np.log(2 * y / b) - y ** 2 / b, rtol=1e-12)
        np.testing.assert_allclose(mean, 0.0)
        np.testing.assert_allclose(second, y ** 2)

    @pytest.mark.parametrize("field", [REAL, COMPLEX])
    def test_omega_for_mean_inverts_denoiser(self, field):
        channel = make_channel("noiseless", field)
        y = np.array([0.5, 1.0, 2.0, 3.0])
        target = field.cast(np.array([0.2, -0.7, 1.5, 0.1]))
        if field is COMPLEX:
            target = target * np.exp(1j * np.array([0.3, 1.2, -2.0, 2.9]))
        omega = channel.omega_for_mean(y, target, 0.6)
        _, mean, _ = channel.posterior_moments(y, omega, 0.6)
        np.testing.assert_allclose(mean, target, atol=1e-10)

    def test_bessel_ratio_inverse(self):
        s = np.array([0.0, 1e-6, 0.3, 0.9, 0.999])
        np.testing.assert_allclose(bessel_ratio(inverse_bessel_ratio(s)), s, atol=1e-12)

    @pytest.mark.parametrize("field", [REAL, COMPLEX])
    def test_threshold_integral_closed_form(self, field):
        """数值积分与闭式 2/beta 一致"""
        channel = make_channel("noiseless", field)
        numeric = threshold_integral(channel, 1.3, exact=False)
        assert numeric == pytest.approx(2.0 / field.beta, rel=1e-6)
        assert threshold_integral(channel, 1.3) == 2.0 / field.beta

    def test_dgout(self, noiseless_real):
        y = np.array([0.0, 1.0, 2.0])
        stats = channel_stats(noiseless_real, 2.0)
        np.testing.assert_allclose(stats.dgout(y), -1 / 2.0 + y ** 2 / 4.0)
        assert stats.identity_defect(y) == 0.0


class TestPoisson:

    @pytest.mark.parametrize("field", [REAL, COMPLEX])
    def test_partition_sums_to_one(self, field):
        """Z(k) 对 k 求和为 1"""
        channel = make_channel("poisson", field, intensity=1.0)
        k = np.arange(0, 80, dtype=float)
        logz, _, _ = channel.posterior_moments(k, np.full(k.shape, 0.5), 0.7)
        assert np.sum(np.exp(logz)) == pytest.approx(1.0, abs=1e-6)

    @pytest.mark.parametrize("field", [REAL, COMPLEX])
    def test_grid_posterior_matches_gamma(self, field):
        """omega=0 时 |z|^2 | k 服从 Gamma(k + beta/2, Lambda + beta/(2b))"""
        channel = make_channel("poisson", field, intensity=1.5)
        k = np.array([0.0, 1.0, 4.0, 10.0])
        b = 0.9
        _, mean, second = channel.posterior_moments(k, np.zeros(4), b)
        expected = (k + field.beta / 2) / (1.5 + field.beta / (2 * b))
        np.testing.assert_allclose(second, expected, rtol=1e-6)
        np.testing.assert_allclose(mean, 0.0, atol=1e-12)
        np.testing.assert_allclose(channel.posterior_second_moment(k, b), expected)

    def test_quadrature_second_moment_matches_closed_form(self, poisson_complex):
        k = np.array([0.0, 2.0, 5.0])
        quad = Channel.posterior_second_moment(poisson_complex, k, 1.3)
        np.testing.assert_allclose(quad, poisson_complex.posterior_second_moment(k, 1.3), rtol=1e-8)

    def test_self_consistent_sigma2(self, poisson_complex):
        y = np.array([0.0, 1.0, 3.0, 2.0, 0.0, 1.0])
        closed = poisson_complex.self_consistent_sigma2(y)
        assert closed == pytest.approx(np.mean(y))
        assert Channel.self_consistent_sigma2(poisson_complex, y) == pytest.approx(closed, rel=1e-10)

    def test_threshold_marginal_normalized(self, poisson_complex):
        kernels = poisson_complex.threshold_kernels(1.0)
        k = kernels.support.points()
        assert np.sum(kernels.D(k)) == pytest.approx(1.0, abs=1e-10)
        assert np.sum(kernels.N(k)) == pytest.approx(0.0, abs=1e-10)


class TestBayesIdentities:

    @pytest.mark.parametrize("field", [REAL, COMPLEX])
    @pytest.mark.parametrize("kind", ["noiseless", "poisson"])
    def test_identities_hold(self, field, kind):
        params = {"intensity": 1.0} if kind == "poisson" else {}
        channel = make_channel(kind, field, **params)
        rng = make_rng(5, 2, field.beta)
        z = field.standard_normal(rng, 10_000)
        y = channel.sample(z, rng)
        report = bayes_identities(channel, y, 1.0)
        assert report.passed, report.to_dict()
