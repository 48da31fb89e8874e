import numpy as np
import pytest

from core import (
    COMPLEX,
    REAL,
    FieldTag,
    Instance,
    ParameterError,
    ShapeError,
    SpectralMoments,
    UndefinedMetricError,
    generate_signal,
    make_rng,
    overlap_and_mse,
    realify,
    realify_matrix,
    task_seed,
    unrealify,
)


class TestField:

    def test_invalid_beta(self):
        """beta 只能为 1 或 2"""
        with pytest.raises(ParameterError):
            FieldTag(3)

    def test_standard_normal_unit_variance(self):
        rng = make_rng(0)
        for field in (REAL, COMPLEX):
            z = field.standard_normal(rng, 200_000)
            assert np.mean(np.abs(z) ** 2) == pytest.approx(1.0, abs=0.02)
        assert np.iscomplexobj(COMPLEX.standard_normal(rng, 3))

    def test_real_cast_rejects_complex(self):
        with pytest.raises(ParameterError):
            REAL.cast(np.array([1.0 + 1.0j]))
        assert REAL.cast(np.array([1.0 + 0.0j])).dtype == np.float64

    def test_realify_roundtrip_and_matrix(self):
        """实化矩阵与实化向量相容"""
        rng = np.random.default_rng(1)
        M = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        x = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        np.testing.assert_allclose(realify_matrix(M) @ realify(x), realify(M @ x), atol=1e-12)
        np.testing.assert_allclose(unrealify(realify(x), 2), x)


class TestRng:

    def test_streams_are_independent_and_reproducible(self):
        a = make_rng(7, 0).standard_normal(5)
        b = make_rng(7, 0).standard_normal(5)
        c = make_rng(7, 1).standard_normal(5)
        np.testing.assert_array_equal(a, b)
        assert not np.allclose(a, c)

    def test_task_seed_depends_on_indices(self):
        assert task_seed(3, 0, 1) == task_seed(3, 0, 1)
        assert task_seed(3, 0, 1) != task_seed(3, 1, 0)


class TestSignal:

    def test_variance_rho(self):
        x = generate_signal(COMPLEX, 100_000, 2.5, seed=0)
        assert np.mean(np.abs(x) ** 2) == pytest.approx(2.5, rel=0.02)
        assert np.var(x.real) == pytest.approx(1.25, rel=0.03)

    def test_invalid_args(self):
        with pytest.raises(ParameterError):
            generate_signal(REAL, 0, 1.0, seed=0)
        with pytest.raises(ParameterError):
            generate_signal(REAL, 4, 0.0, seed=0)


class TestMetrics:

    def test_phase_invariance(self):
        """全局相位不影响 q 与 mse"""
        x = generate_signal(COMPLEX, 50, 1.0, seed=2)
        q, mse = overlap_and_mse(np.exp(0.7j) * x, x)
        assert q == pytest.approx(1.0)
        assert mse == pytest.approx(0.0, abs=1e-24)

    def test_sign_invariance_real(self):
        x = generate_signal(REAL, 50, 1.0, seed=3)
        q, mse = overlap_and_mse(-x, x)
        assert q == pytest.approx(1.0)
        assert mse == pytest.approx(0.0, abs=1e-24)

    def test_orthogonal_and_zero_estimate(self):
        x = np.array([1.0, 0.0])
        q, mse = overlap_and_mse(np.array([0.0, 1.0]), x)
        assert q == 0.0
        assert mse == pytest.approx(1.0)
        q, mse = overlap_and_mse(np.zeros(2), x)
        assert (q, mse) == (0.0, 0.5)

    def test_errors(self):
        with pytest.raises(UndefinedMetricError):
            overlap_and_mse(np.ones(3), np.zeros(3))
        with pytest.raises(ShapeError):
            overlap_and_mse(np.ones(3), np.ones(4))


class TestTypes:

    def test_moments_jensen(self):
        with pytest.raises(ParameterError):
            SpectralMoments(2.0, 3.0)
        with pytest.raises(ParameterError):
            SpectralMoments(-1.0, 3.0)
        SpectralMoments(2.0, 4.0)

    def test_instance_validation_and_sigma2(self):
        moments = SpectralMoments(2.0, 6.0)
        inst = Instance(field=REAL, n=10, m=20, rho=1.5, phi=None, y=np.zeros(20), moments=moments)
        assert inst.alpha == 2.0
        assert inst.sigma2 == pytest.approx(1.5 * 2.0 / 2.0)
        with pytest.raises(ParameterError):
            Instance(field=REAL, n=10, m=20, rho=1.0, phi=None, y=np.zeros(19), moments=moments)
        with pytest.raises(ParameterError):
            Instance(field=REAL, n=10, m=20, rho=0.0, phi=None, y=np.zeros(20), moments=moments)
