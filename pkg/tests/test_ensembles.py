import numpy as np
import pytest

from channels import make_channel
from core.errors import ParameterError, ShapeError
from core.field import COMPLEX, REAL
from core.types import MomentSource
from ensembles import (
    calibrate_instance,
    estimate_moments,
    fwht,
    generate_instance,
    make_ensemble,
    make_gaussian_product,
    make_partial_dft,
    make_subsampled_hadamard,
    normalize_spectrum,
    product_moments,
    spectrum,
)
from numerics import adjoint_defect, materialize


ORTHONORMAL = [
    ("haar_columns", REAL, 20, 40),
    ("haar_columns", COMPLEX, 20, 40),
    ("subsampled_hadamard", REAL, 20, 64),
    ("partial_dft", COMPLEX, 20, 50),
    ("subsampled_dct", REAL, 20, 50),
]


class TestOperators:

    @pytest.mark.parametrize("kind,field,n,m", ORTHONORMAL)
    def test_column_unitary(self, kind, field, n, m):
        """A^H A = I"""
        op = make_ensemble(kind, field, n, m, seed=3)
        gram = materialize(op.gram_operator())
        np.testing.assert_allclose(gram, np.eye(n), atol=1e-12)
        assert adjoint_defect(op.as_linear_operator()) < 1e-12
        assert (op.moments.mean_lambda, op.moments.mean_lambda_sq) == (1.0, 1.0)

    @pytest.mark.parametrize("kind,field,n,m", ORTHONORMAL)
    def test_block_apply_matches_columns(self, kind, field, n, m):
        op = make_ensemble(kind, field, n, m, seed=4)
        dense = op.dense()
        x = field.standard_normal(np.random.default_rng(0), n)
        np.testing.assert_allclose(op.apply(x), dense @ x, atol=1e-12)

    def test_fwht_is_involution_up_to_scale(self):
        a = np.random.default_rng(1).standard_normal((16, 3))
        np.testing.assert_allclose(fwht(fwht(a)), 16 * a, atol=1e-12)

    def test_structured_constraints(self):
        with pytest.raises(ShapeError):
            make_subsampled_hadamard(10, 48, seed=0)
        with pytest.raises(ParameterError):
            make_subsampled_hadamard(10, 64, seed=0, field=COMPLEX)
        with pytest.raises(ParameterError):
            make_partial_dft(10, 40, seed=0, field=REAL)
        with pytest.raises(ShapeError):
            make_ensemble("haar_columns", REAL, 40, 20, seed=0)
        with pytest.raises(ParameterError):
            make_ensemble("gaussian_product", REAL, 10, 20, seed=0)
        with pytest.raises(ParameterError):
            make_ensemble("toeplitz", REAL, 10, 20, seed=0)

    def test_rescaled(self):
        op = make_ensemble("gaussian_iid", REAL, 10, 30, seed=2)
        scaled = op.rescaled(2.0)
        x = np.ones(10)
        np.testing.assert_allclose(scaled.apply(x), 2.0 * op.apply(x))
        assert scaled.moments.mean_lambda == pytest.approx(4.0 * op.moments.mean_lambda)
        assert scaled.moments.mean_lambda_sq == pytest.approx(16.0 * op.moments.mean_lambda_sq)


class TestMoments:

    @pytest.mark.parametrize("field", [REAL, COMPLEX])
    def test_gaussian_empirical_close_to_analytic(self, field):
        """Marchenko-Pastur: <lambda> = alpha, <lambda^2> = alpha^2 + alpha"""
        op = make_ensemble("gaussian_iid", field, 300, 600, seed=5)
        emp = estimate_moments(op)
        assert emp.source is MomentSource.EMPIRICAL
        assert emp.mean_lambda == pytest.approx(2.0, rel=0.03)
        assert emp.mean_lambda_sq == pytest.approx(6.0, rel=0.05)
        assert op.moments.mean_lambda_sq == 6.0

    def test_spectrum_trace(self):
        op = make_ensemble("gaussian_iid", COMPLEX, 40, 60, seed=6)
        lam = spectrum(op)
        emp = estimate_moments(op)
        assert lam.shape == (40,)
        assert np.mean(lam) == pytest.approx(emp.mean_lambda, rel=1e-10)
        assert np.mean(lam ** 2) == pytest.approx(emp.mean_lambda_sq, rel=1e-10)

    def test_product_moments(self):
        n, m, p = 200, 400, 400
        op = make_gaussian_product(COMPLEX, n, m, p, seed=7)
        expected = product_moments(m / n, n, p)
        assert op.moments.mean_lambda == pytest.approx(expected.mean_lambda, rel=0.05)
        assert op.moments.mean_lambda_sq == pytest.approx(expected.mean_lambda_sq, rel=0.1)
        assert op.params["gamma"] == pytest.approx(1.0)

    def test_hutchinson_path(self):
        """无稠密矩阵的结构化算子走探针估计，正交列时结果精确"""
        op = make_ensemble("partial_dft", COMPLEX, 16, 32, seed=8)
        emp = estimate_moments(op, probes=4, seed=1)
        assert emp.mean_lambda == pytest.approx(1.0, rel=1e-12)
        assert emp.mean_lambda_sq == pytest.approx(1.0, rel=1e-12)


class TestInstance:

    def test_noiseless_observations(self, small_complex):
        inst = small_complex
        np.testing.assert_allclose(inst.y, np.abs(inst.phi.apply(inst.x_star)))
        assert inst.alpha == 2.0
        assert inst.meta["ensemble"] == "gaussian_iid"

    def test_reproducible(self, noiseless_real):
        a = generate_instance(REAL, 16, 40, "gaussian_iid", noiseless_real, 1.0, seed=9)
        b = generate_instance(REAL, 16, 40, "gaussian_iid", noiseless_real, 1.0, seed=9)
        c = generate_instance(REAL, 16, 40, "gaussian_iid", noiseless_real, 1.0, seed=10)
        np.testing.assert_array_equal(a.y, b.y)
        assert not np.allclose(a.y, c.y)

    def test_given_signal_and_operator(self, noiseless_real):
        op = make_ensemble("subsampled_dct", REAL, 8, 32, seed=1)
        x = np.arange(8.0)
        inst = generate_instance(REAL, 8, 32, op, noiseless_real, 1.0, seed=0, x_star=x)
        np.testing.assert_array_equal(inst.x_star, x)
        with pytest.raises(ParameterError):
            generate_instance(REAL, 8, 32, op, noiseless_real, 1.0, seed=0, x_star=np.ones(7))
        with pytest.raises(ParameterError):
            generate_instance(REAL, 9, 32, op, noiseless_real, 1.0, seed=0)

    def test_poisson_counts(self):
        channel = make_channel("poisson", COMPLEX, intensity=2.0)
        inst = generate_instance(COMPLEX, 30, 90, "gaussian_iid", channel, 1.0, seed=4)
        assert np.all(inst.y >= 0)
        np.testing.assert_array_equal(inst.y, np.round(inst.y))

    def test_normalize_and_calibrate(self, small_complex, noiseless_complex):
        normalized = normalize_spectrum(small_complex)
        assert estimate_moments(normalized.phi).mean_lambda == pytest.approx(normalized.alpha, rel=1e-12)
        calibrated = calibrate_instance(small_complex, noiseless_complex)
        expected = noiseless_complex.self_consistent_sigma2(calibrated.y)
        assert calibrated.sigma2 == pytest.approx(expected, rel=1e-12)
