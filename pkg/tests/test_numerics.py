import numpy as np
import pytest

from core.errors import BracketError, ShapeError, ShiftSingularityError
from core.field import COMPLEX, REAL
from numerics import (
    LinearOperator,
    adjoint_defect,
    bisect_root,
    from_dense,
    hermitian_defect,
    materialize,
    power_dominant,
    quad_radial,
    shift_invert,
    top_eigenpair,
)


def _hermitian(dim: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    B = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (B + B.conj().T) / 2


class TestLinearOperator:

    def test_materialize_and_defects(self):
        rng = np.random.default_rng(0)
        M = rng.standard_normal((7, 5))
        op = from_dense(M)
        np.testing.assert_allclose(materialize(op), M)
        assert adjoint_defect(op) < 1e-12
        H = from_dense(_hermitian(6, 1))
        assert H.hermitian
        assert hermitian_defect(H) < 1e-12

    def test_rectangular_needs_adjoint(self):
        with pytest.raises(ShapeError):
            LinearOperator(dim_in=3, dim_out=4, matvec=lambda x: x)

    def test_shifted(self):
        M = _hermitian(5, 2)
        op = from_dense(M).shifted(0.5)
        np.testing.assert_allclose(materialize(op), M - 0.5 * np.eye(5), atol=1e-14)


class TestEigen:

    @pytest.mark.parametrize("dim", [10, 80])
    def test_top_eigenpair_matches_dense(self, dim):
        M = _hermitian(dim, 3)
        expected = np.linalg.eigvalsh(M)
        result = top_eigenpair(from_dense(M, hermitian=True))
        assert result.value == pytest.approx(expected[-1], abs=1e-7)
        low = top_eigenpair(from_dense(M, hermitian=True), which="SA")
        assert low.value == pytest.approx(expected[0], abs=1e-7)

    @pytest.mark.parametrize("dim", [12, 60])
    def test_power_dominant_largest_real_part(self, dim):
        """非 Hermitian: 实部最大"""
        rng = np.random.default_rng(4)
        D = np.diag(np.linspace(-3.0, 2.0, dim))
        D[-1, -1] = 5.0
        Q, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
        M = Q @ D @ np.linalg.inv(Q) + 1e-3 * np.triu(rng.standard_normal((dim, dim)), 1)
        result = power_dominant(from_dense(M, hermitian=False))
        expected = np.linalg.eigvals(M)
        assert result.real == pytest.approx(np.max(expected.real), abs=1e-6)

    @pytest.mark.parametrize("dim", [16, 64])
    def test_shift_invert_nearest(self, dim):
        M = _hermitian(dim, 5)
        values = np.linalg.eigvalsh(M)
        shift = values[dim // 2] + 1e-3
        result = shift_invert(from_dense(M, hermitian=True), shift)
        assert result.value == pytest.approx(values[dim // 2], abs=1e-7)

    def test_shift_on_eigenvalue_is_singular(self):
        M = np.diag(np.arange(1.0, 9.0))
        with pytest.raises(ShiftSingularityError):
            shift_invert(from_dense(M, hermitian=True), 3.0)

    def test_non_square_rejected(self):
        M = np.ones((3, 2))
        with pytest.raises(ShapeError):
            power_dominant(from_dense(M))


class TestQuadrature:

    @pytest.mark.parametrize("field", [REAL, COMPLEX])
    def test_gaussian_moments(self, field):
        """E|z|^2 = 1，E|z|^4 = 3 (实) / 2 (复)"""
        assert quad_radial(lambda r: r ** 2, field) == pytest.approx(1.0, rel=1e-10)
        fourth = 3.0 if field is REAL else 2.0
        assert quad_radial(lambda r: r ** 4, field) == pytest.approx(fourth, rel=1e-10)

    def test_scalar_only_function(self):
        value = quad_radial(lambda r: float(np.exp(-r * r)), COMPLEX)
        # E exp(-|z|^2) = 1/2
        assert value == pytest.approx(0.5, rel=1e-8)


class TestRoots:

    def test_bisect(self):
        assert bisect_root(lambda x: x ** 2 - 2.0, 0.0, 2.0) == pytest.approx(np.sqrt(2.0), abs=1e-10)

    def test_bracket_error(self):
        with pytest.raises(BracketError):
            bisect_root(lambda x: x ** 2 + 1.0, -1.0, 1.0)

    def test_bisect_tight_tolerance(self):
        """xtol 很小时由相对容差终止"""
        root = bisect_root(lambda x: x - 1234.5, 0.0, 5000.0, tol=1e-300)
        assert root == pytest.approx(1234.5, rel=1e-14)
