from dataclasses import replace

import numpy as np
import pytest

from channels import make_channel
from core.errors import DegenerateLiftError, ParameterError, PoleError
from core.field import COMPLEX, REAL
from core.types import EstimateSource, Instance, SpectralMoments
from ensembles import DenseSensing, EnsembleKind, generate_instance
from numerics import hermitian_defect, materialize
from spectral import (
    build_MLAMP,
    build_MT,
    build_MTAP,
    estimate_lamp,
    estimate_mm,
    estimate_tap,
    make_custom,
    make_t_mm,
    make_t_star,
    run_estimator,
    verify_constant_weight,
    verify_correspondence,
)
from spectral.preprocessing import _mobius


def _probes(n: int, k: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k))


class TestPreprocessing:

    def test_t_star_noiseless_closed_form(self, small_complex, noiseless_complex):
        """无噪声 T* = 1/sigma2 - 1/y^2，截断到 [-20/sigma2, 1/sigma2]"""
        prep = make_t_star(small_complex, noiseless_complex)
        s2 = small_complex.sigma2
        expected = np.maximum(1.0 / s2 - 1.0 / small_complex.y ** 2, -20.0 / s2)
        np.testing.assert_allclose(prep.weights, expected, rtol=1e-10, atol=1e-12)
        assert np.all(prep.weights < 1.0 / s2)
        assert prep.clamp_count == int(np.sum(small_complex.y ** 2 < s2 / 21.0))

    def test_exact_pole(self):
        with pytest.raises(PoleError):
            _mobius(np.array([0.5, -1.0]), 1.0, 1.0, -20.0, 1.0)

    def test_near_pole_substitutes_bound(self):
        weights, _, _, poles = _mobius(np.array([-1.0 + 1e-14, 2.0]), 1.0, 1.0, -20.0, 1.0)
        assert poles == 1
        assert weights[0] == -20.0

    @pytest.mark.parametrize("field,n,m", [(COMPLEX, 30, 30), (REAL, 30, 15)])
    def test_t_mm_equals_t_star_at_half_beta(self, field, n, m):
        """alpha = beta/2 时 T_MM 与 T* 逐点相同"""
        channel = make_channel("noiseless", field)
        inst = generate_instance(field, n, m, "gaussian_iid", channel, 1.0, seed=3)
        np.testing.assert_allclose(
            make_t_mm(inst, channel).weights, make_t_star(inst, channel).weights, atol=1e-12
        )

    def test_custom_length_checked(self, small_real):
        with pytest.raises(ParameterError):
            make_custom(small_real, lambda y: y[:-1])


class TestOperators:

    def test_dense_toy(self):
        A = np.array([[1.0, 2.0, 0.0], [0.5, -1.0, 3.0]])
        op = DenseSensing(A, REAL, EnsembleKind.GAUSSIAN)
        inst = Instance(field=REAL, n=3, m=2, rho=1.0, phi=op, y=np.ones(2),
                        moments=SpectralMoments(1.0, 1.0))
        prep = make_custom(inst, lambda y: np.array([2.0, -1.0]))
        M = materialize(build_MT(inst, prep).op)
        np.testing.assert_allclose(M, A.T @ np.diag([2.0, -1.0]) @ A, atol=1e-14)

    def test_identity_weights_haar(self, noiseless_complex):
        inst = generate_instance(COMPLEX, 16, 40, "haar_columns", noiseless_complex, 1.0, seed=1)
        prep = make_custom(inst, lambda y: np.ones_like(y))
        np.testing.assert_allclose(materialize(build_MT(inst, prep).op), np.eye(16), atol=1e-12)
        zero = make_custom(inst, lambda y: np.zeros_like(y))
        np.testing.assert_allclose(materialize(build_MT(inst, zero).op), 0.0)

    def test_non_finite_weights_rejected(self, small_real):
        prep = make_custom(small_real, lambda y: np.full_like(y, np.nan))
        with pytest.raises(ParameterError):
            build_MT(small_real, prep)

    def test_shift_identity(self, poisson_complex):
        """M_TAP = M(T*) - I/rho"""
        inst = generate_instance(COMPLEX, 24, 72, "gaussian_iid", poisson_complex, 1.3, seed=2)
        prep = make_t_star(inst, poisson_complex)
        tap = build_MTAP(inst, poisson_complex, prep)
        mt = build_MT(inst, prep)
        X = _probes(24, 50, 0)
        np.testing.assert_allclose(tap.matvec(X), mt.matvec(X) - X / 1.3, atol=1e-12)

    def test_hermitian_probe(self, small_complex, noiseless_complex):
        assert hermitian_defect(build_MTAP(small_complex, noiseless_complex).op) < 1e-12
        lamp = build_MLAMP(small_complex, noiseless_complex)
        assert not lamp.hermitian
        assert hermitian_defect(lamp.op) > 1e-6

    def test_mlamp_dense_oracle(self, noiseless_complex):
        inst = generate_instance(COMPLEX, 32, 64, "haar_columns", noiseless_complex, 1.0, seed=4)
        lamp = build_MLAMP(inst, noiseless_complex)
        A = inst.phi.dense()
        s2 = inst.sigma2
        dg = -1.0 / s2 + inst.y ** 2 / s2 ** 2
        expected = s2 * (inst.alpha * A @ A.conj().T - np.eye(64)) @ np.diag(dg)
        np.testing.assert_allclose(materialize(lamp.op), expected, atol=1e-10)

    def test_scale_absorption(self, small_complex, noiseless_complex):
        """Phi <- c Phi 且信道输入同比缩放时估计不变"""
        c = 1.7
        scaled = small_complex.with_phi(small_complex.phi.rescaled(c))
        assert scaled.moments.mean_lambda == pytest.approx(c ** 2 * small_complex.moments.mean_lambda)
        assert scaled.sigma2 == pytest.approx(c ** 2 * small_complex.sigma2)
        channel = noiseless_complex.with_input_scale(c)
        np.testing.assert_allclose(
            make_t_star(scaled, channel).weights * c ** 2,
            make_t_star(small_complex, noiseless_complex).weights, rtol=1e-10,
        )
        q0 = estimate_tap(small_complex, noiseless_complex).overlap
        q1 = estimate_tap(scaled, channel).overlap
        assert q1 == pytest.approx(q0, abs=1e-8)


class TestEstimators:

    def test_tap_recovers_above_threshold(self, noiseless_complex):
        inst = generate_instance(COMPLEX, 400, 1200, "gaussian_iid", noiseless_complex, 1.0, seed=21)
        est = estimate_tap(inst, noiseless_complex)
        assert est.source is EstimateSource.TAP_TOP
        assert est.overlap > 0.5
        assert np.linalg.norm(est.x_hat) ** 2 == pytest.approx(400.0)
        assert est.meta["residual"] < 1e-8

    def test_tap_below_threshold(self, noiseless_complex):
        inst = generate_instance(COMPLEX, 400, 200, "gaussian_iid", noiseless_complex, 1.0, seed=22)
        assert estimate_tap(inst, noiseless_complex).overlap < 0.1

    def test_degenerate_observations(self, small_complex, noiseless_complex):
        """y = sigma 处 dg = 0：TAP 与 MM 退化为随机向量，LAMP 提升失败"""
        inst = replace(small_complex, y=np.ones(small_complex.m))
        assert inst.sigma2 == 1.0
        est = estimate_tap(inst, noiseless_complex)
        assert est.eigenvalue == -1.0
        assert est.meta["path"] == "degenerate"
        assert estimate_mm(inst, noiseless_complex).meta["path"] == "degenerate"
        with pytest.raises(DegenerateLiftError):
            estimate_lamp(inst, noiseless_complex)

    def test_lamp_and_mm_run(self, noiseless_complex):
        inst = generate_instance(COMPLEX, 60, 180, "gaussian_iid", noiseless_complex, 1.0, seed=23)
        top = estimate_lamp(inst, noiseless_complex, "top")
        bulk = estimate_lamp(inst, noiseless_complex, "bulk_unit")
        mm = estimate_mm(inst, noiseless_complex)
        assert top.source is EstimateSource.LAMP_TOP
        assert bulk.source is EstimateSource.LAMP_BULK
        assert "reliable" in bulk.meta
        for est in (top, bulk, mm):
            assert 0.0 <= est.overlap <= 1.0
            assert np.linalg.norm(est.x_hat) ** 2 == pytest.approx(60.0)

    def test_lamp_real_field_gives_real_estimate(self, noiseless_real):
        inst = generate_instance(REAL, 40, 120, "gaussian_iid", noiseless_real, 1.0, seed=24)
        est = estimate_lamp(inst, noiseless_real, "top")
        assert not np.iscomplexobj(est.x_hat)

    def test_run_estimator(self, small_complex, noiseless_complex):
        est = run_estimator("mm", small_complex, noiseless_complex)
        assert est.source is EstimateSource.MM
        with pytest.raises(ParameterError):
            run_estimator("svd", small_complex, noiseless_complex)
        with pytest.raises(ParameterError):
            estimate_lamp(small_complex, noiseless_complex, which="middle")

    @pytest.mark.slow
    def test_transition_properties(self, noiseless_complex):
        """alpha=3: bulk-unit 与 TAP 估计接近，MM 不优于 TAP"""
        inst = generate_instance(COMPLEX, 1024, 3072, "gaussian_iid", noiseless_complex, 1.0, seed=25)
        tap = estimate_tap(inst, noiseless_complex)
        bulk = estimate_lamp(inst, noiseless_complex, "bulk_unit")
        top = estimate_lamp(inst, noiseless_complex, "top")
        mm = estimate_mm(inst, noiseless_complex)
        assert tap.overlap > 0.6
        assert bulk.overlap == pytest.approx(tap.overlap, abs=0.05)
        assert 0.0 <= top.overlap <= 1.0
        assert mm.overlap <= tap.overlap + 0.03

    @pytest.mark.slow
    def test_transition_monotone_in_alpha(self, noiseless_complex):
        """TAP 重叠度中位数随 alpha 不减，并在 0.8 与 1.2 之间越过 0.1"""
        alphas = [0.6, 0.8, 1.2, 2.0, 3.0]
        medians = []
        for i, alpha in enumerate(alphas):
            overlaps = [
                estimate_tap(
                    generate_instance(COMPLEX, 1024, int(alpha * 1024), "gaussian_iid",
                                      noiseless_complex, 1.0, seed=100 * i + s),
                    noiseless_complex,
                ).overlap
                for s in range(5)
            ]
            medians.append(float(np.median(overlaps)))
        # 阈值下方两点的重叠度均为 O(1/n) 噪声水平
        assert all(b >= a - 0.02 for a, b in zip(medians, medians[1:])), medians
        assert medians[2] < medians[3] < medians[4], medians
        assert medians[1] < 0.1 <= medians[2], medians


class TestCorrespondence:

    @pytest.mark.parametrize("kind", ["noiseless", "poisson"])
    def test_eigenpair_correspondence(self, kind):
        params = {"intensity": 1.0} if kind == "poisson" else {}
        channel = make_channel(kind, COMPLEX, **params)
        inst = generate_instance(COMPLEX, 30, 60, "gaussian_iid", channel, 1.0, seed=0)
        report = verify_correspondence(inst, channel)
        assert report.passed, report.failures
        assert report.convention == "1/n"
        assert report.lamp_checked > 0 and report.tap_checked > 0

    def test_null_eigenvalue_case(self, noiseless_complex):
        """无噪声时 M_TAP = (B/rho) - C 随 rho 必有特征值穿过零，此处 M_LAMP u = u"""
        inst = generate_instance(COMPLEX, 30, 60, "gaussian_iid", noiseless_complex, 1.0, seed=0)
        report = verify_correspondence(inst, noiseless_complex)
        assert report.passed, report.failures
        assert report.null_found
        assert report.null_rho > 0
        assert abs(report.near_null_eigenvalue) < 1e-6
        assert np.isfinite(report.near_null_residual)
        # 原始残差直接满足 1e-8 |x| 界
        assert report.residual_one_over_n < 1e-8
        assert report.residual_one_over_m > report.residual_one_over_n

    def test_dense_limit(self, noiseless_complex):
        inst = generate_instance(COMPLEX, 40, 80, "gaussian_iid", noiseless_complex, 1.0, seed=0)
        with pytest.raises(ParameterError):
            verify_correspondence(inst, noiseless_complex)

    def test_constant_weight_affine_map(self, small_complex):
        assert verify_constant_weight(small_complex, 0.7).passed
        assert verify_constant_weight(small_complex, -0.3).passed
        with pytest.raises(ParameterError):
            verify_constant_weight(small_complex, 0.0)
