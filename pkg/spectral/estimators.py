"""
谱估计器
- estimate_tap:  M_TAP 的代数最大特征向量
- estimate_lamp: M_LAMP 的主特征向量（top）或特征值 1 附近的特征向量（bulk_unit），经 A^H(sigma2 dg * u) 提升
- estimate_mm:   M(T_MM) 的代数最大特征向量
输出统一缩放到 |x_hat|^2 = n rho
"""
from typing import Optional

import numpy as np
import scipy.linalg as sla

from config import get_eig_config, get_logger, get_spectral_config
from core.errors import DegenerateLiftError, ParameterError, ShiftSingularityError
from core.metrics import normalize_to, overlap_and_mse
from core.rng import make_rng, STREAM_SOLVER
from core.types import Estimate, EstimateSource, Instance
from numerics.eigen import power_dominant, residual_norm, shift_invert, top_eigenpair
from numerics.linop import materialize
from .operators import SpectralOperator, build_MLAMP, build_MT, build_MTAP
from .preprocessing import make_t_mm

logger = get_logger(__name__)

# 稠密分解之外、shift-invert 路径的维度上限
SHIFT_INVERT_MAX_N = 8192


def _finalize(instance: Instance, vector: np.ndarray, source: EstimateSource,
              eigenvalue: complex, meta: dict) -> Estimate:
    x_hat = normalize_to(instance.field.cast(vector), instance.n, instance.rho)
    estimate = Estimate(x_hat=x_hat, source=source, eigenvalue=eigenvalue, meta=meta)
    if instance.x_star is not None:
        estimate.overlap, estimate.mse = overlap_and_mse(x_hat, instance.x_star)
    return estimate


def _fallback_vector(instance: Instance, seed: int) -> np.ndarray:
    rng = make_rng(seed, STREAM_SOLVER)
    return instance.field.standard_normal(rng, instance.n)


def _top_hermitian(spectral: SpectralOperator, seed: int):
    """
    代数最大特征对，返回 (value, vector, residual, path)
    n <= dense_eig_max: 稠密 eigh；n <= 8192: 0 处 shift-invert；更大: Lanczos
    """
    op = spectral.op
    n = op.dim_in
    if n <= get_eig_config().dense_eig_max:
        M = materialize(op)
        M = 0.5 * (M + M.conj().T)
        values, vectors = sla.eigh(M, subset_by_index=[n - 1, n - 1])
        vector = vectors[:, 0]
        return float(values[0]), vector, residual_norm(op, values[0], vector), "dense"
    if spectral.name.value == "M_TAP" and n <= SHIFT_INVERT_MAX_N:
        try:
            result = shift_invert(op, 0.0, seed=seed)
        except ShiftSingularityError:
            result = shift_invert(op, 1e-6, seed=seed)
        return result.real, result.vector, result.residual, "shift_invert"
    result = top_eigenpair(op, which="LA", seed=seed)
    return result.real, result.vector, result.residual, "lanczos"


def estimate_tap(instance: Instance, channel, seed: int = 0) -> Estimate:
    """M_TAP 谱估计；T* 截断计数记录在 meta 中"""
    spectral = build_MTAP(instance, channel)
    prep = spectral.prep
    if not np.any(prep.weights):
        logger.warning("T* 权重全为零，估计与信号无关")
        return _finalize(
            instance, _fallback_vector(instance, seed), EstimateSource.TAP_TOP, -1.0 / instance.rho,
            {"path": "degenerate", "clamp_count": prep.clamp_count, "pole_count": prep.pole_count},
        )
    value, vector, residual, path = _top_hermitian(spectral, seed)
    logger.debug(f"TAP: lambda={value:.6g}, 残差={residual:.3g}, 路径={path}")
    return _finalize(instance, vector, EstimateSource.TAP_TOP, value, {
        "path": path, "residual": residual,
        "clamp_count": prep.clamp_count, "pole_count": prep.pole_count,
    })


def _real_phase(u: np.ndarray) -> np.ndarray:
    """实数域下把 Arnoldi 给出的复特征向量旋转为实向量"""
    k = int(np.argmax(np.abs(u)))
    return np.real(u * np.exp(-1j * np.angle(u[k])))


def lift_lamp(instance: Instance, spectral: SpectralOperator, u: np.ndarray) -> np.ndarray:
    """x_hat = A^H (sigma2 dg * u)"""
    dg = spectral.prep.dg
    if not instance.field.is_complex and np.iscomplexobj(u):
        u = _real_phase(u)
    x_hat = instance.phi.adjoint(spectral.prep.sigma2 * dg * u)
    scale = np.linalg.norm(u) * max(1.0, float(np.max(np.abs(dg))))
    if not np.linalg.norm(x_hat) > 1e-14 * scale:
        raise DegenerateLiftError("LAMP 特征向量提升后为零向量")
    return x_hat


def estimate_lamp(instance: Instance, channel, which: str = "top", seed: int = 0) -> Estimate:
    """
    LAMP 谱估计

    which="top": 实部最大的特征值
    which="bulk_unit": 离 1 最近的特征值；偏离超过 bulk_unit_window 时 meta["reliable"]=False
    """
    if which not in ("top", "bulk_unit"):
        raise ParameterError(f"未知的 LAMP 特征值选择: {which}")
    spectral = build_MLAMP(instance, channel)
    if not np.any(spectral.prep.dg):
        raise DegenerateLiftError("dg 恒为零，M_LAMP 为零算子")

    meta = {"which": which}
    if which == "top":
        result = power_dominant(spectral.op, seed=seed)
        source = EstimateSource.LAMP_TOP
    else:
        try:
            result = shift_invert(spectral.op, 1.0, seed=seed)
        except ShiftSingularityError:
            result = shift_invert(spectral.op, 1.0 + 1e-8, seed=seed)
        source = EstimateSource.LAMP_BULK
        window = get_spectral_config().bulk_unit_window
        meta["reliable"] = bool(abs(result.value - 1.0) <= window)
        if not meta["reliable"]:
            logger.warning(f"LAMP: 离 1 最近的特征值为 {result.value:.6g}，超出窗口 {window}")
    meta["residual"] = result.residual
    x_hat = lift_lamp(instance, spectral, result.vector)
    logger.debug(f"LAMP[{which}]: lambda={result.value:.6g}")
    return _finalize(instance, x_hat, source, result.value, meta)


def estimate_mm(instance: Instance, channel, seed: int = 0) -> Estimate:
    """互信息最优预处理 T_MM 下的谱估计"""
    prep = make_t_mm(instance, channel)
    spectral = build_MT(instance, prep)
    if not np.any(prep.weights):
        logger.warning("T_MM 权重全为零，估计与信号无关")
        return _finalize(instance, _fallback_vector(instance, seed), EstimateSource.MM, 0.0,
                         {"path": "degenerate", "clamp_count": prep.clamp_count})
    value, vector, residual, path = _top_hermitian(spectral, seed)
    return _finalize(instance, vector, EstimateSource.MM, value, {
        "path": path, "residual": residual, "clamp_count": prep.clamp_count,
    })


ESTIMATORS = {
    "tap": lambda instance, channel, seed: estimate_tap(instance, channel, seed),
    "lamp_top": lambda instance, channel, seed: estimate_lamp(instance, channel, "top", seed),
    "lamp_bulk": lambda instance, channel, seed: estimate_lamp(instance, channel, "bulk_unit", seed),
    "mm": lambda instance, channel, seed: estimate_mm(instance, channel, seed),
}


def run_estimator(name: str, instance: Instance, channel, seed: Optional[int] = None) -> Estimate:
    """按名称调用估计器"""
    if name not in ESTIMATORS:
        raise ParameterError(f"未知估计器: {name}，可选 {sorted(ESTIMATORS)}")
    return ESTIMATORS[name](instance, channel, instance.seed if seed is None else seed)
