"""
M_LAMP 与 M_TAP 特征对之间对应关系的稠密校验（小规模实例）

(i)  M_LAMP v = lambda_L v  =>  x = A^H Z v 满足 A^H [rho Z/(lambda_L + rho Z)] A x = x
(ii) M_TAP x = lambda_T x  =>  u = (1 + rho Z)^{-1} A x 满足 M_LAMP u = u + rho lambda_T (1 + rho Z) u
且两者给出同一估计 A^H Z u = (lambda_T + 1/rho) x

lambda_T = 0 的情形通过调整 rho 构造：M_TAP(rho) 的某个特征值随 rho 穿过零点时，
用 brentq 求出该 rho，此时 M_LAMP u = u 精确成立
"""
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import scipy.linalg as sla
from scipy.optimize import brentq

from config import get_logger
from core.errors import ParameterError
from core.types import Instance
from ensembles.instance import normalize_spectrum

logger = get_logger(__name__)

# 允许稠密校验的最大 m
DENSE_CHECK_MAX_M = 64
# 近极点跳过阈值
POLE_SKIP = 1e-8
# 搜索零特征值时 rho 的扫描范围（相对实例 rho）与点数
NULL_RHO_RANGE = (1e-3, 1e3)
NULL_RHO_POINTS = 241


@dataclass
class CorrespondenceReport:
    tol: float
    lamp_checked: int = 0
    lamp_skipped: int = 0
    # 原始残差 |A^H W A x - x| / |x|
    residual_one_over_n: float = 0.0
    residual_one_over_m: float = 0.0
    # 除以极点条件数 max(1, |rho z|_inf / min|lambda_L + rho z|) * |M_LAMP| 后的残差
    conditioned_one_over_n: float = 0.0
    conditioned_one_over_m: float = 0.0
    tap_checked: int = 0
    tap_skipped: int = 0
    residual_tap: float = 0.0
    residual_estimator: float = 0.0
    null_rho: float = float("nan")
    near_null_eigenvalue: float = float("nan")
    near_null_residual: float = float("nan")
    near_null_estimator_residual: float = float("nan")
    failures: List[str] = field(default_factory=list)

    @property
    def convention(self) -> str:
        """哪种平均方式使 (i) 成立"""
        if self.conditioned_one_over_n <= self.tol:
            return "1/n"
        if self.conditioned_one_over_m <= self.tol:
            return "1/m"
        return "none"

    @property
    def null_found(self) -> bool:
        return bool(np.isfinite(self.null_rho))

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> Dict[str, Any]:
        return {
            "passed": self.passed,
            "convention": self.convention,
            "lamp_checked": self.lamp_checked,
            "lamp_skipped": self.lamp_skipped,
            "residual_one_over_n": self.residual_one_over_n,
            "residual_one_over_m": self.residual_one_over_m,
            "conditioned_one_over_n": self.conditioned_one_over_n,
            "conditioned_one_over_m": self.conditioned_one_over_m,
            "tap_checked": self.tap_checked,
            "tap_skipped": self.tap_skipped,
            "residual_tap": self.residual_tap,
            "residual_estimator": self.residual_estimator,
            "null_found": self.null_found,
            "null_rho": self.null_rho,
            "near_null_eigenvalue": self.near_null_eigenvalue,
            "near_null_residual": self.near_null_residual,
            "near_null_estimator_residual": self.near_null_estimator_residual,
        }


@dataclass
class _DenseOperators:
    rho: float
    z: np.ndarray
    denom: np.ndarray
    m_lamp: np.ndarray
    m_tap: Optional[np.ndarray]


def _dense_setup(instance: Instance) -> Tuple[Instance, np.ndarray]:
    if instance.m > DENSE_CHECK_MAX_M:
        raise ParameterError(f"稠密校验要求 m <= {DENSE_CHECK_MAX_M}，当前 m={instance.m}")
    if not instance.phi.has_dense:
        raise ParameterError("稠密校验需要可稠密化的感知矩阵")
    inst = normalize_spectrum(instance)
    return inst, inst.phi.dense()


def _operators(inst: Instance, channel, A: np.ndarray) -> _DenseOperators:
    """给定 rho 下的稠密 M_LAMP 与 M_TAP；1 + rho z 近极点时 M_TAP 为 None"""
    rho = inst.rho
    z = np.asarray(channel.dgout(inst.y, inst.sigma2), dtype=float)
    denom = 1.0 + rho * z
    m_lamp = rho * (A @ A.conj().T - np.eye(inst.m)) * z[None, :]
    m_tap = None
    if np.min(np.abs(denom)) > POLE_SKIP:
        m_tap = A.conj().T @ ((z / denom)[:, None] * A) - np.eye(inst.n) / rho
        m_tap = 0.5 * (m_tap + m_tap.conj().T)
    return _DenseOperators(rho, z, denom, m_lamp, m_tap)


def _tap_values(inst: Instance, channel, A: np.ndarray, rho: float) -> Tuple[Optional[np.ndarray], np.ndarray]:
    """M_TAP(rho) 的降序特征值与 1 + rho z 的符号"""
    ops = _operators(inst.with_rho(rho), channel, A)
    sign = np.sign(ops.denom)
    if ops.m_tap is None:
        return None, sign
    return sla.eigvalsh(ops.m_tap)[::-1], sign


def find_null_rho(instance: Instance, channel) -> Optional[float]:
    """
    寻找使 M_TAP(rho) 恰有零特征值的 rho

    在对数网格上统计正特征值个数，个数变化且 1 + rho z 不变号的区间内，
    对降序第 k 个特征值用 brentq 求根；找不到时返回 None
    """
    inst, A = _dense_setup(instance)
    grid = inst.rho * np.geomspace(*NULL_RHO_RANGE, NULL_RHO_POINTS)
    prev_rho, prev_values, prev_sign = None, None, None
    for rho in grid:
        values, sign = _tap_values(inst, channel, A, rho)
        if values is not None and prev_values is not None and np.array_equal(sign, prev_sign):
            count_a, count_b = int(np.sum(prev_values > 0)), int(np.sum(values > 0))
            if count_a != count_b:
                root = _branch_root(inst, channel, A, min(count_a, count_b), prev_rho, rho)
                if root is not None:
                    return root
        prev_rho, prev_values, prev_sign = rho, values, sign
    return None


def _branch_root(inst: Instance, channel, A: np.ndarray, k: int, lo: float, hi: float) -> Optional[float]:
    """降序第 k 个特征值在 [lo, hi] 内的零点；跨越极点得到的伪根返回 None"""
    def branch(r: float) -> float:
        vals, _ = _tap_values(inst, channel, A, r)
        if vals is None:
            raise ParameterError(f"rho={r} 处 1 + rho z 近极点")
        return float(vals[k])

    try:
        root = float(brentq(branch, lo, hi, xtol=1e-14 * hi, rtol=1e-14))
    except (ValueError, ParameterError) as e:
        logger.debug(f"区间 [{lo:.4g}, {hi:.4g}] 求零特征值失败: {e}")
        return None
    vals, _ = _tap_values(inst, channel, A, root)
    if vals is None or abs(vals[k]) > 1e-9 * max(1.0, float(np.max(np.abs(vals)))):
        return None
    return root


def _check_null(report: CorrespondenceReport, instance: Instance, channel, A: np.ndarray) -> None:
    """在零特征值的 rho 处检验 M_LAMP u = u 与估计一致性"""
    rho = find_null_rho(instance, channel)
    if rho is None:
        logger.warning("未找到使 M_TAP 出现零特征值的 rho，跳过 lambda_T = 0 校验")
        return
    ops = _operators(instance.with_rho(rho), channel, A)
    values, vectors = sla.eigh(ops.m_tap)
    k = int(np.argmin(np.abs(values)))
    x = vectors[:, k]
    u = (A @ x) / ops.denom
    u_norm = float(np.linalg.norm(u))
    report.null_rho = rho
    report.near_null_eigenvalue = float(values[k])
    report.near_null_residual = float(np.linalg.norm(ops.m_lamp @ u - u) / u_norm)
    lifted = A.conj().T @ (ops.z * u)
    report.near_null_estimator_residual = float(np.linalg.norm(lifted - x / rho) * rho)
    scale = max(1.0, float(np.linalg.norm(ops.m_lamp, 2)))
    if report.near_null_residual > report.tol * scale:
        report.failures.append(f"零特征值处 M_LAMP u = u 残差 {report.near_null_residual:.3g}")
    if report.near_null_estimator_residual > report.tol * scale:
        report.failures.append(f"零特征值处估计一致性残差 {report.near_null_estimator_residual:.3g}")


def verify_correspondence(instance: Instance, channel, tol: float = 1e-8) -> CorrespondenceReport:
    """
    对全部非近极点特征对校验 (i)(ii)，并在构造出的零特征值处校验 M_LAMP u = u

    (i) 报告原始残差；判定时除以该特征对的极点条件数
    """
    inst, A = _dense_setup(instance)
    ops = _operators(inst, channel, A)
    rho, z, m_lamp, denom = ops.rho, ops.z, ops.m_lamp, ops.denom
    n, m = inst.n, inst.m
    report = CorrespondenceReport(tol=tol)
    lamp_norm = max(1.0, float(np.linalg.norm(m_lamp, 2)))

    values, vectors = sla.eig(m_lamp)
    for k in range(m):
        lam = values[k]
        gap = np.min(np.abs(lam + rho * z))
        if gap <= POLE_SKIP:
            report.lamp_skipped += 1
            continue
        x = A.conj().T @ (z * vectors[:, k])
        x_norm = np.linalg.norm(x)
        if x_norm <= 1e-12 * lamp_norm:
            # 特征值 -rho z 对应的零空间方向，提升为零
            report.lamp_skipped += 1
            continue
        ratio = rho * z / (lam + rho * z)
        mapped = A.conj().T @ (ratio * (A @ x))
        condition = max(1.0, float(np.max(np.abs(rho * z))) / gap) * lamp_norm
        res_n = float(np.linalg.norm(mapped - x) / x_norm)
        res_m = float(np.linalg.norm(mapped * (n / m) - x) / x_norm)
        report.residual_one_over_n = max(report.residual_one_over_n, res_n)
        report.residual_one_over_m = max(report.residual_one_over_m, res_m)
        report.conditioned_one_over_n = max(report.conditioned_one_over_n, res_n / condition)
        report.conditioned_one_over_m = max(report.conditioned_one_over_m, res_m / condition)
        report.lamp_checked += 1
    if report.lamp_skipped:
        logger.warning(f"跳过 {report.lamp_skipped} 个近极点或零提升的 LAMP 特征对")
    if report.conditioned_one_over_n > tol:
        report.failures.append(f"(i) 1/n 约定残差 {report.conditioned_one_over_n:.3g} > {tol}")

    if ops.m_tap is None:
        report.tap_skipped = n
        logger.warning("1 + rho z 存在近极点，跳过 (ii)")
        return report
    t_values, t_vectors = sla.eigh(ops.m_tap)
    scale = lamp_norm + 1.0 + rho * float(np.max(np.abs(t_values))) * float(np.max(np.abs(denom)))
    for k in range(n):
        lam_t = float(t_values[k])
        x = t_vectors[:, k]
        u = (A @ x) / denom
        u_norm = np.linalg.norm(u)
        if u_norm <= 1e-12:
            report.tap_skipped += 1
            continue
        lhs = m_lamp @ u
        rhs = u + rho * lam_t * denom * u
        res = np.linalg.norm(lhs - rhs) / (u_norm * scale)
        lifted = A.conj().T @ (z * u)
        est = np.linalg.norm(lifted - (lam_t + 1.0 / rho) * x) / max(1.0, abs(lam_t + 1.0 / rho))
        report.residual_tap = max(report.residual_tap, res)
        report.residual_estimator = max(report.residual_estimator, est)
        report.tap_checked += 1
    if report.residual_tap > tol:
        report.failures.append(f"(ii) 残差 {report.residual_tap:.3g} > {tol}")
    if report.residual_estimator > tol:
        report.failures.append(f"估计一致性残差 {report.residual_estimator:.3g} > {tol}")

    _check_null(report, inst, channel, A)
    logger.info(
        f"特征对对应: LAMP {report.lamp_checked} 对 (约定 {report.convention})，"
        f"TAP {report.tap_checked} 对，零特征值 rho={report.null_rho:.6g}，通过={report.passed}"
    )
    return report


@dataclass
class AffineReport:
    c: float
    max_deviation: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.tol


def verify_constant_weight(instance: Instance, c: float, tol: float = 1e-8) -> AffineReport:
    """
    dg 恒为 c 时两谱满足仿射关系
    lambda_T = -1/rho + (lambda_L/rho + c)/(1 + rho c)
    M_LAMP 另有 m-n 个特征值 -rho c 无对应
    """
    if c == 0 or 1.0 + instance.rho * c == 0:
        raise ParameterError(f"常数权重 c={c} 退化")
    if instance.m > DENSE_CHECK_MAX_M or not instance.phi.has_dense:
        raise ParameterError("稠密校验要求可稠密化的小规模实例")
    inst = normalize_spectrum(instance)
    A = inst.phi.dense()
    rho, n, m = inst.rho, inst.n, inst.m
    gram_m = A @ A.conj().T
    lamp_values = np.linalg.eigvals(rho * c * (gram_m - np.eye(m)))
    tap = A.conj().T @ A * (c / (1.0 + rho * c)) - np.eye(n) / rho
    tap_values = np.sort(sla.eigvalsh(0.5 * (tap + tap.conj().T)))

    order = np.argsort(-np.sign(c) * lamp_values.real)
    matched = lamp_values[order[:n]].real
    predicted = np.sort(-1.0 / rho + (matched / rho + c) / (1.0 + rho * c))
    scale = max(1.0, float(np.max(np.abs(tap_values))))
    deviation = float(np.max(np.abs(predicted - tap_values))) / scale
    return AffineReport(c=float(c), max_deviation=deviation, tol=tol)
