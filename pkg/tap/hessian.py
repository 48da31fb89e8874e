"""
平凡点处 TAP 自由能的有限差分 Hessian，与 M_TAP 直接比对
"""
from dataclasses import dataclass
from typing import Any, Dict

import numpy as np

from channels.base import ChannelKind
from config import get_logger
from core.errors import ParameterError, SaddleError
from core.field import realify_matrix, unrealify
from core.types import Instance
from ensembles.instance import calibrate_instance
from numerics.linop import materialize
from spectral.operators import build_MTAP
from .free_entropy import eval_ftap

logger = get_logger(__name__)

# 实坐标维数上限
HESSIAN_MAX_DIM = 64


@dataclass
class HessianReport:
    eps: float
    step: float
    relative_error: float
    diagonal_error: float
    asymmetry: float
    tol: float = 1e-2

    @property
    def passed(self) -> bool:
        return self.relative_error < self.tol

    def to_dict(self) -> Dict[str, Any]:
        return {
            "passed": self.passed,
            "eps": self.eps,
            "step": self.step,
            "relative_error": self.relative_error,
            "diagonal_error": self.diagonal_error,
            "asymmetry": self.asymmetry,
        }


def _step(instance: Instance, channel, eps: float) -> float:
    """无噪声信道要求 |(A m)_mu| < |z|_mu，步长按最小观测收缩"""
    if channel.kind is not ChannelKind.NOISELESS:
        return eps
    reach = np.sqrt(channel.posterior_second_moment(instance.y, instance.sigma2))
    spread = 2.0 * float(np.max(np.abs(instance.phi.dense())))
    return min(eps, 0.05 * float(np.min(reach)) / spread)


def hessian_fd(instance: Instance, channel, eps: float = 1e-3, calibrate: bool = True) -> np.ndarray:
    """
    对自由能 -f_TAP 在 m=0 处按实坐标做中心二阶差分，返回 -(n/beta) Hessian

    复数域坐标为 (Re m, Im m)，结果与 M_TAP 的 2x2 分块实表示同型
    """
    beta, n = instance.beta, instance.n
    dim = beta * n
    if dim > HESSIAN_MAX_DIM:
        raise ParameterError(f"有限差分 Hessian 要求 beta n <= {HESSIAN_MAX_DIM}，当前为{dim}")
    if not eps > 0:
        raise ParameterError(f"差分步长必须为正，当前为{eps}")
    inst = calibrate_instance(instance, channel) if calibrate else instance
    h = _step(inst, channel, eps)

    def energy(v: np.ndarray) -> float:
        try:
            return -eval_ftap(inst, channel, unrealify(v, beta))[0]
        except SaddleError as e:
            raise SaddleError(f"探测点 {np.flatnonzero(v).tolist()} 处内层求解失败: {e}", probe=v) from e

    def shifted(pairs) -> np.ndarray:
        v = np.zeros(dim)
        for idx, delta in pairs:
            v[idx] += delta
        return v

    def cross(i: int, j: int) -> float:
        # 沿 i 步长 h、沿 j 步长 h/2；H[j, i] 由交换后的网格独立算出
        a, b = h, 0.5 * h
        return (
            energy(shifted([(i, a), (j, b)]))
            - energy(shifted([(i, a), (j, -b)]))
            - energy(shifted([(i, -a), (j, b)]))
            + energy(shifted([(i, -a), (j, -b)]))
        ) / (4.0 * a * b)

    e0 = energy(np.zeros(dim))
    H = np.empty((dim, dim))
    for i in range(dim):
        H[i, i] = (energy(shifted([(i, h)])) - 2.0 * e0 + energy(shifted([(i, -h)]))) / h ** 2
        for j in range(i + 1, dim):
            H[i, j] = cross(i, j)
            H[j, i] = cross(j, i)
    logger.debug(f"Hessian: dim={dim}, 步长 {h:.3g}")
    return -(n / beta) * H


def hessian_check(instance: Instance, channel, eps: float = 1e-3, tol: float = 1e-2) -> HessianReport:
    """有限差分 Hessian 与未截断 T* 构造的 M_TAP 的相对 Frobenius 误差"""
    inst = calibrate_instance(instance, channel)
    fd = hessian_fd(inst, channel, eps, calibrate=False)
    target = realify_matrix(materialize(build_MTAP(inst, channel, clamp=False).op))
    scale = float(np.linalg.norm(target))
    relative = float(np.linalg.norm(fd - target)) / scale
    diagonal = float(np.max(np.abs(np.diag(fd) - np.diag(target)))) / float(np.max(np.abs(np.diag(target))))
    asymmetry = float(np.max(np.abs(fd - fd.T))) / max(float(np.max(np.abs(fd))), 1e-300)
    report = HessianReport(eps, _step(inst, channel, eps), relative, diagonal, asymmetry, tol)
    logger.info(f"Hessian 检验: 相对误差 {relative:.3g}, 对角误差 {diagonal:.3g}, 通过={report.passed}")
    return report
