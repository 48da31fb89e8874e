"""
平凡不动点处 G-VAMP 一轮映射 R1 -> R1' 的数值 Jacobian 与 M_LAMP 定义算子的比对
"""
from dataclasses import dataclass
from typing import Any, Dict

import numpy as np

from config import get_logger
from core.errors import ParameterError
from core.field import realify, realify_matrix, unrealify
from core.types import Instance
from ensembles.instance import calibrate_instance
from numerics.linop import materialize
from spectral.operators import build_MLAMP
from .gvamp import denoise_step, vamp_iterate
from .state import trivial_state

logger = get_logger(__name__)

# 数值 Jacobian 的最大 m
ORACLE_MAX_M = 128


@dataclass
class LinearizationReport:
    eps: float
    relative_error: float
    relative_error_mlamp: float
    max_dT2: float
    max_dscalar: float
    tol: float = 1e-4

    @property
    def passed(self) -> bool:
        first_order = 10.0 * self.eps
        return (
            self.relative_error < self.tol
            and self.max_dT2 < first_order
            and self.max_dscalar < first_order
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "passed": self.passed,
            "eps": self.eps,
            "relative_error": self.relative_error,
            "relative_error_mlamp": self.relative_error_mlamp,
            "max_dT2": self.max_dT2,
            "max_dscalar": self.max_dscalar,
        }


def predicted_operator(instance: Instance, channel) -> np.ndarray:
    """((alpha/<lambda>) A A^H - I) [Diag(v(y))/sigma2 - I]"""
    A = instance.phi.dense()
    sigma2 = instance.sigma2
    v = np.asarray(channel.posterior_second_moment(instance.y, sigma2), dtype=float)
    ratio = instance.alpha / instance.moments.mean_lambda
    left = ratio * (A @ A.conj().T) - np.eye(instance.m)
    return left * (v / sigma2 - 1.0)[None, :]


def linearization_oracle(instance: Instance, channel, eps: float = 1e-5,
                         tol: float = 1e-4) -> LinearizationReport:
    """
    对 R1 的每个实坐标做中心差分（复数域按实部、虚部分开），得到 (beta m) x (beta m) 实 Jacobian

    同时检查下一轮 T2 与标量 (v1, c1, gamma2, tau2) 对 R1 的一阶变化
    """
    if instance.m > ORACLE_MAX_M:
        raise ParameterError(f"数值 Jacobian 要求 m <= {ORACLE_MAX_M}，当前 m={instance.m}")
    inst = calibrate_instance(instance, channel)
    beta, m = inst.beta, inst.m
    base = trivial_state(inst)

    J = np.empty((beta * m, beta * m))
    max_dT2 = 0.0
    max_dscalar = 0.0
    for j in range(beta * m):
        e = np.zeros(beta * m)
        e[j] = eps
        delta = unrealify(e, beta)
        plus_start = base.replace(R1=base.R1 + delta)
        minus_start = base.replace(R1=base.R1 - delta)

        plus = vamp_iterate(inst, channel, plus_start, damping=1.0)
        minus = vamp_iterate(inst, channel, minus_start, damping=1.0)
        J[:, j] = realify(plus.R1 - minus.R1) / (2.0 * eps)

        next_plus = denoise_step(inst, channel, plus, 1.0)
        next_minus = denoise_step(inst, channel, minus, 1.0)
        max_dT2 = max(max_dT2, float(np.max(np.abs(next_plus.T2 - next_minus.T2))) / (2.0 * eps))

        half_plus = denoise_step(inst, channel, plus_start, 1.0)
        half_minus = denoise_step(inst, channel, minus_start, 1.0)
        for key in ("v1", "c1", "gamma2", "tau2"):
            diff = abs(getattr(half_plus, key) - getattr(half_minus, key)) / (2.0 * eps)
            max_dscalar = max(max_dscalar, diff)

    predicted = realify_matrix(predicted_operator(inst, channel))
    scale = float(np.max(np.abs(predicted)))
    relative = float(np.max(np.abs(J - predicted))) / scale

    mlamp = realify_matrix(materialize(build_MLAMP(inst, channel).op))
    relative_mlamp = float(np.max(np.abs(J - mlamp))) / max(float(np.max(np.abs(mlamp))), 1e-300)

    report = LinearizationReport(eps, relative, relative_mlamp, max_dT2, max_dscalar, tol)
    logger.info(
        f"线性化: 相对误差 {relative:.3g} (M_LAMP {relative_mlamp:.3g}), "
        f"dT2 {max_dT2:.3g}, d标量 {max_dscalar:.3g}"
    )
    return report
