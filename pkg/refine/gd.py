"""
强度平方损失上的梯度下降

L(x) = (1/2m) sum_mu (|z_mu|^2 - y_mu^2)^2,  z = A x
grad = (2/m) A^H [(|z|^2 - y^2) z]，方向导数为 Re<grad, d>
"""
import time
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from config import get_gd_settings, get_logger
from core.errors import DivergenceError, ParameterError
from core.metrics import overlap_and_mse
from core.types import Estimate, EstimateSource, Instance

logger = get_logger(__name__)

STEP_RULES = ("fixed", "barzilai_borwein")


@dataclass
class GdConfig:
    step: float
    backtracking: bool = True
    max_iter: int = 5000
    tol_grad: float = 1e-10
    step_rule: str = "fixed"

    def __post_init__(self):
        if not self.step > 0:
            raise ParameterError(f"步长必须为正，当前为{self.step}")
        if not self.tol_grad > 0:
            raise ParameterError(f"tol_grad 必须为正，当前为{self.tol_grad}")
        if self.max_iter < 0:
            raise ParameterError(f"max_iter 不能为负，当前为{self.max_iter}")
        if self.step_rule not in STEP_RULES:
            raise ParameterError(f"未知步长规则: {self.step_rule}，可选 {STEP_RULES}")

    @classmethod
    def from_settings(cls, rho: float = 1.0, **overrides) -> "GdConfig":
        """默认步长 step_scale / rho"""
        settings = get_gd_settings()
        values = {
            "step": settings.step_scale / rho,
            "backtracking": settings.backtracking,
            "max_iter": settings.max_iter,
            "tol_grad": settings.tol_grad,
            "step_rule": settings.step_rule,
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


def _residual(instance: Instance, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    z = instance.phi.apply(x)
    return z, np.abs(z) ** 2 - instance.y ** 2


def gd_loss(instance: Instance, x: np.ndarray) -> float:
    x = instance.field.cast(x)
    if x.shape != (instance.n,):
        raise ParameterError(f"x 维度 {x.shape} 与 n={instance.n} 不一致")
    _, res = _residual(instance, x)
    return float(np.sum(res ** 2)) / (2.0 * instance.m)


def gd_gradient(instance: Instance, x: np.ndarray) -> np.ndarray:
    x = instance.field.cast(x)
    z, res = _residual(instance, x)
    return (2.0 / instance.m) * instance.phi.adjoint(res * z)


def _record(instance: Instance, it: int, loss: float, grad_norm: float, step: float, x: np.ndarray) -> dict:
    row = {"iter": it, "loss": loss, "grad_norm": grad_norm, "step": step,
           "overlap": float("nan"), "mse": float("nan")}
    if instance.x_star is not None:
        row["overlap"], row["mse"] = overlap_and_mse(x, instance.x_star)
    return row


def gd_run(instance: Instance, x0: np.ndarray,
           config: Optional[GdConfig] = None) -> Tuple[Estimate, List[dict]]:
    """
    从 x0 出发迭代 x <- x - eta grad

    backtracking 时步长减半直到损失不增；barzilai_borwein 以 BB 步长作为每轮的初始步长
    停止条件 |grad| / sqrt(n) < tol_grad 或达到 max_iter

    Returns:
        (估计, 每轮的损失/梯度/步长轨迹)
    """
    config = config or GdConfig.from_settings(instance.rho)
    x = instance.field.cast(x0).copy()
    if x.shape != (instance.n,):
        raise ParameterError(f"x0 维度 {x.shape} 与 n={instance.n} 不一致")
    sqrt_n = np.sqrt(instance.n)
    start = time.perf_counter()

    loss = gd_loss(instance, x)
    grad = gd_gradient(instance, x)
    step = config.step
    trajectory = [_record(instance, 0, loss, float(np.linalg.norm(grad)) / sqrt_n, step, x)]
    converged = False
    it = 0
    for it in range(1, config.max_iter + 1):
        if np.linalg.norm(grad) / sqrt_n < config.tol_grad:
            converged = True
            it -= 1
            break
        eta = step
        while True:
            candidate = x - eta * grad
            new_loss = gd_loss(instance, candidate)
            if not np.isfinite(new_loss):
                if not config.backtracking:
                    raise DivergenceError(f"梯度下降第 {it} 轮损失非有限", trajectory)
            elif not config.backtracking or new_loss <= loss:
                break
            eta /= 2.0
            if eta < 1e-30 * config.step:
                raise DivergenceError(f"梯度下降第 {it} 轮回溯后步长下溢", trajectory)

        new_grad = gd_gradient(instance, candidate)
        if config.step_rule == "barzilai_borwein":
            s = candidate - x
            dg = new_grad - grad
            curvature = float(np.real(np.vdot(s, dg)))
            step = float(np.real(np.vdot(s, s))) / curvature if curvature > 0 else config.step
        x, loss, grad = candidate, new_loss, new_grad
        trajectory.append(_record(instance, it, loss, float(np.linalg.norm(grad)) / sqrt_n, eta, x))
    else:
        converged = np.linalg.norm(grad) / sqrt_n < config.tol_grad

    runtime_ms = (time.perf_counter() - start) * 1e3
    logger.info(f"梯度下降: {it} 轮, 损失 {loss:.3e}, 收敛={converged}")
    estimate = Estimate(
        x_hat=x, source=EstimateSource.GD,
        meta={"iterations": it, "converged": converged, "loss": loss, "runtime_ms": runtime_ms},
    )
    if instance.x_star is not None:
        estimate.overlap, estimate.mse = overlap_and_mse(x, instance.x_star)
    return estimate, trajectory
