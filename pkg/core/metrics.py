"""
估计质量指标：重叠度 q 与相位对齐后的 MSE
"""
from typing import Tuple

import numpy as np

from .errors import ShapeError, UndefinedMetricError


def overlap_and_mse(x_hat: np.ndarray, x_star: np.ndarray) -> Tuple[float, float]:
    """
    q = |<x_hat, x*>|^2 / (|x_hat|^2 |x*|^2)
    mse = min_theta |x* - e^{i theta} x_hat|^2 / n，最优相位为 arg<x_hat, x*>
    """
    x_hat = np.asarray(x_hat)
    x_star = np.asarray(x_star)
    if x_hat.shape != x_star.shape:
        raise ShapeError(f"长度不一致: {x_hat.shape} vs {x_star.shape}")
    n = x_star.shape[0]
    star_sq = float(np.vdot(x_star, x_star).real)
    if star_sq == 0.0:
        raise UndefinedMetricError("x_star 为零向量，重叠度无定义")

    hat_sq = float(np.vdot(x_hat, x_hat).real)
    cross = np.vdot(x_hat, x_star)
    if hat_sq == 0.0:
        return 0.0, star_sq / n

    q = min(1.0, abs(cross) ** 2 / (hat_sq * star_sq))
    if abs(cross) > 0:
        phase = cross / abs(cross)
        if not np.iscomplexobj(x_hat) and not np.iscomplexobj(x_star):
            phase = float(np.sign(phase.real))
    else:
        phase = 1.0
    diff = x_star - phase * x_hat
    mse = float(np.vdot(diff, diff).real) / n
    return float(q), mse


def normalize_to(x: np.ndarray, n: int, rho: float) -> np.ndarray:
    """缩放到 |x|^2 = n rho"""
    norm = np.linalg.norm(x)
    if norm == 0:
        return x
    return x * (np.sqrt(n * rho) / norm)
