"""
径向高斯积分
beta=1: Gauss-Hermite；beta=2: Gauss-Laguerre；节点数倍增直到相对变化小于 tol
"""
from functools import lru_cache
from typing import Callable, Optional, Tuple

import numpy as np
from numpy.polynomial.hermite import hermgauss
from numpy.polynomial.laguerre import laggauss

from config import get_quadrature_config
from core.errors import QuadratureError
from core.field import FieldTag


@lru_cache(maxsize=32)
def radial_rule(beta: int, nodes: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    返回 (r, w)，使得 sum w f(r) = \\int D_beta z f(|z|)
    """
    if beta == 1:
        t, w = hermgauss(nodes)
        return np.sqrt(2.0) * np.abs(t), w / np.sqrt(np.pi)
    x, w = laggauss(nodes)
    return np.sqrt(x), w


def _evaluate(f: Callable, r: np.ndarray) -> np.ndarray:
    try:
        values = np.asarray(f(r), dtype=float)
        if values.shape == r.shape:
            return values
    except (TypeError, ValueError):
        pass
    return np.array([f(float(ri)) for ri in r], dtype=float)


def quad_radial(f: Callable, beta: FieldTag, tol: Optional[float] = None) -> float:
    """
    \\int D_beta z f(|z|)

    Args:
        f: 径向函数，最好可向量化
        beta: 数域
        tol: 相对收敛容差
    """
    config = get_quadrature_config()
    tol = tol or config.tol
    b = beta.beta if isinstance(beta, FieldTag) else int(beta)

    nodes = config.min_nodes
    r, w = radial_rule(b, nodes)
    previous = float(np.dot(w, _evaluate(f, r)))
    while nodes < config.max_nodes:
        nodes *= 2
        r, w = radial_rule(b, nodes)
        current = float(np.dot(w, _evaluate(f, r)))
        if abs(current - previous) <= tol * max(abs(current), 1e-300) or current == previous:
            return current
        previous = current
    raise QuadratureError(f"径向积分在 {config.max_nodes} 个节点内未收敛 (最后值 {previous:.6g})")
