"""
弱恢复阈值方程
alpha = (<lambda>^2 / <lambda^2>) (1 + 1/I(s)),  s^2 = rho <lambda> / alpha
"""
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from channels.base import Channel
from channels.statistics import threshold_integral
from config import get_logger, get_threshold_config
from core.errors import BracketError, NoRecoveryError, ParameterError
from numerics.roots import bisect_root
from .moments import MomentFunctions

logger = get_logger(__name__)


def rhs(alpha: float, channel: Channel, moments: MomentFunctions, rho: float = 1.0,
        exact: bool = True) -> float:
    """阈值方程右端；exact=False 时无噪声信道也走求积"""
    if not alpha > 0:
        raise ParameterError(f"alpha 必须为正，当前为{alpha}")
    spec = moments(alpha)
    s = np.sqrt(rho * spec.mean_lambda / alpha)
    integral = threshold_integral(channel, s, exact=exact)
    if not integral > 0:
        raise NoRecoveryError(f"I(s={s:.4g}) = {integral:.3g}，信道不携带二阶信息")
    return spec.mean_lambda ** 2 / spec.mean_lambda_sq * (1.0 + 1.0 / integral)


@dataclass
class ThresholdResult:
    alpha_wr: float
    roots: List[float] = field(default_factory=list)
    bracket: Sequence[float] = ()

    @property
    def multiple(self) -> bool:
        return len(self.roots) > 1


def solve_threshold_detail(channel: Channel, moments: MomentFunctions, rho: float = 1.0,
                           bracket: Optional[Sequence[float]] = None,
                           tol: Optional[float] = None) -> ThresholdResult:
    """在对数网格上扫描 g(alpha) = alpha - rhs(alpha) 的变号区间，逐个二分"""
    config = get_threshold_config()
    lo, hi = bracket or config.bracket
    tol = tol or config.tol
    if not 0 < lo < hi:
        raise ParameterError(f"非法区间 [{lo}, {hi}]")

    def g(alpha):
        return alpha - rhs(alpha, channel, moments, rho)

    grid = np.geomspace(lo, hi, config.scan_points)
    values = np.array([g(a) for a in grid])
    roots = []
    for k in range(len(grid) - 1):
        if values[k] == 0.0:
            roots.append(float(grid[k]))
        elif values[k] * values[k + 1] < 0:
            roots.append(bisect_root(g, grid[k], grid[k + 1], tol=0.1 * tol))
    if values[-1] == 0.0:
        roots.append(float(grid[-1]))
    if not roots:
        raise BracketError(lo, hi, float(values[0]), float(values[-1]))
    if len(roots) > 1:
        logger.warning(f"阈值方程在 [{lo}, {hi}] 上有 {len(roots)} 个根 {roots}，取最小者")
    logger.info(f"alpha_WR = {roots[0]:.6g}")
    return ThresholdResult(alpha_wr=roots[0], roots=roots, bracket=(lo, hi))


def solve_threshold(channel: Channel, moments: MomentFunctions, rho: float = 1.0,
                    bracket: Optional[Sequence[float]] = None, tol: Optional[float] = None) -> float:
    return solve_threshold_detail(channel, moments, rho, bracket, tol).alpha_wr
