"""
一维求根
"""
from typing import Callable, Optional

import numpy as np
from scipy.optimize import bisect

from core.errors import BracketError


def bisect_root(g: Callable[[float], float], lo: float, hi: float, tol: Optional[float] = None) -> float:
    """二分法求 g 在 [lo, hi] 上的根，要求端点异号"""
    tol = tol or 1e-12
    g_lo, g_hi = float(g(lo)), float(g(hi))
    if g_lo == 0.0:
        return float(lo)
    if g_hi == 0.0:
        return float(hi)
    if g_lo * g_hi > 0 or g_lo != g_lo or g_hi != g_hi:
        raise BracketError(lo, hi, g_lo, g_hi)
    return float(bisect(g, lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=200))
