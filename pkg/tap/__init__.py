"""
TAP 自由熵、F(x, y) 鞍点与平凡点处的有限差分 Hessian
"""
from .saddle import (
    SaddleT,
    ZetaSaddle,
    expansion_order_ratio,
    expansion_remainder,
    f_expansion,
    saddle_t,
    solve_zeta,
)
from .free_entropy import TapPoint, eval_ftap, trivial_point
from .hessian import HESSIAN_MAX_DIM, HessianReport, hessian_check, hessian_fd

__all__ = [
    'SaddleT',
    'ZetaSaddle',
    'expansion_order_ratio',
    'expansion_remainder',
    'f_expansion',
    'saddle_t',
    'solve_zeta',
    'TapPoint',
    'eval_ftap',
    'trivial_point',
    'HESSIAN_MAX_DIM',
    'HessianReport',
    'hessian_check',
    'hessian_fd',
]
