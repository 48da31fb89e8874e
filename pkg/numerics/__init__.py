"""
数值内核
线性算子、特征值求解、径向积分与求根
"""
from .linop import LinearOperator, from_dense, materialize, hermitian_defect, adjoint_defect
from .eigen import EigResult, power_dominant, shift_invert, top_eigenpair, residual_norm
from .quadrature import quad_radial, radial_rule
from .roots import bisect_root

__all__ = [
    "LinearOperator",
    "from_dense",
    "materialize",
    "hermitian_defect",
    "adjoint_defect",
    "EigResult",
    "power_dominant",
    "shift_invert",
    "top_eigenpair",
    "residual_norm",
    "quad_radial",
    "radial_rule",
    "bisect_root",
]
