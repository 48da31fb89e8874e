"""
弱恢复阈值
"""
from .moments import (
    MomentFunctionSource,
    MomentFunctions,
    analytic_moments,
    constant_moments,
    empirical_moments,
)
from .solver import (
    ThresholdResult,
    rhs,
    solve_threshold,
    solve_threshold_detail,
)

__all__ = [
    'MomentFunctionSource',
    'MomentFunctions',
    'analytic_moments',
    'constant_moments',
    'empirical_moments',
    'ThresholdResult',
    'rhs',
    'solve_threshold',
    'solve_threshold_detail',
]
