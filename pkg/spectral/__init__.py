"""
谱方法：预处理、谱矩阵与估计器
"""
from .preprocessing import (
    Preprocessing,
    PreprocessingKind,
    make_custom,
    make_t_mm,
    make_t_star,
)
from .operators import (
    OperatorName,
    SpectralOperator,
    build_MLAMP,
    build_MT,
    build_MTAP,
)
from .estimators import (
    ESTIMATORS,
    estimate_lamp,
    estimate_mm,
    estimate_tap,
    lift_lamp,
    run_estimator,
)
from .correspondence import (
    AffineReport,
    CorrespondenceReport,
    verify_constant_weight,
    verify_correspondence,
)

__all__ = [
    'Preprocessing',
    'PreprocessingKind',
    'make_custom',
    'make_t_mm',
    'make_t_star',
    'OperatorName',
    'SpectralOperator',
    'build_MLAMP',
    'build_MT',
    'build_MTAP',
    'ESTIMATORS',
    'estimate_lamp',
    'estimate_mm',
    'estimate_tap',
    'lift_lamp',
    'run_estimator',
    'AffineReport',
    'CorrespondenceReport',
    'verify_constant_weight',
    'verify_correspondence',
]
