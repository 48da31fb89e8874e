"""
核心模块
数域、问题实例、指标与确定性随机数
"""
from .errors import (
    PhaseRetrievalError,
    ParameterError,
    ShapeError,
    ChannelDefinitionError,
    ConfigError,
    FormatError,
    UndefinedMetricError,
    NumericalError,
    ConvergenceError,
    ShiftSingularityError,
    BracketError,
    QuadratureError,
    PoleError,
    DegenerateLiftError,
    DivergenceError,
    SaddleError,
    NoRecoveryError,
)
from .field import FieldTag, REAL, COMPLEX, field_of, inner, realify, unrealify, realify_matrix
from .types import MomentSource, EstimateSource, SpectralMoments, Instance, Estimate
from .rng import make_rng, task_seed, STREAM_SIGNAL, STREAM_OPERATOR, STREAM_CHANNEL, STREAM_SOLVER, STREAM_PROBE
from .signal import generate_signal
from .metrics import overlap_and_mse, normalize_to

__all__ = [
    # Errors
    "PhaseRetrievalError",
    "ParameterError",
    "ShapeError",
    "ChannelDefinitionError",
    "ConfigError",
    "FormatError",
    "UndefinedMetricError",
    "NumericalError",
    "ConvergenceError",
    "ShiftSingularityError",
    "BracketError",
    "QuadratureError",
    "PoleError",
    "DegenerateLiftError",
    "DivergenceError",
    "SaddleError",
    "NoRecoveryError",
    # Field
    "FieldTag",
    "REAL",
    "COMPLEX",
    "field_of",
    "inner",
    "realify",
    "unrealify",
    "realify_matrix",
    # Types
    "MomentSource",
    "EstimateSource",
    "SpectralMoments",
    "Instance",
    "Estimate",
    # RNG
    "make_rng",
    "task_seed",
    "STREAM_SIGNAL",
    "STREAM_OPERATOR",
    "STREAM_CHANNEL",
    "STREAM_SOLVER",
    "STREAM_PROBE",
    # Signal / metrics
    "generate_signal",
    "overlap_and_mse",
    "normalize_to",
]
