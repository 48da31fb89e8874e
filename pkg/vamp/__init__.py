"""
G-VAMP 及其在平凡不动点处的线性化
"""
from .state import VampState, trivial_state
from .gvamp import (
    INIT_MODES,
    channel_denoiser,
    denoise_step,
    estimate_step,
    initial_state,
    linear_estimator,
    prior_denoiser,
    vamp_iterate,
    vamp_run,
)
from .linearization import (
    LinearizationReport,
    linearization_oracle,
    predicted_operator,
)

__all__ = [
    'VampState',
    'trivial_state',
    'INIT_MODES',
    'channel_denoiser',
    'denoise_step',
    'estimate_step',
    'initial_state',
    'linear_estimator',
    'prior_denoiser',
    'vamp_iterate',
    'vamp_run',
    'LinearizationReport',
    'linearization_oracle',
    'predicted_operator',
]
