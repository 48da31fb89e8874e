"""
配置模块
统一管理求解器配置与日志
"""
from .settings import (
    AppConfig,
    EigenConfig,
    QuadratureConfig,
    SpectralConfig,
    VampConfig,
    TapConfig,
    GdSettings,
    ThresholdConfig,
    LoggingConfig,
    get_settings,
    reload_settings,
    get_eig_config,
    get_quadrature_config,
    get_spectral_config,
    get_vamp_config,
    get_tap_config,
    get_gd_settings,
    get_threshold_config,
    get_logging_config,
    BASE_DIR,
    CONFIG_DIR,
    LOGS_DIR,
)
from .logging import setup_logging, get_logger, log_execution

__all__ = [
    # Settings
    "AppConfig",
    "EigenConfig",
    "QuadratureConfig",
    "SpectralConfig",
    "VampConfig",
    "TapConfig",
    "GdSettings",
    "ThresholdConfig",
    "LoggingConfig",
    "get_settings",
    "reload_settings",
    "get_eig_config",
    "get_quadrature_config",
    "get_spectral_config",
    "get_vamp_config",
    "get_tap_config",
    "get_gd_settings",
    "get_threshold_config",
    "get_logging_config",
    # Logging
    "setup_logging",
    "get_logger",
    "log_execution",
    # Paths
    "BASE_DIR",
    "CONFIG_DIR",
    "LOGS_DIR",
]
