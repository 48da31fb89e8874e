"""
统一配置管理系统
支持从YAML文件、环境变量加载数值求解器配置
"""
from pathlib import Path
from typing import List, Optional

from pydantic import field_validator
from pydantic_settings import BaseSettings as PydanticBaseSettings
import yaml

# 项目根目录
BASE_DIR = Path(__file__).resolve().parent.parent
CONFIG_DIR = BASE_DIR / "config"
LOGS_DIR = BASE_DIR / "logs"


class EigenConfig(PydanticBaseSettings):
    """特征值求解器配置"""
    tol_dense: float = 1e-10
    tol_iterative: float = 1e-8
    max_iter: int = 5000
    arnoldi_ncv: int = 30
    # 稠密LU分解的最大维度
    dense_factor_max: int = 8192
    # 稠密全谱分解的最大维度
    dense_eig_max: int = 2048

    class Config:
        env_prefix = "EIG_"


class QuadratureConfig(PydanticBaseSettings):
    """数值积分配置"""
    tol: float = 1e-10
    min_nodes: int = 16
    max_nodes: int = 512
    posterior_grid: int = 2001

    @field_validator('posterior_grid')
    @classmethod
    def validate_grid(cls, v):
        if v < 101 or v % 2 == 0:
            raise ValueError(f"posterior_grid 必须为不小于101的奇数，当前为{v}")
        return v

    class Config:
        env_prefix = "QUAD_"


class SpectralConfig(PydanticBaseSettings):
    """谱方法预处理配置"""
    # 截断区间，单位 1/sigma^2
    clamp_low: float = -20.0
    clamp_high: float = 1.0
    pole_eps: float = 1e-12
    bulk_unit_window: float = 0.1
    mm_clamp: float = 20.0

    @field_validator('clamp_low')
    @classmethod
    def validate_low(cls, v):
        if v >= 0:
            raise ValueError(f"clamp_low 必须为负数，当前为{v}")
        return v

    @field_validator('clamp_high')
    @classmethod
    def validate_high(cls, v):
        if v <= 0:
            raise ValueError(f"clamp_high 必须为正数，当前为{v}")
        return v

    class Config:
        env_prefix = "SPECTRAL_"


class VampConfig(PydanticBaseSettings):
    """G-VAMP 迭代配置"""
    damping: float = 0.7
    max_iter: int = 200
    tol: float = 1e-7
    max_damping_retries: int = 6
    negative_precision_tol: float = 1e-9

    @field_validator('damping')
    @classmethod
    def validate_damping(cls, v):
        if not 0.0 < v <= 1.0:
            raise ValueError(f"damping 应在(0, 1]之间，当前为{v}")
        return v

    class Config:
        env_prefix = "VAMP_"


class TapConfig(PydanticBaseSettings):
    """TAP 自由熵内层鞍点求解配置"""
    damping: float = 0.5
    tol: float = 1e-10
    max_iter: int = 500
    expansion_cutoff: float = 1e-10
    newton_max_iter: int = 100

    @field_validator('damping')
    @classmethod
    def validate_damping(cls, v):
        if not 0.0 < v <= 1.0:
            raise ValueError(f"damping 应在(0, 1]之间，当前为{v}")
        return v

    class Config:
        env_prefix = "TAP_"


class GdSettings(PydanticBaseSettings):
    """梯度下降默认参数"""
    step_scale: float = 0.2
    backtracking: bool = True
    max_iter: int = 5000
    tol_grad: float = 1e-10
    step_rule: str = "fixed"

    @field_validator('step_rule')
    @classmethod
    def validate_rule(cls, v):
        if v not in ("fixed", "barzilai_borwein"):
            raise ValueError(f"未知步长规则: {v}")
        return v

    class Config:
        env_prefix = "GD_"


class ThresholdConfig(PydanticBaseSettings):
    """弱恢复阈值求解配置"""
    bracket: List[float] = [0.05, 10.0]
    tol: float = 1e-4
    scan_points: int = 64
    grid_points: int = 12
    moment_probes: int = 20

    @field_validator('bracket')
    @classmethod
    def validate_bracket(cls, v):
        if len(v) != 2 or not 0 < v[0] < v[1]:
            raise ValueError(f"bracket 应为 [lo, hi] 且 0 < lo < hi，当前为{v}")
        return v

    class Config:
        env_prefix = "THRESHOLD_"


class LoggingConfig(PydanticBaseSettings):
    """日志配置"""
    level: str = "INFO"
    format: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    file: bool = False
    file_path: str = str(LOGS_DIR / "spectral.log")
    max_bytes: int = 10 * 1024 * 1024  # 10MB
    backup_count: int = 5

    class Config:
        env_prefix = "LOG_"


class AppConfig(PydanticBaseSettings):
    """应用总配置"""
    # 子配置
    eig: EigenConfig = EigenConfig()
    quadrature: QuadratureConfig = QuadratureConfig()
    spectral: SpectralConfig = SpectralConfig()
    vamp: VampConfig = VampConfig()
    tap: TapConfig = TapConfig()
    gd: GdSettings = GdSettings()
    threshold: ThresholdConfig = ThresholdConfig()
    logging: LoggingConfig = LoggingConfig()

    @classmethod
    def from_yaml(cls, yaml_path: Optional[Path] = None) -> "AppConfig":
        """从YAML文件加载配置"""
        if yaml_path is None:
            yaml_path = CONFIG_DIR / "config.yaml"

        if not yaml_path.exists():
            return cls()

        with open(yaml_path, 'r', encoding='utf-8') as f:
            data = yaml.safe_load(f) or {}

        config = cls()

        if 'eig' in data:
            config.eig = EigenConfig(**data['eig'])
        if 'quadrature' in data:
            config.quadrature = QuadratureConfig(**data['quadrature'])
        if 'spectral' in data:
            config.spectral = SpectralConfig(**data['spectral'])
        if 'vamp' in data:
            config.vamp = VampConfig(**data['vamp'])
        if 'tap' in data:
            config.tap = TapConfig(**data['tap'])
        if 'gd' in data:
            config.gd = GdSettings(**data['gd'])
        if 'threshold' in data:
            config.threshold = ThresholdConfig(**data['threshold'])
        if 'logging' in data:
            config.logging = LoggingConfig(**data['logging'])

        return config

    class Config:
        env_file = ".env"
        env_file_encoding = "utf-8"
        extra = "ignore"


# 全局配置实例
_settings: Optional[AppConfig] = None


def get_settings() -> AppConfig:
    """获取全局配置实例（单例）"""
    global _settings
    if _settings is None:
        _settings = AppConfig.from_yaml()
    return _settings


def reload_settings(yaml_path: Optional[Path] = None) -> AppConfig:
    """重新加载配置"""
    global _settings
    _settings = AppConfig.from_yaml(yaml_path)
    return _settings


# 便捷访问函数
def get_eig_config() -> EigenConfig:
    return get_settings().eig


def get_quadrature_config() -> QuadratureConfig:
    return get_settings().quadrature


def get_spectral_config() -> SpectralConfig:
    return get_settings().spectral


def get_vamp_config() -> VampConfig:
    return get_settings().vamp


def get_tap_config() -> TapConfig:
    return get_settings().tap


def get_gd_settings() -> GdSettings:
    return get_settings().gd


def get_threshold_config() -> ThresholdConfig:
    return get_settings().threshold


def get_logging_config() -> LoggingConfig:
    return get_settings().logging
