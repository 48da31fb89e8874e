"""
核心数据类型：谱矩、问题实例、估计结果
"""
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, Optional, Protocol

import numpy as np

from .errors import ParameterError
from .field import FieldTag


class MomentSource(Enum):
    ANALYTIC = "analytic"
    EMPIRICAL = "empirical"


class EstimateSource(Enum):
    TAP_TOP = "tap_top"
    LAMP_TOP = "lamp_top"
    LAMP_BULK = "lamp_bulk"
    MM = "mm"
    VAMP = "vamp"
    GD = "gd"


@dataclass(frozen=True)
class SpectralMoments:
    """Phi^H Phi / n 的谱测度一阶、二阶矩"""
    mean_lambda: float
    mean_lambda_sq: float
    source: MomentSource = MomentSource.ANALYTIC

    def __post_init__(self):
        if self.mean_lambda <= 0 or self.mean_lambda_sq <= 0:
            raise ParameterError(
                f"谱矩必须为正: <lambda>={self.mean_lambda}, <lambda^2>={self.mean_lambda_sq}"
            )
        # Jensen, 留一点舍入余量
        if self.mean_lambda_sq < self.mean_lambda ** 2 * (1 - 1e-12):
            raise ParameterError(
                f"<lambda^2>={self.mean_lambda_sq} < <lambda>^2={self.mean_lambda ** 2}"
            )


class SensingLike(Protocol):
    """Instance 依赖的感知算子接口（实现见 ensembles）"""
    field: FieldTag
    n: int
    m: int

    def apply(self, x: np.ndarray) -> np.ndarray: ...

    def adjoint(self, z: np.ndarray) -> np.ndarray: ...


@dataclass(frozen=True)
class Instance:
    field: FieldTag
    n: int
    m: int
    rho: float
    phi: Any
    y: np.ndarray
    moments: SpectralMoments
    seed: int = 0
    x_star: Optional[np.ndarray] = None
    meta: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ParameterError(f"非法维度 n={self.n}, m={self.m}")
        if self.rho <= 0:
            raise ParameterError(f"rho 必须为正，当前为{self.rho}")
        if len(self.y) != self.m:
            raise ParameterError(f"len(y)={len(self.y)} 与 m={self.m} 不一致")
        if self.x_star is not None and len(self.x_star) != self.n:
            raise ParameterError(f"len(x_star)={len(self.x_star)} 与 n={self.n} 不一致")

    @property
    def alpha(self) -> float:
        return self.m / self.n

    @property
    def alpha_ratio(self) -> Fraction:
        return Fraction(self.m, self.n)

    @property
    def beta(self) -> int:
        return self.field.beta

    @property
    def sigma2(self) -> float:
        """平凡点处的高斯参考方差 rho <lambda> / alpha"""
        return self.rho * self.moments.mean_lambda / self.alpha

    def with_rho(self, rho: float) -> "Instance":
        return replace(self, rho=float(rho))

    def with_moments(self, moments: SpectralMoments) -> "Instance":
        return replace(self, moments=moments)

    def with_phi(self, phi: Any, moments: Optional[SpectralMoments] = None) -> "Instance":
        """替换感知算子；未给出谱矩时取新算子自带的谱矩"""
        return replace(self, phi=phi, moments=moments or getattr(phi, "moments", None) or self.moments)


@dataclass
class Estimate:
    x_hat: np.ndarray
    source: EstimateSource
    eigenvalue: complex = float("nan")
    overlap: float = float("nan")
    mse: float = float("nan")
    meta: Dict[str, Any] = field(default_factory=dict)
