"""
信道统计量
v(y; sigma2)、d_omega g_out、后验矩、阈值核以及 Bayes 恒等式
"""
from dataclasses import dataclass
from typing import Any, Callable, Dict, Tuple

import numpy as np

from config import get_logger
from core.errors import ChannelDefinitionError, ParameterError
from core.field import FieldTag
from .base import Channel, ThresholdKernels
from .generic import gaussian_intensity_channel
from .noiseless import NoiselessChannel
from .poisson import PoissonChannel

logger = get_logger(__name__)


def make_channel(kind: str, field: FieldTag, **params: Any) -> Channel:
    """
    按名称构造信道

    Args:
        kind: noiseless / poisson / gaussian_intensity
        params: poisson 接受 intensity；gaussian_intensity 接受 noise
    """
    name = kind.lower()
    if name in ("noiseless", "noiseless_modulus"):
        return NoiselessChannel(field, **params)
    if name == "poisson":
        return PoissonChannel(field, **params)
    if name == "gaussian_intensity":
        return gaussian_intensity_channel(field, **params)
    raise ChannelDefinitionError(f"未知信道类型: {kind}")


def sample(channel: Channel, z, rng: np.random.Generator) -> np.ndarray:
    return channel.sample(z, rng)


def posterior_second_moment(channel: Channel, sigma2: float) -> Callable[[np.ndarray], np.ndarray]:
    if not sigma2 > 0:
        raise ParameterError(f"sigma2 必须为正，当前为{sigma2}")
    return lambda y: channel.posterior_second_moment(y, sigma2)


def dgout_at_zero(channel: Channel, sigma2: float) -> Callable[[np.ndarray], np.ndarray]:
    if not sigma2 > 0:
        raise ParameterError(f"sigma2 必须为正，当前为{sigma2}")
    return lambda y: channel.dgout(y, sigma2)


def fourth_posterior_moment(channel: Channel, sigma2: float) -> Callable[[np.ndarray], np.ndarray]:
    if not sigma2 > 0:
        raise ParameterError(f"sigma2 必须为正，当前为{sigma2}")
    return lambda y: channel.fourth_posterior_moment(y, sigma2)


def denoiser_mean(channel: Channel, y, omega, b: float):
    return channel.denoiser_mean(y, omega, b)


def posterior_moments(channel: Channel, y, omega, b: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    return channel.posterior_moments(y, omega, b)


def threshold_kernels(channel: Channel, s: float) -> ThresholdKernels:
    return channel.threshold_kernels(s)


def threshold_integral(channel: Channel, s: float, exact: bool = True) -> float:
    """I(s) = \\int N^2/D；无噪声信道可直接取闭式值 2/beta"""
    if exact and isinstance(channel, NoiselessChannel):
        return channel.threshold_integral_exact()
    return channel.threshold_kernels(s).integral()


def self_consistent_sigma2(channel: Channel, y) -> float:
    return channel.self_consistent_sigma2(y)


@dataclass(frozen=True)
class ChannelStats:
    """平凡点处的信道统计量"""
    sigma2: float
    v: Callable[[np.ndarray], np.ndarray]
    dgout: Callable[[np.ndarray], np.ndarray]

    def t_star(self, y) -> np.ndarray:
        """T*(y) = dg / (1 + sigma2 dg)，未截断"""
        dg = self.dgout(y)
        return dg / (1.0 + self.sigma2 * dg)

    def identity_defect(self, y) -> float:
        """max |dg - (-1/sigma2 + v/sigma2^2)|"""
        y = np.asarray(y, dtype=float)
        lhs = self.dgout(y)
        rhs = -1.0 / self.sigma2 + self.v(y) / self.sigma2 ** 2
        return float(np.max(np.abs(lhs - rhs)))


def channel_stats(channel: Channel, sigma2: float) -> ChannelStats:
    return ChannelStats(
        sigma2=float(sigma2),
        v=posterior_second_moment(channel, sigma2),
        dgout=dgout_at_zero(channel, sigma2),
    )


@dataclass
class BayesIdentityReport:
    """
    平凡点处的 Bayes 恒等式
      mean v(y) = sigma2
      mean E[|z|^4|y] - (mean v)^2 = 2 sigma2^2 / beta
    """
    m: int
    sigma2: float
    mean_v: float
    mean_fourth: float
    differentiated: float
    differentiated_target: float

    @property
    def bayes_error(self) -> float:
        return abs(self.mean_v - self.sigma2)

    @property
    def bayes_tolerance(self) -> float:
        return 5.0 * self.sigma2 / np.sqrt(self.m)

    @property
    def differentiated_rel_error(self) -> float:
        return abs(self.differentiated - self.differentiated_target) / self.differentiated_target

    @property
    def differentiated_tolerance(self) -> float:
        return 10.0 / np.sqrt(self.m)

    @property
    def passed(self) -> bool:
        return (
            self.bayes_error <= self.bayes_tolerance
            and self.differentiated_rel_error <= self.differentiated_tolerance
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "m": self.m,
            "sigma2": self.sigma2,
            "mean_v": self.mean_v,
            "bayes_error": self.bayes_error,
            "differentiated": self.differentiated,
            "differentiated_target": self.differentiated_target,
            "differentiated_rel_error": self.differentiated_rel_error,
            "passed": self.passed,
        }


def bayes_identities(channel: Channel, y, sigma2: float) -> BayesIdentityReport:
    y = np.asarray(y, dtype=float)
    v = channel.posterior_second_moment(y, sigma2)
    fourth = channel.fourth_posterior_moment(y, sigma2)
    mean_v = float(np.mean(v))
    mean_fourth = float(np.mean(fourth))
    report = BayesIdentityReport(
        m=int(y.shape[0]),
        sigma2=float(sigma2),
        mean_v=mean_v,
        mean_fourth=mean_fourth,
        differentiated=mean_fourth - mean_v ** 2,
        differentiated_target=2.0 * sigma2 ** 2 / channel.beta,
    )
    if not report.passed:
        logger.warning(f"Bayes 恒等式偏差超出统计容差: {report.to_dict()}")
    return report


