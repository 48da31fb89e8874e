"""
预处理函数 T(y)
- t_star: T* = dg / (1 + sigma2 dg)
- t_mm:   T_MM = dg' / (sqrt(2 alpha / beta) + dg')，dg' = sigma2 dg 为 sigma2=1 标度下的值
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

import numpy as np

from config import get_logger, get_spectral_config
from core.errors import ParameterError, PoleError
from core.types import Instance

logger = get_logger(__name__)


class PreprocessingKind(Enum):
    T_STAR = "t_star"
    T_MM = "t_mm"
    CUSTOM = "custom"


@dataclass
class Preprocessing:
    kind: PreprocessingKind
    weights: np.ndarray
    sigma2: float
    raw: Optional[np.ndarray] = None
    dg: Optional[np.ndarray] = None
    clamp_count: int = 0
    pole_count: int = 0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)


def _mobius(dg: np.ndarray, offset: float, scale: float, low: float, high: float):
    """
    w = dg / (offset + scale dg)，近极点处按 dg 的符号取截断边界，再截断到 [low, high]
    返回 (weights, raw, clamp_count, pole_count)
    """
    config = get_spectral_config()
    denom = offset + scale * dg
    if np.any(denom == 0.0):
        bad = int(np.flatnonzero(denom == 0.0)[0])
        raise PoleError(f"预处理在第 {bad} 个观测处遇到精确极点 (dg={dg[bad]!r})")
    near = np.abs(denom) < config.pole_eps
    with np.errstate(divide="ignore", invalid="ignore"):
        raw = dg / denom
    substituted = np.where(dg > 0, high, low)
    weights = np.where(near, substituted, raw)
    outside = (weights < low) | (weights > high)
    weights = np.clip(weights, low, high)
    return weights, raw, int(np.count_nonzero(outside)), int(np.count_nonzero(near))


def make_t_star(instance: Instance, channel, sigma2: Optional[float] = None) -> Preprocessing:
    """最优预处理 T*，截断到 [clamp_low/sigma2, clamp_high/sigma2]"""
    config = get_spectral_config()
    sigma2 = instance.sigma2 if sigma2 is None else sigma2
    dg = np.asarray(channel.dgout(instance.y, sigma2), dtype=float)
    weights, raw, clamped, poles = _mobius(
        dg, 1.0, sigma2, config.clamp_low / sigma2, config.clamp_high / sigma2
    )
    if poles:
        logger.warning(f"T*: {poles} 个观测接近极点，已替换为截断边界")
    if clamped:
        logger.info(f"T*: 截断 {clamped}/{instance.m} 个权重")
    return Preprocessing(PreprocessingKind.T_STAR, weights, sigma2, raw, dg, clamped, poles)


def make_t_mm(instance: Instance, channel) -> Preprocessing:
    """T_MM，在 rho=1、<lambda>=alpha 标度下构造"""
    config = get_spectral_config()
    sigma2 = instance.sigma2
    dg = np.asarray(channel.dgout(instance.y, sigma2), dtype=float)
    dg_unit = sigma2 * dg
    offset = np.sqrt(2.0 * instance.alpha / instance.beta)
    weights, raw, clamped, poles = _mobius(dg_unit, offset, 1.0, -config.mm_clamp, config.mm_clamp)
    if poles:
        logger.warning(f"T_MM: {poles} 个观测接近极点，已替换为截断边界")
    return Preprocessing(PreprocessingKind.T_MM, weights, 1.0, raw, dg, clamped, poles)


def make_custom(instance: Instance, func: Callable[[np.ndarray], np.ndarray], sigma2: Optional[float] = None) -> Preprocessing:
    weights = np.asarray(func(instance.y), dtype=float)
    if weights.shape != (instance.m,):
        raise ParameterError(f"权重长度 {weights.shape} 与 m={instance.m} 不一致")
    return Preprocessing(
        PreprocessingKind.CUSTOM, weights, instance.sigma2 if sigma2 is None else sigma2, raw=weights.copy()
    )
