"""
无噪声模信道 y = |z| / c
"""
import numpy as np
from scipy.special import i0e, i1e

from core.errors import ParameterError
from core.field import FieldTag
from .base import Channel, ChannelKind, ThresholdKernels, ThresholdSupport

# 阈值积分的上限（单位 s）
Y_MAX = 12.0


def bessel_ratio(kappa: np.ndarray) -> np.ndarray:
    """I1(k)/I0(k)，指数缩放形式保证大参数稳定，k=0 时为 0"""
    kappa = np.asarray(kappa, dtype=float)
    return np.where(kappa > 0, i1e(kappa) / i0e(kappa), 0.0)


def inverse_bessel_ratio(s: np.ndarray, iters: int = 60) -> np.ndarray:
    """
    解 I1(k)/I0(k) = s, s in [0, 1)
    带保护的向量化 Newton，导数 R' = 1 - R/k - R^2
    """
    s = np.clip(np.asarray(s, dtype=float), 0.0, 1.0 - 1e-15)
    kappa = 2.0 * s / (1.0 - s ** 2)
    lo = np.zeros_like(s)
    hi = np.full_like(s, np.inf)
    for _ in range(iters):
        R = bessel_ratio(kappa)
        gap = R - s
        lo = np.where(gap < 0, kappa, lo)
        hi = np.where(gap > 0, kappa, hi)
        with np.errstate(divide="ignore", invalid="ignore"):
            slope = np.where(kappa > 0, 1.0 - R / kappa - R ** 2, 0.5)
            step = kappa - gap / slope
        bisect = np.where(np.isfinite(hi), 0.5 * (lo + hi), 2.0 * kappa + 1.0)
        bad = ~np.isfinite(step) | (step <= lo) | (step >= hi)
        kappa = np.where(bad, bisect, step)
        if np.all(np.abs(gap) <= 1e-15 * np.maximum(s, 1e-300)):
            break
    return np.where(s > 0, kappa, 0.0)


class NoiselessChannel(Channel):
    """y = |z|/c，观测存储为模而非模平方"""

    kind = ChannelKind.NOISELESS

    def __init__(self, field: FieldTag, scale: float = 1.0):
        super().__init__(field)
        if not scale > 0:
            raise ParameterError(f"scale 必须为正，当前为{scale}")
        self.scale = float(scale)

    def sample(self, z, rng=None):
        return np.abs(np.asarray(z)) / self.scale

    def log_likelihood(self, y, r):
        # delta 密度没有逐点对数似然，网格积分不适用
        raise NotImplementedError("无噪声信道使用闭式后验")

    def posterior_second_moment(self, y, sigma2):
        if not sigma2 > 0:
            raise ParameterError(f"sigma2 必须为正，当前为{sigma2}")
        return (self.scale * np.asarray(y, dtype=float)) ** 2

    def fourth_posterior_moment(self, y, sigma2):
        return self.posterior_second_moment(y, sigma2) ** 2

    def self_consistent_sigma2(self, y):
        return float(np.mean((self.scale * np.asarray(y, dtype=float)) ** 2))

    def posterior_moments(self, y, omega, b):
        if not b > 0:
            raise ParameterError(f"b 必须为正，当前为{b}")
        yc = self.scale * np.atleast_1d(np.asarray(y, dtype=float))
        omega = np.broadcast_to(np.asarray(omega), yc.shape)
        with np.errstate(divide="ignore"):
            if self.beta == 1:
                w = np.real(omega).astype(float)
                a = yc * w / b
                log_cosh = np.logaddexp(a, -a) - np.log(2.0)
                logz = np.log(2.0 / np.sqrt(2.0 * np.pi * b)) - (yc ** 2 + w ** 2) / (2.0 * b) + log_cosh
                mean = yc * np.tanh(a)
            else:
                amp = np.abs(omega)
                kappa = 2.0 * yc * amp / b
                logz = np.log(2.0 * yc / b) - (yc - amp) ** 2 / b + np.log(i0e(kappa))
                phase = np.where(amp > 0, omega / np.where(amp > 0, amp, 1.0), 0.0)
                mean = yc * bessel_ratio(kappa) * phase
        # 观测密度的 Jacobian
        logz = logz + np.log(self.scale)
        return logz, mean, yc ** 2

    def omega_for_mean(self, y, target, b):
        yc = self.scale * np.atleast_1d(np.asarray(y, dtype=float))
        target = np.broadcast_to(np.asarray(target), yc.shape)
        if self.beta == 1:
            ratio = np.clip(np.real(target) / yc, -1.0 + 1e-15, 1.0 - 1e-15)
            return (b / yc) * np.arctanh(ratio)
        amp = np.abs(target)
        kappa = inverse_bessel_ratio(amp / yc)
        phase = np.where(amp > 0, target / np.where(amp > 0, amp, 1.0), 0.0)
        return kappa * b / (2.0 * yc) * phase

    def radial_density(self, y, s):
        """s|z| (z ~ D_beta) 的密度"""
        y = np.asarray(y, dtype=float)
        if self.beta == 2:
            return (2.0 * y / s ** 2) * np.exp(-(y / s) ** 2)
        return 2.0 / (s * np.sqrt(2.0 * np.pi)) * np.exp(-(y / s) ** 2 / 2.0) * (y >= 0)

    def threshold_kernels(self, s):
        if not s > 0:
            raise ParameterError(f"s 必须为正，当前为{s}")
        s_eff = s / self.scale

        def D(y):
            return self.radial_density(y, s_eff)

        def N(y):
            y = np.asarray(y, dtype=float)
            return ((y / s_eff) ** 2 - 1.0) * self.radial_density(y, s_eff)

        return ThresholdKernels(D=D, N=N, support=ThresholdSupport(False, 0.0, Y_MAX * s_eff))

    def threshold_integral_exact(self) -> float:
        """\\int N^2/D = E(|z|^2 - 1)^2 = 2/beta"""
        return 2.0 / self.beta

    def with_input_scale(self, c):
        return NoiselessChannel(self.field, self.scale * c)

    def __repr__(self):
        return f"NoiselessChannel(field={self.field}, scale={self.scale})"
