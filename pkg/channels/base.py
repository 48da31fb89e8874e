"""
观测信道基类
P_out(y|z) 只依赖 |z|，所有统计量都通过径向积分或后验网格积分得到
"""
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.integrate import quad, simpson
from scipy.optimize import brentq
from scipy.special import i0e, i1e

from config import get_quadrature_config
from core.errors import NumericalError, ParameterError
from core.field import FieldTag
from numerics.quadrature import quad_radial

# 后验网格的高斯窗口半宽（单位 sqrt(b)）
WINDOW = 12.0
# 分块大小，控制网格矩阵的内存
CHUNK = 512


class ChannelKind(Enum):
    NOISELESS = "noiseless"
    POISSON = "poisson"
    GENERIC = "generic"


@dataclass(frozen=True)
class ThresholdSupport:
    """阈值积分的支撑：离散计数 0..k_max 或连续区间"""
    discrete: bool
    lo: float
    hi: float

    def points(self) -> np.ndarray:
        if not self.discrete:
            raise ValueError("连续支撑没有离散点")
        return np.arange(int(self.lo), int(self.hi) + 1, dtype=float)


@dataclass(frozen=True)
class ThresholdKernels:
    """D(y) = \\int D z P(y|sz), N(y) = \\int D z (|z|^2-1) P(y|sz)"""
    D: Callable[[np.ndarray], np.ndarray]
    N: Callable[[np.ndarray], np.ndarray]
    support: ThresholdSupport
    grid: Optional[np.ndarray] = None

    def integral(self) -> float:
        """I = \\int dy N^2/D（离散信道为求和）"""
        if self.support.discrete:
            k = self.support.points()
            D, N = self.D(k), self.N(k)
            mask = D > 0
            return float(np.sum(N[mask] ** 2 / D[mask]))
        if self.grid is not None:
            D, N = self.D(self.grid), self.N(self.grid)
            ratio = np.where(D > 0, N ** 2 / np.where(D > 0, D, 1.0), 0.0)
            return float(simpson(ratio, x=self.grid))

        def integrand(y):
            d = float(self.D(np.array([y]))[0])
            if d <= 0:
                return 0.0
            return float(self.N(np.array([y]))[0]) ** 2 / d

        value, _ = quad(integrand, self.support.lo, self.support.hi,
                        epsabs=1e-13, epsrel=1e-11, limit=200)
        return float(value)


class Channel(ABC):
    """观测信道"""

    kind: ChannelKind

    def __init__(self, field: FieldTag):
        self.field = field

    @property
    def beta(self) -> int:
        return self.field.beta

    # ---- 必须实现 ----

    @abstractmethod
    def sample(self, z: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        """按 P_out(.|z) 采样观测"""

    @abstractmethod
    def log_likelihood(self, y: np.ndarray, r: np.ndarray) -> np.ndarray:
        """log P_out(y | |z| = r)，y 与 r 可广播"""

    @abstractmethod
    def threshold_kernels(self, s: float) -> ThresholdKernels:
        pass

    @abstractmethod
    def with_input_scale(self, c: float) -> "Channel":
        """返回 P(y|z/c) 对应的信道"""

    # ---- 默认实现：径向积分 ----

    def posterior_radial_moment(self, y: np.ndarray, sigma2: float, power: int) -> np.ndarray:
        """E[|z|^power | y] 在先验 N_beta(0, sigma2) 下的后验矩"""
        if not sigma2 > 0:
            raise ParameterError(f"sigma2 必须为正，当前为{sigma2}")
        y = np.atleast_1d(np.asarray(y, dtype=float))
        scale = np.sqrt(sigma2)
        values, inverse = np.unique(y, return_inverse=True)
        out = np.empty(values.shape[0])
        for i, yi in enumerate(values):
            shift = float(np.max(self.log_likelihood(yi, scale * np.linspace(0.0, 8.0, 401))))
            if not np.isfinite(shift):
                shift = 0.0

            def weight(r, yi=yi, shift=shift):
                return np.exp(self.log_likelihood(yi, scale * r) - shift)

            num = quad_radial(lambda r: r ** power * weight(r), self.field)
            den = quad_radial(weight, self.field)
            if den <= 0:
                raise NumericalError(f"y={yi} 的后验归一化为零")
            out[i] = sigma2 ** (power / 2) * num / den
        return out[inverse]

    def posterior_second_moment(self, y: np.ndarray, sigma2: float) -> np.ndarray:
        return self.posterior_radial_moment(y, sigma2, 2)

    def fourth_posterior_moment(self, y: np.ndarray, sigma2: float) -> np.ndarray:
        return self.posterior_radial_moment(y, sigma2, 4)

    def dgout(self, y: np.ndarray, sigma2: float) -> np.ndarray:
        """d_omega g_out(y, 0, sigma2) = -1/sigma2 + v(y)/sigma2^2"""
        return -1.0 / sigma2 + self.posterior_second_moment(y, sigma2) / sigma2 ** 2

    def likelihood_window(self, y: np.ndarray) -> Optional[Tuple[np.ndarray, np.ndarray]]:
        """似然在 r 上的主要支撑，未知时返回 None"""
        return None

    def self_consistent_sigma2(self, y: np.ndarray) -> float:
        """求 sigma2 = mean v(y; sigma2)"""
        y = np.asarray(y, dtype=float)
        scale = max(float(np.mean(y ** 2)), 1e-8)

        def gap(s):
            return float(np.mean(self.posterior_second_moment(y, s))) - s

        lo, hi = 1e-4 * scale, 1e2 * scale
        if gap(lo) * gap(hi) > 0:
            raise NumericalError("self-consistent sigma2 不在搜索区间内")
        return float(brentq(gap, lo, hi, xtol=1e-14 * scale, rtol=1e-13))

    # ---- 倾斜后验 P_out(y|z) exp(-beta|z-omega|^2/2b) ----

    def posterior_moments(self, y, omega, b: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        返回 (log Z, E[z], E|z|^2)

        Z = \\int dz P_out(y|z) N_beta(z; omega, b)，N_beta 为总方差 b 的高斯密度
        """
        if not b > 0:
            raise ParameterError(f"b 必须为正，当前为{b}")
        y = np.atleast_1d(np.asarray(y, dtype=float))
        omega = np.broadcast_to(np.asarray(omega), y.shape)
        logz = np.empty(y.shape)
        mean = np.empty(y.shape, dtype=self.field.dtype)
        second = np.empty(y.shape)
        for start in range(0, y.shape[0], CHUNK):
            sl = slice(start, start + CHUNK)
            if self.beta == 1:
                out = self._line_posterior(y[sl], np.real(omega[sl]).astype(float), b)
            else:
                out = self._polar_posterior(y[sl], omega[sl].astype(complex), b)
            logz[sl], mean[sl], second[sl] = out
        return logz, mean, second

    def denoiser_mean(self, y, omega, b: float) -> np.ndarray:
        return self.posterior_moments(y, omega, b)[1]

    def _window(self, y: np.ndarray, center: np.ndarray, b: float, line: bool):
        half = WINDOW * np.sqrt(b)
        lo = center - half
        hi = center + half
        if not line:
            lo = np.maximum(lo, 0.0)
        hint = self.likelihood_window(y)
        if hint is not None:
            l_lo, l_hi = hint
            if line:
                n_lo, n_hi = np.maximum(lo, -l_hi), np.minimum(hi, l_hi)
            else:
                n_lo, n_hi = np.maximum(lo, l_lo), np.minimum(hi, l_hi)
            ok = n_lo < n_hi
            lo = np.where(ok, n_lo, lo)
            hi = np.where(ok, n_hi, hi)
        return lo, hi

    def _grid_size(self) -> int:
        return get_quadrature_config().posterior_grid

    def _polar_posterior(self, y, omega, b):
        G = self._grid_size()
        amp = np.abs(omega)
        lo, hi = self._window(y, amp, b, line=False)
        t = np.linspace(0.0, 1.0, G)
        r = lo[:, None] + (hi - lo)[:, None] * t[None, :]
        kappa = 2.0 * r * amp[:, None] / b
        with np.errstate(divide="ignore", invalid="ignore"):
            log_w = (
                np.log(2.0 * r / b)
                + self.log_likelihood(y[:, None], r)
                - (r - amp[:, None]) ** 2 / b
                + np.log(i0e(kappa))
            )
        shift = np.max(log_w, axis=1, keepdims=True)
        shift = np.where(np.isfinite(shift), shift, 0.0)
        w = np.exp(log_w - shift)
        w = np.where(np.isfinite(w), w, 0.0)
        ratio = np.where(kappa > 0, i1e(kappa) / i0e(kappa), 0.0)
        z0 = simpson(w, x=r, axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            logz = np.log(z0) + shift[:, 0]
            radial_mean = simpson(w * r * ratio, x=r, axis=1) / z0
            second = simpson(w * r ** 2, x=r, axis=1) / z0
        phase = np.where(amp > 0, omega / np.where(amp > 0, amp, 1.0), 0.0)
        return logz, radial_mean * phase, second

    def _line_posterior(self, y, omega, b):
        G = self._grid_size()
        lo, hi = self._window(y, omega, b, line=True)
        t = np.linspace(0.0, 1.0, G)
        h = lo[:, None] + (hi - lo)[:, None] * t[None, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            log_w = (
                -0.5 * np.log(2.0 * np.pi * b)
                + self.log_likelihood(y[:, None], np.abs(h))
                - (h - omega[:, None]) ** 2 / (2.0 * b)
            )
        shift = np.max(log_w, axis=1, keepdims=True)
        shift = np.where(np.isfinite(shift), shift, 0.0)
        w = np.exp(log_w - shift)
        w = np.where(np.isfinite(w), w, 0.0)
        z0 = simpson(w, x=h, axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            logz = np.log(z0) + shift[:, 0]
            mean = simpson(w * h, x=h, axis=1) / z0
            second = simpson(w * h ** 2, x=h, axis=1) / z0
        return logz, mean, second

    # ---- TAP 需要：反解 omega 使后验均值等于给定值 ----

    def omega_for_mean(self, y, target, b: float) -> np.ndarray:
        """求 omega 使 E[z | y, omega, b] = target"""
        y = np.atleast_1d(np.asarray(y, dtype=float))
        target = np.broadcast_to(np.asarray(target), y.shape)
        out = np.zeros(y.shape, dtype=self.field.dtype)
        for i in range(y.shape[0]):
            p = target[i]
            size = abs(p)
            if size == 0:
                continue
            phase = p / size

            def gap(w, i=i, phase=phase):
                return float(np.real(np.conj(phase) * self.denoiser_mean(y[i:i + 1], phase * w, b)[0])) - size

            hi = max(1.0, 4.0 * np.sqrt(b))
            while gap(hi) < 0:
                hi *= 2.0
                if hi > 1e8:
                    raise NumericalError(f"目标均值 {size:.6g} 超出可达范围 (y={y[i]})")
            out[i] = phase * brentq(gap, 0.0, hi, xtol=1e-14, rtol=1e-13)
        return out

    def __repr__(self) -> str:
        return f"{type(self).__name__}(field={self.field})"


