"""
泊松信道 k ~ Poisson(Lambda |z|^2)
"""
import math

import numpy as np
from scipy.special import gammaln, xlogy

from core.errors import ParameterError
from core.field import FieldTag
from .base import Channel, ChannelKind, ThresholdKernels, ThresholdSupport


class PoissonChannel(Channel):

    kind = ChannelKind.POISSON

    def __init__(self, field: FieldTag, intensity: float = 1.0):
        super().__init__(field)
        if not intensity > 0:
            raise ParameterError(f"泊松强度必须为正，当前为{intensity}")
        self.intensity = float(intensity)

    def sample(self, z, rng):
        lam = self.intensity * np.abs(np.asarray(z)) ** 2
        return rng.poisson(lam).astype(float)

    def log_likelihood(self, y, r):
        k = np.asarray(y, dtype=float)
        mu = self.intensity * np.asarray(r, dtype=float) ** 2
        return -mu + xlogy(k, mu) - gammaln(k + 1.0)

    def likelihood_window(self, y):
        # 似然在 u = r^2 上正比于 Gamma(k+1, Lambda)
        k = np.asarray(y, dtype=float)
        spread = 12.0 * np.sqrt(k + 1.0)
        u_lo = np.maximum(k + 1.0 - spread, 0.0) / self.intensity
        u_hi = (k + 1.0 + spread + 12.0) / self.intensity
        return np.sqrt(u_lo), np.sqrt(u_hi)

    def _rate(self, sigma2: float) -> float:
        if not sigma2 > 0:
            raise ParameterError(f"sigma2 必须为正，当前为{sigma2}")
        return self.intensity + self.beta / (2.0 * sigma2)

    def posterior_second_moment(self, y, sigma2):
        """后验 |z|^2 ~ Gamma(k + beta/2, Lambda + beta/(2 sigma2))"""
        k = np.asarray(y, dtype=float)
        return (k + self.beta / 2.0) / self._rate(sigma2)

    def self_consistent_sigma2(self, y):
        # sigma2 (Lambda + beta/2sigma2) = mean k + beta/2  =>  sigma2 = mean k / Lambda
        return float(np.mean(np.asarray(y, dtype=float))) / self.intensity

    def k_max(self, s: float) -> int:
        return int(math.ceil(10.0 * self.intensity * s ** 2 + 40.0))

    def threshold_kernels(self, s):
        if not s > 0:
            raise ParameterError(f"s 必须为正，当前为{s}")
        a = self.intensity * s ** 2
        h = self.beta / 2.0

        def D(k):
            k = np.asarray(k, dtype=float)
            log_d = (
                xlogy(k, a) - gammaln(k + 1.0)
                + h * math.log(h) + gammaln(k + h) - gammaln(h)
                - (k + h) * math.log(a + h)
            )
            return np.exp(log_d)

        def N(k):
            k = np.asarray(k, dtype=float)
            return D(k) * ((k + h) / (a + h) - 1.0)

        return ThresholdKernels(D=D, N=N, support=ThresholdSupport(True, 0, self.k_max(s)))

    def with_input_scale(self, c):
        return PoissonChannel(self.field, self.intensity / c ** 2)

    def __repr__(self):
        return f"PoissonChannel(field={self.field}, intensity={self.intensity})"
