"""
通用信道：用户给出密度 P(y | r)，所有统计量走数值积分
"""
from typing import Callable, Optional

import numpy as np
from scipy.integrate import cumulative_trapezoid, simpson

from core.errors import ChannelDefinitionError, ParameterError
from core.field import FieldTag
from numerics.quadrature import quad_radial
from .base import Channel, ChannelKind, ThresholdKernels, ThresholdSupport

# 归一化检查的容差与探测半径
NORM_TOL = 1e-3
PROBE_RADII = (0.25, 1.0, 2.5)


class GenericChannel(Channel):
    """
    Args:
        field: 数域
        density: 向量化密度 density(y, r)，y 与 r 可广播
        y_grid: 观测取值网格（采样与阈值积分都在其上进行）
    """

    kind = ChannelKind.GENERIC

    def __init__(
        self,
        field: FieldTag,
        density: Callable[[np.ndarray, np.ndarray], np.ndarray],
        y_grid: np.ndarray,
        scale: float = 1.0,
        check: bool = True,
    ):
        super().__init__(field)
        y_grid = np.asarray(y_grid, dtype=float)
        if y_grid.ndim != 1 or y_grid.shape[0] < 3 or np.any(np.diff(y_grid) <= 0):
            raise ChannelDefinitionError("y_grid 必须为严格递增的一维网格")
        if not scale > 0:
            raise ParameterError(f"scale 必须为正，当前为{scale}")
        self.density = density
        self.y_grid = y_grid
        self.scale = float(scale)
        if check:
            self._check_normalization()

    def _pdf(self, y, r):
        return np.asarray(self.density(y, np.asarray(r) / self.scale), dtype=float)

    def _check_normalization(self):
        for r in PROBE_RADII:
            values = self._pdf(self.y_grid, r)
            if np.any(~np.isfinite(values)) or np.any(values < 0):
                raise ChannelDefinitionError(f"密度在 r={r} 处出现负值或非有限值")
            mass = simpson(values, x=self.y_grid)
            if abs(mass - 1.0) > NORM_TOL:
                raise ChannelDefinitionError(f"密度在 r={r} 处积分为 {mass:.6g}，网格上不可归一化")

    def log_likelihood(self, y, r):
        with np.errstate(divide="ignore"):
            return np.log(self._pdf(y, r))

    def sample(self, z, rng):
        """网格上的逆 CDF 采样"""
        r = np.abs(np.atleast_1d(np.asarray(z)))
        pdf = self._pdf(self.y_grid[None, :], r[:, None])
        cdf = cumulative_trapezoid(pdf, x=self.y_grid, axis=1, initial=0.0)
        total = cdf[:, -1]
        if np.any(~np.isfinite(total)) or np.any(total <= 0):
            raise ChannelDefinitionError("密度在网格上不可归一化")
        cdf = cdf / total[:, None]
        u = rng.random(r.shape[0])
        out = np.empty(r.shape[0])
        for i in range(r.shape[0]):
            out[i] = np.interp(u[i], cdf[i], self.y_grid)
        return out

    def threshold_kernels(self, s):
        if not s > 0:
            raise ParameterError(f"s 必须为正，当前为{s}")
        grid = self.y_grid

        def _table(weight_power: int):
            values = np.empty(grid.shape[0])
            for i, y in enumerate(grid):
                values[i] = quad_radial(
                    lambda r, y=y: (r ** 2 - 1.0) ** weight_power * self._pdf(y, s * r), self.field
                )
            return values

        d_table = _table(0)
        n_table = _table(1)

        def D(y):
            return np.interp(np.asarray(y, dtype=float), grid, d_table, left=0.0, right=0.0)

        def N(y):
            return np.interp(np.asarray(y, dtype=float), grid, n_table, left=0.0, right=0.0)

        return ThresholdKernels(D=D, N=N, support=ThresholdSupport(False, grid[0], grid[-1]), grid=grid)

    def with_input_scale(self, c):
        return GenericChannel(self.field, self.density, self.y_grid, self.scale * c, check=False)

    def __repr__(self):
        return f"GenericChannel(field={self.field}, grid={self.y_grid.shape[0]} pts)"


def gaussian_intensity_channel(field: FieldTag, noise: float, y_grid: Optional[np.ndarray] = None) -> GenericChannel:
    """y = |z|^2 + N(0, noise^2)，作为通用信道的示例密度"""
    if not noise > 0:
        raise ParameterError(f"noise 必须为正，当前为{noise}")
    if y_grid is None:
        y_grid = np.linspace(-8.0 * noise - 1.0, 30.0, 2401)

    def density(y, r):
        return np.exp(-((y - r ** 2) ** 2) / (2.0 * noise ** 2)) / np.sqrt(2.0 * np.pi * noise ** 2)

    return GenericChannel(field, density, y_grid)
