"""
谱矩随 alpha 的变化 <lambda>(alpha), <lambda^2>(alpha)
"""
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Sequence

import numpy as np

from config import get_logger, get_threshold_config
from core.errors import ParameterError
from core.field import FieldTag
from core.types import MomentSource, SpectralMoments
from ensembles.makers import gaussian_moments, make_ensemble, product_moments
from ensembles.moments import estimate_moments

logger = get_logger(__name__)

# 列正交类集合的谱恒为 1
ORTHONORMAL_KINDS = ("haar_columns", "subsampled_hadamard", "partial_dft", "subsampled_dct")


class MomentFunctionSource(Enum):
    ANALYTIC = "analytic"
    EMPIRICAL_INTERPOLATED = "empirical_interpolated"


@dataclass(frozen=True)
class MomentFunctions:
    mean_of_alpha: Callable[[float], float]
    meansq_of_alpha: Callable[[float], float]
    source: MomentFunctionSource = MomentFunctionSource.ANALYTIC

    def __call__(self, alpha: float) -> SpectralMoments:
        mean = float(self.mean_of_alpha(alpha))
        meansq = max(float(self.meansq_of_alpha(alpha)), mean ** 2)
        source = MomentSource.ANALYTIC if self.source is MomentFunctionSource.ANALYTIC else MomentSource.EMPIRICAL
        return SpectralMoments(mean, meansq, source)


def constant_moments(moments: SpectralMoments) -> MomentFunctions:
    """与 alpha 无关的谱矩"""
    return MomentFunctions(lambda a: moments.mean_lambda, lambda a: moments.mean_lambda_sq)


def _product_p(n: int, alpha: float, gamma: float, ratio_base: str) -> float:
    if ratio_base == "n":
        return gamma * n
    if ratio_base == "m":
        return gamma * alpha * n
    raise ParameterError(f"ratio_base 只能为 'n' 或 'm'，当前为{ratio_base}")


def analytic_moments(kind: str, gamma: float = 1.0, ratio_base: str = "m") -> MomentFunctions:
    """
    解析谱矩
    gaussian_iid: Marchenko-Pastur；列正交集合: (1, 1)；gaussian_product: 自由乘积
    """
    if kind == "gaussian_iid":
        return MomentFunctions(lambda a: a, lambda a: gaussian_moments(a).mean_lambda_sq)
    if kind in ORTHONORMAL_KINDS:
        return MomentFunctions(lambda a: 1.0, lambda a: 1.0)
    if kind == "gaussian_product":
        # product_moments 只依赖 n/p
        def meansq(a):
            return product_moments(a, 1, _product_p(1, a, gamma, ratio_base)).mean_lambda_sq
        return MomentFunctions(lambda a: a, meansq)
    raise ParameterError(f"未知感知矩阵集合: {kind}")


def empirical_moments(
    kind: str,
    field: FieldTag,
    n: int,
    bracket: Optional[Sequence[float]] = None,
    grid_points: Optional[int] = None,
    seed: int = 0,
    gamma: float = 1.0,
    ratio_base: str = "m",
    probes: Optional[int] = None,
) -> MomentFunctions:
    """
    在 alpha 的对数网格上生成实例并估计谱矩

    <lambda>/alpha 与 <lambda^2>/alpha^2 对 1/alpha 线性插值
    （高斯与乘积集合的解析矩正是 1/alpha 的一次式）
    """
    config = get_threshold_config()
    lo, hi = bracket or config.bracket
    grid_points = grid_points or config.grid_points
    probes = probes or config.moment_probes
    if grid_points < 2:
        raise ParameterError(f"网格点数至少为 2，当前为{grid_points}")

    inv = np.empty(grid_points)
    mean_ratio = np.empty(grid_points)
    meansq_ratio = np.empty(grid_points)
    for i, alpha in enumerate(np.geomspace(lo, hi, grid_points)):
        m = max(1, int(round(alpha * n)))
        a = m / n
        params = {}
        if kind == "gaussian_product":
            params["p"] = max(1, int(round(_product_p(n, a, gamma, ratio_base))))
        op = make_ensemble(kind, field, n, m, seed + i, **params)
        moments = estimate_moments(op, probes=probes, seed=seed + i)
        inv[i] = 1.0 / a
        mean_ratio[i] = moments.mean_lambda / a
        meansq_ratio[i] = moments.mean_lambda_sq / a ** 2
        logger.debug(f"经验谱矩 alpha={a:.4g}: {moments}")

    order = np.argsort(inv)
    inv, mean_ratio, meansq_ratio = inv[order], mean_ratio[order], meansq_ratio[order]

    def mean(a):
        return a * float(np.interp(1.0 / a, inv, mean_ratio))

    def meansq(a):
        return a ** 2 * float(np.interp(1.0 / a, inv, meansq_ratio))

    return MomentFunctions(mean, meansq, MomentFunctionSource.EMPIRICAL_INTERPOLATED)
