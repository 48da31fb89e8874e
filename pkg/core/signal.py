"""
信号生成：方差为 rho 的 i.i.d. 高斯先验
"""
import numpy as np

from .errors import ParameterError
from .field import FieldTag
from .rng import make_rng, STREAM_SIGNAL


def generate_signal(field: FieldTag, n: int, rho: float, seed: int) -> np.ndarray:
    """
    生成真实信号 x*

    实数域为 N(0, rho)，复数域为圆对称复高斯（每个分量方差 rho/2）
    """
    if int(n) != n or n < 1:
        raise ParameterError(f"n 必须为正整数，当前为{n}")
    if not rho > 0:
        raise ParameterError(f"rho 必须为正，当前为{rho}")
    rng = make_rng(seed, STREAM_SIGNAL)
    return np.sqrt(rho) * field.standard_normal(rng, int(n))
