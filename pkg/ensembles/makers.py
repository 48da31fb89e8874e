"""
感知矩阵集合的构造
"""
import numpy as np
import scipy.linalg as sla

from config import get_logger
from core.errors import ParameterError, ShapeError
from core.field import FieldTag, REAL, COMPLEX
from core.rng import make_rng, STREAM_OPERATOR
from core.types import MomentSource, SpectralMoments
from .moments import estimate_moments
from .operators import (
    DctSensing,
    DenseSensing,
    DftSensing,
    EnsembleKind,
    HadamardSensing,
    SensingOperator,
)

logger = get_logger(__name__)

# 乘积矩阵按行分块生成
ROW_CHUNK = 1024


def _check_dims(n: int, m: int):
    if int(n) != n or int(m) != m or n < 1 or m < 1:
        raise ShapeError(f"非法维度 n={n}, m={m}")


def _is_power_of_two(k: int) -> bool:
    return k > 0 and (k & (k - 1)) == 0


def gaussian_moments(alpha: float) -> SpectralMoments:
    """Marchenko-Pastur: <lambda> = alpha, <lambda^2> = alpha^2 + alpha"""
    return SpectralMoments(alpha, alpha ** 2 + alpha, MomentSource.ANALYTIC)


def product_moments(alpha: float, n: int, p: int) -> SpectralMoments:
    """W1 W2 / sqrt(p) 的自由乘积矩: <lambda^2> = alpha^2 + alpha + alpha^2 n/p"""
    return SpectralMoments(alpha, alpha ** 2 + alpha + alpha ** 2 * n / p, MomentSource.ANALYTIC)


def make_gaussian(field: FieldTag, n: int, m: int, seed: int) -> SensingOperator:
    """i.i.d. 单位方差高斯 Phi"""
    _check_dims(n, m)
    rng = make_rng(seed, STREAM_OPERATOR)
    phi = field.standard_normal(rng, (m, n))
    return DenseSensing(
        phi / np.sqrt(n), field, EnsembleKind.GAUSSIAN,
        moments=gaussian_moments(m / n), params={"seed": seed},
    )


def make_haar_columns(field: FieldTag, n: int, m: int, seed: int) -> SensingOperator:
    """Phi = sqrt(n) Q，Q 为高斯矩阵 QR 分解的列正交因子（R 对角相位归正）"""
    _check_dims(n, m)
    if m < n:
        raise ShapeError(f"列正交集合要求 m >= n，当前 m={m}, n={n}")
    rng = make_rng(seed, STREAM_OPERATOR)
    G = field.standard_normal(rng, (m, n))
    Q, R = sla.qr(G, mode="economic")
    d = np.diag(R)
    phase = d / np.abs(d)
    Q = Q * phase[None, :]
    return DenseSensing(
        Q, field, EnsembleKind.HAAR,
        moments=SpectralMoments(1.0, 1.0, MomentSource.ANALYTIC),
        params={"seed": seed}, orthonormal=True,
    )


def _select_columns(rng: np.random.Generator, n: int, m: int) -> np.ndarray:
    return np.sort(rng.choice(m, size=n, replace=False))


def make_subsampled_hadamard(n: int, m: int, seed: int, field: FieldTag = REAL) -> SensingOperator:
    """m x m 归一化 Walsh-Hadamard 矩阵随机取 n 列，输入乘随机符号"""
    _check_dims(n, m)
    if field.beta != 1:
        raise ParameterError("Hadamard 集合只支持实数域")
    if not _is_power_of_two(m):
        raise ShapeError(f"m 必须为 2 的幂，当前为{m}")
    if m < n:
        raise ShapeError(f"要求 m >= n，当前 m={m}, n={n}")
    rng = make_rng(seed, STREAM_OPERATOR)
    columns = _select_columns(rng, n, m)
    signs = rng.choice(np.array([-1.0, 1.0]), size=n)
    return HadamardSensing(n, m, columns, signs, params={"seed": seed})


def make_partial_dft(n: int, m: int, seed: int, field: FieldTag = COMPLEX) -> SensingOperator:
    """Phi/sqrt(n) = F S P：酉 DFT、随机列选择、随机相位对角"""
    _check_dims(n, m)
    if field.beta != 2:
        raise ParameterError("部分 DFT 集合只支持复数域")
    if m < n:
        raise ShapeError(f"要求 m >= n，当前 m={m}, n={n}")
    rng = make_rng(seed, STREAM_OPERATOR)
    columns = _select_columns(rng, n, m)
    phases = np.exp(2j * np.pi * rng.random(n))
    return DftSensing(n, m, columns, phases, params={"seed": seed})


def make_subsampled_dct(n: int, m: int, seed: int, field: FieldTag = REAL) -> SensingOperator:
    """正交 DCT-II 随机取 n 列，输入乘随机符号"""
    _check_dims(n, m)
    if field.beta != 1:
        raise ParameterError("DCT 集合只支持实数域")
    if m < n:
        raise ShapeError(f"要求 m >= n，当前 m={m}, n={n}")
    rng = make_rng(seed, STREAM_OPERATOR)
    columns = _select_columns(rng, n, m)
    signs = rng.choice(np.array([-1.0, 1.0]), size=n)
    return DctSensing(n, m, columns, signs, params={"seed": seed})


def make_gaussian_product(field: FieldTag, n: int, m: int, p: int, seed: int,
                          probes: int = 20) -> SensingOperator:
    """
    Phi = W1 W2 / sqrt(p)，W1 in K^{m x p}, W2 in K^{p x n}

    谱矩由 estimate_moments 经验估计；尺寸比记为 gamma = p/m
    """
    _check_dims(n, m)
    if int(p) != p or p < 1:
        raise ShapeError(f"p 必须为正整数，当前为{p}")
    rng = make_rng(seed, STREAM_OPERATOR)
    W2 = field.standard_normal(rng, (p, n))
    A = np.empty((m, n), dtype=field.dtype)
    scale = 1.0 / np.sqrt(p * n)
    for start in range(0, m, ROW_CHUNK):
        stop = min(m, start + ROW_CHUNK)
        W1_rows = field.standard_normal(rng, (stop - start, p))
        A[start:stop] = (W1_rows @ W2) * scale
    op = DenseSensing(
        A, field, EnsembleKind.PRODUCT,
        params={"seed": seed, "p": int(p), "gamma": p / m},
    )
    op.moments = estimate_moments(op, probes=probes, seed=seed)
    logger.debug(f"乘积集合 n={n}, m={m}, p={p}: {op.moments}")
    return op


def make_ensemble(kind: str, field: FieldTag, n: int, m: int, seed: int, **params) -> SensingOperator:
    """按名称构造；gaussian_product 需要 p"""
    try:
        name = EnsembleKind(kind)
    except ValueError as e:
        raise ParameterError(f"未知感知矩阵集合: {kind}") from e
    if name is EnsembleKind.GAUSSIAN:
        return make_gaussian(field, n, m, seed)
    if name is EnsembleKind.HAAR:
        return make_haar_columns(field, n, m, seed)
    if name is EnsembleKind.HADAMARD:
        return make_subsampled_hadamard(n, m, seed, field)
    if name is EnsembleKind.DFT:
        return make_partial_dft(n, m, seed, field)
    if name is EnsembleKind.DCT:
        return make_subsampled_dct(n, m, seed, field)
    if "p" not in params:
        raise ParameterError("gaussian_product 需要参数 p")
    return make_gaussian_product(field, n, m, int(params["p"]), seed)
