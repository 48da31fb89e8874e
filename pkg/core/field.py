"""
数域抽象：beta=1 实数, beta=2 复数
"""
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError


@dataclass(frozen=True)
class FieldTag:
    beta: int

    def __post_init__(self):
        if self.beta not in (1, 2):
            raise ParameterError(f"beta 必须为 1 或 2，当前为{self.beta}")

    @property
    def is_complex(self) -> bool:
        return self.beta == 2

    @property
    def dtype(self):
        return np.complex128 if self.beta == 2 else np.float64

    def standard_normal(self, rng: np.random.Generator, size) -> np.ndarray:
        """D_beta 标准高斯：E|z|^2 = 1"""
        if self.beta == 1:
            return rng.standard_normal(size)
        return (rng.standard_normal(size) + 1j * rng.standard_normal(size)) / np.sqrt(2.0)

    def cast(self, x) -> np.ndarray:
        x = np.asarray(x)
        if self.beta == 1:
            if np.iscomplexobj(x):
                if np.any(np.abs(x.imag) > 0):
                    raise ParameterError("实数域不接受复数向量")
                x = x.real
            return x.astype(np.float64)
        return x.astype(np.complex128)

    def __str__(self) -> str:
        return "complex" if self.is_complex else "real"


REAL = FieldTag(1)
COMPLEX = FieldTag(2)


def field_of(beta: int) -> FieldTag:
    return COMPLEX if beta == 2 else FieldTag(beta)


def inner(a: np.ndarray, b: np.ndarray) -> complex:
    """<a, b> = a^H b"""
    return np.vdot(a, b)


def realify(x: np.ndarray) -> np.ndarray:
    """复向量 -> (Re, Im) 拼接的实向量；实向量原样返回"""
    if np.iscomplexobj(x):
        return np.concatenate([x.real, x.imag])
    return np.asarray(x, dtype=np.float64)


def unrealify(v: np.ndarray, beta: int) -> np.ndarray:
    if beta == 1:
        return np.asarray(v, dtype=np.float64)
    half = v.shape[0] // 2
    return v[:half] + 1j * v[half:]


def realify_matrix(M: np.ndarray) -> np.ndarray:
    """复矩阵的 2x2 分块实表示 [[Re, -Im], [Im, Re]]"""
    if not np.iscomplexobj(M):
        return np.asarray(M, dtype=np.float64)
    return np.block([[M.real, -M.imag], [M.imag, M.real]])
