"""
感知算子 A = Phi / sqrt(n)
apply / adjoint 均沿第 0 轴作用，支持列块输入
"""
import copy
from enum import Enum
from typing import Any, Dict, Optional

import numpy as np
import scipy.linalg as sla
from scipy.fft import dct, fft, idct, ifft

from config import get_logger
from core.errors import ShapeError
from core.field import COMPLEX, REAL, FieldTag
from core.types import SpectralMoments
from numerics.linop import LinearOperator

logger = get_logger(__name__)

# 稠密 SVD 的最大维度
SVD_MAX_N = 4096


class EnsembleKind(Enum):
    GAUSSIAN = "gaussian_iid"
    HAAR = "haar_columns"
    HADAMARD = "subsampled_hadamard"
    DFT = "partial_dft"
    DCT = "subsampled_dct"
    PRODUCT = "gaussian_product"


def fwht(a: np.ndarray) -> np.ndarray:
    """沿第 0 轴的快速 Walsh-Hadamard 变换（Sylvester 顺序，未归一化）"""
    a = np.array(a, copy=True)
    m = a.shape[0]
    rest = a.shape[1:]
    h = 1
    while h < m:
        view = a.reshape((m // (2 * h), 2, h) + rest)
        top = view[:, 0].copy()
        bottom = view[:, 1]
        view[:, 0] = top + bottom
        view[:, 1] = top - bottom
        h *= 2
    return a


def _expand(v: np.ndarray, x: np.ndarray) -> np.ndarray:
    """把长度为 dim 的对角向量广播到 x 的形状"""
    return v.reshape((-1,) + (1,) * (x.ndim - 1))


class SvdFactors:
    """
    A = U diag(s) V^H 的薄分解
    正交列算子不显式存储 U、V：U^H R = A^H R / c，V = I
    """

    def __init__(self, s: np.ndarray, n: int, u_adjoint, v_apply, v_adjoint):
        self.s = np.asarray(s, dtype=float)
        self.n = n
        self.u_adjoint = u_adjoint
        self.v_apply = v_apply
        self.v_adjoint = v_adjoint

    @property
    def spectrum(self) -> np.ndarray:
        """A^H A 的 n 个特征值（不足处补零）"""
        lam = np.zeros(self.n)
        k = min(self.n, self.s.shape[0])
        lam[:k] = self.s[:k] ** 2
        return lam

    @classmethod
    def from_dense(cls, A: np.ndarray) -> "SvdFactors":
        U, s, Vh = sla.svd(A, full_matrices=False)
        UH = U.conj().T
        V = Vh.conj().T
        return cls(
            s=s,
            n=A.shape[1],
            u_adjoint=lambda R: UH @ R,
            v_apply=lambda c: V @ c,
            v_adjoint=lambda T: Vh @ T,
        )


class SensingOperator:
    """
    矩阵无关感知算子

    Attributes:
        field: 数域
        n, m: 输入/输出维度
        kind: 集合类型
        moments: Phi^H Phi / n 的谱矩
        factor: 全局缩放
    """

    orthonormal: bool = False

    def __init__(self, field: FieldTag, n: int, m: int, kind: EnsembleKind,
                 moments: Optional[SpectralMoments] = None,
                 params: Optional[Dict[str, Any]] = None):
        self.field = field
        self.n = int(n)
        self.m = int(m)
        self.kind = kind
        self.moments = moments
        self.params = dict(params or {})
        self.factor = 1.0
        self._svd: Optional[SvdFactors] = None

    @property
    def alpha(self) -> float:
        return self.m / self.n

    def _apply(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _adjoint(self, z: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def apply(self, x: np.ndarray) -> np.ndarray:
        """x -> Phi x / sqrt(n)"""
        return self.factor * self._apply(np.asarray(x))

    def adjoint(self, z: np.ndarray) -> np.ndarray:
        """z -> Phi^H z / sqrt(n)"""
        return self.factor * self._adjoint(np.asarray(z))

    def as_linear_operator(self) -> LinearOperator:
        return LinearOperator(
            dim_in=self.n,
            dim_out=self.m,
            matvec=self.apply,
            adjoint_matvec=self.adjoint,
            dtype=self.field.dtype,
        )

    def gram_operator(self) -> LinearOperator:
        """A^H A"""
        return LinearOperator(
            dim_in=self.n,
            dim_out=self.n,
            matvec=lambda x: self.adjoint(self.apply(x)),
            hermitian=True,
            dtype=self.field.dtype,
        )

    def dense(self) -> np.ndarray:
        """稠密 m x n 矩阵 A"""
        return self.apply(np.eye(self.n, dtype=self.field.dtype))

    @property
    def has_dense(self) -> bool:
        return False

    def svd(self) -> SvdFactors:
        """惰性计算 A 的 SVD"""
        if self._svd is None:
            self._svd = self._compute_svd()
        return self._svd

    def _compute_svd(self) -> SvdFactors:
        if self.orthonormal:
            c = self.factor
            return SvdFactors(
                s=np.full(self.n, c),
                n=self.n,
                u_adjoint=lambda R: self.adjoint(R) / c,
                v_apply=lambda v: v,
                v_adjoint=lambda T: T,
            )
        if self.n > SVD_MAX_N:
            raise ShapeError(f"n={self.n} 超过稠密 SVD 上限 {SVD_MAX_N}")
        logger.debug(f"计算 {self.kind.value} 的稠密 SVD: m={self.m}, n={self.n}")
        return SvdFactors.from_dense(self.dense())

    def rescaled(self, c: float, moments: Optional[SpectralMoments] = None) -> "SensingOperator":
        """返回 c * A；谱矩按 c^2、c^4 缩放"""
        clone = copy.copy(self)
        clone.factor = self.factor * c
        clone._svd = None
        if moments is not None:
            clone.moments = moments
        elif self.moments is not None:
            clone.moments = SpectralMoments(
                self.moments.mean_lambda * c ** 2,
                self.moments.mean_lambda_sq * c ** 4,
                self.moments.source,
            )
        return clone

    def __repr__(self) -> str:
        return f"{type(self).__name__}(kind={self.kind.value}, field={self.field}, n={self.n}, m={self.m})"


class DenseSensing(SensingOperator):
    """显式存储 A 的算子（高斯、Haar 列正交、高斯乘积）"""

    def __init__(self, matrix: np.ndarray, field: FieldTag, kind: EnsembleKind,
                 moments: Optional[SpectralMoments] = None,
                 params: Optional[Dict[str, Any]] = None,
                 orthonormal: bool = False):
        m, n = matrix.shape
        super().__init__(field, n, m, kind, moments, params)
        self.matrix = matrix
        self._matrix_h = matrix.conj().T
        self.orthonormal = orthonormal

    def _apply(self, x):
        return self.matrix @ x

    def _adjoint(self, z):
        return self._matrix_h @ z

    def dense(self):
        return self.factor * self.matrix

    @property
    def has_dense(self) -> bool:
        return True


class _SelectedColumns(SensingOperator):
    """正交 m x m 变换选取 n 列并乘以输入对角"""

    orthonormal = True

    def __init__(self, field, n, m, kind, columns, diagonal, params=None):
        super().__init__(field, n, m, kind, SpectralMoments(1.0, 1.0), params)
        self.columns = np.asarray(columns)
        self.diagonal = np.asarray(diagonal)

    def _embed(self, x):
        u = np.zeros((self.m,) + x.shape[1:], dtype=np.result_type(x.dtype, self.diagonal.dtype))
        u[self.columns] = _expand(self.diagonal, x) * x
        return u

    def _restrict(self, w):
        return np.conj(_expand(self.diagonal, w[self.columns])) * w[self.columns]


class HadamardSensing(_SelectedColumns):

    def __init__(self, n, m, columns, signs, params=None):
        super().__init__(REAL, n, m, EnsembleKind.HADAMARD, columns, signs.astype(float), params)
        self._norm = 1.0 / np.sqrt(m)

    def _apply(self, x):
        return fwht(self._embed(x)) * self._norm

    def _adjoint(self, z):
        # 归一化 Hadamard 矩阵对称且正交
        return self._restrict(fwht(z) * self._norm)


class DftSensing(_SelectedColumns):

    def __init__(self, n, m, columns, phases, params=None):
        super().__init__(COMPLEX, n, m, EnsembleKind.DFT, columns, phases, params)

    def _apply(self, x):
        return fft(self._embed(x), axis=0, norm="ortho")

    def _adjoint(self, z):
        return self._restrict(ifft(z, axis=0, norm="ortho"))


class DctSensing(_SelectedColumns):

    def __init__(self, n, m, columns, signs, params=None):
        super().__init__(REAL, n, m, EnsembleKind.DCT, columns, signs.astype(float), params)

    def _apply(self, x):
        return dct(self._embed(x), type=2, axis=0, norm="ortho")

    def _adjoint(self, z):
        return self._restrict(idct(z, type=2, axis=0, norm="ortho"))
