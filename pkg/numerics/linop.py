"""
矩阵无关线性算子
"""
from dataclasses import dataclass
from typing import Any, Callable, Optional

import numpy as np
from scipy.sparse.linalg import LinearOperator as ScipyLinearOperator

from core.errors import ShapeError


@dataclass(frozen=True)
class LinearOperator:
    """
    矩阵无关算子

    matvec / adjoint_matvec 同时接受向量 (dim,) 与列块 (dim, k)
    """
    dim_in: int
    dim_out: int
    matvec: Callable[[np.ndarray], np.ndarray]
    hermitian: bool = False
    adjoint_matvec: Optional[Callable[[np.ndarray], np.ndarray]] = None
    dtype: Any = np.float64

    def __post_init__(self):
        if self.hermitian and self.dim_in != self.dim_out:
            raise ShapeError("Hermitian 算子必须为方阵")
        if not self.hermitian and self.adjoint_matvec is None and self.dim_in != self.dim_out:
            raise ShapeError("非方阵算子必须提供 adjoint_matvec")

    @property
    def is_square(self) -> bool:
        return self.dim_in == self.dim_out

    @property
    def shape(self):
        return (self.dim_out, self.dim_in)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.matvec(x)

    def rmatvec(self, y: np.ndarray) -> np.ndarray:
        if self.hermitian:
            return self.matvec(y)
        if self.adjoint_matvec is None:
            raise NotImplementedError("算子未提供伴随")
        return self.adjoint_matvec(y)

    def shifted(self, shift: complex) -> "LinearOperator":
        """A - shift * I"""
        hermitian = bool(self.hermitian and np.isreal(shift))
        base = self.matvec
        adj = None
        if not hermitian:
            adj = lambda y: self.rmatvec(y) - np.conj(shift) * y
        return LinearOperator(
            dim_in=self.dim_in,
            dim_out=self.dim_out,
            matvec=lambda x: base(x) - shift * x,
            hermitian=hermitian,
            adjoint_matvec=adj,
            dtype=np.result_type(self.dtype, np.asarray(shift).dtype).type,
        )

    def to_scipy(self) -> ScipyLinearOperator:
        rmatvec = self.rmatvec if (self.hermitian or self.adjoint_matvec is not None) else None
        return ScipyLinearOperator(
            shape=self.shape,
            matvec=self.matvec,
            rmatvec=rmatvec,
            matmat=self.matvec,
            dtype=self.dtype,
        )


def from_dense(M: np.ndarray, hermitian: Optional[bool] = None) -> LinearOperator:
    M = np.asarray(M)
    if hermitian is None:
        hermitian = M.shape[0] == M.shape[1] and np.allclose(M, M.conj().T, atol=1e-14)
    MH = M.conj().T
    return LinearOperator(
        dim_in=M.shape[1],
        dim_out=M.shape[0],
        matvec=lambda x: M @ x,
        hermitian=bool(hermitian),
        adjoint_matvec=lambda y: MH @ y,
        dtype=M.dtype.type,
    )


def materialize(op: LinearOperator, block: int = 512) -> np.ndarray:
    """按基向量块求积，得到稠密矩阵"""
    out = np.empty((op.dim_out, op.dim_in), dtype=op.dtype)
    for start in range(0, op.dim_in, block):
        stop = min(op.dim_in, start + block)
        basis = np.zeros((op.dim_in, stop - start), dtype=op.dtype)
        basis[np.arange(start, stop), np.arange(stop - start)] = 1.0
        out[:, start:stop] = np.asarray(op.matvec(basis)).reshape(op.dim_out, stop - start)
    return out


def _probe(rng: np.random.Generator, dim: int, dtype) -> np.ndarray:
    v = rng.standard_normal(dim)
    if np.issubdtype(np.dtype(dtype), np.complexfloating):
        v = v + 1j * rng.standard_normal(dim)
    return v


def hermitian_defect(op: LinearOperator, probes: int = 5, seed: int = 0) -> float:
    """
    max |<u, Av> - <Au, v>| / (|u||Av| + |Au||v|)，Hermitian 算子应接近机器精度
    """
    if not op.is_square:
        raise ShapeError("Hermitian 检验需要方阵")
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(probes):
        u = _probe(rng, op.dim_in, op.dtype)
        v = _probe(rng, op.dim_in, op.dtype)
        Au, Av = op.matvec(u), op.matvec(v)
        scale = np.linalg.norm(u) * np.linalg.norm(Av) + np.linalg.norm(Au) * np.linalg.norm(v)
        if scale == 0:
            continue
        worst = max(worst, abs(np.vdot(u, Av) - np.vdot(Au, v)) / scale)
    return float(worst)


def adjoint_defect(op: LinearOperator, probes: int = 5, seed: int = 0) -> float:
    """<y, Ax> 与 <A^H y, x> 的最大相对偏差"""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(probes):
        x = _probe(rng, op.dim_in, op.dtype)
        y = _probe(rng, op.dim_out, op.dtype)
        Ax, Ahy = op.matvec(x), op.rmatvec(y)
        scale = np.linalg.norm(y) * np.linalg.norm(Ax) + np.linalg.norm(Ahy) * np.linalg.norm(x)
        if scale == 0:
            continue
        worst = max(worst, abs(np.vdot(y, Ax) - np.vdot(Ahy, x)) / scale)
    return float(worst)
