"""
特征值求解器
- power_dominant: 主特征对（Hermitian 取模最大，非 Hermitian 取实部最大）
- shift_invert: 离 shift 最近的特征对
- top_eigenpair: 大规模 Hermitian 算子的代数最大特征对
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg as sla
from scipy.sparse.linalg import (
    ArpackNoConvergence,
    LinearOperator as ScipyLinearOperator,
    eigs,
    eigsh,
    lsqr,
)

from config import get_eig_config, get_logger
from core.errors import ConvergenceError, ShapeError, ShiftSingularityError
from .linop import LinearOperator, materialize

logger = get_logger(__name__)


@dataclass
class EigResult:
    value: complex
    vector: np.ndarray
    residual: float
    iterations: int

    @property
    def real(self) -> float:
        return float(np.real(self.value))


def residual_norm(op: LinearOperator, value: complex, vector: np.ndarray) -> float:
    """|Av - lambda v| / |v|"""
    v_norm = np.linalg.norm(vector)
    return float(np.linalg.norm(op.matvec(vector) - value * vector) / v_norm)


def _start_vector(dim: int, dtype, seed) -> np.ndarray:
    rng = np.random.default_rng(seed)
    v0 = rng.standard_normal(dim)
    if np.issubdtype(np.dtype(dtype), np.complexfloating):
        v0 = v0 + 1j * rng.standard_normal(dim)
    return v0 / np.linalg.norm(v0)


def _select_largest_real(values: np.ndarray, scale: float) -> int:
    """实部最大，共轭对并列时取虚部非负者"""
    best = np.max(values.real)
    ties = np.flatnonzero(values.real >= best - 1e-10 * max(1.0, scale))
    return int(ties[np.argmax(values.imag[ties])])


def _finish(op: LinearOperator, value, vector, iterations: int, tol: float) -> EigResult:
    if op.hermitian:
        value = float(np.real(value))
    vector = vector / np.linalg.norm(vector)
    residual = residual_norm(op, value, vector)
    if residual > tol * max(1.0, abs(value)):
        raise ConvergenceError("特征对残差超出容差", residual, iterations)
    return EigResult(value=value, vector=vector, residual=residual, iterations=iterations)


def _small_dense_limit() -> int:
    return get_eig_config().arnoldi_ncv + 2


def _dense_pairs(op: LinearOperator):
    M = materialize(op)
    if op.hermitian:
        return sla.eigh(M)
    return sla.eig(M)


def power_dominant(
    op: LinearOperator,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
    seed=0,
) -> EigResult:
    """
    主特征对

    Hermitian: 模最大的特征值（Lanczos）
    非 Hermitian: 子空间维数 30 的重启 Arnoldi，Ritz 值中取实部最大者
    """
    if not op.is_square:
        raise ShapeError("特征值问题需要方阵")
    config = get_eig_config()
    max_iter = max_iter or config.max_iter
    dim = op.dim_in

    if dim <= _small_dense_limit():
        tol = tol or config.tol_dense
        values, vectors = _dense_pairs(op)
        if op.hermitian:
            idx = int(np.argmax(np.abs(values)))
        else:
            idx = _select_largest_real(values, float(np.max(np.abs(values))))
        return _finish(op, values[idx], vectors[:, idx], 1, tol)

    tol = tol or config.tol_iterative
    counter = _CountingOperator(op)
    v0 = _start_vector(dim, op.dtype, seed)
    ncv = min(dim, config.arnoldi_ncv)
    try:
        if op.hermitian:
            values, vectors = eigsh(
                counter, k=1, which="LM", v0=v0, ncv=min(ncv, dim - 1),
                tol=tol * 1e-2, maxiter=max_iter,
            )
            idx = 0
        else:
            k = 2 if dim > 4 else 1
            values, vectors = eigs(
                counter, k=k, which="LR", v0=v0, ncv=ncv, tol=tol * 1e-2, maxiter=max_iter,
            )
            idx = _select_largest_real(values, float(np.max(np.abs(values))))
    except ArpackNoConvergence as e:
        raise ConvergenceError("Arnoldi/Lanczos 未收敛", float("nan"), counter.count) from e
    return _finish(op, values[idx], vectors[:, idx], counter.count, tol)


def top_eigenpair(
    op: LinearOperator,
    which: str = "LA",
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
    seed=0,
) -> EigResult:
    """Hermitian 算子的代数最大 (LA) 或最小 (SA) 特征对"""
    if not op.hermitian:
        raise ShapeError("top_eigenpair 仅用于 Hermitian 算子")
    if which not in ("LA", "SA"):
        raise ValueError(f"which 必须为 LA 或 SA，当前为{which}")
    config = get_eig_config()
    max_iter = max_iter or config.max_iter
    dim = op.dim_in

    if dim <= _small_dense_limit():
        tol = tol or config.tol_dense
        values, vectors = _dense_pairs(op)
        idx = -1 if which == "LA" else 0
        return _finish(op, values[idx], vectors[:, idx], 1, tol)

    tol = tol or config.tol_iterative
    counter = _CountingOperator(op)
    try:
        values, vectors = eigsh(
            counter, k=1, which=which, v0=_start_vector(dim, op.dtype, seed),
            ncv=min(config.arnoldi_ncv, dim - 1), tol=tol * 1e-2, maxiter=max_iter,
        )
    except ArpackNoConvergence as e:
        raise ConvergenceError("Lanczos 未收敛", float("nan"), counter.count) from e
    return _finish(op, values[0], vectors[:, 0], counter.count, tol)


def shift_invert(
    op: LinearOperator,
    shift: float,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
    seed=0,
) -> EigResult:
    """
    离 shift 最近的特征对

    维度不超过 dense_factor_max 时对 (A - shift I) 做 LU 分解，否则用 lsqr 迭代求解
    """
    if not op.is_square:
        raise ShapeError("特征值问题需要方阵")
    config = get_eig_config()
    max_iter = max_iter or config.max_iter
    dim = op.dim_in

    if dim <= _small_dense_limit():
        tol = tol or config.tol_dense
        values, vectors = _dense_pairs(op)
        gaps = np.abs(values - shift)
        scale = max(1.0, float(np.max(np.abs(values))))
        idx = int(np.argmin(gaps))
        if gaps[idx] <= 1e2 * np.finfo(float).eps * scale:
            raise ShiftSingularityError(shift)
        return _finish(op, values[idx], vectors[:, idx], 1, tol)

    if dim <= config.dense_factor_max:
        tol = tol or config.tol_dense
        solve = _lu_solver(op, shift)
    else:
        tol = tol or config.tol_iterative
        solve = _lsqr_solver(op, shift, tol)

    dtype = np.result_type(op.dtype, np.float64)
    calls = {"count": 0}

    def inverse(x):
        calls["count"] += 1
        return solve(x)

    opinv = ScipyLinearOperator(shape=(dim, dim), matvec=inverse, dtype=dtype)
    v0 = _start_vector(dim, op.dtype, seed)
    ncv = min(config.arnoldi_ncv, dim - 1)
    try:
        if op.hermitian:
            values, vectors = eigsh(
                op.to_scipy(), k=1, sigma=shift, OPinv=opinv, which="LM",
                v0=v0, ncv=ncv, tol=tol * 1e-2, maxiter=max_iter,
            )
        else:
            values, vectors = eigs(
                op.to_scipy(), k=1, sigma=shift, OPinv=opinv, which="LM",
                v0=v0, ncv=ncv, tol=tol * 1e-2, maxiter=max_iter,
            )
    except ArpackNoConvergence as e:
        raise ConvergenceError("逆迭代未收敛", float("nan"), calls["count"]) from e
    logger.debug(f"shift_invert: shift={shift}, 线性求解 {calls['count']} 次")
    return _finish(op, values[0], vectors[:, 0], calls["count"], tol)


def _lu_solver(op: LinearOperator, shift: float):
    M = materialize(op)
    M[np.diag_indices_from(M)] -= shift
    lu, piv = sla.lu_factor(M, check_finite=True)
    diag = np.abs(np.diag(lu))
    scale = max(1.0, float(np.max(diag)))
    if np.min(diag) <= 1e2 * np.finfo(float).eps * scale * M.shape[0]:
        raise ShiftSingularityError(shift)
    return lambda x: sla.lu_solve((lu, piv), x)


def _lsqr_solver(op: LinearOperator, shift: float, tol: float):
    shifted = op.shifted(shift).to_scipy()

    def solve(x):
        result = lsqr(shifted, x, atol=tol * 1e-2, btol=tol * 1e-2)
        if result[1] in (3, 6):
            raise ShiftSingularityError(shift)
        return result[0]

    return solve


class _CountingOperator(ScipyLinearOperator):
    """记录 matvec 次数的包装"""

    def __init__(self, op: LinearOperator):
        self._op = op
        self.count = 0
        super().__init__(dtype=np.result_type(op.dtype, np.float64), shape=op.shape)

    def _matvec(self, x):
        self.count += 1
        return self._op.matvec(np.ravel(x))

    def _rmatvec(self, x):
        return self._op.rmatvec(np.ravel(x))
