"""
谱矩阵
M(T)    = Phi^H Diag(T) Phi / n
M_TAP   = -(1/rho) I + M(T*)
M_LAMP  = (rho <lambda>/alpha) ((alpha/<lambda>) Phi Phi^H/n - I) Diag(dg)
"""
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from core.errors import ParameterError
from core.types import Instance
from numerics.linop import LinearOperator
from .preprocessing import Preprocessing, make_t_star


class OperatorName(Enum):
    M_T = "M_T"
    M_TAP = "M_TAP"
    M_LAMP = "M_LAMP"


@dataclass
class SpectralOperator:
    name: OperatorName
    op: LinearOperator
    prep: Preprocessing
    instance: Instance

    @property
    def hermitian(self) -> bool:
        return self.op.hermitian

    def matvec(self, x: np.ndarray) -> np.ndarray:
        return self.op.matvec(x)


def _column(w: np.ndarray, x: np.ndarray) -> np.ndarray:
    return w.reshape((-1,) + (1,) * (x.ndim - 1))


def _weighted_gram(instance: Instance, weights: np.ndarray, shift: float = 0.0) -> LinearOperator:
    phi = instance.phi
    w = np.asarray(weights, dtype=float)

    def matvec(x):
        out = phi.adjoint(_column(w, x) * phi.apply(x))
        if shift:
            out = out - shift * x
        return out

    return LinearOperator(
        dim_in=instance.n, dim_out=instance.n, matvec=matvec, hermitian=True, dtype=instance.field.dtype
    )


def build_MT(instance: Instance, prep: Preprocessing) -> SpectralOperator:
    """x -> Phi^H (w * Phi x / sqrt(n)) / sqrt(n)"""
    if prep.weights.shape != (instance.m,):
        raise ParameterError(f"权重长度 {prep.weights.shape} 与 m={instance.m} 不一致")
    if not np.all(np.isfinite(prep.weights)):
        raise ParameterError("预处理权重含非有限值")
    return SpectralOperator(OperatorName.M_T, _weighted_gram(instance, prep.weights), prep, instance)


def build_MTAP(instance: Instance, channel, prep: Optional[Preprocessing] = None,
               clamp: bool = True) -> SpectralOperator:
    """
    M_TAP = -(1/rho) I + M(T*)

    clamp=False 时使用未截断的 T*（理论检验用）
    """
    prep = prep or make_t_star(instance, channel)
    weights = prep.weights if clamp else prep.raw
    if not np.all(np.isfinite(weights)):
        raise ParameterError("T* 含非有限值，无法构造未截断的 M_TAP")
    op = _weighted_gram(instance, weights, shift=1.0 / instance.rho)
    return SpectralOperator(OperatorName.M_TAP, op, prep, instance)


def build_MLAMP(instance: Instance, channel, prep: Optional[Preprocessing] = None) -> SpectralOperator:
    """m x m 非 Hermitian 算子 u -> sigma2 ((alpha/<lambda>) A A^H - I)(dg * u)"""
    prep = prep or make_t_star(instance, channel)
    phi = instance.phi
    sigma2 = prep.sigma2
    dg = np.asarray(prep.dg, dtype=float)
    ratio = instance.alpha / instance.moments.mean_lambda

    def matvec(u):
        du = _column(dg, u) * u
        return sigma2 * (ratio * phi.apply(phi.adjoint(du)) - du)

    def adjoint(u):
        inner = ratio * phi.apply(phi.adjoint(u)) - u
        return sigma2 * _column(dg, u) * inner

    op = LinearOperator(
        dim_in=instance.m, dim_out=instance.m, matvec=matvec, hermitian=False,
        adjoint_matvec=adjoint, dtype=instance.field.dtype,
    )
    return SpectralOperator(OperatorName.M_LAMP, op, prep, instance)
