"""
G-VAMP 状态
"""
import dataclasses
from dataclasses import dataclass

import numpy as np

from core.types import Instance


@dataclass
class VampState:
    """
    一次迭代开始时的全部变量

    1 为去噪侧（先验 / 信道），2 为估计侧（SVD 线性步）
    """
    T1: np.ndarray
    T2: np.ndarray
    R1: np.ndarray
    R2: np.ndarray
    gamma1: float
    gamma2: float
    tau1: float
    tau2: float
    v1: float
    v2: float
    c1: float
    c2: float
    x_hat1: np.ndarray
    x_hat2: np.ndarray
    z_hat1: np.ndarray
    z_hat2: np.ndarray
    iter: int = 0
    damping: float = float("nan")
    bayes_gap: float = float("nan")

    def scalars(self) -> dict:
        return {
            "gamma1": self.gamma1, "gamma2": self.gamma2,
            "tau1": self.tau1, "tau2": self.tau2,
            "v1": self.v1, "v2": self.v2, "c1": self.c1, "c2": self.c2,
        }

    def is_finite(self) -> bool:
        if not all(np.isfinite(v) for v in self.scalars().values()):
            return False
        return all(np.all(np.isfinite(a)) for a in (self.T1, self.R1, self.x_hat1, self.z_hat1))

    def replace(self, **changes) -> "VampState":
        return dataclasses.replace(self, **changes)


def trivial_state(instance: Instance) -> VampState:
    """
    无信息不动点
    gamma1=0, gamma2=1/rho, v1=v2=rho, tau1=1/sigma2, tau2=0, c1=c2=sigma2，向量全零
    """
    n, m = instance.n, instance.m
    dtype = instance.field.dtype
    rho = instance.rho
    sigma2 = instance.sigma2
    return VampState(
        T1=np.zeros(n, dtype=dtype),
        T2=np.zeros(n, dtype=dtype),
        R1=np.zeros(m, dtype=dtype),
        R2=np.zeros(m, dtype=dtype),
        gamma1=0.0,
        gamma2=1.0 / rho,
        tau1=1.0 / sigma2,
        tau2=0.0,
        v1=rho,
        v2=rho,
        c1=sigma2,
        c2=sigma2,
        x_hat1=np.zeros(n, dtype=dtype),
        x_hat2=np.zeros(n, dtype=dtype),
        z_hat1=np.zeros(m, dtype=dtype),
        z_hat2=np.zeros(m, dtype=dtype),
    )
