"""
TAP 自由熵（高斯先验）

先验侧对 (lambda, gamma) 取极值后只剩 sigma2:
    (beta/2) [1 - sigma2/rho - q/rho + ln(sigma2/rho)],  q = |m|^2 / n
信道侧对 g 取极值后 omega 满足 E[z | y, omega, b] = (A m)_mu:
    (1/n) sum_mu [beta |z_mu - omega_mu|^2 / (2b) + ln Z_out(y_mu, omega_mu, b)]
再加上 beta alpha b r / 2 + beta F(sigma2, r)

内层驻点按 b -> r -> (gamma, sigma2) -> b' 的顺序归结为一维方程 b' = b:
    r = mean_mu (1/b - Var_mu / b^2)
    gamma = r <lambda/D>,  sigma2 = rho / (1 + rho gamma)
    b' = (sigma2 / alpha) <lambda/D>
"""
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.optimize import root_scalar

from config import get_logger, get_tap_config
from core.errors import ParameterError, SaddleError
from core.types import Instance
from .saddle import SaddleT, saddle_t

logger = get_logger(__name__)


@dataclass
class TapPoint:
    m_vec: np.ndarray
    sigma2: float
    lambda_vec: np.ndarray
    gamma: float
    g_vec: np.ndarray
    omega_vec: np.ndarray
    b: float
    r: float
    iterations: int = 0


def trivial_point(instance: Instance) -> TapPoint:
    """m = 0 处: sigma2 = rho, gamma = r = 0, b = rho <lambda> / alpha"""
    dtype = instance.field.dtype
    return TapPoint(
        m_vec=np.zeros(instance.n, dtype=dtype),
        sigma2=instance.rho,
        lambda_vec=np.zeros(instance.n, dtype=dtype),
        gamma=0.0,
        g_vec=np.zeros(instance.m, dtype=dtype),
        omega_vec=np.zeros(instance.m, dtype=dtype),
        b=instance.sigma2,
        r=0.0,
    )


def _channel_side(instance: Instance, channel, z: np.ndarray, b: float):
    """给定 b，反解 omega 并返回 (omega, log Z, 后验方差)"""
    omega = channel.omega_for_mean(instance.y, z, b)
    logz, mean, second = channel.posterior_moments(instance.y, omega, b)
    miss = float(np.max(np.abs(mean - z)))
    if not miss < 1e-8 * max(1.0, float(np.max(np.abs(z)))):
        raise SaddleError(f"后验均值无法达到 A m (偏差 {miss:.3g})，m 超出 TAP 定义域", probe=z)
    variance = second - np.abs(mean) ** 2
    return omega, logz, variance


def _sweep(instance: Instance, channel, z: np.ndarray, spectrum: np.ndarray,
           b: float) -> Tuple[float, float, float, SaddleT]:
    """一次 b -> (r, sigma2, b') 扫描"""
    if not b > 0:
        raise SaddleError(f"内层求解中 b <= 0 (b={b:.6g})", probe=b)
    rho, alpha = instance.rho, instance.alpha
    _, _, variance = _channel_side(instance, channel, z, b)
    r = float(np.mean(1.0 / b - variance / b ** 2))
    # sigma2 与 gamma 互相决定，在 t = sigma2 r 上做几次代换
    sigma2 = rho
    for _ in range(50):
        s = saddle_t(sigma2 * r, spectrum, alpha)
        gamma = r * s.lam_over_D
        if not 1.0 + rho * gamma > 0:
            raise SaddleError(f"内层求解中 1 + rho gamma <= 0 (gamma={gamma:.6g})", probe=b)
        updated = rho / (1.0 + rho * gamma)
        if abs(updated - sigma2) <= 1e-15 * rho:
            sigma2 = updated
            break
        sigma2 = updated
    s = saddle_t(sigma2 * r, spectrum, alpha)
    return r, sigma2, sigma2 * s.lam_over_D / alpha, s


def eval_ftap(instance: Instance, channel, m_vec: np.ndarray,
              tol: Optional[float] = None, max_iter: Optional[int] = None) -> Tuple[float, TapPoint]:
    """
    固定 m 求内层驻点并组装自由熵

    从平凡值出发先走一步阻尼不动点，再用割线法解 b' (b) = b

    Returns:
        (f_TAP(m), 驻点)
    """
    config = get_tap_config()
    tol = config.tol if tol is None else tol
    max_iter = config.max_iter if max_iter is None else max_iter

    m_vec = instance.field.cast(m_vec)
    if m_vec.shape != (instance.n,):
        raise ParameterError(f"m 维度 {m_vec.shape} 与 n={instance.n} 不一致")

    beta, rho, alpha = instance.beta, instance.rho, instance.alpha
    spectrum = instance.phi.svd().spectrum
    z = instance.phi.apply(m_vec)

    def gap(b: float) -> float:
        return _sweep(instance, channel, z, spectrum, b)[2] - b

    b0 = instance.sigma2
    g0 = gap(b0)
    iterations = 1
    b = b0
    if abs(g0) > tol * b0:
        b1 = b0 + config.damping * g0
        try:
            sol = root_scalar(gap, x0=b0, x1=b1, method="secant", xtol=tol * b0, maxiter=max_iter)
        except (ArithmeticError, ValueError) as e:
            raise SaddleError(f"TAP 内层求解失败: {e}", probe=m_vec) from e
        if not sol.converged:
            raise SaddleError(f"TAP 内层割线法 {max_iter} 轮未收敛: {sol.flag}", probe=m_vec)
        b = float(sol.root)
        iterations += sol.iterations

    r, sigma2, _, s = _sweep(instance, channel, z, spectrum, b)
    omega, logz, _ = _channel_side(instance, channel, z, b)
    q = float(np.sum(np.abs(m_vec) ** 2)) / instance.n

    prior_part = 0.5 * beta * (1.0 - sigma2 / rho - q / rho + np.log(sigma2 / rho))
    channel_part = float(np.sum(beta * np.abs(z - omega) ** 2 / (2.0 * b) + logz)) / instance.n
    value = prior_part + channel_part + 0.5 * beta * alpha * b * r + beta * s.F

    point = TapPoint(
        m_vec=m_vec,
        sigma2=sigma2,
        lambda_vec=-m_vec / sigma2,
        gamma=r * s.lam_over_D,
        g_vec=(z - omega) / b,
        omega_vec=omega,
        b=b,
        r=r,
        iterations=iterations,
    )
    logger.debug(f"f_TAP: {value:.12g}, sigma2={sigma2:.6g}, b={b:.6g}, r={r:.3g}, {iterations} 轮")
    return float(value), point
