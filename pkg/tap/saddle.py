"""
F(x, y) = inf_{zeta_x, zeta_y} [zeta_x x/2 + alpha zeta_y y/2 - (alpha-1)/2 ln zeta_y
          - 1/2 <ln(zeta_x zeta_y + lambda)>] - 1/2 ln x - alpha/2 ln y - (1+alpha)/2

F 只通过 t = x y 依赖 (x, y)。令 p = x zeta_x, q = y zeta_y:
    F = (p-1)/2 + alpha (q-1)/2 - (alpha-1)/2 ln q - 1/2 <ln(p q + lambda t)>
驻点方程:
    <q / D> = 1,   alpha - (alpha-1)/q - <p / D> = 0,   D = p q + lambda t
在 t -> 0 处正则，t < 0 时给出解析延拓
"""
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from config import get_logger, get_tap_config
from core.errors import ParameterError, SaddleError

logger = get_logger(__name__)


@dataclass
class ZetaSaddle:
    zeta_x: float
    zeta_y: float
    F_value: float
    dF_dx: float
    dF_dy: float
    residuals: Tuple[float, float] = (0.0, 0.0)


@dataclass
class SaddleT:
    """t 形式的驻点：p = 1 + dp, q = 1 + dq，lam_over_D = <lambda/D> = -2 dF/dt"""
    t: float
    dp: float
    dq: float
    F: float
    lam_over_D: float
    residual: float


def _curvature(spectrum: np.ndarray, alpha: float) -> float:
    """alpha <lambda^2> - (1+alpha) <lambda>^2"""
    m1 = float(np.mean(spectrum))
    m2 = float(np.mean(spectrum ** 2))
    return alpha * m2 - (1.0 + alpha) * m1 ** 2


def f_expansion(t: float, spectrum: np.ndarray, alpha: float) -> float:
    """F 的二阶展开 -<lambda> t/2 + t^2 [alpha<lambda^2> - (1+alpha)<lambda>^2] / (4 alpha)"""
    m1 = float(np.mean(spectrum))
    return -0.5 * m1 * t + _curvature(spectrum, alpha) * t ** 2 / (4.0 * alpha)


def _residuals(dp: float, dq: float, t: float, lam: np.ndarray, alpha: float):
    p, q = 1.0 + dp, 1.0 + dq
    D = p * q + lam * t
    r1 = float(np.mean(q / D)) - 1.0
    r2 = alpha - (alpha - 1.0) / q - float(np.mean(p / D))
    return np.array([r1, r2]), D


def saddle_t(t: float, spectrum: np.ndarray, alpha: float, tol: Optional[float] = None,
             max_iter: Optional[int] = None) -> SaddleT:
    """
    |t| < expansion_cutoff 时直接用展开式，否则从 dp = -<lambda> t, dq = -<lambda> t/alpha 出发做 Newton
    """
    config = get_tap_config()
    tol = config.tol if tol is None else tol
    max_iter = max_iter or config.newton_max_iter
    lam = np.asarray(spectrum, dtype=float)
    m1 = float(np.mean(lam))
    K = _curvature(lam, alpha)

    if abs(t) < config.expansion_cutoff:
        dp = -m1 * t + K * t ** 2 / alpha
        dq = -m1 * t / alpha + K * t ** 2 / alpha ** 2
        return SaddleT(t, dp, dq, f_expansion(t, lam, alpha), m1 - K * t / alpha, 0.0)

    x = np.array([-m1 * t, -m1 * t / alpha])
    res, D = _residuals(x[0], x[1], t, lam, alpha)
    norm = float(np.max(np.abs(res)))
    for _ in range(max_iter):
        if norm < 1e-15:
            break
        p, q = 1.0 + x[0], 1.0 + x[1]
        D2 = D ** 2
        cross = float(np.mean(lam * t / D2))
        jac = np.array([
            [-float(np.mean(q ** 2 / D2)), cross],
            [-cross, (alpha - 1.0) / q ** 2 + float(np.mean(p ** 2 / D2))],
        ])
        try:
            step = np.linalg.solve(jac, -res)
        except np.linalg.LinAlgError as e:
            raise SaddleError(f"t={t:.6g} 处 Newton Jacobian 奇异", probe=t) from e
        # 回溯保证 q > 0, D > 0 且残差下降
        scale = 1.0
        for _ in range(40):
            trial = x + scale * step
            if 1.0 + trial[1] > 0:
                trial_res, trial_D = _residuals(trial[0], trial[1], t, lam, alpha)
                trial_norm = float(np.max(np.abs(trial_res)))
                if np.all(trial_D > 0) and trial_norm < max(norm, 1e-300) * (1.0 - 1e-4 * scale) + 1e-16:
                    break
            scale /= 2.0
        else:
            break
        x, res, D, norm = trial, trial_res, trial_D, trial_norm
    if not norm < tol:
        raise SaddleError(f"t={t:.6g} 处 zeta 驻点方程未收敛，残差 {norm:.3g}", probe=t)

    dp, dq = float(x[0]), float(x[1])
    F = (dp + alpha * dq) / 2.0 - (alpha - 1.0) / 2.0 * np.log1p(dq) \
        - 0.5 * float(np.mean(np.log1p(dp + dq + dp * dq + lam * t)))
    return SaddleT(t, dp, dq, float(F), float(np.mean(lam / D)), norm)


def solve_zeta(x: float, y: float, spectrum: np.ndarray, alpha: float,
               tol: Optional[float] = None) -> ZetaSaddle:
    """(x, y) 处的 zeta 驻点与包络导数 dF/dx = (p-1)/(2x), dF/dy = alpha (q-1)/(2y)"""
    if not x > 0 or not y > 0:
        raise ParameterError(f"solve_zeta 要求 x, y > 0，当前 x={x}, y={y}")
    s = saddle_t(x * y, spectrum, alpha, tol)
    zeta_x = (1.0 + s.dp) / x
    zeta_y = (1.0 + s.dq) / y
    lam = np.asarray(spectrum, dtype=float)
    D = zeta_x * zeta_y + lam
    residuals = (
        float(np.mean(zeta_y / D)) - x,
        (alpha - 1.0) / zeta_y + float(np.mean(zeta_x / D)) - alpha * y,
    )
    return ZetaSaddle(
        zeta_x=zeta_x,
        zeta_y=zeta_y,
        F_value=s.F,
        dF_dx=s.dp / (2.0 * x),
        dF_dy=alpha * s.dq / (2.0 * y),
        residuals=residuals,
    )


def expansion_remainder(x: float, y: float, spectrum: np.ndarray, alpha: float) -> float:
    """F(x, y) 减去二阶展开后的余项，应为 O((xy)^3)"""
    return solve_zeta(x, y, spectrum, alpha).F_value - f_expansion(x * y, spectrum, alpha)


def expansion_order_ratio(x: float, spectrum: np.ndarray, alpha: float,
                          y_large: float = 1e-2, y_small: float = 1e-3) -> float:
    """|E(y_large) / E(y_small)|，三阶余项下约为 (y_large/y_small)^3"""
    small = expansion_remainder(x, y_small, spectrum, alpha)
    if small == 0.0:
        raise SaddleError(f"y={y_small} 处展开余项恰为零，无法估计阶数", probe=y_small)
    return abs(expansion_remainder(x, y_large, spectrum, alpha) / small)
