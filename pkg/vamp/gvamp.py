"""
G-VAMP 迭代（高斯先验）

去噪侧:  x_hat1 = g_x1(T1, gamma1)，z_hat1 = g_z1(R1, tau1)
估计侧:  x_hat2 = g_x2(T2, R2, gamma2, tau2)，z_hat2 = A x_hat2
方差标量 v, c 做凸组合阻尼，向量不阻尼
"""
from typing import List, Optional, Tuple

import numpy as np

from config import get_logger, get_vamp_config
from core.errors import DivergenceError, ParameterError
from core.metrics import overlap_and_mse
from core.rng import make_rng, STREAM_SOLVER
from core.types import Estimate, EstimateSource, Instance
from .state import VampState, trivial_state

logger = get_logger(__name__)

INIT_MODES = ("random", "trivial_perturbed", "from_estimate")


def prior_denoiser(T: np.ndarray, gamma: float, rho: float) -> Tuple[np.ndarray, float]:
    """
    高斯先验 N(0, rho) 下倾斜后验的均值与方差
    密度 ∝ P0(x) exp(-beta gamma |x|^2/2 + beta Re(conj(T) x))，均值 T/(1/rho + gamma)
    """
    precision = 1.0 / rho + gamma
    if not precision > 0:
        raise DivergenceError(f"先验侧精度非正: 1/rho + gamma1 = {precision}")
    return T / precision, 1.0 / precision


def channel_denoiser(instance: Instance, channel, R: np.ndarray, tau: float):
    """g_z1: P_out(y|z) exp(-beta|z - R/tau|^2 tau/2) 下的后验均值、平均方差与 Bayes 偏差"""
    if not tau > 0:
        raise DivergenceError(f"tau1 非正: {tau}")
    omega = R / tau
    _, mean, second = channel.posterior_moments(instance.y, omega, 1.0 / tau)
    variance = second - np.abs(mean) ** 2
    c = float(np.mean(variance))
    error = second - 2.0 * np.real(np.conj(omega) * mean) + np.abs(omega) ** 2
    gap = float(np.mean(error)) - 1.0 / tau
    return instance.field.cast(mean), c, gap


def linear_estimator(instance: Instance, T: np.ndarray, R: np.ndarray, gamma: float, tau: float):
    """
    g_x2 = T/gamma + V diag(s/(gamma + tau s^2)) (U^H R - tau s V^H T / gamma)
    tau=0 时退化为 T/gamma + A^H R / gamma
    """
    svd = instance.phi.svd()
    s = svd.s
    if not gamma > 0:
        raise DivergenceError(f"估计侧精度 gamma2 非正: {gamma}")
    inner = svd.u_adjoint(R) - tau * s * svd.v_adjoint(T) / gamma
    x_hat = T / gamma + svd.v_apply((s / (gamma + tau * s ** 2)) * inner)
    lam = svd.spectrum
    denom = tau * lam + gamma
    v = float(np.mean(1.0 / denom))
    c = float(np.mean(lam / denom)) / instance.alpha
    return instance.field.cast(x_hat), v, c


def _damped(raw: float, old: float, damping: float) -> float:
    return damping * raw + (1.0 - damping) * old


def _with_retries(compute, damping: float, label: str):
    """阻尼后的精度为负时减半阻尼重试"""
    config = get_vamp_config()
    d = damping
    for attempt in range(config.max_damping_retries + 1):
        result = compute(d)
        if result is not None:
            return result, d
        logger.warning(f"G-VAMP {label}: 精度为负，阻尼 {d:.4g} -> {d / 2:.4g}")
        d /= 2.0
    raise DivergenceError(f"G-VAMP {label}: 阻尼重试 {config.max_damping_retries} 次后精度仍为负")


def denoise_step(instance: Instance, channel, state: VampState, damping: float) -> VampState:
    """去噪半步：由 (T1, R1) 得到 (T2, R2, gamma2, tau2)"""
    tol = get_vamp_config().negative_precision_tol
    x1, v1_raw = prior_denoiser(state.T1, state.gamma1, instance.rho)
    z1, c1_raw, gap = channel_denoiser(instance, channel, state.R1, state.tau1)

    def compute(d):
        v1 = _damped(v1_raw, state.v1, d)
        c1 = _damped(c1_raw, state.c1, d)
        if not (v1 > 0 and c1 > 0):
            return None
        gamma2 = 1.0 / v1 - state.gamma1
        tau2 = 1.0 / c1 - state.tau1
        if gamma2 <= 0 or tau2 < -tol:
            return None
        return v1, c1, gamma2, tau2

    (v1, c1, gamma2, tau2), d = _with_retries(compute, damping, "去噪")
    return state.replace(
        x_hat1=x1, z_hat1=z1, v1=v1, c1=c1, gamma2=gamma2, tau2=tau2,
        T2=x1 / v1 - state.T1, R2=z1 / c1 - state.R1, damping=d, bayes_gap=gap,
    )


def estimate_step(instance: Instance, state: VampState, damping: float) -> VampState:
    """估计半步：由 (T2, R2) 得到下一轮的 (T1, R1, gamma1, tau1)"""
    tol = get_vamp_config().negative_precision_tol
    x2, v2_raw, c2_raw = linear_estimator(instance, state.T2, state.R2, state.gamma2, state.tau2)
    z2 = instance.phi.apply(x2)

    def compute(d):
        v2 = _damped(v2_raw, state.v2, d)
        c2 = _damped(c2_raw, state.c2, d)
        if not (v2 > 0 and c2 > 0):
            return None
        gamma1 = 1.0 / v2 - state.gamma2
        tau1 = 1.0 / c2 - state.tau2
        if gamma1 < -tol or 1.0 / instance.rho + gamma1 <= 0 or tau1 <= 0:
            return None
        return v2, c2, gamma1, tau1

    (v2, c2, gamma1, tau1), d = _with_retries(compute, damping, "估计")
    return state.replace(
        x_hat2=x2, z_hat2=z2, v2=v2, c2=c2, gamma1=gamma1, tau1=tau1,
        T1=x2 / v2 - state.T2, R1=z2 / c2 - state.R2, damping=min(d, state.damping),
    )


def vamp_iterate(instance: Instance, channel, state: VampState,
                 damping: Optional[float] = None) -> VampState:
    """完整一轮迭代，返回新状态（不修改输入）"""
    damping = get_vamp_config().damping if damping is None else damping
    if not 0 < damping <= 1:
        raise ParameterError(f"阻尼系数须在 (0, 1] 内，当前为{damping}")
    half = denoise_step(instance, channel, state, damping)
    full = estimate_step(instance, half, damping)
    return full.replace(iter=state.iter + 1)


def initial_state(instance: Instance, init: str = "random", x0: Optional[np.ndarray] = None,
                  seed: int = 0, scale: float = 1e-3) -> VampState:
    """
    random: 平凡点标量 + 小幅随机向量
    trivial_perturbed: 平凡点 + R1 上 scale 量级的扰动
    from_estimate: 以 x0 为先验侧均值，gamma1 = 1/rho
    """
    if init not in INIT_MODES:
        raise ParameterError(f"未知初始化方式: {init}，可选 {INIT_MODES}")
    state = trivial_state(instance)
    field = instance.field
    rng = make_rng(seed, STREAM_SOLVER)
    if init == "random":
        T1 = scale * field.standard_normal(rng, instance.n) / instance.rho
        R1 = scale * field.standard_normal(rng, instance.m) * state.tau1
        state = state.replace(T1=T1, R1=R1)
    elif init == "trivial_perturbed":
        state = state.replace(R1=scale * field.standard_normal(rng, instance.m) * state.tau1)
    else:
        if x0 is None:
            raise ParameterError("from_estimate 初始化需要 x0")
        x0 = field.cast(x0)
        if x0.shape != (instance.n,):
            raise ParameterError(f"x0 维度 {x0.shape} 与 n={instance.n} 不一致")
        gamma1 = 1.0 / instance.rho
        state = state.replace(
            gamma1=gamma1, v1=1.0 / (1.0 / instance.rho + gamma1),
            T1=(1.0 / instance.rho + gamma1) * x0,
            R1=state.tau1 * instance.phi.apply(x0),
        )
    x_hat, _ = prior_denoiser(state.T1, state.gamma1, instance.rho)
    return state.replace(x_hat1=x_hat)


def _record(instance: Instance, state: VampState, x_hat: np.ndarray) -> dict:
    row = {
        "iter": state.iter,
        "overlap": float("nan"),
        "mse": float("nan"),
        "gamma1": state.gamma1,
        "tau1": state.tau1,
        "damping": state.damping,
        "bayes_gap": state.bayes_gap,
    }
    if instance.x_star is not None:
        row["overlap"], row["mse"] = overlap_and_mse(x_hat, instance.x_star)
    return row


def vamp_run(
    instance: Instance,
    channel,
    init: str = "random",
    x0: Optional[np.ndarray] = None,
    max_iter: Optional[int] = None,
    damping: Optional[float] = None,
    tol: Optional[float] = None,
    seed: int = 0,
) -> Tuple[Estimate, List[dict]]:
    """
    迭代至 |x_hat1 变化|/sqrt(n) < tol 或达到 max_iter

    Returns:
        (估计, 每轮的 overlap/mse/标量轨迹)
    """
    config = get_vamp_config()
    max_iter = config.max_iter if max_iter is None else max_iter
    damping = config.damping if damping is None else damping
    tol = config.tol if tol is None else tol

    state = initial_state(instance, init, x0, seed)
    x_hat = state.x_hat1
    trajectory = [_record(instance, state, x_hat)]
    converged = False
    for _ in range(max_iter):
        try:
            state = vamp_iterate(instance, channel, state, damping)
        except DivergenceError as e:
            raise DivergenceError(str(e), trajectory) from e
        if not state.is_finite():
            raise DivergenceError(f"G-VAMP 第 {state.iter} 轮出现非有限值", trajectory)
        new_x, _ = prior_denoiser(state.T1, state.gamma1, instance.rho)
        change = np.linalg.norm(new_x - x_hat) / np.sqrt(instance.n)
        x_hat = new_x
        trajectory.append(_record(instance, state, x_hat))
        if change < tol:
            converged = True
            break
    logger.info(f"G-VAMP: {state.iter} 轮, 收敛={converged}")

    estimate = Estimate(
        x_hat=x_hat, source=EstimateSource.VAMP,
        meta={"iterations": state.iter, "converged": converged, "init": init},
    )
    if instance.x_star is not None:
        estimate.overlap, estimate.mse = overlap_and_mse(x_hat, instance.x_star)
    return estimate, trajectory
