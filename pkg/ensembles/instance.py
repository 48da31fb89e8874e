"""
问题实例的生成与校准
"""
from typing import Optional, Union

import numpy as np

from config import get_logger
from core.errors import ParameterError
from core.field import FieldTag
from core.rng import make_rng, STREAM_CHANNEL
from core.signal import generate_signal
from core.types import Instance
from .makers import make_ensemble
from .moments import estimate_moments
from .operators import SensingOperator

logger = get_logger(__name__)


def generate_instance(
    field: FieldTag,
    n: int,
    m: int,
    ensemble: Union[str, SensingOperator],
    channel,
    rho: float,
    seed: int,
    x_star: Optional[np.ndarray] = None,
    **ensemble_params,
) -> Instance:
    """
    生成 (Phi, x*, y)

    信号、算子、信道各用独立的随机流，均由 seed 派生
    """
    if not rho > 0:
        raise ParameterError(f"rho 必须为正，当前为{rho}")
    if isinstance(ensemble, SensingOperator):
        phi = ensemble
        if (phi.n, phi.m) != (n, m):
            raise ParameterError(f"算子维度 ({phi.n}, {phi.m}) 与 (n, m)=({n}, {m}) 不一致")
    else:
        phi = make_ensemble(ensemble, field, n, m, seed, **ensemble_params)
    if phi.field != field:
        raise ParameterError(f"算子数域 {phi.field} 与实例数域 {field} 不一致")

    if x_star is None:
        x_star = generate_signal(field, n, rho, seed)
    else:
        x_star = field.cast(x_star)
        if x_star.shape != (n,):
            raise ParameterError(f"x_star 维度 {x_star.shape} 与 n={n} 不一致")

    moments = phi.moments if phi.moments is not None else estimate_moments(phi, seed=seed)
    z = phi.apply(x_star)
    y = np.asarray(channel.sample(z, make_rng(seed, STREAM_CHANNEL)), dtype=float)
    return Instance(
        field=field,
        n=n,
        m=m,
        rho=float(rho),
        phi=phi,
        y=y,
        moments=moments,
        seed=int(seed),
        x_star=x_star,
        meta={"ensemble": phi.kind.value, "channel": repr(channel), **phi.params},
    )


def normalize_spectrum(instance: Instance) -> Instance:
    """缩放 Phi 使经验 <lambda> 恰为 alpha，谱矩改为精确值"""
    emp = estimate_moments(instance.phi)
    c = np.sqrt(instance.alpha / emp.mean_lambda)
    phi = instance.phi.rescaled(c)
    exact = estimate_moments(phi)
    phi.moments = exact
    return instance.with_phi(phi, exact)


def calibrate_instance(instance: Instance, channel) -> Instance:
    """
    使平凡不动点在有限 m 下精确成立
    1. 谱归一化 <lambda>_emp = alpha
    2. sigma2* 满足 sigma2 = mean v(y; sigma2)，rho* = alpha sigma2* / <lambda>
    """
    normalized = normalize_spectrum(instance)
    sigma2 = channel.self_consistent_sigma2(normalized.y)
    rho = instance.alpha * sigma2 / normalized.moments.mean_lambda
    logger.debug(f"校准: rho {instance.rho:.6g} -> {rho:.6g}")
    return normalized.with_rho(rho)
