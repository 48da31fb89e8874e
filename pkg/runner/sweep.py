"""
sweep 命令：alpha 网格 x trial x 方法，每格一行
"""
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List

import numpy as np
import pandas as pd

from channels.base import Channel
from config import get_logger, log_execution
from core.errors import NumericalError, ParameterError
from core.types import Estimate, Instance
from refine import GdConfig, gd_run
from spectral import run_estimator
from vamp import vamp_run
from .experiment import ExperimentConfig, build_channel, build_instance
from .output import output_path, write_csv

logger = get_logger(__name__)

SWEEP_COLUMNS = [
    "alpha", "trial", "method", "overlap", "mse",
    "eigenvalue_real", "eigenvalue_imag", "runtime_ms", "clamp_count", "status",
]


def gd_config_for(config: ExperimentConfig, instance: Instance) -> GdConfig:
    spec = config.gd
    return GdConfig.from_settings(
        instance.rho, step=spec.step, backtracking=spec.backtracking,
        max_iter=spec.max_iter, tol_grad=spec.tol_grad, step_rule=spec.step_rule,
    )


def run_method(config: ExperimentConfig, name: str, instance: Instance, channel: Channel,
               cache: Dict[str, Estimate]) -> Estimate:
    """谱估计器直接调用；vamp / gd 以配置中的谱估计为初值，初值估计在同一格内复用"""
    if name in cache:
        return cache[name]
    if name == "vamp":
        spec = config.vamp
        x0 = run_method(config, spec.init_method, instance, channel, cache).x_hat \
            if spec.init == "from_estimate" else None
        estimate, _ = vamp_run(
            instance, channel, init=spec.init, x0=x0, max_iter=spec.max_iter,
            damping=spec.damping, tol=spec.tol, seed=instance.seed,
        )
    elif name == "gd":
        x0 = run_method(config, config.gd.init_method, instance, channel, cache).x_hat
        estimate, _ = gd_run(instance, x0, gd_config_for(config, instance))
    else:
        estimate = run_estimator(name, instance, channel, seed=instance.seed)
    cache[name] = estimate
    return estimate


def _row(alpha: float, trial: int, method: str, estimate=None, runtime_ms: float = float("nan"),
         status: str = "ok") -> dict:
    row = {
        "alpha": alpha, "trial": trial, "method": method,
        "overlap": float("nan"), "mse": float("nan"),
        "eigenvalue_real": float("nan"), "eigenvalue_imag": float("nan"),
        "runtime_ms": runtime_ms, "clamp_count": 0, "status": status,
    }
    if estimate is not None:
        value = complex(estimate.eigenvalue)
        row.update(
            overlap=estimate.overlap, mse=estimate.mse,
            eigenvalue_real=value.real, eigenvalue_imag=value.imag,
            clamp_count=int(estimate.meta.get("clamp_count", 0)),
        )
    return row


def run_cell(config: ExperimentConfig, channel: Channel, alpha_index: int, alpha: float,
             trial: int) -> List[dict]:
    """单个 (alpha, trial) 格；失败记录在 status 列，不中断 sweep"""
    try:
        instance = build_instance(config, channel, alpha_index, alpha, trial)
    except (ParameterError, NumericalError) as e:
        logger.warning(f"alpha={alpha}, trial={trial}: 实例构造失败 {e}")
        return [_row(alpha, trial, method, status=type(e).__name__) for method in config.methods]

    rows = []
    cache: Dict[str, Estimate] = {}
    for method in config.methods:
        start = time.perf_counter()
        try:
            estimate = run_method(config, method, instance, channel, cache)
        except (ParameterError, NumericalError) as e:
            logger.warning(f"alpha={instance.alpha:.4g}, trial={trial}, {method}: {e}")
            rows.append(_row(instance.alpha, trial, method, status=type(e).__name__))
            continue
        runtime_ms = estimate.meta.get("runtime_ms", (time.perf_counter() - start) * 1e3) \
            if config.record_runtime else 0.0
        rows.append(_row(instance.alpha, trial, method, estimate, runtime_ms))
    return rows


@log_execution(logger)
def run_sweep(config: ExperimentConfig) -> pd.DataFrame:
    """
    各格在线程池中执行，结果按 (alpha, trial) 提交顺序收集后统一写出
    """
    alphas = config.alpha_grid()
    channel = build_channel(config)
    cells = [(i, a, t) for i, a in enumerate(alphas) for t in range(config.trials)]
    logger.info(f"sweep: {len(alphas)} 个 alpha x {config.trials} trial, 方法 {config.methods}")

    if config.threads > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            futures = [pool.submit(run_cell, config, channel, i, a, t) for i, a, t in cells]
            results = [f.result() for f in futures]
    else:
        results = [run_cell(config, channel, i, a, t) for i, a, t in cells]

    rows = [row for cell in results for row in cell]
    df = write_csv(rows, output_path(config.output, "_sweep.csv"), SWEEP_COLUMNS)
    failed = int(np.sum(df["status"] != "ok")) if len(df) else 0
    if failed:
        logger.warning(f"sweep: {failed} 个格失败，详见 status 列")
    return df
