"""
spectrum 命令：M_LAMP 与 M_TAP 的全部特征值，标记离群值与离 1 最近的 LAMP 特征值
"""
from typing import List, Optional

import numpy as np
import pandas as pd
import scipy.linalg as sla

from config import get_eig_config, get_logger, log_execution
from core.errors import ConfigError, DegenerateLiftError
from core.metrics import overlap_and_mse
from core.types import Instance
from numerics.linop import materialize
from spectral import build_MLAMP, build_MTAP, lift_lamp
from .experiment import ExperimentConfig, build_channel, build_instance
from .output import output_path, write_csv

logger = get_logger(__name__)

SPECTRUM_COLUMNS = ["operator", "index", "eigenvalue_real", "eigenvalue_imag", "flag", "overlap"]

# 与最近邻的距离超过中位最近邻距离的倍数即视为离群
ISOLATION_FACTOR = 10.0


def isolated(values: np.ndarray) -> np.ndarray:
    """复平面上与其余特征值明显分离的下标"""
    values = np.asarray(values, dtype=complex)
    if values.shape[0] < 3:
        return np.array([], dtype=int)
    dist = np.abs(values[:, None] - values[None, :])
    np.fill_diagonal(dist, np.inf)
    nearest = dist.min(axis=1)
    scale = float(np.median(nearest))
    if scale == 0.0:
        return np.flatnonzero(nearest > 0)
    return np.flatnonzero(nearest > ISOLATION_FACTOR * scale)


def _overlap(instance: Instance, vector: np.ndarray) -> float:
    if instance.x_star is None:
        return float("nan")
    return overlap_and_mse(vector, instance.x_star)[0]


def spectrum_rows(instance: Instance, channel) -> List[dict]:
    rows = []

    lamp = build_MLAMP(instance, channel)
    values, vectors = sla.eig(materialize(lamp.op))
    flags = {int(k): "outlier" for k in isolated(values)}
    unit = int(np.argmin(np.abs(values - 1.0)))
    flags[unit] = "outlier,bulk_unit" if unit in flags else "bulk_unit"
    for k, value in enumerate(values):
        overlap = float("nan")
        if k in flags:
            try:
                overlap = _overlap(instance, lift_lamp(instance, lamp, vectors[:, k]))
            except DegenerateLiftError:
                pass
        rows.append({"operator": "M_LAMP", "index": k, "eigenvalue_real": value.real,
                     "eigenvalue_imag": value.imag, "flag": flags.get(k, ""), "overlap": overlap})

    tap = materialize(build_MTAP(instance, channel).op)
    tap_values, tap_vectors = sla.eigh(0.5 * (tap + tap.conj().T))
    order = np.argsort(tap_values)[::-1]
    tap_values, tap_vectors = tap_values[order], tap_vectors[:, order]
    gaps = -np.diff(tap_values)
    top_isolated = gaps.size > 1 and gaps[0] > ISOLATION_FACTOR * float(np.median(gaps[1:]))
    for k, value in enumerate(tap_values):
        flag = ""
        overlap = float("nan")
        if k == 0:
            flag = "top,outlier" if top_isolated else "top"
            overlap = _overlap(instance, tap_vectors[:, 0])
        rows.append({"operator": "M_TAP", "index": k, "eigenvalue_real": float(value),
                     "eigenvalue_imag": 0.0, "flag": flag, "overlap": overlap})
    return rows


@log_execution(logger)
def run_spectrum(config: ExperimentConfig, alpha: Optional[float] = None) -> pd.DataFrame:
    alpha = alpha if alpha is not None else config.alpha_grid()[0]
    n, _ = config.ensemble.dims(alpha)
    limit = get_eig_config().dense_eig_max
    if n > limit:
        raise ConfigError(f"spectrum 需要稠密特征分解，要求 n <= {limit}，当前 n={n}")
    channel = build_channel(config)
    instance = build_instance(config, channel, 0, alpha, 0)
    rows = spectrum_rows(instance, channel)
    outliers = [r for r in rows if "outlier" in r["flag"]]
    logger.info(f"spectrum: alpha={instance.alpha:.4g}, 离群特征值 {len(outliers)} 个")
    return write_csv(rows, output_path(config.output, f"_spectrum_alpha{instance.alpha:g}.csv"),
                     SPECTRUM_COLUMNS)
