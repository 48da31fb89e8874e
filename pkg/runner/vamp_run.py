"""
vamp 命令：单个实例上的 G-VAMP 轨迹
"""
import pandas as pd

from config import get_logger, log_execution
from vamp import vamp_run
from core.errors import DivergenceError
from .experiment import ExperimentConfig, build_channel, build_instance
from .output import output_path, write_csv
from .sweep import run_method

logger = get_logger(__name__)

TRAJECTORY_COLUMNS = ["iter", "overlap", "mse", "gamma1", "tau1", "damping", "bayes_gap"]


@log_execution(logger)
def run_vamp(config: ExperimentConfig) -> pd.DataFrame:
    """发散时仍写出已有轨迹，再抛出异常"""
    channel = build_channel(config)
    instance = build_instance(config, channel, 0, config.alpha_grid()[0], 0)
    spec = config.vamp
    x0 = None
    if spec.init == "from_estimate":
        x0 = run_method(config, spec.init_method, instance, channel, {}).x_hat
    path = output_path(config.output, "_vamp.csv")
    try:
        estimate, trajectory = vamp_run(
            instance, channel, init=spec.init, x0=x0, max_iter=spec.max_iter,
            damping=spec.damping, tol=spec.tol, seed=instance.seed,
        )
    except DivergenceError as e:
        write_csv(e.trajectory, path, TRAJECTORY_COLUMNS)
        raise
    logger.info(f"G-VAMP: overlap={estimate.overlap:.4g}, mse={estimate.mse:.4g}")
    return write_csv(trajectory, path, TRAJECTORY_COLUMNS)
