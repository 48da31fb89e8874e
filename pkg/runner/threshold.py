"""
threshold 命令：解弱恢复阈值并输出一行报告
"""
from config import get_logger, log_execution
from threshold import ThresholdResult, analytic_moments, empirical_moments, solve_threshold_detail
from .experiment import ExperimentConfig, build_channel

logger = get_logger(__name__)


def moment_functions(config: ExperimentConfig):
    ens = config.ensemble
    spec = config.threshold
    if spec.moments == "analytic":
        return analytic_moments(ens.name, gamma=ens.gamma, ratio_base=ens.ratio_base)
    return empirical_moments(
        ens.name, config.field_tag, ens.n, bracket=spec.bracket, grid_points=spec.grid_points,
        seed=config.seed, gamma=ens.gamma, ratio_base=ens.ratio_base,
    )


@log_execution(logger)
def run_threshold(config: ExperimentConfig) -> ThresholdResult:
    channel = build_channel(config)
    moments = moment_functions(config)
    return solve_threshold_detail(channel, moments, config.rho, config.threshold.bracket)


def threshold_report(config: ExperimentConfig, result: ThresholdResult) -> str:
    roots = ", ".join(f"{r:.6g}" for r in result.roots)
    return (
        f"alpha_WR={result.alpha_wr:.6f} ensemble={config.ensemble.name} "
        f"channel={config.channel.name} field={config.field} "
        f"moments={config.threshold.moments} roots=[{roots}]"
    )
