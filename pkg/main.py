import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

from config import get_logger, setup_logging
from core.errors import NumericalError, ParameterError

logger = get_logger(__name__)

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
# 检验未通过
EXIT_FAILED = 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="相位恢复谱方法实验")
    parser.add_argument("command", choices=["sweep", "spectrum", "threshold", "image", "vamp", "verify"])
    parser.add_argument("suite", nargs="?", default=None,
                        help="verify 的检验名: correspondence (别名 prop1) / hessian / linearization / identities / expansion")
    parser.add_argument("--config", type=Path, default=None, help="实验配置 JSON")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--out", type=str, default=None, help="输出路径前缀")
    parser.add_argument("--threads", type=int, default=None)
    parser.add_argument("--no-runtime", dest="record_runtime", action="store_const", const=False, default=None,
                        help="runtime_ms 列写 0，使 CSV 可逐字节复现")
    parser.add_argument("--alpha", type=float, default=None, help="spectrum / image 使用的 alpha")
    parser.add_argument("--image", type=Path, default=None, help="输入 PGM/PPM")
    parser.add_argument("--log-level", type=str, default=None)
    return parser


def _load(args: argparse.Namespace):
    from runner import ExperimentConfig, apply_overrides, load_config
    config = load_config(args.config) if args.config else ExperimentConfig()
    return apply_overrides(config, seed=args.seed, out=args.out, threads=args.threads,
                           record_runtime=args.record_runtime)


def dispatch(args: argparse.Namespace) -> int:
    if args.command == "verify":
        from runner import run_verify
        if args.suite is None:
            raise ParameterError("verify 需要检验名")
        seed = args.seed if args.seed is not None else (_load(args).seed if args.config else 0)
        results = run_verify(args.suite, seed)
        print(json.dumps(results, indent=2, ensure_ascii=False, default=str))
        return 0 if all(r["passed"] for r in results) else EXIT_FAILED

    config = _load(args)
    if args.command == "sweep":
        from runner import run_sweep
        run_sweep(config)
    elif args.command == "spectrum":
        from runner import run_spectrum
        run_spectrum(config, args.alpha)
    elif args.command == "threshold":
        from runner import run_threshold, threshold_report
        print(threshold_report(config, run_threshold(config)))
    elif args.command == "image":
        from runner import run_image
        run_image(config, args.image, args.alpha)
    elif args.command == "vamp":
        from runner import run_vamp
        run_vamp(config)
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(level=args.log_level)
    try:
        return dispatch(args)
    except ParameterError as e:
        logger.error(f"参数错误: {e}")
        return EXIT_CONFIG
    except NumericalError as e:
        logger.error(f"数值失败: {e}")
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
