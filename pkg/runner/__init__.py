"""
命令行各子命令的实现
"""
from .experiment import (
    ChannelSpec,
    EnsembleSpec,
    ExperimentConfig,
    GdSpec,
    ImageSpec,
    ThresholdSpec,
    VampSpec,
    apply_overrides,
    build_channel,
    build_instance,
    load_config,
    parse_config,
)
from .output import FLOAT_FORMAT, output_path, write_csv
from .sweep import SWEEP_COLUMNS, run_cell, run_method, run_sweep
from .spectrum import SPECTRUM_COLUMNS, isolated, run_spectrum, spectrum_rows
from .threshold import moment_functions, run_threshold, threshold_report
from .vamp_run import TRAJECTORY_COLUMNS, run_vamp
from .image import downscale, read_pnm, run_image, synthetic_image, write_pnm
from .verify import SUITES, run_verify

__all__ = [
    'ChannelSpec',
    'EnsembleSpec',
    'ExperimentConfig',
    'GdSpec',
    'ImageSpec',
    'ThresholdSpec',
    'VampSpec',
    'apply_overrides',
    'build_channel',
    'build_instance',
    'load_config',
    'parse_config',
    'FLOAT_FORMAT',
    'output_path',
    'write_csv',
    'SWEEP_COLUMNS',
    'run_cell',
    'run_method',
    'run_sweep',
    'SPECTRUM_COLUMNS',
    'isolated',
    'run_spectrum',
    'spectrum_rows',
    'moment_functions',
    'run_threshold',
    'threshold_report',
    'TRAJECTORY_COLUMNS',
    'run_vamp',
    'downscale',
    'read_pnm',
    'run_image',
    'synthetic_image',
    'write_pnm',
    'SUITES',
    'run_verify',
]
