"""
感知矩阵集合
高斯、列正交 Haar、子采样 Hadamard/DCT、部分 DFT 与高斯乘积
"""
from .operators import (
    EnsembleKind,
    SensingOperator,
    DenseSensing,
    HadamardSensing,
    DftSensing,
    DctSensing,
    SvdFactors,
    fwht,
)
from .makers import (
    make_gaussian,
    make_haar_columns,
    make_subsampled_hadamard,
    make_partial_dft,
    make_subsampled_dct,
    make_gaussian_product,
    make_ensemble,
    gaussian_moments,
    product_moments,
)
from .moments import estimate_moments, spectrum
from .instance import generate_instance, normalize_spectrum, calibrate_instance

__all__ = [
    "EnsembleKind",
    "SensingOperator",
    "DenseSensing",
    "HadamardSensing",
    "DftSensing",
    "DctSensing",
    "SvdFactors",
    "fwht",
    "make_gaussian",
    "make_haar_columns",
    "make_subsampled_hadamard",
    "make_partial_dft",
    "make_subsampled_dct",
    "make_gaussian_product",
    "make_ensemble",
    "gaussian_moments",
    "product_moments",
    "estimate_moments",
    "spectrum",
    "generate_instance",
    "normalize_spectrum",
    "calibrate_instance",
]
