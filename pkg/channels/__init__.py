"""
观测信道模块
采样、后验矩、d_omega g_out、VAMP 去噪均值与阈值积分核
"""
from .base import Channel, ChannelKind, ThresholdKernels, ThresholdSupport
from .noiseless import NoiselessChannel, bessel_ratio, inverse_bessel_ratio
from .poisson import PoissonChannel
from .generic import GenericChannel, gaussian_intensity_channel
from .statistics import (
    make_channel,
    sample,
    posterior_second_moment,
    dgout_at_zero,
    fourth_posterior_moment,
    denoiser_mean,
    posterior_moments,
    threshold_kernels,
    threshold_integral,
    self_consistent_sigma2,
    ChannelStats,
    channel_stats,
    BayesIdentityReport,
    bayes_identities,
)

__all__ = [
    "Channel",
    "ChannelKind",
    "ThresholdKernels",
    "ThresholdSupport",
    "NoiselessChannel",
    "PoissonChannel",
    "GenericChannel",
    "gaussian_intensity_channel",
    "bessel_ratio",
    "inverse_bessel_ratio",
    "make_channel",
    "sample",
    "posterior_second_moment",
    "dgout_at_zero",
    "fourth_posterior_moment",
    "denoiser_mean",
    "posterior_moments",
    "threshold_kernels",
    "threshold_integral",
    "self_consistent_sigma2",
    "ChannelStats",
    "channel_stats",
    "BayesIdentityReport",
    "bayes_identities",
]
