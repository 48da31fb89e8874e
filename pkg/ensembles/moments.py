"""
Phi^H Phi / n 的谱矩估计
"""
import numpy as np

from core.errors import ParameterError
from core.rng import make_rng, STREAM_PROBE
from core.types import MomentSource, SpectralMoments
from .operators import SensingOperator

# 精确迹路径的最大维度
EXACT_TRACE_MAX_N = 2048


def _probes(rng: np.random.Generator, n: int, k: int, complex_field: bool) -> np.ndarray:
    """Rademacher（实）或随机相位（复）探针，|g|^2 = n"""
    if complex_field:
        return np.exp(2j * np.pi * rng.random((n, k)))
    return rng.choice(np.array([-1.0, 1.0]), size=(n, k))


def estimate_moments(op: SensingOperator, probes: int = 20, seed: int = 0) -> SpectralMoments:
    """
    <lambda> = tr(A^H A)/n, <lambda^2> = tr((A^H A)^2)/n

    可稠密化且 n <= 2048 时直接算迹，否则用 Hutchinson 探针
    """
    if int(probes) != probes or probes < 1:
        raise ParameterError(f"probes 必须为正整数，当前为{probes}")
    n = op.n
    if op.has_dense and n <= EXACT_TRACE_MAX_N:
        A = op.dense()
        gram = A.conj().T @ A
        mean = float(np.real(np.trace(gram))) / n
        mean_sq = float(np.sum(np.abs(gram) ** 2)) / n
        return SpectralMoments(mean, mean_sq, MomentSource.EMPIRICAL)

    rng = make_rng(seed, STREAM_PROBE)
    G = _probes(rng, n, int(probes), op.field.is_complex)
    AG = op.adjoint(op.apply(G))
    mean = float(np.real(np.sum(np.conj(G) * AG))) / (n * probes)
    mean_sq = float(np.sum(np.abs(AG) ** 2)) / (n * probes)
    # Hutchinson 估计不保证 Jensen 不等式
    mean_sq = max(mean_sq, mean ** 2)
    return SpectralMoments(mean, mean_sq, MomentSource.EMPIRICAL)


def spectrum(op: SensingOperator) -> np.ndarray:
    """A^H A 的全部 n 个特征值（来自 SVD）"""
    return op.svd().spectrum
