"""
verify 命令：在固定的小规模实例上运行各数值检验
"""
from typing import Any, Callable, Dict, List

import numpy as np

from channels import bayes_identities, make_channel
from config import get_logger, log_execution
from core.errors import ConfigError
from core.field import COMPLEX, REAL
from ensembles import generate_instance, make_ensemble
from spectral import verify_correspondence
from tap import expansion_order_ratio, hessian_check
from vamp import linearization_oracle

logger = get_logger(__name__)


def _check(name: str, passed: bool, /, **details) -> Dict[str, Any]:
    details.pop("passed", None)
    return {"check": name, "passed": bool(passed), **details}


def verify_correspondence_suite(seed: int) -> List[Dict[str, Any]]:
    results = []
    for label, channel in (("noiseless", make_channel("noiseless", COMPLEX)),
                           ("poisson", make_channel("poisson", COMPLEX, intensity=1.0))):
        instance = generate_instance(COMPLEX, 30, 60, "gaussian_iid", channel, 1.0, seed)
        report = verify_correspondence(instance, channel)
        results.append(_check(f"correspondence[{label}]", report.passed, **report.to_dict()))
    return results


def verify_hessian_suite(seed: int) -> List[Dict[str, Any]]:
    results = []
    for field, n, m, tol in ((REAL, 16, 32, 1e-2), (COMPLEX, 8, 16, 2e-2)):
        channel = make_channel("noiseless", field)
        instance = generate_instance(field, n, m, "gaussian_iid", channel, 1.0, seed)
        report = hessian_check(instance, channel, tol=tol)
        results.append(_check(f"hessian[{field}, n={n}, m={m}]", report.passed, **report.to_dict()))
    return results


def verify_linearization_suite(seed: int, n: int = 24, m: int = 48) -> List[Dict[str, Any]]:
    """实数与复数无噪声各一例，另加复数 Poisson"""
    cases = [(field, "noiseless", make_channel("noiseless", field)) for field in (REAL, COMPLEX)]
    cases.append((COMPLEX, "poisson", make_channel("poisson", COMPLEX, intensity=1.0)))
    results = []
    for field, label, channel in cases:
        instance = generate_instance(field, n, m, "gaussian_iid", channel, 1.0, seed)
        report = linearization_oracle(instance, channel)
        results.append(_check(f"linearization[{field}, {label}]", report.passed, **report.to_dict()))
    return results


def verify_identities_suite(seed: int, n: int = 100, m: int = 10_000) -> List[Dict[str, Any]]:
    """
    在生成的高斯实例上检验 Bayes 恒等式及其微分形式

    给定 x* 时 z = A x* 各分量独立且 E|z|^2 = |x*|^2 / n，以此作为 sigma2
    """
    results = []
    for field in (REAL, COMPLEX):
        for label, channel in (("noiseless", make_channel("noiseless", field)),
                               ("poisson", make_channel("poisson", field, intensity=1.0))):
            instance = generate_instance(field, n, m, "gaussian_iid", channel, 1.0, seed)
            sigma2 = float(np.vdot(instance.x_star, instance.x_star).real) / n
            report = bayes_identities(channel, instance.y, sigma2)
            results.append(_check(f"identities[{field}, {label}]", report.passed, **report.to_dict()))
    return results


def verify_expansion_suite(seed: int, n: int = 200, alpha: float = 2.0) -> List[Dict[str, Any]]:
    """F 展开余项的阶：|E(1e-2) / E(1e-3)| 应在 [500, 2000]"""
    m = int(round(alpha * n))
    spectra = {
        "gaussian_empirical": make_ensemble("gaussian_iid", REAL, n, m, seed).svd().spectrum,
        "haar": np.ones(n),
    }
    results = []
    for label, spectrum in spectra.items():
        ratio = expansion_order_ratio(1.0, spectrum, alpha)
        results.append(_check(f"expansion[{label}]", 500.0 <= ratio <= 2000.0, ratio=ratio))
    return results


SUITES: Dict[str, Callable[[int], List[Dict[str, Any]]]] = {
    "correspondence": verify_correspondence_suite,
    "prop1": verify_correspondence_suite,
    "hessian": verify_hessian_suite,
    "linearization": verify_linearization_suite,
    "identities": verify_identities_suite,
    "expansion": verify_expansion_suite,
}


@log_execution(logger)
def run_verify(suite: str, seed: int = 0) -> List[Dict[str, Any]]:
    if suite not in SUITES:
        raise ConfigError(f"未知检验: {suite}，可选 {sorted(SUITES)}")
    results = SUITES[suite](seed)
    for result in results:
        status = "通过" if result["passed"] else "失败"
        logger.info(f"{result['check']}: {status}")
    return results
