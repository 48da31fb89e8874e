import pytest

from channels import make_channel
from core.field import COMPLEX, REAL
from ensembles import calibrate_instance, generate_instance


@pytest.fixture
def noiseless_real():
    return make_channel("noiseless", REAL)


@pytest.fixture
def noiseless_complex():
    return make_channel("noiseless", COMPLEX)


@pytest.fixture
def poisson_complex():
    return make_channel("poisson", COMPLEX, intensity=1.0)


@pytest.fixture
def small_complex(noiseless_complex):
    """复高斯 n=24, m=48 无噪声实例"""
    return generate_instance(COMPLEX, 24, 48, "gaussian_iid", noiseless_complex, 1.0, seed=11)


@pytest.fixture
def small_real(noiseless_real):
    return generate_instance(REAL, 24, 48, "gaussian_iid", noiseless_real, 1.0, seed=12)


@pytest.fixture
def calibrated_complex(small_complex, noiseless_complex):
    return calibrate_instance(small_complex, noiseless_complex)


@pytest.fixture
def out_prefix(tmp_path):
    return str(tmp_path / "run")
