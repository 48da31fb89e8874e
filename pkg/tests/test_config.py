import logging

import pytest
from pydantic import ValidationError

from config import (
    EigenConfig,
    QuadratureConfig,
    SpectralConfig,
    ThresholdConfig,
    VampConfig,
    get_eig_config,
    get_spectral_config,
    log_execution,
    reload_settings,
    setup_logging,
)


@pytest.fixture
def restore_settings():
    yield
    reload_settings()


class TestSettings:

    def test_yaml_defaults(self):
        assert get_eig_config().dense_eig_max == 2048
        assert get_spectral_config().clamp_low == -20.0
        assert get_spectral_config().clamp_high == 1.0

    def test_reload_from_file(self, tmp_path, restore_settings):
        path = tmp_path / "config.yaml"
        path.write_text("eig:\n  dense_eig_max: 64\n", encoding="utf-8")
        reload_settings(path)
        assert get_eig_config().dense_eig_max == 64
        assert get_spectral_config().pole_eps == 1e-12

    def test_missing_file_gives_defaults(self, tmp_path, restore_settings):
        settings = reload_settings(tmp_path / "absent.yaml")
        assert settings.vamp.damping == 0.7

    def test_env_prefix(self, monkeypatch):
        monkeypatch.setenv("EIG_DENSE_EIG_MAX", "128")
        assert EigenConfig().dense_eig_max == 128

    @pytest.mark.parametrize("factory", [
        lambda: QuadratureConfig(posterior_grid=100),
        lambda: SpectralConfig(clamp_low=1.0),
        lambda: SpectralConfig(clamp_high=0.0),
        lambda: VampConfig(damping=0.0),
        lambda: ThresholdConfig(bracket=[2.0, 1.0]),
    ])
    def test_validators(self, factory):
        with pytest.raises(ValidationError):
            factory()


class TestLogging:

    def test_log_execution(self, caplog):
        @log_execution()
        def solve(x):
            if x < 0:
                raise ValueError("负数")
            return 2 * x

        with caplog.at_level(logging.INFO):
            assert solve(3) == 6
            with pytest.raises(ValueError):
                solve(-1)
        messages = [r.getMessage() for r in caplog.records]
        assert any("[solve] 完成" in m for m in messages)
        assert any("[solve] 失败" in m and "ValueError" in m for m in messages)

    def test_setup_logging_level(self, tmp_path):
        log_file = tmp_path / "logs" / "run.log"
        root = setup_logging(level="debug", log_file=str(log_file))
        try:
            assert root.level == logging.DEBUG
            assert len(root.handlers) == 2
            logging.getLogger("spectral").debug("写入文件")
            for handler in root.handlers:
                handler.flush()
            assert "写入文件" in log_file.read_text(encoding="utf-8")
        finally:
            setup_logging(level="WARNING")
