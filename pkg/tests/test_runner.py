import json
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from core.errors import ConfigError, FormatError, ParameterError
from main import EXIT_CONFIG, main
from runner import (
    SPECTRUM_COLUMNS,
    SUITES,
    SWEEP_COLUMNS,
    ExperimentConfig,
    apply_overrides,
    downscale,
    isolated,
    load_config,
    output_path,
    parse_config,
    read_pnm,
    run_image,
    run_spectrum,
    run_sweep,
    run_threshold,
    run_verify,
    synthetic_image,
    threshold_report,
    write_pnm,
)


def _sweep_config(out_prefix, **overrides):
    raw = {
        "field": 2,
        "ensemble": {"name": "gaussian_iid", "n": 24, "alphas": [1.0, 3.0]},
        "methods": ["tap", "mm"],
        "trials": 2,
        "seed": 5,
        "output": out_prefix,
    }
    raw.update(overrides)
    return parse_config(raw)


CONFIG_DIR = Path(__file__).parent.parent / "configs"


def _without_runtime(prefix):
    index = SWEEP_COLUMNS.index("runtime_ms")
    lines = output_path(prefix, "_sweep.csv").read_text().splitlines()
    return [line.split(",")[:index] + line.split(",")[index + 1:] for line in lines]


class TestConfig:

    def test_defaults(self):
        config = ExperimentConfig()
        assert config.field == 2
        assert config.methods == ["tap"]
        assert config.field_tag.beta == 2

    @pytest.mark.parametrize("raw", [
        {"methods": ["svd"]},
        {"methods": []},
        {"trials": 0},
        {"rho": -1.0},
        {"field": 3},
        {"ensemble": {"name": "toeplitz"}},
        {"ensemble": {"name": "partial_dft"}, "field": 1},
        {"ensemble": {"name": "subsampled_hadamard"}, "field": 2},
        {"gd": {"init_method": "vamp"}},
    ])
    def test_invalid(self, raw):
        with pytest.raises(ConfigError):
            parse_config(raw)

    def test_load_errors(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "missing.json")
        bad = tmp_path / "bad.json"
        bad.write_text("{not json", encoding="utf-8")
        with pytest.raises(ConfigError):
            load_config(bad)
        assert issubclass(ConfigError, ParameterError)

    def test_alpha_grid(self):
        assert parse_config({"ensemble": {"n": 10, "m": 25}}).alpha_grid() == [2.5]
        with pytest.raises(ConfigError):
            ExperimentConfig().alpha_grid()

    def test_dims_fixed_m(self):
        """给出 m 与 alpha 网格时固定 m"""
        ens = parse_config({"ensemble": {"m": 2048, "alphas": [2.0, 4.0]}}).ensemble
        assert ens.dims(2.0) == (1024, 2048)
        assert ens.dims(4.0) == (512, 2048)
        assert parse_config({"ensemble": {"n": 100}}).ensemble.dims(1.5) == (100, 150)

    def test_product_inner_dimension(self):
        """p 按当前 alpha 的 (n, m) 计算"""
        ens = parse_config({"ensemble": {"name": "gaussian_product", "m": 1024, "alphas": [0.5, 2.0],
                                         "ratio_base": "n"}}).ensemble
        assert ens.params_for(*ens.dims(2.0)) == {"p": 512}
        assert ens.params_for(*ens.dims(0.5)) == {"p": 2048}
        by_m = parse_config({"ensemble": {"name": "gaussian_product", "gamma": 0.5}}).ensemble
        assert by_m.params_for(100, 300) == {"p": 150}
        assert parse_config({}).ensemble.params_for(10, 20) == {}

    def test_overrides(self):
        config = apply_overrides(ExperimentConfig(), seed=9, out="x/y", threads=3)
        assert (config.seed, config.output, config.threads) == (9, "x/y", 3)
        assert config.record_runtime
        assert not apply_overrides(config, record_runtime=False).record_runtime
        with pytest.raises(ConfigError):
            apply_overrides(ExperimentConfig(), threads=0)

    def test_output_path(self, tmp_path):
        path = output_path(tmp_path / "sub" / "run", "_sweep.csv")
        assert path == tmp_path / "sub" / "run_sweep.csv"
        assert path.parent.is_dir()


class TestSweep:

    def test_columns_and_rows(self, out_prefix):
        df = run_sweep(_sweep_config(out_prefix))
        assert list(df.columns) == SWEEP_COLUMNS
        assert len(df) == 2 * 2 * 2
        assert set(df["method"]) == {"tap", "mm"}
        assert (df["status"] == "ok").all()
        on_disk = pd.read_csv(output_path(out_prefix, "_sweep.csv"))
        assert list(on_disk.columns) == SWEEP_COLUMNS

    def test_deterministic_except_runtime(self, tmp_path):
        """相同种子下除 runtime_ms 外逐字节一致，与线程数无关"""
        a = run_sweep(_sweep_config(str(tmp_path / "a")))
        b = run_sweep(_sweep_config(str(tmp_path / "b"), threads=2))
        pd.testing.assert_frame_equal(a.drop(columns="runtime_ms"), b.drop(columns="runtime_ms"))
        assert _without_runtime(tmp_path / "a") == _without_runtime(tmp_path / "b")

    def test_byte_identical_without_runtime(self, tmp_path):
        """record_runtime=false 时 CSV 整体逐字节一致"""
        a = run_sweep(_sweep_config(str(tmp_path / "a"), record_runtime=False))
        b = run_sweep(_sweep_config(str(tmp_path / "b"), record_runtime=False, threads=2))
        assert (a["runtime_ms"] == 0.0).all()
        pd.testing.assert_frame_equal(a, b)
        paths = [output_path(tmp_path / name, "_sweep.csv") for name in ("a", "b")]
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_single_method(self, out_prefix):
        df = run_sweep(_sweep_config(out_prefix, methods=["tap"], trials=1))
        assert list(df["method"]) == ["tap", "tap"]

    def test_failures_recorded_in_status(self, out_prefix):
        """实例构造失败时记录异常名而非中断"""
        config = _sweep_config(out_prefix, field=1, trials=1,
                               ensemble={"name": "subsampled_hadamard", "n": 24, "alphas": [1.0]})
        df = run_sweep(config)
        assert list(df["status"]) == ["ShapeError", "ShapeError"]
        assert df["overlap"].isna().all()


class TestSpectrum:

    def test_isolated(self):
        values = np.array([0.0, 0.01, 0.02, 0.03, 0.04, 5.0])
        assert list(isolated(values)) == [5]
        assert isolated(np.array([1.0, 2.0])).size == 0

    def test_rows_and_flags(self, out_prefix):
        config = parse_config({"ensemble": {"n": 16, "alphas": [2.0]}, "output": out_prefix})
        df = run_spectrum(config)
        assert list(df.columns) == SPECTRUM_COLUMNS
        assert (df["operator"] == "M_LAMP").sum() == 32
        assert (df["operator"] == "M_TAP").sum() == 16
        assert df["flag"].fillna("").str.contains("bulk_unit").sum() == 1
        tap = df[df["operator"] == "M_TAP"]
        assert tap["flag"].iloc[0].startswith("top")
        assert tap["eigenvalue_real"].is_monotonic_decreasing

    def test_dense_limit(self, out_prefix):
        config = parse_config({"ensemble": {"n": 4096, "alphas": [2.0]}, "output": out_prefix})
        with pytest.raises(ConfigError):
            run_spectrum(config)


class TestThreshold:

    def test_report(self):
        config = parse_config({"field": 2, "ensemble": {"name": "haar_columns"}})
        result = run_threshold(config)
        assert result.alpha_wr == pytest.approx(2.0, abs=1e-4)
        report = threshold_report(config, result)
        assert float(report.split()[0].split("=")[1]) == pytest.approx(2.0, abs=1e-4)
        assert "ensemble=haar_columns" in report

    @pytest.mark.parametrize("name,expected", [("complex_product_image", 0.5), ("real_product_sweep", 0.25)])
    def test_shipped_product_configs(self, name, expected):
        """仓库自带乘积矩阵配置的阈值有根，且为高斯情形的一半"""
        config = load_config(CONFIG_DIR / f"{name}.json")
        assert config.ensemble.ratio_base == "n"
        config = parse_config({**config.model_dump(), "threshold": {"moments": "analytic"}})
        assert run_threshold(config).alpha_wr == pytest.approx(expected, abs=1e-3)


class TestImage:

    def test_pnm_roundtrip(self, tmp_path):
        image = synthetic_image(5, 7, color=True).astype(np.uint8)
        path = write_pnm(tmp_path / "a.ppm", image)
        np.testing.assert_array_equal(read_pnm(path), image)
        gray = np.arange(12, dtype=np.uint8).reshape(3, 4)
        np.testing.assert_array_equal(read_pnm(write_pnm(tmp_path / "g.pgm", gray)), gray)

    def test_header_comments(self, tmp_path):
        path = tmp_path / "c.pgm"
        path.write_bytes(b"P5\n# comment\n2 1\n255\n" + bytes([3, 200]))
        np.testing.assert_array_equal(read_pnm(path), [[3, 200]])

    @pytest.mark.parametrize("data", [
        b"P2\n2 1\n255\n1 2",
        b"P5\n2 1\n65535\n" + bytes(4),
        b"P5\n2 2\n255\n" + bytes(3),
        b"P5\n2",
        b"P5\nx 1\n255\n" + bytes(2),
    ])
    def test_format_errors(self, tmp_path, data):
        path = tmp_path / "bad.pgm"
        path.write_bytes(data)
        with pytest.raises(FormatError):
            read_pnm(path)

    def test_downscale(self):
        image = np.arange(16.0).reshape(4, 4)
        np.testing.assert_allclose(downscale(image, 2), [[2.5, 4.5], [10.5, 12.5]])
        assert downscale(np.ones((5, 5, 3)), 2).shape == (2, 2, 3)
        with pytest.raises(ParameterError):
            downscale(image, 0)

    def test_pipeline(self, out_prefix):
        config = parse_config({
            "field": 2, "ensemble": {"name": "gaussian_iid", "alphas": [4.0]},
            "methods": ["tap"], "output": out_prefix,
            "image": {"size": [6, 4], "color": True},
        })
        df = run_image(config)
        assert len(df) == 3
        assert (df["status"] == "ok").all()
        recovered = read_pnm(output_path(out_prefix, "_tap.ppm"))
        assert recovered.shape == (6, 4, 3)

    def test_constant_plane(self, tmp_path, out_prefix):
        path = write_pnm(tmp_path / "flat.pgm", np.full((3, 3), 77, dtype=np.uint8))
        config = parse_config({"ensemble": {"alphas": [3.0]}, "output": out_prefix})
        df = run_image(config, path)
        assert list(df["status"]) == ["constant"]
        np.testing.assert_array_equal(read_pnm(output_path(out_prefix, "_tap.pgm")), np.full((3, 3), 77))


class TestVerifyAndMain:

    def test_unknown_suite(self):
        with pytest.raises(ConfigError):
            run_verify("everything")

    def test_expansion_suite(self):
        results = run_verify("expansion")
        assert [r["passed"] for r in results] == [True, True]

    def test_prop1_alias(self):
        assert SUITES["prop1"] is SUITES["correspondence"]

    @pytest.mark.slow
    def test_prop1_suite(self):
        results = run_verify("prop1")
        assert all(r["passed"] for r in results)
        assert all(r["null_found"] for r in results if "noiseless" in r["check"])

    @pytest.mark.slow
    def test_linearization_suite(self):
        """实数与复数各自在 n=24, m=48 上检验"""
        results = run_verify("linearization")
        assert [r["check"] for r in results] == [
            "linearization[real, noiseless]", "linearization[complex, noiseless]", "linearization[complex, poisson]",
        ]
        assert all(r["passed"] for r in results)

    def test_identities_suite(self):
        results = run_verify("identities")
        assert len(results) == 4
        assert all(r["passed"] for r in results), results
        assert all(r["m"] == 10_000 for r in results)

    def test_threshold_command(self, tmp_path, capsys):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"field": 1, "ensemble": {"name": "gaussian_iid"}}), encoding="utf-8")
        assert main(["threshold", "--config", str(path)]) == 0
        line = capsys.readouterr().out.strip()
        assert float(line.split()[0].split("=")[1]) == pytest.approx(0.5, abs=1e-4)

    def test_config_errors_exit_2(self, tmp_path):
        assert main(["sweep", "--config", str(tmp_path / "missing.json")]) == EXIT_CONFIG
        assert main(["verify"]) == EXIT_CONFIG
        assert main(["verify", "nothing"]) == EXIT_CONFIG
