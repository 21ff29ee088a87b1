"""
Batch runs, report files and the command-line entry point.
"""
import json
import os

import jsonschema
import numpy as np
import pandas as pd
import pytest
import yaml

from latentgsa.errors import ConfigError, DegenerateOutputError
from latentgsa.main import EXIT_CONFIG, EXIT_NUMERICAL, EXIT_OK, EXIT_PARTIAL, main
from latentgsa.models.schemas import RunConfig
from latentgsa.services import reporting, runner
from latentgsa.services.sampling import RandomStream

SMALL_RUN = {
    "model": "model1",
    "methods": ["sobol_independent", "sobol_grouped", "kucherenko", "latent"],
    "rho": 0.7,
    "n": 1000,
    "bootstrap": 0,
    "seed": 3,
    "workers": 1,
}


@pytest.fixture
def write_config(tmp_path):
    def _write(data, name="run.yaml"):
        path = tmp_path / name
        path.write_text(yaml.safe_dump(data))
        return str(path)
    return _write


# --------------------------------------------------
# run / sweep
# --------------------------------------------------
class TestRun:
    def test_writes_reports(self, write_config, tmp_path):
        out = tmp_path / "out"
        assert main(["run", "--config", write_config(SMALL_RUN), "--out", str(out)]) == EXIT_OK

        names = {p.name for p in out.iterdir()}
        assert {
            "model1_sobol_independent.csv",
            "model1_sobol_independent.json",
            "model1_sobol_grouped_rho+0.70.csv",
            "model1_kucherenko_rho+0.70.csv",
            "model1_kucherenko_rho+0.70_convergence.csv",
            "model1_latent_rho+0.70.csv",
            "report.schema.json",
            "summary.md",
            "timings.json",
        } <= names

        frame = pd.read_csv(out / "model1_kucherenko_rho+0.70.csv")
        assert list(frame.columns) == ["factor", "main", "main_lo", "main_hi", "total", "total_lo", "total_hi"]
        assert list(frame["factor"]) == ["X1", "X2", "X3", "X4"]

        sidecar = json.loads((out / "model1_latent_rho+0.70.json").read_text())
        assert sidecar["metadata"]["seed"] == 3
        assert sidecar["metadata"]["stream_id"] == runner.METHOD_STREAMS["latent"]
        assert sidecar["variance"] > 0

        summary = (out / "summary.md").read_text()
        assert "## model1, rho = 0.7" in summary
        assert "Analytic reference" in summary

    def test_deterministic_output(self, write_config, tmp_path):
        config = write_config({**SMALL_RUN, "bootstrap": 100})
        a, b = tmp_path / "a", tmp_path / "b"
        assert main(["run", "--config", config, "--out", str(a)]) == EXIT_OK
        assert main(["run", "--config", config, "--out", str(b)]) == EXIT_OK
        files = sorted(p.name for p in a.iterdir() if p.name != "timings.json")
        assert files == sorted(p.name for p in b.iterdir() if p.name != "timings.json")
        for name in files:
            assert (a / name).read_bytes() == (b / name).read_bytes(), name

    def test_seed_override(self, write_config, tmp_path):
        out = tmp_path / "out"
        config = write_config({**SMALL_RUN, "methods": ["sobol_independent"]})
        assert main(["run", "--config", config, "--seed", "17", "--out", str(out)]) == EXIT_OK
        sidecar = json.loads((out / "model1_sobol_independent.json").read_text())
        assert sidecar["metadata"]["seed"] == 17

    def test_output_dir_from_environment(self, write_config, tmp_path, monkeypatch):
        target = tmp_path / "from_env"
        monkeypatch.setenv("LATENTGSA_OUTPUT_DIR", str(target))
        config = write_config({**SMALL_RUN, "methods": ["sobol_independent"]})
        assert main(["run", "--config", config]) == EXIT_OK
        assert (target / "model1_sobol_independent.csv").exists()

    def test_sweep_table(self, write_config, tmp_path):
        out = tmp_path / "out"
        config = write_config({
            **SMALL_RUN,
            "model": "model3",
            "methods": ["sobol_grouped", "latent"],
            "rho_sweep": [-0.5, 0.0, 0.5],
        })
        assert main(["sweep", "--config", config, "--out", str(out)]) == EXIT_OK
        sweep = pd.read_csv(out / "model3_sweep.csv")
        assert list(sweep.columns) == ["rho", "method", "factor", "index", "value", "lo", "hi"]
        assert sorted(sweep["rho"].unique()) == [-0.5, 0.0, 0.5]
        assert set(sweep["method"]) == {"sobol_grouped", "latent"}
        assert (out / "model3_latent_rho-0.50.csv").exists()

    def test_schema_command(self, tmp_path):
        assert main(["schema", "--out", str(tmp_path)]) == EXIT_OK
        schema = json.loads((tmp_path / "report.schema.json").read_text())
        assert set(schema) == {"report", "error", "widening"}

    def test_written_files_match_published_schema(self, write_config, tmp_path, monkeypatch):
        real = runner.run_method

        def flaky(config, method, rho):
            if method == "latent":
                raise DegenerateOutputError("output variance is zero; indices are undefined")
            return real(config, method, rho)

        monkeypatch.setattr(runner, "run_method", flaky)
        out = tmp_path / "out"
        config = write_config({**SMALL_RUN, "bootstrap": 100})
        assert main(["run", "--config", config, "--out", str(out)]) == EXIT_PARTIAL

        schema = json.loads((out / "report.schema.json").read_text())
        kinds = {"report": 0, "error": 0}
        for path in sorted(out.glob("*.json")):
            if path.name in ("report.schema.json", "timings.json"):
                continue
            kind = "error" if path.name.endswith("_error.json") else "report"
            jsonschema.validate(json.loads(path.read_text()), schema[kind])
            kinds[kind] += 1
        assert kinds == {"report": 3, "error": 1}

    def test_sidecar_carries_indices(self, write_config, tmp_path):
        out = tmp_path / "out"
        config = write_config({**SMALL_RUN, "methods": ["sobol_independent"]})
        assert main(["run", "--config", config, "--out", str(out)]) == EXIT_OK
        sidecar = json.loads((out / "model1_sobol_independent.json").read_text())
        table = pd.read_csv(out / "model1_sobol_independent.csv")
        assert [fi["factor"] for fi in sidecar["indices"]] == list(table["factor"])
        np.testing.assert_allclose([fi["main"] for fi in sidecar["indices"]], table["main"], rtol=1e-8, atol=1e-12)

    def test_help_names_environment(self, capsys):
        with pytest.raises(SystemExit):
            main(["--help"])
        text = capsys.readouterr().out
        assert "LATENTGSA_OUTPUT_DIR" in text
        assert "LATENTGSA_LOG_LEVEL" in text


# --------------------------------------------------
# Failures and exit codes
# --------------------------------------------------
class TestExitCodes:
    @pytest.mark.parametrize("override", [
        {"n": 10},
        {"bootstrap": 50},
        {"rho": 1.0},
        {"model": "model7"},
        {"unknown_key": True},
        {"methods": []},
    ])
    def test_invalid_config(self, write_config, tmp_path, override):
        config = write_config({**SMALL_RUN, **override})
        assert main(["run", "--config", config, "--out", str(tmp_path / "out")]) == EXIT_CONFIG

    def test_missing_config(self, tmp_path):
        assert main(["run", "--config", str(tmp_path / "nope.yaml")]) == EXIT_CONFIG

    def test_config_not_a_mapping(self, tmp_path):
        path = tmp_path / "list.yaml"
        path.write_text("- model1\n")
        assert main(["run", "--config", str(path)]) == EXIT_CONFIG

    def test_partial_failure(self, write_config, tmp_path, monkeypatch):
        real = runner.run_method

        def flaky(config, method, rho):
            if method == "kucherenko":
                raise DegenerateOutputError("output variance is zero; indices are undefined")
            return real(config, method, rho)

        monkeypatch.setattr(runner, "run_method", flaky)
        out = tmp_path / "out"
        assert main(["run", "--config", write_config(SMALL_RUN), "--out", str(out)]) == EXIT_PARTIAL
        record = json.loads((out / "model1_kucherenko_rho+0.70_error.json").read_text())
        assert record["error"] == "DegenerateOutputError"
        assert record["rho"] == 0.7
        assert (out / "model1_latent_rho+0.70.csv").exists()

    def test_total_failure(self, write_config, tmp_path, monkeypatch):
        def broken(config, method, rho):
            raise DegenerateOutputError("output variance is zero")

        monkeypatch.setattr(runner, "run_method", broken)
        out = tmp_path / "out"
        assert main(["run", "--config", write_config(SMALL_RUN), "--out", str(out)]) == EXIT_NUMERICAL
        assert not (out / "summary.md").exists()

    def test_population_requires_pbpk(self, write_config, tmp_path):
        assert main(["population", "--config", write_config(SMALL_RUN), "--out", str(tmp_path)]) == EXIT_CONFIG


# --------------------------------------------------
# Population
# --------------------------------------------------
class TestPopulation:
    def test_small_population(self, write_config, tmp_path):
        out = tmp_path / "pop"
        config = write_config({
            "model": "pbpk_mdz",
            "seed": 5,
            "workers": 1,
            "pbpk": {"t_end_h": 24.0},
            "population": {
                "subjects": 6,
                "grid_points": 5,
                "modes": ["independent", "correlated", "latent"],
                "export_profiles": True,
                "bootstrap": 100,
            },
        })
        assert main(["population", "--config", config, "--out", str(out)]) == EXIT_OK

        auc = pd.read_csv(out / "population_auc.csv")
        assert len(auc) == 18
        assert (auc["auc"] > 0).all()
        by_mode = {mode: frame.reset_index(drop=True) for mode, frame in auc.groupby("mode")}
        pd.testing.assert_series_equal(by_mode["independent"]["height_cm"], by_mode["latent"]["height_cm"])

        bands = pd.read_csv(out / "population_bands_correlated.csv")
        assert list(bands.columns) == ["time_h", "p2_5", "p25", "p50", "p75", "p97_5"]
        assert len(bands) == 5
        assert (bands["p2_5"] <= bands["p97_5"]).all()

        profiles = pd.read_csv(out / "population_profiles_latent.csv")
        assert profiles.shape == (6, 6)

        summary = pd.read_csv(out / "auc_summary.csv")
        assert list(summary["mode"]) == ["independent", "correlated", "latent"]
        widening = json.loads((out / "widening_test.json").read_text())
        assert 0.0 <= widening["p_value"] <= 1.0
        jsonschema.validate(widening, reporting.SCHEMAS["widening"].model_json_schema())


class TestWideningTest:
    def test_detects_wider_spread(self):
        rng = RandomStream(1).generator()
        base = rng.standard_normal(500)
        result = runner.widening_test(1.5 * base, base, 200, RandomStream(2))
        assert result.difference > 0
        assert result.p_value < 0.05
        assert result.significant

    def test_no_difference(self):
        base = RandomStream(1).generator().standard_normal(200)
        result = runner.widening_test(base, base, 100, RandomStream(2))
        assert result.difference == 0.0
        assert result.p_value == 1.0
        assert not result.significant

    def test_rejects_small_inputs(self):
        with pytest.raises(ConfigError):
            runner.widening_test(np.ones(5), np.ones(5), 50, RandomStream(1))
        with pytest.raises(ConfigError):
            runner.widening_test(np.ones(1), np.ones(1), 100, RandomStream(1))


def test_pbpk_rho_comes_from_physiology_config():
    config = RunConfig(model="pbpk_mdz", pbpk={"rho_cyp": 0.3})
    plan = runner._plan(config, runner._rhos(config))
    assert ("kucherenko", 0.3) in plan
    assert ("sobol_independent", None) in plan


class TestAnalysisService:
    def test_run_into_its_directory(self, tmp_path):
        config = RunConfig.model_validate({**SMALL_RUN, "methods": ["sobol_independent"]})
        service = runner.AnalysisService(config, tmp_path / "out")
        outcome = service.run()
        assert outcome.exit_code == EXIT_OK
        assert (tmp_path / "out" / "model1_sobol_independent.csv").exists()

    @pytest.mark.parametrize("model, workers, expected", [
        ("model1", None, 1),
        ("model1", 3, 3),
        ("pbpk_mdz", 2, 2),
        ("pbpk_mdz", None, os.cpu_count() or 1),
    ])
    def test_worker_default(self, model, workers, expected):
        assert runner._workers(RunConfig(model=model, workers=workers)) == expected
