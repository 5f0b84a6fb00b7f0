"""
Package surface: imports, registry, configuration, report writers, commands,
the CLI and the end-to-end pipeline.
Run with:  pytest test/test_cglhub.py -v
"""

import json
import subprocess

import jsonschema
import numpy as np
import pytest

from cglhub.config import RunConfig, parse_config
from cglhub.core.exceptions import ConfigError


TINY_RUN = """\
omega = 1.0
grid = 4
dt = 0.05
T = 0.5
save_every = 0.1
amplitude = 0.5
N = 2
L = 1
shell_range = "2:10"
burn_in = 0.5
count = 6
spacing = 0.1
seeds = 2
pair_count = 1
pair_window = 0.5
window = 0.4
window_dt = 0.1
bvp_max_iter = 20
mane_N = "1,2"
max_pairs = 100
track_T = 0.2
threads = 1
"""

RUN_OUTPUTS = {"shells.json", "trajectory.cglf", "trajectory.cglf.json", "monitor.csv", "dissipativity.json",
               "sample.cglf", "sample.cglf.json", "estimate.json", "distortion.json", "inertial_form.json"}


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def run_cli(*args, expect_error=False):
    """Run cglhub CLI and return (returncode, stdout, stderr)."""
    result = subprocess.run(
        ["cglhub", *args],
        capture_output=True, text=True
    )
    if not expect_error:
        assert result.returncode == 0, (
            f"CLI failed: cglhub {' '.join(args)}\n"
            f"STDOUT: {result.stdout}\nSTDERR: {result.stderr}"
        )
    return result.returncode, result.stdout, result.stderr


@pytest.fixture
def tiny_config(tmp_path):
    path = tmp_path / "run.toml"
    path.write_text(TINY_RUN)
    return path


# ===========================================================================
# 1. IMPORTS & VERSION
# ===========================================================================

class TestImports:
    def test_import_cglhub(self):
        import cglhub
        assert cglhub.__version__ == "0.1.0"

    def test_public_names(self):
        import cglhub
        for name in ("GridSpec", "SpectralField", "simulate", "sample_attractor", "backward_bvp_solve",
                     "distortion_stats", "build_inertial_form", "lift"):
            assert hasattr(cglhub, name), name


# ===========================================================================
# 2. REGISTRY
# ===========================================================================

class TestRegistry:
    def test_integrators(self):
        from cglhub import Integrator
        assert {"etd1", "etd2"} <= set(Integrator.available())

    def test_unknown_name(self):
        from cglhub import Integrator
        with pytest.raises(ValueError):
            Integrator.create("rk4")


# ===========================================================================
# 3. CONFIGS
# ===========================================================================

class TestConfigs:
    def test_defaults_are_valid(self):
        assert RunConfig().validate() == []

    def test_violations_collected(self):
        errs = RunConfig(dt=0.0, grid=5, splitting="both").validate()
        assert len(errs) == 3
        assert any("dt" in e for e in errs)

    def test_check_raises(self):
        with pytest.raises(ConfigError) as info:
            RunConfig(L=5, N=5).check()
        assert info.value.violations

    def test_parse(self, tiny_config):
        cfg = parse_config(tiny_config)
        assert cfg.grid == 4
        assert cfg.mane_N_values == [1, 2]
        assert cfg.shell_bounds == (2, 10)

    def test_int_promoted_to_float(self, tmp_path):
        path = tmp_path / "run.toml"
        path.write_text("omega = 2\n")
        assert parse_config(path).omega == 2.0

    def test_unknown_key_names_its_line(self, tmp_path):
        path = tmp_path / "run.toml"
        path.write_text("grid = 8\nomgea = 1.0\n")
        with pytest.raises(ConfigError) as info:
            parse_config(path)
        assert "line 2" in str(info.value)
        assert "omgea" in str(info.value)

    def test_tables_and_types_rejected(self, tmp_path):
        path = tmp_path / "run.toml"
        path.write_text("grid = \"eight\"\n[solver]\ndt = 0.1\n")
        with pytest.raises(ConfigError) as info:
            parse_config(path)
        assert len(info.value.violations) == 2

    def test_key_and_value_errors_reported_together(self, tmp_path):
        path = tmp_path / "run.toml"
        path.write_text("omgea = 1.0\ndt = 0.0\n")
        with pytest.raises(ConfigError) as info:
            parse_config(path)
        message = str(info.value)
        assert len(info.value.violations) == 2
        assert "omgea" in message and "dt must be > 0" in message

    def test_overrides_applied_before_validation(self, tmp_path):
        path = tmp_path / "run.toml"
        path.write_text("dt = 0.0\n")
        assert parse_config(path, dt=0.01).dt == 0.01

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            parse_config(tmp_path / "absent.toml")


# ===========================================================================
# 4. UTILS
# ===========================================================================

class TestUtils:
    def test_jsonable(self):
        from cglhub.utils import jsonable
        out = jsonable({"a": np.float64("nan"), "b": 1 + 2j, "c": np.arange(2), 3: np.bool_(True)})
        assert out == {"a": None, "b": [1.0, 2.0], "c": [0, 1], "3": True}

    def test_config_hash_ignores_run_environment(self):
        from cglhub.utils import config_hash
        assert config_hash(RunConfig(threads=1, out_dir="a")) == config_hash(RunConfig(threads=8, out_dir="b"))
        assert config_hash(RunConfig(seed=1)) != config_hash(RunConfig(seed=2))

    def test_schema_violation_blocks_write(self, tmp_path):
        from cglhub.utils import write_json
        with pytest.raises(jsonschema.ValidationError):
            write_json(tmp_path / "bad.json", {"stage": "simulate"}, kind="error")
        assert not (tmp_path / "bad.json").exists()

    def test_write_error(self, tmp_path):
        from cglhub.utils import write_error
        payload = write_error(tmp_path, "sample", ValueError("count must be >= 1"))
        assert payload == {"stage": "sample", "error_type": "ValueError", "message": "count must be >= 1"}
        assert json.loads((tmp_path / "error.json").read_text()) == payload

    def test_manifest_relative_and_sorted(self, tmp_path):
        from cglhub.utils import validate_report, write_run_manifest
        (tmp_path / "b.txt").write_text("b")
        (tmp_path / "a.txt").write_text("a")
        path = write_run_manifest(tmp_path, RunConfig(), [tmp_path / "b.txt", tmp_path / "a.txt"], ["simulate"])
        manifest = json.loads(path.read_text())
        validate_report("manifest", manifest)
        assert [e["path"] for e in manifest["outputs"]] == ["a.txt", "b.txt"]
        assert "threads" not in manifest["config"]

    def test_unknown_report_kind(self):
        from cglhub.utils import validate_report
        with pytest.raises(ValueError):
            validate_report("spectrum", {})


# ===========================================================================
# 5. COMMANDS
# ===========================================================================

class TestCommands:
    def test_command_result_dataclass(self):
        from cglhub.commands import CommandResult
        r = CommandResult(success=True, message="ok")
        assert r.output_files == []

    def test_resolve_out(self, tmp_path):
        from cglhub.commands import resolve_out
        assert resolve_out(None, "estimate.json") == (None, "estimate.json")
        assert resolve_out(tmp_path / "r.json", "estimate.json") == (tmp_path, "r.json")
        assert resolve_out(tmp_path, "estimate.json") == (tmp_path, "estimate.json")

    def test_certify_shell(self, tmp_path):
        from cglhub.commands import CertifyShellCommand
        from cglhub.lattice import search_separated_N
        cfg = RunConfig(N=5, L=1, shell_range="2:20", threads=1)
        result = CertifyShellCommand(cfg, tmp_path).run()
        assert result.success
        assert result.data["passing_N"] == search_separated_N(1, 1.5, 2, 20)
        assert (tmp_path / "shells.json").is_file()

    def test_simulate_zero_horizon(self, tmp_path):
        from cglhub.commands import SimulateCommand
        result = SimulateCommand(RunConfig(grid=4, T=0.0, threads=1), tmp_path).run()
        assert result.success
        assert [p.name for p in result.output_files] == ["snapshot.cglf"]

    def test_failure_is_returned(self, tmp_path):
        from cglhub.commands import SimulateCommand
        cfg = RunConfig(grid=4, T=1.0, dt=0.05, blowup_threshold=1.0, threads=1)
        result = SimulateCommand(cfg, tmp_path).run()
        assert not result.success
        assert result.data["error_type"] == "BlowUpError"
        assert (tmp_path / "blowup_state.cglf").is_file()

    def test_verify_needs_input(self, tmp_path):
        from cglhub.commands import VerifyEstimateCommand
        result = VerifyEstimateCommand(RunConfig(threads=1), tmp_path).run()
        assert not result.success
        assert result.data["error_type"] == "ValueError"


# ===========================================================================
# 6. CLI
# ===========================================================================

class TestCLI:
    def test_version(self):
        _, out, _ = run_cli("--version")
        assert "cglhub 0.1.0" in out

    def test_help(self):
        _, out, _ = run_cli("--help")
        for cmd in ("simulate", "sample", "certify-shell", "verify-estimate", "mane-check",
                    "inertial-form", "pipeline"):
            assert cmd in out

    def test_no_command_prints_help(self):
        _, out, _ = run_cli()
        assert "usage" in out.lower()

    def test_list_options(self):
        _, out, _ = run_cli("simulate", "--list-options", "--omega", "2.5")
        assert "--omega" in out
        assert "2.5" in out

    def test_misspelled_key(self, tmp_path):
        cfg = tmp_path / "run.toml"
        cfg.write_text("grid = 4\nomgea = 1.0\n")
        code, _, err = run_cli("simulate", "--config", str(cfg), "--out", str(tmp_path), expect_error=True)
        assert code == 1
        assert "[ERROR] config" in err
        assert "line 2" in err and "omgea" in err

    def test_invalid_value(self, tmp_path):
        code, _, err = run_cli("simulate", "--dt", "0", "--out", str(tmp_path), expect_error=True)
        assert code == 1
        assert "dt must be > 0" in err

    def test_flag_repairs_file_value(self, tmp_path):
        cfg = tmp_path / "run.toml"
        cfg.write_text("grid = 4\ndt = 0.0\n")
        _, out, _ = run_cli("simulate", "--config", str(cfg), "--dt", "0.01", "--list-options")
        dt_line = next(line for line in out.splitlines() if line.strip().startswith("--dt "))
        assert "0.01" in dt_line

    def test_unknown_flag(self, tmp_path):
        code, _, err = run_cli("simulate", "--bogus", "1", "--out", str(tmp_path), expect_error=True)
        assert code == 1
        assert "--bogus" in err

    def test_certify_shell_to_named_report(self, tmp_path):
        from cglhub.utils import validate_report
        out = tmp_path / "cert" / "my_shells.json"
        run_cli("certify-shell", "--N", "5", "--L", "1", "--range", "2:12", "--threads", "1", "--out", str(out))
        report = json.loads(out.read_text())
        validate_report("shells", report)
        assert report["n_min"] == 2 and report["n_max"] == 12

    def test_verify_without_input(self, tmp_path):
        code, _, err = run_cli("verify-estimate", "--out", str(tmp_path), expect_error=True)
        assert code == 1
        assert "verify-estimate" in err

    def test_stage_commands_chain(self, tiny_config, tmp_path):
        run_cli("sample", "--config", str(tiny_config), "--out", str(tmp_path))
        sample = tmp_path / "sample.cglf"
        assert sample.is_file()
        assert (tmp_path / "sample_pair_000_a.cglf").is_file()
        run_cli("mane-check", "--config", str(tiny_config), "--sample", str(sample),
                "--out", str(tmp_path / "stats.json"))
        stats = json.loads((tmp_path / "stats.json").read_text())
        assert [s["N"] for s in stats["stats"]] == [1, 2]
        run_cli("verify-estimate", "--config", str(tiny_config), "--sample", str(sample), "--out", str(tmp_path))
        estimate = json.loads((tmp_path / "estimate.json").read_text())
        assert estimate["pairs"]["count"] == 1
        assert estimate["bvp"]["details"]["splitting"] == "averaged"


# ===========================================================================
# 7. PIPELINE
# ===========================================================================

class TestPipeline:
    def test_tiny_run(self, tiny_config, tmp_path):
        from cglhub.utils import REPORT_FILES, validate_report
        run = tmp_path / "run"
        run_cli("pipeline", "--config", str(tiny_config), "--out", str(run))
        names = {p.name for p in run.iterdir()}
        assert RUN_OUTPUTS <= names
        assert "manifest.json" in names
        assert "error.json" not in names
        for kind, name in REPORT_FILES.items():
            validate_report(kind, json.loads((run / name).read_text()))
        manifest = json.loads((run / "manifest.json").read_text())
        assert manifest["stages"] == ["certify-shell", "simulate", "sample", "verify-estimate",
                                      "mane-check", "inertial-form"]
        assert {e["path"] for e in manifest["outputs"]} >= RUN_OUTPUTS

    def test_manifest_is_deterministic(self, tiny_config, tmp_path):
        run_cli("pipeline", "--config", str(tiny_config), "--out", str(tmp_path / "a"))
        run_cli("pipeline", "--config", str(tiny_config), "--out", str(tmp_path / "b"))
        a = (tmp_path / "a" / "manifest.json").read_text()
        b = (tmp_path / "b" / "manifest.json").read_text()
        assert a == b

    def test_zero_horizon(self, tiny_config, tmp_path):
        run_cli("pipeline", "--config", str(tiny_config), "--T", "0", "--out", str(tmp_path / "z"))
        assert {p.name for p in (tmp_path / "z").iterdir()} == {"snapshot.cglf", "manifest.json"}

    def test_no_dispersion_skips_projector_stages(self, tiny_config, tmp_path):
        run_cli("pipeline", "--config", str(tiny_config), "--omega", "0", "--out", str(tmp_path / "o"))
        names = {p.name for p in (tmp_path / "o").iterdir()}
        assert "estimate.json" in names
        assert "distortion.json" not in names
        assert "inertial_form.json" not in names

    def test_failed_stage_writes_error(self, tiny_config, tmp_path):
        run = tmp_path / "fail"
        code, _, err = run_cli("pipeline", "--config", str(tiny_config), "--blowup_threshold", "1.0",
                               "--out", str(run), expect_error=True)
        assert code == 1
        error = json.loads((run / "error.json").read_text())
        assert error["stage"] == "simulate"
        assert error["error_type"] == "BlowUpError"
        printed = next(line for line in err.splitlines() if line.startswith("{"))
        assert json.loads(printed) == error
        assert (run / "blowup_state.cglf").is_file()
        assert not (run / "manifest.json").exists()
