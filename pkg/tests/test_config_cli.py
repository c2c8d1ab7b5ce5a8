import json
from pathlib import Path

import pytest

from motivated_signaling.cli import main
from motivated_signaling.config import (
    ConfigError,
    ScenarioConfig,
    config_hash,
    parse_config,
    serialize_config,
)


class TestParseConfig:
    def test_empty_file_gives_defaults(self):
        cfg = parse_config("")
        assert cfg == ScenarioConfig()
        assert cfg.pi == 0.587
        assert cfg.gamma == 10.0
        assert cfg.lambda_hat_s == 0.30

    def test_range_error_names_constraint_and_line(self):
        with pytest.raises(ConfigError) as exc:
            parse_config("# comment\ngamma = -1\n")
        assert exc.value.errors == [(2, "gamma must be >= 0")]

    def test_order_independent_cross_field_check(self):
        a = parse_config("lambda_hat_s = 0.30\nlambda_hat_r = 0.114\n")
        b = parse_config("lambda_hat_r = 0.114\nlambda_hat_s = 0.30\n")
        assert a == b

    def test_cross_field_violation(self):
        with pytest.raises(ConfigError, match="lambda_hat_s must be >= lambda_hat_r"):
            parse_config("lambda_hat_s = 0.1\nlambda_hat_r = 0.5\n")

    def test_unknown_key(self):
        with pytest.raises(ConfigError, match="unknown key 'gama'"):
            parse_config("gama = 3\n")

    def test_every_invalid_line_reported(self):
        with pytest.raises(ConfigError) as exc:
            parse_config("gamma = -1\nbogus = 2\npi = 7\n")
        assert [ln for ln, _ in exc.value.errors] == [1, 2, 3]

    def test_duplicate_key(self):
        with pytest.raises(ConfigError, match="duplicate key"):
            parse_config("gamma = 1\ngamma = 2\n")

    def test_comments_and_blank_lines(self):
        cfg = parse_config("\n# full line comment\ngamma = 3.5  # trailing\n\n")
        assert cfg.gamma == 3.5

    def test_round_trip(self):
        cfg = parse_config("gamma = 2.5\nmode = expt2\nseed = 9\nswap_parties = true\n")
        assert parse_config(serialize_config(cfg)) == cfg

    def test_round_trip_defaults(self):
        cfg = ScenarioConfig()
        assert parse_config(serialize_config(cfg)) == cfg

    def test_seed_bounds(self):
        with pytest.raises(ConfigError, match="unsigned 64-bit"):
            parse_config(f"seed = {2**64}\n")

    def test_hash_stable(self):
        assert config_hash(ScenarioConfig()) == config_hash(parse_config(""))
        assert config_hash(ScenarioConfig(gamma=3.0)) != config_hash(ScenarioConfig())


class TestCli:
    def test_solve_reports_expected_rows(self, tmp_path):
        out = tmp_path / "eq.json"
        code = main(["solve", "--gamma", "10", "--out", str(out)])
        assert code == 0
        doc = json.loads(out.read_text())
        assert {m["row"] for m in doc["me"]} == {2, 3, 4}
        manifest = json.loads((tmp_path / "eq.json.manifest.json").read_text())
        assert manifest["outputs"] == [str(out)]

    def test_figure_panel_a_endpoints(self, tmp_path):
        out = tmp_path / "panelA.csv"
        assert main(["figure", "--panel", "A", "--out", str(out)]) == 0
        text = out.read_text()
        row4 = next(line for line in text.splitlines() if line.startswith("me_row4"))
        _, lo, hi = row4.split(",")
        assert float(lo) == pytest.approx(6.667, abs=1e-3)
        assert float(hi) == pytest.approx(17.544, abs=1e-3)

    def test_sweep_csv(self, tmp_path):
        out = tmp_path / "sweep.csv"
        code = main(
            ["sweep", "--vary", "gamma", "--min", "1", "--max", "2", "--step", "0.5", "--out", str(out)]
        )
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0].startswith("gamma,bne_sep,")
        assert len(lines) == 4

    def test_sweep_unknown_parameter_is_validation_error(self, tmp_path):
        out = tmp_path / "sweep.csv"
        code = main(
            ["sweep", "--vary", "nope", "--min", "1", "--max", "2", "--step", "0.5", "--out", str(out)]
        )
        assert code == 1
        assert not out.exists()

    def test_invalid_config_no_output_written(self, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("gamma = -1\n")
        out = tmp_path / "eq.json"
        code = main(["solve", "--config", str(cfg), "--out", str(out)])
        assert code == 1
        assert not out.exists()

    def test_missing_config_file(self, tmp_path):
        code = main(["solve", "--config", str(tmp_path / "nope.cfg"), "--out", str(tmp_path / "x.json")])
        assert code == 1

    def test_simulate_requires_seed(self, tmp_path):
        out = tmp_path / "trials.csv"
        code = main(["simulate", "--out", str(out)])
        assert code == 1
        assert not out.exists()

    def test_simulate_deterministic(self, tmp_path):
        cfg = tmp_path / "expt.cfg"
        cfg.write_text("n_senders = 8\nn_receivers = 8\n")
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(["simulate", "--config", str(cfg), "--seed", "42", "--out", str(out1)]) == 0
        assert main(["simulate", "--config", str(cfg), "--seed", "42", "--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_simulate_seed_from_config(self, tmp_path):
        cfg = tmp_path / "expt.cfg"
        cfg.write_text("n_senders = 2\nn_receivers = 2\nseed = 7\n")
        out = tmp_path / "t.csv"
        assert main(["simulate", "--config", str(cfg), "--out", str(out)]) == 0
        assert out.exists()

    def test_verify_command(self, tmp_path):
        out = tmp_path / "verify.json"
        assert main(["verify", "--gamma", "10", "--out", str(out)]) == 0
        doc = json.loads(out.read_text())
        assert doc["all_pass"] is True
        assert {p["candidate"] for p in doc["profiles"]} >= {"me_row2", "me_row3", "me_row4"}

    def test_manifest_identical_across_runs(self, tmp_path):
        out = tmp_path / "eq.json"
        main(["solve", "--out", str(out)])
        m1 = (tmp_path / "eq.json.manifest.json").read_text()
        main(["solve", "--out", str(out)])
        m2 = (tmp_path / "eq.json.manifest.json").read_text()
        assert m1 == m2

    def test_report_renders_figures_and_data(self, tmp_path):
        cfg = tmp_path / "r.cfg"
        cfg.write_text("n_senders = 6\nn_receivers = 6\n")
        outdir = tmp_path / "out"
        code = main(["report", "--config", str(cfg), "--seed", "3", "--outdir", str(outdir)])
        assert code == 0
        for name in (
            "equilibria.json",
            "panelA.csv",
            "panelB.csv",
            "panelC.csv",
            "region_sweep.csv",
            "trials.csv",
            "effects.csv",
            "equilibrium_intervals.png",
            "effects.png",
            "run_manifest.json",
        ):
            assert (outdir / name).exists(), name
        manifest = json.loads((outdir / "run_manifest.json").read_text())
        assert manifest["seed"] == 3
