"""Tests for the command-line interface and its exit codes."""

import json

import pytest

import src.config as config_module
from src.cli import (
    EXIT_CONFIG,
    EXIT_INPUT_DOMAIN,
    EXIT_OK,
    build_parser,
    main,
)

CONE = """\
metric:
  family: minkowski
  dim: 2
sclv:
  dim: 2
  c: {c}
  chi_max: 1.0
  cut:
    form: constant
    value: {cut}
output:
  dump_directions: [0]
"""


@pytest.fixture(autouse=True)
def clean_settings(monkeypatch):
    monkeypatch.setattr(config_module, "_settings", None)
    for name in ("SCLV_LOG_LEVEL", "SCLV_THREADS", "SCLV_DEFAULT_TOL"):
        monkeypatch.delenv(name, raising=False)


def write_config(tmp_path, text, name="run.yaml"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


class TestParser:
    """Tests for build_parser."""

    def test_common_options(self):
        """Test that every subcommand accepts the shared options."""
        args = build_parser().parse_args(
            ["oracle", "--config", "x.yaml", "--out", "o", "--seed", "3", "--threads", "2", "-v"]
        )
        assert args.command == "oracle"
        assert args.seed == 3
        assert args.threads == 2
        assert args.verbose

    def test_command_required(self):
        """Test that a subcommand is required."""
        with pytest.raises(SystemExit):
            build_parser().parse_args([])


class TestMain:
    """Tests for main."""

    def test_counterexample_without_config(self, capsys, tmp_path):
        """Test the counterexample runs without a configuration and writes JSON on request."""
        code = main(["counterexample", "--out", str(tmp_path)])
        assert code == EXIT_OK
        out = capsys.readouterr().out
        assert "sum a / sum b = 40/11" in out
        assert "ratio sum inequality reversed: yes" in out
        payload = json.loads((tmp_path / "counterexample.json").read_text(encoding="utf-8"))
        assert len(payload["report"]["data_sets"]) == 2

    def test_missing_config(self):
        """Test that commands other than counterexample need --config."""
        assert main(["volume"]) == EXIT_CONFIG

    def test_malformed_config(self, tmp_path):
        """Test exit code 3 for an invalid configuration."""
        path = write_config(tmp_path, "metric:\n  family: torus\n  dim: 2\nsclv:\n  dim: 2\n")
        assert main(["volume", "--config", path]) == EXIT_CONFIG

    def test_bad_environment(self, monkeypatch):
        """Test exit code 3 for unparseable environment settings."""
        monkeypatch.setenv("SCLV_THREADS", "several")
        assert main(["counterexample"]) == EXIT_CONFIG

    def test_model_pole_is_input_domain_error(self, tmp_path):
        """Test exit code 2 when the model has a conjugate point inside U."""
        path = write_config(tmp_path, CONE.format(c=-1.0, cut=4.0))
        code = main(["volume", "--config", path, "--out", str(tmp_path / "out")])
        assert code == EXIT_INPUT_DOMAIN

    def test_volume_outputs(self, tmp_path, capsys):
        """Test that the volume command writes JSON, per-direction CSV and a dump."""
        path = write_config(tmp_path, CONE.format(c=0.0, cut=1.0))
        out = tmp_path / "out"
        assert main(["volume", "--config", path, "--out", str(out)]) == EXIT_OK
        assert "vol(U) = 1" in capsys.readouterr().out
        payload = json.loads((out / "volume.json").read_text(encoding="utf-8"))
        assert payload["report"]["vol_U"] == pytest.approx(1.0, abs=1e-8)
        assert len(payload["report"]["config_hash"]) == 64
        header = (out / "volume_directions.csv").read_text(encoding="utf-8").splitlines()[0]
        assert header == "index,weight,cut,detA_integral,model_integral,radial_error"
        dump = (out / "direction_0.csv").read_text(encoding="utf-8").splitlines()
        assert dump[0] == "t,detA,s_c_pow,psi,Phi"

    def test_outputs_are_reproducible(self, tmp_path):
        """Test that two runs of the same configuration write identical files."""
        path = write_config(tmp_path, CONE.format(c=0.0, cut=1.0))
        first, second = tmp_path / "first", tmp_path / "second"
        assert main(["volume", "--config", path, "--out", str(first)]) == EXIT_OK
        assert main(["volume", "--config", path, "--out", str(second)]) == EXIT_OK
        for name in ("volume.json", "volume_directions.csv", "direction_0.csv"):
            assert (first / name).read_bytes() == (second / name).read_bytes()

    def test_json_only(self, tmp_path):
        """Test that --format json skips the CSV files."""
        path = write_config(tmp_path, CONE.format(c=0.0, cut=1.0))
        out = tmp_path / "out"
        assert main(["volume", "--config", path, "--out", str(out), "--format", "json"]) == EXIT_OK
        assert sorted(p.name for p in out.iterdir()) == ["volume.json"]

    def test_inapplicable_verdict(self, tmp_path, capsys):
        """Test exit code 2 when the curvature hypothesis fails."""
        text = CONE.format(c=0.0, cut=1.0) + "theorem:\n  name: guenther\n  c: 1.0\n"
        path = write_config(tmp_path, text)
        code = main(["verify", "--config", path, "--out", str(tmp_path / "out")])
        assert code == EXIT_INPUT_DOMAIN
        assert "guenther: inapplicable" in capsys.readouterr().out

    def test_flat_corollary_holds(self, tmp_path):
        """Test exit code 0 for a verdict that holds."""
        text = CONE.format(c=0.0, cut=1.0) + "theorem:\n  name: flat-corollary\n"
        path = write_config(tmp_path, text)
        out = tmp_path / "out"
        assert main(["verify", "--config", path, "--out", str(out)]) == EXIT_OK
        payload = json.loads((out / "verify.json").read_text(encoding="utf-8"))
        assert payload["report"]["status"] == "holds"
        assert payload["report"]["theorem"] == "flat-corollary"

    def test_ratio_csv(self, tmp_path):
        """Test the ratio command writes one CSV row per scale."""
        text = CONE.format(c=0.0, cut=1.0) + "theorem:\n  r_grid: [0.5, 1.0]\n"
        path = write_config(tmp_path, text)
        out = tmp_path / "out"
        assert main(["ratio", "--config", path, "--out", str(out), "--format", "csv"]) == EXIT_OK
        lines = (out / "ratio.csv").read_text(encoding="utf-8").splitlines()
        assert lines[0] == "r,vol_Ur,vol_U0r,V"
        assert len(lines) == 3

    def test_oracle_seed_override(self, tmp_path):
        """Test the oracle command records the seed given on the command line."""
        text = CONE.format(c=0.0, cut=1.0) + "oracle:\n  samples: 20000\n"
        path = write_config(tmp_path, text)
        out = tmp_path / "out"
        assert main(["oracle", "--config", path, "--out", str(out), "--seed", "5"]) == EXIT_OK
        payload = json.loads((out / "oracle.json").read_text(encoding="utf-8"))
        assert payload["report"]["seed"] == 5
        assert payload["quadrature"]["vol_U"] == pytest.approx(1.0, abs=1e-8)
        assert "covered" in payload
