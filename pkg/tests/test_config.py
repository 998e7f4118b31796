"""Tests for run configuration parsing and environment settings."""

from pathlib import Path

import pytest

import src.config as config_module
from src.config import get_settings, load_run_config, load_settings, parse_run_config
from src.exceptions import ConfigError
from src.models import GromovCondition, SignatureMode, TheoremKind

CONFIG_DIR = Path(__file__).resolve().parent.parent / "config"

MINIMAL = """\
metric:
  family: minkowski
  dim: 2
sclv:
  dim: 2
  chi_max: 1.0
"""


class TestParseRunConfig:
    """Tests for parse_run_config."""

    def test_minimal_defaults(self):
        """Test that a minimal configuration fills in the defaults."""
        config = parse_run_config(MINIMAL)
        assert config.metric.n == 2
        assert config.sclv.mode is SignatureMode.LORENTZIAN_TIMELIKE
        assert config.sclv.cut.form == "constant"
        assert config.sclv.cut.value == 1.0
        assert config.theorem.name is TheoremKind.GUENTHER
        assert config.tolerances.integrator is None
        assert config.output.format == "both"
        assert config.search is None

    def test_field_error_reports_line(self):
        """Test that a validation error names the field and its line."""
        text = MINIMAL.replace("chi_max: 1.0", "chi_max: -1.0")
        with pytest.raises(ConfigError) as exc_info:
            parse_run_config(text)
        assert exc_info.value.field == "sclv.chi_max"
        assert exc_info.value.line == 6
        assert "line 6" in str(exc_info.value)

    def test_invalid_yaml_reports_line(self):
        """Test that YAML syntax errors carry a line number."""
        with pytest.raises(ConfigError) as exc_info:
            parse_run_config("metric:\n  family: [minkowski\nsclv: {}\n")
        assert exc_info.value.line is not None

    def test_top_level_must_be_mapping(self):
        """Test that a YAML list is rejected."""
        with pytest.raises(ConfigError):
            parse_run_config("- metric\n- sclv\n")

    def test_dimension_mismatch(self):
        """Test that the subset and metric dimensions must agree."""
        with pytest.raises(ConfigError, match="does not match"):
            parse_run_config(MINIMAL.replace("  dim: 2\n  chi_max", "  dim: 3\n  chi_max"))

    def test_grw_needs_fiber_dimension(self):
        """Test that GRW metrics need m."""
        text = "metric:\n  family: grw\nsclv:\n  dim: 4\n  chi_max: 0.5\n"
        with pytest.raises(ConfigError) as exc_info:
            parse_run_config(text)
        assert exc_info.value.field == "metric"

    def test_grw_dimension_from_fiber(self):
        """Test n = m + 1 and the default warping function."""
        text = "metric:\n  family: grw\n  m: 3\nsclv:\n  dim: 4\n  chi_max: 0.5\n"
        config = parse_run_config(text)
        assert config.metric.n == 4
        assert config.metric.f.form == "cosh"

    def test_gromov_condition_is_implied(self):
        """Test that gromov-B selects condition B."""
        config = parse_run_config(MINIMAL + "theorem:\n  name: gromov-B\n")
        assert config.theorem.condition is GromovCondition.B

    def test_gromov_condition_conflict(self):
        """Test that gromov-A with condition B is rejected."""
        with pytest.raises(ConfigError, match="condition"):
            parse_run_config(MINIMAL + "theorem:\n  name: gromov-A\n  condition: B\n")

    def test_r_grid_beyond_scale_bound(self):
        """Test that r_grid must stay inside (0, b]."""
        with pytest.raises(ConfigError, match="r_grid"):
            parse_run_config(MINIMAL + "theorem:\n  r_grid: [0.5, 1.5]\n")

    def test_r_grid_not_increasing(self):
        """Test that r_grid must be strictly increasing."""
        with pytest.raises(ConfigError, match="increasing"):
            parse_run_config(MINIMAL + "theorem:\n  r_grid: [0.5, 0.5]\n")

    def test_table_cut_needs_values(self):
        """Test that a table cut without values is rejected."""
        text = MINIMAL + "  cut:\n    form: table\n"
        with pytest.raises(ConfigError):
            parse_run_config(text)


class TestConfigHash:
    """Tests for the configuration hash."""

    def test_hash_is_stable(self):
        """Test that equal configurations hash equally."""
        first = parse_run_config(MINIMAL).config_hash
        second = parse_run_config(MINIMAL).config_hash
        assert first == second
        assert len(first) == 64

    def test_hash_follows_content(self):
        """Test that any validated change alters the hash."""
        changed = parse_run_config(MINIMAL.replace("chi_max: 1.0", "chi_max: 0.9"))
        assert changed.config_hash != parse_run_config(MINIMAL).config_hash

    def test_defaults_are_hashed(self):
        """Test that spelling out a default does not change the hash."""
        explicit = parse_run_config(MINIMAL + "output:\n  format: both\n")
        assert explicit.config_hash == parse_run_config(MINIMAL).config_hash


class TestLoadRunConfig:
    """Tests for load_run_config."""

    def test_missing_file(self, tmp_path):
        """Test that a missing file is a configuration error."""
        with pytest.raises(ConfigError, match="not found"):
            load_run_config(tmp_path / "absent.yaml")

    @pytest.mark.parametrize("path", sorted(CONFIG_DIR.glob("*.yaml")), ids=lambda p: p.stem)
    def test_shipped_configs_validate(self, path):
        """Test that every shipped configuration validates."""
        config = load_run_config(path)
        assert config.metric.n == config.sclv.dim

    def test_bishop_run_uses_stiffened_fiber(self):
        """Test that the shipped Bishop run compares a k_F = 1.2 fiber with c = 1."""
        config = load_run_config(CONFIG_DIR / "bishop_grw.yaml")
        assert config.metric.k_F == pytest.approx(1.2)
        assert config.theorem.name is TheoremKind.BISHOP
        assert config.theorem.c == pytest.approx(1.0)


class TestSettings:
    """Tests for environment settings."""

    @pytest.fixture(autouse=True)
    def reset_singleton(self, monkeypatch):
        monkeypatch.setattr(config_module, "_settings", None)
        for name in ("SCLV_LOG_LEVEL", "SCLV_THREADS", "SCLV_DEFAULT_TOL"):
            monkeypatch.delenv(name, raising=False)

    def test_defaults(self):
        """Test the settings defaults."""
        settings = load_settings()
        assert settings.log_level == "INFO"
        assert settings.threads == 1
        assert settings.default_tol == 1e-10

    def test_environment_overrides(self, monkeypatch):
        """Test that environment variables override the defaults."""
        monkeypatch.setenv("SCLV_LOG_LEVEL", "debug")
        monkeypatch.setenv("SCLV_THREADS", "4")
        monkeypatch.setenv("SCLV_DEFAULT_TOL", "1e-12")
        settings = load_settings()
        assert settings.log_level == "DEBUG"
        assert settings.threads == 4
        assert settings.default_tol == 1e-12

    @pytest.mark.parametrize("name,value", [("SCLV_THREADS", "many"), ("SCLV_THREADS", "0")])
    def test_invalid_environment(self, monkeypatch, name, value):
        """Test that unparseable or out-of-range values are configuration errors."""
        monkeypatch.setenv(name, value)
        with pytest.raises(ConfigError):
            load_settings()

    def test_singleton(self):
        """Test that get_settings returns the same instance."""
        assert get_settings() is get_settings()
