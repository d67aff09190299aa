"""Config resolution: defaults, JSON file, BUNDLER_* env and explicit overrides."""
import json

import pytest
from bundler.settings import DEFAULT_CONFIG_PATH, PipelineConfig, load_settings
from contracts.bundle_result_v1 import BundleStatsV1
from pydantic import ValidationError

ENV_VARS = (
    "BUNDLER_K_INK",
    "BUNDLER_K_LEN",
    "BUNDLER_K_CAP",
    "BUNDLER_WIDTH",
    "BUNDLER_SEPARATION",
    "BUNDLER_CONE_ANGLE",
    "BUNDLER_ORDERING",
    "BUNDLER_SEED",
)


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch):
    for name in ENV_VARS:
        monkeypatch.delenv(name, raising=False)


def _write(tmp_path, name: str, data: dict):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return path


class TestDefaults:
    def test_derived_values(self):
        config = PipelineConfig()
        assert config.k_cap == pytest.approx(10 * (config.k_ink + config.k_len))
        assert config.padding == pytest.approx(0.5)
        assert config.ordering == "linear"

    def test_default_file_matches_model(self):
        assert load_settings(DEFAULT_CONFIG_PATH) == PipelineConfig()

    def test_padding_stays_positive_without_separation(self):
        assert PipelineConfig(path_separation=0.0).padding == pytest.approx(0.5)
        assert PipelineConfig(path_separation=0.0, path_width=0.0).padding == pytest.approx(0.5)
        assert PipelineConfig(path_separation=3.0).padding == pytest.approx(1.5)

    def test_explicit_k_cap_kept(self):
        assert PipelineConfig(k_cap=0.0).k_cap == 0.0

    def test_all_zero_weights_rejected(self):
        with pytest.raises(ValidationError, match="at least one of k_ink, k_len, k_cap"):
            PipelineConfig(k_ink=0.0, k_len=0.0, k_cap=0.0)

    def test_width_of(self):
        config = PipelineConfig(path_width=2.0, edge_widths={3: 0.5})
        assert config.width_of(3) == 0.5
        assert config.width_of(0) == 2.0


class TestPrecedence:
    def test_file_env_overrides(self, tmp_path, monkeypatch):
        path = _write(tmp_path, "config.json", {"k_len": 10.0, "k_ink": 2.0, "ordering": "simple"})
        assert load_settings(path).k_len == 10.0

        monkeypatch.setenv("BUNDLER_K_LEN", "20")
        monkeypatch.setenv("BUNDLER_ORDERING", "both")
        config = load_settings(path)
        assert (config.k_ink, config.k_len, config.ordering) == (2.0, 20.0, "both")

        config = load_settings(path, {"k_len": 30.0, "ordering": None})
        assert (config.k_len, config.ordering) == (30.0, "both")
        assert config.k_cap == pytest.approx(10 * (2.0 + 30.0))

    def test_empty_env_ignored(self, monkeypatch):
        monkeypatch.setenv("BUNDLER_SEED", "")
        assert load_settings().seed == 0

    def test_optimizer_overrides_merge(self, tmp_path):
        path = _write(tmp_path, "config.json", {"optimizer": {"theta": 1.5, "descent_passes": 3}})
        config = load_settings(path, {"optimizer": {"descent_passes": 1}})
        assert config.optimizer.theta == 1.5
        assert config.optimizer.descent_passes == 1

    def test_edge_width_keys_from_json(self, tmp_path):
        path = _write(tmp_path, "config.json", {"edge_widths": {"2": 3.5}})
        assert load_settings(path).width_of(2) == 3.5

    def test_stats_file_reuses_recorded_config(self, tmp_path):
        recorded = PipelineConfig(k_len=7.0, path_separation=0.5, ordering="simple")
        stats = BundleStatsV1(k_ink=1.0, k_len=7.0, k_cap=80.0, config=recorded.model_dump(mode="json"))
        path = tmp_path / "stats.json"
        path.write_text(stats.model_dump_json())
        assert load_settings(path) == recorded

    def test_invalid_values_rejected(self, tmp_path):
        path = _write(tmp_path, "config.json", {"cone_angle": -1.0})
        with pytest.raises(ValidationError, match="cone_angle"):
            load_settings(path)
