import pytest

from rbsched import ConfigurationError, ScenarioConfig


def test_defaults_validate():
    cfg = ScenarioConfig()
    assert cfg.num_rbs == 6 and cfg.num_ues == 4
    assert cfg.service_of.tolist() == [0, 0, 1, 1]


@pytest.mark.parametrize("changes", [
    {"num_rbs": 0},
    {"ues_per_service": (3, 2)},                  # does not sum to num_ues
    {"min_satisfied_per_service": (3, 1)},        # quota above service size
    {"qos_targets": (150e3, -1.0, 300e3, 300e3)},
    {"power_per_rb": 0.0},
    {"min_distance": 400.0},                      # outside the cell
    {"ues_per_service": (4,), "min_satisfied_per_service": (2,)},  # L mismatch
])
def test_invalid_configs_rejected(changes):
    with pytest.raises(ConfigurationError):
        ScenarioConfig(**{**{}, **changes})


def test_file_round_trip(tmp_path):
    cfg = ScenarioConfig(num_rbs=5, num_ues=3, num_services=2,
                         ues_per_service=(2, 1), min_satisfied_per_service=(1, 1),
                         qos_targets=(150e3, 150e3, 300e3), rng_seed=99)
    path = tmp_path / "scenario.cfg"
    cfg.to_file(path)
    assert ScenarioConfig.from_file(path) == cfg


def test_file_comments_and_unknown_keys(tmp_path):
    path = tmp_path / "scenario.cfg"
    path.write_text("# comment\nnum_rbs = 4  # trailing comment\n")
    assert ScenarioConfig.from_file(path).num_rbs == 4
    path.write_text("not_a_key = 3\n")
    with pytest.raises(ConfigurationError):
        ScenarioConfig.from_file(path)


def test_replace_revalidates():
    cfg = ScenarioConfig()
    with pytest.raises(ConfigurationError):
        cfg.replace(num_ues=7)
