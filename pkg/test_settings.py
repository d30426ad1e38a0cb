# test_settings.py

import json
import os

import pytest

from experiment_types import ConfigError, Mitigation, ReadoutKind
from settings import Settings, point_seed, with_overrides

DEFAULT_CONFIG = os.path.join(os.path.dirname(os.path.abspath(__file__)), "settings.json")


def write_config(tmp_path, **values):
    path = tmp_path / "sweep.json"
    path.write_text(json.dumps(values))
    return str(path)


def test_shipped_settings_expand():
    points, skipped = Settings(DEFAULT_CONFIG).sweep_points()
    assert len(points) == 42
    assert len(skipped) == 4
    assert all("SR" in message for message in skipped)
    assert len({p.seed for p in points}) == len(points)


def test_defaults_without_a_file():
    settings = Settings()
    assert settings.get_value("shots") == 100_000
    points, skipped = settings.sweep_points()
    assert len(points) == 1 and not skipped
    assert points[0].labels()["model"] == "SD"
    assert points[0].labels()["p"] == "0.001"


def test_odd_lattice_size_is_a_config_error(tmp_path):
    settings = Settings(write_config(tmp_path, lattice_sizes=[3]))
    with pytest.raises(ConfigError):
        settings.sweep_points()


@pytest.mark.parametrize("values", [
    {"shots": 0},
    {"shots": "many"},
    {"shots": True},
    {"clifford_angle": 8},
    {"vqed_flagged": "yes"},
    {"colour": "red"},
])
def test_bad_values_rejected(tmp_path, values):
    with pytest.raises(ConfigError):
        Settings(write_config(tmp_path, **values))


def test_missing_and_broken_files(tmp_path):
    with pytest.raises(ConfigError):
        Settings(str(tmp_path / "absent.json"))
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    with pytest.raises(ConfigError):
        Settings(str(broken))
    listed = tmp_path / "list.json"
    listed.write_text("[1, 2]")
    with pytest.raises(ConfigError):
        Settings(str(listed))


def test_hopping_all_readouts():
    settings = Settings()
    settings.set_value("readout", "hopping-all")
    readouts = settings.readouts()
    assert len(readouts) == 8
    assert all(r.kind == ReadoutKind.HOPPING for r in readouts)
    settings.set_value("readout", [{"hopping": {"color": 5}}])
    with pytest.raises(ConfigError):
        settings.readouts()


def test_occupation_patterns():
    settings = Settings()
    settings.set_value("occupations", "alternating")
    assert settings.occupations_for(2) == (0, 1, 1, 0)
    settings.set_value("occupations", [1, 0, 0])
    with pytest.raises(ConfigError):
        settings.occupations_for(2)
    settings.set_value("occupations", "half")
    with pytest.raises(ConfigError):
        settings.occupations_for(2)


def test_circuit_blocks():
    settings = Settings()
    settings.set_value("circuit", {"kind": "random-logical", "fractions": [0.5, 2], "seed": 9})
    circuits = settings.circuits()
    assert [c.fraction for c in circuits] == [0.5, 2.0]
    assert {c.seed for c in circuits} == {9}
    settings.set_value("circuit", {"kind": "random-logical", "fractions": [3]})
    with pytest.raises(ConfigError):
        settings.circuits()
    settings.set_value("circuit", {"kind": "full-trotter", "steps": [-1]})
    with pytest.raises(ConfigError):
        settings.circuits()
    settings.set_value("circuit", {"kind": "full-trotter", "steps": [3]})
    with pytest.raises(ConfigError):
        settings.circuits()
    settings.set_value("circuit", {"kind": "adiabatic"})
    with pytest.raises(ConfigError):
        settings.circuits()


def test_error_models():
    settings = Settings()
    settings.set_value("error_models", [{"model": "SD"}, {"model": "SI"},
                                        {"model": "custom", "p1": 0, "p2": 0.01, "ps": 0, "pm": 0.02}])
    settings.set_value("p_values", [0.001, 0.002])
    assert [m.label() for m in settings.error_models()] == [
        "SD(0.001)", "SD(0.002)", "SI(0.001)", "SI(0.002)", "custom(p1=0,p2=0.01,ps=0,pm=0.02)"]
    settings.set_value("p_values", [2.0])
    with pytest.raises(ConfigError):
        settings.error_models()


def test_vqed_points_use_their_own_budget():
    settings = Settings()
    settings.set_value("mitigations", ["none", "VQED"])
    settings.set_value("vqed_shots", 1234)
    points, _ = settings.sweep_points()
    shots = {p.spec.mitigation: p.shots for p in points}
    assert shots[Mitigation.VQED] == 1234
    assert shots[Mitigation.NONE] == settings.get_value("shots")


def test_point_seed_is_stable():
    assert point_seed(7, 3) == point_seed(7, 3)
    assert point_seed(7, 3) != point_seed(7, 4)
    assert point_seed(7, 3) != point_seed(8, 3)


def test_overrides_and_save(tmp_path):
    settings = with_overrides(Settings(), seed=11, shots=500, out=str(tmp_path))
    assert settings.get_value("seed") == 11
    assert settings.get_value("shots") == 500
    assert settings.get_value("vqed_shots") == 500
    saved = tmp_path / "resolved.json"
    settings.save_settings(str(saved))
    assert Settings(str(saved)).as_dict() == settings.as_dict()
