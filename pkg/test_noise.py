# test_noise.py

import pytest

from clifford_circuit import parse_circuit
from experiment_types import CircuitError, ConfigError
from noise import apply_noise, error_model, is_noisy, regime_rate, standard_depolarizing, superconducting_inspired

BELL = "R 0 1\nH 0\nCX 0 1\nM 0 1\nDETECTOR rec[-1] rec[-2]\n"


def test_standard_depolarizing_uses_one_rate():
    model = standard_depolarizing(0.002)
    assert (model.p1, model.p2, model.ps, model.pm) == (0.002, 0.002, 0.002, 0.002)
    assert model.label() == "SD(0.002)"


def test_superconducting_inspired_rates():
    model = superconducting_inspired(0.001)
    assert model.p1 == pytest.approx(0.0001)
    assert model.p2 == pytest.approx(0.001)
    assert model.ps == pytest.approx(0.002)
    assert model.pm == pytest.approx(0.005)
    assert model.p == model.p2


def test_named_models():
    assert error_model(" sd ", 0.01).name == "SD"
    assert error_model("si", 0.01).name == "SI"
    custom = error_model("custom", p1=0.0, p2=0.1, ps=0.0, pm=0.2)
    assert custom.label() == "custom(p1=0,p2=0.1,ps=0,pm=0.2)"


def test_bad_models_raise():
    with pytest.raises(ConfigError):
        error_model("custom", p1=0.1, p2=0.1)
    with pytest.raises(ConfigError):
        error_model("thermal", 0.01)
    with pytest.raises(ConfigError):
        error_model("SD", 1.5)


def test_regimes():
    assert regime_rate("near_future") == 0.001
    assert regime_rate("aspirational") == 0.0001
    with pytest.raises(ConfigError):
        regime_rate("far_future")


def test_noise_follows_every_operation():
    noisy = apply_noise(parse_circuit(BELL), standard_depolarizing(0.01))
    assert str(noisy) == ("R 0 1\nX_ERROR(0.01) 0 1\nH 0\nDEPOLARIZE1(0.01) 0\nCX 0 1\n"
                          "DEPOLARIZE2(0.01) 0 1\nM(0.01) 0 1\nDETECTOR rec[-1] rec[-2]\n")
    assert is_noisy(noisy)
    assert not is_noisy(parse_circuit(BELL))


def test_zero_rates_are_left_out():
    model = error_model("custom", p1=0.0, p2=0.1, ps=0.0, pm=0.0)
    noisy = apply_noise(parse_circuit(BELL), model)
    assert str(noisy) == "R 0 1\nH 0\nCX 0 1\nDEPOLARIZE2(0.1) 0 1\nM 0 1\nDETECTOR rec[-1] rec[-2]\n"


def test_noisy_input_rejected():
    noisy = apply_noise(parse_circuit(BELL), standard_depolarizing(0.01))
    with pytest.raises(CircuitError):
        apply_noise(noisy, standard_depolarizing(0.01))
