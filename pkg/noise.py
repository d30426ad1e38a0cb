# noise.py - Circuit-level Pauli error models

from dataclasses import dataclass

from clifford_circuit import CliffordCircuit, Instruction, MEASURE, RESET
from experiment_types import REGIMES, CircuitError, ConfigError

SI_ONE_QUBIT_FACTOR = 0.1
SI_RESET_FACTOR = 2.0
SI_MEASURE_FACTOR = 5.0


@dataclass(frozen=True)
class ErrorModel:
    """Depolarizing gate noise, reset and measurement flips"""
    name: str
    p1: float  # single-qubit depolarizing after 1Q gates
    p2: float  # two-qubit depolarizing after 2Q gates
    ps: float  # X flip after reset
    pm: float  # classical flip of each measurement outcome

    def __post_init__(self):
        for key in ("p1", "p2", "ps", "pm"):
            value = getattr(self, key)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"error model {self.name}: {key}={value} is not a probability")

    @property
    def p(self) -> float:
        """Rate used on plot legends: the two-qubit rate"""
        return self.p2

    def label(self) -> str:
        if self.name in ("SD", "SI"):
            return f"{self.name}({self.p2:g})"
        return f"{self.name}(p1={self.p1:g},p2={self.p2:g},ps={self.ps:g},pm={self.pm:g})"


def standard_depolarizing(p: float) -> ErrorModel:
    return ErrorModel("SD", p, p, p, p)


def superconducting_inspired(p: float) -> ErrorModel:
    return ErrorModel("SI", SI_ONE_QUBIT_FACTOR * p, p, SI_RESET_FACTOR * p, SI_MEASURE_FACTOR * p)


def error_model(name: str, p: float = 0.0, **rates: float) -> ErrorModel:
    """Build a named model; 'custom' takes p1, p2, ps and pm explicitly"""
    key = name.strip().upper()
    if key == "SD":
        return standard_depolarizing(p)
    if key == "SI":
        return superconducting_inspired(p)
    if key == "CUSTOM":
        missing = [r for r in ("p1", "p2", "ps", "pm") if r not in rates]
        if missing:
            raise ConfigError(f"custom error model needs {', '.join(missing)}")
        return ErrorModel("custom", float(rates["p1"]), float(rates["p2"]),
                          float(rates["ps"]), float(rates["pm"]))
    raise ConfigError(f"unknown error model '{name}'")


def regime_rate(name: str) -> float:
    try:
        return REGIMES[name]
    except KeyError:
        raise ConfigError(f"unknown error regime '{name}'") from None


def is_noisy(circuit: CliffordCircuit) -> bool:
    return any(instruction.is_noise() for instruction in circuit)


def apply_noise(circuit: CliffordCircuit, model: ErrorModel) -> CliffordCircuit:
    """Insert noise after every gate and reset and attach flips to measurements.

    Idle qubits stay noiseless. Zero-probability channels are left out.
    """
    if is_noisy(circuit):
        raise CircuitError("circuit already carries noise")
    noisy = CliffordCircuit(circuit.num_qubits)
    for instruction in circuit:
        kind = instruction.kind
        if kind == "measure" and model.pm > 0:
            noisy.append(MEASURE, instruction.targets, (model.pm,))
            continue
        noisy.append(instruction.name, instruction.targets, instruction.args)
        channel = _channel_after(instruction, model)
        if channel is not None:
            noisy.append(*channel)
    return noisy


def _channel_after(instruction: Instruction, model: ErrorModel):
    kind = instruction.kind
    if kind == "gate1" and model.p1 > 0:
        return "DEPOLARIZE1", instruction.targets, (model.p1,)
    if kind == "gate2" and model.p2 > 0:
        return "DEPOLARIZE2", instruction.targets, (model.p2,)
    if instruction.name == RESET and model.ps > 0:
        return "X_ERROR", instruction.targets, (model.ps,)
    return None
