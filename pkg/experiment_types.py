# experiment_types.py - Basic data structures, constants and errors for the benchmark engine

import hashlib
from enum import Enum, auto
from dataclasses import dataclass, field
from typing import Optional, Tuple

# Constants
CIRCUIT_EXTENSION = ".circuit"
SIDECAR_EXTENSION = ".json"
BATCH_EXTENSION = ".batch"
RESULTS_EXTENSION = ".csv"
THREADS_ENV = "FERMISTAB_THREADS"

DEFAULT_SHOTS = 100_000
DEFAULT_VQED_SHOTS = 10_000
DEFAULT_RESAMPLES = 1_000
DEFAULT_VQED_RESAMPLES = 10_000
DEFAULT_ANGLE_QUARTERS = 3  # rotation angle 3*pi/4

EXCLUDE_DISCARD_RATE = 0.995
EXCLUDE_MIN_POSTSELECTED = 500

REGIMES = {
    "aspirational": 0.0001,
    "intermediate": 0.0005,
    "near_future": 0.001,
}


class FermistabError(Exception):
    """Base class for every error raised by the engine"""


class ConfigError(FermistabError):
    """Invalid configuration file or command line value"""


class SpecError(FermistabError):
    """Invalid experiment combination"""


class CircuitError(FermistabError):
    """Malformed circuit text or instruction"""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DeterminismError(FermistabError):
    """A detector or observable parity is not deterministic without noise"""

    def __init__(self, kind: str, index: int):
        self.kind = kind
        self.index = index
        super().__init__(f"{kind} {index} is not deterministic in the noiseless circuit")


class PauliError(FermistabError):
    """Dimension mismatch, dependent generators or bad Pauli text"""


class EstimateError(FermistabError):
    """Estimator cannot be evaluated on the given samples"""


class Encoding(Enum):
    JW = auto()
    TT = auto()
    DK = auto()


class CircuitKind(Enum):
    FULL_TROTTER = auto()
    RANDOM_LOGICAL = auto()


class ReadoutKind(Enum):
    OCCUPATION = auto()
    HOPPING = auto()


class Mitigation(Enum):
    NONE = auto()
    GP = auto()
    SR = auto()
    SM = auto()
    SM_FLAGS = auto()
    VQED = auto()


class TermKind(Enum):
    HOPPING = auto()
    COULOMB = auto()
    NUMBER = auto()


MITIGATION_NAMES = {
    Mitigation.NONE: "none",
    Mitigation.GP: "GP",
    Mitigation.SR: "SR",
    Mitigation.SM: "SM",
    Mitigation.SM_FLAGS: "SM+flags",
    Mitigation.VQED: "VQED",
}


def parse_mitigation(text: str) -> Mitigation:
    """Look up a mitigation by its display name"""
    for mitigation, name in MITIGATION_NAMES.items():
        if name.lower() == text.strip().lower():
            return mitigation
    raise ConfigError(f"unknown mitigation '{text}'")


def parse_encoding(text: str) -> Encoding:
    try:
        return Encoding[text.strip().upper()]
    except KeyError:
        raise ConfigError(f"unknown encoding '{text}'") from None


@dataclass(frozen=True)
class Readout:
    kind: ReadoutKind = ReadoutKind.OCCUPATION
    color: int = 0  # hopping colour class 0..3
    pair: str = "xx"  # "xx" or "yy"

    def label(self) -> str:
        if self.kind == ReadoutKind.OCCUPATION:
            return "occupation"
        return f"hopping-{self.color}{self.pair}"


@dataclass(frozen=True)
class CircuitSpec:
    kind: CircuitKind = CircuitKind.FULL_TROTTER
    steps: int = 2  # forward and mirrored Trotter steps together, even
    fraction: float = 0.0
    seed: int = 0

    def depth(self) -> float:
        """Depth value used on plot axes"""
        return float(self.steps) if self.kind == CircuitKind.FULL_TROTTER else self.fraction

    def label(self) -> str:
        if self.kind == CircuitKind.FULL_TROTTER:
            return f"trotter{self.steps}"
        return f"random{self.fraction:g}s{self.seed}"


@dataclass(frozen=True)
class ExperimentSpec:
    encoding: Encoding
    size: int
    circuit: CircuitSpec = field(default_factory=CircuitSpec)
    readout: Readout = field(default_factory=Readout)
    mitigation: Mitigation = Mitigation.NONE
    occupations: Optional[Tuple[int, ...]] = None  # Slater vector v, default all zero
    angle_quarters: int = DEFAULT_ANGLE_QUARTERS
    vqed_layers: int = 1
    vqed_flagged: bool = False
    sm_repeat: bool = False

    def name(self) -> str:
        """Stable file name stem for this experiment"""
        mitigation = MITIGATION_NAMES[self.mitigation].replace("+", "")
        stem = (f"{self.encoding.name}_L{self.size}_{self.circuit.label()}_"
                f"{mitigation}_{self.readout.label()}")
        options = self.options()
        if options == _DEFAULT_OPTIONS:
            return stem
        return f"{stem}_{hashlib.sha1(repr(options).encode()).hexdigest()[:8]}"

    def options(self) -> tuple:
        """Settings that change the circuit but not the name stem"""
        occupations = tuple(int(v) for v in self.occupations) if self.occupations is not None else None
        return (occupations, int(self.angle_quarters), self.vqed_layers, bool(self.vqed_flagged), bool(self.sm_repeat))


_DEFAULT_OPTIONS = (None, DEFAULT_ANGLE_QUARTERS, 1, False, False)
