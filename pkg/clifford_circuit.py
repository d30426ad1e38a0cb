# clifford_circuit.py - Instruction set, circuit container and the line-based text format

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, List, NamedTuple, Optional, Sequence, Tuple

from experiment_types import CircuitError

# Conjugation images U P U^dagger of the single-qubit Paulis
ONE_QUBIT_GATES = {
    "I": {"X": "+X", "Y": "+Y", "Z": "+Z"},
    "X": {"X": "+X", "Y": "-Y", "Z": "-Z"},
    "Y": {"X": "-X", "Y": "+Y", "Z": "-Z"},
    "Z": {"X": "-X", "Y": "-Y", "Z": "+Z"},
    "H": {"X": "+Z", "Y": "-Y", "Z": "+X"},
    "S": {"X": "+Y", "Y": "-X", "Z": "+Z"},
    "S_DAG": {"X": "-Y", "Y": "+X", "Z": "+Z"},
    "SQRT_X": {"X": "+X", "Y": "+Z", "Z": "-Y"},
    "SQRT_X_DAG": {"X": "+X", "Y": "-Z", "Z": "+Y"},
    "SQRT_Y": {"X": "-Z", "Y": "+Y", "Z": "+X"},
    "SQRT_Y_DAG": {"X": "+Z", "Y": "+Y", "Z": "-X"},
}
TWO_QUBIT_GATES = (
    "CX", "CY", "CZ", "SWAP",
    "XCX", "XCY", "XCZ", "SWAPCZ",
    "SQRT_XX", "SQRT_XX_DAG", "SQRT_YY", "SQRT_YY_DAG", "SQRT_ZZ", "SQRT_ZZ_DAG",
)

# Native two-qubit gates as primitive sequences on target positions (0, 1), earliest first.
# SQRT_PP is exp(-i pi/4 P P) and XC? is the Pauli-controlled gate with an X-basis control.
GATE_DECOMPOSITIONS = {
    "XCX": (("H", (0,)), ("CX", (0, 1)), ("H", (0,))),
    "XCY": (("H", (0,)), ("CY", (0, 1)), ("H", (0,))),
    "XCZ": (("CX", (1, 0)),),
    "SWAPCZ": (("SWAP", (0, 1)), ("CZ", (0, 1))),
    "SQRT_ZZ": (("CX", (0, 1)), ("S", (1,)), ("CX", (0, 1))),
    "SQRT_ZZ_DAG": (("CX", (0, 1)), ("S_DAG", (1,)), ("CX", (0, 1))),
    "SQRT_XX": (("H", (0,)), ("H", (1,)), ("CX", (0, 1)), ("S", (1,)), ("CX", (0, 1)), ("H", (0,)), ("H", (1,))),
    "SQRT_XX_DAG": (("H", (0,)), ("H", (1,)), ("CX", (0, 1)), ("S_DAG", (1,)), ("CX", (0, 1)),
                    ("H", (0,)), ("H", (1,))),
    "SQRT_YY": (("SQRT_X", (0,)), ("SQRT_X", (1,)), ("CX", (0, 1)), ("S", (1,)), ("CX", (0, 1)),
                ("SQRT_X_DAG", (0,)), ("SQRT_X_DAG", (1,))),
    "SQRT_YY_DAG": (("SQRT_X", (0,)), ("SQRT_X", (1,)), ("CX", (0, 1)), ("S_DAG", (1,)), ("CX", (0, 1)),
                    ("SQRT_X_DAG", (0,)), ("SQRT_X_DAG", (1,))),
}
GATE_ALIASES = {"CNOT": "CX", "ZCX": "CX", "ZCY": "CY", "ZCZ": "CZ", "CZSWAP": "SWAPCZ"}

INVERSE_GATES = {
    "S": "S_DAG", "S_DAG": "S",
    "SQRT_X": "SQRT_X_DAG", "SQRT_X_DAG": "SQRT_X",
    "SQRT_Y": "SQRT_Y_DAG", "SQRT_Y_DAG": "SQRT_Y",
    "SQRT_XX": "SQRT_XX_DAG", "SQRT_XX_DAG": "SQRT_XX",
    "SQRT_YY": "SQRT_YY_DAG", "SQRT_YY_DAG": "SQRT_YY",
    "SQRT_ZZ": "SQRT_ZZ_DAG", "SQRT_ZZ_DAG": "SQRT_ZZ",
}

RESET = "R"
MEASURE = "M"
NOISE_ONE_QUBIT = ("DEPOLARIZE1", "X_ERROR", "Y_ERROR", "Z_ERROR")
NOISE_TWO_QUBIT = ("DEPOLARIZE2",)
DETECTOR = "DETECTOR"
OBSERVABLE = "OBSERVABLE_INCLUDE"
TICK = "TICK"

_LINE = re.compile(r"^([A-Z][A-Z0-9_]*)(?:\(([^)]*)\))?\s*(.*)$")
_REC = re.compile(r"^rec\[(-\d+)\]$")


def inverse_gate(name: str) -> str:
    return INVERSE_GATES.get(name, name)


@dataclass(frozen=True)
class Instruction:
    name: str
    targets: Tuple[int, ...] = ()
    args: Tuple[float, ...] = ()

    @property
    def kind(self) -> str:
        if self.name in ONE_QUBIT_GATES:
            return "gate1"
        if self.name in TWO_QUBIT_GATES:
            return "gate2"
        if self.name == RESET:
            return "reset"
        if self.name == MEASURE:
            return "measure"
        if self.name in NOISE_ONE_QUBIT:
            return "noise1"
        if self.name in NOISE_TWO_QUBIT:
            return "noise2"
        if self.name in (DETECTOR, OBSERVABLE):
            return "annotation"
        return "tick"

    def is_gate(self) -> bool:
        return self.kind in ("gate1", "gate2")

    def is_noise(self) -> bool:
        return self.kind in ("noise1", "noise2") or (self.name == MEASURE and bool(self.args))

    def pairs(self) -> List[Tuple[int, int]]:
        return list(zip(self.targets[::2], self.targets[1::2]))

    def __str__(self) -> str:
        head = self.name
        if self.args:
            head += "(" + ", ".join(_format_arg(a) for a in self.args) + ")"
        if self.kind == "annotation":
            body = " ".join(f"rec[{t}]" for t in self.targets)
        else:
            body = " ".join(str(t) for t in self.targets)
        return f"{head} {body}".rstrip()


def _format_arg(value: float) -> str:
    if float(value).is_integer():
        return str(int(value))
    return repr(float(value))


class GateCounts(NamedTuple):
    one_qubit: int
    two_qubit: int

    @property
    def total(self) -> int:
        return self.one_qubit + self.two_qubit


class CliffordCircuit:
    """Ordered list of instructions with a running measurement record"""

    def __init__(self, num_qubits: int = 0):
        self.instructions: List[Instruction] = []
        self.num_qubits = num_qubits
        self.num_measurements = 0
        self.num_detectors = 0
        self.num_observables = 0

    def append(self, name: str, targets: Sequence[int] = (), args: Sequence[float] = (),
               line: Optional[int] = None) -> None:
        """Validate and append one instruction"""
        name = GATE_ALIASES.get(name, name)
        instruction = Instruction(name, tuple(int(t) for t in targets), tuple(float(a) for a in args))
        self._validate(instruction, line)
        kind = instruction.kind
        if kind == "measure":
            self.num_measurements += len(instruction.targets)
        elif name == DETECTOR:
            self.num_detectors += 1
        elif name == OBSERVABLE:
            self.num_observables = max(self.num_observables, int(instruction.args[0]) + 1)
        if kind not in ("annotation", "tick") and instruction.targets:
            self.num_qubits = max(self.num_qubits, max(instruction.targets) + 1)
        self.instructions.append(instruction)

    def _validate(self, instruction: Instruction, line: Optional[int]) -> None:
        name, targets, args = instruction.name, instruction.targets, instruction.args
        kind = instruction.kind
        if kind == "tick" and name != TICK:
            raise CircuitError(f"unknown instruction '{name}'", line)
        if kind == "annotation":
            for t in targets:
                if t >= 0 or -t > self.num_measurements:
                    raise CircuitError(f"record lookback rec[{t}] outside the "
                                       f"{self.num_measurements} measurements so far", line)
            if name == OBSERVABLE and (len(args) != 1 or args[0] < 0 or not float(args[0]).is_integer()):
                raise CircuitError("OBSERVABLE_INCLUDE needs one non-negative integer index", line)
            return
        if any(t < 0 for t in targets):
            raise CircuitError(f"negative qubit target in {name}", line)
        if kind in ("gate2", "noise2") and len(targets) % 2:
            raise CircuitError(f"{name} needs an even number of targets", line)
        if kind in ("gate2", "noise2"):
            for a, b in instruction.pairs():
                if a == b:
                    raise CircuitError(f"{name} applied to qubit {a} twice in one pair", line)
        if kind in ("noise1", "noise2"):
            if len(args) != 1 or not 0.0 <= args[0] <= 1.0:
                raise CircuitError(f"{name} needs one probability in [0, 1]", line)
        elif kind == "measure":
            if len(args) > 1 or (args and not 0.0 <= args[0] <= 1.0):
                raise CircuitError("M takes at most one flip probability in [0, 1]", line)
        elif args:
            raise CircuitError(f"{name} takes no arguments", line)

    def measure(self, qubits: Sequence[int], flip_probability: float = 0.0) -> List[int]:
        """Append a measurement and return the absolute record indices"""
        start = self.num_measurements
        self.append(MEASURE, qubits, (flip_probability,) if flip_probability else ())
        return list(range(start, self.num_measurements))

    def detector(self, records: Iterable[int], coords: Sequence[float] = ()) -> int:
        """Append a detector over absolute record indices; returns its index"""
        self.append(DETECTOR, self._lookbacks(records), coords)
        return self.num_detectors - 1

    def observable(self, index: int, records: Iterable[int]) -> None:
        self.append(OBSERVABLE, self._lookbacks(records), (index,))

    def _lookbacks(self, records: Iterable[int]) -> List[int]:
        # records appearing an even number of times cancel
        parity = {}
        for record in records:
            if not 0 <= record < self.num_measurements:
                raise CircuitError(f"record {record} outside the {self.num_measurements} measurements so far")
            parity[record] = parity.get(record, 0) ^ 1
        return [r - self.num_measurements for r in sorted(parity) if parity[r]]

    def extend(self, other: Iterable[Instruction]) -> None:
        for instruction in other:
            self.append(instruction.name, instruction.targets, instruction.args)

    def copy(self) -> "CliffordCircuit":
        circuit = CliffordCircuit(self.num_qubits)
        circuit.extend(self.instructions)
        return circuit

    def record_indices(self, instruction_index: int) -> List[int]:
        """Absolute records written by the instruction at the given position"""
        start = sum(len(i.targets) for i in self.instructions[:instruction_index] if i.kind == "measure")
        instruction = self.instructions[instruction_index]
        if instruction.kind != "measure":
            return []
        return list(range(start, start + len(instruction.targets)))

    def __iter__(self) -> Iterator[Instruction]:
        return iter(self.instructions)

    def __len__(self) -> int:
        return len(self.instructions)

    def __getitem__(self, index):
        return self.instructions[index]

    def __str__(self) -> str:
        return emit_circuit(self)


def parse_circuit(text: str) -> CliffordCircuit:
    """Parse the line-based circuit text format"""
    circuit = CliffordCircuit()
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        match = _LINE.match(line)
        if match is None:
            raise CircuitError(f"cannot parse '{raw.strip()}'", number)
        name, arg_text, target_text = match.groups()
        try:
            args = [float(a) for a in arg_text.split(",")] if arg_text and arg_text.strip() else []
        except ValueError:
            raise CircuitError(f"bad argument list '({arg_text})'", number) from None
        targets = []
        for token in target_text.split():
            rec = _REC.match(token)
            if rec is not None:
                targets.append(int(rec.group(1)))
            elif token.isdigit():
                targets.append(int(token))
            else:
                raise CircuitError(f"bad target '{token}'", number)
        is_annotation = GATE_ALIASES.get(name, name) in (DETECTOR, OBSERVABLE)
        if is_annotation and any(not t.startswith("rec[") for t in target_text.split()):
            raise CircuitError(f"{name} targets must be record lookbacks", number)
        if not is_annotation and "rec[" in target_text:
            raise CircuitError(f"{name} cannot target measurement records", number)
        circuit.append(name, targets, args, line=number)
    return circuit


def emit_circuit(circuit: CliffordCircuit) -> str:
    return "".join(f"{instruction}\n" for instruction in circuit.instructions)


def count_gates(circuit: Iterable[Instruction]) -> GateCounts:
    """Noisy gate locations: one per single-qubit target, one per target pair"""
    one = two = 0
    for instruction in circuit:
        if instruction.kind == "gate1":
            one += len(instruction.targets)
        elif instruction.kind == "gate2":
            two += len(instruction.targets) // 2
    return GateCounts(one, two)
