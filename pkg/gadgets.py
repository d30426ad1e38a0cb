# gadgets.py - Pauli rotations, flagged stabilizer measurement and mirroring

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from clifford_circuit import CliffordCircuit, Instruction, inverse_gate
from experiment_types import CircuitError
from pauli import PauliString

Moment = List[Tuple[str, Tuple[int, ...]]]

_BASIS_CHANGE = {"X": "SQRT_Y", "Y": "SQRT_X"}  # both map the letter onto +-Z
_CENTER_GATES = {1: "S", 2: "Z", 3: "S_DAG"}  # exp(-i k pi/4 Z) up to global phase
_COUPLINGS = {"X": "CX", "Y": "CY", "Z": "CZ"}
_PAIR_GATES = {"X": "SQRT_XX", "Y": "SQRT_YY", "Z": "SQRT_ZZ"}  # exp(-i pi/4 PP)
_AXIS_GATES = {"X": ("SQRT_X", "X", "SQRT_X_DAG"), "Y": ("SQRT_Y", "Y", "SQRT_Y_DAG"), "Z": ("S", "Z", "S_DAG")}
_LETTER_MAPS = {  # single-qubit gate taking the first letter onto +the second
    ("X", "Y"): "S", ("Y", "X"): "S_DAG", ("X", "Z"): "H", ("Z", "X"): "H",
    ("Y", "Z"): "SQRT_X", ("Z", "Y"): "SQRT_X_DAG",
}


@dataclass
class Fragment:
    """Gate-only circuit piece kept as moments so pieces can run side by side"""
    moments: List[Moment] = field(default_factory=list)

    def __add__(self, other: "Fragment") -> "Fragment":
        return Fragment(self.moments + other.moments)

    def qubits(self) -> set:
        return {q for moment in self.moments for _, targets in moment for q in targets}

    def instructions(self) -> List[Instruction]:
        """One instruction per gate name per moment, targets concatenated"""
        out = []
        for moment in self.moments:
            grouped: Dict[str, List[int]] = {}
            for name, targets in moment:
                grouped.setdefault(name, []).extend(targets)
            out.extend(Instruction(name, tuple(targets)) for name, targets in grouped.items())
        return out

    def append_to(self, circuit: CliffordCircuit) -> None:
        for instruction in self.instructions():
            circuit.append(instruction.name, instruction.targets)


def merge_parallel(fragments: Iterable[Fragment]) -> Fragment:
    """Run fragments on disjoint qubits in lock step"""
    fragments = list(fragments)
    used: set = set()
    for fragment in fragments:
        qubits = fragment.qubits()
        if used & qubits:
            raise CircuitError(f"parallel fragments share qubits {sorted(used & qubits)}")
        used |= qubits
    depth = max((len(f.moments) for f in fragments), default=0)
    moments: List[Moment] = [[] for _ in range(depth)]
    for fragment in fragments:
        for k, moment in enumerate(fragment.moments):
            moments[k].extend(moment)
    return Fragment(moments)


def build_logical_rotation(pauli: PauliString, quarter_turns: int) -> Fragment:
    """exp(-i k pi/4 P) for a Hermitian Pauli P.

    Basis change onto Z (SQRT_Y on X letters, SQRT_X on Y letters), a CX
    ladder onto the lowest support qubit, one phase gate and the mirror image.
    Uses 2(w-1) two-qubit gates.
    """
    support = pauli.support()
    if not support:
        return Fragment()
    letters = pauli.sparse()
    sign = pauli.sign()
    basis: Moment = []
    for q in support:
        if letters[q] in _BASIS_CHANGE:
            basis.append((_BASIS_CHANGE[letters[q]], (q,)))
            if letters[q] == "X":
                sign = -sign  # SQRT_Y maps X to -Z
    target, controls = support[0], support[1:]
    ladder: List[Moment] = [[("CX", (c, target))] for c in controls]
    effective = (quarter_turns * sign) % 4
    moments: List[Moment] = []
    if basis:
        moments.append(basis)
    moments.extend(ladder)
    if effective:
        moments.append([(_CENTER_GATES[effective], (target,))])
    moments.extend(reversed(ladder))
    if basis:
        moments.append([(inverse_gate(name), targets) for name, targets in basis])
    return Fragment(moments)


def build_native_rotation(pauli: PauliString, quarter_turns: int) -> Fragment:
    """exp(-i k pi/4 P) on native two-qubit rotations.

    The lowest support qubit is the pivot and the next qubit with the same
    letter its partner. Pauli-controlled gates from the pivot fold every other
    letter away, then one SQRT_XX/YY/ZZ-type gate rotates the pair. Uses
    2(w-2)+1 two-qubit gates for w >= 2; a half turn is the Pauli itself.
    """
    support = pauli.support()
    effective = (quarter_turns * pauli.sign()) % 4
    if not support or not effective:
        return Fragment()
    letters = pauli.sparse()
    if effective == 2:
        return Fragment([[(letters[q], (q,)) for q in support]])
    pivot = support[0]
    letter = letters[pivot]
    if len(support) == 1:
        return Fragment([[(_AXIS_GATES[letter][effective - 1], (pivot,))]])
    partner = next((q for q in support[1:] if letters[q] == letter), support[1])
    control = "XC" if letter == "Z" else "C"  # control letter anticommutes with the pivot's
    folds: List[Moment] = [[(control + letters[q], (pivot, q))] for q in support[1:] if q != partner]
    fix = _LETTER_MAPS.get((letters[partner], letter))
    core = _PAIR_GATES[letter] if effective == 1 else inverse_gate(_PAIR_GATES[letter])
    moments = list(folds)
    if fix:
        moments.append([(fix, (partner,))])
    moments.append([(core, (pivot, partner))])
    if fix:
        moments.append([(inverse_gate(fix), (partner,))])
    moments.extend(reversed(folds))
    return Fragment(moments)


def cancel_inverse_pairs(fragment: Fragment) -> Fragment:
    """Drop every gate that directly follows its own inverse on the same qubits.

    Removals cascade, so a ladder closed by one rotation and reopened by the
    next cancels as far as the two agree. Moments left empty disappear.
    """
    kept: List[List[Optional[Tuple[str, Tuple[int, ...]]]]] = []
    last: Dict[int, List[Tuple[int, int]]] = {}  # qubit -> stack of (moment, slot) still alive
    for moment in fragment.moments:
        kept.append([])
        row = len(kept) - 1
        for name, targets in moment:
            tops = {last[q][-1] if last.get(q) else None for q in targets}
            if len(tops) == 1 and None not in tops:
                m, s = tops.pop()
                previous = kept[m][s]
                if previous[1] == targets and previous[0] == inverse_gate(name):
                    kept[m][s] = None
                    for q in targets:
                        last[q].pop()
                    continue
            kept[row].append((name, targets))
            for q in targets:
                last.setdefault(q, []).append((row, len(kept[row]) - 1))
    moments = [[gate for gate in moment if gate is not None] for moment in kept]
    return Fragment([moment for moment in moments if moment])


def inverse_instructions(instructions: Sequence[Instruction]) -> List[Instruction]:
    """Exact inverse of a gate-only instruction list"""
    out = []
    for instruction in reversed(instructions):
        if not instruction.is_gate():
            raise CircuitError(f"cannot invert non-gate instruction {instruction.name}")
        arity = 2 if instruction.kind == "gate2" else 1
        groups = [instruction.targets[k:k + arity] for k in range(0, len(instruction.targets), arity)]
        targets = tuple(q for group in reversed(groups) for q in group)
        out.append(Instruction(inverse_gate(instruction.name), targets))
    return out


def build_mirror(instructions: Sequence[Instruction]) -> List[Instruction]:
    """U followed by U^dagger"""
    instructions = list(instructions)
    return instructions + inverse_instructions(instructions)


@dataclass
class StabMeasurement:
    records: List[int]  # auxiliary outcome per round
    flag_records: List[int]
    detectors: List[int]  # repeat and flag detectors added by the gadget


def build_stab_measurement(circuit: CliffordCircuit, stabilizer: PauliString, aux: int,
                           flag: Optional[int] = None, order: Optional[Sequence[int]] = None,
                           repeat: bool = False, flag_detectors: bool = True) -> StabMeasurement:
    """Hadamard-test measurement of a stabilizer from an auxiliary qubit in |+>.

    The flag, also in |+>, couples to the auxiliary right after the first and
    right before the last data coupling. A repeat measures twice and adds a
    detector comparing the two outcomes.
    """
    letters = stabilizer.sparse()
    if not letters:
        raise CircuitError("cannot measure the identity")
    order = list(order) if order is not None else sorted(letters)
    if sorted(order) != sorted(letters):
        raise CircuitError(f"coupling order {order} does not cover the support of {stabilizer}")
    if aux in letters or (flag is not None and flag in letters):
        raise CircuitError("auxiliary and flag qubits must lie outside the stabilizer support")
    result = StabMeasurement([], [], [])
    for _ in range(2 if repeat else 1):
        helpers = [aux] if flag is None else [aux, flag]
        circuit.append("R", helpers)
        circuit.append("H", helpers)
        for position, q in enumerate(order):
            if flag is not None and position == len(order) - 1:
                circuit.append("CZ", (aux, flag))
            circuit.append(_COUPLINGS[letters[q]], (aux, q))
            if flag is not None and position == 0:
                circuit.append("CZ", (aux, flag))
        circuit.append("H", helpers)
        records = circuit.measure(helpers)
        result.records.append(records[0])
        if flag is not None:
            result.flag_records.append(records[1])
            if flag_detectors:
                result.detectors.append(circuit.detector([records[1]]))
    if repeat:
        result.detectors.append(circuit.detector(result.records))
    return result


def apply_pauli(circuit: CliffordCircuit, pauli: PauliString) -> None:
    """Apply a Pauli string as single-qubit Pauli gates"""
    grouped: Dict[str, List[int]] = {}
    for q, letter in pauli.sparse().items():
        grouped.setdefault(letter, []).append(q)
    for letter, qubits in grouped.items():
        circuit.append(letter, qubits)


def prepare_letters(circuit: CliffordCircuit, letters: Dict[int, str]) -> None:
    """Reset qubits into the +1 eigenstate of the given letter ('+' and 'i' mean |+> and |+i>)"""
    basis = {"X": "+", "Y": "i", "Z": "0", "+": "+", "i": "i", "0": "0"}
    qubits = sorted(letters)
    circuit.append("R", qubits)
    plus = [q for q in qubits if basis[letters[q]] in "+i"]
    if plus:
        circuit.append("H", plus)
    imaginary = [q for q in qubits if basis[letters[q]] == "i"]
    if imaginary:
        circuit.append("S", imaginary)


def measure_letters(circuit: CliffordCircuit, letters: Dict[int, str]) -> Dict[int, int]:
    """Measure qubits in the eigenbasis of their letter; returns qubit -> record"""
    qubits = sorted(letters)
    y_qubits = [q for q in qubits if letters[q] == "Y"]
    if y_qubits:
        circuit.append("S_DAG", y_qubits)
    rotated = [q for q in qubits if letters[q] in "XY"]
    if rotated:
        circuit.append("H", rotated)
    records = circuit.measure(qubits)
    return dict(zip(qubits, records))
