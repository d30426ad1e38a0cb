# tableau.py - Stabilizer tableau reference simulator and Pauli propagation

from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from clifford_circuit import (CliffordCircuit, Instruction, GATE_DECOMPOSITIONS, ONE_QUBIT_GATES, DETECTOR,
                             OBSERVABLE)
from experiment_types import CircuitError, DeterminismError
from pauli import PauliString

_LETTER_BITS = {"X": (1, 0), "Y": (1, 1), "Z": (0, 1)}


def _single_qubit_table(name: str) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Lookup arrays indexed by 2x+z giving the image letter bits and sign flip"""
    new_x = np.zeros(4, dtype=bool)
    new_z = np.zeros(4, dtype=bool)
    flip = np.zeros(4, dtype=bool)
    for code, letter in ((1, "Z"), (2, "X"), (3, "Y")):
        image = ONE_QUBIT_GATES[name][letter]
        new_x[code], new_z[code] = _LETTER_BITS[image[1]]
        flip[code] = image[0] == "-"
    return new_x, new_z, flip


_TABLES = {name: _single_qubit_table(name) for name in ONE_QUBIT_GATES}


def apply_gate_to_rows(x: np.ndarray, z: np.ndarray, r: np.ndarray,
                       name: str, targets: Sequence[int]) -> None:
    """Conjugate every row of (x, z, sign r) by a gate instruction, in place"""
    if name in _TABLES:
        new_x, new_z, flip = _TABLES[name]
        for q in targets:
            code = 2 * x[:, q].astype(np.int8) + z[:, q].astype(np.int8)
            r ^= flip[code]
            x[:, q] = new_x[code]
            z[:, q] = new_z[code]
        return
    if name in GATE_DECOMPOSITIONS:
        for pair in zip(targets[::2], targets[1::2]):
            for primitive, positions in GATE_DECOMPOSITIONS[name]:
                apply_gate_to_rows(x, z, r, primitive, [pair[k] for k in positions])
        return
    for c, t in zip(targets[::2], targets[1::2]):
        if name == "CX":
            r ^= x[:, c] & z[:, t] & ~(x[:, t] ^ z[:, c])
            x[:, t] ^= x[:, c]
            z[:, c] ^= z[:, t]
        elif name == "CZ":
            r ^= x[:, c] & x[:, t] & (z[:, c] ^ z[:, t])
            z[:, c] ^= x[:, t]
            z[:, t] ^= x[:, c]
        elif name == "CY":
            apply_gate_to_rows(x, z, r, "S_DAG", [t])
            apply_gate_to_rows(x, z, r, "CX", [c, t])
            apply_gate_to_rows(x, z, r, "S", [t])
        elif name == "SWAP":
            x[:, [c, t]] = x[:, [t, c]]
            z[:, [c, t]] = z[:, [t, c]]
        else:
            raise CircuitError(f"'{name}' is not a Clifford gate")


def _product_phase(x1, z1, x2, z2) -> np.ndarray:
    """Exponent of i picked up by the letter-wise product (row1)(row2)"""
    plus = (x1 & ~z1 & x2 & z2) | (x1 & z1 & ~x2 & z2) | (~x1 & z1 & x2 & ~z2)
    minus = (x1 & ~z1 & ~x2 & z2) | (x1 & z1 & x2 & ~z2) | (~x1 & z1 & x2 & z2)
    return plus.sum(axis=-1).astype(np.int64) - minus.sum(axis=-1).astype(np.int64)


class Tableau:
    """Aaronson-Gottesman tableau: rows 0..n-1 destabilizers, n..2n-1 stabilizers.

    Row signs are affine functions of the random measurement outcomes: `r`
    holds the constant part and `masks` (Python int bitsets) the outcome
    variables each sign depends on, so parities of random records can be
    checked for determinism exactly.
    """

    def __init__(self, num_qubits: int):
        n = num_qubits
        self.num_qubits = n
        self.x = np.zeros((2 * n, n), dtype=bool)
        self.z = np.zeros((2 * n, n), dtype=bool)
        self.x[:n] = np.eye(n, dtype=bool)
        self.z[n:] = np.eye(n, dtype=bool)
        self.r = np.zeros(2 * n, dtype=bool)
        self.masks: List[int] = [0] * (2 * n)
        self.num_variables = 0

    def row(self, index: int) -> PauliString:
        return PauliString.from_bits(self.x[index], self.z[index], 2 * int(self.r[index]))

    def stabilizers(self) -> List[PauliString]:
        return [self.row(i) for i in range(self.num_qubits, 2 * self.num_qubits)]

    def destabilizers(self) -> List[PauliString]:
        return [self.row(i) for i in range(self.num_qubits)]

    def apply_gate(self, name: str, targets: Sequence[int]) -> None:
        self._check_targets(targets)
        apply_gate_to_rows(self.x, self.z, self.r, name, list(targets))

    def _check_targets(self, targets: Sequence[int]) -> None:
        for q in targets:
            if not 0 <= q < self.num_qubits:
                raise CircuitError(f"qubit {q} out of range for a {self.num_qubits}-qubit tableau")

    def _rowsum(self, rows: np.ndarray, source: int) -> None:
        """rows[k] <- source * rows[k], phases exact"""
        if rows.size == 0:
            return
        phase = (2 * self.r[rows].astype(np.int64) + 2 * int(self.r[source])
                 + _product_phase(self.x[source], self.z[source], self.x[rows], self.z[rows])) % 4
        self.r[rows] = phase >= 2
        self.x[rows] ^= self.x[source]
        self.z[rows] ^= self.z[source]
        mask = self.masks[source]
        if mask:
            for h in rows:
                self.masks[h] ^= mask

    def measure(self, qubit: int, rng: Optional[np.random.Generator] = None) -> Tuple[int, int]:
        """Z measurement returning (outcome bit, outcome variable mask).

        A random outcome introduces a fresh variable; without an rng its
        constant part is 0.
        """
        self._check_targets([qubit])
        n = self.num_qubits
        hits = np.flatnonzero(self.x[n:, qubit])
        if hits.size:
            p = n + int(hits[0])
            others = np.flatnonzero(self.x[:, qubit])
            self._rowsum(others[others != p], p)
            self.x[p - n], self.z[p - n] = self.x[p], self.z[p]
            self.r[p - n], self.masks[p - n] = self.r[p], self.masks[p]
            self.x[p] = False
            self.z[p] = False
            self.z[p, qubit] = True
            bit = 0 if rng is None else int(rng.integers(2))
            variable = 1 << self.num_variables
            self.num_variables += 1
            self.r[p] = bool(bit)
            self.masks[p] = variable
            return bit, variable
        xs = np.zeros(n, dtype=bool)
        zs = np.zeros(n, dtype=bool)
        sign = 0
        mask = 0
        for i in np.flatnonzero(self.x[:n, qubit]):
            j = n + int(i)
            phase = (2 * sign + 2 * int(self.r[j]) + int(_product_phase(self.x[j], self.z[j], xs, zs))) % 4
            sign = phase // 2
            xs ^= self.x[j]
            zs ^= self.z[j]
            mask ^= self.masks[j]
        return sign, mask

    def measure_z(self, qubit: int, rng: Optional[np.random.Generator] = None) -> int:
        """Measure in the Z basis; random outcomes are uniform when an rng is given"""
        return self.measure(qubit, rng)[0]

    def reset(self, qubit: int, rng: Optional[np.random.Generator] = None) -> None:
        bit, mask = self.measure(qubit, rng)
        flipped = np.flatnonzero(self.z[:, qubit])
        if bit:
            self.r[flipped] ^= True
        if mask:
            for h in flipped:
                self.masks[h] ^= mask

    def is_consistent(self) -> bool:
        """Symplectic check: destabilizer i anticommutes only with stabilizer i"""
        n = self.num_qubits
        form = (self.x.astype(np.uint8) @ self.z.T.astype(np.uint8)
                + self.z.astype(np.uint8) @ self.x.T.astype(np.uint8)) % 2
        expected = np.zeros((2 * n, 2 * n), dtype=np.uint8)
        expected[:n, n:] = np.eye(n, dtype=np.uint8)
        expected[n:, :n] = np.eye(n, dtype=np.uint8)
        return bool(np.array_equal(form, expected))


@dataclass
class ReferenceSample:
    measurements: np.ndarray  # bool, one entry per measurement record
    detectors: np.ndarray
    observables: np.ndarray


def reference_sample(circuit: CliffordCircuit) -> ReferenceSample:
    """Noiseless run with every random outcome fixed to 0.

    Raises DeterminismError when a detector or observable parity depends on a
    random outcome.
    """
    tableau = Tableau(circuit.num_qubits)
    bits: List[int] = []
    masks: List[int] = []
    detectors: List[int] = []
    observable_bits: Dict[int, int] = {}
    observable_masks: Dict[int, int] = {}
    for instruction in circuit:
        kind = instruction.kind
        if kind in ("gate1", "gate2"):
            tableau.apply_gate(instruction.name, instruction.targets)
        elif kind == "reset":
            for q in instruction.targets:
                tableau.reset(q)
        elif kind == "measure":
            for q in instruction.targets:
                bit, mask = tableau.measure(q)
                bits.append(bit)
                masks.append(mask)
        elif instruction.name == DETECTOR:
            bit, mask = _parity(instruction, bits, masks)
            if mask:
                raise DeterminismError("detector", len(detectors))
            detectors.append(bit)
        elif instruction.name == OBSERVABLE:
            index = int(instruction.args[0])
            bit, mask = _parity(instruction, bits, masks)
            observable_bits[index] = observable_bits.get(index, 0) ^ bit
            observable_masks[index] = observable_masks.get(index, 0) ^ mask
    for index, mask in observable_masks.items():
        if mask:
            raise DeterminismError("observable", index)
    observables = [observable_bits.get(i, 0) for i in range(circuit.num_observables)]
    return ReferenceSample(np.array(bits, dtype=bool), np.array(detectors, dtype=bool),
                           np.array(observables, dtype=bool))


def _parity(instruction: Instruction, bits: List[int], masks: List[int]) -> Tuple[int, int]:
    bit = 0
    mask = 0
    for lookback in instruction.targets:
        bit ^= bits[lookback]
        mask ^= masks[lookback]
    return bit, mask


def propagate_pauli(instructions: Iterable[Instruction], pauli: PauliString,
                    first_record: int = 0) -> Tuple[PauliString, List[int]]:
    """Push a Pauli error forward through Clifford instructions.

    Returns the final Pauli and the absolute indices of the measurement
    records it flips; resets remove the error from the reset qubit and noise
    or annotations are ignored.
    """
    x = pauli.x_bits()[None, :].copy()
    z = pauli.z_bits()[None, :].copy()
    r = np.zeros(1, dtype=bool)
    record = first_record
    flipped: List[int] = []
    for instruction in instructions:
        kind = instruction.kind
        if kind in ("gate1", "gate2"):
            apply_gate_to_rows(x, z, r, instruction.name, list(instruction.targets))
        elif kind == "measure":
            for q in instruction.targets:
                if x[0, q]:
                    flipped.append(record)
                record += 1
        elif kind == "reset":
            for q in instruction.targets:
                x[0, q] = False
                z[0, q] = False
    return PauliString.from_bits(x[0], z[0], pauli.phase + 2 * int(r[0])), flipped
