# conftest.py - Dense matrix oracles shared by the tests (small qubit counts only)

from functools import reduce
from typing import Dict, List, Sequence

import numpy as np
import pytest

from clifford_circuit import CliffordCircuit, DETECTOR
from pauli import PauliString

SQ2 = np.sqrt(2.0)

PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

_I, _X, _Y, _Z = (PAULI_MATRICES[k] for k in "IXYZ")

GATE_MATRICES = {
    "I": _I,
    "X": _X,
    "Y": _Y,
    "Z": _Z,
    "H": np.array([[1, 1], [1, -1]], dtype=complex) / SQ2,
    "S": np.diag([1, 1j]),
    "S_DAG": np.diag([1, -1j]),
    "SQRT_X": (_I - 1j * _X) / SQ2,
    "SQRT_X_DAG": (_I + 1j * _X) / SQ2,
    "SQRT_Y": (_I - 1j * _Y) / SQ2,
    "SQRT_Y_DAG": (_I + 1j * _Y) / SQ2,
    "CX": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex),
    "CY": np.block([[np.eye(2), np.zeros((2, 2))], [np.zeros((2, 2)), _Y]]).astype(complex),
    "CZ": np.diag([1, 1, 1, -1]).astype(complex),
    "SWAP": np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex),
}


def _pauli_controlled(control: np.ndarray, target: np.ndarray) -> np.ndarray:
    return (np.kron(_I + control, _I) + np.kron(_I - control, target)) / 2


for _letter, _matrix in (("X", _X), ("Y", _Y), ("Z", _Z)):
    _pair = np.kron(_matrix, _matrix)
    GATE_MATRICES[f"SQRT_{_letter}{_letter}"] = (np.eye(4) - 1j * _pair) / SQ2
    GATE_MATRICES[f"SQRT_{_letter}{_letter}_DAG"] = (np.eye(4) + 1j * _pair) / SQ2
    GATE_MATRICES[f"XC{_letter}"] = _pauli_controlled(_X, _matrix)
GATE_MATRICES["SWAPCZ"] = GATE_MATRICES["CZ"] @ GATE_MATRICES["SWAP"]


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: desk-scale reproductions taking minutes")


def pauli_matrix(pauli: PauliString) -> np.ndarray:
    """Dense matrix with qubit 0 as the most significant tensor factor"""
    matrix = reduce(np.kron, [PAULI_MATRICES[c] for c in pauli.letters()], np.eye(1, dtype=complex))
    return (1j ** pauli.phase) * matrix


def embed(op: np.ndarray, targets: Sequence[int], n: int) -> np.ndarray:
    """Full 2^n matrix of an operator acting on the given qubits"""
    k = len(targets)
    full = np.eye(2 ** n, dtype=complex).reshape([2] * n + [2 ** n])
    moved = np.moveaxis(full, list(targets), list(range(k)))
    shape = moved.shape
    out = (op @ moved.reshape(2 ** k, -1)).reshape(shape)
    return np.moveaxis(out, list(range(k)), list(targets)).reshape(2 ** n, 2 ** n)


def circuit_unitary(instructions, n: int) -> np.ndarray:
    unitary = np.eye(2 ** n, dtype=complex)
    for instruction in instructions:
        if not instruction.is_gate():
            continue
        arity = 2 if instruction.kind == "gate2" else 1
        for k in range(0, len(instruction.targets), arity):
            targets = instruction.targets[k:k + arity]
            unitary = embed(GATE_MATRICES[instruction.name], targets, n) @ unitary
    return unitary


def equal_up_to_phase(a: np.ndarray, b: np.ndarray, tol: float = 1e-9) -> bool:
    index = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    if abs(a[index]) < tol:
        return False
    phase = b[index] / a[index]
    return bool(np.allclose(a * phase, b, atol=tol))


def _channel(rho: np.ndarray, name: str, p: float, targets: Sequence[int], n: int) -> np.ndarray:
    if name == "DEPOLARIZE2":
        for a, b in zip(targets[0::2], targets[1::2]):
            mixed = np.zeros_like(rho)
            for la in "IXYZ":
                for lb in "IXYZ":
                    if la == lb == "I":
                        continue
                    op = embed(np.kron(PAULI_MATRICES[la], PAULI_MATRICES[lb]), [a, b], n)
                    mixed += op @ rho @ op.conj().T
            rho = (1 - p) * rho + p / 15 * mixed
        return rho
    letters = {"DEPOLARIZE1": "XYZ", "X_ERROR": "X", "Y_ERROR": "Y", "Z_ERROR": "Z"}[name]
    for q in targets:
        mixed = np.zeros_like(rho)
        for letter in letters:
            op = embed(PAULI_MATRICES[letter], [q], n)
            mixed += op @ rho @ op.conj().T
        rho = (1 - p) * rho + p / len(letters) * mixed
    return rho


def _record_distribution(circuit: CliffordCircuit, noisy: bool) -> Dict[tuple, float]:
    """Joint distribution of the final measurement records from |0...0>"""
    n = circuit.num_qubits
    rho = np.zeros((2 ** n, 2 ** n), dtype=complex)
    rho[0, 0] = 1.0
    measured: List[int] = []
    flip = 0.0
    for instruction in circuit:
        kind = instruction.kind
        if kind == "reset":
            if measured or np.abs(rho[0, 0] - 1.0) > 1e-12:
                raise ValueError("the dense oracle only supports an initial reset")
        elif kind in ("gate1", "gate2"):
            unitary = circuit_unitary([instruction], n)
            rho = unitary @ rho @ unitary.conj().T
        elif kind in ("noise1", "noise2"):
            if noisy:
                rho = _channel(rho, instruction.name, instruction.args[0], instruction.targets, n)
        elif kind == "measure":
            if measured:
                raise ValueError("the dense oracle supports a single final measurement")
            measured = list(instruction.targets)
            flip = instruction.args[0] if (instruction.args and noisy) else 0.0
    distribution: Dict[tuple, float] = {}
    for basis, p in enumerate(np.real(np.diag(rho))):
        if p < 1e-15:
            continue
        bits = tuple((basis >> (n - 1 - q)) & 1 for q in measured)
        distribution[bits] = distribution.get(bits, 0.0) + p
    for i in range(len(measured)):
        flipped: Dict[tuple, float] = {}
        for bits, p in distribution.items():
            other = bits[:i] + (1 - bits[i],) + bits[i + 1:]
            flipped[bits] = flipped.get(bits, 0.0) + (1 - flip) * p
            flipped[other] = flipped.get(other, 0.0) + flip * p
        distribution = flipped
    return distribution


def dense_detector_probabilities(circuit: CliffordCircuit) -> np.ndarray:
    """Probability that each detector differs from its noiseless value"""
    m = circuit.num_measurements
    groups = [[m + t for t in instruction.targets] for instruction in circuit if instruction.name == DETECTOR]
    reference = _record_distribution(circuit, noisy=False)
    noisy = _record_distribution(circuit, noisy=True)
    probabilities = []
    for group in groups:
        expected = {sum(bits[r] for r in group) % 2 for bits, p in reference.items() if p > 1e-12}
        if len(expected) != 1:
            raise ValueError("detector is not deterministic without noise")
        value = expected.pop()
        probabilities.append(sum(p for bits, p in noisy.items() if sum(bits[r] for r in group) % 2 != value))
    return np.array(probabilities)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
