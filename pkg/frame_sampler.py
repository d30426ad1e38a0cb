# frame_sampler.py - Bit-parallel Pauli-frame sampling of detector and observable flips

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from bits import WORD_BITS, set_bits, unpack_bits, word_count
from clifford_circuit import CliffordCircuit, GATE_DECOMPOSITIONS, ONE_QUBIT_GATES, DETECTOR, OBSERVABLE
from experiment_types import THREADS_ENV, FermistabError
from pauli import PauliString
from tableau import reference_sample

BLOCK_WORDS = 256  # 16384 shots per independently seeded block
DENSE_NOISE_THRESHOLD = 0.05

_LETTER_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}


def _frame_map(name: str) -> Tuple[int, int, int, int]:
    """Images of X and Z as bits (xx, xz, zx, zz), signs dropped"""
    images = ONE_QUBIT_GATES[name]
    xx, xz = _LETTER_BITS[images["X"][1]]
    zx, zz = _LETTER_BITS[images["Z"][1]]
    return xx, xz, zx, zz


_FRAME_MAPS = {name: _frame_map(name) for name in ONE_QUBIT_GATES}


@dataclass
class SampleBatch:
    detectors: np.ndarray  # (shots, D) bool, 1 = detector fired
    observables: np.ndarray  # (shots, O) bool, 1 = observable flipped
    aux_signs: Optional[np.ndarray] = None  # (shots, m) of +1/-1 for VQED layers
    seed: int = 0

    @property
    def num_shots(self) -> int:
        return self.detectors.shape[0]

    def select(self, rows: np.ndarray) -> "SampleBatch":
        aux = None if self.aux_signs is None else self.aux_signs[rows]
        return SampleBatch(self.detectors[rows], self.observables[rows], aux, self.seed)


@dataclass(frozen=True)
class Fault:
    position: int  # injected after this instruction index, -1 means before the first
    pauli: PauliString


def worker_count() -> int:
    value = os.environ.get(THREADS_ENV)
    if value:
        try:
            return max(1, int(value))
        except ValueError:
            print(f"Ignoring invalid {THREADS_ENV}={value}")
    return os.cpu_count() or 1


class _CompiledCircuit:
    """Instructions lowered to frame operations on index arrays"""

    def __init__(self, circuit: CliffordCircuit):
        self.num_qubits = circuit.num_qubits
        self.num_measurements = circuit.num_measurements
        self.steps: List[List[tuple]] = []
        self.detectors: List[np.ndarray] = []
        observables: Dict[int, List[int]] = {}
        measured = 0
        for instruction in circuit:
            kind = instruction.kind
            targets = np.array(instruction.targets, dtype=np.int64)
            ops: List[tuple] = []
            if kind == "gate1":
                if _FRAME_MAPS[instruction.name] != (1, 0, 0, 1):
                    for group in _distinct_groups(targets, 1):
                        ops.append(("gate1", _FRAME_MAPS[instruction.name], group))
            elif kind == "gate2":
                for group in _distinct_groups(targets, 2):
                    ops.extend(_lower_pairs(instruction.name, group[0::2], group[1::2]))
            elif kind == "reset":
                ops.append(("reset", targets))
            elif kind == "measure":
                p = instruction.args[0] if instruction.args else 0.0
                ops.append(("measure", targets, measured, p))
                measured += len(targets)
            elif kind in ("noise1", "noise2"):
                if instruction.args[0] > 0:
                    ops.append((instruction.name, targets, instruction.args[0]))
            elif instruction.name == DETECTOR:
                self.detectors.append(np.array([measured + t for t in instruction.targets], dtype=np.int64))
            elif instruction.name == OBSERVABLE:
                records = observables.setdefault(int(instruction.args[0]), [])
                records.extend(measured + t for t in instruction.targets)
            self.steps.append(ops)
        self.observables = [np.array(observables.get(i, []), dtype=np.int64)
                            for i in range(circuit.num_observables)]


def _lower_pairs(name: str, first: np.ndarray, second: np.ndarray) -> List[tuple]:
    """Frame operations of a two-qubit gate on disjoint pairs, native gates expanded"""
    if name not in GATE_DECOMPOSITIONS:
        return [(name, first, second)]
    ops: List[tuple] = []
    for primitive, positions in GATE_DECOMPOSITIONS[name]:
        rows = [(first, second)[k] for k in positions]
        if len(rows) == 1:
            ops.append(("gate1", _FRAME_MAPS[primitive], rows[0]))
        else:
            ops.append((primitive, rows[0], rows[1]))
    return ops


def _distinct_groups(targets: np.ndarray, arity: int) -> List[np.ndarray]:
    """Split targets into runs whose qubits are pairwise distinct"""
    groups: List[np.ndarray] = []
    start = 0
    seen = set()
    for k in range(0, len(targets), arity):
        chunk = set(int(t) for t in targets[k:k + arity])
        if seen & chunk:
            groups.append(targets[start:k])
            start = k
            seen = set()
        seen |= chunk
    if start < len(targets):
        groups.append(targets[start:])
    return groups


def _combine(xs: np.ndarray, zs: np.ndarray, use_x: int, use_z: int) -> np.ndarray:
    out = xs.copy() if use_x else np.zeros_like(xs)
    if use_z:
        out ^= zs
    return out


def _hit_positions(rng: np.random.Generator, p: float, total: int) -> np.ndarray:
    """Indices in [0, total) each selected independently with probability p"""
    if p <= 0 or total == 0:
        return np.zeros(0, dtype=np.int64)
    if p >= DENSE_NOISE_THRESHOLD:
        return np.flatnonzero(rng.random(total) < p)
    chunk = int(total * p + 6 * np.sqrt(total * p) + 16)
    positions = np.cumsum(rng.geometric(p, size=chunk)) - 1
    while positions[-1] < total:
        more = positions[-1] + np.cumsum(rng.geometric(p, size=chunk))
        positions = np.concatenate([positions, more])
    return positions[positions < total]


def _run_block(compiled: _CompiledCircuit, words: int, rng: Optional[np.random.Generator],
               injections: Optional[Dict[int, Tuple[np.ndarray, np.ndarray]]] = None) -> np.ndarray:
    """Propagate one block of frames and return the record flips (M x words)"""
    x = np.zeros((compiled.num_qubits, words), dtype=np.uint64)
    z = np.zeros((compiled.num_qubits, words), dtype=np.uint64)
    records = np.zeros((compiled.num_measurements, words), dtype=np.uint64)
    bits = words * WORD_BITS
    if injections and -1 in injections:
        x ^= injections[-1][0]
        z ^= injections[-1][1]
    for position, ops in enumerate(compiled.steps):
        for op in ops:
            name = op[0]
            if name == "gate1":
                (xx, xz, zx, zz), t = op[1], op[2]
                xs, zs = x[t], z[t]
                x[t] = _combine(xs, zs, xx, zx)
                z[t] = _combine(xs, zs, xz, zz)
            elif name == "CX":
                c, t = op[1], op[2]
                x[t] ^= x[c]
                z[c] ^= z[t]
            elif name == "CZ":
                c, t = op[1], op[2]
                z[c] ^= x[t]
                z[t] ^= x[c]
            elif name == "CY":
                c, t = op[1], op[2]
                z[t] ^= x[t]
                x[t] ^= x[c]
                z[c] ^= z[t]
                z[t] ^= x[t]
            elif name == "SWAP":
                c, t = op[1], op[2]
                x[c], x[t] = x[t], x[c].copy()
                z[c], z[t] = z[t], z[c].copy()
            elif name == "reset":
                x[op[1]] = 0
                z[op[1]] = 0
            elif name == "measure":
                t, start, p = op[1], op[2], op[3]
                records[start:start + len(t)] = x[t]
                if rng is not None and p > 0:
                    hits = _hit_positions(rng, p, len(t) * bits)
                    set_bits(records, start + hits // bits, hits % bits)
            elif rng is not None:
                _apply_noise(x, z, op, rng, bits)
        if injections and position in injections:
            x ^= injections[position][0]
            z ^= injections[position][1]
    return records


def _apply_noise(x: np.ndarray, z: np.ndarray, op: tuple, rng: np.random.Generator, bits: int) -> None:
    name, targets, p = op
    if name == "DEPOLARIZE2":
        a, b = targets[0::2], targets[1::2]
        hits = _hit_positions(rng, p, len(a) * bits)
        pair, shot = hits // bits, hits % bits
        pauli = rng.integers(1, 16, size=len(hits))
        for row_targets, bit, frame in ((a, 0, x), (a, 1, z), (b, 2, x), (b, 3, z)):
            chosen = (pauli >> bit) & 1 == 1
            set_bits(frame, row_targets[pair[chosen]], shot[chosen])
        return
    hits = _hit_positions(rng, p, len(targets) * bits)
    rows, shot = targets[hits // bits], hits % bits
    if name == "DEPOLARIZE1":
        pauli = rng.integers(1, 4, size=len(hits))  # 1 X, 2 Y, 3 Z
        set_bits(x, rows[pauli <= 2], shot[pauli <= 2])
        set_bits(z, rows[pauli >= 2], shot[pauli >= 2])
    elif name == "X_ERROR":
        set_bits(x, rows, shot)
    elif name == "Z_ERROR":
        set_bits(z, rows, shot)
    elif name == "Y_ERROR":
        set_bits(x, rows, shot)
        set_bits(z, rows, shot)


def _parities(records: np.ndarray, groups: List[np.ndarray]) -> np.ndarray:
    out = np.zeros((len(groups), records.shape[1]), dtype=np.uint64)
    for k, group in enumerate(groups):
        if group.size:
            out[k] = np.bitwise_xor.reduce(records[group], axis=0)
    return out


def iter_blocks(circuit: CliffordCircuit, shots: int, seed: int,
                workers: Optional[int] = None) -> Iterator[Tuple[np.ndarray, np.ndarray]]:
    """Yield (detectors, observables) bool blocks in shot order.

    Block k is seeded from (seed, k) only, so results do not depend on the
    number of worker threads.
    """
    compiled = _CompiledCircuit(circuit)
    block_shots = BLOCK_WORDS * WORD_BITS
    blocks = [(k, min(block_shots, shots - k * block_shots))
              for k in range((shots + block_shots - 1) // block_shots)]

    def run(block: Tuple[int, int]) -> Tuple[np.ndarray, np.ndarray]:
        index, count = block
        rng = np.random.default_rng([seed, index])
        records = _run_block(compiled, word_count(count), rng)
        detectors = unpack_bits(_parities(records, compiled.detectors), count).T
        observables = unpack_bits(_parities(records, compiled.observables), count).T
        return detectors, observables

    workers = workers or worker_count()
    if workers == 1 or len(blocks) <= 1:
        for block in blocks:
            yield run(block)
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        yield from pool.map(run, blocks)


def sample_frames(circuit: CliffordCircuit, shots: int, seed: int,
                  workers: Optional[int] = None, check: bool = True) -> SampleBatch:
    """Sample detector and observable flips relative to the noiseless reference"""
    if shots < 0:
        raise FermistabError(f"shot count must be non-negative, got {shots}")
    if check:
        reference_sample(circuit)
    detectors = [np.zeros((0, circuit.num_detectors), dtype=bool)]
    observables = [np.zeros((0, circuit.num_observables), dtype=bool)]
    for det_block, obs_block in iter_blocks(circuit, shots, seed, workers):
        detectors.append(det_block)
        observables.append(obs_block)
    return SampleBatch(np.concatenate(detectors), np.concatenate(observables), None, seed)


def simulate_faults(circuit: CliffordCircuit, faults: Sequence[Fault]) -> SampleBatch:
    """Noise-free propagation with exactly one injected fault per shot"""
    compiled = _CompiledCircuit(circuit)
    shots = len(faults)
    words = max(word_count(shots), 1)
    injections: Dict[int, Tuple[np.ndarray, np.ndarray]] = {}
    for shot, fault in enumerate(faults):
        if fault.pauli.num_qubits > circuit.num_qubits:
            raise FermistabError(f"fault acts on {fault.pauli.num_qubits} qubits, circuit has {circuit.num_qubits}")
        if fault.position not in injections:
            injections[fault.position] = (np.zeros((compiled.num_qubits, words), dtype=np.uint64),
                                          np.zeros((compiled.num_qubits, words), dtype=np.uint64))
        fx, fz = injections[fault.position]
        x_rows = np.flatnonzero(fault.pauli.x_bits())
        z_rows = np.flatnonzero(fault.pauli.z_bits())
        set_bits(fx, x_rows, np.full(len(x_rows), shot))
        set_bits(fz, z_rows, np.full(len(z_rows), shot))
    records = _run_block(compiled, words, None, injections)
    detectors = unpack_bits(_parities(records, compiled.detectors), shots).T
    observables = unpack_bits(_parities(records, compiled.observables), shots).T
    return SampleBatch(detectors, observables)
