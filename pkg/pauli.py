# pauli.py - Phase-tracked Pauli strings, generator sets and GF(2) linear algebra

import re
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from bits import pack_bits, popcount, unpack_bits, word_count
from experiment_types import PauliError

_TEXT_PATTERN = re.compile(r"^\s*([+-]?)(i?)([IXYZ_]*)\s*$")
_SIGNS = {0: "+", 1: "+i", 2: "-", 3: "-i"}
_LETTER_BITS = {"I": (0, 0), "_": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}


class PauliString:
    """i**phase times a tensor product of I, X, Y, Z letters.

    Letters are stored as packed x/z bit vectors (Y = x and z both set), so
    the phase refers to the Hermitian letters and is exact under products.
    Instances are immutable.
    """

    __slots__ = ("num_qubits", "xs", "zs", "phase")

    def __init__(self, num_qubits: int, xs: np.ndarray, zs: np.ndarray, phase: int = 0):
        words = max(word_count(num_qubits), 1)
        xs = np.array(xs, dtype=np.uint64).reshape(words)
        zs = np.array(zs, dtype=np.uint64).reshape(words)
        xs.setflags(write=False)
        zs.setflags(write=False)
        self.num_qubits = num_qubits
        self.xs = xs
        self.zs = zs
        self.phase = phase % 4

    @classmethod
    def from_bits(cls, x_bits: Sequence[bool], z_bits: Sequence[bool], phase: int = 0) -> "PauliString":
        x_bits = np.asarray(x_bits, dtype=bool)
        z_bits = np.asarray(z_bits, dtype=bool)
        if x_bits.shape != z_bits.shape:
            raise PauliError("x and z bit vectors differ in length")
        return cls(len(x_bits), pack_bits(x_bits), pack_bits(z_bits), phase)

    @classmethod
    def identity(cls, num_qubits: int) -> "PauliString":
        return cls.from_bits(np.zeros(num_qubits, bool), np.zeros(num_qubits, bool))

    @classmethod
    def from_text(cls, text: str) -> "PauliString":
        """Parse text such as '-XIYZ' or '+iZZ'"""
        match = _TEXT_PATTERN.match(text)
        if match is None:
            raise PauliError(f"invalid Pauli text '{text}'")
        sign, imaginary, letters = match.groups()
        phase = (2 if sign == "-" else 0) + (1 if imaginary else 0)
        x_bits = [_LETTER_BITS[c][0] for c in letters]
        z_bits = [_LETTER_BITS[c][1] for c in letters]
        return cls.from_bits(x_bits, z_bits, phase)

    @classmethod
    def from_sparse(cls, num_qubits: int, letters: Dict[int, str], phase: int = 0) -> "PauliString":
        """Build from a {qubit: letter} mapping"""
        x_bits = np.zeros(num_qubits, dtype=bool)
        z_bits = np.zeros(num_qubits, dtype=bool)
        for qubit, letter in letters.items():
            if not 0 <= qubit < num_qubits:
                raise PauliError(f"qubit {qubit} out of range for {num_qubits} qubits")
            if letter not in _LETTER_BITS:
                raise PauliError(f"invalid Pauli letter '{letter}'")
            x_bits[qubit], z_bits[qubit] = _LETTER_BITS[letter]
        return cls.from_bits(x_bits, z_bits, phase)

    def x_bits(self) -> np.ndarray:
        return unpack_bits(self.xs, self.num_qubits)

    def z_bits(self) -> np.ndarray:
        return unpack_bits(self.zs, self.num_qubits)

    def letter(self, qubit: int) -> str:
        word, bit = divmod(qubit, 64)
        x = (int(self.xs[word]) >> bit) & 1
        z = (int(self.zs[word]) >> bit) & 1
        return "IZXY"[2 * x + z]

    def letters(self) -> str:
        codes = 2 * self.x_bits().astype(np.int8) + self.z_bits().astype(np.int8)
        return "".join("IZXY"[c] for c in codes)

    def support(self) -> List[int]:
        return [int(q) for q in np.flatnonzero(self.x_bits() | self.z_bits())]

    def sparse(self) -> Dict[int, str]:
        """The non-identity letters as a {qubit: letter} mapping"""
        return {q: self.letter(q) for q in self.support()}

    def weight(self) -> int:
        return popcount(self.xs | self.zs)

    def is_hermitian(self) -> bool:
        return self.phase % 2 == 0

    def sign(self) -> int:
        """+1 or -1 for Hermitian strings"""
        if not self.is_hermitian():
            raise PauliError(f"{self} is not Hermitian")
        return 1 if self.phase == 0 else -1

    def with_phase(self, phase: int) -> "PauliString":
        return PauliString(self.num_qubits, self.xs, self.zs, phase)

    def unsigned(self) -> "PauliString":
        return self.with_phase(0)

    def equal_up_to_phase(self, other: "PauliString") -> bool:
        _check_sizes(self, other)
        return bool(np.array_equal(self.xs, other.xs) and np.array_equal(self.zs, other.zs))

    def commutes(self, other: "PauliString") -> bool:
        return commutes(self, other)

    def __mul__(self, other: "PauliString") -> "PauliString":
        return multiply(self, other)

    def __neg__(self) -> "PauliString":
        return self.with_phase(self.phase + 2)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PauliString):
            return NotImplemented
        return (self.num_qubits == other.num_qubits and self.phase == other.phase
                and self.equal_up_to_phase(other))

    def __hash__(self) -> int:
        return hash((self.num_qubits, self.phase, self.xs.tobytes(), self.zs.tobytes()))

    def __str__(self) -> str:
        return _SIGNS[self.phase] + self.letters()

    def __repr__(self) -> str:
        return f"PauliString('{self}')"


def _check_sizes(a: PauliString, b: PauliString) -> None:
    if a.num_qubits != b.num_qubits:
        raise PauliError(f"dimension mismatch: {a.num_qubits} vs {b.num_qubits} qubits")


def multiply(a: PauliString, b: PauliString) -> PauliString:
    """Exact product a*b, phase included"""
    _check_sizes(a, b)
    x1, z1, x2, z2 = a.xs, a.zs, b.xs, b.zs
    only_x1, both1, only_z1 = x1 & ~z1, x1 & z1, ~x1 & z1
    only_x2, both2, only_z2 = x2 & ~z2, x2 & z2, ~x2 & z2
    # XY = iZ, YZ = iX, ZX = iY and the reversed orders give -i
    plus = (only_x1 & both2) | (both1 & only_z2) | (only_z1 & only_x2)
    minus = (only_x1 & only_z2) | (both1 & only_x2) | (only_z1 & both2)
    phase = a.phase + b.phase + popcount(plus) - popcount(minus)
    return PauliString(a.num_qubits, x1 ^ x2, z1 ^ z2, phase)


def product(paulis: Iterable[PauliString], num_qubits: Optional[int] = None) -> PauliString:
    """Ordered product of several strings; identity when empty"""
    result = None
    for pauli in paulis:
        result = pauli if result is None else multiply(result, pauli)
    if result is None:
        if num_qubits is None:
            raise PauliError("empty product needs an explicit qubit count")
        return PauliString.identity(num_qubits)
    return result


def commutes(a: PauliString, b: PauliString) -> bool:
    _check_sizes(a, b)
    return popcount((a.xs & b.zs) ^ (a.zs & b.xs)) % 2 == 0


def restrict(pauli: PauliString, qubits: Iterable[int]) -> PauliString:
    """Identity off the listed qubits at full width, phase reset to +1"""
    mask = np.zeros(pauli.num_qubits, dtype=bool)
    for qubit in qubits:
        if not 0 <= qubit < pauli.num_qubits:
            raise PauliError(f"qubit {qubit} out of range for {pauli.num_qubits} qubits")
        mask[qubit] = True
    return PauliString.from_bits(pauli.x_bits() & mask, pauli.z_bits() & mask)


def symplectic_rows(paulis: Sequence[PauliString]) -> np.ndarray:
    """Boolean matrix with one row (x block, then z block) per string"""
    if not paulis:
        return np.zeros((0, 0), dtype=bool)
    return np.array([np.concatenate([p.x_bits(), p.z_bits()]) for p in paulis], dtype=bool)


def gf2_row_reduce(matrix: np.ndarray) -> Tuple[np.ndarray, np.ndarray, List[int]]:
    """Reduced row echelon form over GF(2).

    Returns (reduced, transform, pivots) with reduced = transform @ matrix and
    pivots the pivot column of each leading row, lowest index first.
    """
    reduced = np.array(matrix, dtype=bool)
    rows, cols = reduced.shape
    transform = np.eye(rows, dtype=bool)
    pivots: List[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        hits = np.flatnonzero(reduced[r:, c])
        if hits.size == 0:
            continue
        p = r + int(hits[0])
        if p != r:
            reduced[[r, p]] = reduced[[p, r]]
            transform[[r, p]] = transform[[p, r]]
        others = np.flatnonzero(reduced[:, c])
        others = others[others != r]
        reduced[others] ^= reduced[r]
        transform[others] ^= transform[r]
        pivots.append(c)
        r += 1
    return reduced, transform, pivots


def gf2_rank(matrix: np.ndarray) -> int:
    return len(gf2_row_reduce(matrix)[2])


def solve_gf2(matrix: np.ndarray, rhs: Sequence[int]) -> np.ndarray:
    """One solution of matrix @ b = rhs over GF(2), free variables set to 0"""
    matrix = np.asarray(matrix, dtype=bool)
    rhs = np.asarray(rhs, dtype=bool)
    reduced, transform, pivots = gf2_row_reduce(matrix)
    target = (transform.astype(np.uint8) @ rhs.astype(np.uint8)) % 2
    if np.any(target[len(pivots):]):
        raise PauliError("linear system over GF(2) has no solution")
    solution = np.zeros(matrix.shape[1], dtype=bool)
    for r, c in enumerate(pivots):
        solution[c] = bool(target[r])
    return solution


def independent_rows(matrix: np.ndarray) -> List[int]:
    """Indices of a maximal independent subset of rows, greedy from the top"""
    basis: Dict[int, np.ndarray] = {}
    kept = []
    for index, row in enumerate(np.asarray(matrix, dtype=bool)):
        row = row.copy()
        for pivot, vector in basis.items():
            if row[pivot]:
                row ^= vector
        hits = np.flatnonzero(row)
        if hits.size == 0:
            continue
        pivot = int(hits[0])
        for other, vector in basis.items():
            if vector[pivot]:
                basis[other] = vector ^ row
        basis[pivot] = row
        kept.append(index)
    return kept


@dataclass
class GeneratorSet:
    """Commuting Hermitian generators of a stabilizer group"""
    generators: List[PauliString]
    independent: bool = False
    kept: List[int] = field(default_factory=list)  # indices into the unreduced list

    def __post_init__(self):
        if self.generators:
            n = self.generators[0].num_qubits
            for g in self.generators:
                if g.num_qubits != n:
                    raise PauliError("generators act on different qubit counts")
                if not g.is_hermitian():
                    raise PauliError(f"generator {g} is not Hermitian")
        if not self.kept:
            self.kept = list(range(len(self.generators)))

    def __len__(self) -> int:
        return len(self.generators)

    def all_commute(self) -> bool:
        gens = self.generators
        return all(commutes(gens[i], gens[j]) for i in range(len(gens)) for j in range(i))

    def reduce(self) -> "GeneratorSet":
        """Drop generators that are products of earlier ones"""
        keep = independent_rows(symplectic_rows(self.generators))
        return GeneratorSet([self.generators[i] for i in keep], True, [self.kept[i] for i in keep])


def compute_destabilizers(generators: Sequence[PauliString]) -> List[PauliString]:
    """Destabilizers D_i anticommuting with generator j exactly when i == j.

    Solves the symplectic linear system by Gaussian elimination with the
    lowest pivot index; dependent generators raise PauliError.
    """
    generators = list(generators)
    if not generators:
        return []
    if not GeneratorSet(generators).all_commute():
        raise PauliError("destabilizers need mutually commuting generators")
    n = generators[0].num_qubits
    # d anticommutes with s iff d . (s.z | s.x) = 1
    swapped = np.array([np.concatenate([g.z_bits(), g.x_bits()]) for g in generators], dtype=bool)
    _, transform, pivots = gf2_row_reduce(swapped)
    if len(pivots) < len(generators):
        raise PauliError(f"generators are dependent: rank {len(pivots)} < {len(generators)}")
    destabilizers = []
    for i in range(len(generators)):
        vector = np.zeros(2 * n, dtype=bool)
        for r, c in enumerate(pivots):
            vector[c] = transform[r, i]
        destabilizers.append(PauliString.from_bits(vector[:n], vector[n:]))
    return destabilizers


def recovery_from_syndrome(destabilizers: Sequence[PauliString], syndrome: Sequence[int],
                           num_qubits: Optional[int] = None) -> PauliString:
    """Product of the destabilizers whose syndrome entry is -1"""
    if len(destabilizers) != len(syndrome):
        raise PauliError(f"syndrome has {len(syndrome)} entries for {len(destabilizers)} destabilizers")
    for value in syndrome:
        if value not in (1, -1):
            raise PauliError(f"syndrome entries must be +1 or -1, got {value}")
    chosen = [d for d, s in zip(destabilizers, syndrome) if s == -1]
    if num_qubits is None and destabilizers:
        num_qubits = destabilizers[0].num_qubits
    return product(chosen, num_qubits)
