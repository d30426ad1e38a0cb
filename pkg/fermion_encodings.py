# fermion_encodings.py - Fermi-Hubbard terms and the Jordan-Wigner, ternary-tree and compact encodings

from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from experiment_types import PauliError, SpecError, TermKind
from lattice import Edge, Lattice
from pauli import (GeneratorSet, PauliString, commutes, compute_destabilizers, multiply,
                   recovery_from_syndrome, restrict, solve_gf2)


@dataclass(frozen=True)
class Term:
    kind: TermKind
    modes: Tuple[int, ...]
    coefficient: float = 1.0
    edge: Optional[int] = None  # lattice edge carrying a two-mode term


@dataclass
class EncodedTerm:
    """Qubit image of a term's operator: constant * I + sum of coefficient * Pauli"""
    term: Term
    constant: float
    summands: List[Tuple[float, PauliString]]


@dataclass
class FermiHubbardModel:
    """Spinless Fermi-Hubbard model on a periodic lattice, modes = vertices"""
    lattice: Lattice
    hopping: float = 1.0
    coulomb: float = 1.0
    terms: List[Term] = field(default_factory=list)

    @property
    def num_modes(self) -> int:
        return self.lattice.num_vertices

    def interactions(self) -> List[Tuple[Term, Term]]:
        """(hopping, coulomb) pair for every lattice bond, in edge order"""
        hops = [t for t in self.terms if t.kind == TermKind.HOPPING]
        coulombs = [t for t in self.terms if t.kind == TermKind.COULOMB]
        return list(zip(hops, coulombs))


def build_model(lattice: Lattice, hopping: float = 1.0, coulomb: float = 1.0) -> FermiHubbardModel:
    """One hopping and one Coulomb term per nearest-neighbour bond"""
    model = FermiHubbardModel(lattice, hopping, coulomb)
    for edge in lattice.edges:
        model.terms.append(Term(TermKind.HOPPING, (edge.tail, edge.head), -hopping, edge.index))
    for edge in lattice.edges:
        model.terms.append(Term(TermKind.COULOMB, (edge.tail, edge.head), coulomb, edge.index))
    return model


def _real(scale: float, quarter_turns: int, pauli: PauliString) -> Tuple[float, PauliString]:
    """Write scale * i**quarter_turns * pauli as a real coefficient times a Hermitian string"""
    phase = (quarter_turns + pauli.phase) % 4
    if phase % 2:
        raise PauliError(f"operator {pauli} times i^{quarter_turns} is not Hermitian")
    return (scale if phase == 0 else -scale), pauli.unsigned()


def _encode_from_bilinears(term: Term, vertex_op, hop_a, hop_b) -> EncodedTerm:
    """Shared expansion of number, Coulomb and hopping terms.

    vertex_op(j) gives V_j = -i g_2j g_2j+1; hop_a/hop_b give the two hopping
    halves (i/2) g_2i g_2j+1 and -(i/2) g_2i+1 g_2j as real summands.
    """
    if term.kind == TermKind.NUMBER:
        (i,) = term.modes
        return EncodedTerm(term, 0.5, [_real(-0.5, 0, vertex_op(i))])
    i, j = term.modes
    if i == j:
        raise SpecError(f"two-mode term on a single mode {i}")
    if term.kind == TermKind.COULOMB:
        vi, vj = vertex_op(i), vertex_op(j)
        return EncodedTerm(term, 0.25, [_real(-0.25, 0, vi), _real(-0.25, 0, vj),
                                        _real(0.25, 0, multiply(vi, vj))])
    return EncodedTerm(term, 0.0, [hop_a(i, j), hop_b(i, j)])


def encode_with_majoranas(term: Term, majoranas: Sequence[PauliString]) -> EncodedTerm:
    """Encode a term from an explicit Majorana list (g_2j, g_2j+1 per mode)"""
    def vertex_op(j: int) -> PauliString:
        return vertex_operator(majoranas, j)

    def hop_a(i: int, j: int):
        return _real(0.5, 1, multiply(majoranas[2 * i], majoranas[2 * j + 1]))

    def hop_b(i: int, j: int):
        return _real(0.5, 3, multiply(majoranas[2 * i + 1], majoranas[2 * j]))

    for mode in term.modes:
        if not 0 <= 2 * mode + 1 < len(majoranas):
            raise SpecError(f"mode {mode} outside the {len(majoranas) // 2} encoded modes")
    return _encode_from_bilinears(term, vertex_op, hop_a, hop_b)


def vertex_operator(majoranas: Sequence[PauliString], mode: int) -> PauliString:
    """V_j = -i g_2j g_2j+1, the parity operator of one mode"""
    pair = multiply(majoranas[2 * mode], majoranas[2 * mode + 1])
    return pair.with_phase(pair.phase + 3)


# Jordan-Wigner

def jw_majoranas(num_modes: int, ordering: Optional[Sequence[int]] = None) -> List[PauliString]:
    """Z-string Majoranas; ordering[mode] is the line position of the mode"""
    ordering = list(range(num_modes)) if ordering is None else list(ordering)
    majoranas = []
    for mode in range(num_modes):
        position = ordering[mode]
        string = {q: "Z" for q in range(position)}
        majoranas.append(PauliString.from_sparse(num_modes, {**string, position: "X"}))
        majoranas.append(PauliString.from_sparse(num_modes, {**string, position: "Y"}))
    return majoranas


def jw_encode(term: Term, num_modes: int, ordering: Optional[Sequence[int]] = None) -> EncodedTerm:
    """Hopping gives 1/2 Z..Z (XX + YY); number and Coulomb are Z-only"""
    ordering = list(range(num_modes)) if ordering is None else list(ordering)
    for mode in term.modes:
        if not 0 <= mode < num_modes:
            raise SpecError(f"mode {mode} outside the {num_modes} modes")
    positions = [ordering[m] for m in term.modes]
    if term.kind == TermKind.NUMBER:
        return EncodedTerm(term, 0.5, [(-0.5, PauliString.from_sparse(num_modes, {positions[0]: "Z"}))])
    p, q = positions
    if p == q:
        raise SpecError(f"two-mode term on a single mode {term.modes[0]}")
    if term.kind == TermKind.COULOMB:
        zp = PauliString.from_sparse(num_modes, {p: "Z"})
        zq = PauliString.from_sparse(num_modes, {q: "Z"})
        return EncodedTerm(term, 0.25, [(-0.25, zp), (-0.25, zq), (0.25, multiply(zp, zq))])
    low, high = min(p, q), max(p, q)
    string = {k: "Z" for k in range(low + 1, high)}
    xx = PauliString.from_sparse(num_modes, {**string, low: "X", high: "X"})
    yy = PauliString.from_sparse(num_modes, {**string, low: "Y", high: "Y"})
    return EncodedTerm(term, 0.0, [(0.5, xx), (0.5, yy)])


def jw_slater_bits(occupations: Sequence[int], ordering: Optional[Sequence[int]] = None) -> np.ndarray:
    ordering = list(range(len(occupations))) if ordering is None else list(ordering)
    bits = np.zeros(len(occupations), dtype=bool)
    for mode, occupied in enumerate(occupations):
        bits[ordering[mode]] = bool(occupied)
    return bits


# Ternary tree

_LEGS = "XYZ"
TREE_PAIRINGS = ("node", "consecutive")


@dataclass(frozen=True)
class TernaryTree:
    """Balanced ternary tree over qubits 0..q-1, node u has children 3u+1..3u+3.

    `pairing` decides which root-to-leaf strings form a mode: "node" pairs
    the X and Y legs leaving each node, "consecutive" pairs strings 2j and
    2j+1 of the lexicographic list.
    """
    num_qubits: int
    pairing: str = "node"

    def paths(self) -> List[Dict[int, str]]:
        return tt_paths(self.num_qubits)

    def leg(self, node: int, letter: str) -> Dict[int, str]:
        return _tt_leg(self.num_qubits, node, letter)


def build_ternary_tree(num_modes: int, pairing: str = "node") -> TernaryTree:
    """One tree node per mode"""
    if num_modes < 1:
        raise SpecError(f"a ternary tree needs at least one mode, got {num_modes}")
    if pairing not in TREE_PAIRINGS:
        raise SpecError(f"unknown ternary-tree pairing '{pairing}', expected one of {TREE_PAIRINGS}")
    return TernaryTree(num_modes, pairing)


def _tt_prefix(node: int) -> Dict[int, str]:
    """Letters on the ancestors of a node, read off the root path"""
    letters = {}
    while node > 0:
        parent = (node - 1) // 3
        letters[parent] = _LEGS[(node - 1) % 3]
        node = parent
    return letters


def tt_paths(num_qubits: int) -> List[Dict[int, str]]:
    """All 2q+1 root-to-leaf strings of the balanced ternary tree, lexicographic"""
    paths: List[Dict[int, str]] = []

    def walk(node: int, prefix: Dict[int, str]) -> None:
        for leg, letter in enumerate(_LEGS):
            child = 3 * node + leg + 1
            here = {**prefix, node: letter}
            if child < num_qubits:
                walk(child, here)
            else:
                paths.append(here)

    if num_qubits > 0:
        walk(0, {})
    return paths


def _tt_leg(num_qubits: int, node: int, letter: str) -> Dict[int, str]:
    """Path leaving `node` along `letter`, then following Z legs to a leaf"""
    path = {**_tt_prefix(node), node: letter}
    child = 3 * node + _LEGS.index(letter) + 1
    while child < num_qubits:
        path[child] = "Z"
        child = 3 * child + 3
    return path


def tt_majoranas(tree: TernaryTree) -> List[PauliString]:
    """Majorana strings of a tree, two per mode.

    Node pairing takes the (X-leg, Y-leg) of every node; the all-Z path is
    the lexicographically last one and is dropped. Modes are ordered by where
    their X-leg sits in the lexicographic path list and every vertex operator
    is Z-type, so Slater states are computational states. Consecutive pairing
    keeps the first 2n strings of the list in order.
    """
    n = tree.num_qubits
    paths = tree.paths()
    if tree.pairing == "consecutive":
        return [PauliString.from_sparse(n, path) for path in paths[:2 * n]]
    rank = {tuple(sorted(p.items())): k for k, p in enumerate(paths)}
    nodes = sorted(range(n), key=lambda u: rank[tuple(sorted(tree.leg(u, "X").items()))])
    majoranas = []
    for node in nodes:
        majoranas.append(PauliString.from_sparse(n, tree.leg(node, "X")))
        majoranas.append(PauliString.from_sparse(n, tree.leg(node, "Y")))
    return majoranas


def tt_encode(term: Term, tree: TernaryTree) -> EncodedTerm:
    return encode_with_majoranas(term, tt_majoranas(tree))


def tt_slater_bits(occupations: Sequence[int], majoranas: Sequence[PauliString]) -> np.ndarray:
    """Computational state whose vertex-operator eigenvalues are (-1)**v_j"""
    rows = []
    rhs = []
    for mode, occupied in enumerate(occupations):
        v = vertex_operator(majoranas, mode)
        if v.x_bits().any():
            raise PauliError(f"vertex operator {v} of mode {mode} is not Z-type")
        rows.append(v.z_bits())
        rhs.append(int(bool(occupied)) ^ (1 if v.phase == 2 else 0))
    return solve_gf2(np.array(rows, dtype=bool), rhs)


def occupation_masks(majoranas: Sequence[PauliString]) -> List[np.ndarray]:
    """Qubits whose Z parity gives each mode's occupation (Z-type vertex operators)"""
    return [vertex_operator(majoranas, j).z_bits() for j in range(len(majoranas) // 2)]


# Compact (Derby-Klassen) encoding

@dataclass
class DkArtifacts:
    lattice: Lattice
    vertex_ops: List[PauliString]
    edge_ops: Dict[int, PauliString]  # E for tail -> head, current signs included
    edge_signs: Dict[int, int]
    stabilizers: List[PauliString]  # one per red face
    stabilizer_orders: List[List[int]]  # coupling order for syndrome extraction
    loop_phases: List[int]  # product of the face's edge operators = i**phase * S_k
    face_parts: List[PauliString]  # T_k
    vertex_parts: List[PauliString]  # R_k
    basis: List[int]  # red faces kept after dropping dependent stabilizers
    destabilizers: List[PauliString]  # for the kept stabilizers
    face_basis: List[int]
    face_destabilizers: List[PauliString]

    @property
    def num_qubits(self) -> int:
        return self.lattice.num_qubits


def _dk_edge(lattice: Lattice, edge: Edge) -> PauliString:
    n = lattice.num_qubits
    if edge.horizontal:
        return PauliString.from_sparse(n, {edge.tail: "X", edge.head: "Y", edge.face: "Y"})
    phase = 0 if edge.direction == "down" else 2
    return PauliString.from_sparse(n, {edge.tail: "X", edge.head: "Y", edge.face: "X"}, phase)


def dk_build(lattice: Lattice) -> DkArtifacts:
    """Vertex, edge and stabilizer operators with their destabilizers"""
    n = lattice.num_qubits
    vertex_ops = [PauliString.from_sparse(n, {v: "Z"}) for v in range(lattice.num_vertices)]
    edge_ops = {edge.index: _dk_edge(lattice, edge) for edge in lattice.edges}
    stabilizers, orders, loops, faces, vertices = [], [], [], [], []
    for k, (x, y) in enumerate(lattice.red_faces):
        corners = lattice.red_face_corners(k)
        up, down = lattice.face_qubit(x, y + 1), lattice.face_qubit(x, y - 1)
        right, left = lattice.face_qubit(x + 1, y), lattice.face_qubit(x - 1, y)
        face_letters: Dict[int, str] = {}
        for qubit, letter in ((up, "Y"), (right, "X"), (left, "X"), (down, "Y")):
            if qubit in face_letters:  # L = 2 folds opposite faces together
                del face_letters[qubit]
            else:
                face_letters[qubit] = letter
        corner_letters = {c: "Z" for c in corners}
        stabilizer = PauliString.from_sparse(n, {**corner_letters, **face_letters})
        stabilizers.append(stabilizer)
        order = list(dict.fromkeys(list(corners) + [up, right, left, down]))
        orders.append([q for q in order if q in stabilizer.sparse()])
        loop = None
        for edge in lattice.red_face_edges(k):
            loop = edge_ops[edge.index] if loop is None else multiply(loop, edge_ops[edge.index])
        if not loop.equal_up_to_phase(stabilizer):
            raise PauliError(f"edge loop around red face {k} is {loop}, expected {stabilizer}")
        loops.append(loop.phase)
        faces.append(restrict(stabilizer, range(lattice.num_vertices, n)))
        vertices.append(restrict(stabilizer, range(lattice.num_vertices)))
    reduced = GeneratorSet(stabilizers).reduce()
    face_reduced = GeneratorSet(faces).reduce()
    return DkArtifacts(
        lattice=lattice,
        vertex_ops=vertex_ops,
        edge_ops=edge_ops,
        edge_signs={e: 1 for e in edge_ops},
        stabilizers=stabilizers,
        stabilizer_orders=orders,
        loop_phases=loops,
        face_parts=faces,
        vertex_parts=vertices,
        basis=reduced.kept,
        destabilizers=compute_destabilizers(reduced.generators),
        face_basis=face_reduced.kept,
        face_destabilizers=compute_destabilizers(face_reduced.generators),
    )


def dk_edge_operator(artifacts: DkArtifacts, i: int, j: int, edge: Optional[int] = None) -> PauliString:
    """E_ij with current sign; E_ji = -E_ij"""
    found = artifacts.lattice.edges[edge] if edge is not None else artifacts.lattice.find_edge(i, j)
    if {found.tail, found.head} != {i, j}:
        raise SpecError(f"edge {found.index} does not join {i} and {j}")
    operator = artifacts.edge_ops[found.index]
    return operator if found.tail == i else -operator


def dk_encode(term: Term, artifacts: DkArtifacts) -> EncodedTerm:
    """Encode through vertex and edge operators.

    g_2i g_2j+1 = -E_ij V_j and g_2i+1 g_2j = V_i E_ij, so a horizontal hop
    becomes 1/2 (XX Y_f + YY Y_f) and a vertical one +-1/2 (XX X_f + YY X_f).
    """
    for mode in term.modes:
        if not 0 <= mode < artifacts.lattice.num_vertices:
            raise SpecError(f"mode {mode} is not a lattice vertex")

    def vertex_op(j: int) -> PauliString:
        return artifacts.vertex_ops[j]

    def hop_a(i: int, j: int):
        edge = dk_edge_operator(artifacts, i, j, term.edge)
        return _real(0.5, 3, multiply(edge, artifacts.vertex_ops[j]))

    def hop_b(i: int, j: int):
        edge = dk_edge_operator(artifacts, i, j, term.edge)
        return _real(0.5, 3, multiply(artifacts.vertex_ops[i], edge))

    return _encode_from_bilinears(term, vertex_op, hop_a, hop_b)


def dk_bilinear(artifacts: DkArtifacts, a: int, b: int, edge: Optional[int] = None) -> PauliString:
    """Letters of the Majorana bilinear g_a g_b for equal or adjacent modes (phase dropped)"""
    i, j = a // 2, b // 2
    if i == j:
        if a == b:
            return PauliString.identity(artifacts.num_qubits)
        return artifacts.vertex_ops[i]
    operator = dk_edge_operator(artifacts, i, j, edge)
    if a % 2:
        operator = multiply(artifacts.vertex_ops[i], operator)
    if b % 2:
        operator = multiply(operator, artifacts.vertex_ops[j])
    return operator.unsigned()


def dk_recovery(artifacts: DkArtifacts, syndrome: Sequence[int]) -> PauliString:
    """Recovery for a full per-red-face syndrome of +-1 values"""
    if len(syndrome) != len(artifacts.stabilizers):
        raise PauliError(f"syndrome has {len(syndrome)} entries for {len(artifacts.stabilizers)} stabilizers")
    kept = [syndrome[k] for k in artifacts.basis]
    return recovery_from_syndrome(artifacts.destabilizers, kept, artifacts.num_qubits)


def update_edge_signs(artifacts: DkArtifacts, syndrome: Sequence[int]) -> DkArtifacts:
    """Flip every edge operator that anticommutes with the syndrome's recovery"""
    recovery = dk_recovery(artifacts, syndrome)
    edge_ops = dict(artifacts.edge_ops)
    edge_signs = dict(artifacts.edge_signs)
    for index, operator in artifacts.edge_ops.items():
        if not commutes(operator, recovery):
            edge_ops[index] = -operator
            edge_signs[index] = -edge_signs[index]
    return replace(artifacts, edge_ops=edge_ops, edge_signs=edge_signs)


def dump_operators(artifacts: DkArtifacts) -> str:
    """Text listing of vertex, edge and stabilizer operators"""
    lines = [f"# compact encoding operators L={artifacts.lattice.size}"]
    for j, operator in enumerate(artifacts.vertex_ops):
        lines.append(f"V {j} {_sparse_text(operator)}")
    for edge in artifacts.lattice.edges:
        lines.append(f"E {edge.tail}->{edge.head} {_sparse_text(artifacts.edge_ops[edge.index])}")
    for k, operator in enumerate(artifacts.stabilizers):
        lines.append(f"S {k} {_sparse_text(operator)}")
    return "\n".join(lines) + "\n"


def _sparse_text(operator: PauliString) -> str:
    sign = {0: "+", 1: "+i", 2: "-", 3: "-i"}[operator.phase]
    return sign + " ".join(f"{letter}{q}" for q, letter in operator.sparse().items())
