# test_encodings.py

import itertools

import numpy as np
import pytest

from experiment_types import SpecError, TermKind
from fermion_encodings import (Term, TernaryTree, build_model, build_ternary_tree, dk_bilinear, dk_build,
                               dk_encode, dk_recovery, dump_operators, jw_encode, jw_majoranas, jw_slater_bits,
                               occupation_masks, tt_encode, tt_majoranas, tt_slater_bits, update_edge_signs,
                               vertex_operator)
from lattice import build_lattice
from pauli import PauliString, commutes, gf2_rank, multiply, product, symplectic_rows


@pytest.fixture(scope="module")
def lattice():
    return build_lattice(4)


@pytest.fixture(scope="module")
def artifacts(lattice):
    return dk_build(lattice)


def assert_majorana_algebra(majoranas):
    identity = PauliString.identity(majoranas[0].num_qubits)
    for a, b in itertools.combinations(majoranas, 2):
        assert not commutes(a, b)
    for m in majoranas:
        assert m * m == identity


def test_jw_majoranas_anticommute():
    assert_majorana_algebra(jw_majoranas(6))


def test_tt_majoranas_anticommute():
    assert_majorana_algebra(tt_majoranas(build_ternary_tree(16)))


def test_ternary_tree_paths():
    tree = build_ternary_tree(4)
    assert tree == TernaryTree(4, "node")
    paths = tree.paths()
    assert len(paths) == 9
    assert paths[-1] == {0: "Z", 3: "Z"}
    with pytest.raises(SpecError):
        build_ternary_tree(0)
    with pytest.raises(SpecError):
        build_ternary_tree(4, "random")


def test_consecutive_pairing_uses_lexicographic_strings():
    tree = build_ternary_tree(5, "consecutive")
    majoranas = tt_majoranas(tree)
    assert_majorana_algebra(majoranas)
    assert majoranas == [PauliString.from_sparse(5, path) for path in tree.paths()[:10]]
    assert majoranas != tt_majoranas(build_ternary_tree(5))


def test_single_mode_tree_gives_the_standard_majoranas():
    for pairing in ("node", "consecutive"):
        assert [str(m) for m in tt_majoranas(build_ternary_tree(1, pairing))] == ["+X", "+Y"]


def test_tt_number_term_on_the_four_qubit_tree():
    encoded = tt_encode(Term(TermKind.NUMBER, (0,)), build_ternary_tree(4, "consecutive"))
    assert encoded.constant == 0.5
    assert [(c, str(p)) for c, p in encoded.summands] == [(-0.5, "+IZII")]


def test_tt_vertex_operators_are_z_type():
    majoranas = tt_majoranas(build_ternary_tree(16))
    for j in range(16):
        v = vertex_operator(majoranas, j)
        assert not v.x_bits().any()
        assert v.is_hermitian()


def test_jw_vertex_operator_is_single_z():
    majoranas = jw_majoranas(4)
    assert vertex_operator(majoranas, 2) == PauliString.from_text("IIZI")


def test_model_terms(lattice):
    model = build_model(lattice)
    assert len(model.terms) == 64
    hops = [t for t in model.terms if t.kind == TermKind.HOPPING]
    assert len(hops) == 32
    assert all(t.coefficient == -1.0 for t in hops)
    assert len(model.interactions()) == 32


def test_jw_hopping_carries_z_string():
    encoded = jw_encode(Term(TermKind.HOPPING, (0, 3), -1.0), 4)
    assert encoded.constant == 0.0
    assert [(c, str(p)) for c, p in encoded.summands] == [(0.5, "+XZZX"), (0.5, "+YZZY")]


def test_jw_coulomb_expansion():
    encoded = jw_encode(Term(TermKind.COULOMB, (1, 2), 1.0), 3)
    assert encoded.constant == 0.25
    assert [(c, str(p)) for c, p in encoded.summands] == [(-0.25, "+IZI"), (-0.25, "+IIZ"), (0.25, "+IZZ")]


def test_jw_rejects_bad_modes():
    with pytest.raises(SpecError):
        jw_encode(Term(TermKind.HOPPING, (0, 4), -1.0), 4)
    with pytest.raises(SpecError):
        jw_encode(Term(TermKind.HOPPING, (1, 1), -1.0), 4)


def test_jw_slater_bits_follow_ordering():
    bits = jw_slater_bits([1, 0, 1], ordering=[2, 0, 1])
    assert bits.tolist() == [False, True, True]


def test_tt_slater_bits_reproduce_occupations():
    majoranas = tt_majoranas(build_ternary_tree(16))
    occupations = [(3 * j) % 2 for j in range(16)]
    bits = tt_slater_bits(occupations, majoranas).astype(int)
    for j, mask in enumerate(occupation_masks(majoranas)):
        v = vertex_operator(majoranas, j)
        eigenvalue = v.sign() * (-1) ** int(bits[mask].sum())
        assert eigenvalue == (-1) ** occupations[j]


def bilinear_sets(lattice):
    """Same-mode and edge bilinears as (a, b, edge) index triples"""
    pairs = [(2 * j, 2 * j + 1, None) for j in range(lattice.num_vertices)]
    for edge in lattice.edges:
        for da, db in ((0, 0), (1, 0), (0, 1), (1, 1)):
            pairs.append((2 * edge.tail + da, 2 * edge.head + db, edge.index))
    return pairs


def commutation_matrix(operators):
    return np.array([[commutes(a, b) for b in operators] for a in operators])


def test_encodings_share_the_commutation_structure(lattice, artifacts):
    pairs = bilinear_sets(lattice)
    jw = jw_majoranas(16)
    tt = tt_majoranas(build_ternary_tree(16))
    jw_ops = [multiply(jw[a], jw[b]) for a, b, _ in pairs]
    tt_ops = [multiply(tt[a], tt[b]) for a, b, _ in pairs]
    dk_ops = [dk_bilinear(artifacts, a, b, edge) for a, b, edge in pairs]
    reference = commutation_matrix(jw_ops)
    assert np.array_equal(commutation_matrix(tt_ops), reference)
    assert np.array_equal(commutation_matrix(dk_ops), reference)


def test_dk_stabilizers(lattice, artifacts):
    stabilizers = artifacts.stabilizers
    assert len(stabilizers) == 8
    assert all(s.weight() == 8 for s in stabilizers)
    for a, b in itertools.combinations(stabilizers, 2):
        assert commutes(a, b)
    for s in stabilizers:
        assert all(commutes(s, e) for e in artifacts.edge_ops.values())
        assert all(commutes(s, v) for v in artifacts.vertex_ops)


def test_dk_vertex_edge_pattern(lattice, artifacts):
    for edge in lattice.edges:
        operator = artifacts.edge_ops[edge.index]
        for v, vertex_op in enumerate(artifacts.vertex_ops):
            assert commutes(operator, vertex_op) == (v not in (edge.tail, edge.head))


def test_dk_face_product_identity(artifacts):
    total = product(artifacts.stabilizers)
    assert total.weight() == 0
    assert len(artifacts.basis) == gf2_rank(symplectic_rows(artifacts.stabilizers))
    assert len(artifacts.basis) < len(artifacts.stabilizers)


def test_dk_destabilizers_pair_with_basis(artifacts):
    for i, d in enumerate(artifacts.destabilizers):
        for j, k in enumerate(artifacts.basis):
            assert commutes(d, artifacts.stabilizers[k]) == (i != j)


def test_dk_encode_hopping_weights(lattice, artifacts):
    model = build_model(lattice)
    for term in model.terms:
        encoded = dk_encode(term, artifacts)
        if term.kind == TermKind.HOPPING:
            assert encoded.constant == 0.0
            assert [p.weight() for _, p in encoded.summands] == [3, 3]
        else:
            assert [p.weight() for _, p in encoded.summands] == [1, 1, 2]


def test_dk_encode_rejects_non_vertex_mode(artifacts):
    with pytest.raises(SpecError):
        dk_encode(Term(TermKind.NUMBER, (99,), 1.0), artifacts)


def test_recovery_and_edge_sign_update(artifacts):
    syndrome = [1] * len(artifacts.stabilizers)
    assert update_edge_signs(artifacts, syndrome).edge_signs == artifacts.edge_signs
    flipped_face = artifacts.basis[0]
    syndrome[flipped_face] = -1
    recovery = dk_recovery(artifacts, syndrome)
    assert not commutes(recovery, artifacts.stabilizers[flipped_face])
    for k in artifacts.basis[1:]:
        assert commutes(recovery, artifacts.stabilizers[k])
    updated = update_edge_signs(artifacts, syndrome)
    for index, operator in artifacts.edge_ops.items():
        expected = 1 if commutes(operator, recovery) else -1
        assert updated.edge_signs[index] == expected
        assert updated.edge_ops[index] == (operator if expected == 1 else -operator)
    assert artifacts.edge_signs == {e: 1 for e in artifacts.edge_ops}


def test_operator_dump(artifacts):
    lines = dump_operators(artifacts).splitlines()
    assert len(lines) == 1 + 16 + 32 + 8
    assert lines[1].startswith("V 0 ")
