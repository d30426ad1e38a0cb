# test_gadgets.py

import itertools

import numpy as np
import pytest

from clifford_circuit import CliffordCircuit, count_gates
from conftest import circuit_unitary, equal_up_to_phase, pauli_matrix
from experiment_types import CircuitError
from fermion_encodings import dk_build
from gadgets import (Fragment, apply_pauli, build_logical_rotation, build_mirror, build_native_rotation,
                     build_stab_measurement, cancel_inverse_pairs, inverse_instructions, measure_letters,
                     merge_parallel, prepare_letters)
from lattice import build_lattice
from pauli import PauliString
from tableau import propagate_pauli, reference_sample


def rotation_matrix(pauli, quarter_turns):
    angle = quarter_turns * np.pi / 4
    p = pauli_matrix(pauli)
    return np.cos(angle) * np.eye(len(p)) - 1j * np.sin(angle) * p


@pytest.mark.parametrize("text", ["X", "-Y", "ZZ", "XYZ", "-YIX", "IZY", "XXX"])
@pytest.mark.parametrize("k", [1, 2, 3, -1])
def test_rotation_matches_exponential(text, k):
    pauli = PauliString.from_text(text)
    fragment = build_logical_rotation(pauli, k)
    unitary = circuit_unitary(fragment.instructions(), pauli.num_qubits)
    assert equal_up_to_phase(unitary, rotation_matrix(pauli, k))


def test_rotation_gate_counts():
    pauli = PauliString.from_text("XYXY")
    counts = count_gates(build_logical_rotation(pauli, 1).instructions())
    assert counts.two_qubit == 2 * (4 - 1)
    assert counts.one_qubit == 2 * 4 + 1
    z_only = count_gates(build_logical_rotation(PauliString.from_text("ZZZ"), 3).instructions())
    assert (z_only.two_qubit, z_only.one_qubit) == (4, 1)


def test_full_turn_drops_the_phase_gate():
    fragment = build_logical_rotation(PauliString.from_text("XZ"), 4)
    assert count_gates(fragment.instructions()) == (2, 2)
    assert equal_up_to_phase(circuit_unitary(fragment.instructions(), 2), np.eye(4))
    assert build_logical_rotation(PauliString.from_text("II"), 1).moments == []


@pytest.mark.parametrize("text", ["Y", "-X", "ZZ", "XZ", "XXY", "YYX", "ZZZ", "ZXY", "-XXY", "IZY", "XYZY"])
@pytest.mark.parametrize("k", [1, 2, 3, -1])
def test_native_rotation_matches_exponential(text, k):
    pauli = PauliString.from_text(text)
    fragment = build_native_rotation(pauli, k)
    unitary = circuit_unitary(fragment.instructions(), pauli.num_qubits)
    assert equal_up_to_phase(unitary, rotation_matrix(pauli, k))


def test_native_rotation_gate_counts():
    assert count_gates(build_native_rotation(PauliString.from_text("XXY"), 1).instructions()) == (0, 3)
    assert count_gates(build_native_rotation(PauliString.from_text("XYZY"), 3).instructions()) == (2, 5)
    assert count_gates(build_native_rotation(PauliString.from_text("ZZ"), 1).instructions()) == (0, 1)
    assert count_gates(build_native_rotation(PauliString.from_text("XYZ"), 2).instructions()) == (3, 0)
    assert build_native_rotation(PauliString.from_text("XY"), 4).moments == []


def test_cancel_inverse_pairs_cascades():
    first = build_logical_rotation(PauliString.from_text("XZZ"), 1)
    second = build_logical_rotation(PauliString.from_text("XZZ"), 3)
    assert cancel_inverse_pairs(first + second).moments == []
    shared = (build_logical_rotation(PauliString.from_text("ZZZI"), 1)
              + build_logical_rotation(PauliString.from_text("ZZZZ"), 1))
    reduced = cancel_inverse_pairs(shared)
    assert count_gates(reduced.instructions()) == (2, 6)
    assert equal_up_to_phase(circuit_unitary(reduced.instructions(), 4),
                             circuit_unitary(shared.instructions(), 4))


def test_cancel_inverse_pairs_needs_matching_targets():
    fragment = Fragment([[("CX", (0, 1))], [("CX", (1, 0))], [("S", (2,))], [("H", (2,))], [("S_DAG", (2,))]])
    assert cancel_inverse_pairs(fragment).moments == fragment.moments


def test_mirror_is_identity():
    fragment = (build_logical_rotation(PauliString.from_text("XYZ"), 3)
                + build_logical_rotation(PauliString.from_text("ZIY"), 1))
    mirrored = build_mirror(fragment.instructions())
    assert len(mirrored) == 2 * len(fragment.instructions())
    assert equal_up_to_phase(circuit_unitary(mirrored, 3), np.eye(8))


def test_inverse_rejects_measurements():
    circuit = CliffordCircuit(1)
    circuit.measure([0])
    with pytest.raises(CircuitError):
        inverse_instructions(circuit.instructions)


def test_merge_parallel():
    a = Fragment([[("H", (0,))], [("CX", (0, 1))]])
    b = Fragment([[("H", (2,))]])
    merged = merge_parallel([a, b])
    assert len(merged.moments) == 2
    assert [(i.name, i.targets) for i in merged.instructions()] == [("H", (0, 2)), ("CX", (0, 1))]
    with pytest.raises(CircuitError):
        merge_parallel([a, Fragment([[("X", (1,))]])])


def measurement_circuit(prep_text, stabilizer_text, **options):
    n = len(stabilizer_text.lstrip("+-"))
    circuit = CliffordCircuit(n + 2)
    circuit.append("R", range(n))
    circuit.append("H", range(n))
    if prep_text:
        circuit.append(prep_text[0], [int(prep_text[1:])])
    result = build_stab_measurement(circuit, PauliString.from_text(stabilizer_text), aux=n, **options)
    circuit.detector([result.records[0]])
    return circuit, result


def test_stabilizer_eigenvalue_sign():
    circuit, result = measurement_circuit("", "XXX")
    assert reference_sample(circuit).detectors.tolist() == [False]
    circuit, _ = measurement_circuit("Z0", "XXX")
    assert reference_sample(circuit).detectors.tolist() == [True]


def test_flag_and_repeat_detectors():
    circuit, result = measurement_circuit("", "XXX", flag=4, repeat=True)
    assert len(result.records) == 2
    assert len(result.flag_records) == 2
    assert len(result.detectors) == 3
    assert not reference_sample(circuit).detectors.any()
    _, quiet = measurement_circuit("", "XXX", flag=4, flag_detectors=False)
    assert quiet.detectors == []


def test_bad_measurements_raise():
    circuit = CliffordCircuit(4)
    with pytest.raises(CircuitError):
        build_stab_measurement(circuit, PauliString.from_text("III"), aux=3)
    with pytest.raises(CircuitError):
        build_stab_measurement(circuit, PauliString.from_text("XXI"), aux=1)
    with pytest.raises(CircuitError):
        build_stab_measurement(circuit, PauliString.from_text("XXI"), aux=3, order=[0, 2])


def data_part(pauli, n):
    """Letters on the first n qubits, unsigned"""
    return PauliString.from_bits(pauli.x_bits()[:n], pauli.z_bits()[:n])


def effective_weight(residual, stabilizer):
    return min(residual.weight(), (residual * stabilizer).weight())


def flagged_gadget_faults():
    """Every single X or Y fault on the auxiliary of a flagged weight-8 measurement"""
    artifacts = dk_build(build_lattice(4))
    stabilizer = artifacts.stabilizers[0]
    n = artifacts.num_qubits
    aux, flag = n, n + 1
    circuit = CliffordCircuit(n + 2)
    result = build_stab_measurement(circuit, stabilizer, aux, flag, order=artifacts.stabilizer_orders[0])
    outcomes = []
    for position in range(len(circuit)):
        for letter in "XY":
            fault = PauliString.from_sparse(n + 2, {aux: letter})
            final, flipped = propagate_pauli(circuit.instructions[position + 1:], fault,
                                             first_record=_records_before(circuit, position + 1))
            residual = data_part(final, n)
            outcomes.append((effective_weight(residual, stabilizer),
                             result.flag_records[0] in flipped))
    return outcomes


def _records_before(circuit, index):
    return sum(len(i.targets) for i in circuit.instructions[:index] if i.kind == "measure")


def test_flag_catches_every_high_weight_fault():
    outcomes = flagged_gadget_faults()
    assert any(weight >= 2 for weight, _ in outcomes)
    for weight, flagged in outcomes:
        if weight >= 2:
            assert flagged


def test_unflagged_gadget_spreads_faults():
    artifacts = dk_build(build_lattice(4))
    stabilizer = artifacts.stabilizers[0]
    n = artifacts.num_qubits
    circuit = CliffordCircuit(n + 1)
    build_stab_measurement(circuit, stabilizer, n, order=artifacts.stabilizer_orders[0])
    couplings = [k for k, i in enumerate(circuit.instructions) if i.kind == "gate2"]
    middle = couplings[len(couplings) // 2 - 1]
    final, _ = propagate_pauli(circuit.instructions[middle + 1:], PauliString.from_sparse(n + 1, {n: "X"}))
    residual = data_part(final, n)
    assert effective_weight(residual, stabilizer) >= 2


@pytest.mark.parametrize("letters", [{0: "X", 1: "Y", 2: "Z"}, {0: "+", 1: "i", 2: "0"}])
def test_prepare_and_measure_letters(letters):
    circuit = CliffordCircuit(3)
    prepare_letters(circuit, letters)
    basis = {"+": "X", "i": "Y", "0": "Z"}
    records = measure_letters(circuit, {q: basis.get(c, c) for q, c in letters.items()})
    for record in records.values():
        circuit.detector([record])
    assert not reference_sample(circuit).detectors.any()


def test_apply_pauli_groups_letters():
    circuit = CliffordCircuit(4)
    apply_pauli(circuit, PauliString.from_text("XZXY"))
    assert sorted((i.name, i.targets) for i in circuit.instructions) == [("X", (0, 2)), ("Y", (3,)), ("Z", (1,))]


def test_rotations_act_on_support_only():
    for text in ("XIZ", "IYI"):
        pauli = PauliString.from_text(text)
        assert build_logical_rotation(pauli, 1).qubits() == set(pauli.support())
    assert list(itertools.chain.from_iterable(build_logical_rotation(PauliString.from_text("Z"), 2).moments)) == [("Z", (0,))]
