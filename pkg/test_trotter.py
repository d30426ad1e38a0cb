# test_trotter.py

from collections import Counter

import numpy as np
import pytest

from clifford_circuit import CliffordCircuit, count_gates
from conftest import GATE_MATRICES, circuit_unitary, equal_up_to_phase, pauli_matrix
from experiment import (REFERENCE_GATE_COUNTS, REFERENCE_TOLERANCE, assemble_experiment, build_context,
                        within_reference)
from experiment_types import CircuitKind, CircuitSpec, Encoding, ExperimentSpec, Mitigation, SpecError, TermKind
from fermion_encodings import Term
from gadgets import Fragment, build_mirror
from lattice import snake_order
from pauli import PauliString
from tableau import reference_sample
from trotter import (bond_comparator, build_random_logical, build_swap_network_jw, build_trotter_dk,
                     build_trotter_sequential, build_trotter_tt, greedy_layers, quarter_turns,
                     random_term_count, sample_terms)


@pytest.fixture(scope="module")
def contexts():
    return {encoding: build_context(encoding, 4) for encoding in Encoding}


def trotter(ctx, steps):
    if ctx.encoding == Encoding.DK:
        return build_trotter_dk(ctx.model, ctx.artifacts, steps, 3)
    if ctx.encoding == Encoding.JW:
        return build_swap_network_jw(ctx.model, steps, 3)[0]
    return build_trotter_tt(ctx.model, ctx.tree, steps, 3)


def two_qubit_gates(fragment):
    return count_gates(fragment.instructions()).two_qubit


def test_quarter_turns_follow_the_coefficient_sign():
    assert quarter_turns(0.5, 3) == 3
    assert quarter_turns(-1.0, 3) == -3
    assert quarter_turns(0.0, 3) == 0


def test_greedy_layers():
    assert greedy_layers([{0, 1}, {1, 2}, {2, 3}]) == [[0, 2], [1]]
    assert greedy_layers([]) == []


@pytest.mark.parametrize("encoding", list(Encoding))
def test_zero_steps_is_empty(contexts, encoding):
    assert trotter(contexts[encoding], 0).moments == []


@pytest.mark.parametrize("encoding", list(Encoding))
def test_negative_steps_raise(contexts, encoding):
    with pytest.raises(SpecError):
        trotter(contexts[encoding], -1)


@pytest.mark.parametrize("encoding", list(Encoding))
def test_gate_count_grows_linearly(contexts, encoding):
    one = count_gates(trotter(contexts[encoding], 1).instructions())
    two = count_gates(trotter(contexts[encoding], 2).instructions())
    assert two == (2 * one.one_qubit, 2 * one.two_qubit)


BAND_CASES = [(Encoding.JW, Mitigation.GP), (Encoding.DK, Mitigation.SR), (Encoding.TT, Mitigation.NONE)]


@pytest.mark.parametrize("encoding, mitigation", BAND_CASES)
@pytest.mark.parametrize("steps", [2, 4])
def test_gate_counts_stay_near_the_reference(encoding, mitigation, steps):
    experiment = assemble_experiment(ExperimentSpec(encoding, 4, CircuitSpec(CircuitKind.FULL_TROTTER, steps),
                                                    mitigation=mitigation))
    reference = sum(REFERENCE_GATE_COUNTS[(encoding, steps)])
    total = experiment.gate_counts.total
    assert (1 - REFERENCE_TOLERANCE) * reference <= total <= (1 + REFERENCE_TOLERANCE) * reference
    assert within_reference(experiment)


def test_two_qubit_cost_ordering(contexts):
    counts = {encoding: two_qubit_gates(trotter(contexts[encoding], 1)) for encoding in Encoding}
    assert counts[Encoding.TT] > counts[Encoding.DK] > counts[Encoding.JW]
    assert counts[Encoding.JW] == 120
    assert counts[Encoding.DK] == 224


@pytest.mark.parametrize("encoding", list(Encoding))
def test_moments_touch_each_qubit_once(contexts, encoding):
    for moment in trotter(contexts[encoding], 1).moments:
        qubits = [q for _, targets in moment for q in targets]
        assert len(qubits) == len(set(qubits))


def test_swap_network_reverses_the_line(contexts):
    ctx = contexts[Encoding.JW]
    snake = snake_order(ctx.lattice)
    n = ctx.model.num_modes
    _, after_one = build_swap_network_jw(ctx.model, 1, 3)
    assert after_one == [n - 1 - position for position in snake]
    _, after_two = build_swap_network_jw(ctx.model, 2, 3)
    assert after_two == snake


def comparator_unitary(hopping, coulomb, angle):
    """FSWAP after the exact hopping, ZZ and single-Z rotations of one bond"""
    kh = quarter_turns(hopping * 0.5, angle)
    kz = quarter_turns(coulomb * 0.25, angle)
    ks = quarter_turns(-coulomb * 0.25, angle)
    unitary = np.eye(4, dtype=complex)
    for text, k in (("XX", kh), ("YY", kh), ("ZZ", kz), ("ZI", ks), ("IZ", ks)):
        theta = k * np.pi / 4
        unitary = (np.cos(theta) * np.eye(4) - 1j * np.sin(theta) * pauli_matrix(PauliString.from_text(text))) @ unitary
    return GATE_MATRICES["CZ"] @ GATE_MATRICES["SWAP"] @ unitary


@pytest.mark.parametrize("angle", [1, 2, 3])
@pytest.mark.parametrize("hopping, coulomb", [(-1.0, 1.0), (1.0, 1.0), (-1.0, -2.0), (-1.0, 0.0), (0.0, 1.0)])
def test_bond_comparator_is_exact(angle, hopping, coulomb):
    terms = [Term(TermKind.HOPPING, (0, 1), hopping), Term(TermKind.COULOMB, (0, 1), coulomb)]
    fragment = Fragment(bond_comparator(0, 1, terms, angle))
    assert equal_up_to_phase(circuit_unitary(fragment.instructions(), 2), comparator_unitary(hopping, coulomb, angle))


def test_default_comparator_is_a_single_gate():
    terms = [Term(TermKind.HOPPING, (0, 1), -1.0), Term(TermKind.COULOMB, (0, 1), 1.0)]
    assert bond_comparator(0, 1, terms, 3) == [[("SQRT_ZZ_DAG", (0, 1))]]
    assert bond_comparator(4, 5, [], 3) == [[("SWAPCZ", (4, 5))]]


def test_random_term_count(contexts):
    model = contexts[Encoding.JW].model
    assert random_term_count(model, 1.0) == 64
    assert random_term_count(model, 2.0) == 128
    assert random_term_count(model, 0.5) == 32
    assert random_term_count(model, 0.2) == 12
    assert random_term_count(model, 0.0) == 0
    with pytest.raises(SpecError):
        random_term_count(model, 2.5)


def test_sample_terms_is_seeded(contexts):
    model = contexts[Encoding.JW].model
    assert sample_terms(model, 0.5, 11) == sample_terms(model, 0.5, 11)
    assert sample_terms(model, 0.5, 11) != sample_terms(model, 0.5, 12)
    assert len(set(map(id, sample_terms(model, 1.0, 3)))) == 64
    twice = sample_terms(model, 2.0, 3)
    assert len(twice) == 128
    assert max(Counter(map(id, twice)).values()) == 2


@pytest.mark.parametrize("encoding", [Encoding.DK, Encoding.TT])
def test_full_fraction_costs_one_trotter_step(contexts, encoding):
    ctx = contexts[encoding]
    random = build_random_logical(ctx.model, ctx.encode, 1.0, 5, 3)
    sequential = build_trotter_sequential(ctx.model, ctx.encode, 1, 3)
    assert count_gates(random.instructions()) == count_gates(sequential.instructions())


@pytest.mark.parametrize("encoding", list(Encoding))
def test_mirror_returns_to_the_start(contexts, encoding):
    ctx = contexts[encoding]
    circuit = CliffordCircuit(ctx.num_data)
    circuit.append("R", range(ctx.num_data))
    circuit.extend(build_mirror(trotter(ctx, 1).instructions()))
    for record in circuit.measure(range(ctx.num_data)):
        circuit.detector([record])
    assert not reference_sample(circuit).detectors.any()
