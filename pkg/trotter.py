# trotter.py - Trotter schedules and random logical circuits for each encoding

from typing import Callable, Dict, List, Optional, Sequence, Set, Tuple

import numpy as np

from fermion_encodings import (DkArtifacts, EncodedTerm, FermiHubbardModel, Term, TernaryTree, dk_encode,
                               encode_with_majoranas, tt_majoranas)
from experiment_types import SpecError, TermKind
from gadgets import (Fragment, Moment, build_logical_rotation, build_native_rotation, cancel_inverse_pairs,
                     merge_parallel)
from lattice import snake_order
from pauli import PauliString

Encoder = Callable[[Term], EncodedTerm]

MAX_RANDOM_FRACTION = 2.0
_PHASE_GATES = {1: "S", 2: "Z", 3: "S_DAG"}


def quarter_turns(coefficient: float, angle_quarters: int) -> int:
    """Signed rotation angle in units of pi/4; 0 for a vanishing coefficient"""
    if coefficient == 0:
        return 0
    return angle_quarters if coefficient > 0 else -angle_quarters


def _check_steps(steps: int) -> None:
    if steps < 0:
        raise SpecError(f"Trotter steps must be non-negative, got {steps}")


def summand_rotations(encoded: EncodedTerm, angle_quarters: int) -> List[Fragment]:
    """One rotation per Pauli summand, the constant part is a global phase"""
    out = []
    for coefficient, pauli in encoded.summands:
        k = quarter_turns(encoded.term.coefficient * coefficient, angle_quarters)
        if k % 4:
            out.append(build_logical_rotation(pauli, k))
    return out


def greedy_layers(supports: Sequence[Set[int]]) -> List[List[int]]:
    """First-fit colouring by index: items sharing a qubit never share a layer"""
    layers: List[List[int]] = []
    used: List[Set[int]] = []
    for index, support in enumerate(supports):
        for layer, qubits in zip(layers, used):
            if not qubits & support:
                layer.append(index)
                qubits |= support
                break
        else:
            layers.append([index])
            used.append(set(support))
    return layers


def _parallel_rotations(paulis: Sequence[Tuple[PauliString, int]]) -> Fragment:
    """Rotations packed into greedy layers of disjoint supports"""
    layers = greedy_layers([set(p.support()) for p, _ in paulis])
    fragment = Fragment()
    for layer in layers:
        fragment = fragment + merge_parallel(build_native_rotation(*paulis[i]) for i in layer)
    return fragment


def _single_mode_parts(model: FermiHubbardModel, encode: Encoder) -> Dict[str, Tuple[PauliString, float]]:
    """Coulomb single-mode summands summed per operator"""
    totals: Dict[str, float] = {}
    operators: Dict[str, PauliString] = {}
    for term in model.terms:
        if term.kind != TermKind.COULOMB:
            continue
        for coefficient, pauli in encode(term).summands:
            if pauli.weight() == 1:
                key = str(pauli)
                totals[key] = totals.get(key, 0.0) + term.coefficient * coefficient
                operators[key] = pauli
    return {key: (operators[key], total) for key, total in totals.items()}


def build_trotter_dk(model: FermiHubbardModel, artifacts: DkArtifacts, steps: int,
                     angle_quarters: int) -> Fragment:
    """Parallel Trotter steps in the compact encoding.

    Per step: Coulomb ZZ rotations in disjoint layers, one aggregated Z
    rotation per mode, then hopping edges coloured by their (tail, head,
    face) support with the two halves of each colour run as two layers.
    Every rotation uses the native two-qubit gate set.
    """
    _check_steps(steps)

    def encode(term: Term) -> EncodedTerm:
        return dk_encode(term, artifacts)

    coulomb: List[Tuple[PauliString, int]] = []
    hops: List[EncodedTerm] = []
    for term in model.terms:
        encoded = encode(term)
        if term.kind == TermKind.COULOMB:
            for coefficient, pauli in encoded.summands:
                k = quarter_turns(term.coefficient * coefficient, angle_quarters)
                if pauli.weight() == 2 and k % 4:
                    coulomb.append((pauli, k))
        elif term.kind == TermKind.HOPPING:
            hops.append(encoded)
    singles = [(pauli, quarter_turns(total, angle_quarters))
               for pauli, total in _single_mode_parts(model, encode).values()]
    singles = [(pauli, k) for pauli, k in singles if k % 4]

    step = _parallel_rotations(coulomb)
    if singles:
        step = step + merge_parallel(build_native_rotation(p, k) for p, k in singles)
    supports = [set().union(*(p.support() for _, p in encoded.summands)) for encoded in hops]
    for colour in greedy_layers(supports):
        for half in (0, 1):
            fragments = []
            for index in colour:
                coefficient, pauli = hops[index].summands[half]
                k = quarter_turns(hops[index].term.coefficient * coefficient, angle_quarters)
                if k % 4:
                    fragments.append(build_native_rotation(pauli, k))
            step = step + merge_parallel(fragments)
    return Fragment([moment for _ in range(steps) for moment in step.moments])


def fermionic_swap(p: int, q: int) -> List[Moment]:
    """Exchange two line-adjacent Jordan-Wigner modes: SWAP then CZ as one gate"""
    return [[("SWAPCZ", (p, q))]]


def bond_comparator(p: int, q: int, terms: Sequence[Term], angle_quarters: int) -> List[Moment]:
    """Hopping and Coulomb terms of one bond followed by the fermionic swap.

    The modes sit at adjacent positions p and q. At Clifford angles the
    hopping rotation merges with the swap: an odd number of quarter turns
    leaves only a phase gate on both qubits, an even one a Z on both.
    Coulomb ZZ runs as one SQRT_ZZ gate and its single-mode parts join the
    shared phase.
    """
    kh = kz = power = 0
    for term in terms:
        if term.kind == TermKind.HOPPING:
            kh += quarter_turns(term.coefficient * 0.5, angle_quarters)
        elif term.kind == TermKind.COULOMB:
            kz += quarter_turns(term.coefficient * 0.25, angle_quarters)
            power += quarter_turns(-term.coefficient * 0.25, angle_quarters)
    moments: List[Moment] = []
    if kz % 4 in (1, 3):
        moments.append([("SQRT_ZZ" if kz % 4 == 1 else "SQRT_ZZ_DAG", (p, q))])
    if kh % 2 == 0:
        moments.extend(fermionic_swap(p, q))
    power = (power - kh + (2 if kz % 4 == 2 else 0)) % 4
    if power:
        moments.append([(_PHASE_GATES[power], (p,)), (_PHASE_GATES[power], (q,))])
    return moments


def build_swap_network_jw(model: FermiHubbardModel, steps: int,
                          angle_quarters: int) -> Tuple[Fragment, List[int]]:
    """Swap-network Trotter steps in the Jordan-Wigner encoding.

    Modes start in snake order. Each step is one full reversal of the line:
    L*L odd-even brickwork layers in which every comparator applies the
    bond's terms (when the two modes share a bond) and swaps the modes.
    Number terms run as a Z layer before the reversal. Returns the fragment
    and the final line position of every mode.
    """
    _check_steps(steps)
    n = model.num_modes
    ordering = snake_order(model.lattice)
    bonds: Dict[frozenset, List[Term]] = {}
    numbers: Dict[int, float] = {}
    for term in model.terms:
        if term.kind == TermKind.NUMBER:
            numbers[term.modes[0]] = numbers.get(term.modes[0], 0.0) + term.coefficient
        else:
            bonds.setdefault(frozenset(term.modes), []).append(term)

    fragment = Fragment()
    for _ in range(steps):
        layer: Moment = []
        for mode, total in sorted(numbers.items()):
            power = quarter_turns(-0.5 * total, angle_quarters) % 4
            if power:
                layer.append((_PHASE_GATES[power], (ordering[mode],)))
        if layer:
            fragment = fragment + Fragment([layer])
        mode_at = {position: mode for mode, position in enumerate(ordering)}
        for row in range(n):
            pieces = []
            for p in range(row % 2, n - 1, 2):
                a, b = mode_at[p], mode_at[p + 1]
                pieces.append(Fragment(bond_comparator(p, p + 1, bonds.get(frozenset((a, b)), []),
                                                       angle_quarters)))
                mode_at[p], mode_at[p + 1] = b, a
                ordering[a], ordering[b] = p + 1, p
            fragment = fragment + merge_parallel(pieces)
    return fragment, ordering


def build_trotter_sequential(model: FermiHubbardModel, encode: Encoder, steps: int,
                             angle_quarters: int) -> Fragment:
    """Every encoded term rotated one after another, no scheduling"""
    _check_steps(steps)
    step = Fragment()
    for term in model.terms:
        for rotation in summand_rotations(encode(term), angle_quarters):
            step = step + rotation
    return Fragment([moment for _ in range(steps) for moment in step.moments])


def random_interaction_count(model: FermiHubbardModel, fraction: float) -> int:
    """Bonds drawn for a depth fraction of one full Trotter step (up to 2 steps)"""
    if not 0 <= fraction <= MAX_RANDOM_FRACTION:
        raise SpecError(f"random circuit fraction must lie in [0, {MAX_RANDOM_FRACTION:g}], got {fraction}")
    return int(np.floor(fraction * len(model.interactions()) + 1e-9))


def random_term_count(model: FermiHubbardModel, fraction: float) -> int:
    """Hamiltonian terms in a random circuit; fraction 1 covers every term once"""
    return 2 * random_interaction_count(model, fraction)


def sample_terms(model: FermiHubbardModel, fraction: float, seed: int) -> List[Term]:
    """Seeded draw of bonds in passes, no bond repeats within a pass.

    Each drawn bond contributes its hopping term followed by its Coulomb term.
    """
    interactions = model.interactions()
    count = random_interaction_count(model, fraction)
    rng = np.random.default_rng(seed)
    picks: List[int] = []
    while len(picks) < count:
        picks.extend(int(i) for i in rng.permutation(len(interactions))[:count - len(picks)])
    return [term for i in picks for term in interactions[i]]


def build_random_logical(model: FermiHubbardModel, encode: Encoder, fraction: float, seed: int,
                         angle_quarters: int, terms: Optional[Sequence[Term]] = None) -> Fragment:
    terms = sample_terms(model, fraction, seed) if terms is None else terms
    fragment = Fragment()
    for term in terms:
        for rotation in summand_rotations(encode(term), angle_quarters):
            fragment = fragment + rotation
    return fragment


def build_trotter_tt(model: FermiHubbardModel, tree: TernaryTree, steps: int,
                     angle_quarters: int) -> Fragment:
    """Ternary-tree Trotter steps emitted term by term.

    Consecutive rotations share long CX ladders; gates meeting their own
    inverse are removed afterwards.
    """
    majoranas = tt_majoranas(tree)
    sequential = build_trotter_sequential(model, lambda term: encode_with_majoranas(term, majoranas),
                                          steps, angle_quarters)
    return cancel_inverse_pairs(sequential)
