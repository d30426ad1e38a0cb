# test_lattice.py

import pytest

from experiment_types import SpecError
from lattice import build_lattice, dump_lattice, snake_order


def test_counts_for_four_by_four():
    lattice = build_lattice(4)
    assert lattice.num_vertices == 16
    assert lattice.num_blue_faces == 8
    assert lattice.num_qubits == 24
    assert len(lattice.edges) == 32
    assert len(lattice.red_faces) == 8
    assert sorted(lattice.face_qubits.values()) == list(range(16, 24))


@pytest.mark.parametrize("size", [0, 1, 3, 5])
def test_odd_or_tiny_sizes_rejected(size):
    with pytest.raises(SpecError):
        build_lattice(size)


def test_bad_colour_parity_rejected():
    with pytest.raises(SpecError):
        build_lattice(4, blue_parity=2)


def test_every_vertex_has_four_neighbours():
    lattice = build_lattice(4)
    degree = [0] * lattice.num_vertices
    for edge in lattice.edges:
        degree[edge.tail] += 1
        degree[edge.head] += 1
    assert degree == [4] * 16


def test_edge_orientation():
    lattice = build_lattice(4)
    first = lattice.horizontal_edge(0, 0)
    assert (first.tail, first.head, first.direction) == (0, 1, "right")
    odd_row = lattice.horizontal_edge(0, 1)
    assert (odd_row.tail, odd_row.head, odd_row.direction) == (5, 4, "left")
    up = lattice.vertical_edge(0, 0)
    assert (up.tail, up.head, up.direction) == (0, 4, "up")
    down = lattice.vertical_edge(1, 0)
    assert (down.tail, down.head, down.direction) == (5, 1, "down")


def test_edges_border_a_blue_face():
    lattice = build_lattice(4)
    blue = set(lattice.face_qubits.values())
    assert all(edge.face in blue for edge in lattice.edges)


@pytest.mark.parametrize("color", range(4))
def test_colour_classes_have_disjoint_supports(color):
    lattice = build_lattice(4)
    edges = lattice.color_class(color)
    assert len(edges) == len(lattice.red_faces)
    used = set()
    for edge in edges:
        support = {edge.tail, edge.head, edge.face}
        assert not used & support
        used |= support


def test_bad_colour_raises():
    with pytest.raises(SpecError):
        build_lattice(4).color_class(4)


def test_red_face_corners_are_distinct():
    lattice = build_lattice(4)
    for k in range(len(lattice.red_faces)):
        assert len(set(lattice.red_face_corners(k))) == 4


def test_find_edge():
    lattice = build_lattice(4)
    assert lattice.find_edge(1, 0).index == 0
    with pytest.raises(SpecError):
        lattice.find_edge(0, 5)


def test_snake_order_reverses_odd_rows():
    lattice = build_lattice(4)
    order = snake_order(lattice)
    assert sorted(order) == list(range(16))
    assert order[lattice.vertex(0, 1)] == 7
    assert order[lattice.vertex(3, 1)] == 4
    assert order[lattice.vertex(2, 2)] == 10


def test_dump_lists_every_qubit_and_edge():
    text = dump_lattice(build_lattice(4))
    lines = text.splitlines()
    assert lines[0].startswith("# lattice L=4")
    assert len(lines) == 2 + 24 + 1 + 32
