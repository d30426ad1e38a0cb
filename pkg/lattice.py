# lattice.py - Periodic square lattice with oriented edges and two-coloured faces

from dataclasses import dataclass, field
from typing import Dict, List, Tuple

from experiment_types import SpecError

# Edge colour classes, one edge of each red face
BOTTOM, RIGHT, TOP, LEFT = range(4)
COLOR_NAMES = ("bottom", "right", "top", "left")


@dataclass(frozen=True)
class Edge:
    index: int
    tail: int  # orientation points from tail to head
    head: int
    horizontal: bool
    direction: str  # "right", "left", "up" or "down"
    face: int  # qubit of the blue face bordering the edge


@dataclass
class Lattice:
    """L x L periodic lattice; vertex (x, y) is qubit y*L + x.

    Face (x, y) has corners (x, y) to (x+1, y+1) and is blue when
    (x + y) % 2 == blue_parity. Blue faces carry the auxiliary qubits,
    numbered row-major after the vertices. Horizontal edges point right in
    even rows, vertical edges point up when (x + blue_parity) is even.
    """
    size: int
    blue_parity: int = 0
    edges: List[Edge] = field(default_factory=list)
    face_qubits: Dict[Tuple[int, int], int] = field(default_factory=dict)
    red_faces: List[Tuple[int, int]] = field(default_factory=list)

    @property
    def num_vertices(self) -> int:
        return self.size * self.size

    @property
    def num_blue_faces(self) -> int:
        return len(self.face_qubits)

    @property
    def num_qubits(self) -> int:
        return self.num_vertices + self.num_blue_faces

    def vertex(self, x: int, y: int) -> int:
        return (y % self.size) * self.size + (x % self.size)

    def coords(self, vertex: int) -> Tuple[int, int]:
        return vertex % self.size, vertex // self.size

    def is_blue(self, x: int, y: int) -> bool:
        return ((x % self.size) + (y % self.size)) % 2 == self.blue_parity

    def face_qubit(self, x: int, y: int) -> int:
        return self.face_qubits[(x % self.size, y % self.size)]

    def face_coords(self, qubit: int) -> Tuple[int, int]:
        for coords, q in self.face_qubits.items():
            if q == qubit:
                return coords
        raise SpecError(f"qubit {qubit} is not a face qubit")

    def horizontal_edge(self, x: int, y: int) -> Edge:
        """Edge between (x, y) and (x+1, y)"""
        return self.edges[(y % self.size) * self.size + (x % self.size)]

    def vertical_edge(self, x: int, y: int) -> Edge:
        """Edge between (x, y) and (x, y+1)"""
        return self.edges[self.num_vertices + (y % self.size) * self.size + (x % self.size)]

    def find_edge(self, a: int, b: int) -> Edge:
        """The edge joining two vertices (unique for L >= 4)"""
        for edge in self.edges:
            if {edge.tail, edge.head} == {a, b}:
                return edge
        raise SpecError(f"vertices {a} and {b} are not adjacent")

    def red_face_corners(self, k: int) -> Tuple[int, int, int, int]:
        """Corners of red face k clockwise from the upper-left"""
        x, y = self.red_faces[k]
        return (self.vertex(x, y + 1), self.vertex(x + 1, y + 1),
                self.vertex(x + 1, y), self.vertex(x, y))

    def red_face_edges(self, k: int) -> Tuple[Edge, Edge, Edge, Edge]:
        """(bottom, right, top, left) edges of red face k"""
        x, y = self.red_faces[k]
        return (self.horizontal_edge(x, y), self.vertical_edge(x + 1, y),
                self.horizontal_edge(x, y + 1), self.vertical_edge(x, y))

    def color_class(self, color: int) -> List[Edge]:
        """One edge per red face, all on the same side; supports are disjoint"""
        if not 0 <= color < 4:
            raise SpecError(f"edge colour must be 0..3, got {color}")
        return [self.red_face_edges(k)[color] for k in range(len(self.red_faces))]

    def neighbors(self, vertex: int) -> List[int]:
        x, y = self.coords(vertex)
        return [self.vertex(x + 1, y), self.vertex(x - 1, y), self.vertex(x, y + 1), self.vertex(x, y - 1)]


def build_lattice(size: int, blue_parity: int = 0) -> Lattice:
    if size < 2 or size % 2:
        raise SpecError(f"lattice size must be even and at least 2, got {size}")
    if blue_parity not in (0, 1):
        raise SpecError(f"colour parity must be 0 or 1, got {blue_parity}")
    lattice = Lattice(size, blue_parity)
    next_qubit = size * size
    for y in range(size):
        for x in range(size):
            if lattice.is_blue(x, y):
                lattice.face_qubits[(x, y)] = next_qubit
                next_qubit += 1
            else:
                lattice.red_faces.append((x, y))

    def blue_of(*faces: Tuple[int, int]) -> int:
        for fx, fy in faces:
            if lattice.is_blue(fx, fy):
                return lattice.face_qubit(fx, fy)
        raise SpecError("edge without a blue face")

    for y in range(size):
        for x in range(size):
            a, b = lattice.vertex(x, y), lattice.vertex(x + 1, y)
            right = y % 2 == 0
            lattice.edges.append(Edge(len(lattice.edges), a if right else b, b if right else a, True,
                                      "right" if right else "left", blue_of((x, y), (x, y - 1))))
    for y in range(size):
        for x in range(size):
            a, b = lattice.vertex(x, y), lattice.vertex(x, y + 1)
            up = (x + blue_parity) % 2 == 0
            lattice.edges.append(Edge(len(lattice.edges), a if up else b, b if up else a, False,
                                      "up" if up else "down", blue_of((x, y), (x - 1, y))))
    return lattice


def snake_order(lattice: Lattice) -> List[int]:
    """Line position of every vertex: even rows left to right, odd rows reversed"""
    size = lattice.size
    order = [0] * lattice.num_vertices
    for y in range(size):
        for x in range(size):
            column = x if y % 2 == 0 else size - 1 - x
            order[lattice.vertex(x, y)] = y * size + column
    return order


def dump_lattice(lattice: Lattice) -> str:
    """Text table of qubits and oriented edges"""
    lines = [f"# lattice L={lattice.size} blue_parity={lattice.blue_parity}",
             "qubit kind x y"]
    for v in range(lattice.num_vertices):
        x, y = lattice.coords(v)
        lines.append(f"{v} vertex {x} {y}")
    for (x, y), q in sorted(lattice.face_qubits.items(), key=lambda item: item[1]):
        lines.append(f"{q} face {x} {y}")
    lines.append("edge tail head direction face")
    for edge in lattice.edges:
        lines.append(f"{edge.index} {edge.tail} {edge.head} {edge.direction} {edge.face}")
    return "\n".join(lines) + "\n"
