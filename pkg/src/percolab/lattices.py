"""Transitive lattice families and finite balls around a root vertex.

Three families are supported: the hypercubic lattice in d dimensions, the
triangular lattice (axial coordinates with six generator offsets), and the
regular tree.  All are connected, locally finite and vertex-transitive.

A ``GraphBall`` is the induced subgraph on all vertices within a given graph
distance of the origin.  Vertices are indexed by (distance, coordinates)
lexicographically and edges by their sorted endpoint index pair, so the
indexing is deterministic and a ball of radius n is a prefix of the ball of
radius n+1 under the same convention.  Edges with one endpoint outside the
ball are excluded, so boundary vertices have reduced degree.
"""

from collections import deque
from dataclasses import dataclass

from .errors import CapExceeded

HYPERCUBIC = "hypercubic"
TRIANGULAR = "triangular"
REGULAR_TREE = "regular_tree"

# Coordinate stride used by the integer key encodings below.  Coordinates
# must stay below _KEY_M/2 in absolute value, which bounds cluster caps.
_KEY_M = 1 << 22
_KEY_HALF = _KEY_M >> 1

_TRI_OFFSETS = ((1, 0), (-1, 0), (0, 1), (0, -1), (1, -1), (-1, 1))

DEFAULT_MAX_BALL_VERTICES = 2_000_000


@dataclass(frozen=True)
class LatticeSpec:
    """Which transitive lattice to work on.

    family: one of "hypercubic", "triangular", "regular_tree".
    dimension: number of axes, hypercubic only (>= 1).
    tree_degree: vertex degree, regular tree only (>= 2).
    """

    family: str
    dimension: int = 0
    tree_degree: int = 0

    def __post_init__(self):
        if self.family == HYPERCUBIC:
            if self.dimension < 1:
                raise ValueError("hypercubic lattice needs dimension >= 1")
        elif self.family == TRIANGULAR:
            pass
        elif self.family == REGULAR_TREE:
            if self.tree_degree < 2:
                raise ValueError("regular tree needs degree >= 2")
        else:
            raise ValueError(f"unknown lattice family: {self.family!r}")

    @classmethod
    def hypercubic(cls, d: int) -> "LatticeSpec":
        return cls(HYPERCUBIC, dimension=d)

    @classmethod
    def triangular(cls) -> "LatticeSpec":
        return cls(TRIANGULAR)

    @classmethod
    def regular_tree(cls, degree: int) -> "LatticeSpec":
        return cls(REGULAR_TREE, tree_degree=degree)

    @property
    def degree(self) -> int:
        """Common vertex degree of the lattice."""
        if self.family == HYPERCUBIC:
            return 2 * self.dimension
        if self.family == TRIANGULAR:
            return 6
        return self.tree_degree

    @property
    def origin(self) -> tuple:
        if self.family == HYPERCUBIC:
            return (0,) * self.dimension
        if self.family == TRIANGULAR:
            return (0, 0)
        return ()


def lazy_neighbors(spec: LatticeSpec, v: tuple) -> list:
    """All lattice neighbors of the vertex with coordinates ``v``.

    Pure and symmetric: w in lazy_neighbors(v) iff v in lazy_neighbors(w).
    The result has exactly ``spec.degree`` entries.
    """
    if spec.family == HYPERCUBIC:
        out = []
        for i in range(spec.dimension):
            for step in (1, -1):
                w = list(v)
                w[i] += step
                out.append(tuple(w))
        return out
    if spec.family == TRIANGULAR:
        a, b = v
        return [(a + da, b + db) for da, db in _TRI_OFFSETS]
    # Regular tree: vertices are tuples of child indices, root is ().
    r = spec.tree_degree
    if v == ():
        return [(i,) for i in range(r)]
    return [v[:-1]] + [v + (i,) for i in range(r - 1)]


class GraphBall:
    """Finite ball of a lattice: all vertices within ``radius`` of the origin.

    Attributes:
        spec: the lattice family.
        radius: ball radius in graph distance.
        vertices: coordinate tuples, sorted by (distance, coordinates).
        edges: (i, j) vertex-index pairs with i < j, sorted; both endpoints
            always lie in the ball.
        origin: index of the root vertex (always 0).
        distance: graph distance to the origin, per vertex.
        incidence: per vertex, list of (edge index, other endpoint index).
    """

    def __init__(self, spec, radius, vertices, edges, distance):
        self.spec = spec
        self.radius = radius
        self.vertices = list(vertices)
        self.edges = list(edges)
        self.distance = list(distance)
        self.origin = 0
        self.vertex_index = {v: i for i, v in enumerate(self.vertices)}
        incidence = [[] for _ in self.vertices]
        for e, (i, j) in enumerate(self.edges):
            incidence[i].append((e, j))
            incidence[j].append((e, i))
        self.incidence = incidence

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def edge_coords(self, e: int) -> tuple:
        i, j = self.edges[e]
        return self.vertices[i], self.vertices[j]

    def __repr__(self):
        return (f"GraphBall({self.spec.family}, radius={self.radius}, "
                f"|V|={self.n_vertices}, |E|={self.n_edges})")


def build_ball(spec: LatticeSpec, n: int,
               max_vertices: int = DEFAULT_MAX_BALL_VERTICES) -> GraphBall:
    """Construct the radius-``n`` ball of the lattice around the origin.

    Raises CapExceeded when the ball would exceed ``max_vertices`` vertices,
    which also keeps edge indices within a 32-bit range.
    """
    if n < 0:
        raise ValueError("radius must be nonnegative")
    o = spec.origin
    dist = {o: 0}
    frontier = deque([o])
    while frontier:
        v = frontier.popleft()
        if dist[v] == n:
            continue
        for w in lazy_neighbors(spec, v):
            if w not in dist:
                if len(dist) >= max_vertices:
                    raise CapExceeded(
                        f"ball of radius {n} exceeds {max_vertices} vertices")
                dist[w] = dist[v] + 1
                frontier.append(w)
    vertices = sorted(dist, key=lambda v: (dist[v], v))
    index = {v: i for i, v in enumerate(vertices)}
    edges = set()
    for v, i in index.items():
        for w in lazy_neighbors(spec, v):
            j = index.get(w)
            if j is not None and i < j:
                edges.add((i, j))
    edges = sorted(edges)
    if len(edges) > (1 << 31):
        raise CapExceeded("edge count overflows the 32-bit index width")
    return GraphBall(spec, n, vertices, edges, [dist[v] for v in vertices])


def ball_to_json(ball: GraphBall) -> dict:
    """JSON-serializable description: coordinates and edge index pairs."""
    return {
        "family": ball.spec.family,
        "dimension": ball.spec.dimension,
        "tree_degree": ball.spec.tree_degree,
        "radius": ball.radius,
        "origin": ball.origin,
        "vertices": [list(v) for v in ball.vertices],
        "edges": [list(e) for e in ball.edges],
        "distance": list(ball.distance),
    }


# ---------------------------------------------------------------------------
# Integer key encodings shared by the lazy growth kernels and the ball
# cross-checks.  Vertex keys are injective for coordinates below _KEY_HALF;
# edge keys are (canonical endpoint key) * (#positive directions) + direction.
# ---------------------------------------------------------------------------

def positive_offsets(spec: LatticeSpec) -> list:
    """Key-space offsets, one per canonical edge direction."""
    if spec.family == HYPERCUBIC:
        return [_KEY_M ** i for i in range(spec.dimension)]
    if spec.family == TRIANGULAR:
        # (a, b+1), (a+1, b), (a+1, b-1)
        return [1, _KEY_M, _KEY_M - 1]
    raise ValueError("trees use the parent/child key scheme")


def vertex_key(spec: LatticeSpec, v: tuple) -> int:
    if spec.family == HYPERCUBIC:
        k = 0
        for i, c in enumerate(v):
            if abs(c) >= _KEY_HALF:
                raise CapExceeded("coordinate exceeds the key encoding range")
            k += c * (_KEY_M ** i)
        return k
    if spec.family == TRIANGULAR:
        a, b = v
        if abs(a) >= _KEY_HALF or abs(b) >= _KEY_HALF:
            raise CapExceeded("coordinate exceeds the key encoding range")
        return a * _KEY_M + b
    # Tree: positional digits base (degree + 1), root key 1.
    base = spec.tree_degree + 1
    k = 1
    for c in v:
        k = k * base + c + 1
    return k


def key_to_coords(spec: LatticeSpec, key: int) -> tuple:
    if spec.family == HYPERCUBIC:
        coords = []
        k = key
        for _ in range(spec.dimension):
            c = ((k + _KEY_HALF) % _KEY_M) - _KEY_HALF
            coords.append(c)
            k = (k - c) // _KEY_M
        return tuple(coords)
    if spec.family == TRIANGULAR:
        b = ((key + _KEY_HALF) % _KEY_M) - _KEY_HALF
        a = (key - b) // _KEY_M
        return (a, b)
    base = spec.tree_degree + 1
    digits = []
    k = key
    while k > 1:
        digits.append(k % base - 1)
        k //= base
    return tuple(reversed(digits))


def edge_key(spec: LatticeSpec, va: tuple, vb: tuple) -> int:
    """Canonical integer key of the undirected lattice edge {va, vb}."""
    if spec.family == REGULAR_TREE:
        child = va if len(va) > len(vb) else vb
        return vertex_key(spec, child)
    offs = positive_offsets(spec)
    ka = vertex_key(spec, va)
    kb = vertex_key(spec, vb)
    delta = kb - ka
    for d, off in enumerate(offs):
        if delta == off:
            return ka * len(offs) + d
        if delta == -off:
            return kb * len(offs) + d
    raise ValueError(f"{va} and {vb} are not lattice neighbors")
