"""Finite simple s-regular graphs and the distance geometry used by the
spin-system identities.

Vertices are integers 0..N-1. A graph is immutable after construction and
stored in canonical form: a (N, s) array of neighbor ids, each row sorted,
which makes equality a plain array comparison. All builders go through the
same edge-set validation (simple, connected, regular).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import EdgeListParseError, GraphError, RegularityError

__all__ = [
    "Graph",
    "ConditionIIWitness",
    "build_cycle",
    "build_torus",
    "build_named",
    "load_edge_list",
    "distance_shell",
    "distances_from",
    "check_triangle_free",
    "find_condition_ii",
]

NAMED_GRAPHS = ("petersen", "heawood", "cube")


class Graph:
    """Connected simple s-regular graph in canonical (sorted-adjacency) form.

    Attributes
    ----------
    n : int
        Number of vertices.
    s : int
        Common degree.
    neighbors : (n, s) int32 ndarray
        Row x lists the neighbors of x in increasing order. Read-only.
    """

    __slots__ = ("n", "s", "neighbors", "_adj_sets")

    def __init__(self, edges):
        edges = [(int(u), int(v)) for u, v in edges]
        if not edges:
            raise GraphError("empty edge set")
        seen = set()
        for u, v in edges:
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            if u < 0 or v < 0:
                raise GraphError(f"negative vertex id in edge ({u}, {v})")
            key = (u, v) if u < v else (v, u)
            if key in seen:
                raise GraphError(f"duplicate edge ({key[0]}, {key[1]})")
            seen.add(key)
        n = 1 + max(max(u, v) for u, v in edges)
        adj = [[] for _ in range(n)]
        for u, v in edges:
            adj[u].append(v)
            adj[v].append(u)
        degrees = {len(a) for a in adj}
        if len(degrees) != 1:
            bad = min(x for x in range(n) if len(adj[x]) != len(adj[0]))
            raise RegularityError(
                f"graph is not regular: vertex {bad} has degree {len(adj[bad])}, "
                f"vertex 0 has degree {len(adj[0])}",
                vertex=bad,
            )
        s = degrees.pop()
        if s == 0:
            raise RegularityError("graph has isolated vertices", vertex=0)
        # connectivity (BFS from 0)
        seen_v = bytearray(n)
        seen_v[0] = 1
        q = deque([0])
        count = 1
        while q:
            x = q.popleft()
            for y in adj[x]:
                if not seen_v[y]:
                    seen_v[y] = 1
                    count += 1
                    q.append(y)
        if count != n:
            raise GraphError(f"graph is disconnected ({count} of {n} vertices reachable from 0)")
        nb = np.array([sorted(a) for a in adj], dtype=np.int32)
        nb.setflags(write=False)
        self.n = n
        self.s = s
        self.neighbors = nb
        self._adj_sets = [frozenset(a) for a in adj]

    def adjacent(self, x: int, y: int) -> bool:
        return y in self._adj_sets[x]

    def edges(self):
        """Sorted list of (u, v) pairs with u < v."""
        out = []
        for x in range(self.n):
            for y in self.neighbors[x]:
                if x < y:
                    out.append((x, int(y)))
        return out

    def adjacency_matrix(self) -> np.ndarray:
        """Dense 0/1 adjacency matrix, int64."""
        a = np.zeros((self.n, self.n), dtype=np.int64)
        rows = np.repeat(np.arange(self.n), self.s)
        a[rows, self.neighbors.ravel()] = 1
        return a

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self.s == other.s and np.array_equal(self.neighbors, other.neighbors)

    def __hash__(self):
        return hash((self.n, self.s, self.neighbors.tobytes()))

    def __repr__(self):
        return f"Graph(n={self.n}, s={self.s})"


@dataclass(frozen=True)
class ConditionIIWitness:
    """Vertices certifying the two singleton cross shells.

    z is at distance 3 from y; u1 is the unique common element of
    delta_1(y) and delta_2(z); u2 the unique common element of delta_2(y)
    and delta_1(z). The geodesic y ~ u1 ~ u2 ~ z is forced.
    """

    y: int
    z: int
    u1: int
    u2: int


def build_cycle(n: int) -> Graph:
    """Cycle C_n (2-regular). Requires n >= 3."""
    if n < 3:
        raise GraphError(f"cycle needs at least 3 vertices, got {n}")
    return Graph([(i, (i + 1) % n) for i in range(n)])


def build_torus(sides) -> Graph:
    """Cartesian product of cycles (discrete torus), 2*len(sides)-regular.

    sides = [m] gives C_m; [m, k] the m-by-k torus, and so on. Every side
    must be >= 3. Vertex (c_0, .., c_{d-1}) maps to the mixed-radix index
    c_0 + c_1*m_0 + c_2*m_0*m_1 + ...
    """
    sides = [int(m) for m in sides]
    if not sides:
        raise GraphError("torus needs at least one side")
    for m in sides:
        if m < 3:
            raise GraphError(f"torus side must be >= 3, got {m}")
    n = 1
    strides = []
    for m in sides:
        strides.append(n)
        n *= m
    edges = set()
    for idx in range(n):
        rem = idx
        coords = []
        for m in sides:
            coords.append(rem % m)
            rem //= m
        for axis, m in enumerate(sides):
            up = idx + ((coords[axis] + 1) % m - coords[axis]) * strides[axis]
            edges.add((min(idx, up), max(idx, up)))
    return Graph(sorted(edges))


def build_named(name: str) -> Graph:
    """One of the fixed library graphs: petersen, heawood, cube."""
    if name == "petersen":
        outer = [(i, (i + 1) % 5) for i in range(5)]
        inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
        spokes = [(i, i + 5) for i in range(5)]
        return Graph(outer + inner + spokes)
    if name == "heawood":
        # LCF [5, -5]^7: a 14-cycle plus the chord i ~ i+5 for even i
        edges = [(i, (i + 1) % 14) for i in range(14)]
        edges += [(i, (i + 5) % 14) for i in range(0, 14, 2)]
        return Graph(edges)
    if name == "cube":
        return Graph([(v, v ^ (1 << b)) for v in range(8) for b in range(3) if v < v ^ (1 << b)])
    raise GraphError(f"unknown named graph {name!r}; choose from {NAMED_GRAPHS}")


def load_edge_list(text: str) -> Graph:
    """Parse the edge-list text format: one "u v" pair per line, '#' starts
    a comment, blank lines ignored. The graph must come out simple,
    connected and regular.
    """
    edges = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise EdgeListParseError(f"expected two vertex ids, got {raw.strip()!r}", line=ln)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise EdgeListParseError(f"non-integer vertex id in {raw.strip()!r}", line=ln) from None
        edges.append((u, v))
    if not edges:
        raise EdgeListParseError("no edges found", line=0)
    return Graph(edges)


def distances_from(g: Graph, x: int) -> np.ndarray:
    """BFS distances from x; unreachable would be -1 (cannot happen, the
    graph is connected)."""
    if not 0 <= x < g.n:
        raise GraphError(f"vertex {x} out of range for n={g.n}")
    dist = np.full(g.n, -1, dtype=np.int64)
    dist[x] = 0
    q = deque([x])
    while q:
        v = q.popleft()
        for w in g.neighbors[v]:
            if dist[w] < 0:
                dist[w] = dist[v] + 1
                q.append(int(w))
    return dist


def distance_shell(g: Graph, x: int, i: int) -> set[int]:
    """delta_i(x): vertices at graph distance exactly i from x."""
    if i < 0:
        raise GraphError(f"shell index must be >= 0, got {i}")
    dist = distances_from(g, x)
    return set(np.flatnonzero(dist == i).tolist())


def check_triangle_free(g: Graph) -> bool:
    for x in range(g.n):
        row = g._adj_sets[x]
        for y in g.neighbors[x]:
            if y > x and row & g._adj_sets[y]:
                return False
    return True


def find_condition_ii(g: Graph) -> ConditionIIWitness | None:
    """Search for a vertex pair at distance 3 whose two cross shells
    delta_1(y) ∩ delta_2(z) and delta_2(y) ∩ delta_1(z) are singletons.

    Returns the lexicographically smallest (y, z) witness, or None if the
    graph has no distance-3 pair with that property.
    """
    all_dist = [distances_from(g, x) for x in range(g.n)]
    for y in range(g.n):
        dy = all_dist[y]
        for z in np.flatnonzero(dy == 3):
            z = int(z)
            dz = all_dist[z]
            e12 = [int(u) for u in g.neighbors[y] if dz[u] == 2]
            if len(e12) != 1:
                continue
            e21 = [int(u) for u in g.neighbors[z] if dy[u] == 2]
            if len(e21) != 1:
                continue
            return ConditionIIWitness(y=y, z=z, u1=e12[0], u2=e21[0])
    return None
