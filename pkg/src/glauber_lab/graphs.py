"""Finite rooted graphs: b-ary trees, level-augmented trees, and balls of
hyperbolic {p,q} tilings.

All builders label vertices in construction (BFS-layer) order and store
adjacency lists in rotation order, so serialization round-trips exactly and
every algorithm downstream is label-stable.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import Optional, Sequence

from .errors import SizeError

MAX_VERTICES = 100_000_000


@dataclass(frozen=True)
class Graph:
    """Immutable rooted graph with levels and an optional rotation system.

    ``adjacency[v]`` lists the neighbors of ``v``; when ``rotation`` is
    present it equals ``adjacency`` read in cyclic (counterclockwise)
    order around ``v``.  ``level[v]`` is the graph distance from ``root``;
    ``radius`` is ``max(level)`` and marks the boundary.
    """

    n: int
    adjacency: tuple
    root: int
    level: tuple
    rotation: Optional[tuple] = None
    radius: int = field(default=0)

    def __post_init__(self):
        object.__setattr__(self, "radius", max(self.level) if self.n else 0)

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def max_degree(self) -> int:
        return max((len(a) for a in self.adjacency), default=0)

    def edges(self):
        """Undirected edge list as sorted (u, v) pairs with u < v."""
        out = []
        for u in range(self.n):
            for w in self.adjacency[u]:
                if u < w:
                    out.append((u, w))
        out.sort()
        return out

    def num_edges(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    def is_boundary(self, v: int) -> bool:
        return self.level[v] == self.radius

    def boundary_vertices(self):
        return [v for v in range(self.n) if self.level[v] == self.radius]

    def vertices_at_level(self, ell: int):
        return [v for v in range(self.n) if self.level[v] == ell]

    def validate(self):
        """Check the structural invariants; raises AssertionError on breach."""
        for u in range(self.n):
            for w in self.adjacency[u]:
                assert u != w, f"self-loop at {u}"
                assert u in self.adjacency[w], f"asymmetric edge ({u},{w})"
            assert len(set(self.adjacency[u])) == len(self.adjacency[u]), \
                f"parallel edges at {u}"
        dist = bfs_levels(self.adjacency, self.root)
        assert all(d >= 0 for d in dist), "graph is not connected"
        assert tuple(dist) == tuple(self.level), "stored levels disagree with BFS"
        if self.rotation is not None:
            for v in range(self.n):
                assert sorted(self.rotation[v]) == sorted(self.adjacency[v]), \
                    f"rotation at {v} is not a permutation of the neighbors"
        return True


def bfs_levels(adjacency: Sequence[Sequence[int]], root: int):
    """Graph distances from root; -1 marks unreachable vertices."""
    dist = [-1] * len(adjacency)
    dist[root] = 0
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for w in adjacency[u]:
            if dist[w] < 0:
                dist[w] = dist[u] + 1
                queue.append(w)
    return dist


def _freeze(adjacency) -> tuple:
    return tuple(tuple(a) for a in adjacency)


def _make_graph(adjacency, root, rotation=None) -> Graph:
    level = bfs_levels(adjacency, root)
    if any(d < 0 for d in level):
        raise ValueError("graph is not connected")
    adj = _freeze(rotation if rotation is not None else adjacency)
    rot = _freeze(rotation) if rotation is not None else None
    return Graph(n=len(adjacency), adjacency=adj, root=root,
                 level=tuple(level), rotation=rot)


# ---------------------------------------------------------------------------
# trees
# ---------------------------------------------------------------------------

def bary_tree_size(b: int, r: int) -> int:
    return (b ** (r + 1) - 1) // (b - 1)


def tree_parent(v: int, b: int) -> int:
    """Parent of vertex v under the BFS-layer labeling of the b-ary tree."""
    return (v - 1) // b


def tree_children(v: int, b: int, n: int):
    first = b * v + 1
    return [c for c in range(first, first + b) if c < n]


def build_bary_tree(b: int, r: int) -> Graph:
    """The r-level b-ary tree, vertex 0 the root, children left to right.

    Rotation order is parent first, then children left to right.
    """
    if b < 2:
        raise ValueError(f"branching factor must be >= 2, got {b}")
    if r < 0:
        raise ValueError(f"depth must be >= 0, got {r}")
    n = bary_tree_size(b, r)
    if n > MAX_VERTICES:
        raise SizeError(f"tree with {n} vertices exceeds the size limit")
    rotation = []
    for v in range(n):
        nbrs = [] if v == 0 else [tree_parent(v, b)]
        nbrs.extend(tree_children(v, b, n))
        rotation.append(nbrs)
    return _make_graph(rotation, root=0, rotation=rotation)


def build_augmented_tree(b: int, r: int) -> Graph:
    """b-ary tree plus a left-to-right path through each level >= 1.

    A path (not a cycle) per level keeps the obvious embedding planar;
    rotation order is parent, left level-neighbor, children, right
    level-neighbor.
    """
    if b < 2:
        raise ValueError(f"branching factor must be >= 2, got {b}")
    if r < 1:
        raise ValueError(f"augmented tree needs depth >= 1, got {r}")
    n = bary_tree_size(b, r)
    if n > MAX_VERTICES:
        raise SizeError(f"tree with {n} vertices exceeds the size limit")
    starts = [0] + [bary_tree_size(b, ell - 1) for ell in range(1, r + 2)]
    rotation = []
    for v in range(n):
        if v == 0:
            rotation.append(tree_children(v, b, n))
            continue
        ell = 0
        while starts[ell + 1] <= v:
            ell += 1
        nbrs = [tree_parent(v, b)]
        if v > starts[ell]:
            nbrs.append(v - 1)
        nbrs.extend(tree_children(v, b, n))
        if v + 1 < starts[ell + 1]:
            nbrs.append(v + 1)
        rotation.append(nbrs)
    return _make_graph(rotation, root=0, rotation=rotation)


# ---------------------------------------------------------------------------
# hyperbolic {p,q} balls
# ---------------------------------------------------------------------------

class _TilingDisk:
    """Combinatorial disk of the {p,q} tessellation grown face corona by
    face corona.

    Each vertex keeps its neighbors in counterclockwise order with the
    outer-face gap sitting between the last and the first list entry, so
    the boundary successor of an unsaturated vertex ``v`` is ``rot[v][0]``.
    Boundary vertices satisfy ``faces == degree - 1``; completed (interior)
    vertices have exactly q faces and q edges.
    """

    def __init__(self, p: int, q: int):
        self.p = p
        self.q = q
        self.rot = []     # per vertex: ccw neighbor list, gap at the wrap
        self.nface = []   # number of incident faces built so far

    def _new_vertex(self) -> int:
        self.rot.append([])
        self.nface.append(0)
        return len(self.rot) - 1

    def _wire_fresh_path(self, start: int, fresh: list, end: int):
        """Connect ``start`` to ``end`` through the new vertices ``fresh``
        along the outer side; boundary order runs start, fresh..., end."""
        path = [start] + fresh + [end]
        self.rot[start].insert(0, path[1])  # gap-ccw end of the fan start
        for i, c in enumerate(fresh):
            self.rot[c] = [path[i + 2], path[i]]  # [successor, predecessor]
        self.rot[end].append(path[-2])      # gap-cw end of the far vertex

    def _fan_face(self, apex: int):
        """Non-closing fan face: shares only the edge to rot[apex][-1];
        its far side is a fresh chain ending in a new spoke of ``apex``."""
        a_side = self.rot[apex][-1]
        assert self.rot[a_side][0] == apex, "fan-start edge out of position"
        assert self.nface[a_side] <= self.q - 2, "fan start has no free sector"
        fresh = [self._new_vertex() for _ in range(self.p - 3)]
        spoke = self._new_vertex()
        path = [a_side] + fresh + [spoke]
        self.rot[a_side].insert(0, path[1])
        for i, c in enumerate(fresh):
            self.rot[c] = [path[i + 2], path[i]]
        self.rot[spoke] = [apex, path[-2]]
        self.rot[apex].append(spoke)
        for v in [apex] + path:
            self.nface[v] += 1

    def _close_gap_face(self, apex: int):
        """Final face of the fan: fills the remaining angular gap of
        ``apex``.

        The face is attached along the boundary arc from rot[apex][-1]
        through apex to rot[apex][0]; it keeps absorbing boundary
        successors that are left with a single free sector (their gap
        is exactly this face, so they must not receive a new edge).
        """
        q = self.q
        arc = [self.rot[apex][-1], apex, self.rot[apex][0]]
        while self.nface[arc[-1]] == q - 1:
            arc.append(self.rot[arc[-1]][0])
            assert len(arc) <= self.p, "closing face arc exceeded face size"
        assert self.nface[arc[0]] <= q - 2, "fan start has no free sector"
        assert self.rot[arc[-1]][-1] == arc[-2], "fan-close edge out of position"
        fresh = [self._new_vertex() for _ in range(self.p - len(arc))]
        self._wire_fresh_path(arc[0], fresh, arc[-1])
        for v in arc + fresh:
            self.nface[v] += 1
        for v in arc[1:-1]:
            assert self.nface[v] == q, "absorbed vertex not saturated"

    def _complete_vertex(self, v: int):
        """Add the q - nface missing faces around boundary vertex v."""
        missing = self.q - self.nface[v]
        assert missing >= 1, "boundary vertex unexpectedly saturated"
        for _ in range(missing - 1):
            self._fan_face(v)
        self._close_gap_face(v)
        assert self.nface[v] == self.q and len(self.rot[v]) == self.q

    def _boundary_cycle(self):
        # start right after a minimum-face vertex so the first fan face
        # never has to extend backwards past its starting edge
        unsat = [v for v in range(len(self.rot)) if self.nface[v] < self.q]
        anchor = min(unsat, key=lambda v: (self.nface[v], v))
        start = self.rot[anchor][0]
        cycle = [start]
        v = self.rot[start][0]
        while v != start:
            cycle.append(v)
            v = self.rot[v][0]
            if len(cycle) > len(self.rot):
                raise AssertionError("boundary walk did not close")
        return cycle

    def grow(self, coronas: int):
        v0 = self._new_vertex()
        v1 = self._new_vertex()
        self.rot[v0] = [v1]
        self.rot[v1] = [v0]
        self._complete_vertex(v0)
        for _ in range(coronas - 1):
            for v in self._boundary_cycle():
                if self.nface[v] < self.q:
                    self._complete_vertex(v)
        return self


def build_hyperbolic_ball(p: int, q: int, r: int) -> Graph:
    """Radius-r combinatorial ball of the {p,q} tessellation.

    Grown corona by corona with an explicit rotation system; by
    construction no cycle of the ball separates two outside vertices.
    Requires (p-2)(q-2) > 4.
    """
    if p < 3 or q < 3:
        raise ValueError(f"need p, q >= 3, got ({p},{q})")
    if (p - 2) * (q - 2) <= 4:
        raise ValueError(f"({p},{q}) is not hyperbolic: (p-2)(q-2) must exceed 4")
    if r < 0:
        raise ValueError(f"radius must be >= 0, got {r}")
    if r == 0:
        return Graph(n=1, adjacency=((),), root=0, level=(0,), rotation=((),))

    disk = _TilingDisk(p, q).grow(coronas=r + 1)
    if len(disk.rot) > MAX_VERTICES:
        raise SizeError("hyperbolic disk exceeds the size limit")
    dist = bfs_levels(disk.rot, 0)
    keep = sorted((v for v in range(len(disk.rot)) if 0 <= dist[v] <= r),
                  key=lambda v: (dist[v], v))
    for v in keep:
        # r+1 coronas saturate every vertex within distance r, which is
        # exactly what makes the induced subgraph the true metric ball
        assert disk.nface[v] == q, "ball vertex not saturated; grow deeper"
    relabel = {v: i for i, v in enumerate(keep)}
    rotation = [[relabel[w] for w in disk.rot[v] if w in relabel] for v in keep]
    return _make_graph(rotation, root=0, rotation=rotation)


def hyperbolic_ball_layer_counts(p: int, q: int, r: int):
    """Vertex count per distance layer of the radius-r ball."""
    g = build_hyperbolic_ball(p, q, r)
    counts = [0] * (r + 1)
    for v in range(g.n):
        counts[g.level[v]] += 1
    return counts


# ---------------------------------------------------------------------------
# balls of arbitrary graphs
# ---------------------------------------------------------------------------

def ball(g: Graph, center: int, radius: int) -> Graph:
    """Induced subgraph on vertices within graph distance ``radius`` of
    ``center``, relabeled contiguously by (distance, old label)."""
    if not (0 <= center < g.n):
        raise ValueError(f"invalid center {center}")
    if radius < 0:
        raise ValueError(f"radius must be >= 0, got {radius}")
    dist = bfs_levels(g.adjacency, center)
    keep = sorted((v for v in range(g.n) if 0 <= dist[v] <= radius),
                  key=lambda v: (dist[v], v))
    relabel = {v: i for i, v in enumerate(keep)}
    if g.rotation is not None:
        rotation = [[relabel[w] for w in g.rotation[v] if w in relabel]
                    for v in keep]
        return _make_graph(rotation, root=0, rotation=rotation)
    adjacency = [[relabel[w] for w in g.adjacency[v] if w in relabel]
                 for v in keep]
    return _make_graph(adjacency, root=0)


# ---------------------------------------------------------------------------
# isoperimetry
# ---------------------------------------------------------------------------

FULL_ENUM_VERTEX_LIMIT = 24
_FULL_ENUM_SUBSET_LIMIT = 300_000
_CONNECTED_ENUM_LIMIT = 2_000_000


def _connected_subsets(adjacency, max_size):
    """All connected vertex subsets of size <= max_size, deduplicated."""
    seen = set()
    frontier = [frozenset([v]) for v in range(len(adjacency))]
    seen.update(frontier)
    yield from frontier
    for _ in range(max_size - 1):
        nxt = []
        for s in frontier:
            for v in s:
                for w in adjacency[v]:
                    if w not in s:
                        cand = s | {w}
                        if cand not in seen:
                            seen.add(cand)
                            nxt.append(cand)
                            if len(seen) > _CONNECTED_ENUM_LIMIT:
                                raise SizeError(
                                    "too many connected subsets to enumerate")
        yield from nxt
        frontier = nxt


def cheeger_profile(g: Graph, max_subset_size: int):
    """Minimum of |boundary(A)| / |A| over nonempty proper subsets A with
    |A| <= max_subset_size, plus a witness set.

    boundary(A) = vertices of A having a neighbor outside A.  Exact by
    enumeration: all subsets when n <= 24 and the count is modest,
    otherwise connected subsets only -- no loss, because splitting a
    disconnected A into components can only lower the ratio of one part.
    """
    if max_subset_size < 1:
        raise ValueError("max_subset_size must be >= 1")
    cap = min(max_subset_size, g.n - 1)
    if cap < 1:
        raise SizeError("no proper nonempty subsets to enumerate")
    best = None
    best_set = None

    def consider(subset):
        nonlocal best, best_set
        boundary = sum(1 for v in subset
                       if any(w not in subset for w in g.adjacency[v]))
        ratio = boundary / len(subset)
        key = sorted(subset)
        if best is None or ratio < best - 1e-15 or \
                (abs(ratio - best) <= 1e-15 and key < best_set):
            best, best_set = ratio, key

    total = sum(comb(g.n, k) for k in range(1, cap + 1))
    if g.n <= FULL_ENUM_VERTEX_LIMIT and total <= _FULL_ENUM_SUBSET_LIMIT:
        for k in range(1, cap + 1):
            for subset in combinations(range(g.n), k):
                consider(frozenset(subset))
    else:
        for subset in _connected_subsets(g.adjacency, cap):
            if len(subset) <= cap:
                consider(subset)
    return best, best_set


# ---------------------------------------------------------------------------
# serialization (GLGRAPH 1)
# ---------------------------------------------------------------------------

def serialize(g: Graph) -> str:
    """Text format: header, then one line per vertex with neighbors in
    rotation order (adjacency order when no rotation is present)."""
    lines = ["GLGRAPH 1", f"n {g.n} root {g.root}"]
    order = g.rotation if g.rotation is not None else g.adjacency
    for v in range(g.n):
        nbrs = ",".join(str(w) for w in order[v])
        suffix = f" {nbrs}" if nbrs else ""
        lines.append(f"v {v} level {g.level[v]} nbrs{suffix}")
    return "\n".join(lines) + "\n"


def parse(text: str) -> Graph:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].strip() != "GLGRAPH 1":
        raise ValueError("not a GLGRAPH 1 file")
    head = lines[1].split()
    if len(head) != 4 or head[0] != "n" or head[2] != "root":
        raise ValueError(f"bad header line: {lines[1]!r}")
    n, root = int(head[1]), int(head[3])
    rotation = [None] * n
    levels = [None] * n
    for ln in lines[2:]:
        parts = ln.split(maxsplit=5)
        if len(parts) < 5 or parts[0] != "v" or parts[2] != "level" or parts[4] != "nbrs":
            raise ValueError(f"bad vertex line: {ln!r}")
        v = int(parts[1])
        levels[v] = int(parts[3])
        nbrs = parts[5] if len(parts) > 5 else ""
        rotation[v] = [int(x) for x in nbrs.split(",")] if nbrs else []
    if any(x is None for x in rotation):
        raise ValueError("missing vertex lines")
    g = _make_graph(rotation, root=root, rotation=rotation)
    if tuple(levels) != g.level:
        raise ValueError("stored levels disagree with BFS from root")
    return g
