"""Linear arrangements and cut-width: exact subset DP, the left-to-right
depth-first tree ordering, the shortest-path-tree counterclockwise ordering
for planar balls, and the relaxation-time upper-bound calculators fed by a
cut-width value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import SizeError
from .graphs import Graph

EXACT_CUTWIDTH_LIMIT = 20


@dataclass
class LinearOrdering:
    """A vertex permutation with its prefix cut sizes.

    ``cut_profile[k]`` counts edges from the first k vertices to the rest
    (so entries 0 and n are always 0); ``width`` is the maximum.
    """

    order: list
    cut_profile: list
    width: int


def cutwidth_of_ordering(g: Graph, order: Sequence[int]) -> LinearOrdering:
    """Exact prefix cut counts of ``order``."""
    if sorted(order) != list(range(g.n)):
        raise ValueError("order must be a permutation of the vertices")
    placed = set()
    profile = [0]
    cut = 0
    for v in order:
        cut += sum(1 for w in g.adjacency[v] if w not in placed)
        cut -= sum(1 for w in g.adjacency[v] if w in placed)
        placed.add(v)
        profile.append(cut)
    return LinearOrdering(order=list(order), cut_profile=profile,
                          width=max(profile))


def exact_cutwidth(g: Graph) -> LinearOrdering:
    """True cut-width with an optimal witness ordering.

    Subset DP: state = set of already-placed vertices, value = minimum over
    placement orders of the maximum prefix cut; the boundary cut of a set
    does not depend on the order, so dp[S] = min over last vertices v of
    max(dp[S - v], cut(S)).
    """
    n = g.n
    if n > EXACT_CUTWIDTH_LIMIT:
        raise SizeError(f"exact cut-width is capped at {EXACT_CUTWIDTH_LIMIT} "
                        f"vertices, got {n}")
    if n == 0:
        return LinearOrdering(order=[], cut_profile=[0], width=0)
    masks = [0] * n
    deg = [0] * n
    for v in range(n):
        for w in g.adjacency[v]:
            masks[v] |= 1 << w
        deg[v] = len(g.adjacency[v])
    size = 1 << n
    cut = [0] * size
    dp = [0] * size
    parent = [0] * size
    big = 1 << 30
    for s in range(1, size):
        v = (s & -s).bit_length() - 1
        prev = s ^ (1 << v)
        cut[s] = cut[prev] + deg[v] - 2 * (masks[v] & prev).bit_count()
        best = big
        best_v = -1
        t = s
        while t:
            u = (t & -t).bit_length() - 1
            t ^= 1 << u
            cand = dp[s ^ (1 << u)]
            if cand < best:
                best = cand
                best_v = u
        dp[s] = max(best, cut[s])
        parent[s] = best_v
    order = []
    s = size - 1
    while s:
        v = parent[s]
        order.append(v)
        s ^= 1 << v
    order.reverse()
    result = cutwidth_of_ordering(g, order)
    assert result.width == dp[size - 1]
    return result


# ---------------------------------------------------------------------------
# structured orderings
# ---------------------------------------------------------------------------

def _emit_inorder(v: int, children, out: list):
    """Place the first child's subtree, then the vertex, then the rest.

    Emitting the vertex between its subtrees (rather than before all of
    them) keeps every prefix cut strictly below (b-1) r + 1 on b-ary trees;
    the vertex-first variant attains that value with equality.
    """
    kids = children(v)
    if kids:
        _emit_inorder(kids[0], children, out)
    out.append(v)
    for c in kids[1:]:
        _emit_inorder(c, children, out)


def dfs_tree_ordering(g: Graph) -> LinearOrdering:
    """Left-to-right depth-first ordering of a rooted tree."""
    if g.num_edges() != g.n - 1:
        raise ValueError("dfs_tree_ordering expects a tree")

    def children(v):
        return [w for w in g.adjacency[v] if g.level[w] == g.level[v] + 1]

    out: list = []
    _emit_inorder(g.root, children, out)
    return cutwidth_of_ordering(g, out)


def bfs_tree_parents(g: Graph) -> list:
    """Shortest-path-tree parents: for each non-root vertex, the first
    neighbor one level closer to the root in rotation order."""
    order = g.rotation if g.rotation is not None else g.adjacency
    parents = [-1] * g.n
    for v in range(g.n):
        if v == g.root:
            continue
        for u in order[v]:
            if g.level[u] == g.level[v] - 1:
                parents[v] = u
                break
        if parents[v] < 0:
            raise ValueError("level structure is broken; no parent found")
    return parents


def hyperbolic_ordering(g: Graph, root: Optional[int] = None) -> LinearOrdering:
    """Depth-first traversal of a breadth-first shortest-path tree with
    children visited in rotation (counterclockwise) order.

    Requires a rotation system.  On tree inputs this reduces to
    ``dfs_tree_ordering``.
    """
    if g.rotation is None:
        raise ValueError("hyperbolic ordering needs a rotation system")
    if root is not None and root != g.root:
        raise ValueError("ordering is rooted at the graph root")
    parents = bfs_tree_parents(g)
    kids = {v: [] for v in range(g.n)}
    for v in range(g.n):
        if v != g.root:
            kids[parents[v]].append(v)

    def children(v):
        kid_set = set(kids[v])
        rot = list(g.rotation[v])
        if v != g.root:
            # start the counterclockwise sweep just after the parent edge
            i = rot.index(parents[v])
            rot = rot[i + 1:] + rot[:i]
        return [w for w in rot if w in kid_set]

    out: list = []
    _emit_inorder(g.root, children, out)
    return cutwidth_of_ordering(g, out)


# ---------------------------------------------------------------------------
# relaxation-time upper bounds from cut-width
# ---------------------------------------------------------------------------

def tau2_upper_bound_ising(n: int, xi: int, delta: int, beta: float) -> float:
    """n * exp((4 xi + 2 delta) beta)."""
    return n * math.exp((4 * xi + 2 * delta) * beta)


def tau2_upper_bound_coloring(n: int, xi: int, delta: int, q: int) -> float:
    """(delta + 1) * n * (q - 1)^(xi + 1); requires q >= delta + 2."""
    if q < delta + 2:
        raise ValueError(f"coloring bound needs q >= delta + 2, "
                         f"got q={q}, delta={delta}")
    return (delta + 1) * n * (q - 1) ** (xi + 1)
