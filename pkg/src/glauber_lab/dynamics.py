"""Single-site Glauber dynamics via the graphical representation, block
dynamics with disjoint and overlapping tree block schemes, coupled chains,
and the first-passage disagreement process.

Continuous-time clocks are realized by a global exponential race (next
event after Exp(n), uniform vertex), which has exactly the law of
independent rate-1 Poisson clocks per vertex.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import SizeError
from .graphs import Graph, bfs_levels, tree_children, tree_parent
from .models import Model, heat_bath_distribution, sample_from

BLOCK_ENUM_LIMIT = 1 << 20


def _as_rng(rng):
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def replica_rng(master_seed: int, replica_index: int) -> np.random.Generator:
    """Per-replica stream derived from (master_seed, replica_index)."""
    return np.random.default_rng(np.random.SeedSequence((master_seed, replica_index)))


# ---------------------------------------------------------------------------
# event logs
# ---------------------------------------------------------------------------

@dataclass
class EventLog:
    """Trajectory of the continuous-time dynamics.

    ``events`` are (time, vertex, new_spin) with strictly increasing times;
    replaying them from ``init`` reproduces ``final`` exactly.
    """

    seed: Optional[int]
    t_end: float
    init: np.ndarray
    times: np.ndarray
    vertices: np.ndarray
    spins: np.ndarray
    final: np.ndarray

    def __len__(self):
        return len(self.times)

    def replay(self) -> np.ndarray:
        sigma = self.init.copy()
        for v, a in zip(self.vertices, self.spins):
            sigma[v] = a
        return sigma

    def to_csv(self) -> str:
        lines = ["time,vertex,spin"]
        for t, v, a in zip(self.times, self.vertices, self.spins):
            lines.append(f"{t!r},{v},{a}")
        return "\n".join(lines) + "\n"


def simulate_ct(m: Model, g: Graph, init, t_end: float, rng) -> EventLog:
    """Heat-bath dynamics up to time t_end from ``init``.

    Every clock ring is logged, including resamples that keep the value.
    """
    if t_end <= 0:
        raise ValueError("t_end must be positive")
    seed = rng if isinstance(rng, (int, np.integer)) else None
    rng = _as_rng(rng)
    sigma = np.array(init, dtype=np.int8)
    times, verts, spins = [], [], []
    t = 0.0
    n = g.n
    while True:
        t += rng.exponential(1.0 / n)
        if t >= t_end:
            break
        v = int(rng.integers(n))
        dist = heat_bath_distribution(m, g, sigma, v)
        a = sample_from(dist, rng.random())
        sigma[v] = a
        times.append(t)
        verts.append(v)
        spins.append(a)
    return EventLog(seed=seed, t_end=t_end, init=np.array(init, dtype=np.int8),
                    times=np.array(times), vertices=np.array(verts, dtype=np.int64),
                    spins=np.array(spins, dtype=np.int8), final=sigma)


def simulate_discrete(m: Model, g: Graph, init, steps: int, rng) -> np.ndarray:
    """``steps`` applications of the discrete kernel M = I + L/n: each step
    resamples one uniformly chosen vertex."""
    rng = _as_rng(rng)
    sigma = np.array(init, dtype=np.int8)
    for _ in range(steps):
        v = int(rng.integers(g.n))
        dist = heat_bath_distribution(m, g, sigma, v)
        sigma[v] = sample_from(dist, rng.random())
    return sigma


# ---------------------------------------------------------------------------
# block partitions
# ---------------------------------------------------------------------------

@dataclass
class BlockPartition:
    blocks: list
    scheme: str
    height: Optional[int] = None

    def __len__(self):
        return len(self.blocks)

    def membership_counts(self, n: int) -> np.ndarray:
        counts = np.zeros(n, dtype=int)
        for blk in self.blocks:
            for v in blk:
                counts[v] += 1
        return counts


def _subtree_below(g: Graph, root_vertex: int, depth: int) -> list:
    """Vertices of the tree within ``depth`` levels below ``root_vertex``."""
    out = [root_vertex]
    frontier = [root_vertex]
    for _ in range(depth):
        nxt = []
        for u in frontier:
            for w in g.adjacency[u]:
                if g.level[w] == g.level[u] + 1:
                    nxt.append(w)
        out.extend(nxt)
        frontier = nxt
    return out


def block_partition_disjoint(g: Graph, n_top: int) -> BlockPartition:
    """Singleton blocks above depth n_top plus the full depth subtrees
    rooted at each depth-n_top vertex."""
    depth = g.radius
    if not (0 <= n_top <= depth):
        raise ValueError(f"n_top must lie in [0, {depth}]")
    blocks = [[v] for v in range(g.n) if g.level[v] < n_top]
    for v in range(g.n):
        if g.level[v] == n_top:
            blocks.append(sorted(_subtree_below(g, v, depth - n_top)))
    return BlockPartition(blocks=blocks, scheme="disjoint-subtree")


def block_partition_overlapping(g: Graph, h: int) -> BlockPartition:
    """One block per vertex of the enlarged tree whose height-h subtree
    meets the tree: for u in the tree, the subtree of depth <= h below u;
    for the j-th phantom ancestor of the root (j = 1..h), the top of the
    tree down to depth h - j.  Every vertex lies in exactly h + 1 blocks."""
    if h < 0:
        raise ValueError("h must be >= 0")
    blocks = [sorted(_subtree_below(g, u, min(h, g.radius - g.level[u])))
              for u in range(g.n)]
    for j in range(1, h + 1):
        top = [v for v in range(g.n) if g.level[v] <= h - j]
        blocks.append(sorted(top))
    return BlockPartition(blocks=blocks, scheme="overlapping-height-h", height=h)


# ---------------------------------------------------------------------------
# exact conditional block resampling
# ---------------------------------------------------------------------------

def _block_tree_structure(g: Graph, block: Sequence[int]):
    """Check the block induces a subtree; return (root, children lists,
    topdown order).  Root = minimum-level vertex."""
    bset = set(block)
    inner_edges = sum(1 for v in block for w in g.adjacency[v] if w in bset) // 2
    if inner_edges != len(block) - 1:
        return None
    root_vertex = min(bset, key=lambda v: (g.level[v], v))
    children = {v: [] for v in block}
    order = [root_vertex]
    seen = {root_vertex}
    head = 0
    while head < len(order):
        u = order[head]
        head += 1
        for w in g.adjacency[u]:
            if w in bset and w not in seen:
                seen.add(w)
                children[u].append(w)
                order.append(w)
    if len(seen) != len(block):
        return None
    return root_vertex, children, order


def _block_messages(m: Model, g: Graph, sigma, block_order, children, bset):
    """Bottom-up likelihood messages for the conditional Gibbs law on the
    block given the spins outside it.

    psi[v][a] multiplies the field, the edge weights to outside neighbors,
    and the summed-out messages of the block children of v.
    """
    A = m.alphabet_size
    fw = m.field_weights(g.n)
    psi = {}
    for v in reversed(block_order):
        w = fw[v].copy()
        for u in g.adjacency[v]:
            if u not in bset:
                w = w * m.edge_weight[:, sigma[u]]
        for c in children[v]:
            w = w * (m.edge_weight @ psi[c])
        psi[v] = w
    return psi


def _sample_block_topdown(m, g, sigma, root_vertex, children, order, psi, bset,
                          uniforms):
    """Draw the block configuration top-down; shared ``uniforms`` (one per
    block vertex, in ``order``) realize the quantile coupling."""
    from .errors import FrozenSiteError

    out = {}
    for k, v in enumerate(order):
        w = psi[v].copy()
        if v != root_vertex:
            parent = next(u for u in g.adjacency[v]
                          if u in bset and u in out and v in children[u])
            w = w * m.edge_weight[out[parent], :]
        total = w.sum()
        if total <= 0:
            raise FrozenSiteError("block has no legal filling under its boundary")
        out[v] = sample_from(w / total, uniforms[k])
    return out


def block_resample(m: Model, g: Graph, sigma, block: Sequence[int], rng) -> np.ndarray:
    """Replace the spins on ``block`` by an exact draw from the Gibbs law
    conditional on the rest of ``sigma``.

    Subtree blocks use top-down conditional sampling (for Ising this is the
    broadcast with boundary fields); other blocks are enumerated exactly,
    which bounds their size.
    """
    rng = _as_rng(rng)
    sigma = np.array(sigma, dtype=np.int8)
    structure = _block_tree_structure(g, block)
    if structure is not None:
        root_vertex, children, order = structure
        bset = set(block)
        psi = _block_messages(m, g, sigma, order, children, bset)
        uniforms = rng.random(len(order))
        drawn = _sample_block_topdown(m, g, sigma, root_vertex, children, order,
                                      psi, bset, uniforms)
        for v, a in drawn.items():
            sigma[v] = a
        return sigma
    return _block_resample_enumerated(m, g, sigma, block, rng)


def _block_resample_enumerated(m, g, sigma, block, rng):
    from .errors import FrozenSiteError

    A = m.alphabet_size
    if A ** len(block) > BLOCK_ENUM_LIMIT:
        raise SizeError("non-subtree block too large for exact enumeration")
    block = list(block)
    bset = set(block)
    fw = m.field_weights(g.n)
    fillings = np.array(np.meshgrid(*[range(A)] * len(block),
                                    indexing="ij")).reshape(len(block), -1).T
    weights = np.ones(len(fillings))
    pos = {v: i for i, v in enumerate(block)}
    for i, v in enumerate(block):
        weights *= fw[v][fillings[:, i]]
        for u in g.adjacency[v]:
            if u in bset:
                if u > v:
                    weights *= m.edge_weight[fillings[:, i], fillings[:, pos[u]]]
            else:
                weights *= m.edge_weight[fillings[:, i], sigma[u]]
    total = weights.sum()
    if total <= 0:
        raise FrozenSiteError("block has no legal filling under its boundary")
    choice = rng.choice(len(fillings), p=weights / total)
    out = sigma.copy()
    out[block] = fillings[choice]
    return out


def coupled_block_resample(m: Model, g: Graph, sigma, eta, block, rng):
    """Resample ``block`` in both chains with shared per-vertex uniforms
    (quantile coupling of the two conditional laws); equal boundaries give
    identical draws."""
    structure = _block_tree_structure(g, block)
    if structure is None:
        raise SizeError("coupled resampling requires a subtree block")
    rng = _as_rng(rng)
    root_vertex, children, order = structure
    bset = set(block)
    uniforms = rng.random(len(order))
    out_s = np.array(sigma, dtype=np.int8)
    out_e = np.array(eta, dtype=np.int8)
    psi_s = _block_messages(m, g, out_s, order, children, bset)
    psi_e = _block_messages(m, g, out_e, order, children, bset)
    drawn_s = _sample_block_topdown(m, g, out_s, root_vertex, children, order,
                                    psi_s, bset, uniforms)
    drawn_e = _sample_block_topdown(m, g, out_e, root_vertex, children, order,
                                    psi_e, bset, uniforms)
    for v in order:
        out_s[v] = drawn_s[v]
        out_e[v] = drawn_e[v]
    return out_s, out_e


# ---------------------------------------------------------------------------
# coupled single-site dynamics
# ---------------------------------------------------------------------------

def coupled_step(m: Model, g: Graph, sigma, eta, rng,
                 frozen: Optional[set] = None):
    """One shared clock ring for the pair (sigma, eta).

    Rules: same vertex for both chains; inside the frozen set eta keeps its
    value while sigma updates; with agreeing neighborhoods the chains make
    the identical move; otherwise the two conditional laws are coupled
    through one shared uniform (monotone coupling, maximal for two spins).
    """
    rng = _as_rng(rng)
    sigma = np.array(sigma, dtype=np.int8)
    eta = np.array(eta, dtype=np.int8)
    v = int(rng.integers(g.n))
    u = rng.random()
    dist_s = heat_bath_distribution(m, g, sigma, v)
    sigma[v] = sample_from(dist_s, u)
    if frozen is not None and v in frozen:
        return sigma, eta, v
    if all(sigma[w] == eta[w] for w in g.adjacency[v]):
        eta[v] = sigma[v]
    else:
        dist_e = heat_bath_distribution(m, g, eta, v)
        eta[v] = sample_from(dist_e, u)
    return sigma, eta, v


def coupling_time_monotone(m: Model, g: Graph, t_max: float, rng):
    """Grand coupling of the all-plus and all-minus Ising chains under
    shared clocks and uniforms; returns (time, coalesced flag).

    A censored run returns (t_max, False) explicitly.
    """
    if m.alphabet_size != 2:
        raise ValueError("monotone coupling probe is for two-spin models")
    rng = _as_rng(rng)
    top = np.ones(g.n, dtype=np.int8)
    bottom = np.zeros(g.n, dtype=np.int8)
    disagree = g.n
    t = 0.0
    while True:
        t += rng.exponential(1.0 / g.n)
        if t >= t_max:
            return t_max, False
        v = int(rng.integers(g.n))
        u = rng.random()
        before = top[v] != bottom[v]
        top[v] = sample_from(heat_bath_distribution(m, g, top, v), u)
        bottom[v] = sample_from(heat_bath_distribution(m, g, bottom, v), u)
        after = top[v] != bottom[v]
        disagree += int(after) - int(before)
        if disagree == 0:
            return t, True


# ---------------------------------------------------------------------------
# first-passage disagreement times
# ---------------------------------------------------------------------------

def fpp_disagreement_time(g: Graph, B, A, rng) -> float:
    """First time a disagreement seeded on B can reach A.

    t_v is the first clock ring at v (v in B) or the first ring after the
    minimum of the neighbors' times (v outside B); returns min over A.
    By memorylessness this is first-passage percolation with one rate-1
    exponential passage time per vertex, computed by Dijkstra.
    """
    import heapq

    rng = _as_rng(rng)
    xi = rng.exponential(1.0, size=g.n)
    A = set(A)
    dist = np.full(g.n, np.inf)
    heap = []
    for v in B:
        dist[v] = xi[v]
        heapq.heappush(heap, (xi[v], v))
    best = np.inf
    while heap:
        t, v = heapq.heappop(heap)
        if t > dist[v]:
            continue
        if v in A:
            best = t
            break
        for w in g.adjacency[v]:
            cand = t + xi[w]
            if cand < dist[w]:
                dist[w] = cand
                heapq.heappush(heap, (cand, w))
    return float(best)


def fpp_disagreement_times(g: Graph, B, A, reps: int, rng) -> np.ndarray:
    """Vectorized replicas of ``fpp_disagreement_time``.

    Identical law: per replica one exponential per vertex, then vertex-
    weighted shortest-path relaxation from B (Bellman-Ford over at most
    diameter rounds, run simultaneously for all replicas).
    """
    rng = _as_rng(rng)
    xi = rng.exponential(1.0, size=(reps, g.n))
    t = np.full((reps, g.n), np.inf)
    B = list(B)
    t[:, B] = xi[:, B]
    nbr_lists = [list(g.adjacency[v]) for v in range(g.n)]
    for _ in range(g.n):
        best_nbr = np.full((reps, g.n), np.inf)
        for v in range(g.n):
            if nbr_lists[v]:
                best_nbr[:, v] = t[:, nbr_lists[v]].min(axis=1)
        updated = np.minimum(t, best_nbr + xi)
        updated[:, B] = t[:, B]
        if np.array_equal(updated, t):
            break
        t = updated
    return t[:, list(A)].min(axis=1)
