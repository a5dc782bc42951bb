"""Spin systems: alphabet, edge interaction table, external fields, the
Gibbs weight, the heat-bath single-site kernel, and the tree broadcast
sampler.

Ising spins {-1,+1} are stored as alphabet indices {0,1}; correlation
formulas always use the +-1 values (``spin_values``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import EmptyLegalSetError, FrozenSiteError, SizeError
from .graphs import Graph, bary_tree_size, tree_parent


@dataclass(frozen=True)
class Model:
    """A local spin system.

    ``edge_weight`` is one shared |A| x |A| nonnegative table (symmetric for
    every model in scope).  ``field`` is an optional per-vertex array of
    strictly positive multiplicative weights, shape (n, |A|); None means
    no external field.  ``hard`` is set when the table has zero entries.
    """

    alphabet_size: int
    edge_weight: np.ndarray
    field: Optional[np.ndarray] = None
    kind: str = "generic"
    beta: Optional[float] = None
    hard: bool = False

    def __post_init__(self):
        w = np.asarray(self.edge_weight, dtype=float)
        if w.shape != (self.alphabet_size, self.alphabet_size):
            raise ValueError("edge_weight must be |A| x |A|")
        if (w < 0).any():
            raise ValueError("edge weights must be nonnegative")
        if not (w.max(axis=1) > 0).all():
            raise ValueError("every edge-weight row needs a positive entry")
        object.__setattr__(self, "edge_weight", w)
        object.__setattr__(self, "hard", bool((w == 0).any()))
        if self.field is not None:
            f = np.asarray(self.field, dtype=float)
            if (f <= 0).any():
                raise ValueError("field weights must be strictly positive")
            object.__setattr__(self, "field", f)

    # -- Ising accessors ---------------------------------------------------

    @property
    def eps(self) -> float:
        """Broadcast flip probability (1 + e^{2 beta})^{-1}."""
        if self.beta is None:
            raise ValueError("eps is only defined for models with a beta")
        return 1.0 / (1.0 + math.exp(2.0 * self.beta))

    @property
    def theta(self) -> float:
        """1 - 2*eps, the per-edge correlation of the broadcast."""
        return 1.0 - 2.0 * self.eps

    @property
    def spin_values(self) -> np.ndarray:
        """Alphabet indices mapped to spins; only meaningful for Ising."""
        return 2.0 * np.arange(self.alphabet_size) - 1.0

    def with_field(self, field: np.ndarray) -> "Model":
        return Model(alphabet_size=self.alphabet_size,
                     edge_weight=self.edge_weight, field=field,
                     kind=self.kind, beta=self.beta)

    def field_weights(self, n: int) -> np.ndarray:
        """Per-vertex field table, materialized as all-ones when absent."""
        if self.field is None:
            return np.ones((n, self.alphabet_size))
        if self.field.shape[0] != n:
            raise ValueError(f"field is for {self.field.shape[0]} vertices, "
                             f"graph has {n}")
        return self.field


def ising_model(beta: float, field=None, n: Optional[int] = None) -> Model:
    """Ferromagnetic Ising: edge table e^{beta * s * t}, s,t in {-1,+1}.

    ``field`` may be None, a constant H, or a per-vertex sequence of H
    values (requires ``n`` for the constant form); stored as weights
    e^{-H}, e^{+H} per vertex.
    """
    if beta < 0:
        raise ValueError("ferromagnetic scope only: beta must be >= 0")
    table = np.array([[math.exp(beta), math.exp(-beta)],
                      [math.exp(-beta), math.exp(beta)]])
    fw = None
    if field is not None:
        h = np.asarray(field, dtype=float)
        if h.ndim == 0:
            if n is None:
                raise ValueError("constant field needs the vertex count n")
            h = np.full(n, float(h))
        fw = np.stack([np.exp(-h), np.exp(h)], axis=1)
    return Model(alphabet_size=2, edge_weight=table, field=fw,
                 kind="ising", beta=beta)


def potts_model(q: int, beta: float) -> Model:
    """q-state Potts: weight e^{beta} on agreeing endpoints, 1 otherwise."""
    if q < 2:
        raise ValueError("Potts needs q >= 2")
    if beta < 0:
        raise ValueError("ferromagnetic scope only: beta must be >= 0")
    table = np.ones((q, q))
    np.fill_diagonal(table, math.exp(beta))
    return Model(alphabet_size=q, edge_weight=table, kind="potts", beta=beta)


def coloring_model(q: int) -> Model:
    """Proper q-coloring: hard constraint, indicator of disagreement."""
    if q < 2:
        raise ValueError("coloring needs q >= 2")
    table = 1.0 - np.eye(q)
    return Model(alphabet_size=q, edge_weight=table, kind="coloring")


# ---------------------------------------------------------------------------
# weights and kernels
# ---------------------------------------------------------------------------

def gibbs_weight(m: Model, g: Graph, sigma) -> float:
    """Unnormalized Gibbs weight: product of edge weights times fields."""
    sigma = np.asarray(sigma)
    w = 1.0
    for u, v in g.edges():
        w *= m.edge_weight[sigma[u], sigma[v]]
        if w == 0.0:
            return 0.0
    if m.field is not None:
        fw = m.field_weights(g.n)
        w *= float(np.prod(fw[np.arange(g.n), sigma]))
    return float(w)


def heat_bath_distribution(m: Model, g: Graph, sigma, v: int) -> np.ndarray:
    """Conditional law of the spin at v given the rest of sigma.

    P(a) is proportional to field_v(a) times the product over neighbors w
    of edge_weight(a, sigma_w); raises FrozenSiteError when every value is
    blocked by hard constraints.
    """
    sigma = np.asarray(sigma)
    weights = np.ones(m.alphabet_size)
    for w in g.adjacency[v]:
        weights = weights * m.edge_weight[:, sigma[w]]
    if m.field is not None:
        weights = weights * m.field_weights(g.n)[v]
    total = weights.sum()
    if total <= 0.0:
        raise FrozenSiteError(f"site {v} has no legal value under its boundary")
    return weights / total


def sample_from(dist: np.ndarray, u: float) -> int:
    """Inverse-CDF draw in alphabet order from a single uniform variate.

    Shared-uniform draws through this function realize the monotone
    (quantile) coupling used by the coupled dynamics.
    """
    acc = 0.0
    for a, p in enumerate(dist):
        acc += p
        if u < acc:
            return a
    return len(dist) - 1


# ---------------------------------------------------------------------------
# broadcast representation
# ---------------------------------------------------------------------------

def _as_rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def broadcast_sample(b: int, r: int, eps: float, rng) -> np.ndarray:
    """One top-down broadcast configuration on the b-ary tree T_r.

    The root is uniform; each child copies its parent with probability
    1 - eps.  Returns alphabet indices (0 = spin -1, 1 = spin +1) in the
    BFS vertex order used by ``build_bary_tree``.
    """
    if not (0.0 <= eps <= 0.5):
        raise ValueError("eps must lie in [0, 1/2]")
    rng = _as_rng(rng)
    n = bary_tree_size(b, r)
    spins = np.empty(n, dtype=np.int8)
    spins[0] = rng.integers(0, 2)
    flips = rng.random(n - 1) < eps
    for v in range(1, n):
        parent = tree_parent(v, b)
        spins[v] = (1 - spins[parent]) if flips[v - 1] else spins[parent]
    return spins


def broadcast_sample_many(b: int, r: int, eps: float, reps: int, rng) -> np.ndarray:
    """Vectorized broadcast: (reps, n) array of alphabet indices."""
    if not (0.0 <= eps <= 0.5):
        raise ValueError("eps must lie in [0, 1/2]")
    rng = _as_rng(rng)
    n = bary_tree_size(b, r)
    spins = np.empty((reps, n), dtype=np.int8)
    spins[:, 0] = rng.integers(0, 2, size=reps)
    flips = rng.random((reps, n - 1)) < eps
    for v in range(1, n):
        parent = tree_parent(v, b)
        spins[:, v] = np.where(flips[:, v - 1], 1 - spins[:, parent],
                               spins[:, parent])
    return spins


# ---------------------------------------------------------------------------
# ergodicity
# ---------------------------------------------------------------------------

def is_ergodic(m: Model, g: Graph, limit: int = 1 << 22) -> bool:
    """True iff single-site moves connect all legal configurations.

    Union-find over the enumerated legal state space; raises SizeError
    beyond ``limit`` raw states and EmptyLegalSetError when nothing is
    legal.
    """
    from . import exact  # local import to avoid a cycle

    table = exact.enumerate_gibbs(m, g, limit=limit)
    k = len(table.probs)
    if k == 0:
        raise EmptyLegalSetError("no legal configurations")
    parent = list(range(k))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[rx] = ry

    lookup = table.raw_to_legal
    strides = table.strides
    configs = table.configs
    for idx in range(k):
        sigma = configs[idx]
        for v in range(g.n):
            for a in range(m.alphabet_size):
                if a == sigma[v]:
                    continue
                raw = table.raw_index(idx) + (a - int(sigma[v])) * strides[v]
                j = lookup[raw]
                if j >= 0:
                    # positive heat-bath rate iff the target is legal
                    union(idx, int(j))
    root = find(0)
    return all(find(i) == root for i in range(k))
