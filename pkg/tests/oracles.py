"""Independent brute-force oracles used by the test suite.

Everything here deliberately avoids the library's own code paths: the
hyperbolic oracle works with floating-point geometry in the Poincare disk,
the generator oracle builds dense matrices with plain Python loops, and the
cut-width oracle tries every permutation.
"""

from __future__ import annotations

import cmath
import itertools
import math

import numpy as np


# ---------------------------------------------------------------------------
# {p,q} tiling ball via Poincare-disk isometries
# ---------------------------------------------------------------------------

def _mat_mul(a, b):
    return (
        a[0] * b[0] + a[1] * b[2],
        a[0] * b[1] + a[1] * b[3],
        a[2] * b[0] + a[3] * b[2],
        a[2] * b[1] + a[3] * b[3],
    )


def _mat_apply(m, z):
    return (m[0] * z + m[1]) / (m[2] * z + m[3])


def _rotation(phi):
    e = cmath.exp(1j * phi / 2)
    return (e, 0, 0, e.conjugate())


def _translation(t):
    c, s = math.cosh(t / 2), math.sinh(t / 2)
    return (c, s, s, c)


def _hyperbolic_distance(z, w):
    num = abs(z - w)
    den = abs(1 - z.conjugate() * w)
    return 2 * math.atanh(num / den)


def geometric_ball_layers(p, q, r):
    """Vertex counts per graph-distance layer of the {p,q} ball, plus the
    total induced edge count, from a metric embedding.

    Vertices are generated as frames (isometries applied to the origin):
    the neighbor in direction k is reached by rotating 2*pi*k/q, translating
    one edge length, and turning around so direction 0 points back.
    """
    edge_len = 2 * math.acosh(math.cos(math.pi / p) / math.sin(math.pi / q))
    turn = _rotation(math.pi)
    steps = [_mat_mul(_mat_mul(_rotation(2 * math.pi * k / q),
                               _translation(edge_len)), turn)
             for k in range(q)]

    def key(z):
        return (round(z.real, 6), round(z.imag, 6))

    ident = (1, 0, 0, 1)
    frames = [ident]
    positions = [0j]
    index = {key(0j): 0}
    dist = [0]
    head = 0
    while head < len(frames):
        f = frames[head]
        if dist[head] >= r:
            head += 1
            continue
        for k in range(q):
            nf = _mat_mul(f, steps[k])
            z = _mat_apply(nf, 0j)
            kk = key(z)
            found = None
            for dx in (-1e-6, 0, 1e-6):
                for dy in (-1e-6, 0, 1e-6):
                    cand = (round(z.real + dx, 6), round(z.imag + dy, 6))
                    if cand in index:
                        found = index[cand]
                        break
                if found is not None:
                    break
            if found is None:
                index[kk] = len(frames)
                frames.append(nf)
                positions.append(z)
                dist.append(dist[head] + 1)
        head += 1
    # adjacency among generated vertices: pairs at one edge length
    n = len(positions)
    edges = set()
    for i in range(n):
        for j in range(i + 1, n):
            if abs(_hyperbolic_distance(positions[i], positions[j]) - edge_len) < 1e-6:
                edges.add((i, j))
    # recompute true graph distances from the center over these edges
    adj = [[] for _ in range(n)]
    for i, j in edges:
        adj[i].append(j)
        adj[j].append(i)
    gd = [-1] * n
    gd[0] = 0
    queue = [0]
    while queue:
        u = queue.pop(0)
        for w in adj[u]:
            if gd[w] < 0:
                gd[w] = gd[u] + 1
                queue.append(w)
    layers = [0] * (r + 1)
    kept = set()
    for v in range(n):
        if 0 <= gd[v] <= r:
            layers[gd[v]] += 1
            kept.add(v)
    ball_edges = sum(1 for i, j in edges if i in kept and j in kept)
    return layers, ball_edges


# ---------------------------------------------------------------------------
# dense generator via plain loops
# ---------------------------------------------------------------------------

def dense_generator(model, graph):
    """(states, weights, Q): all |A|^n spin vectors, their unnormalized Gibbs
    weights, and the dense heat-bath generator restricted to legal states."""
    n = graph.n
    A = model.alphabet_size
    states = list(itertools.product(range(A), repeat=n))
    edges = graph.edges()

    def weight(sigma):
        w = 1.0
        for u, v in edges:
            w *= model.edge_weight[sigma[u], sigma[v]]
        if model.field is not None:
            for v in range(n):
                w *= model.field[v][sigma[v]]
        return w

    weights = [weight(s) for s in states]
    legal = [i for i, w in enumerate(weights) if w > 0]
    pos = {states[i]: k for k, i in enumerate(legal)}
    m = len(legal)
    Q = np.zeros((m, m))
    for k, i in enumerate(legal):
        sigma = states[i]
        for v in range(n):
            conditional = []
            for a in range(A):
                w = 1.0
                for u in graph.adjacency[v]:
                    w *= model.edge_weight[a, sigma[u]]
                if model.field is not None:
                    w *= model.field[v][a]
                conditional.append(w)
            total = sum(conditional)
            for a in range(A):
                if a == sigma[v] or conditional[a] == 0:
                    continue
                tau = sigma[:v] + (a,) + sigma[v + 1:]
                Q[k, pos[tau]] += conditional[a] / total
    for k in range(m):
        Q[k, k] = -Q[k].sum()
    probs = np.array([weights[i] for i in legal])
    probs = probs / probs.sum()
    return [states[i] for i in legal], probs, Q


def dense_gap(probs, Q):
    """Second-smallest eigenvalue of -Q after the reversible symmetrization."""
    d = np.sqrt(probs)
    S = (d[:, None] / d[None, :]) * Q
    S = 0.5 * (S + S.T)
    eig = np.linalg.eigvalsh(-S)
    return eig[1]


# ---------------------------------------------------------------------------
# cut-width by exhaustive permutations
# ---------------------------------------------------------------------------

def cutwidth_bruteforce(graph):
    best = None
    n = graph.n
    for perm in itertools.permutations(range(n)):
        placed = set()
        cut = 0
        width = 0
        for v in perm:
            cut += sum(1 for w in graph.adjacency[v] if w not in placed)
            cut -= sum(1 for w in graph.adjacency[v] if w in placed)
            placed.add(v)
            width = max(width, cut)
        if best is None or width < best:
            best = width
    return best


# ---------------------------------------------------------------------------
# broadcast distribution by edge-flip enumeration
# ---------------------------------------------------------------------------

def broadcast_distribution(b, r, eps):
    """Exact law of the tree broadcast as a dict spin-tuple -> probability,
    spins valued in {-1,+1}, vertices in BFS order."""
    n = (b ** (r + 1) - 1) // (b - 1)
    out = {}
    for root_spin in (-1, 1):
        for flips in itertools.product((0, 1), repeat=n - 1):
            spins = [root_spin]
            prob = 0.5
            for v in range(1, n):
                parent = (v - 1) // b
                flip = flips[v - 1]
                spins.append(-spins[parent] if flip else spins[parent])
                prob *= eps if flip else (1 - eps)
            key = tuple(spins)
            out[key] = out.get(key, 0.0) + prob
    return out
