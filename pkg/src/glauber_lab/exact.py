"""Brute-force ground truth: enumerate legal configurations, assemble the
reversible CTMC generator for the heat-bath dynamics, and compute exact
spectral gaps, Dirichlet forms, covariances, and mutual information.

Deliberately naive (no transfer-matrix or belief-propagation shortcuts):
this module is the oracle everything else is checked against.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import EmptyLegalSetError, NonErgodicError, NumericError, SizeError
from .graphs import Graph
from .models import Model, is_ergodic

DEFAULT_STATE_LIMIT = 1 << 22
DENSE_EIG_LIMIT = 4096
ITERATIVE_EIG_LIMIT = 1 << 17
EIG_RESIDUAL_TOL = 1e-8


@dataclass
class GibbsTable:
    """All legal configurations in lexicographic spin-vector order, with
    exact probabilities and the partition value Z."""

    configs: np.ndarray          # (k, n) uint8, lexicographic order
    probs: np.ndarray            # (k,) normalized
    Z: float
    alphabet_size: int
    raw_to_legal: np.ndarray     # (|A|^n,) int32, -1 for illegal raw states
    strides: np.ndarray          # digit place values of each vertex

    def raw_index(self, legal_idx: int) -> int:
        return int(self.configs[legal_idx].astype(np.int64) @ self.strides)

    def index_of(self, sigma) -> int:
        raw = int(np.asarray(sigma, dtype=np.int64) @ self.strides)
        idx = int(self.raw_to_legal[raw])
        if idx < 0:
            raise KeyError("configuration is not legal")
        return idx

    def expectation(self, values: np.ndarray) -> float:
        return float(self.probs @ values)

    def min_prob(self) -> float:
        return float(self.probs.min())

    def to_json(self) -> str:
        return json.dumps({
            "alphabet_size": self.alphabet_size,
            "Z": self.Z,
            "configs": self.configs.tolist(),
            "probs": self.probs.tolist(),
        })

    @staticmethod
    def from_json(text: str) -> "GibbsTable":
        obj = json.loads(text)
        configs = np.array(obj["configs"], dtype=np.uint8)
        n = configs.shape[1]
        A = obj["alphabet_size"]
        strides = _strides(A, n)
        raw = configs.astype(np.int64) @ strides
        lookup = np.full(A ** n, -1, dtype=np.int64)
        lookup[raw] = np.arange(len(configs))
        return GibbsTable(configs=configs, probs=np.array(obj["probs"]),
                          Z=obj["Z"], alphabet_size=A,
                          raw_to_legal=lookup, strides=strides)


@dataclass
class GeneratorMatrix:
    """Sparse single-site rate matrix over the legal configurations."""

    rates: sp.csr_matrix
    table: GibbsTable

    @property
    def dim(self) -> int:
        return self.rates.shape[0]

    def symmetrized(self) -> sp.csr_matrix:
        """Similarity transform D^{1/2} Q D^{-1/2} with D = diag(mu);
        symmetric by reversibility."""
        d = np.sqrt(self.table.probs)
        S = sp.diags(d) @ self.rates @ sp.diags(1.0 / d)
        return ((S + S.T) * 0.5).tocsr()

    def reversibility_defect(self) -> float:
        """max |mu_i q_ij - mu_j q_ji| over all transitions."""
        mu = self.table.probs
        F = sp.diags(mu) @ self.rates
        return float(abs(F - F.T).max())


@dataclass
class SpectralReport:
    lambda2: float
    tau2: float
    method: str
    residual: float
    dim: int = 0

    def to_json(self) -> str:
        return json.dumps({"lambda2": self.lambda2, "tau2": self.tau2,
                           "method": self.method, "residual": self.residual,
                           "dim": self.dim})

    @staticmethod
    def from_json(text: str) -> "SpectralReport":
        obj = json.loads(text)
        return SpectralReport(lambda2=obj["lambda2"], tau2=obj["tau2"],
                              method=obj["method"], residual=obj["residual"],
                              dim=obj.get("dim", 0))


def _strides(alphabet_size: int, n: int) -> np.ndarray:
    return np.array([alphabet_size ** (n - 1 - v) for v in range(n)],
                    dtype=np.int64)


# ---------------------------------------------------------------------------
# enumeration
# ---------------------------------------------------------------------------

def enumerate_gibbs(m: Model, g: Graph, limit: int = DEFAULT_STATE_LIMIT) -> GibbsTable:
    """All legal configurations with normalized probabilities.

    Raw states are enumerated in lexicographic spin-vector order (vertex 0
    is the most significant digit), which fixes the legal indexing for
    reproducibility.
    """
    A = m.alphabet_size
    total = A ** g.n
    if total > limit:
        raise SizeError(f"{total} raw states exceed the limit {limit}")
    digits = np.empty((total, g.n), dtype=np.uint8)
    idx = np.arange(total, dtype=np.int64)
    strides = _strides(A, g.n)
    for v in range(g.n):
        digits[:, v] = (idx // strides[v]) % A
    weights = np.ones(total)
    for u, v in g.edges():
        weights *= m.edge_weight[digits[:, u], digits[:, v]]
    if m.field is not None:
        fw = m.field_weights(g.n)
        for v in range(g.n):
            weights *= fw[v][digits[:, v]]
    legal = np.nonzero(weights > 0.0)[0]
    if len(legal) == 0:
        raise EmptyLegalSetError("no configuration has positive weight")
    Z = float(weights[legal].sum())
    lookup = np.full(total, -1, dtype=np.int64)
    lookup[legal] = np.arange(len(legal))
    return GibbsTable(configs=digits[legal], probs=weights[legal] / Z, Z=Z,
                      alphabet_size=A, raw_to_legal=lookup, strides=strides)


def build_generator(m: Model, g: Graph, limit: int = DEFAULT_STATE_LIMIT,
                    table: Optional[GibbsTable] = None,
                    check_ergodic: bool = True) -> GeneratorMatrix:
    """Heat-bath generator: rate K[sigma -> sigma_v^a] for each single-site
    move to a legal target, diagonal minus the row sum."""
    gt = table if table is not None else enumerate_gibbs(m, g, limit=limit)
    k = len(gt.probs)
    if check_ergodic and m.hard:
        if not is_ergodic(m, g, limit=limit):
            raise NonErgodicError(
                "single-site moves do not connect the legal configurations "
                "(the spectral gap would be 0)")
    raws = gt.configs.astype(np.int64) @ gt.strides
    rows, cols, vals = [], [], []
    diag = np.zeros(k)
    fw = m.field_weights(g.n)
    for v in range(g.n):
        cond = np.empty((k, m.alphabet_size))
        for a in range(m.alphabet_size):
            w = np.full(k, fw[v][a])
            for u in g.adjacency[v]:
                w *= m.edge_weight[a][gt.configs[:, u]]
            cond[:, a] = w
        cond /= cond.sum(axis=1, keepdims=True)
        sigma_v = gt.configs[:, v].astype(np.int64)
        for a in range(m.alphabet_size):
            move = a - sigma_v
            active = np.nonzero(move != 0)[0]
            if len(active) == 0:
                continue
            targets = gt.raw_to_legal[raws[active] + move[active] * gt.strides[v]]
            ok = targets >= 0
            rows.append(active[ok])
            cols.append(targets[ok].astype(np.int64))
            vals.append(cond[active[ok], a])
        diag += cond[np.arange(k), sigma_v] - 1.0
    rows = np.concatenate(rows + [np.arange(k)])
    cols = np.concatenate(cols + [np.arange(k)])
    vals = np.concatenate(vals + [diag])
    Q = sp.coo_matrix((vals, (rows, cols)), shape=(k, k)).tocsr()
    return GeneratorMatrix(rates=Q, table=gt)


# ---------------------------------------------------------------------------
# spectral gaps
# ---------------------------------------------------------------------------

def spectral_gap(gen: GeneratorMatrix, gt: Optional[GibbsTable] = None) -> SpectralReport:
    """Spectral gap lambda2 of -L via the reversible symmetrization.

    Dense eigensolve up to 4096 states; above that a Lanczos run on the
    shifted matrix c*I + S (whose two top eigenvalues are c and c - lambda2),
    capped at ~2^17 states.  The eigenpair residual is always verified.
    """
    table = gt if gt is not None else gen.table
    k = gen.dim
    S = gen.symmetrized()
    if k <= DENSE_EIG_LIMIT:
        eigvals, eigvecs = np.linalg.eigh(-S.toarray())
        lam = float(eigvals[1])
        vec = eigvecs[:, 1]
        method = "dense-eigh"
    elif k <= ITERATIVE_EIG_LIMIT:
        shift = float(2.0 * abs(S.diagonal()).max() + 2.0)
        B = (S + sp.identity(k) * shift).tocsr()
        v0 = np.sqrt(table.probs)
        try:
            vals, vecs = spla.eigsh(B, k=2, which="LA", v0=v0,
                                    maxiter=200 * k, tol=0)
        except spla.ArpackNoConvergence as err:
            raise NumericError("Lanczos failed to converge", residual=None) from err
        order = np.argsort(vals)[::-1]
        lam = float(shift - vals[order[1]])
        vec = vecs[:, order[1]]
        method = "lanczos"
    else:
        raise SizeError(f"{k} states exceed the iterative eigensolver cap "
                        f"{ITERATIVE_EIG_LIMIT}")
    residual = float(np.linalg.norm((-S) @ vec - lam * vec))
    if residual > EIG_RESIDUAL_TOL:
        raise NumericError(f"eigenpair residual {residual:.2e} exceeds "
                           f"{EIG_RESIDUAL_TOL:.0e}", residual=residual)
    if lam <= 0.0:
        raise NonErgodicError("spectral gap is not positive")
    return SpectralReport(lambda2=lam, tau2=1.0 / lam, method=method,
                          residual=residual, dim=k)


def discrete_spectral_gap(gen: GeneratorMatrix, n_vertices: int) -> float:
    """Gap of the discrete kernel M = I + L/n (dense instances only)."""
    k = gen.dim
    if k > DENSE_EIG_LIMIT:
        raise SizeError("discrete gap check is dense-only")
    S = gen.symmetrized().toarray()
    M = np.eye(k) + S / n_vertices
    eigvals = np.linalg.eigvalsh(M)
    return float(1.0 - eigvals[-2])


def conditioned_spectral_gap(m: Model, g: Graph, a: int,
                             limit: int = DEFAULT_STATE_LIMIT) -> SpectralReport:
    """Gap with a phantom parent of the root frozen to spin a, realized as
    an extra multiplicative field on the root."""
    fw = m.field_weights(g.n).copy()
    fw[g.root] = fw[g.root] * m.edge_weight[:, a]
    conditioned = m.with_field(fw)
    gen = build_generator(conditioned, g, limit=limit)
    return spectral_gap(gen)


def mixing_time_bounds(tau2: float, min_prob: float):
    """The relaxation-to-mixing sandwich [tau2, tau2 (1 + log 1/min pi)]."""
    return (tau2, tau2 * (1.0 + math.log(1.0 / min_prob)))


# ---------------------------------------------------------------------------
# Dirichlet form and observables
# ---------------------------------------------------------------------------

def dirichlet_form(gen: GeneratorMatrix, gt: GibbsTable, values: np.ndarray) -> float:
    """(1/2) sum_{sigma,tau} mu(sigma) q(sigma->tau) (f(sigma)-f(tau))^2."""
    Q = gen.rates.tocoo()
    off = Q.row != Q.col
    rows, cols, rates = Q.row[off], Q.col[off], Q.data[off]
    mu = gt.probs
    diffs = values[rows] - values[cols]
    return float(0.5 * np.sum(mu[rows] * rates * diffs * diffs))


def exact_covariance(gt: GibbsTable, f_values: np.ndarray, g_values: np.ndarray) -> float:
    mu = gt.probs
    return float(mu @ (f_values * g_values) - (mu @ f_values) * (mu @ g_values))


def joint_distribution(gt: GibbsTable, A, B):
    """Joint probability table of (sigma_A, sigma_B) marginalized from mu."""
    A = list(A)
    B = list(B)
    _, a_labels = np.unique(gt.configs[:, A], axis=0, return_inverse=True)
    _, b_labels = np.unique(gt.configs[:, B], axis=0, return_inverse=True)
    na, nb = a_labels.max() + 1, b_labels.max() + 1
    joint = np.zeros((na, nb))
    np.add.at(joint, (a_labels, b_labels), gt.probs)
    return joint


def exact_mutual_information(gt: GibbsTable, A, B) -> float:
    """Mutual information of (sigma_A, sigma_B) in nats; zero-probability
    cells contribute 0."""
    joint = joint_distribution(gt, A, B)
    pa = joint.sum(axis=1)
    pb = joint.sum(axis=0)
    mask = joint > 0.0
    ratio = joint[mask] / np.outer(pa, pb)[mask]
    return float(np.sum(joint[mask] * np.log(ratio)))


def stationary_from_generator(gen: GeneratorMatrix) -> np.ndarray:
    """Left null vector of Q, normalized: the stationary law recovered from
    the rates alone (no use of the Gibbs table)."""
    k = gen.dim
    if k > DENSE_EIG_LIMIT:
        raise SizeError("stationary-vector extraction is dense-only")
    QT = gen.rates.T.toarray()
    # solve Q^T x = 0 with sum(x) = 1 via a bordered least-squares system
    Asys = np.vstack([QT, np.ones((1, k))])
    b = np.zeros(k + 1)
    b[-1] = 1.0
    x, *_ = np.linalg.lstsq(Asys, b, rcond=None)
    return x
