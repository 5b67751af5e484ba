"""Dimensionality reduction via fuzzy k-NN graph embedding.

Pipeline: exact k nearest neighbors -> per-point membership calibration
(rho, sigma) -> symmetrized fuzzy graph -> negative-sampling SGD on the
cross-entropy between high- and low-dimensional memberships, starting from
a spectral layout of the graph Laplacian. Everything is deterministic for a
fixed seed when run in sequential mode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from numba import njit, prange
from scipy import sparse
from scipy.linalg import eigh
from scipy.optimize import curve_fit
from sklearn.base import BaseEstimator
from sklearn.utils import check_array

from .errors import ParamError

SIGMA_MIN = 1e-12
SIGMA_MAX = 1e12
SIGMA_TOL = 1e-5


@dataclass(frozen=True)
class ReduceParams:
    n_neighbors: int = 15
    n_components: int = 5
    min_dist: float = 0.0
    n_epochs: int = 200
    seed: int = 42
    a: float | None = None  # fitted from min_dist when None
    b: float | None = None
    learning_rate: float = 1.0
    negative_samples: int = 5
    metric: str = "cosine"

    def __post_init__(self):
        if self.n_neighbors < 2:
            raise ParamError("n_neighbors must be >= 2")
        if self.n_components < 2:
            raise ParamError("n_components must be >= 2")
        if self.n_epochs < 0:
            raise ParamError("n_epochs must be >= 0")
        if self.min_dist < 0:
            raise ParamError("min_dist must be >= 0")
        if self.metric not in ("cosine", "euclidean"):
            raise ParamError(f"unknown metric {self.metric!r}")

    def resolve_kernel(self) -> "ReduceParams":
        """Fill in (a, b) from min_dist when not explicitly set."""
        if self.a is not None and self.b is not None:
            return self
        a, b = fit_kernel(self.min_dist)
        return replace(self, a=a, b=b)


@dataclass
class FuzzyGraph:
    edge_i: np.ndarray  # int64, edge_i[e] < edge_j[e]
    edge_j: np.ndarray
    weights: np.ndarray  # float64 in (0, 1]
    n: int

    @property
    def edges(self) -> list[tuple[int, int, float]]:
        return [
            (int(i), int(j), float(w))
            for i, j, w in zip(self.edge_i, self.edge_j, self.weights)
        ]


def pairwise_distances(X: np.ndarray, metric: str) -> np.ndarray:
    """Dense pairwise distance matrix; cosine assumes rows are unit or zero."""
    X = np.asarray(X, dtype=np.float64)
    if metric == "cosine":
        norms = np.linalg.norm(X, axis=1)
        safe = np.where(norms > 0.0, norms, 1.0)
        Xn = X / safe[:, None]
        D = 1.0 - Xn @ Xn.T
        np.clip(D, 0.0, 2.0, out=D)
    elif metric == "euclidean":
        sq = np.sum(X * X, axis=1)
        D = sq[:, None] + sq[None, :] - 2.0 * (X @ X.T)
        np.maximum(D, 0.0, out=D)
        np.sqrt(D, out=D)
    else:
        raise ParamError(f"unknown metric {metric!r}")
    np.fill_diagonal(D, 0.0)
    return D


def knn(X, k: int, metric: str = "euclidean") -> tuple[np.ndarray, np.ndarray]:
    """Exact k nearest neighbors per point, self excluded.

    Returns (indices, distances), both (n, k), distances ascending with ties
    broken by lower index.
    """
    X = np.asarray(X, dtype=np.float64)
    n = X.shape[0]
    if k >= n:
        raise ParamError(f"k={k} must be < n={n}")
    D = pairwise_distances(X, metric)
    np.fill_diagonal(D, np.inf)
    indices = np.argsort(D, axis=1, kind="stable")[:, :k]
    dists = np.take_along_axis(D, indices, axis=1)
    return indices, dists


def smooth_knn(dists: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Calibrate (rho, sigma) per point.

    rho is the smallest non-zero neighbor distance (0 when all are zero);
    sigma solves sum_j exp(-max(0, d_j - rho) / sigma) = log2(k) by bisection,
    clamped to [1e-12, 1e12] when the target is unreachable.
    """
    dists = np.asarray(dists, dtype=np.float64)
    n = dists.shape[0]
    target = math.log2(k)

    nonzero = np.where(dists > 0.0, dists, np.inf)
    rho = np.min(nonzero, axis=1)
    rho[~np.isfinite(rho)] = 0.0

    adj = np.maximum(0.0, dists - rho[:, None])

    def membership_sum(sig: np.ndarray) -> np.ndarray:
        with np.errstate(over="ignore", under="ignore"):
            return np.exp(-adj / sig[:, None]).sum(axis=1)

    lo = np.full(n, SIGMA_MIN)
    hi = np.full(n, SIGMA_MAX)
    f_lo = membership_sum(lo)
    f_hi = membership_sum(hi)
    too_low = f_lo >= target  # even the smallest sigma overshoots
    too_high = f_hi <= target

    mid = (lo + hi) / 2.0
    for _ in range(128):
        f_mid = membership_sum(mid)
        if np.all(np.abs(f_mid - target) <= SIGMA_TOL):
            break
        above = f_mid > target
        hi = np.where(above, mid, hi)
        lo = np.where(above, lo, mid)
        mid = (lo + hi) / 2.0

    sigma = np.where(too_low, SIGMA_MIN, np.where(too_high, SIGMA_MAX, mid))
    return rho, sigma


def fuzzy_graph(
    indices: np.ndarray, dists: np.ndarray, rho: np.ndarray, sigma: np.ndarray
) -> FuzzyGraph:
    """Directed memberships exp(-max(0, d - rho_i) / sigma_i), symmetrized
    with w = a + b - a*b; zero-weight edges dropped."""
    n, k = indices.shape
    rows = np.repeat(np.arange(n), k)
    cols = np.asarray(indices, dtype=np.int64).ravel()
    with np.errstate(over="ignore", under="ignore"):
        vals = np.exp(
            -np.maximum(0.0, dists - rho[:, None]) / sigma[:, None]
        ).ravel()
    P = sparse.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
    S = (P + P.T - P.multiply(P.T)).tocoo()
    mask = (S.row < S.col) & (S.data > 0.0)
    order = np.lexsort((S.col[mask], S.row[mask]))
    return FuzzyGraph(
        edge_i=S.row[mask][order].astype(np.int64),
        edge_j=S.col[mask][order].astype(np.int64),
        weights=S.data[mask][order].astype(np.float64),
        n=n,
    )


def build_fuzzy_graph(X, n_neighbors: int, metric: str = "cosine") -> FuzzyGraph:
    """knn -> smooth_knn -> fuzzy_graph in one step."""
    indices, dists = knn(X, n_neighbors, metric)
    rho, sigma = smooth_knn(dists, n_neighbors)
    return fuzzy_graph(indices, dists, rho, sigma)


def fit_kernel(min_dist: float) -> tuple[float, float]:
    """Least-squares fit of phi(d) = 1 / (1 + a d^(2b)) to the target curve
    (1 for d <= min_dist, exp(-(d - min_dist)) beyond), over d in [0, 3]."""
    if min_dist < 0:
        raise ParamError("min_dist must be >= 0")
    xv = np.linspace(0.0, 3.0, 300)
    yv = np.where(xv <= min_dist, 1.0, np.exp(-(xv - min_dist)))

    def curve(x, a, b):
        return 1.0 / (1.0 + a * x ** (2.0 * b))

    (a, b), _ = curve_fit(curve, xv, yv, p0=(1.0, 1.0), maxfev=20000, ftol=1e-12, xtol=1e-12)
    return float(a), float(b)


# Per-edge objective terms and their exact gradients (with respect to yi).
# The SGD kernel uses the same formulas plus numerical safeguards.


def attractive_objective(yi, yj, a: float, b: float) -> float:
    dsq = float(np.sum((np.asarray(yi) - np.asarray(yj)) ** 2))
    return -math.log1p(a * dsq**b)


def attractive_gradient(yi, yj, a: float, b: float) -> np.ndarray:
    diff = np.asarray(yi, dtype=np.float64) - np.asarray(yj, dtype=np.float64)
    dsq = float(np.sum(diff * diff))
    if dsq == 0.0:
        return np.zeros_like(diff)
    coeff = (-2.0 * a * b * dsq ** (b - 1.0)) / (1.0 + a * dsq**b)
    return coeff * diff


def repulsive_objective(yi, yk, a: float, b: float) -> float:
    dsq = float(np.sum((np.asarray(yi) - np.asarray(yk)) ** 2))
    return math.log(a * dsq**b) - math.log1p(a * dsq**b)


def repulsive_gradient(yi, yk, a: float, b: float) -> np.ndarray:
    diff = np.asarray(yi, dtype=np.float64) - np.asarray(yk, dtype=np.float64)
    dsq = float(np.sum(diff * diff))
    coeff = (2.0 * b) / (dsq * (1.0 + a * dsq**b))
    return coeff * diff


_LCG_MULT = np.uint64(6364136223846793005)
_LCG_INC = np.uint64(1442695040888963407)
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)


@njit(cache=True)
def _rand_uniform(state):
    state[0] = state[0] * _LCG_MULT + _LCG_INC
    return float(state[0] >> np.uint64(11)) / 9007199254740992.0


@njit(cache=True)
def _sgd_edge_update(coords, i, j, alpha, a, b, move_both):
    dim = coords.shape[1]
    dsq = 0.0
    for d in range(dim):
        diff = coords[i, d] - coords[j, d]
        dsq += diff * diff
    if dsq > 0.0:
        coeff = (-2.0 * a * b * dsq ** (b - 1.0)) / (1.0 + a * dsq**b)
        for d in range(dim):
            g = coeff * (coords[i, d] - coords[j, d])
            if g > 4.0:
                g = 4.0
            elif g < -4.0:
                g = -4.0
            coords[i, d] += alpha * g
            if move_both:
                coords[j, d] -= alpha * g


@njit(cache=True)
def _sgd_negative_update(coords, i, k, alpha, a, b):
    dim = coords.shape[1]
    dsq = 0.0
    for d in range(dim):
        diff = coords[i, d] - coords[k, d]
        dsq += diff * diff
    if dsq > 0.0:
        # epsilon keeps the repulsion finite when points nearly coincide
        coeff = (2.0 * b) / ((0.001 + dsq) * (1.0 + a * dsq**b))
        for d in range(dim):
            g = coeff * (coords[i, d] - coords[k, d])
            if g > 4.0:
                g = 4.0
            elif g < -4.0:
                g = -4.0
            coords[i, d] += alpha * g
    else:
        for d in range(dim):
            coords[i, d] += alpha * 4.0


@njit(cache=True)
def _sgd_layout(coords, edge_i, edge_j, probs, n_epochs, lr, a, b, neg_samples, seed):
    n = coords.shape[0]
    m = edge_i.shape[0]
    state = np.empty(1, dtype=np.uint64)
    state[0] = (np.uint64(seed) + np.uint64(1)) * _GOLDEN
    _rand_uniform(state)
    for epoch in range(n_epochs):
        alpha = lr * (1.0 - epoch / n_epochs)
        for e in range(m):
            if _rand_uniform(state) >= probs[e]:
                continue
            i = edge_i[e]
            j = edge_j[e]
            _sgd_edge_update(coords, i, j, alpha, a, b, True)
            for _ in range(neg_samples):
                k = int(_rand_uniform(state) * n)
                if k >= n:
                    k = n - 1
                if k == i:
                    continue
                _sgd_negative_update(coords, i, k, alpha, a, b)


@njit(cache=True, parallel=True)
def _sgd_layout_parallel(coords, edge_i, edge_j, probs, n_epochs, lr, a, b, neg_samples, seed):
    n = coords.shape[0]
    m = edge_i.shape[0]
    for epoch in range(n_epochs):
        alpha = lr * (1.0 - epoch / n_epochs)
        for e in prange(m):
            state = np.empty(1, dtype=np.uint64)
            state[0] = (
                (np.uint64(seed) + np.uint64(1)) * _GOLDEN
                + np.uint64(epoch) * _LCG_INC
                + np.uint64(e) * _LCG_MULT
            )
            _rand_uniform(state)
            if _rand_uniform(state) >= probs[e]:
                continue
            i = edge_i[e]
            j = edge_j[e]
            _sgd_edge_update(coords, i, j, alpha, a, b, True)
            for _ in range(neg_samples):
                k = int(_rand_uniform(state) * n)
                if k >= n:
                    k = n - 1
                if k == i:
                    continue
                _sgd_negative_update(coords, i, k, alpha, a, b)


def spectral_init(graph: FuzzyGraph, n_components: int, seed: int) -> np.ndarray:
    """Seeded spectral layout of the symmetric normalized graph Laplacian,
    falling back to seeded uniform [-10, 10] when the solve fails."""
    rng = np.random.default_rng(seed)
    n = graph.n
    try:
        if n_components + 1 > n:
            raise ValueError("not enough points for spectral init")
        A = np.zeros((n, n))
        A[graph.edge_i, graph.edge_j] = graph.weights
        A[graph.edge_j, graph.edge_i] = graph.weights
        deg = A.sum(axis=1)
        dinv = np.where(deg > 0.0, 1.0 / np.sqrt(np.where(deg > 0.0, deg, 1.0)), 0.0)
        L = np.eye(n) - (dinv[:, None] * A) * dinv[None, :]
        _, vecs = eigh(L, subset_by_index=(0, n_components))
        coords = vecs[:, 1 : n_components + 1].copy()
        peak = np.abs(coords).max()
        if not np.isfinite(peak) or peak <= 0.0:
            raise ValueError("degenerate spectral solution")
        coords *= 10.0 / peak
        coords += rng.normal(0.0, 1e-2, size=coords.shape)  # break exact ties
        return coords
    except Exception:
        return rng.uniform(-10.0, 10.0, size=(n, n_components))


def optimize_layout(
    graph: FuzzyGraph,
    params: ReduceParams,
    init: np.ndarray | None = None,
    deterministic: bool = True,
) -> np.ndarray:
    """Negative-sampling SGD over the fuzzy graph.

    Each epoch visits edges in order and samples each with probability
    proportional to its weight; sampled edges get an attractive update on
    both endpoints and ``negative_samples`` repulsive updates against random
    points. The learning rate decays linearly to zero. ``deterministic=False``
    trades bit-exactness for a parallel edge loop.
    """
    if params.n_epochs < 0:
        raise ParamError("n_epochs must be >= 0")
    if graph.weights.size == 0:
        raise ParamError("graph has no edges")
    params = params.resolve_kernel()
    if init is None:
        coords = spectral_init(graph, params.n_components, params.seed)
    else:
        coords = np.array(init, dtype=np.float64, copy=True)
        if coords.shape != (graph.n, params.n_components):
            raise ParamError("init coordinates have the wrong shape")
    probs = graph.weights / graph.weights.max()
    kernel = _sgd_layout if deterministic else _sgd_layout_parallel
    kernel(
        coords,
        graph.edge_i,
        graph.edge_j,
        probs,
        params.n_epochs,
        params.learning_rate,
        params.a,
        params.b,
        params.negative_samples,
        params.seed,
    )
    return coords


def write_coordinates_csv(coords: np.ndarray, path) -> None:
    """Debug dump: header ``point_index,c0..c{k-1}``."""
    import csv

    coords = np.asarray(coords)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["point_index"] + [f"c{d}" for d in range(coords.shape[1])])
        for i, row in enumerate(coords):
            writer.writerow([i] + [f"{v:.10g}" for v in row])


class NeighborEmbedding(BaseEstimator):
    """sklearn-style wrapper around the full reduction pipeline."""

    def __init__(
        self,
        n_neighbors: int = 15,
        n_components: int = 5,
        min_dist: float = 0.0,
        n_epochs: int = 200,
        seed: int = 42,
        learning_rate: float = 1.0,
        negative_samples: int = 5,
        metric: str = "cosine",
        deterministic: bool = True,
    ):
        self.n_neighbors = n_neighbors
        self.n_components = n_components
        self.min_dist = min_dist
        self.n_epochs = n_epochs
        self.seed = seed
        self.learning_rate = learning_rate
        self.negative_samples = negative_samples
        self.metric = metric
        self.deterministic = deterministic

    def _params(self) -> ReduceParams:
        return ReduceParams(
            n_neighbors=self.n_neighbors,
            n_components=self.n_components,
            min_dist=self.min_dist,
            n_epochs=self.n_epochs,
            seed=self.seed,
            learning_rate=self.learning_rate,
            negative_samples=self.negative_samples,
            metric=self.metric,
        )

    def fit(self, X, y=None):
        X = check_array(X, dtype=np.float64)
        params = self._params()
        self.graph_ = build_fuzzy_graph(X, params.n_neighbors, params.metric)
        self.embedding_ = optimize_layout(
            self.graph_, params, deterministic=self.deterministic
        )
        return self

    def fit_transform(self, X, y=None) -> np.ndarray:
        return self.fit(X).embedding_
