"""Density-based hierarchical clustering over reduced coordinates.

Core distances and mutual-reachability smoothing feed a deterministic Prim
MST; the single-linkage hierarchy built from it is condensed with a minimum
cluster size and flat clusters are extracted by excess-of-mass stability.
Label -1 marks outlier points that no selected cluster captured.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin
from sklearn.utils import check_array

from .errors import ParamError
from .reduction import pairwise_distances

LAMBDA_CAP = 1e12  # lambda = 1/distance, capped where merge distance is zero


@dataclass(frozen=True)
class ClusterParams:
    min_cluster_size: int = 10
    min_samples: int | None = None  # defaults to min_cluster_size

    def __post_init__(self):
        if self.min_cluster_size < 2:
            raise ParamError("min_cluster_size must be >= 2")
        if self.min_samples is not None and self.min_samples < 1:
            raise ParamError("min_samples must be >= 1")

    @property
    def effective_min_samples(self) -> int:
        return self.min_samples if self.min_samples is not None else self.min_cluster_size


@dataclass
class ClusterLabels:
    labels: np.ndarray  # per point, -1 or 0..m-1
    stabilities: np.ndarray  # per selected cluster
    lambda_leave: np.ndarray  # per point, lambda at which it left its cluster

    @property
    def n_clusters(self) -> int:
        return int(self.stabilities.shape[0])


def core_distances(X, min_samples: int) -> np.ndarray:
    """Distance to the min_samples-th nearest neighbor (self excluded)."""
    X = np.asarray(X, dtype=np.float64)
    n = X.shape[0]
    if min_samples >= n:
        raise ParamError(f"min_samples={min_samples} must be < n={n}")
    if min_samples < 1:
        raise ParamError("min_samples must be >= 1")
    D = pairwise_distances(X, "euclidean")
    np.fill_diagonal(D, np.inf)
    return np.partition(D, min_samples - 1, axis=1)[:, min_samples - 1]


def mutual_reachability(D, core: np.ndarray) -> np.ndarray:
    """mr(a, b) = max(core(a), core(b), d(a, b)); zero diagonal."""
    D = np.asarray(D, dtype=np.float64)
    core = np.asarray(core, dtype=np.float64)
    mr = np.maximum(D, np.maximum(core[:, None], core[None, :]))
    np.fill_diagonal(mr, 0.0)
    return mr


def mst(mr) -> list[tuple[int, int, float]]:
    """Minimum spanning tree by Prim's algorithm over a dense matrix.

    Ties are broken by (weight, min(i, j), max(i, j)); the returned edges are
    sorted by that same key.
    """
    mr = np.asarray(mr, dtype=np.float64)
    n = mr.shape[0]
    if n < 2:
        raise ParamError("need at least 2 points for a spanning tree")
    in_tree = np.zeros(n, dtype=bool)
    best_w = mr[0].copy()
    best_from = np.zeros(n, dtype=np.int64)
    in_tree[0] = True
    best_w[0] = np.inf
    idx = np.arange(n)
    edges: list[tuple[int, int, float]] = []
    for _ in range(n - 1):
        w_min = best_w.min()
        candidates = np.flatnonzero(best_w == w_min)
        v = min(
            candidates,
            key=lambda c: (min(best_from[c], c), max(best_from[c], c)),
        )
        u = int(best_from[v])
        edges.append((min(u, v), max(u, v), float(w_min)))
        in_tree[v] = True
        best_w[v] = np.inf
        w_new = mr[v]
        new_lo = np.minimum(v, idx)
        new_hi = np.maximum(v, idx)
        old_lo = np.minimum(best_from, idx)
        old_hi = np.maximum(best_from, idx)
        tie_better = (new_lo < old_lo) | ((new_lo == old_lo) & (new_hi < old_hi))
        better = ~in_tree & ((w_new < best_w) | ((w_new == best_w) & tie_better))
        best_w[better] = w_new[better]
        best_from[better] = v
    edges.sort(key=lambda e: (e[2], e[0], e[1]))
    return edges


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> None:
        self.parent[self.find(a)] = self.find(b)


def single_linkage(edges: list[tuple[int, int, float]], n: int):
    """Merge MST edges in ascending (weight, i, j) order.

    Returns scipy-style rows (left_node, right_node, distance, size) where
    leaves are 0..n-1 and merge t creates node n+t.
    """
    merges: list[tuple[int, int, float, int]] = []
    uf = _UnionFind(n)
    comp_node = list(range(n))  # dendrogram node currently representing each root
    comp_size = [1] * n
    for i, j, w in sorted(edges, key=lambda e: (e[2], e[0], e[1])):
        ri, rj = uf.find(i), uf.find(j)
        if ri == rj:
            raise ParamError("edges do not form a tree")
        node = n + len(merges)
        size = comp_size[ri] + comp_size[rj]
        merges.append((comp_node[ri], comp_node[rj], w, size))
        uf.union(ri, rj)
        root = uf.find(ri)
        comp_node[root] = node
        comp_size[root] = size
    return merges


def condense_and_extract(
    edges: list[tuple[int, int, float]],
    min_cluster_size: int,
    n: int | None = None,
) -> ClusterLabels:
    """Condense the single-linkage hierarchy and extract flat clusters.

    A split is real only when both children hold at least min_cluster_size
    points; otherwise the undersized side falls out of the parent cluster at
    that level's lambda = 1/distance. Clusters are kept bottom-up when their
    stability exceeds the summed stability of their children.
    """
    if n is None:
        n = len(edges) + 1
    labels = np.full(n, -1, dtype=np.int64)
    lambda_leave = np.zeros(n, dtype=np.float64)
    if n < 2 or n < min_cluster_size:
        return ClusterLabels(labels, np.zeros(0), lambda_leave)

    merges = single_linkage(edges, n)
    n_nodes = n + len(merges)
    children = {n + t: (m[0], m[1]) for t, m in enumerate(merges)}
    dist = {n + t: m[2] for t, m in enumerate(merges)}
    sizes = {n + t: m[3] for t, m in enumerate(merges)}
    for leaf in range(n):
        sizes[leaf] = 1
    root = n_nodes - 1

    def leaves_under(node: int) -> list[int]:
        out: list[int] = []
        stack = [node]
        while stack:
            cur = stack.pop()
            if cur < n:
                out.append(cur)
            else:
                stack.extend(children[cur])
        return out

    # Condensed tree: rows (parent_cluster, child, lam, size); child is a
    # cluster id for real splits, a point id for fall-outs.
    cluster_rows: dict[int, list[tuple[int, float, int]]] = {0: []}
    point_rows: dict[int, list[tuple[int, float]]] = {0: []}
    births = {0: 0.0}
    parent_cluster = {0: None}
    cluster_points: dict[int, int] = {0: n}
    relabel = {root: 0}
    next_id = 1
    queue = [root]
    while queue:
        node = queue.pop(0)
        cid = relabel[node]
        left, right = children[node]
        d = dist[node]
        lam = 1.0 / d if d > 0.0 else LAMBDA_CAP
        lam = min(lam, LAMBDA_CAP)
        big_l = sizes[left] >= min_cluster_size
        big_r = sizes[right] >= min_cluster_size
        if big_l and big_r:
            for child in (left, right):
                new_id = next_id
                next_id += 1
                relabel[child] = new_id
                cluster_rows[cid].append((new_id, lam, sizes[child]))
                cluster_rows[new_id] = []
                point_rows[new_id] = []
                births[new_id] = lam
                parent_cluster[new_id] = cid
                cluster_points[new_id] = sizes[child]
                queue.append(child)
        elif not big_l and not big_r:
            for point in leaves_under(left) + leaves_under(right):
                point_rows[cid].append((point, lam))
        else:
            keep, drop = (left, right) if big_l else (right, left)
            relabel[keep] = cid
            for point in leaves_under(drop):
                point_rows[cid].append((point, lam))
            queue.append(keep)

    n_clusters = next_id
    stability = np.zeros(n_clusters)
    for cid in range(n_clusters):
        birth = births[cid]
        total = 0.0
        for _, lam, size in cluster_rows[cid]:
            total += (lam - birth) * size
        for _, lam in point_rows[cid]:
            total += lam - birth
        stability[cid] = total

    # Bottom-up excess-of-mass selection (children carry higher ids).
    selected = np.zeros(n_clusters, dtype=bool)
    propagated = np.zeros(n_clusters)
    child_clusters: dict[int, list[int]] = {cid: [] for cid in range(n_clusters)}
    for cid in range(1, n_clusters):
        child_clusters[parent_cluster[cid]].append(cid)
    for cid in range(n_clusters - 1, -1, -1):
        subtree = sum(propagated[ch] for ch in child_clusters[cid])
        if stability[cid] > subtree and cluster_points[cid] >= min_cluster_size:
            selected[cid] = True
            propagated[cid] = stability[cid]
        else:
            selected[cid] = False
            propagated[cid] = subtree

    # Keep only the shallowest selected cluster on each root-to-leaf path.
    final: list[int] = []
    stack = [0]
    while stack:
        cid = stack.pop()
        if selected[cid]:
            final.append(cid)
        else:
            stack.extend(child_clusters[cid])

    # A point belongs to the selected cluster it fell out of (directly or
    # through unselected descendants of that cluster).
    owner = {}
    for cid in range(n_clusters):
        if cid in final:
            owner[cid] = cid
        else:
            up = parent_cluster[cid]
            owner[cid] = owner[up] if up is not None else None

    member_points: dict[int, list[int]] = {cid: [] for cid in final}
    for cid in range(n_clusters):
        own = owner[cid]
        for point, lam in point_rows[cid]:
            lambda_leave[point] = lam
            if own is not None:
                member_points[own].append(point)

    ordered = sorted(final, key=lambda c: min(member_points[c]) if member_points[c] else n)
    stabilities = np.zeros(len(ordered))
    for label, cid in enumerate(ordered):
        stabilities[label] = stability[cid]
        for point in member_points[cid]:
            labels[point] = label
    return ClusterLabels(labels, stabilities, lambda_leave)


def cluster_coordinates(X, params: ClusterParams) -> ClusterLabels:
    """Full pipeline: core distances -> mutual reachability -> MST -> extract."""
    X = np.asarray(X, dtype=np.float64)
    n = X.shape[0]
    if n < 2 or n < params.min_cluster_size:
        return ClusterLabels(
            np.full(n, -1, dtype=np.int64), np.zeros(0), np.zeros(n)
        )
    min_samples = min(params.effective_min_samples, n - 1)
    core = core_distances(X, min_samples)
    mr = mutual_reachability(pairwise_distances(X, "euclidean"), core)
    edges = mst(mr)
    return condense_and_extract(edges, params.min_cluster_size, n=n)


def write_labels_csv(result: ClusterLabels, path) -> None:
    """Debug dump: header ``point_index,label,lambda_leave``."""
    import csv

    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["point_index", "label", "lambda_leave"])
        for i, (label, lam) in enumerate(zip(result.labels, result.lambda_leave)):
            writer.writerow([i, int(label), f"{lam:.10g}"])


class DensityClusterer(ClusterMixin, BaseEstimator):
    """sklearn-style estimator wrapping the density clustering pipeline."""

    def __init__(self, min_cluster_size: int = 10, min_samples: int | None = None):
        self.min_cluster_size = min_cluster_size
        self.min_samples = min_samples

    def fit(self, X, y=None):
        X = check_array(X, dtype=np.float64)
        result = cluster_coordinates(
            X, ClusterParams(self.min_cluster_size, self.min_samples)
        )
        self.labels_ = result.labels
        self.stabilities_ = result.stabilities
        self.lambda_leave_ = result.lambda_leave
        return self
