"""Graph coarseners: multilevel (MGC), spectral (SGC) and two baselines.

All four return a :class:`CoarsenResult` whose ``coarse`` graph is exactly
``coarsen(original, partition)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from .coarsening import Partition, coarsen, consistent_coarse_laplacian
from .errors import BadConfig, BadIndex, NoCandidates, TargetTooSmall
from .graph import Graph, _check_node, normalized_laplacian, normalized_weight_rows
from .kmeans import KMeansConfig, kmeans
from .spectral import eigendecompose, eigenvalues, partial_spectral_distance

METHODS = ("mgc", "sgc", "em", "sc")
TIE_TOL = 1e-12


@dataclass
class CoarsenResult:
    method: str
    partition: Partition
    coarse: Graph
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "target_size": self.partition.n,
            "partition": self.partition.tolist(),
            "diagnostics": self.diagnostics,
            "coarse_edges": [[u, v, w] for u, v, w in self.coarse.edges()],
        }


def _check_target(g: Graph, n: int) -> None:
    if n < 1:
        raise TargetTooSmall(f"target size must be >= 1, got {n}")
    if n > g.node_count:
        raise TargetTooSmall(f"target size {n} exceeds node count {g.node_count}")


def _identity_result(g: Graph, method: str, diagnostics: dict) -> CoarsenResult:
    return CoarsenResult(method, Partition.identity(g.node_count), coarsen(g, Partition.identity(g.node_count)), diagnostics)


# -- multilevel coarsening ----------------------------------------------------

def node_dissimilarity(g: Graph, i: int, j: int) -> float:
    """L1 distance between the normalized weight rows of ``i`` and ``j`` (all coordinates)."""
    _check_node(g, i)
    _check_node(g, j)
    if i == j:
        raise BadIndex("dissimilarity needs two distinct nodes")
    rows = normalized_weight_rows(g)
    return float(np.abs(rows[i] - rows[j]).sum())


def two_hop_candidates(g: Graph, i: int) -> set[int]:
    """Nodes other than ``i`` reachable along at most two positive-weight edges."""
    _check_node(g, i)
    first = {int(j) for j in g.neighbors(i)}
    reach = set(first)
    for j in first:
        reach.update(int(k) for k in g.neighbors(j))
    reach.discard(i)
    return reach


def merge_partition(N: int, a: int, b: int) -> Partition:
    """Partition of ``N`` nodes fusing ``a`` and ``b``, ids in canonical order."""
    if a == b or not (0 <= a < N and 0 <= b < N):
        raise BadIndex(f"cannot merge ({a}, {b}) in a graph with {N} nodes")
    labels = np.arange(N)
    labels[max(a, b)] = min(a, b)
    return Partition.from_labels(labels)


def merge_pair(g: Graph, a: int, b: int) -> tuple[Graph, Partition]:
    p = merge_partition(g.node_count, a, b)
    return coarsen(g, p), p


def _two_hop_mask(w: np.ndarray) -> np.ndarray:
    adj = (w > 0).astype(np.float64)
    reach = (adj + adj @ adj) > 0
    np.fill_diagonal(reach, False)
    return reach


def working_rows(w: np.ndarray, self_loops: bool = True) -> np.ndarray:
    """Normalized weight rows of a dense weight matrix.

    With ``self_loops=False`` supernode self-loops are ignored, and a node
    with no external weight gets an all-zero row.
    """
    if not self_loops:
        w = w.copy()
        np.fill_diagonal(w, 0.0)
    d = w.sum(axis=1)
    return w / np.where(d > 0, d, 1.0)[:, None]


def _best_pair(w: np.ndarray, self_loops: bool = True) -> tuple[int, int, float, bool]:
    """Minimal-dissimilarity pair ``i < j`` among two-hop candidates.

    Falls back to all pairs when no candidate exists (disconnected leftovers).
    """
    rows = working_rows(w, self_loops)
    dist = cdist(rows, rows, metric="cityblock")
    upper = np.triu(np.ones(dist.shape, dtype=bool), k=1)
    mask = _two_hop_mask(w) & upper
    fallback = not mask.any()
    if fallback:
        mask = upper
    if not mask.any():
        raise NoCandidates("no pair of nodes left to merge")
    masked = np.where(mask, dist, np.inf)
    # values within TIE_TOL of the minimum tie; row-major order picks the smallest pair
    flat = int(np.argmax(masked <= masked.min() + TIE_TOL))
    i, j = divmod(flat, dist.shape[1])
    return i, j, float(dist[i, j]), fallback


def mgc(g: Graph, n: int, self_loops: bool = True) -> CoarsenResult:
    """Multilevel coarsening: repeatedly merge the most similar two-hop pair.

    Diagnostics record, per level, the merged pair in that level's ids and
    its dissimilarity ``eps``. The spectral distance of the result is at
    most ``N * sum(eps)``.

    Intermediate graphs are ``P W P^T`` and keep the self-loops merging
    creates. ``self_loops=False`` evaluates the dissimilarity on the
    loop-free part of each intermediate graph instead, which penalizes
    large supernodes; the returned coarse graph is the same kind either way.
    """
    _check_target(g, n)
    w = g.dense()
    labels = np.arange(g.node_count)
    eps: list[float] = []
    merges: list[list[int]] = []
    fallbacks = 0
    while w.shape[0] > n:
        i, j, d, fell_back = _best_pair(w, self_loops)
        fallbacks += fell_back
        eps.append(d)
        merges.append([i, j])
        w[i, :] += w[j, :]
        w[:, i] += w[:, j]
        w = np.delete(np.delete(w, j, axis=0), j, axis=1)
        labels[labels == j] = i
        labels[labels > j] -= 1
    partition = Partition(labels, n)
    diagnostics = {
        "eps": eps,
        "eps_sum": float(sum(eps)),
        "merges": merges,
        "fallback_merges": fallbacks,
        "self_loops": self_loops,
    }
    return CoarsenResult("mgc", partition, coarsen(g, partition), diagnostics)


# -- spectral coarsening ------------------------------------------------------

def sgc_sweep_range(lam, n: int) -> list[int]:
    """Admissible head sizes ``k1`` for the eigenvector sweep.

    ``k1`` is kept while ``lam(k1) <= 1`` and ``lam(k2 + 1) >= 1`` (1-based,
    ``k2 = N - n + k1``), with ``k1 = 0`` and ``k2 = N`` counting as
    satisfied. If no ``k1`` qualifies, the single value
    ``clamp(#{lam < 1} - (N - n), 0, n)`` is used.
    """
    lam = np.asarray(lam)
    N = lam.size

    def tail_ok(k1):
        k2 = N - n + k1
        return k2 == N or lam[k2] >= 1.0

    def head_ok(k1):
        return k1 == 0 or lam[k1 - 1] <= 1.0

    lo = next((k for k in range(n + 1) if tail_ok(k)), None)
    hi = next((k for k in range(n, -1, -1) if head_ok(k)), None)
    if lo is None or hi is None or lo > hi:
        below = int(np.count_nonzero(lam < 1.0))
        return [min(max(below - (N - n), 0), n)]
    return list(range(lo, hi + 1))


def cost_bound(cost: float, n: int) -> float | None:
    """Upper bound ``((n + 2) F + 4 sqrt(F)) / (1 - F)`` on the partial distance; ``None`` if ``F >= 1``."""
    if cost >= 1.0:
        return None
    cost = max(cost, 0.0)
    return ((n + 2) * cost + 4.0 * math.sqrt(cost)) / (1.0 - cost)


def sgc(g: Graph, n: int, cfg: KMeansConfig = KMeansConfig()) -> CoarsenResult:
    """Spectral coarsening by k-means on head + tail eigenvectors.

    For each admissible ``k1`` the rows of ``[U(:, 1..k1), U(:, k2+1..N)]``
    are clustered into ``n`` groups; the clustering with the lowest cost
    wins (smallest ``k1`` on ties).
    """
    _check_target(g, n)
    N = g.node_count
    if n == N:
        return _identity_result(g, "sgc", {"k1": 0, "cost": 0.0, "sweep": {}, "cost_bound": 0.0})
    spec = eigendecompose(normalized_laplacian(g))
    lam, U = spec.eigenvalues, spec.eigenvectors
    sweep = {}
    best = None
    for k1 in sgc_sweep_range(lam, n):
        k2 = N - n + k1
        cols = np.concatenate([U[:, :k1], U[:, k2:]], axis=1)
        res = kmeans(cols, n, cfg, stream=(k1,))
        sweep[k1] = res.cost
        if best is None or res.cost < best[1].cost:
            best = (k1, res)
    k1, res = best
    partition = Partition.from_labels(res.labels)
    coarse = coarsen(g, partition)
    diagnostics = {
        "k1": k1,
        "cost": res.cost,
        "sweep": {str(k): v for k, v in sweep.items()},
        "degenerate": bool(res.degenerate),
        "cost_bound": cost_bound(res.cost, n),
    }
    if res.cost < 1.0:
        lam_cons = eigenvalues(consistent_coarse_laplacian(g, partition))
        lam_built = eigenvalues(normalized_laplacian(coarse))
        diagnostics["partial_consistent"] = partial_spectral_distance(lam, lam_cons)[0]
        diagnostics["partial_built"] = partial_spectral_distance(lam, lam_built)[0]
    return CoarsenResult("sgc", partition, coarse, diagnostics)


# -- baselines ----------------------------------------------------------------

def _matching_round(w: np.ndarray, budget: int) -> list[tuple[int, int]]:
    """Greedy maximal matching by ``W(i, j) / max(d(i), d(j))``, at most ``budget`` pairs."""
    d = w.sum(axis=1)
    iu, ju = np.nonzero(np.triu(w, k=1))
    if iu.size == 0:
        return []
    score = w[iu, ju] / np.maximum(d[iu], d[ju])
    order = np.lexsort((ju, iu, -score))
    used = np.zeros(w.shape[0], dtype=bool)
    pairs = []
    for e in order:
        i, j = int(iu[e]), int(ju[e])
        if used[i] or used[j]:
            continue
        used[i] = used[j] = True
        pairs.append((i, j))
        if len(pairs) == budget:
            break
    return pairs


def edge_matching_coarsen(g: Graph, n: int) -> CoarsenResult:
    """Heavy-edge matching baseline, contracting matched pairs level by level."""
    _check_target(g, n)
    w = g.dense()
    labels = np.arange(g.node_count)
    rounds = 0
    forced = 0
    while w.shape[0] > n:
        s = w.shape[0]
        pairs = _matching_round(w, s - n)
        if not pairs:
            # only self-loops left: components are already collapsed
            pairs = [(0, 1)]
            forced += 1
        step = np.arange(s)
        for i, j in pairs:
            step[j] = i
        step_p = Partition.from_labels(step)
        labels = step_p.assignment[labels]
        P = np.zeros((step_p.n, s))
        P[step_p.assignment, np.arange(s)] = 1.0
        w = P @ w @ P.T
        rounds += 1
    partition = Partition(labels, n)
    diagnostics = {"rounds": rounds, "forced_merges": forced}
    return CoarsenResult("em", partition, coarsen(g, partition), diagnostics)


def spectral_clustering_coarsen(g: Graph, n: int, cfg: KMeansConfig = KMeansConfig()) -> CoarsenResult:
    """k-means on the ``n`` lowest normalized-Laplacian eigenvectors."""
    _check_target(g, n)
    if n == g.node_count:
        return _identity_result(g, "sc", {"cost": 0.0})
    U = eigendecompose(normalized_laplacian(g)).eigenvectors[:, :n]
    res = kmeans(U, n, cfg)
    partition = Partition.from_labels(res.labels)
    diagnostics = {"cost": res.cost, "degenerate": bool(res.degenerate)}
    return CoarsenResult("sc", partition, coarsen(g, partition), diagnostics)


def run_method(
    method: str, g: Graph, n: int, cfg: KMeansConfig = KMeansConfig(), mgc_self_loops: bool = True
) -> CoarsenResult:
    method = method.lower()
    if method == "mgc":
        return mgc(g, n, self_loops=mgc_self_loops)
    if method == "sgc":
        return sgc(g, n, cfg)
    if method == "em":
        return edge_matching_coarsen(g, n)
    if method == "sc":
        return spectral_clustering_coarsen(g, n, cfg)
    raise BadConfig(f"unknown method {method!r}; choose from {', '.join(METHODS)}")
