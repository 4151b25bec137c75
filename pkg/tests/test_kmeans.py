import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spectral_coarsen.errors import BadConfig, SizeMismatch
from spectral_coarsen.kmeans import KMeansConfig, clustering_cost, kmeans


def exhaustive_optimum(rows: np.ndarray, k: int) -> float:
    """Minimum within-cluster squared error over every surjective labelling."""
    N = rows.shape[0]
    best = np.inf
    for labels in itertools.product(range(k), repeat=N - 1):
        labels = (0,) + labels  # fix node 0's label to cut symmetric copies
        if len(set(labels)) != k:
            continue
        cost = 0.0
        for c in range(k):
            members = rows[[i for i in range(N) if labels[i] == c]]
            cost += float(((members - members.mean(axis=0)) ** 2).sum())
        best = min(best, cost)
    return best


def test_separated_pairs():
    res = kmeans([[0.0], [0.0], [10.0], [10.0]], 2)
    assert res.cost == 0.0
    assert res.labels[0] == res.labels[1] != res.labels[2] == res.labels[3]


def test_three_points():
    res = kmeans([[0.0], [2.0], [10.0]], 2)
    assert res.cost == pytest.approx(2.0)
    assert res.labels[0] == res.labels[1] != res.labels[2]


def test_escapes_lloyd_fixed_point():
    # split after the 5th sorted value is Lloyd-stable; after the 4th is optimal
    rows = np.array([0.189053, -0.522748, -0.413064, -2.441467, 1.799707, 1.144166, -0.325423, 0.773807])[:, None]
    res = kmeans(rows, 2)
    assert res.cost == pytest.approx(exhaustive_optimum(rows, 2), abs=1e-12)
    assert res.labels[0] == res.labels[4]


def test_k_equals_n(rng):
    rows = rng.normal(size=(7, 3))
    res = kmeans(rows, 7)
    assert res.cost == 0.0
    assert sorted(res.labels.tolist()) == list(range(7))


def test_bad_k_and_config():
    with pytest.raises(SizeMismatch):
        kmeans([[0.0], [1.0]], 3)
    with pytest.raises(SizeMismatch):
        kmeans([[0.0], [1.0]], 0)
    with pytest.raises(BadConfig):
        KMeansConfig(restarts=0)
    with pytest.raises(BadConfig):
        KMeansConfig(rel_tol=0)


def test_duplicate_rows_flag_degenerate():
    res = kmeans([[1.0, 1.0]] * 4 + [[0.0, 0.0]], 3)
    assert res.degenerate
    assert len(set(res.labels.tolist())) == 3
    assert res.cost == 0.0
    assert not kmeans([[0.0], [1.0], [2.0]], 2).degenerate


def test_deterministic_and_streams(rng):
    rows = rng.normal(size=(40, 4))
    a = kmeans(rows, 5, KMeansConfig(seed=3))
    b = kmeans(rows, 5, KMeansConfig(seed=3))
    assert np.array_equal(a.labels, b.labels) and a.cost == b.cost
    c = kmeans(rows, 5, KMeansConfig(seed=3, restarts=1), stream=(1,))
    d = kmeans(rows, 5, KMeansConfig(seed=3, restarts=1), stream=(1,))
    assert np.array_equal(c.labels, d.labels)


def test_clustering_cost_definition():
    rows = np.array([[0.0, 0.0], [2.0, 0.0], [5.0, 5.0]])
    assert clustering_cost(rows, np.array([0, 0, 1])) == pytest.approx(2.0)
    assert clustering_cost(rows, np.array([0, 1, 2])) == 0.0


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), N=st.integers(1, 8), k=st.integers(1, 3), d=st.integers(1, 3))
def test_matches_exhaustive_optimum(seed, N, k, d):
    k = min(k, N)
    rng = np.random.default_rng(seed)
    rows = rng.normal(size=(N, d))
    if seed % 3 == 0:
        rows = np.round(rows)  # ties and duplicated rows
    res = kmeans(rows, k)
    assert len(set(res.labels.tolist())) == k
    assert res.cost == pytest.approx(clustering_cost(rows, res.labels, k), abs=1e-12)
    assert res.cost <= exhaustive_optimum(rows, k) + 1e-9


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), N=st.integers(2, 60), k=st.integers(1, 8))
def test_lloyd_is_monotone(seed, N, k):
    k = min(k, N)
    rows = np.random.default_rng(seed).normal(size=(N, 3))
    res = kmeans(rows, k, KMeansConfig(seed=seed, restarts=2))
    assert all(b <= a for a, b in zip(res.history, res.history[1:]))
    assert res.cost <= res.init_cost + 1e-12
    assert np.all(np.bincount(res.labels, minlength=k) > 0)
