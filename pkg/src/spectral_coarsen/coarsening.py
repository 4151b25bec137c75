"""Partitions and the coarsen / lift operators between a graph and its coarse graph."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy import sparse

from .errors import EmptySupernode, FormatError, SizeMismatch
from .graph import Graph, normalized_laplacian


@dataclass(frozen=True, eq=False)
class Partition:
    """Surjective map from ``N`` nodes onto supernodes ``0 .. n-1``."""

    assignment: np.ndarray
    n: int

    def __init__(self, assignment: Sequence[int], n: int | None = None):
        a = np.array(assignment, dtype=np.int64).ravel()
        if a.size == 0:
            raise SizeMismatch("partition must cover at least one node")
        if a.min() < 0:
            raise SizeMismatch("supernode ids must be non-negative")
        if n is None:
            n = int(a.max()) + 1
        elif a.max() >= n:
            raise SizeMismatch(f"supernode id {a.max()} out of range for n={n}")
        counts = np.bincount(a, minlength=n)
        empty = np.flatnonzero(counts == 0)
        if empty.size:
            raise EmptySupernode(int(empty[0]))
        a.setflags(write=False)
        object.__setattr__(self, "assignment", a)
        object.__setattr__(self, "n", int(n))

    @classmethod
    def from_labels(cls, labels: Sequence) -> "Partition":
        """Relabel arbitrary cluster labels as 0, 1, ... in order of first appearance.

        This is the canonical numbering: supernode ids increase with their
        lowest-indexed member node.
        """
        _, first, inverse = np.unique(np.asarray(labels), return_index=True, return_inverse=True)
        rank = np.empty(first.size, dtype=np.int64)
        rank[np.argsort(first, kind="stable")] = np.arange(first.size)
        return cls(rank[inverse.ravel()])

    @classmethod
    def identity(cls, size: int) -> "Partition":
        return cls(np.arange(size))

    @property
    def node_count(self) -> int:
        return int(self.assignment.size)

    def sizes(self) -> np.ndarray:
        return np.bincount(self.assignment, minlength=self.n)

    def members(self, p: int) -> np.ndarray:
        return np.flatnonzero(self.assignment == p)

    def canonical(self) -> "Partition":
        return Partition.from_labels(self.assignment)

    def compose(self, inner: "Partition") -> "Partition":
        """Partition of the original nodes after further grouping supernodes by ``inner``."""
        if inner.node_count != self.n:
            raise SizeMismatch(f"inner partition covers {inner.node_count} nodes, expected {self.n}")
        return Partition(inner.assignment[self.assignment], inner.n)

    def same_as(self, other: "Partition") -> bool:
        return self.n == other.n and np.array_equal(self.assignment, other.assignment)

    def tolist(self) -> list[int]:
        return self.assignment.tolist()


def _check_sizes(g: Graph, p: Partition) -> None:
    if p.node_count != g.node_count:
        raise SizeMismatch(f"partition covers {p.node_count} nodes, graph has {g.node_count}")


def partition_indicator(p: Partition) -> sparse.csr_array:
    """The ``n x N`` 0/1 matrix with ``P(p, i) = 1`` iff node ``i`` is in supernode ``p``."""
    N = p.node_count
    return sparse.csr_array((np.ones(N), (p.assignment, np.arange(N))), shape=(p.n, N))


def partition_pseudo_inverse(p: Partition) -> sparse.csr_array:
    """``P^+`` (``N x n``) with entries ``1 / |S_p|``."""
    N = p.node_count
    vals = 1.0 / p.sizes()[p.assignment]
    return sparse.csr_array((vals, (np.arange(N), p.assignment)), shape=(N, p.n))


def projection_matrix(p: Partition) -> np.ndarray:
    """Dense ``Pi = P^+ P``, block-constant with value ``1 / |S_p|``."""
    return (partition_pseudo_inverse(p) @ partition_indicator(p)).toarray()


def normalized_coarsening_matrix(p: Partition) -> np.ndarray:
    """Dense ``C`` with ``C(p, i) = 1 / sqrt(|S_p|)`` for members; rows are orthonormal."""
    N = p.node_count
    c = np.zeros((p.n, N))
    c[p.assignment, np.arange(N)] = 1.0 / np.sqrt(p.sizes()[p.assignment])
    return c


def coarsen(g: Graph, p: Partition) -> Graph:
    """Coarse graph ``W_c = P W P^T``.

    An internal edge ``{i, j}`` of a supernode lands twice on its self-loop
    (once as ``W(i, j)`` and once as ``W(j, i)``); original self-loops land once.
    """
    _check_sizes(g, p)
    P = partition_indicator(p)
    return Graph.from_matrix(P @ g.adjacency @ P.T)


def lift(gc: Graph, p: Partition) -> Graph:
    """Lifted graph with ``W_l(i, j) = W_c(p, q) / (|S_p| |S_q|)`` for ``i in S_p, j in S_q``."""
    if gc.node_count != p.n:
        raise SizeMismatch(f"coarse graph has {gc.node_count} nodes, partition has {p.n} supernodes")
    Pp = partition_pseudo_inverse(p)
    return Graph.from_matrix(Pp @ gc.adjacency @ Pp.T)


def lift_eigenvector(u_c, p: Partition) -> np.ndarray:
    """``C^T u_c``: spread each coarse entry over its members, scaled by ``1/sqrt(|S_p|)``."""
    u_c = np.asarray(u_c, dtype=np.float64)
    if u_c.shape[0] != p.n:
        raise SizeMismatch(f"vector has length {u_c.shape[0]}, partition has {p.n} supernodes")
    return u_c[p.assignment] / np.sqrt(p.sizes()[p.assignment])


def consistent_coarse_laplacian(g: Graph, p: Partition) -> np.ndarray:
    """``C L C^T`` for the normalized Laplacian ``L`` of ``g``."""
    _check_sizes(g, p)
    c = normalized_coarsening_matrix(p)
    m = c @ normalized_laplacian(g) @ c.T
    return (m + m.T) / 2


# -- partition file format ----------------------------------------------------

def format_partition(p: Partition) -> str:
    return "".join(f"{i} {s}\n" for i, s in enumerate(p.assignment.tolist()))


def parse_partition(text: str, node_count: int | None = None) -> Partition:
    """Parse ``node_id supernode_id`` lines. Every node must appear exactly once."""
    pairs = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise FormatError(f"line {lineno}: expected 'node supernode', got {raw!r}")
        try:
            node, sup = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise FormatError(f"line {lineno}: {exc}") from exc
        if node in pairs:
            raise FormatError(f"line {lineno}: node {node} listed twice")
        pairs[node] = sup
    if not pairs:
        raise FormatError("partition file is empty")
    size = node_count if node_count is not None else max(pairs) + 1
    if sorted(pairs) != list(range(size)):
        raise SizeMismatch(f"partition must list nodes 0..{size - 1} exactly once")
    return Partition([pairs[i] for i in range(size)])


def read_partition(path, node_count: int | None = None) -> Partition:
    return parse_partition(Path(path).read_text(), node_count)


def write_partition(p: Partition, path) -> None:
    Path(path).write_text(format_partition(p))
