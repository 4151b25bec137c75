"""Weighted undirected graphs and the normalized Laplacian family."""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy import sparse

from .errors import BadIndex, BadWeight, FormatError, IsolatedNode, NotSymmetric

SYMMETRY_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Graph:
    """Weighted undirected graph with strictly positive degrees.

    ``adjacency`` is a symmetric CSR matrix holding only positive weights;
    a self-loop ``W(i, i)`` is stored on the diagonal and counted once in
    the degree of ``i``.
    """

    adjacency: sparse.csr_array
    degrees: np.ndarray

    @property
    def node_count(self) -> int:
        return self.adjacency.shape[0]

    def __len__(self) -> int:
        return self.node_count

    def dense(self) -> np.ndarray:
        return self.adjacency.toarray()

    def neighbors(self, i: int) -> np.ndarray:
        """Nodes sharing a positive-weight edge with ``i`` (may include ``i``)."""
        _check_node(self, i)
        a = self.adjacency
        return a.indices[a.indptr[i]:a.indptr[i + 1]]

    def edges(self) -> list[tuple[int, int, float]]:
        """Each undirected edge once as ``(u, v, w)`` with ``u <= v``."""
        upper = sparse.triu(self.adjacency, format="coo")
        order = np.lexsort((upper.col, upper.row))
        return [(int(upper.row[k]), int(upper.col[k]), float(upper.data[k])) for k in order]

    @property
    def edge_count(self) -> int:
        return sparse.triu(self.adjacency).nnz

    @classmethod
    def from_matrix(cls, w) -> "Graph":
        """Build a graph from a dense or sparse symmetric weight matrix.

        The matrix must be symmetric to ``1e-12``; the upper triangle is
        mirrored so the stored adjacency is exactly symmetric.
        """
        if sparse.issparse(w):
            w = sparse.csr_array(w, dtype=np.float64)
        else:
            w = sparse.csr_array(np.asarray(w, dtype=np.float64))
        if w.shape[0] != w.shape[1] or w.shape[0] < 1:
            raise BadIndex(f"weight matrix must be square and non-empty, got {w.shape}")
        data = w.data
        if not np.all(np.isfinite(data)) or np.any(data < 0):
            raise BadWeight("weights must be finite and non-negative")
        if w.nnz and abs(w - w.T).max() > SYMMETRY_TOL:
            raise NotSymmetric("weight matrix is not symmetric")
        upper = sparse.triu(w, format="csr")
        w = sparse.csr_array(upper + sparse.triu(upper, k=1).T)
        w.eliminate_zeros()
        w.sort_indices()
        return cls._validated(w)

    @classmethod
    def _validated(cls, w: sparse.csr_array) -> "Graph":
        degrees = np.asarray(w.sum(axis=1)).ravel()
        zero = np.flatnonzero(degrees <= 0)
        if zero.size:
            raise IsolatedNode(int(zero[0]))
        degrees.setflags(write=False)
        return cls(adjacency=w, degrees=degrees)


def _check_node(g: Graph, i: int) -> None:
    if not 0 <= i < g.node_count:
        raise BadIndex(f"node {i} out of range for graph with {g.node_count} nodes")


def graph_from_edges(n: int, triples: Iterable[Sequence[float]]) -> Graph:
    """Build a graph on ``n`` nodes from ``(u, v, w)`` triples.

    Duplicate pairs (in either orientation) are summed; ``(u, u, w)`` adds
    a self-loop of weight ``w``.

    >>> graph_from_edges(3, [(0, 1, 1.0), (1, 2, 1.0)]).degrees.tolist()
    [1.0, 2.0, 1.0]
    """
    if n < 1:
        raise BadIndex("graph needs at least one node")
    rows, cols, vals = [], [], []
    for triple in triples:
        u, v, w = int(triple[0]), int(triple[1]), float(triple[2])
        if not (0 <= u < n and 0 <= v < n):
            raise BadIndex(f"edge ({u}, {v}) out of range for {n} nodes")
        if not math.isfinite(w) or w <= 0:
            raise BadWeight(f"edge ({u}, {v}) has invalid weight {w!r}")
        if u > v:
            u, v = v, u
        rows.append(u)
        cols.append(v)
        vals.append(w)
    upper = sparse.coo_array((vals, (rows, cols)), shape=(n, n)).tocsr()  # sums duplicates
    w = sparse.csr_array(upper + sparse.triu(upper, k=1).T)
    w.sort_indices()
    return Graph._validated(w)


def _inv_sqrt_degrees(g: Graph) -> np.ndarray:
    return 1.0 / np.sqrt(g.degrees)


def normalized_laplacian(g: Graph) -> np.ndarray:
    """Dense ``I - D^{-1/2} W D^{-1/2}``."""
    s = _inv_sqrt_degrees(g)
    lap = -(s[:, None] * g.dense() * s[None, :])
    lap[np.diag_indices_from(lap)] += 1.0
    return lap


def random_walk_laplacian(g: Graph) -> np.ndarray:
    """Dense ``I - D^{-1} W``; not symmetric unless the graph is regular."""
    lap = -(g.dense() / g.degrees[:, None])
    lap[np.diag_indices_from(lap)] += 1.0
    return lap


def signless_normalized_laplacian(g: Graph) -> np.ndarray:
    """Dense ``I + D^{-1/2} W D^{-1/2}``; its spectrum mirrors the normalized one about 1."""
    s = _inv_sqrt_degrees(g)
    lap = s[:, None] * g.dense() * s[None, :]
    lap[np.diag_indices_from(lap)] += 1.0
    return lap


def normalized_weight_row(g: Graph, i: int) -> np.ndarray:
    """Row ``w(i) / d(i)`` as a dense vector summing to one."""
    _check_node(g, i)
    row = g.adjacency[[i], :].toarray().ravel()
    return row / g.degrees[i]


def normalized_weight_rows(g: Graph) -> np.ndarray:
    """All rows ``D^{-1} W`` at once."""
    return g.dense() / g.degrees[:, None]


# -- edge-list text format ---------------------------------------------------

def format_edge_list(g: Graph) -> str:
    lines = [f"#nodes {g.node_count}"]
    lines.extend(f"{u} {v} {w!r}" for u, v, w in g.edges())
    return "\n".join(lines) + "\n"


def parse_edge_list(text: str) -> Graph:
    """Parse ``u v [w]`` lines; ``#`` starts a comment, ``#nodes N`` fixes the node count."""
    n_header = None
    triples = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line[1:].split()
            if len(parts) == 2 and parts[0] == "nodes":
                try:
                    n_header = int(parts[1])
                except ValueError as exc:
                    raise FormatError(f"line {lineno}: bad node count {parts[1]!r}") from exc
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise FormatError(f"line {lineno}: expected 'u v [w]', got {raw!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
            w = float(parts[2]) if len(parts) == 3 else 1.0
        except ValueError as exc:
            raise FormatError(f"line {lineno}: {exc}") from exc
        if u < 0 or v < 0:
            raise BadIndex(f"line {lineno}: negative node id")
        triples.append((u, v, w))
    if n_header is None:
        if not triples:
            raise FormatError("edge list is empty")
        n_header = 1 + max(max(u, v) for u, v, _ in triples)
    return graph_from_edges(n_header, triples)


def read_edge_list(path) -> Graph:
    return parse_edge_list(Path(path).read_text())


def write_edge_list(g: Graph, path) -> None:
    Path(path).write_text(format_edge_list(g))
