"""Eigendecomposition and the full / partial spectral distances."""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
import scipy.linalg

from .coarsening import Partition, coarsen, consistent_coarse_laplacian
from .errors import BadIndex, NoConvergence, NotSymmetric, SizeMismatch
from .graph import SYMMETRY_TOL, Graph, normalized_laplacian


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Ascending eigenvalues with orthonormal eigenvectors as columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __len__(self) -> int:
        return self.eigenvalues.size


def eigendecompose(a) -> Spectrum:
    """Dense symmetric eigensolve with a deterministic sign convention.

    Each eigenvector is flipped so that its largest-magnitude entry is
    positive (first such entry on ties).
    """
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotSymmetric(f"expected a square matrix, got shape {a.shape}")
    if a.size and np.max(np.abs(a - a.T)) > SYMMETRY_TOL:
        raise NotSymmetric("matrix is not symmetric")
    try:
        vals, vecs = scipy.linalg.eigh(a)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NoConvergence(str(exc)) from exc
    if not np.all(np.isfinite(vals)):
        raise NoConvergence("eigensolver returned non-finite values")
    pivot = np.argmax(np.abs(vecs), axis=0)
    signs = np.sign(vecs[pivot, np.arange(vecs.shape[1])])
    signs[signs == 0] = 1.0
    vecs = vecs * signs
    return Spectrum(vals, vecs)


def eigenvalues(a) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    if a.size and np.max(np.abs(a - a.T)) > SYMMETRY_TOL:
        raise NotSymmetric("matrix is not symmetric")
    try:
        return scipy.linalg.eigvalsh(a)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NoConvergence(str(exc)) from exc


def graph_spectrum(g: Graph) -> Spectrum:
    return eigendecompose(normalized_laplacian(g))


def head_count(lambda_c) -> int:
    """Number of coarse eigenvalues strictly below one (exact comparison).

    This is the head length ``k1``; it is 0 when every value is >= 1 and
    ``n`` when every value is < 1.
    """
    return int(np.count_nonzero(np.asarray(lambda_c) < 1.0))


def _check_lengths(lam, lam_c) -> tuple[np.ndarray, np.ndarray]:
    lam = np.asarray(lam, dtype=np.float64)
    lam_c = np.asarray(lam_c, dtype=np.float64)
    if lam_c.size > lam.size:
        raise SizeMismatch(f"coarse spectrum ({lam_c.size}) longer than original ({lam.size})")
    return lam, lam_c


def lifted_eigenvalues(lambda_c, N: int) -> np.ndarray:
    """Coarse eigenvalues plus ``N - n`` copies of 1, in ascending order."""
    lam_c = np.asarray(lambda_c, dtype=np.float64)
    if lam_c.size > N:
        raise SizeMismatch(f"n={lam_c.size} exceeds N={N}")
    k1 = head_count(lam_c)
    return np.concatenate([lam_c[:k1], np.ones(N - lam_c.size), lam_c[k1:]])


def full_spectral_distance(lam, lam_c) -> float:
    lam, lam_c = _check_lengths(lam, lam_c)
    return float(np.sum(np.abs(lam - lifted_eigenvalues(lam_c, lam.size))))


def partial_spectral_distance(lam, lam_c) -> tuple[float, int]:
    """Head/tail L1 gap that skips the band pinned at eigenvalue one.

    Returns ``(distance, k)`` where ``k`` counts coarse eigenvalues below one.
    """
    lam, lam_c = _check_lengths(lam, lam_c)
    N, n = lam.size, lam_c.size
    k = head_count(lam_c)
    head = np.abs(lam[:k] - lam_c[:k]).sum()
    tail = np.abs(lam_c[k:] - lam[k + N - n:]).sum()
    return float(head + tail), k


def partial_spectral_distance_extremes(smallest, largest, lam_c) -> tuple[float, int]:
    """Partial distance from only the ``n`` smallest and ``n`` largest original eigenvalues.

    Lets callers plug in a partial eigensolver; the result equals
    :func:`partial_spectral_distance` on the full spectrum.
    """
    smallest = np.sort(np.asarray(smallest, dtype=np.float64))
    largest = np.sort(np.asarray(largest, dtype=np.float64))
    lam_c = np.asarray(lam_c, dtype=np.float64)
    n = lam_c.size
    if smallest.size < n or largest.size < n:
        raise SizeMismatch(f"need at least {n} smallest and {n} largest eigenvalues")
    k = head_count(lam_c)
    head = np.abs(smallest[:k] - lam_c[:k]).sum()
    tail = np.abs(lam_c[k:] - largest[largest.size - (n - k):]).sum() if n > k else 0.0
    return float(head + tail), k


def excluded_band(lam, k1: int, k2: int) -> float:
    """``sum_{i=k1+1..k2} |lam(i) - 1|`` (1-based, inclusive)."""
    lam = np.asarray(lam, dtype=np.float64)
    if not 0 <= k1 <= k2 <= lam.size:
        raise BadIndex(f"need 0 <= k1 <= k2 <= {lam.size}, got k1={k1}, k2={k2}")
    return float(np.abs(lam[k1:k2] - 1.0).sum())


@dataclass(frozen=True)
class SpectralDistanceReport:
    full: float
    partial: float
    excluded_band: float
    k1: int
    k2: int
    n: int
    N: int

    def to_dict(self) -> dict:
        return asdict(self)


def distance_report_from_spectra(lam, lam_c) -> SpectralDistanceReport:
    lam, lam_c = _check_lengths(lam, lam_c)
    N, n = lam.size, lam_c.size
    partial, k1 = partial_spectral_distance(lam, lam_c)
    k2 = N - n + k1
    return SpectralDistanceReport(
        full=full_spectral_distance(lam, lam_c),
        partial=partial,
        excluded_band=excluded_band(lam, k1, k2),
        k1=k1,
        k2=k2,
        n=n,
        N=N,
    )


def distance_report(g: Graph, p: Partition, consistent: bool = False) -> SpectralDistanceReport:
    """Spectral distances between ``g`` and its coarse graph under ``p``.

    By default the coarse spectrum comes from the normalized Laplacian of
    ``coarsen(g, p)``. With ``consistent=True`` it comes from ``C L C^T``.
    """
    lam = eigenvalues(normalized_laplacian(g))
    if consistent:
        lam_c = eigenvalues(consistent_coarse_laplacian(g, p))
    else:
        lam_c = eigenvalues(normalized_laplacian(coarsen(g, p)))
    return distance_report_from_spectra(lam, lam_c)
