"""Latent 1D number-line reconstruction via classical multidimensional scaling.

The 9x9 matrix of mean cosine similarities between numerosities is converted
to dissimilarities d = 1 - sim, double-centered, and the leading eigenpair
gives one coordinate per numerosity.  Orientation is canonicalized so the
coordinate of 9 is not below that of 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateMatrix, DimensionMismatch
from .numeffects import build_pair_table, check_consistent
from .stats import jacobi_eigh
from .store import EmbeddingStore

N_NUMEROSITIES = 9


@dataclass(frozen=True)
class SimilarityMatrix:
    entries: np.ndarray  # (9, 9) symmetric, unit diagonal

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=np.float64)
        if m.shape != (N_NUMEROSITIES, N_NUMEROSITIES):
            raise DimensionMismatch(f"expected 9x9, got {m.shape}")
        if np.abs(m - m.T).max() > 1e-9:
            raise DimensionMismatch("similarity matrix is not symmetric")
        m = (m + m.T) / 2.0
        np.fill_diagonal(m, 1.0)
        object.__setattr__(self, "entries", m)


@dataclass(frozen=True)
class NumberLine:
    coords: tuple  # coordinate of numerosity k at index k-1
    eigenvalue_1: float


def matrix_from_pairs(table) -> SimilarityMatrix:
    """Assemble the symmetric similarity matrix from a 36-row pair table."""
    m = np.eye(N_NUMEROSITIES)
    for row in table.rows:
        m[row.n1 - 1, row.n2 - 1] = row.mean_similarity
        m[row.n2 - 1, row.n1 - 1] = row.mean_similarity
    return SimilarityMatrix(m)


def classical_mds_1d(sim: SimilarityMatrix) -> NumberLine:
    """Torgerson MDS restricted to the leading dimension."""
    d = np.maximum(0.0, 1.0 - sim.entries)
    d2 = d * d
    n = N_NUMEROSITIES
    centering = np.eye(n) - np.full((n, n), 1.0 / n)
    b = -0.5 * centering @ d2 @ centering
    eigenvalues, eigenvectors = jacobi_eigh(b)
    lam = float(eigenvalues[0])
    if lam <= 1e-12:
        raise DegenerateMatrix(
            f"leading eigenvalue {lam:.3e} <= 1e-12; all points coincide"
        )
    coords = np.sqrt(lam) * eigenvectors[:, 0]
    coords = coords - coords.mean()
    if coords[n - 1] < coords[0]:
        coords = -coords
    return NumberLine(coords=tuple(float(c) for c in coords), eigenvalue_1=lam)


def line_over_epochs(
    stores, set_index: int = 1, samples_per_pair: int = 8, seed: int = 0, map_fn=map
) -> list:
    """(epoch, NumberLine) per store, with identical sampling at each epoch."""
    stores = list(stores)
    check_consistent(stores)

    def one_epoch(store):
        table = build_pair_table(
            store, set_index, samples_per_pair=samples_per_pair, seed=seed
        )
        return store.manifest.epoch, classical_mds_1d(matrix_from_pairs(table))

    return list(map_fn(one_epoch, stores))
