"""Synthetic embedding stores with a known number-line structure.

Numerosities are assigned unit base points whose pairwise cosine similarity
is exactly exp(-|ln n1 - ln n2| / sigma), the log-compressed profile of a
mental number line.  The base points are the rows of E*sqrt(L) from the
eigendecomposition of that similarity matrix (a strictly positive definite
Laplacian kernel), embedded in the requested dimension.  Each stimulus is a
base point plus isotropic Gaussian noise whose standard deviation shrinks
across the epoch schedule, modeling sharpening over training.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import StimulusId
from .errors import FormatError, InvalidEpoch
from .stats import jacobi_eigh
from .store import EmbeddingStore, new_store

DEFAULT_SIGMA = 1.0
DEFAULT_DIM = 64
DEFAULT_REPLICATES = 16
DEFAULT_SCHEDULE = ((1, 1.0), (2, 0.5), (10, 0.1), (90, 0.0))

MODEL_ID = "oracle-numberline"
LAYER = "synthetic"


@dataclass(frozen=True)
class OracleParams:
    sigma: float = DEFAULT_SIGMA
    dim: int = DEFAULT_DIM
    replicates: int = DEFAULT_REPLICATES
    epochs: tuple = DEFAULT_SCHEDULE  # ((epoch, noise_level), ...)
    seed: int = 0

    def __post_init__(self):
        if self.sigma <= 0:
            raise FormatError(f"sigma must be > 0, got {self.sigma}")
        if self.dim < 2:
            raise FormatError(f"dim must be >= 2, got {self.dim}")
        if self.replicates < 1:
            raise FormatError(f"replicates must be >= 1, got {self.replicates}")
        schedule = tuple((int(e), float(lvl)) for e, lvl in self.epochs)
        if not schedule:
            raise FormatError("epoch schedule is empty")
        last_epoch = 0
        last_level = math.inf
        for epoch, level in schedule:
            if epoch <= last_epoch:
                raise InvalidEpoch(f"epochs must be strictly increasing at {epoch}")
            if level < 0:
                raise FormatError(f"noise level must be >= 0, got {level}")
            if level > last_level:
                raise FormatError("noise schedule must be non-increasing")
            last_epoch, last_level = epoch, level
        object.__setattr__(self, "epochs", schedule)

    def noise_level_of(self, epoch: int) -> float:
        for e, level in self.epochs:
            if e == epoch:
                return level
        raise InvalidEpoch(f"epoch {epoch} is not in the schedule")


def kernel_similarities(sigma: float) -> np.ndarray:
    """The exact 9x9 noiseless similarity matrix exp(-|ln n1 - ln n2|/sigma)."""
    logs = np.log(np.arange(1, 10, dtype=np.float64))
    return np.exp(-np.abs(logs[:, None] - logs[None, :]) / sigma)


def base_points(sigma: float, dim: int) -> np.ndarray:
    """Nine unit vectors in R^dim whose pairwise dots realize the kernel.

    For dim < 9 the factorization is truncated to the top-dim eigencomponents,
    so similarities are approximate; dim >= 9 reproduces them exactly.
    """
    gram = kernel_similarities(sigma)
    eigenvalues, eigenvectors = jacobi_eigh(gram)
    # canonical eigenvector signs keep the factorization seed-stable
    for j in range(eigenvectors.shape[1]):
        col = eigenvectors[:, j]
        if col[int(np.argmax(np.abs(col)))] < 0:
            eigenvectors[:, j] = -col
    k = min(9, dim)
    factors = eigenvectors[:, :k] * np.sqrt(np.maximum(eigenvalues[:k], 0.0))
    points = np.zeros((9, dim))
    points[:, :k] = factors
    return points


def gen_oracle_store(params: OracleParams, epoch: int) -> EmbeddingStore:
    """Store of 9 x replicates noisy copies of the base points for one epoch.

    Per-stimulus sub-seeds make every vector independent of generation order.
    """
    level = params.noise_level_of(epoch)
    noise_sd = level * params.sigma
    points = base_points(params.sigma, params.dim)
    ids = []
    rows = np.empty((9 * params.replicates, params.dim), dtype=np.float64)
    row = 0
    for n in range(1, 10):
        for rep in range(params.replicates):
            sid = StimulusId(set=1, numerosity=n, level=None, replicate=rep)
            vector = points[n - 1]
            if noise_sd > 0.0:
                ss = np.random.SeedSequence([int(params.seed), epoch, n, rep])
                g = np.random.Generator(np.random.PCG64(ss)).standard_normal(
                    params.dim
                )
                vector = vector + noise_sd * g
            ids.append(str(sid))
            rows[row] = vector
            row += 1
    return new_store(
        model_id=MODEL_ID, epoch=epoch, layer=LAYER, ids=ids, vectors=rows
    )


def gen_oracle_stores(params: OracleParams) -> list:
    """One store per scheduled epoch, ordered by epoch."""
    return [gen_oracle_store(params, epoch) for epoch, _ in params.epochs]


def parse_schedule(text: str) -> tuple:
    """Parse an `epoch:level,epoch:level,...` schedule string."""
    schedule = []
    for part in text.split(","):
        if ":" not in part:
            raise FormatError(f"bad schedule entry {part!r}; expected epoch:level")
        epoch_text, _, level_text = part.partition(":")
        try:
            schedule.append((int(epoch_text), float(level_text)))
        except ValueError as exc:
            raise FormatError(f"bad schedule entry {part!r}") from exc
    return tuple(schedule)
