"""Distance, size, and ratio effects from pairwise numerosity similarities.

Each evaluated stimulus set yields a 36-row pair table (all unordered
numerosity pairs 1..9), with a mean cosine similarity per pair.  A negative
correlation of similarity with |n1 - n2| is the distance effect, a positive
correlation with (n1 + n2)/2 is the size effect, and the fit quality of a
decaying exponential in the ratio n2/n1 is the ratio effect.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import StimulusId
from .errors import (
    DegenerateVariance,
    FitFailure,
    FormatError,
    InconsistentStores,
    MissingNumerosity,
)
from .stats import golden_section_min, pearson_r
from .store import EmbeddingStore

NEGEXP_B_RANGE = (1e-3, 50.0)
NEGEXP_GRID_POINTS = 121


@dataclass(frozen=True)
class PairRow:
    n1: int
    n2: int
    distance: int
    avg_size: float
    ratio: float
    mean_similarity: float


@dataclass(frozen=True)
class PairTable:
    set: int
    rows: tuple  # 36 PairRow entries, (1,2) .. (8,9)


@dataclass(frozen=True)
class EffectStats:
    distance_r: float
    size_r: float
    ratio_r2: float
    negexp_params: tuple  # (a, b, c)


@dataclass(frozen=True)
class EffectTrajectory:
    set: int
    per_epoch: tuple  # ((epoch, EffectStats), ...)


def all_pairs():
    """The 36 unordered numerosity pairs in canonical order."""
    return [(n1, n2) for n1 in range(1, 10) for n2 in range(n1 + 1, 10)]


def _pools_by_numerosity(store: EmbeddingStore, set_index: int) -> dict:
    """Map numerosity -> {level: [row indices]} for one stimulus set."""
    pools = {}
    for row, raw in enumerate(store.ids):
        try:
            sid = StimulusId.parse(raw)
        except FormatError:
            continue  # foreign rows (e.g. concept images) are simply skipped
        if sid.set != set_index:
            continue
        pools.setdefault(sid.numerosity, {}).setdefault(sid.level, []).append(row)
    for n in range(1, 10):
        if n not in pools:
            raise MissingNumerosity(
                f"set {set_index} has no stimulus of numerosity {n}"
            )
    return pools


def build_pair_table(
    store: EmbeddingStore,
    set_index: int,
    samples_per_pair: int = 8,
    rng: np.random.Generator | None = None,
    seed: int = 0,
) -> PairTable:
    """Mean cosine similarity per numerosity pair, by stratified sampling.

    When the set carries levels, sample s for a pair is drawn within level
    stratum s mod n_levels (levels shared by both numerosities); otherwise
    sampling is uniform over each numerosity's stimuli.
    """
    if samples_per_pair < 1:
        raise FitFailure("samples_per_pair must be >= 1")
    if rng is None:
        rng = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence([int(seed), set_index]))
        )
    pools = _pools_by_numerosity(store, set_index)
    unit = store.vectors.astype(np.float64)
    unit = unit / np.linalg.norm(unit, axis=1)[:, None]

    def level_key(level):
        return -1 if level is None else level

    rows = []
    for n1, n2 in all_pairs():
        strata = sorted(
            set(pools[n1]) & set(pools[n2]), key=level_key
        )
        if not strata:
            raise MissingNumerosity(
                f"set {set_index}: numerosities {n1} and {n2} share no level"
            )
        total = 0.0
        for s in range(samples_per_pair):
            level = strata[s % len(strata)]
            pool1 = pools[n1][level]
            pool2 = pools[n2][level]
            row1 = pool1[int(rng.integers(len(pool1)))]
            row2 = pool2[int(rng.integers(len(pool2)))]
            total += float(unit[row1] @ unit[row2])
        rows.append(
            PairRow(
                n1=n1,
                n2=n2,
                distance=n2 - n1,
                avg_size=(n1 + n2) / 2.0,
                ratio=n2 / n1,
                mean_similarity=total / samples_per_pair,
            )
        )
    return PairTable(set=set_index, rows=tuple(rows))


def table_from_similarities(set_index: int, sim_of_pair) -> PairTable:
    """Pair table from an explicit similarity function (testing aid)."""
    rows = [
        PairRow(
            n1=n1,
            n2=n2,
            distance=n2 - n1,
            avg_size=(n1 + n2) / 2.0,
            ratio=n2 / n1,
            mean_similarity=float(sim_of_pair(n1, n2)),
        )
        for n1, n2 in all_pairs()
    ]
    return PairTable(set=set_index, rows=tuple(rows))


def distance_effect(table: PairTable) -> float:
    """Pearson r of mean similarity against |n1 - n2| (negative = human-like)."""
    return pearson_r(
        [row.distance for row in table.rows],
        [row.mean_similarity for row in table.rows],
    )


def size_effect(table: PairTable) -> float:
    """Pearson r of mean similarity against (n1 + n2)/2 (positive = human-like)."""
    return pearson_r(
        [row.avg_size for row in table.rows],
        [row.mean_similarity for row in table.rows],
    )


def _negexp_solve(ratios, sims, b):
    """Closed-form least-squares (a, c) for sim = a*exp(-b*(ratio-1)) + c."""
    e = np.exp(-b * (ratios - 1.0))
    design = np.column_stack([e, np.ones_like(e)])
    coef, _, _, _ = np.linalg.lstsq(design, sims, rcond=None)
    resid = sims - design @ coef
    return float(coef[0]), float(coef[1]), float(resid @ resid)


def fit_negexp(table: PairTable):
    """Fit sim = a*exp(-b*(ratio-1)) + c with b >= 0.

    Coarse logarithmic grid over b, closed-form (a, c) at each grid point,
    then golden-section refinement of b around the best grid point.  Returns
    ((a, b, c), r2).
    """
    ratios = np.array([row.ratio for row in table.rows])
    sims = np.array([row.mean_similarity for row in table.rows])
    if len(set(ratios.tolist())) < 4:
        raise FitFailure("need at least 4 distinct ratios")
    ss_tot = float(np.sum((sims - sims.mean()) ** 2))
    if ss_tot == 0.0:
        raise DegenerateVariance("constant similarities cannot be fit")

    lo, hi = NEGEXP_B_RANGE
    grid = np.exp(np.linspace(np.log(lo), np.log(hi), NEGEXP_GRID_POINTS))
    best = None
    for b in grid:
        a, c, ss = _negexp_solve(ratios, sims, b)
        if not np.isfinite(ss):
            continue
        if best is None or ss < best[3]:
            best = (a, float(b), c, ss)
    if best is None:
        raise FitFailure("no finite objective on the b grid")

    idx = int(np.argmin(np.abs(grid - best[1])))
    bracket_lo = grid[max(0, idx - 1)]
    bracket_hi = grid[min(len(grid) - 1, idx + 1)]
    b_ref = golden_section_min(
        lambda b: _negexp_solve(ratios, sims, b)[2],
        float(bracket_lo),
        float(bracket_hi),
        tol=1e-12,
    )
    a_ref, c_ref, ss_ref = _negexp_solve(ratios, sims, b_ref)
    if np.isfinite(ss_ref) and ss_ref < best[3]:
        best = (a_ref, float(b_ref), c_ref, ss_ref)

    a, b, c, ss_res = best
    r2 = 1.0 - ss_res / ss_tot
    return (a, b, c), r2


def effect_stats(table: PairTable) -> EffectStats:
    params, r2 = fit_negexp(table)
    return EffectStats(
        distance_r=distance_effect(table),
        size_r=size_effect(table),
        ratio_r2=r2,
        negexp_params=params,
    )


def check_consistent(stores) -> None:
    stores = list(stores)
    if not stores:
        raise InconsistentStores("no stores supplied")
    model_id = stores[0].manifest.model_id
    dim = stores[0].manifest.dim
    last_epoch = None
    for store in stores:
        m = store.manifest
        if m.model_id != model_id or m.dim != dim:
            raise InconsistentStores(
                f"store for epoch {m.epoch} differs in model_id/dim"
            )
        if last_epoch is not None and m.epoch <= last_epoch:
            raise InconsistentStores(
                f"epochs must be strictly increasing, got {m.epoch} after {last_epoch}"
            )
        last_epoch = m.epoch


def effects_over_epochs(
    stores, set_index: int, samples_per_pair: int = 8, seed: int = 0, map_fn=map
) -> EffectTrajectory:
    """Per-epoch effect statistics with identical pair sampling at each epoch.

    map_fn may be an order-preserving parallel map; every epoch re-derives
    the same sampling generator, so the result is schedule-independent.
    """
    stores = list(stores)
    check_consistent(stores)

    def one_epoch(store):
        table = build_pair_table(
            store, set_index, samples_per_pair=samples_per_pair, seed=seed
        )
        return store.manifest.epoch, effect_stats(table)

    return EffectTrajectory(set=set_index, per_epoch=tuple(map_fn(one_epoch, stores)))
