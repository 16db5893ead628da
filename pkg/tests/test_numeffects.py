import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from devalign.errors import (
    DegenerateVariance,
    InconsistentStores,
    MissingNumerosity,
)
from devalign.numeffects import (
    EffectStats,
    all_pairs,
    build_pair_table,
    distance_effect,
    effect_stats,
    effects_over_epochs,
    fit_negexp,
    size_effect,
    table_from_similarities,
)
from devalign.store import new_store

# Fixtures computed by independent brute-force scripts before the build.
LOGSIM_05_DISTANCE_R = -0.7992804160563204
LOGSIM_05_SIZE_R = 0.5197241181689926
LOGSIM_05_NEGEXP_GRID_R2 = 0.995753930331382
LOGSIM_10_DISTANCE_R = -0.8426868364727513
LOGSIM_10_SIZE_R = 0.486525471880097
AFFINE_RATIO_GRID_R2 = 0.9999987806596613
# noisy negexp: sim = 0.5*exp(-(ratio-1)) + 0.4 + 0.005*N(seed 7)
NOISY_NEGEXP_GRID_R2 = 0.9992401722165332
NOISY_NEGEXP_GRID_B = 0.9980654080500002


def log_compressed(sigma):
    return lambda n1, n2: math.exp(-abs(math.log(n1) - math.log(n2)) / sigma)


def one_per_numerosity_store(dim=6, seed=0, model_id="m", epoch=1):
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    ids = [f"s1-n{n}-lx-r0" for n in range(1, 10)]
    return new_store(model_id, epoch, "penultimate", ids, rng.standard_normal((9, dim)))


class TestPairTable:
    def test_combinatorial_contract(self):
        table = table_from_similarities(1, lambda a, b: 1.0 / (a + b))
        assert len(table.rows) == 36
        pairs = [(row.n1, row.n2) for row in table.rows]
        assert pairs[0] == (1, 2)
        assert pairs[-1] == (8, 9)
        assert len(set(pairs)) == 36
        assert all(n1 < n2 for n1, n2 in pairs)
        for row in table.rows:
            assert row.distance == row.n2 - row.n1
            assert 1 <= row.distance <= 8
            assert 1.5 <= row.avg_size <= 8.5
            assert 9 / 8 <= row.ratio <= 9

    def test_degenerate_sampling_equals_single_cosine(self):
        store = one_per_numerosity_store()
        table = build_pair_table(store, 1, samples_per_pair=1, seed=4)
        unit = store.vectors.astype(np.float64)
        unit /= np.linalg.norm(unit, axis=1)[:, None]
        for row in table.rows:
            expected = float(unit[row.n1 - 1] @ unit[row.n2 - 1])
            assert row.mean_similarity == pytest.approx(expected, abs=1e-12)

    def test_seeded_runs_identical(self):
        store = one_per_numerosity_store(seed=9)
        a = build_pair_table(store, 1, samples_per_pair=8, seed=17)
        b = build_pair_table(store, 1, samples_per_pair=8, seed=17)
        assert a == b

    def test_missing_numerosity(self):
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(0)))
        ids = [f"s1-n{n}-lx-r0" for n in range(1, 10) if n != 4]
        store = new_store("m", 1, "penultimate", ids, rng.standard_normal((8, 5)))
        with pytest.raises(MissingNumerosity, match="4"):
            build_pair_table(store, 1, seed=0)

    def test_level_stratification_draws_each_level(self):
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(2)))
        ids, rows = [], []
        for n in range(1, 10):
            for level in range(1, 6):
                ids.append(f"s1-n{n}-l{level}-r0")
                rows.append(rng.standard_normal(4))
        store = new_store("m", 1, "penultimate", ids, np.array(rows))
        # 5 samples cycle exactly once through the 5 level strata, one
        # stimulus per stratum, so the result is sampling-free
        table_a = build_pair_table(store, 1, samples_per_pair=5, seed=1)
        table_b = build_pair_table(store, 1, samples_per_pair=5, seed=999)
        assert table_a == table_b


class TestDistanceAndSize:
    def test_affine_distance_is_minus_one(self):
        table = table_from_similarities(1, lambda a, b: 1.0 - 0.1 * abs(b - a))
        assert distance_effect(table) == pytest.approx(-1.0, abs=1e-12)

    def test_affine_size_is_plus_one(self):
        table = table_from_similarities(1, lambda a, b: 0.1 * (a + b) / 2.0)
        assert size_effect(table) == pytest.approx(1.0, abs=1e-12)

    def test_constant_similarities_degenerate(self):
        table = table_from_similarities(1, lambda a, b: 0.5)
        with pytest.raises(DegenerateVariance):
            distance_effect(table)
        with pytest.raises(DegenerateVariance):
            size_effect(table)

    def test_log_compressed_sigma_05_fixtures(self):
        table = table_from_similarities(1, log_compressed(0.5))
        assert distance_effect(table) == pytest.approx(LOGSIM_05_DISTANCE_R, abs=1e-12)
        assert distance_effect(table) <= -0.79
        assert size_effect(table) == pytest.approx(LOGSIM_05_SIZE_R, abs=1e-12)

    def test_log_compressed_sigma_10_fixtures(self):
        table = table_from_similarities(1, log_compressed(1.0))
        assert distance_effect(table) == pytest.approx(LOGSIM_10_DISTANCE_R, abs=1e-12)
        assert distance_effect(table) <= -0.8
        assert size_effect(table) == pytest.approx(LOGSIM_10_SIZE_R, abs=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 10_000))
    def test_two_pass_pearson_equivalence(self, seed):
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
        sims = rng.uniform(-1, 1, 36)
        lookup = {pair: s for pair, s in zip(all_pairs(), sims)}
        table = table_from_similarities(1, lambda a, b: lookup[(a, b)])
        x = np.array([row.distance for row in table.rows], float)
        y = sims
        textbook = (
            (x * y).sum() - len(x) * x.mean() * y.mean()
        ) / math.sqrt(
            ((x**2).sum() - len(x) * x.mean() ** 2)
            * ((y**2).sum() - len(y) * y.mean() ** 2)
        )
        assert distance_effect(table) == pytest.approx(textbook, abs=1e-12)


class TestNegexpFit:
    def test_exact_recovery(self):
        table = table_from_similarities(
            1, lambda a, b: 0.5 * math.exp(-1.0 * (b / a - 1.0)) + 0.4
        )
        (a, b, c), r2 = fit_negexp(table)
        assert a == pytest.approx(0.5, abs=1e-4)
        assert b == pytest.approx(1.0, abs=1e-4)
        assert c == pytest.approx(0.4, abs=1e-4)
        assert r2 >= 1.0 - 1e-8

    def test_constant_similarities_degenerate(self):
        table = table_from_similarities(1, lambda a, b: 0.25)
        with pytest.raises(DegenerateVariance):
            fit_negexp(table)

    def test_affine_in_ratio_matches_grid_oracle(self):
        table = table_from_similarities(1, lambda a, b: 0.9 - 0.05 * (b / a))
        _, r2 = fit_negexp(table)
        assert r2 == pytest.approx(AFFINE_RATIO_GRID_R2, abs=1e-6)
        assert r2 >= AFFINE_RATIO_GRID_R2 - 1e-9

    def test_log_compressed_matches_grid_oracle(self):
        table = table_from_similarities(1, log_compressed(0.5))
        _, r2 = fit_negexp(table)
        assert r2 == pytest.approx(LOGSIM_05_NEGEXP_GRID_R2, abs=1e-6)
        assert r2 >= LOGSIM_05_NEGEXP_GRID_R2 - 1e-9

    def test_noisy_data_matches_grid_oracle(self):
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(7)))
        ratios = np.array([b / a for a, b in all_pairs()])
        sims = 0.5 * np.exp(-(ratios - 1.0)) + 0.4 + 0.005 * rng.standard_normal(36)
        lookup = {pair: s for pair, s in zip(all_pairs(), sims)}
        table = table_from_similarities(1, lambda a, b: lookup[(a, b)])
        (a, b, c), r2 = fit_negexp(table)
        assert r2 == pytest.approx(NOISY_NEGEXP_GRID_R2, abs=1e-4)
        assert b == pytest.approx(NOISY_NEGEXP_GRID_B, abs=1e-3)

    def test_b_stays_in_bounds(self):
        table = table_from_similarities(1, log_compressed(1.0))
        (a, b, c), _ = fit_negexp(table)
        assert 1e-3 <= b <= 50.0

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 10_000))
    def test_refinement_never_beaten_by_coarse_grid(self, seed):
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
        sims = rng.uniform(0, 1, 36)
        lookup = {pair: s for pair, s in zip(all_pairs(), sims)}
        table = table_from_similarities(1, lambda a, b: lookup[(a, b)])
        _, r2 = fit_negexp(table)
        ratios = np.array([row.ratio for row in table.rows])
        ss_tot = float(np.sum((sims - sims.mean()) ** 2))
        for b in np.exp(np.linspace(np.log(1e-3), np.log(50.0), 40)):
            e = np.exp(-b * (ratios - 1.0))
            design = np.column_stack([e, np.ones_like(e)])
            coef, *_ = np.linalg.lstsq(design, sims, rcond=None)
            ss = float(np.sum((sims - design @ coef) ** 2))
            assert r2 >= (1.0 - ss / ss_tot) - 1e-12


class TestTrajectories:
    def test_identical_stores_identical_stats(self):
        store_a = one_per_numerosity_store(seed=3, epoch=1)
        store_b = one_per_numerosity_store(seed=3, epoch=2)
        traj = effects_over_epochs([store_a, store_b], 1, samples_per_pair=4, seed=5)
        assert traj.per_epoch[0][1] == traj.per_epoch[1][1]
        assert [e for e, _ in traj.per_epoch] == [1, 2]

    def test_mismatched_dim_rejected(self):
        store_a = one_per_numerosity_store(dim=6, epoch=1)
        store_b = one_per_numerosity_store(dim=7, epoch=2)
        with pytest.raises(InconsistentStores):
            effects_over_epochs([store_a, store_b], 1)

    def test_epochs_must_increase(self):
        store_a = one_per_numerosity_store(epoch=2)
        store_b = one_per_numerosity_store(epoch=2)
        with pytest.raises(InconsistentStores):
            effects_over_epochs([store_a, store_b], 1)

    def test_effect_stats_bundle(self):
        table = table_from_similarities(1, log_compressed(1.0))
        stats = effect_stats(table)
        assert isinstance(stats, EffectStats)
        assert stats.distance_r == pytest.approx(LOGSIM_10_DISTANCE_R, abs=1e-12)
        assert stats.ratio_r2 > 0.99
