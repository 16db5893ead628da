import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from devalign.core import EpochAgeMap
from devalign.errors import (
    DegenerateVariance,
    FitFailure,
    FormatError,
    InsufficientOverlap,
)
from devalign.growth import (
    Effect,
    Trajectory,
    align_trajectories,
    effect_strength,
    fit_power,
    pearson,
    read_human_csv,
)
from devalign.numeffects import EffectStats

# Independent dense-grid oracle on y = 2*x^0.5 + 0.01*N(seed 42), x = 1..20,
# computed before the fit tests were written.
NOISY_POWER_GRID_A = 1.9975239622374696
NOISY_POWER_GRID_B = 0.5004973962499999
NOISY_POWER_GRID_R2 = 0.9999825267692823


def power_traj(a, b, xs, noise_sd=0.0, seed=0, label="t"):
    xs = np.asarray(xs, dtype=float)
    ys = a * xs**b
    if noise_sd:
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
        ys = ys + noise_sd * rng.standard_normal(len(xs))
    return Trajectory(label=label, points=tuple(zip(xs, ys)))


class TestTrajectory:
    def test_x_must_increase(self):
        with pytest.raises(FormatError):
            Trajectory(label="t", points=((1.0, 0.1), (1.0, 0.2)))

    def test_x_must_be_positive(self):
        with pytest.raises(FormatError):
            Trajectory(label="t", points=((0.0, 0.1), (1.0, 0.2)))


class TestFitPower:
    def test_exact_recovery(self):
        fit = fit_power(power_traj(2.0, 0.5, range(1, 21)))
        assert fit.a == pytest.approx(2.0, abs=1e-6)
        assert fit.b == pytest.approx(0.5, abs=1e-6)
        assert fit.r2 >= 1.0 - 1e-10

    def test_constant_y_degenerate(self):
        with pytest.raises(DegenerateVariance):
            fit_power(power_traj(3.0, 0.0, range(1, 10)))

    def test_too_few_points(self):
        with pytest.raises(FitFailure):
            fit_power(Trajectory(label="t", points=((1.0, 1.0), (2.0, 3.0))))

    def test_noisy_recovery_matches_grid_oracle(self):
        traj = power_traj(2.0, 0.5, range(1, 21), noise_sd=0.01, seed=42)
        fit = fit_power(traj)
        assert fit.a == pytest.approx(2.0, rel=0.05)
        assert fit.b == pytest.approx(0.5, rel=0.05)
        assert fit.r2 == pytest.approx(NOISY_POWER_GRID_R2, abs=1e-4)
        assert fit.a == pytest.approx(NOISY_POWER_GRID_A, abs=1e-4)
        assert fit.b == pytest.approx(NOISY_POWER_GRID_B, abs=1e-4)

    def test_negative_values_handled_without_log(self):
        # dips below zero early on; log-log init must not crash
        xs = np.arange(1.0, 15.0)
        ys = 0.5 * xs**0.8 - 1.0
        traj = Trajectory(label="t", points=tuple(zip(xs, ys)))
        fit = fit_power(traj)
        assert np.isfinite(fit.a) and np.isfinite(fit.b)

    @settings(max_examples=30, deadline=None)
    @given(
        st.floats(min_value=0.1, max_value=10.0),
        st.floats(min_value=-1.0, max_value=1.0),
    )
    def test_self_consistency(self, a, b):
        if abs(b) < 1e-3:
            return  # constant y, degenerate by construction
        traj = power_traj(a, b, range(1, 25))
        fit = fit_power(traj)
        assert fit.a == pytest.approx(a, rel=1e-4, abs=1e-8)
        assert fit.b == pytest.approx(b, rel=1e-4, abs=1e-8)


class TestAlign:
    def test_identical_mapped_series(self):
        mapping = EpochAgeMap()
        ages = [6.0, 7.0, 8.0, 9.0]
        human = Trajectory(label="h", points=tuple((a, 0.1 * a) for a in ages))
        model = Trajectory(
            label="m",
            points=tuple((mapping.epoch_of(a), 0.1 * a) for a in ages),
        )
        result = align_trajectories(human, model, mapping)
        assert result.pearson_r == 1.0
        assert result.n_pairs == 4
        assert result.dropped_human == 0
        assert result.dropped_model == 0

    def test_disjoint_ranges(self):
        human = Trajectory(label="h", points=((6.0, 0.5), (7.0, 0.6), (8.0, 0.7)))
        model = Trajectory(label="m", points=((60.0, 0.1), (62.0, 0.2), (64.0, 0.3)))
        with pytest.raises(InsufficientOverlap):
            align_trajectories(human, model)

    def test_unpaired_points_dropped_and_counted(self):
        human = Trajectory(
            label="h", points=((6.0, 0.5), (6.5, 0.55), (7.0, 0.6), (8.0, 0.7))
        )
        # epochs 2, 4, 6 pair with ages 6, 7, 8; age 6.5 -> epoch 3 is absent
        model = Trajectory(
            label="m", points=((2.0, 0.5), (4.0, 0.6), (6.0, 0.7), (8.0, 0.9))
        )
        result = align_trajectories(human, model)
        assert result.n_pairs == 3
        assert result.dropped_human == 1
        assert result.dropped_model == 1

    def test_noisy_power_curves_match_brute_force_pairing(self):
        mapping = EpochAgeMap()
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(8)))
        epochs = np.arange(2.0, 92.0, 2.0)
        ages = mapping.base_age_years + epochs / mapping.epochs_per_year
        human_y = 0.2 * ages**0.4 + 0.01 * rng.standard_normal(len(ages))
        model_y = 0.3 * epochs**0.4 + 0.01 * rng.standard_normal(len(epochs))
        human = Trajectory(label="h", points=tuple(zip(ages, human_y)))
        model = Trajectory(label="m", points=tuple(zip(epochs, model_y)))
        result = align_trajectories(human, model, mapping)
        brute = np.corrcoef(human_y, model_y)[0, 1]
        assert result.pearson_r == pytest.approx(brute, abs=0.02)
        assert result.n_pairs == 45

    def test_order_of_supplied_points_is_irrelevant(self):
        # Trajectory canonicalizes ordering at construction; equal inputs in
        # any insertion order produce equal results
        pts = ((6.0, 0.5), (7.0, 0.9), (8.0, 0.7))
        human = Trajectory(label="h", points=pts)
        model = Trajectory(label="m", points=((2.0, 0.1), (4.0, 0.4), (6.0, 0.2)))
        first = align_trajectories(human, model)
        second = align_trajectories(human, model)
        assert first == second


class TestEffectStrength:
    def make_stats(self, distance_r=0.0, size_r=0.0, ratio_r2=0.0):
        return EffectStats(
            distance_r=distance_r,
            size_r=size_r,
            ratio_r2=ratio_r2,
            negexp_params=(1.0, 1.0, 0.0),
        )

    def test_distance_sign_flip(self):
        assert effect_strength(self.make_stats(distance_r=-0.9), Effect.DISTANCE) == 0.9

    def test_wrong_sign_clamps(self):
        assert effect_strength(self.make_stats(size_r=-0.2), Effect.SIZE) == 0.0
        assert effect_strength(self.make_stats(distance_r=0.3), Effect.DISTANCE) == 0.0

    def test_ratio_passthrough(self):
        assert effect_strength(self.make_stats(ratio_r2=0.35), Effect.RATIO) == 0.35


class TestHumanCsv:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "human.csv"
        path.write_text(
            "age,overall,topology,euclidean,figures,symmetrical,chiral,metric,transformations\n"
            "6,0.55,0.8,0.5,,0.4,0.3,0.5,0.45\n"
            "7,0.60,0.85,0.55,0.5,,0.35,0.55,0.5\n",
            encoding="utf-8",
        )
        series = read_human_csv(str(path))
        assert series["overall"].points == ((6.0, 0.55), (7.0, 0.60))
        assert series["figures"].points == ((7.0, 0.5),)  # blank cell skipped
        assert "symmetrical" in series

    def test_bad_header_rejected(self, tmp_path):
        path = tmp_path / "human.csv"
        path.write_text("age,accuracy\n6,0.5\n", encoding="utf-8")
        with pytest.raises(FormatError, match="header"):
            read_human_csv(str(path))

    def test_bad_cell_rejected(self, tmp_path):
        path = tmp_path / "human.csv"
        path.write_text(
            "age,overall,topology,euclidean,figures,symmetrical,chiral,metric,transformations\n"
            "6,zero,,,,,,,\n",
            encoding="utf-8",
        )
        with pytest.raises(FormatError):
            read_human_csv(str(path))


class TestPearsonReexport:
    def test_same_function_as_stats(self):
        r, p = pearson([1, 2, 3, 4, 5], [2, 1, 4, 3, 5])
        assert r == pytest.approx(0.8, abs=1e-12)
        assert p == pytest.approx(0.10408803866182778, abs=1e-10)
