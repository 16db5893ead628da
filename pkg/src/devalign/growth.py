"""Growth-curve statistics: power-function fits to accuracy/effect
trajectories and Pearson alignment between human developmental series and
model training series under a linear epoch-to-age mapping.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass

import numpy as np

from .core import DEFAULT_EPOCH_AGE_MAP, EpochAgeMap
from .errors import (
    DegenerateVariance,
    FitFailure,
    FormatError,
    InsufficientOverlap,
)
from .numeffects import EffectStats
from .stats import pearson  # re-exported: r with two-sided Student-t p

__all__ = [
    "Trajectory",
    "GrowthFit",
    "AlignmentResult",
    "Effect",
    "fit_power",
    "pearson",
    "align_trajectories",
    "effect_strength",
    "read_human_csv",
    "HUMAN_CSV_COLUMNS",
]

MAX_ITERATIONS = 200
REL_SS_TOL = 1e-12


@dataclass(frozen=True)
class Trajectory:
    label: str
    points: tuple  # ((x, y), ...) with x > 0 strictly increasing

    def __post_init__(self):
        pts = tuple((float(x), float(y)) for x, y in self.points)
        last = 0.0
        for x, _ in pts:
            if x <= last:
                raise FormatError(
                    f"{self.label}: x values must be positive and strictly increasing"
                )
            last = x
        object.__setattr__(self, "points", pts)

    @property
    def xs(self):
        return np.array([p[0] for p in self.points])

    @property
    def ys(self):
        return np.array([p[1] for p in self.points])


@dataclass(frozen=True)
class GrowthFit:
    a: float
    b: float
    r2: float


@dataclass(frozen=True)
class AlignmentResult:
    pearson_r: float
    p_value: float
    n_pairs: int
    mapping: EpochAgeMap
    dropped_human: int = 0
    dropped_model: int = 0


class Effect(enum.Enum):
    DISTANCE = "distance"
    SIZE = "size"
    RATIO = "ratio"


def _power_ss(x, y, a, b):
    resid = y - a * np.power(x, b)
    return float(resid @ resid)


def fit_power(traj: Trajectory) -> GrowthFit:
    """Least-squares fit of y = a*x^b by Gauss-Newton with step-halving.

    Initialized from a log-log regression over the y > 0 points; falls back
    to (mean(y), 0) when no point is positive.
    """
    x = traj.xs
    y = traj.ys
    if len(x) < 3:
        raise FitFailure(f"{traj.label}: need at least 3 points to fit")
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0.0:
        raise DegenerateVariance(f"{traj.label}: constant y values")

    positive = y > 0
    if positive.any():
        lx = np.log(x[positive])
        ly = np.log(y[positive])
        if len(lx) >= 2 and np.ptp(lx) > 0:
            slope, intercept = np.polyfit(lx, ly, 1)
            a, b = math.exp(intercept), float(slope)
        else:
            a, b = float(np.mean(y[positive])), 0.0
    else:
        a, b = float(y.mean()), 0.0

    ss = _power_ss(x, y, a, b)
    converged = False
    log_x = np.log(x)
    for _ in range(MAX_ITERATIONS):
        model = a * np.power(x, b)
        resid = y - model
        jac = np.column_stack([np.power(x, b), model * log_x])
        jtj = jac.T @ jac
        jtr = jac.T @ resid
        try:
            delta = np.linalg.solve(jtj, jtr)
        except np.linalg.LinAlgError:
            delta, _, _, _ = np.linalg.lstsq(jtj, jtr, rcond=None)
        step = 1.0
        improved = False
        for _ in range(40):
            a_new = a + step * float(delta[0])
            b_new = b + step * float(delta[1])
            ss_new = _power_ss(x, y, a_new, b_new)
            if math.isfinite(ss_new) and ss_new <= ss:
                improved = True
                break
            step /= 2.0
        if not improved:
            converged = True  # no descent direction left; stationary point
            break
        rel_change = (ss - ss_new) / ss if ss > 0 else 0.0
        a, b, ss = a_new, b_new, ss_new
        if rel_change < REL_SS_TOL:
            converged = True
            break
    if not converged:
        raise FitFailure(f"{traj.label}: no convergence in {MAX_ITERATIONS} iterations")
    return GrowthFit(a=a, b=b, r2=1.0 - ss / ss_tot)


def align_trajectories(
    human: Trajectory,
    model: Trajectory,
    mapping: EpochAgeMap = DEFAULT_EPOCH_AGE_MAP,
) -> AlignmentResult:
    """Pair ages with epochs via the mapping and correlate the paired y values."""
    model_by_epoch = {}
    for epoch, y in model.points:
        model_by_epoch[round(epoch, 9)] = y
    paired_human = []
    paired_model = []
    used_epochs = set()
    for age, y in human.points:
        epoch = round(mapping.epoch_of(age), 9)
        if epoch in model_by_epoch:
            paired_human.append(y)
            paired_model.append(model_by_epoch[epoch])
            used_epochs.add(epoch)
    dropped_human = len(human.points) - len(paired_human)
    dropped_model = len(model.points) - len(used_epochs)
    if len(paired_human) < 3:
        raise InsufficientOverlap(
            f"only {len(paired_human)} age/epoch pairs; need at least 3"
        )
    r, p = pearson(paired_human, paired_model)
    return AlignmentResult(
        pearson_r=r,
        p_value=p,
        n_pairs=len(paired_human),
        mapping=mapping,
        dropped_human=dropped_human,
        dropped_model=dropped_model,
    )


def effect_strength(stats: EffectStats, effect: Effect) -> float:
    """Nonnegative strength so power fits are well-posed; wrong signs clamp to 0."""
    if effect is Effect.DISTANCE:
        return max(0.0, -stats.distance_r)
    if effect is Effect.SIZE:
        return max(0.0, stats.size_r)
    return stats.ratio_r2


HUMAN_CSV_COLUMNS = (
    "age",
    "overall",
    "topology",
    "euclidean",
    "figures",
    "symmetrical",
    "chiral",
    "metric",
    "transformations",
)


def read_human_csv(path: str) -> dict:
    """Accuracy-by-age CSV with one column per concept class plus overall.

    Blank cells mark missing measurements; each column becomes a Trajectory
    over the ages where it has data.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        rows = [row for row in reader if row]
    if not rows or tuple(cell.strip() for cell in rows[0]) != HUMAN_CSV_COLUMNS:
        raise FormatError(
            f"{path}: header must be {','.join(HUMAN_CSV_COLUMNS)}"
        )
    series = {name: [] for name in HUMAN_CSV_COLUMNS[1:]}
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(HUMAN_CSV_COLUMNS):
            raise FormatError(f"{path}:{lineno}: expected {len(HUMAN_CSV_COLUMNS)} cells")
        try:
            age = float(row[0])
        except ValueError as exc:
            raise FormatError(f"{path}:{lineno}: bad age {row[0]!r}") from exc
        for name, cell in zip(HUMAN_CSV_COLUMNS[1:], row[1:]):
            cell = cell.strip()
            if cell == "":
                continue
            try:
                value = float(cell)
            except ValueError as exc:
                raise FormatError(f"{path}:{lineno}: bad value {cell!r}") from exc
            series[name].append((age, value))
    return {
        name: Trajectory(label=name, points=tuple(points))
        for name, points in series.items()
        if points
    }
