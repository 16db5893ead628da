"""Procedural generation of controlled numerosity stimulus sets 1 to 5.

Each stimulus is a 720x720 binary raster of 1 to 9 black items on a white
background.  Item sizes are solved analytically so that the set's controlled
quantity (total area or total perimeter) is exact before rasterization:

* set 1: circles, total area fixed at one of five area levels
* set 2: circles, total perimeter fixed at one of five perimeter levels
* set 3: one shape per image (circle, square or triangle), total perimeter
  fixed at a randomly drawn perimeter level
* set 4: one shape per image, total area fixed at a randomly drawn area level
* set 5: shape and size drawn independently per item

Placement is rejection-sampled: bounding discs keep a 2 px mutual gap and a
4 px canvas margin.  Rasterization uses pixel-center inclusion, so output is
bit-exact for a given seed.
"""

from __future__ import annotations

import math
import os
from collections import deque
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .core import StimulusId
from .errors import (
    InvalidLevel,
    IoFailure,
    PlacementFailure,
    UnsupportedSet,
)

CANVAS_PX = 720
MARGIN_PX = 4.0
GAP_PX = 2.0
MAX_PLACEMENT_ATTEMPTS = 10_000

AREA_LEVELS_PX = (103.0, 207.0, 311.0, 414.0, 518.0)
PERIMETER_LEVELS_PX = (100.0, 150.0, 200.0, 250.0, 300.0)

SQRT3 = math.sqrt(3.0)


class Shape(Enum):
    CIRCLE = "circle"
    SQUARE = "square"
    TRIANGLE = "triangle"


_SHAPE_ORDER = (Shape.CIRCLE, Shape.SQUARE, Shape.TRIANGLE)


@dataclass(frozen=True)
class Item:
    shape: Shape
    center: tuple  # (x, y) in pixels
    size_param: float  # circle radius, or square/triangle side length
    rotation: float = 0.0  # radians


@dataclass(frozen=True)
class StimulusPlan:
    id: StimulusId
    items: tuple
    canvas_px: int = CANVAS_PX
    target_area_px: float | None = None
    target_perimeter_px: float | None = None


@dataclass(frozen=True)
class SetParams:
    set: int
    replicates_per_cell: int = 1
    rng_seed: int = 0
    area_levels_px: tuple = AREA_LEVELS_PX
    perimeter_levels_px: tuple = PERIMETER_LEVELS_PX

    def __post_init__(self):
        if not 1 <= self.set <= 5:
            raise UnsupportedSet(f"set {self.set} is not generated (only 1..5)")
        if self.replicates_per_cell < 1:
            raise InvalidLevel(f"replicates_per_cell must be >= 1")
        for name in ("area_levels_px", "perimeter_levels_px"):
            levels = getattr(self, name)
            if len(levels) != 5 or any(
                levels[i] >= levels[i + 1] for i in range(4)
            ):
                raise InvalidLevel(f"{name} must be 5 strictly increasing numbers")


def bounding_radius(shape: Shape, size_param: float) -> float:
    """Radius of the smallest disc covering the item, centered on it."""
    if shape is Shape.CIRCLE:
        return size_param
    if shape is Shape.SQUARE:
        return size_param * math.sqrt(2.0) / 2.0
    return size_param / SQRT3  # equilateral triangle circumradius


def _size_for_area(shape: Shape, area: float) -> float:
    if shape is Shape.CIRCLE:
        return math.sqrt(area / math.pi)
    if shape is Shape.SQUARE:
        return math.sqrt(area)
    return math.sqrt(4.0 * area / SQRT3)


def _size_for_perimeter(shape: Shape, perimeter: float) -> float:
    if shape is Shape.CIRCLE:
        return perimeter / (2.0 * math.pi)
    if shape is Shape.SQUARE:
        return perimeter / 4.0
    return perimeter / 3.0


def item_area(it: Item) -> float:
    if it.shape is Shape.CIRCLE:
        return math.pi * it.size_param**2
    if it.shape is Shape.SQUARE:
        return it.size_param**2
    return SQRT3 / 4.0 * it.size_param**2


def item_perimeter(it: Item) -> float:
    if it.shape is Shape.CIRCLE:
        return 2.0 * math.pi * it.size_param
    if it.shape is Shape.SQUARE:
        return 4.0 * it.size_param
    return 3.0 * it.size_param


def stimulus_rng(rng_seed: int, sid: StimulusId) -> np.random.Generator:
    """Per-stimulus generator; independent of generation schedule."""
    level = 0 if sid.level is None else sid.level
    ss = np.random.SeedSequence(
        [int(rng_seed), sid.set, sid.numerosity, level, sid.replicate]
    )
    return np.random.Generator(np.random.PCG64(ss))


def _place(rng, radii) -> list:
    """Rejection-sample non-overlapping centers for the given bounding radii."""
    centers = []
    attempts = 0
    for radius in radii:
        lo = MARGIN_PX + radius
        hi = CANVAS_PX - MARGIN_PX - radius
        if lo > hi:
            raise PlacementFailure(
                f"item with bounding radius {radius:.2f} cannot fit the canvas"
            )
        while True:
            attempts += 1
            if attempts > MAX_PLACEMENT_ATTEMPTS:
                raise PlacementFailure(
                    f"exhausted {MAX_PLACEMENT_ATTEMPTS} placement attempts"
                )
            x = rng.uniform(lo, hi)
            y = rng.uniform(lo, hi)
            ok = True
            for (px, py), prad in centers:
                if math.hypot(x - px, y - py) < radius + prad + GAP_PX:
                    ok = False
                    break
            if ok:
                centers.append(((x, y), radius))
                break
    return [c for c, _ in centers]


def plan_items(params: SetParams, sid: StimulusId, rng=None) -> StimulusPlan:
    """Plan shapes, analytic sizes and placements for one stimulus.

    Sizes satisfy the set's constraint exactly in continuous geometry; only
    rasterization introduces error.
    """
    if sid.set != params.set:
        raise UnsupportedSet(f"id is for set {sid.set}, params for set {params.set}")
    if params.set <= 2:
        if sid.level is None:
            raise InvalidLevel(f"set {params.set} requires a level in 1..5")
        if not 1 <= sid.level <= 5:
            raise InvalidLevel(f"level {sid.level} out of range 1..5")
    elif sid.level is not None:
        raise InvalidLevel(f"set {params.set} draws its level; id must omit it")
    if rng is None:
        rng = stimulus_rng(params.rng_seed, sid)

    n = sid.numerosity
    target_area = None
    target_perimeter = None

    if params.set == 1:
        target_area = params.area_levels_px[sid.level - 1]
        shapes = [Shape.CIRCLE] * n
        sizes = [_size_for_area(Shape.CIRCLE, target_area / n)] * n
    elif params.set == 2:
        target_perimeter = params.perimeter_levels_px[sid.level - 1]
        shapes = [Shape.CIRCLE] * n
        sizes = [_size_for_perimeter(Shape.CIRCLE, target_perimeter / n)] * n
    elif params.set == 3:
        target_perimeter = params.perimeter_levels_px[int(rng.integers(5))]
        shape = _SHAPE_ORDER[int(rng.integers(3))]
        shapes = [shape] * n
        sizes = [_size_for_perimeter(shape, target_perimeter / n)] * n
    elif params.set == 4:
        target_area = params.area_levels_px[int(rng.integers(5))]
        shape = _SHAPE_ORDER[int(rng.integers(3))]
        shapes = [shape] * n
        sizes = [_size_for_area(shape, target_area / n)] * n
    else:
        lo = params.area_levels_px[0] / 9.0
        hi = params.area_levels_px[-1] / 3.0
        shapes = []
        sizes = []
        for _ in range(n):
            shape = _SHAPE_ORDER[int(rng.integers(3))]
            area = rng.uniform(lo, hi)
            shapes.append(shape)
            sizes.append(_size_for_area(shape, area))

    rotations = [
        0.0 if shape is Shape.CIRCLE else rng.uniform(0.0, 2.0 * math.pi)
        for shape in shapes
    ]
    radii = [bounding_radius(s, sz) for s, sz in zip(shapes, sizes)]
    centers = _place(rng, radii)
    items = tuple(
        Item(shape=s, center=c, size_param=sz, rotation=rot)
        for s, c, sz, rot in zip(shapes, centers, sizes, rotations)
    )
    return StimulusPlan(
        id=sid,
        items=items,
        target_area_px=target_area,
        target_perimeter_px=target_perimeter,
    )


def _fill_circle(grid, cx, cy, r):
    x0 = max(0, int(math.floor(cx - r - 1)))
    x1 = min(CANVAS_PX - 1, int(math.ceil(cx + r + 1)))
    y0 = max(0, int(math.floor(cy - r - 1)))
    y1 = min(CANVAS_PX - 1, int(math.ceil(cy + r + 1)))
    xs = np.arange(x0, x1 + 1) + 0.5 - cx
    ys = np.arange(y0, y1 + 1) + 0.5 - cy
    mask = ys[:, None] ** 2 + xs[None, :] ** 2 <= r * r
    grid[y0 : y1 + 1, x0 : x1 + 1][mask] = 1


def _fill_convex(grid, cx, cy, vertices):
    """Fill a convex polygon given CCW vertices (pixel-center inclusion)."""
    vx = np.array([v[0] for v in vertices])
    vy = np.array([v[1] for v in vertices])
    x0 = max(0, int(math.floor(vx.min() - 1)))
    x1 = min(CANVAS_PX - 1, int(math.ceil(vx.max() + 1)))
    y0 = max(0, int(math.floor(vy.min() - 1)))
    y1 = min(CANVAS_PX - 1, int(math.ceil(vy.max() + 1)))
    px = np.arange(x0, x1 + 1) + 0.5
    py = np.arange(y0, y1 + 1) + 0.5
    gx, gy = np.meshgrid(px, py)
    inside = np.ones(gx.shape, dtype=bool)
    k = len(vertices)
    for i in range(k):
        ax, ay = vertices[i]
        bx, by = vertices[(i + 1) % k]
        # point is inside iff it is on the left of every CCW edge
        cross = (bx - ax) * (gy - ay) - (by - ay) * (gx - ax)
        inside &= cross >= 0.0
    grid[y0 : y1 + 1, x0 : x1 + 1][inside] = 1


def _polygon_vertices(it: Item) -> list:
    cx, cy = it.center
    if it.shape is Shape.SQUARE:
        angles = [it.rotation + math.pi / 4.0 + i * math.pi / 2.0 for i in range(4)]
        rad = it.size_param * math.sqrt(2.0) / 2.0
    else:
        angles = [
            it.rotation + math.pi / 2.0 + i * 2.0 * math.pi / 3.0 for i in range(3)
        ]
        rad = it.size_param / SQRT3
    return [(cx + rad * math.cos(a), cy + rad * math.sin(a)) for a in angles]


def render(plan: StimulusPlan) -> np.ndarray:
    """Rasterize a plan to a binary grid (1 = black item pixel, 0 = white)."""
    grid = np.zeros((plan.canvas_px, plan.canvas_px), dtype=np.uint8)
    for it in plan.items:
        cx, cy = it.center
        if it.shape is Shape.CIRCLE:
            _fill_circle(grid, cx, cy, it.size_param)
        else:
            _fill_convex(grid, cx, cy, _polygon_vertices(it))
    return grid


def count_components(raster: np.ndarray) -> int:
    """Number of 8-connected black components."""
    h, w = raster.shape
    seen = np.zeros((h, w), dtype=bool)
    count = 0
    black_rows, black_cols = np.nonzero(raster)
    for start_y, start_x in zip(black_rows.tolist(), black_cols.tolist()):
        if seen[start_y, start_x]:
            continue
        count += 1
        queue = deque([(start_y, start_x)])
        seen[start_y, start_x] = True
        while queue:
            y, x = queue.popleft()
            for dy in (-1, 0, 1):
                for dx in (-1, 0, 1):
                    if dy == 0 and dx == 0:
                        continue
                    ny, nx = y + dy, x + dx
                    if 0 <= ny < h and 0 <= nx < w:
                        if raster[ny, nx] and not seen[ny, nx]:
                            seen[ny, nx] = True
                            queue.append((ny, nx))
    return count


def write_pgm(raster: np.ndarray, path: str) -> None:
    """Binary PGM, maxval 255: black items as 0, white background as 255."""
    h, w = raster.shape
    data = ((1 - raster.astype(np.uint8)) * 255).astype(np.uint8)
    try:
        with open(path, "wb") as fh:
            fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
            fh.write(data.tobytes())
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def read_pgm(path: str) -> np.ndarray:
    """Read a binary PGM back to a 0/1 grid (nonwhite pixels become 1)."""
    from .errors import FormatError

    with open(path, "rb") as fh:
        raw = fh.read()
    parts = raw.split(b"\n", 3)
    if len(parts) != 4 or parts[0] != b"P5":
        raise FormatError(f"{path}: not a binary PGM")
    try:
        w, h = (int(t) for t in parts[1].split())
        maxval = int(parts[2])
    except ValueError as exc:
        raise FormatError(f"{path}: bad header") from exc
    if maxval != 255 or len(parts[3]) != w * h:
        raise FormatError(f"{path}: payload size mismatch")
    data = np.frombuffer(parts[3], dtype=np.uint8).reshape(h, w)
    return (data < 128).astype(np.uint8)


def corpus_ids(params: SetParams) -> list:
    """Canonical cell order: numerosity, then level (sets 1-2), then replicate."""
    ids = []
    levels = range(1, 6) if params.set <= 2 else (None,)
    for n in range(1, 10):
        for level in levels:
            for rep in range(params.replicates_per_cell):
                ids.append(
                    StimulusId(
                        set=params.set, numerosity=n, level=level, replicate=rep
                    )
                )
    return ids


def generate_corpus(params: SetParams, out_dir: str) -> list:
    """Write one PGM per cell plus a TSV manifest; returns (id, path) pairs.

    Fully reproducible: per-stimulus sub-seeds make output independent of
    generation order, and rasterization is bit-exact.
    """
    ids = corpus_ids(params)
    try:
        os.makedirs(out_dir, exist_ok=True)
    except OSError as exc:
        raise IoFailure(f"cannot create {out_dir}: {exc}") from exc
    entries = []
    for sid in ids:
        try:
            plan = plan_items(params, sid)
        except PlacementFailure as exc:
            raise PlacementFailure(f"{sid}: {exc}") from exc
        raster = render(plan)
        rel = f"{sid}.pgm"
        write_pgm(raster, os.path.join(out_dir, rel))
        entries.append((sid, rel))
    lines = []
    for sid, rel in entries:
        level = "x" if sid.level is None else str(sid.level)
        lines.append(
            f"{sid}\t{rel}\t{sid.set}\t{sid.numerosity}\t{level}\t{sid.replicate}\n"
        )
    try:
        with open(os.path.join(out_dir, "manifest.tsv"), "wb") as fh:
            fh.write("".join(lines).encode("utf-8"))
    except OSError as exc:
        raise IoFailure(f"cannot write manifest: {exc}") from exc
    return entries
