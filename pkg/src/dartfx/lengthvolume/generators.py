# SPDX-FileCopyrightText: 2024-present kulnor <pascal.heus@gmail.com>
#
# SPDX-License-Identifier: MIT
"""Deterministic generators of covers, simplex covers and finite metric spaces.

Randomness comes from ``numpy.random.Generator(PCG64(seed))`` with one 64-bit seed per call, so
identical specs always produce identical files.
"""

import json
import math
from fractions import Fraction
from itertools import product
from pathlib import Path
from typing import Annotated, Literal

import numpy as np
from numpy.random import PCG64, Generator
from pydantic import BaseModel, Field, TypeAdapter, ValidationError, model_validator

from .content import FiniteMetricSpace
from .cover import ONE, ZERO, Rational, WeightedCover, load_cover_dict
from .exceptions import InputError, ParameterError
from .reduction import spanning_demo
from .simplex import SimplexCover, simplex_patch

GRID_UNITS = 64
"""Random box corners lie on the grid of pitch 1/64."""


class GridSpec(BaseModel):
    kind: Literal["grid"] = "grid"
    j: int = Field(ge=0, le=6, description="2^(j n) cells of side 2^-j")
    n: int = Field(ge=1, le=4)
    overlap: Rational = Field(default=Fraction(1, 10), description="Overlap between neighbouring cells")

    @model_validator(mode="after")
    def _check_overlap(self) -> "GridSpec":
        if not ZERO < self.overlap < Fraction(1, 2**self.j):
            raise ValueError("overlap must lie strictly between 0 and the cell side")
        return self


class LineSpec(BaseModel):
    kind: Literal["line"] = "line"
    intervals: list[tuple[Rational, Rational]]
    weights: list[Rational]


class RandomBoxesSpec(BaseModel):
    kind: Literal["random_boxes"] = "random_boxes"
    count: int = Field(ge=1, le=4096)
    n: int = Field(ge=1, le=4)
    seed: int = Field(ge=0, lt=2**64)
    min_overlap: Rational = Field(default=Fraction(1, 64))

    @model_validator(mode="after")
    def _check_overlap(self) -> "RandomBoxesSpec":
        if not ZERO < self.min_overlap <= Fraction(1, GRID_UNITS):
            raise ValueError("min_overlap must lie in (0, 1/64]")
        return self


class SpanningDemoSpec(BaseModel):
    kind: Literal["spanning_demo"] = "spanning_demo"
    n: int = Field(ge=1, le=4)


class SimplexPatchSpec(BaseModel):
    kind: Literal["simplex_patch"] = "simplex_patch"
    n: int = Field(ge=1, le=4)
    depth: int = Field(ge=1, le=32)


class CircleSpec(BaseModel):
    kind: Literal["circle"] = "circle"
    points: int = Field(ge=1, le=3000)


class SnowflakedLineSpec(BaseModel):
    kind: Literal["snowflaked_line"] = "snowflaked_line"
    points: int = Field(ge=2, le=3000)
    alpha: Rational = Field(default=ONE)

    @model_validator(mode="after")
    def _check_alpha(self) -> "SnowflakedLineSpec":
        if not ZERO < self.alpha <= ONE:
            raise ValueError("alpha must lie in (0, 1]")
        return self


class ThinNeckSpec(BaseModel):
    kind: Literal["thin_neck"] = "thin_neck"
    cluster_size: int = Field(ge=1, le=40)
    neck_len: int = Field(ge=2, le=400)


GeneratorSpec = Annotated[
    GridSpec
    | LineSpec
    | RandomBoxesSpec
    | SpanningDemoSpec
    | SimplexPatchSpec
    | CircleSpec
    | SnowflakedLineSpec
    | ThinNeckSpec,
    Field(discriminator="kind"),
]

Generated = WeightedCover | SimplexCover | FiniteMetricSpace

_spec_adapter: TypeAdapter[GeneratorSpec] = TypeAdapter(GeneratorSpec)


def parse_spec(data: dict) -> GeneratorSpec:
    try:
        return _spec_adapter.validate_python(data)
    except ValidationError as e:
        first = str(e.errors()[0]["msg"])
        raise InputError("invalid generator spec", "generate", {"errors": e.error_count(), "first": first}) from e


#
# COVERS
#
def grid_cover(j: int, n: int, overlap: Fraction) -> WeightedCover:
    """``2^(jn)`` cubes of side ``2^-j`` widened by ``overlap/2`` inside and ``overlap`` at the cube faces."""
    cells = 2**j
    side = Fraction(1, cells)
    half = overlap / 2
    boxes = []
    for index in product(range(cells), repeat=n):
        lo = [-overlap if a == 0 else a * side - half for a in index]
        hi = [1 + overlap if a == cells - 1 else (a + 1) * side + half for a in index]
        boxes.append((lo, hi))
    return WeightedCover.from_boxes(boxes, [side] * len(boxes))


def line_cover(intervals: list[tuple[Fraction, Fraction]], weights: list[Fraction]) -> WeightedCover:
    if len(intervals) != len(weights):
        raise ParameterError("one weight per interval is required", "line_cover")
    return WeightedCover.from_boxes([([lo], [hi]) for lo, hi in intervals], list(weights))


def random_boxes(count: int, n: int, seed: int, min_overlap: Fraction = Fraction(1, 64)) -> WeightedCover:
    """Random guillotine partition of the cube into ``count`` cells on the 1/64 grid, each cell widened.

    When ``count >= 2^n`` every axis is cut once across the whole cube first, so no cell spans an
    axis. Cells are then split at random until ``count`` are reached; weights are ``k/16``, ``1 <= k <= 16``.
    """
    rng = Generator(PCG64(seed))
    cells: list[tuple[list[int], list[int]]] = [([0] * n, [GRID_UNITS] * n)]
    if count >= 2**n:
        cuts = [int(rng.integers(1, GRID_UNITS)) for _ in range(n)]
        cells = []
        for sides in product((0, 1), repeat=n):
            lo = [0 if s == 0 else cuts[k] for k, s in enumerate(sides)]
            hi = [cuts[k] if s == 0 else GRID_UNITS for k, s in enumerate(sides)]
            cells.append((lo, hi))
    while len(cells) < count:
        splittable = [i for i, (lo, hi) in enumerate(cells) if any(b - a >= 2 for a, b in zip(lo, hi, strict=True))]
        if not splittable:
            raise ParameterError("too many boxes for the 1/64 grid", "random_boxes", {"count": count})
        lo, hi = cells.pop(splittable[int(rng.integers(len(splittable)))])
        axes = [k for k in range(n) if hi[k] - lo[k] >= 2]
        k = axes[int(rng.integers(len(axes)))]
        cut = int(rng.integers(lo[k] + 1, hi[k]))
        cells.append((lo, [*hi[:k], cut, *hi[k + 1 :]]))
        cells.append(([*lo[:k], cut, *lo[k + 1 :]], hi))
    half = min_overlap / 2
    boxes = []
    for lo, hi in cells:
        box_lo = [-min_overlap if a == 0 else Fraction(a, GRID_UNITS) - half for a in lo]
        box_hi = [1 + min_overlap if b == GRID_UNITS else Fraction(b, GRID_UNITS) + half for b in hi]
        boxes.append((box_lo, box_hi))
    weights = [[Fraction(int(v), 16) for v in rng.integers(1, 17, size=n)] for _ in boxes]
    sets = [
        {"id": i + 1, "lo": lo, "hi": hi, "weights": w}
        for i, ((lo, hi), w) in enumerate(zip(boxes, weights, strict=True))
    ]
    return load_cover_dict({"dimension": n, "sets": sets})


#
# METRIC SPACES
#
def circle(points: int) -> FiniteMetricSpace:
    """``points`` equally spaced points of the unit circle with the geodesic (arc length) metric."""
    step = 2 * math.pi / points
    index = np.arange(points)
    gap = np.abs(index[:, None] - index[None, :])
    matrix = step * np.minimum(gap, points - gap)
    return FiniteMetricSpace.from_matrix(matrix, [f"c{i}" for i in range(points)])


def snowflaked_line(points: int, alpha: Fraction = ONE) -> FiniteMetricSpace:
    """``points`` equally spaced points of [0, 1] with distances ``|s - t|^alpha``."""
    exponent = float(alpha)
    last = points - 1
    values = [float(Fraction(k, last)) ** exponent for k in range(points)]
    index = np.arange(points)
    matrix = np.asarray(values)[np.abs(index[:, None] - index[None, :])]
    return FiniteMetricSpace.from_matrix(matrix, [f"t{i}" for i in range(points)])


def thin_neck(cluster_size: int, neck_len: int) -> FiniteMetricSpace:
    """Two square clusters of unit-spaced points joined by a one-point-wide path, Euclidean metric.

    The left cluster occupies ``x in [-(s-1), 0]``, the neck ``x = 1 .. neck_len - 1`` on ``y = 0``
    and the right cluster ``x in [neck_len, neck_len + s - 1]``, with ``y`` centred on 0.
    """
    ys = [y - cluster_size // 2 for y in range(cluster_size)]
    coords = [(x, y) for x in range(-(cluster_size - 1), 1) for y in ys]
    coords += [(x, 0) for x in range(1, neck_len)]
    coords += [(x, y) for x in range(neck_len, neck_len + cluster_size) for y in ys]
    labels = [f"{x},{y}" for x, y in coords]
    return FiniteMetricSpace.from_coords(coords, "l2", labels)


def generate(spec: GeneratorSpec) -> Generated:
    match spec:
        case GridSpec():
            return grid_cover(spec.j, spec.n, spec.overlap)
        case LineSpec():
            return line_cover(spec.intervals, spec.weights)
        case RandomBoxesSpec():
            return random_boxes(spec.count, spec.n, spec.seed, spec.min_overlap)
        case SpanningDemoSpec():
            return spanning_demo(spec.n)
        case SimplexPatchSpec():
            return simplex_patch(spec.n, spec.depth)
        case CircleSpec():
            return circle(spec.points)
        case SnowflakedLineSpec():
            return snowflaked_line(spec.points, spec.alpha)
        case ThinNeckSpec():
            return thin_neck(spec.cluster_size, spec.neck_len)
    raise ParameterError(f"unknown generator {spec!r}", "generate")


def to_json(obj: Generated) -> str:
    if isinstance(obj, WeightedCover):
        return obj.to_json()
    if isinstance(obj, SimplexCover):
        return obj.model_dump_json(indent=2)
    return json.dumps(obj.to_dict())


def write_generated(obj: Generated, out: str | Path) -> Path:
    path = Path(out)
    path.write_text(to_json(obj) + "\n", encoding="utf-8")
    return path
