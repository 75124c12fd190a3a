# SPDX-FileCopyrightText: 2024-present kulnor <pascal.heus@gmail.com>
#
# SPDX-License-Identifier: MIT
"""Reduction of an arbitrary cover to a non-spanning one at an ``O(eps)`` volume cost.

The sets are shrunk by ``delta/2`` so that any two of them either meet or sit at distance at least
``delta/2``, inflated by ``eps/2`` in the slightly larger cube ``[0, 1+eps]^n``, and the margin
slabs ``x_j in [1 + eps/2, 1 + eps]`` are covered by small patch boxes centred on the far faces.
After rescaling to the unit cube no set meets two opposite faces, and face distances grow by
exactly ``eps``.

Patches have L-infinity half-width ``s_n * eps`` and are laid out on a grid of pitch
``7/4 * s_n * eps``, so neighbouring patches overlap and the inflation stays ``O(eps)``.

Metric notions (balls, neighbourhoods, Lebesgue numbers) use the L-infinity norm, in which boxes
are balls and all margins stay rational.
"""

import logging
from fractions import Fraction
from functools import reduce
from itertools import product
from math import ceil, isqrt
from operator import mul
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field

from .chains import face_distances
from .cover import (
    ONE,
    ZERO,
    Face,
    Interval,
    OpenBox,
    Point,
    Rational,
    WeightedCover,
    box_meets_face,
    find_uncovered_point,
    intersecting_pairs,
    is_spanning,
    require_covering,
)
from .exceptions import InvariantViolation, ParameterError

MAX_PATCHES = 50_000
PATCH_PITCH = Fraction(7, 4)
"""Patch grid pitch in units of the patch half-width; below 2 so open patches overlap."""


def sqrt_upper_bound(n: int) -> Fraction:
    """Rational ``s_n >= sqrt(n)``: exact for perfect squares, otherwise rounded up to two decimals."""
    root = isqrt(n)
    if root * root == n:
        return Fraction(root)
    return Fraction(isqrt(n * 10**4) + 1, 100)


def _axis_radius(lo: Fraction, hi: Fraction) -> Fraction:
    """Largest L-infinity radius of a relative ball of the unit interval inside ``(lo, hi)``, capped at 1."""
    low_free, high_free = lo < ZERO, hi > ONE
    if low_free and high_free:
        radius = ONE
    elif low_free:
        radius = hi
    elif high_free:
        radius = ONE - lo
    else:
        radius = (hi - lo) / 2
    return min(radius, ONE)


def inscribed_radius(lo: tuple[Fraction, ...], hi: tuple[Fraction, ...]) -> Fraction:
    return min(_axis_radius(a, b) for a, b in zip(lo, hi, strict=True))


def _shrunk_intervals(cover: WeightedCover, r: Fraction) -> list[list[Interval]]:
    """Closed boxes of points whose relative ball of radius ``r`` lies in each set."""
    boxes = []
    for s in cover.sets:
        axes: list[Interval] = []
        for k in range(cover.dimension):
            lower = (s.lo[k] + r) if not s.straddles_low(k) else -ONE
            upper = (s.hi[k] - r) if not s.straddles_high(k) else ONE + ONE
            axes.append((lower, upper, True, True))
        boxes.append(axes)
    return boxes


def lebesgue_lower_bound(cover: WeightedCover, steps: int = 20) -> Fraction:
    """Dyadic ``r`` such that every relative L-infinity ball of radius ``r`` lies in some set (capped at 1)."""

    def covers(r: Fraction) -> bool:
        return find_uncovered_point(cover.dimension, _shrunk_intervals(cover, r)) is None

    if covers(ONE):
        return ONE
    bad = ONE
    good = None
    for _ in range(64):
        candidate = bad / 2
        if covers(candidate):
            good = candidate
            break
        bad = candidate
    if good is None:
        raise ParameterError("no positive Lebesgue number found", "lebesgue_lower_bound", {"binding": "delta1"})
    for _ in range(steps):
        mid = (good + bad) / 2
        if covers(mid):
            good = mid
        else:
            bad = mid
    return good


class ReductionMargins(BaseModel):
    """Shrink margins: Lebesgue number, pairwise intersection and face incidence radii."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    delta1: Rational
    delta2: Rational
    delta3: Rational
    delta: Rational
    binding: Literal["delta1", "delta2", "delta3"]


def reduction_margins(cover: WeightedCover) -> ReductionMargins:
    delta1 = lebesgue_lower_bound(cover)
    delta2 = ONE
    pairs = [(i, i) for i in range(cover.size)] + intersecting_pairs(cover)
    for i, j in pairs:
        a, b = cover.sets[i], cover.sets[j]
        lo = tuple(max(x, y) for x, y in zip(a.lo, b.lo, strict=True))
        hi = tuple(min(x, y) for x, y in zip(a.hi, b.hi, strict=True))
        delta2 = min(delta2, inscribed_radius(lo, hi))
    delta3 = ONE
    for s in cover.sets:
        for k in range(cover.dimension):
            for face in (Face.low(k), Face.high(k)):
                if not box_meets_face(s, face):
                    continue
                radii = [_axis_radius(s.lo[j], s.hi[j]) for j in range(cover.dimension) if j != k]
                along = min(s.hi[k], ONE) if face.side == "low" else min(ONE - s.lo[k], ONE)
                delta3 = min(delta3, along, *radii)
    values = {"delta1": delta1, "delta2": delta2, "delta3": delta3}
    binding = min(values, key=lambda name: values[name])
    delta = values[binding]
    if delta <= ZERO:
        raise ParameterError("shrink margin vanished", "reduce_spanning", {"binding": binding})
    return ReductionMargins(
        delta1=delta1, delta2=delta2, delta3=delta3, delta=delta, binding=binding  # type: ignore[arg-type]
    )


class SpanningReduction(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    margins: ReductionMargins
    eps: Rational
    eps_bound: Rational = Field(description="Admissible eps are in (0, eps_bound)")
    sqrt_bound: Rational = Field(description="Rational upper bound of sqrt(n) used for patch radii")
    patch_weight_factor: Rational = Field(description="Patches weigh eps on their own axis and factor*eps elsewhere")
    patch_count: int
    shrunken: list[OpenBox] = Field(exclude=True)
    reduced_cover: WeightedCover = Field(exclude=True)
    distances: list[Rational]
    reduced_distances: list[Rational]
    volume: Rational = Field(description="Volume of the original cover")
    inflation: Rational = Field(description="Total weight volume of the patch boxes")
    inflation_constant: Rational = Field(description="inflation / eps")
    non_spanning: bool
    distances_dominate: bool
    reduced_inequality_holds: bool


def patch_centres(eps: Fraction, half_width: Fraction) -> list[Fraction]:
    """Patch centre coordinates along one axis, from 0 until the patches reach past ``1 + eps``."""
    pitch = PATCH_PITCH * half_width
    steps = ceil((ONE + eps) / pitch)
    return [m * pitch for m in range(steps + 1)]


def _patch_boxes(
    n: int, eps: Fraction, half_width: Fraction, factor: Fraction, centres: list[Fraction]
) -> list[tuple[list[Fraction], list[Fraction], list[Fraction]]]:
    """Patch boxes (lo, hi, weights) in ``[0, 1+eps]^n`` coordinates."""
    patches = []
    for j in range(n):
        for others in product(centres, repeat=n - 1):
            centre = list(others)
            centre.insert(j, ONE + eps)
            weights = [factor * eps] * n
            weights[j] = eps
            patches.append(([c - half_width for c in centre], [c + half_width for c in centre], weights))
    return patches


def reduction_gap(
    n: int,
    eps: Fraction,
    lows: list[list[Fraction]],
    highs: list[list[Fraction]],
    centres: list[Fraction],
    half_width: Fraction,
) -> tuple[Literal["core", "slab"], Point] | None:
    """Exact coverage test of a reduced cover, in ``[0, 1+eps]^n`` coordinates.

    The inflated sets (``lows``/``highs``) must cover the core ``[0, 1+eps/2)^n`` and the patches
    of face ``j`` the slab ``x_j in [1+eps/2, 1+eps]``. No inflated set reaches past ``1+eps/2``,
    so the core test runs on the closed cube ``[0, 1+eps/2]^n`` with upper ends equal to
    ``1+eps/2`` closed. Patches of one face are a product of the same open intervals on every
    other axis, which reduces the slab test to one axis. Returns the region and a point of it
    that is left uncovered.
    """
    top = ONE + eps / 2
    core = [
        [(lo / top, hi / top, False, hi == top) for lo, hi in zip(box_lo, box_hi, strict=True)]
        for box_lo, box_hi in zip(lows, highs, strict=True)
    ]
    gap = find_uncovered_point(n, core)
    if gap is not None:
        return "core", tuple(c * top for c in gap)
    outer = ONE + eps
    if half_width <= eps / 2:
        return "slab", (top,) + tuple(ZERO for _ in range(n - 1))
    if n > 1:
        strip = [[((c - half_width) / outer, (c + half_width) / outer, False, False)] for c in centres]
        gap = find_uncovered_point(1, strip)
        if gap is not None:
            return "slab", (outer, gap[0] * outer) + tuple(ZERO for _ in range(n - 2))
    return None


def reduce_spanning(
    cover: WeightedCover, eps: Fraction, validate: bool = True, max_patches: int = MAX_PATCHES
) -> SpanningReduction:
    """Build the non-spanning reduced cover for ``eps`` and check its guarantees exactly.

    The shrunk sets are uniform ``delta/2`` shrinks of each box on every side that does not stick
    out of the cube, not shrinks relative to the neighbourhoods of the other sets and of the
    faces. This is valid for boxes only: ``delta`` is below the Lebesgue, pairwise and face
    margins, so the shrunk boxes still cover the cube, intersecting pairs still intersect and sets
    meeting a face still meet it. With ``validate`` the reduced cover is checked to cover the cube.
    """
    require_covering(cover)
    n = cover.dimension
    margins = reduction_margins(cover)
    delta = margins.delta
    s_n = sqrt_upper_bound(n)
    eps_bound = delta / (8 * s_n)
    if not ZERO < eps < eps_bound:
        raise ParameterError(
            "eps is not admissible",
            "reduce_spanning",
            {"eps": str(eps), "bound": str(eps_bound), "binding": margins.binding},
        )
    half_width = s_n * eps
    centres = patch_centres(eps, half_width)
    patch_count = n * len(centres) ** (n - 1)
    if patch_count > max_patches:
        raise ParameterError(
            "too many patch boxes for this eps", "reduce_spanning", {"patches": patch_count, "limit": max_patches}
        )

    distances = face_distances(cover)
    factor = 8 * s_n * (1 + max(distances)) / delta
    half = delta / 2
    shrunken: list[OpenBox] = []
    lows: list[list[Fraction]] = []
    highs: list[list[Fraction]] = []
    for s in cover.sets:
        lo = [s.lo[k] if s.straddles_low(k) else s.lo[k] + half for k in range(n)]
        hi = [s.hi[k] if s.straddles_high(k) else s.hi[k] - half for k in range(n)]
        shrunken.append(OpenBox(lo=tuple(lo), hi=tuple(hi)))
        lows.append([-eps / 2 if s.straddles_low(k) else lo[k] - eps / 2 for k in range(n)])
        highs.append([ONE + eps / 2 if s.straddles_high(k) else hi[k] + eps / 2 for k in range(n)])

    scale = ONE + eps
    if validate:
        found = reduction_gap(n, eps, lows, highs, centres, half_width)
        if found is not None:
            region, point = found
            raise InvariantViolation(
                "reduced cover leaves part of the cube uncovered",
                "reduce_spanning",
                witness={"region": region, "gap": [str(v / scale) for v in point]},
            )
    sets = [
        {"id": s.id, "lo": [v / scale for v in lo], "hi": [v / scale for v in hi], "weights": list(s.weights)}
        for s, lo, hi in zip(cover.sets, lows, highs, strict=True)
    ]
    next_id = max(cover.ids) + 1
    inflation = ZERO
    for offset, (lo, hi, weights) in enumerate(_patch_boxes(n, eps, half_width, factor, centres)):
        sets.append(
            {"id": next_id + offset, "lo": [v / scale for v in lo], "hi": [v / scale for v in hi], "weights": weights}
        )
        inflation += reduce(mul, weights, ONE)
    reduced = WeightedCover.model_validate({"dimension": n, "sets": sets})

    non_spanning = not is_spanning(reduced)
    reduced_distances = face_distances(reduced)
    dominate = all(a <= b for a, b in zip(distances, reduced_distances, strict=True))
    volume = cover.volume()
    reduced_holds = reduced.volume() >= reduce(mul, reduced_distances, ONE)
    logging.info(
        f"reduce_spanning: eps={eps}, delta={delta} ({margins.binding}), {patch_count} patches, inflation {inflation}"
    )
    if not (non_spanning and dominate and reduced_holds):
        raise InvariantViolation(
            "reduced cover lost a guaranteed property",
            "reduce_spanning",
            witness={"non_spanning": non_spanning, "dominate": dominate, "reduced_holds": reduced_holds},
        )
    return SpanningReduction(
        margins=margins,
        eps=eps,
        eps_bound=eps_bound,
        sqrt_bound=s_n,
        patch_weight_factor=factor,
        patch_count=patch_count,
        shrunken=shrunken,
        reduced_cover=reduced,
        distances=list(distances),
        reduced_distances=list(reduced_distances),
        volume=volume,
        inflation=inflation,
        inflation_constant=inflation / eps,
        non_spanning=non_spanning,
        distances_dominate=dominate,
        reduced_inequality_holds=reduced_holds,
    )


class LimitRow(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    eps: Rational
    inflation: Rational
    inflation_constant: Rational
    bound: Rational = Field(description="volume + inflation")
    product: Rational = Field(description="Product of the original face distances")


class LimitCheck(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    rows: list[LimitRow]
    volume: Rational
    product: Rational
    inflation_decreasing: bool
    bounds_hold: bool
    limit_holds: bool


def spanning_limit_check(cover: WeightedCover, eps_values: list[Fraction]) -> LimitCheck:
    """Run the reduction for decreasing ``eps`` and check that the volume bound closes in on the original."""
    if len(eps_values) < 2:
        raise ParameterError("at least two eps values are needed", "spanning_limit_check")
    rows = []
    for eps in sorted(eps_values, reverse=True):
        reduction = reduce_spanning(cover, eps)
        product_d = reduce(mul, reduction.distances, ONE)
        rows.append(
            LimitRow(
                eps=eps,
                inflation=reduction.inflation,
                inflation_constant=reduction.inflation_constant,
                bound=reduction.volume + reduction.inflation,
                product=product_d,
            )
        )
    volume = cover.volume()
    product_d = rows[0].product
    return LimitCheck(
        rows=rows,
        volume=volume,
        product=product_d,
        inflation_decreasing=all(a.inflation > b.inflation for a, b in zip(rows, rows[1:], strict=False)),
        bounds_hold=all(row.product <= row.bound for row in rows),
        limit_holds=product_d <= volume,
    )


def spanning_demo(n: int) -> WeightedCover:
    """Two boxes, the first meeting both faces of axis 1 (a single box when ``n = 1``), unit weights."""
    if n < 1:
        raise ParameterError("dimension must be positive", "spanning_demo")
    if n == 1:
        return WeightedCover.from_boxes([(["-1"], ["2"])])
    rest_lo, rest_hi = ["-1"] * (n - 2), ["2"] * (n - 2)
    return WeightedCover.from_boxes(
        [
            (["-1", "-1", *rest_lo], ["2", "7/8", *rest_hi]),
            (["-1", "1/8", *rest_lo], ["2", "2", *rest_hi]),
        ]
    )
