# SPDX-FileCopyrightText: 2024-present kulnor <pascal.heus@gmail.com>
#
# SPDX-License-Identifier: MIT
"""Unit cube, faces, and finite weighted covers by relatively open boxes.

A box ``(lo, hi)`` stands for ``{x in [0,1]^n : lo[k] < x[k] < hi[k] for all k}``. Letting an
interval reach past 0 or 1 is how relative openness at the cube boundary is encoded: the box then
contains the boundary value on that axis and meets the corresponding face.

Coordinates and weights are exact :class:`fractions.Fraction` values throughout.
"""

import json
import logging
from collections.abc import Sequence
from fractions import Fraction
from functools import reduce
from itertools import pairwise
from operator import mul
from pathlib import Path
from typing import Annotated, Any, Literal

from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, PlainSerializer, ValidationError, model_validator

from .exceptions import InputError

ZERO = Fraction(0)
ONE = Fraction(1)


def parse_rational(value: Any) -> Fraction:
    """Parse ``"p/q"``, decimal strings, ints and Fractions exactly.

    Floats are read through their shortest decimal representation, so ``0.1`` becomes ``1/10``.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValueError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise ValueError(f"not a rational number: {value!r}") from e
    raise ValueError(f"cannot interpret {type(value).__name__} as a rational")


def format_rational(value: Fraction) -> str:
    return str(value)


Rational = Annotated[
    Fraction,
    BeforeValidator(parse_rational),
    PlainSerializer(format_rational, return_type=str, when_used="json"),
]
"""Exact rational carried through pydantic models, serialized as ``"p/q"``."""

Point = tuple[Fraction, ...]


#
# BOXES AND FACES
#
class OpenBox(BaseModel):
    """A relatively open axis-aligned box of the unit cube."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    lo: tuple[Rational, ...] = Field(description="Lower interval ends, one per axis (may be < 0)")
    hi: tuple[Rational, ...] = Field(description="Upper interval ends, one per axis (may be > 1)")

    @model_validator(mode="after")
    def _check_box(self) -> "OpenBox":
        if len(self.lo) != len(self.hi) or not self.lo:
            raise ValueError(f"lo and hi must have the same positive length, got {len(self.lo)} and {len(self.hi)}")
        for k, (lo, hi) in enumerate(zip(self.lo, self.hi, strict=True)):
            if not lo < hi:
                raise ValueError(f"axis {k}: lo={lo} must be smaller than hi={hi}")
            if not (lo < ONE and hi > ZERO):
                raise ValueError(f"axis {k}: interval ({lo}, {hi}) misses [0,1]")
        return self

    @property
    def dimension(self) -> int:
        return len(self.lo)

    def clipped(self, k: int) -> tuple[Fraction, Fraction]:
        """Ends of the k-th interval clipped to [0,1]."""
        return max(self.lo[k], ZERO), min(self.hi[k], ONE)

    def contains(self, x: Point) -> bool:
        """True iff the cube point ``x`` lies in the represented set."""
        if len(x) != self.dimension:
            raise InputError("point has the wrong dimension", "contains", {"point": len(x), "box": self.dimension})
        return all(ZERO <= c <= ONE and lo < c < hi for c, lo, hi in zip(x, self.lo, self.hi, strict=True))

    def straddles_low(self, k: int) -> bool:
        return self.lo[k] < ZERO

    def straddles_high(self, k: int) -> bool:
        return self.hi[k] > ONE


class Face(BaseModel):
    """Face ``F_k = {x_k = 0}`` (side ``low``) or ``F_k' = {x_k = 1}`` (side ``high``), axes counted from 0."""

    model_config = ConfigDict(frozen=True)

    axis: int = Field(ge=0)
    side: Literal["low", "high"]

    @classmethod
    def low(cls, axis: int) -> "Face":
        return cls(axis=axis, side="low")

    @classmethod
    def high(cls, axis: int) -> "Face":
        return cls(axis=axis, side="high")

    def opposite(self) -> "Face":
        return Face(axis=self.axis, side="high" if self.side == "low" else "low")

    def __str__(self) -> str:
        return f"F{self.axis + 1}" + ("'" if self.side == "high" else "")


def boxes_intersect(a: OpenBox, b: OpenBox) -> bool:
    """True iff the represented sets of ``a`` and ``b`` share a point.

    The clipped intersection on an axis runs from ``max(lo_a, lo_b, 0)`` to ``min(hi_a, hi_b, 1)``.
    A one point intersection could only happen at 0 or 1 (an open interior point is never the only
    common point of two open intervals), and that would force some ``hi <= 0`` or ``lo >= 1``,
    which valid boxes exclude. The strict comparison is therefore exact.
    """
    if a.dimension != b.dimension:
        raise InputError("dimension mismatch", "boxes_intersect", {"a": a.dimension, "b": b.dimension})
    return all(
        max(alo, blo, ZERO) < min(ahi, bhi, ONE) for alo, blo, ahi, bhi in zip(a.lo, b.lo, a.hi, b.hi, strict=True)
    )


def box_meets_face(a: OpenBox, face: Face) -> bool:
    if face.axis >= a.dimension:
        raise InputError("face axis out of range", "box_meets_face", {"axis": face.axis, "dimension": a.dimension})
    # every other axis of a valid box is non-empty after clipping
    return a.straddles_low(face.axis) if face.side == "low" else a.straddles_high(face.axis)


#
# WEIGHTED COVERS
#
class CoverSet(OpenBox):
    """A cover member: an open box with an id and one non-negative weight per axis."""

    id: int
    weights: tuple[Rational, ...] = Field(description="Weights w_k(i), one per axis")

    @model_validator(mode="before")
    @classmethod
    def _flatten_weights(cls, data: Any) -> Any:
        if isinstance(data, dict) and "weights" in data:
            data = dict(data)
            data["weights"] = _flatten(data["weights"])
        return data

    @model_validator(mode="after")
    def _check_weights(self) -> "CoverSet":
        if any(w < ZERO for w in self.weights):
            raise ValueError(f"set {self.id}: weights must be non-negative")
        return self

    def box(self) -> OpenBox:
        return OpenBox(lo=self.lo, hi=self.hi)

    def weight_product(self) -> Fraction:
        return reduce(mul, self.weights, ONE)


def _flatten(weights: Any) -> list[Any]:
    if isinstance(weights, (list, tuple)):
        flat: list[Any] = []
        for row in weights:
            flat.extend(_flatten(row))
        return flat
    return [weights]


class WeightedCover(BaseModel):
    """A finite family of open boxes of ``[0,1]^n`` with per-axis weights.

    Sets keep the order they were given in; ``index_of`` maps set ids back to positions.
    A single weight per set is replicated over all axes.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    dimension: int = Field(ge=1)
    sets: tuple[CoverSet, ...]

    @model_validator(mode="before")
    @classmethod
    def _replicate_weights(cls, data: Any) -> Any:
        if not isinstance(data, dict) or "dimension" not in data:
            return data
        n = data["dimension"]
        expanded = []
        for item in data.get("sets", ()):
            if isinstance(item, dict) and "weights" in item:
                flat = _flatten(item["weights"])
                if len(flat) == 1 and isinstance(n, int):
                    flat = flat * n
                item = {**item, "weights": flat}
            expanded.append(item)
        return {**data, "sets": expanded}

    @model_validator(mode="after")
    def _check_cover(self) -> "WeightedCover":
        if not self.sets:
            raise ValueError("a cover needs at least one set")
        seen: set[int] = set()
        for s in self.sets:
            if s.dimension != self.dimension:
                raise ValueError(f"set {s.id} has dimension {s.dimension}, cover has {self.dimension}")
            if len(s.weights) != self.dimension:
                raise ValueError(f"set {s.id} has {len(s.weights)} weights for {self.dimension} axes")
            if s.id in seen:
                raise ValueError(f"duplicate set id {s.id}")
            seen.add(s.id)
        return self

    @classmethod
    def from_boxes(
        cls,
        boxes: list[tuple[list[Any], list[Any]]],
        weights: list[Any] | None = None,
    ) -> "WeightedCover":
        """Build a cover with ids 1..M from ``(lo, hi)`` pairs; weights default to 1."""
        if not boxes:
            raise InputError("no boxes given", "from_boxes")
        n = len(boxes[0][0])
        if weights is None:
            weights = [1] * len(boxes)
        if len(weights) != len(boxes):
            raise InputError("one weight entry per box is required", "from_boxes")
        data = {
            "dimension": n,
            "sets": [
                {"id": i + 1, "lo": lo, "hi": hi, "weights": w}
                for i, ((lo, hi), w) in enumerate(zip(boxes, weights, strict=True))
            ],
        }
        return load_cover_dict(data)

    @property
    def size(self) -> int:
        return len(self.sets)

    @property
    def ids(self) -> list[int]:
        return [s.id for s in self.sets]

    def index_of(self, set_id: int) -> int:
        for index, s in enumerate(self.sets):
            if s.id == set_id:
                return index
        raise InputError(f"unknown set id {set_id}", "index_of")

    def by_id(self, set_id: int) -> CoverSet:
        return self.sets[self.index_of(set_id)]

    def volume(self) -> Fraction:
        """Exact ``sum_i prod_k w_k(i)``."""
        return sum((s.weight_product() for s in self.sets), ZERO)

    def with_weights(self, weights: list[tuple[Fraction, ...]]) -> "WeightedCover":
        sets = tuple(s.model_copy(update={"weights": tuple(w)}) for s, w in zip(self.sets, weights, strict=True))
        return WeightedCover(dimension=self.dimension, sets=sets)

    def to_json(self) -> str:
        payload = self.model_dump(mode="json")
        for item in payload["sets"]:
            item["weights"] = [item["weights"]]
        return json.dumps(payload, indent=2)


def load_cover_dict(data: dict[str, Any]) -> WeightedCover:
    try:
        return WeightedCover.model_validate(data)
    except ValidationError as e:
        raise InputError("invalid cover", "load_cover", {"errors": e.error_count(), "first": _first_error(e)}) from e


def load_cover(path: str | Path) -> WeightedCover:
    """Read a cover JSON file."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise InputError(f"cannot read cover file: {e}", "load_cover", {"path": str(path)}) from e
    if not isinstance(data, dict):
        raise InputError("cover file must hold a JSON object", "load_cover", {"path": str(path)})
    return load_cover_dict(data)


def save_cover(cover: WeightedCover, path: str | Path) -> None:
    Path(path).write_text(cover.to_json() + "\n", encoding="utf-8")


def _first_error(e: ValidationError) -> str:
    first = e.errors()[0]
    location = ".".join(str(part) for part in first.get("loc", ()))
    return f"{location}: {first.get('msg')}"


#
# COVER PREDICATES
#
Interval = tuple[Fraction, Fraction, bool, bool]
"""``(lo, hi, lo_closed, hi_closed)`` of one axis of a box."""


def _inside(c: Fraction, interval: Interval) -> bool:
    lo, hi, lo_closed, hi_closed = interval
    return (lo <= c if lo_closed else lo < c) and (c <= hi if hi_closed else c < hi)


def _axis_candidates(boxes: Sequence[Sequence[Interval]], k: int) -> list[tuple[Fraction, int]]:
    """Representative coordinates of axis k in [0,1] with the bitmask of boxes containing them.

    Breakpoints are 0, 1 and every interval end inside [0,1]; between two consecutive breakpoints
    the membership pattern is constant, so breakpoints plus one midpoint per gap see every pattern.
    """
    breaks = {ZERO, ONE}
    for box in boxes:
        lo, hi, _, _ = box[k]
        breaks.update(v for v in (lo, hi) if ZERO <= v <= ONE)
    ordered = sorted(breaks)
    points = sorted([*ordered, *((a + b) / 2 for a, b in pairwise(ordered))])
    candidates = []
    for c in points:
        mask = 0
        for index, box in enumerate(boxes):
            if _inside(c, box[k]):
                mask |= 1 << index
        candidates.append((c, mask))
    return candidates


def find_uncovered_point(dimension: int, boxes: Sequence[Sequence[Interval]]) -> Point | None:
    """A point of ``[0,1]^n`` in none of the boxes, or ``None`` if they cover the cube.

    The arrangement is walked one axis at a time. Membership of a point is the AND of per-axis
    masks, so partial products with equal masks are interchangeable and only one representative
    per mask is kept.
    """
    full = (1 << len(boxes)) - 1
    frontier: dict[int, tuple[Fraction, ...]] = {full: ()}
    for k in range(dimension):
        candidates = _axis_candidates(boxes, k)
        nxt: dict[int, tuple[Fraction, ...]] = {}
        for mask, prefix in frontier.items():
            for c, axis_mask in candidates:
                combined = mask & axis_mask
                if combined == 0:
                    return prefix + (c,) + tuple(Fraction(1, 2) for _ in range(k + 1, dimension))
                nxt.setdefault(combined, prefix + (c,))
        frontier = nxt
    return None


def validate_cover(cover: WeightedCover) -> Point | None:
    """Return ``None`` if the sets cover ``[0,1]^n``, else a rational point lying in no set."""
    boxes = [[(s.lo[k], s.hi[k], False, False) for k in range(cover.dimension)] for s in cover.sets]
    gap = find_uncovered_point(cover.dimension, boxes)
    if gap is not None:
        logging.debug(f"validate_cover: gap at {[str(v) for v in gap]}")
    return gap


def is_covering(cover: WeightedCover) -> bool:
    return validate_cover(cover) is None


def require_covering(cover: WeightedCover) -> None:
    """Raise :class:`InputError` with the gap witness if ``cover`` leaves part of the cube uncovered."""
    gap = validate_cover(cover)
    if gap is not None:
        raise InputError("sets do not cover the unit cube", "validate_cover", {"gap": [str(v) for v in gap]})


def is_spanning(cover: WeightedCover) -> bool:
    """True iff some set meets both opposite faces of some axis."""
    return any(s.straddles_low(k) and s.straddles_high(k) for s in cover.sets for k in range(cover.dimension))


def spanning_witness(cover: WeightedCover) -> tuple[int, int] | None:
    """``(set id, axis)`` of the first set meeting both faces of an axis."""
    for s in cover.sets:
        for k in range(cover.dimension):
            if s.straddles_low(k) and s.straddles_high(k):
                return s.id, k
    return None


def intersecting_pairs(cover: WeightedCover) -> list[tuple[int, int]]:
    """Index pairs ``(i, j)``, ``i < j``, of intersecting sets.

    Sweep over the clipped first-axis intervals; only sets whose first-axis intervals overlap are
    tested on the remaining axes.
    """
    clipped = [[s.clipped(k) for k in range(cover.dimension)] for s in cover.sets]
    events = sorted(range(cover.size), key=lambda i: clipped[i][0])
    active: list[int] = []
    pairs = []
    for i in events:
        start = clipped[i][0][0]
        active = [j for j in active if clipped[j][0][1] > start]
        box = clipped[i]
        for j in active:
            if all(max(a[0], b[0]) < min(a[1], b[1]) for a, b in zip(box[1:], clipped[j][1:], strict=True)):
                pairs.append((min(i, j), max(i, j)))
        active.append(i)
    return sorted(pairs)
