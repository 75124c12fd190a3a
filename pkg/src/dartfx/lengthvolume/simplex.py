# SPDX-FileCopyrightText: 2024-present kulnor <pascal.heus@gmail.com>
#
# SPDX-License-Identifier: MIT
"""Weighted covers of the standard simplex and its diameter-volume bounds.

The simplex is ``{lambda in R^{n+1} : lambda >= 0, sum(lambda) = 1}`` and a cover set is a box in
barycentric coordinates intersected with it. A negative lower end means the set reaches the face
``T_k = {lambda_k = 0}``; upper ends are open.
"""

import json
import logging
from collections.abc import Collection, Sequence
from fractions import Fraction
from itertools import combinations, product
from math import comb, factorial
from pathlib import Path

import networkx as nx
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .chains import ChainGraph, chain_distance
from .cover import ONE, ZERO, Face, Rational
from .derrick import OnViolation
from .exceptions import InputError, InvariantViolation, ParameterError

MAX_EXACT_SETS = 20


class SimplexSet(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    id: int
    lo: tuple[Rational, ...] = Field(description="Lower ends, one per barycentric coordinate (may be < 0)")
    hi: tuple[Rational, ...]
    weight: Rational = Field(ge=0)

    @model_validator(mode="after")
    def _check_box(self) -> "SimplexSet":
        if len(self.lo) != len(self.hi) or len(self.lo) < 2:
            raise ValueError(f"set {self.id}: lo and hi need the same length, at least 2")
        if any(not lo < hi for lo, hi in zip(self.lo, self.hi, strict=True)):
            raise ValueError(f"set {self.id}: every lo must be smaller than its hi")
        if not _feasible(self.lo, self.hi):
            raise ValueError(f"set {self.id} does not meet the simplex")
        return self


def _feasible(lo: Sequence[Fraction], hi: Sequence[Fraction], pinned: int | None = None) -> bool:
    """True iff some point of the simplex lies in the box, with coordinate ``pinned`` forced to 0.

    Each coordinate ranges over ``(lo, hi)`` cut at 0, so the reachable sums of coordinates form an
    interval from ``sum(max(lo, 0))`` (attained only if every lower end is closed at 0) to
    ``sum(hi)`` (never attained).
    """
    low_sum, high_sum, all_closed = ZERO, ZERO, True
    for k, (a, b) in enumerate(zip(lo, hi, strict=True)):
        if k == pinned:
            if not (a < ZERO < b):
                return False
            continue
        if b <= ZERO:
            return False
        low_sum += max(a, ZERO)
        high_sum += b
        all_closed = all_closed and a < ZERO
    return (low_sum < ONE or (low_sum == ONE and all_closed)) and ONE < high_sum


class SimplexCover(BaseModel):
    """A finite weighted family of barycentric boxes covering the ``n``-simplex."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    dimension: int = Field(ge=1)
    sets: tuple[SimplexSet, ...]

    @model_validator(mode="after")
    def _check_cover(self) -> "SimplexCover":
        if not self.sets:
            raise ValueError("a cover needs at least one set")
        if any(len(s.lo) != self.dimension + 1 for s in self.sets):
            raise ValueError(f"every set needs {self.dimension + 1} barycentric coordinates")
        if len({s.id for s in self.sets}) != len(self.sets):
            raise ValueError("set ids must be unique")
        return self

    @property
    def size(self) -> int:
        return len(self.sets)

    def volume(self) -> Fraction:
        """``sum_i w(i)^n``."""
        return sum((s.weight**self.dimension for s in self.sets), ZERO)


def sets_intersect(a: SimplexSet, b: SimplexSet) -> bool:
    lo = [max(x, y) for x, y in zip(a.lo, b.lo, strict=True)]
    hi = [min(x, y) for x, y in zip(a.hi, b.hi, strict=True)]
    if any(not x < y for x, y in zip(lo, hi, strict=True)):
        return False
    return _feasible(lo, hi)


def meets_face(s: SimplexSet, k: int) -> bool:
    return _feasible(s.lo, s.hi, pinned=k)


def contains(s: SimplexSet, point: Sequence[Fraction]) -> bool:
    return all(lo < c < hi for c, lo, hi in zip(point, s.lo, s.hi, strict=True))


def validate_simplex_cover(cover: SimplexCover, resolution: int) -> tuple[Fraction, ...] | None:
    """First point of the barycentric grid of pitch ``1/resolution`` lying in no set, or ``None``."""
    if resolution < 1:
        raise ParameterError("resolution must be positive", "validate_simplex_cover")
    n = cover.dimension
    for head in product(range(resolution + 1), repeat=n):
        rest = resolution - sum(head)
        if rest < 0:
            continue
        point = tuple(Fraction(a, resolution) for a in (*head, rest))
        if not any(contains(s, point) for s in cover.sets):
            logging.debug(f"validate_simplex_cover: gap at {[str(c) for c in point]}")
            return point
    return None


#
# DIAMETER
#
def simplex_chain_graph(cover: SimplexCover) -> ChainGraph:
    """Chain graph of a simplex cover on ``n + 1`` barycentric axes.

    The face ``T_k`` is the low face of axis ``k``; every axis carries the set's single weight.
    """
    axes = cover.dimension + 1
    graph = nx.Graph()
    graph.add_nodes_from(range(cover.size))
    graph.add_edges_from(
        (i, j) for i, j in combinations(range(cover.size), 2) if sets_intersect(cover.sets[i], cover.sets[j])
    )
    faces = {Face.low(k): frozenset(i for i, s in enumerate(cover.sets) if meets_face(s, k)) for k in range(axes)}
    return ChainGraph(
        dimension=axes,
        ids=tuple(s.id for s in cover.sets),
        weights=tuple((s.weight,) * axes for s in cover.sets),
        graph=graph,
        faces=faces,
    )


def connects_all_faces(g: ChainGraph, subset: Collection[int]) -> bool:
    """True iff the sets at positions ``subset`` hold, for every pair of faces, a chain joining them."""
    components = list(nx.connected_components(g.graph.subgraph(subset)))
    return all(any(c & g.faces[a] and c & g.faces[b] for c in components) for a, b in combinations(g.faces, 2))


class SimplexDiameter(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    diameter: Rational
    witness: list[int] = Field(description="Set ids of a lightest connecting sub-collection")
    pair_bound: Rational = Field(description="Largest chain distance between two faces, a lower bound of the diameter")
    nodes: int = Field(description="Search nodes visited")


def simplex_diameter(cover: SimplexCover) -> SimplexDiameter:
    """Exact ``d_w``: least total weight of a sub-collection holding chains between every pair of faces.

    Branch and bound over include/exclude decisions, sets taken by increasing weight. A branch is cut
    when its weight reaches the best found, or when even keeping every undecided set would not join
    all faces. The search stops once the best found meets the largest face-to-face chain distance.
    """
    if cover.size > MAX_EXACT_SETS:
        raise ParameterError(
            "too many sets for exact search", "simplex_diameter", {"sets": cover.size, "limit": MAX_EXACT_SETS}
        )
    g = simplex_chain_graph(cover)
    everything = frozenset(range(cover.size))
    if not connects_all_faces(g, everything):
        raise ParameterError("the sets do not join every pair of faces", "simplex_diameter")
    pair_bound = ZERO
    for a, b in combinations(g.faces, 2):
        result = chain_distance(g, 0, a, b)
        if result.distance is not None:
            pair_bound = max(pair_bound, result.distance)
    order = sorted(range(cover.size), key=lambda i: (cover.sets[i].weight, cover.sets[i].id))
    weights = [s.weight for s in cover.sets]
    best_weight = sum(weights, ZERO)
    best: frozenset[int] = everything
    nodes = 0

    def search(position: int, chosen: frozenset[int], weight: Fraction, undecided: frozenset[int]) -> None:
        nonlocal best_weight, best, nodes
        nodes += 1
        if best_weight == pair_bound or weight >= best_weight or not connects_all_faces(g, chosen | undecided):
            return
        if connects_all_faces(g, chosen):
            best_weight, best = weight, chosen
            return
        if position == len(order):
            return
        i = order[position]
        search(position + 1, chosen | {i}, weight + weights[i], undecided - {i})
        search(position + 1, chosen, weight, undecided - {i})

    search(0, frozenset(), ZERO, everything)
    witness = sorted(cover.sets[i].id for i in best)
    logging.debug(f"simplex_diameter: d={best_weight} (pair bound {pair_bound}) after {nodes} nodes")
    return SimplexDiameter(diameter=best_weight, witness=witness, pair_bound=pair_bound, nodes=nodes)


class SimplexBoundsReport(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    dimension: int
    sets: int
    diameter: Rational
    witness: list[int]
    volume: Rational = Field(description="sum of w(i)^n")
    volume_bound: Rational = Field(description="d^n / n!")
    volume_bound_holds: bool
    unit_weights: bool
    count_bound: int | None = Field(default=None, description="C(n + d - 1, n), unit weights only")
    count_bound_holds: bool | None = None

    @property
    def holds(self) -> bool:
        return self.volume_bound_holds and self.count_bound_holds is not False


def verify_simplex_bounds(cover: SimplexCover, on_violation: OnViolation = "raise") -> SimplexBoundsReport:
    n = cover.dimension
    result = simplex_diameter(cover)
    d = result.diameter
    volume = cover.volume()
    volume_bound = d**n / factorial(n)
    unit = all(s.weight == ONE for s in cover.sets)
    count_bound = comb(n + int(d) - 1, n) if unit else None
    report = SimplexBoundsReport(
        dimension=n,
        sets=cover.size,
        diameter=d,
        witness=result.witness,
        volume=volume,
        volume_bound=volume_bound,
        volume_bound_holds=volume >= volume_bound,
        unit_weights=unit,
        count_bound=count_bound,
        count_bound_holds=None if count_bound is None else cover.size >= count_bound,
    )
    if not report.holds:
        logging.error(f"verify_simplex_bounds: bound violated (d={d}, volume={volume}, sets={cover.size})")
        if on_violation == "raise":
            raise InvariantViolation(
                "simplex diameter-volume bound violated", "verify_simplex_bounds", witness=result.witness
            )
    return report


def simplex_patch(n: int, depth: int) -> SimplexCover:
    """Unit-weight cover by boxes of half-width ``1/depth`` centred at the lattice points ``a/depth``.

    Every simplex point rounds to a lattice point at L-infinity distance below ``1/depth``, so the
    ``C(depth + n, n)`` sets cover the simplex.
    """
    if n < 1 or depth < 1:
        raise ParameterError("dimension and depth must be positive", "simplex_patch", {"n": n, "depth": depth})
    step = Fraction(1, depth)
    sets = []
    for head in product(range(depth + 1), repeat=n):
        rest = depth - sum(head)
        if rest < 0:
            continue
        centre = [a * step for a in (*head, rest)]
        sets.append(
            SimplexSet(
                id=len(sets) + 1,
                lo=tuple(c - step for c in centre),
                hi=tuple(c + step for c in centre),
                weight=ONE,
            )
        )
    return SimplexCover(dimension=n, sets=tuple(sets))


def load_simplex_cover(path: str | Path) -> SimplexCover:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        return SimplexCover.model_validate(data)
    except (OSError, json.JSONDecodeError) as e:
        raise InputError(f"cannot read simplex cover file: {e}", "load_simplex_cover", {"path": str(path)}) from e
    except ValidationError as e:
        raise InputError(
            "invalid simplex cover", "load_simplex_cover", {"errors": e.error_count(), "path": str(path)}
        ) from e
