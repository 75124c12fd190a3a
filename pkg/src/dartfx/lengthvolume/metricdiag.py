# SPDX-FileCopyrightText: 2024-present kulnor <pascal.heus@gmail.com>
#
# SPDX-License-Identifier: MIT
"""Finite-resolution checks of doubling, linear local connectedness and discrete path hypotheses.

A continuum joining two points is realized as a chain of points with consecutive distances at most
``delta``, so every verdict holds at the given resolution only. Balls ``B(p, r) = {d < r}`` are open
and annuli ``A(p, r, R) = {r <= d <= R}`` closed; comparisons allow the space's ``atol``.
"""

import logging
import math
from collections.abc import Sequence
from typing import Literal

import networkx as nx
import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .content import CubeImage, FiniteMetricSpace, image_face_distances
from .cover import Face
from .exceptions import InputError, InvariantViolation, MetricAxiomError, ParameterError

Property = Literal["LLC1", "LLC2", "ALC"]
Verdict = Literal["pass", "fail", "inconclusive"]


def open_ball(ms: FiniteMetricSpace, centre: int, radius: float) -> np.ndarray:
    return ms.row(centre) < radius - ms.atol


def closed_ball(ms: FiniteMetricSpace, centre: int, radius: float) -> np.ndarray:
    return ms.row(centre) <= radius + ms.atol


def annulus(ms: FiniteMetricSpace, centre: int, inner: float, outer: float) -> np.ndarray:
    row = ms.row(centre)
    return (row >= inner - ms.atol) & (row <= outer + ms.atol)


#
# DELTA GRAPHS
#
class DeltaGraph(BaseModel):
    """Points joined when their distance is at most ``delta``."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    space: FiniteMetricSpace
    delta: float = Field(gt=0)
    graph: nx.Graph = Field(exclude=True)


def delta_graph(ms: FiniteMetricSpace, delta: float) -> DeltaGraph:
    if delta <= 0:
        raise ParameterError("delta must be positive", "delta_graph")
    graph = nx.Graph()
    graph.add_nodes_from(range(ms.size))
    for i in range(ms.size):
        near = np.flatnonzero(closed_ball(ms, i, delta))
        graph.add_edges_from((i, int(j)) for j in near if j > i)
    logging.debug(f"delta_graph: {graph.number_of_edges()} edges at delta={delta}")
    return DeltaGraph(space=ms, delta=delta, graph=graph)


class DeltaPath(BaseModel):
    length: int | None = Field(description="Fewest steps of a delta-chain, None when unreachable")
    lower_bound: int = Field(description="ceil(d(x, y) / delta)")

    @property
    def reachable(self) -> bool:
        return self.length is not None


def delta_path_length(ms: FiniteMetricSpace, x: int, y: int, delta: float, dg: DeltaGraph | None = None) -> DeltaPath:
    if dg is None:
        dg = delta_graph(ms, delta)
    bound = max(0, math.ceil(ms.distance(x, y) / delta - ms.atol / delta))
    try:
        length = nx.shortest_path_length(dg.graph, x, y)
    except nx.NetworkXNoPath:
        return DeltaPath(length=None, lower_bound=bound)
    if length < bound:
        raise InvariantViolation("delta-chain shorter than the distance allows", "delta_path_length", [x, y])
    return DeltaPath(length=length, lower_bound=bound)


def path_exponent(ms: FiniteMetricSpace, x: int, y: int, delta: float) -> float | None:
    """``log(length) / log(d(x, y) / delta)``, the growth exponent of delta-chains."""
    result = delta_path_length(ms, x, y, delta)
    ratio = ms.distance(x, y) / delta
    if result.length is None or result.length < 1 or ratio <= 1:
        return None
    return math.log(result.length) / math.log(ratio)


#
# DOUBLING AND COVERING GROWTH
#
def small_balls(ms: FiniteMetricSpace, radius: float) -> np.ndarray:
    """Membership matrix of the open balls of ``radius`` around every point."""
    return ms.to_matrix() < radius - ms.atol


def _greedy_cover_count(balls: np.ndarray, targets: np.ndarray) -> int:
    """Number of balls (rows of ``balls``) greedy needs to cover ``targets``."""
    left = targets.copy()
    count = 0
    while left.any():
        gains = (balls & left).sum(axis=1)
        best = int(gains.argmax())
        if gains[best] == 0:
            raise InvariantViolation("greedy cover stalled", "doubling_estimate")
        left &= ~balls[best]
        count += 1
    return count


def default_radii(ms: FiniteMetricSpace, count: int = 8) -> list[float]:
    """Evenly spread distinct positive distances of the space."""
    values = np.unique(np.concatenate([ms.row(i) for i in range(ms.size)]))
    values = values[values > ms.atol]
    if values.size == 0:
        return []
    picks = np.unique(np.linspace(0, values.size - 1, num=min(count, values.size)).round().astype(int))
    return [float(values[i]) for i in picks]


class DoublingReport(BaseModel):
    doubling: int = Field(description="Largest greedy count; bounds the doubling constant up to greedy slack")
    per_radius: dict[str, int]
    greedy: bool = True


def doubling_estimate(ms: FiniteMetricSpace, radii: Sequence[float] | None = None) -> DoublingReport:
    """Greedy count of ``r/2``-balls needed for every ball ``B(p, r)``; the maximum over ``p`` and ``r``."""
    chosen = list(radii) if radii is not None else default_radii(ms)
    per_radius = {}
    for r in chosen:
        if r <= 0:
            raise ParameterError("radii must be positive", "doubling_estimate")
        balls = small_balls(ms, r / 2)
        per_radius[repr(r)] = max(_greedy_cover_count(balls, open_ball(ms, p, r)) for p in range(ms.size))
    return DoublingReport(doubling=max(per_radius.values(), default=1), per_radius=per_radius)


class GrowthRow(BaseModel):
    big: float
    small: float
    count: int
    constant: float = Field(description="count / (big/small)^exponent")


class GrowthReport(BaseModel):
    exponent: float
    rows: list[GrowthRow]
    constant: float = Field(description="Smallest C with count <= C (R/r)^s on all rows")


def covering_growth(ms: FiniteMetricSpace, pairs: Sequence[tuple[float, float]], exponent: float) -> GrowthReport:
    """How many ``r``-balls cover a ball of radius ``R``, measured against ``C (R/r)^s``."""
    rows = []
    for big, small in pairs:
        if not 0 < small <= big:
            raise ParameterError("need 0 < r <= R", "covering_growth", {"R": big, "r": small})
        balls = small_balls(ms, small)
        count = max(_greedy_cover_count(balls, open_ball(ms, p, big)) for p in range(ms.size))
        rows.append(GrowthRow(big=big, small=small, count=count, constant=count / (big / small) ** exponent))
    return GrowthReport(exponent=exponent, rows=rows, constant=max((r.constant for r in rows), default=0.0))


#
# LINEAR LOCAL CONNECTEDNESS
#
class LLCCheck(BaseModel):
    centre: int
    radius: float
    verdict: Verdict
    qualifying: int = Field(description="Number of points that must be joined")
    witness: tuple[int, int] | None = Field(default=None, description="Pair not joined inside the region")


class ConnectivityReport(BaseModel):
    check: Property
    lam: float
    delta: float
    checks: list[LLCCheck]

    @property
    def verdict(self) -> Verdict:
        verdicts = {c.verdict for c in self.checks}
        if "fail" in verdicts:
            return "fail"
        return "inconclusive" if "inconclusive" in verdicts else "pass"

    @property
    def failures(self) -> list[LLCCheck]:
        return [c for c in self.checks if c.verdict == "fail"]


def _regions(ms: FiniteMetricSpace, which: Property, p: int, r: float, lam: float) -> tuple[np.ndarray, np.ndarray]:
    """(points to join, region they must be joined in)."""
    if which == "LLC1":
        return open_ball(ms, p, r), open_ball(ms, p, lam * r)
    if which == "LLC2":
        return ~open_ball(ms, p, r), ~open_ball(ms, p, r / lam)
    return annulus(ms, p, r, 2 * r), annulus(ms, p, r / lam, 2 * lam * r)


def _check_one(dg: DeltaGraph, which: Property, p: int, r: float, lam: float) -> LLCCheck:
    qualifying, region = _regions(dg.space, which, p, r, lam)
    members = [int(i) for i in np.flatnonzero(qualifying)]
    if len(members) <= 1:
        return LLCCheck(centre=p, radius=r, verdict="pass", qualifying=len(members))
    sub = dg.graph.subgraph(int(i) for i in np.flatnonzero(region))
    component = {node: index for index, nodes in enumerate(nx.connected_components(sub)) for node in nodes}
    first = component[members[0]]
    apart = next((m for m in members if component[m] != first), None)
    if apart is None:
        return LLCCheck(centre=p, radius=r, verdict="pass", qualifying=len(members))
    if sub.number_of_nodes() > 1 and any(sub.degree(m) == 0 for m in members):
        return LLCCheck(centre=p, radius=r, verdict="inconclusive", qualifying=len(members))
    return LLCCheck(centre=p, radius=r, verdict="fail", qualifying=len(members), witness=(members[0], apart))


def check_llc(
    ms: FiniteMetricSpace,
    which: Property,
    lam: float,
    delta: float,
    radii: Sequence[float] | None = None,
    centres: Sequence[int] | None = None,
    sample_budget: int | None = None,
    dg: DeltaGraph | None = None,
) -> ConnectivityReport:
    """Check ``LLC1``, ``LLC2`` or ``ALC`` with constant ``lam`` at resolution ``delta``.

    Every (centre, radius) pair gets a verdict: ``pass`` when all qualifying points lie in one
    delta-component of the region, ``inconclusive`` when some qualifying point has no neighbour there,
    ``fail`` with a witness pair otherwise. ``sample_budget`` spreads at most that many centres evenly.
    """
    if lam < 1:
        raise ParameterError("lambda must be at least 1", "check_llc", {"lambda": lam})
    if dg is None:
        dg = delta_graph(ms, delta)
    points = list(centres) if centres is not None else list(range(ms.size))
    if sample_budget is not None and len(points) > sample_budget:
        picks = np.unique(np.linspace(0, len(points) - 1, num=sample_budget).round().astype(int))
        points = [points[i] for i in picks]
    scales = list(radii) if radii is not None else default_radii(ms)
    checks = [_check_one(dg, which, p, r, lam) for p in sorted(points) for r in sorted(scales)]
    report = ConnectivityReport(check=which, lam=lam, delta=delta, checks=checks)
    if report.verdict != "pass":
        logging.info(f"check_llc: {which} at lambda={lam}: {report.verdict} ({len(report.failures)} failures)")
    return report


class CrossCheck(BaseModel):
    alc: ConnectivityReport
    llc2: ConnectivityReport | None = None
    llc1: ConnectivityReport | None = None

    @property
    def consistent(self) -> bool:
        """An annular pass must carry over to both linear local connectedness checks."""
        if self.alc.verdict != "pass":
            return True
        return all(r is not None and r.verdict != "fail" for r in (self.llc2, self.llc1))


def cross_check_alc(
    ms: FiniteMetricSpace,
    lam: float,
    delta: float,
    radii: Sequence[float] | None = None,
    margin: float = 0.5,
) -> CrossCheck:
    """Run ALC at ``lam``; on a pass, run LLC2 at ``lam + margin`` and LLC1 at five times that."""
    dg = delta_graph(ms, delta)
    alc = check_llc(ms, "ALC", lam, delta, radii, dg=dg)
    if alc.verdict != "pass":
        return CrossCheck(alc=alc)
    widened = lam + margin
    return CrossCheck(
        alc=alc,
        llc2=check_llc(ms, "LLC2", widened, delta, radii, dg=dg),
        llc1=check_llc(ms, "LLC1", 5 * widened, delta, radii, dg=dg),
    )


#
# SNOWFLAKES AND COMPARISONS
#
def snowflake(ms: FiniteMetricSpace, alpha: float) -> FiniteMetricSpace:
    """The space with distances ``d^alpha``, ``0 < alpha <= 1``."""
    if not 0 < alpha <= 1:
        raise ParameterError("alpha must lie in (0, 1]", "snowflake", {"alpha": alpha})
    matrix = ms.to_matrix()
    powered = matrix.copy() if alpha == 1 else np.power(matrix, alpha)
    try:
        return FiniteMetricSpace.from_matrix(powered, ms.labels, ms.pseudometric, ms.atol)
    except MetricAxiomError as e:
        raise InvariantViolation("snowflaked distances are not a metric", "snowflake", details={"cause": str(e)}) from e


class ComparisonReport(BaseModel):
    exponent: float
    constant: float = Field(description="Tightest C with d^e / C <= rho <= C d^e")
    pairs: int
    holds: bool | None = Field(default=None, description="constant <= the requested C, when one was given")


def check_comparison(
    ms_d: FiniteMetricSpace, ms_rho: FiniteMetricSpace, exponent: float, constant: float | None = None
) -> ComparisonReport:
    if ms_d.size != ms_rho.size:
        raise InputError("spaces have different numbers of points", "check_comparison")
    d, rho = np.power(ms_d.to_matrix(), exponent), ms_rho.to_matrix()
    upper = np.triu(np.ones_like(d, dtype=bool), 1)
    positive = upper & (d > ms_d.atol)
    if ((rho > ms_rho.atol) & upper & ~positive).any():
        tightest = math.inf
    elif not positive.any():
        tightest = 1.0
    else:
        ratios = rho[positive] / d[positive]
        tightest = float(max(ratios.max(), 1 / ratios.min()))
    holds = None if constant is None else tightest <= constant + ms_d.atol
    return ComparisonReport(exponent=exponent, constant=tightest, pairs=int(upper.sum()), holds=holds)


#
# FAT SQUARES
#
class FatSquareReport(BaseModel):
    contained: bool
    endpoint_balls: bool | None = None
    face_distances: list[float]
    required_distance: float
    passed: bool


def check_fat_square(
    ms: FiniteMetricSpace,
    img: CubeImage,
    centre: int,
    radius: float | None,
    lam: float,
    target: int | None = None,
) -> FatSquareReport:
    """Certificate check of a sampled square.

    Without ``target``: image inside ``B(centre, radius)`` and opposite face images at least
    ``radius / lam`` apart. With ``target`` (connecting variant, ``D = d(centre, target)``): image
    inside ``B(centre, lam D)``, ``g(F_1)`` inside ``B(centre, D/4)``, ``g(F_1')`` inside
    ``B(target, D/4)`` and face images at least ``D / lam`` apart.
    """
    if img.dimension != 2:
        raise InputError("fat squares need a two-dimensional image", "check_fat_square")
    if img.space.size != ms.size:
        raise InputError("image does not live in this space", "check_fat_square")
    points = img.points()
    endpoint_balls = None
    if target is None:
        if radius is None:
            raise ParameterError("radius is required without a target", "check_fat_square")
        contained = bool(open_ball(ms, centre, radius)[points].all())
        required = radius / lam
    else:
        span = ms.distance(centre, target)
        contained = bool(open_ball(ms, centre, lam * span)[points].all())
        endpoint_balls = bool(
            open_ball(ms, centre, span / 4)[img.face_points(Face.low(0))].all()
            and open_ball(ms, target, span / 4)[img.face_points(Face.high(0))].all()
        )
        required = span / lam
    distances = image_face_distances(img)
    separated = all(d >= required - ms.atol for d in distances)
    return FatSquareReport(
        contained=contained,
        endpoint_balls=endpoint_balls,
        face_distances=distances,
        required_distance=required,
        passed=contained and separated and endpoint_balls is not False,
    )
