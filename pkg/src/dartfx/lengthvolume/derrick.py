# SPDX-FileCopyrightText: 2024-present kulnor <pascal.heus@gmail.com>
#
# SPDX-License-Identifier: MIT
"""Rectangle proxies, the map ``f = psi o phi`` and the length-volume certificate.

Every set ``U_i`` gets a rectangle ``R_i = prod_k [d_k(i), d_k(i) + w_k(i)]`` where ``d_k(i)`` is the
weighted distance from the face ``F_k`` to ``U_i`` (0 when ``U_i`` meets ``F_k``). Intersecting sets
get intersecting rectangles, which lets every vertex of the barycentric subdivision of the nerve be
sent to a point of the corresponding rectangles. Composing with the partition of unity gives a
continuous ``f`` from the cube into ``R^n`` whose boundary behaviour forces
``prod_k [0, d_k]`` into the image, and the volume of that box is at most ``sum_i prod_k w_k(i)``.

The inequality itself is checked exactly. The map is evaluated exactly at sample points; its
boundary conditions are checked exactly there, and surjectivity is supported by numerical evidence.
"""

import logging
from fractions import Fraction
from functools import reduce
from itertools import pairwise, product
from operator import mul
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, PrivateAttr

from .chains import ChainGraph, build_chain_graph, face_distances, offsets_to_sets
from .cover import ONE, ZERO, Face, Point, Rational, WeightedCover, is_spanning, require_covering
from .exceptions import InputError, InvariantViolation
from .nerve import NerveComplex, build_nerve, evaluate_phi, locate_in_subdivision

OnViolation = Literal["raise", "report"]


class CertifyParameters(BaseModel):
    """Knobs of the map certificates run by :func:`verify_lv`."""

    certify: bool = Field(default=True, description="Run boundary and surjectivity checks on non-spanning covers")
    samples_per_face: int = Field(
        default=32, ge=0, description="Face sample grid has pitch 1/samples_per_face; 0 disables sampling"
    )
    resolution: int = Field(default=16, ge=1, description="Grid resolution of the surjectivity evidence")
    refinement_budget: int = Field(
        default=200_000, ge=1, description="Maximum number of map evaluations spent refining the boundary loop"
    )
    validate_cover: bool = Field(default=True, description="Check exactly that the sets cover the cube first")
    on_violation: OnViolation = Field(default="raise", description="Raise or only report failed theorem checks")


#
# PROXIES
#
class ClaimViolation(BaseModel):
    kind: Literal["pair", "simplex"]
    sets: list[int]
    axis: int


class ClaimReport(BaseModel):
    """Result of checking that intersecting sets (pairs and maximal nerve simplices) have intersecting rectangles."""

    pairs_checked: int = 0
    simplices_checked: int = 0
    violations: list[ClaimViolation] = Field(default_factory=list)

    @property
    def holds(self) -> bool:
        return not self.violations


class ProxyAssignment(BaseModel):
    """Offsets ``d_k(i)``, weights and face incidences of every set, indexed by set id."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    dimension: int
    ids: tuple[int, ...]
    offsets: dict[int, tuple[Fraction, ...]]
    weights: dict[int, tuple[Fraction, ...]]
    meets_low: dict[int, tuple[bool, ...]]
    distances: tuple[Fraction, ...]
    claims: ClaimReport = Field(default_factory=ClaimReport)

    _vertex_cache: dict[tuple[int, ...], tuple[Fraction, ...]] = PrivateAttr(default_factory=dict)

    def interval(self, set_id: int, axis: int) -> tuple[Fraction, Fraction]:
        """``I_k(i) = [d_k(i), d_k(i) + w_k(i)]``."""
        start = self.offsets[set_id][axis]
        return start, start + self.weights[set_id][axis]

    def rectangle(self, set_id: int) -> list[tuple[Fraction, Fraction]]:
        return [self.interval(set_id, k) for k in range(self.dimension)]

    def in_rectangle(self, set_id: int, z: Point) -> bool:
        return all(lo <= c <= hi for c, (lo, hi) in zip(z, self.rectangle(set_id), strict=True))


def _common_interval(pa: ProxyAssignment, members: tuple[int, ...], axis: int) -> tuple[Fraction, Fraction]:
    intervals = [pa.interval(i, axis) for i in members]
    return max(lo for lo, _ in intervals), min(hi for _, hi in intervals)


def check_claims(pa: ProxyAssignment, g: ChainGraph, nerve: NerveComplex) -> ClaimReport:
    """Rectangles of intersecting pairs and of every maximal nerve simplex must have a common point."""
    report = ClaimReport()
    for a, b in g.graph.edges():
        members = (g.ids[a], g.ids[b])
        report.pairs_checked += 1
        for k in range(pa.dimension):
            lo, hi = _common_interval(pa, members, k)
            if lo > hi:
                report.violations.append(ClaimViolation(kind="pair", sets=list(members), axis=k))
    for simplex in nerve.maximal_simplices:
        report.simplices_checked += 1
        for k in range(pa.dimension):
            lo, hi = _common_interval(pa, simplex, k)
            if lo > hi:
                report.violations.append(ClaimViolation(kind="simplex", sets=list(simplex), axis=k))
    return report


def build_proxies(
    cover: WeightedCover,
    g: ChainGraph | None = None,
    nerve: NerveComplex | None = None,
    on_violation: OnViolation = "raise",
) -> ProxyAssignment:
    """Compute ``d_k(i)`` for all sets and axes and check the rectangle intersection claims."""
    if g is None:
        g = build_chain_graph(cover)
    if nerve is None:
        nerve = build_nerve(cover)
    per_axis = [offsets_to_sets(g, k) for k in range(cover.dimension)]
    offsets = {s.id: tuple(per_axis[k][i] for k in range(cover.dimension)) for i, s in enumerate(cover.sets)}
    meets_low = {
        s.id: tuple(g.meets(i, Face.low(k)) for k in range(cover.dimension)) for i, s in enumerate(cover.sets)
    }
    pa = ProxyAssignment(
        dimension=cover.dimension,
        ids=tuple(cover.ids),
        offsets=offsets,
        weights={s.id: tuple(s.weights) for s in cover.sets},
        meets_low=meets_low,
        distances=face_distances(cover, g),
    )
    claims = check_claims(pa, g, nerve)
    if not claims.holds:
        logging.error(f"rectangle claims violated: {claims.violations[:3]}")
        if on_violation == "raise":
            raise InvariantViolation(
                "intersecting sets received disjoint rectangles", "build_proxies", witness=claims.violations[0]
            )
    return pa.model_copy(update={"claims": claims})


#
# THE MAP
#
def vertex_image(pa: ProxyAssignment, simplex: tuple[int, ...]) -> tuple[Fraction, ...]:
    """Point ``z_p`` for the barycentre ``p`` of ``simplex``.

    Per axis, ``[a_k, b_k]`` is the intersection of the members' intervals; the coordinate is
    ``a_k`` (which is 0) when every member meets ``F_k`` and ``b_k`` otherwise.
    """
    key = tuple(sorted(simplex))
    cached = pa._vertex_cache.get(key)
    if cached is not None:
        return cached
    z = []
    for k in range(pa.dimension):
        a, b = _common_interval(pa, key, k)
        if a > b:
            raise InvariantViolation("empty interval intersection", "vertex_image", witness={"simplex": key, "axis": k})
        if all(pa.meets_low[i][k] for i in key):
            if a != ZERO:
                raise InvariantViolation("sets meeting F_k with a non-zero offset", "vertex_image", witness=key)
            z.append(a)
        else:
            z.append(b)
    image = tuple(z)
    pa._vertex_cache[key] = image
    return image


def evaluate_f(cover: WeightedCover, pa: ProxyAssignment, x: Point, nerve: NerveComplex | None = None) -> Point:
    """``f(x) = sum_j mu_j z_{p_j}`` over the subdivision simplex containing ``phi(x)``."""
    phi = evaluate_phi(cover, x)
    located = locate_in_subdivision(phi, nerve)
    order = located.address.order
    value = [ZERO] * pa.dimension
    for j, mu in enumerate(located.coefficients):
        if mu == ZERO:
            continue
        z = vertex_image(pa, order[: j + 1])
        for k in range(pa.dimension):
            value[k] += mu * z[k]
    fx = tuple(value)
    if not pa.in_rectangle(order[0], fx):
        raise InvariantViolation(
            "f(x) left the rectangle of the dominant set", "evaluate_f", witness={"x": [str(c) for c in x]}
        )
    return fx


#
# BOUNDARY CONDITIONS
#
class FaceViolation(BaseModel):
    face: str
    point: list[str]
    value: str
    bound: str


class BoundaryReport(BaseModel):
    samples: int = 0
    faces: int = 0
    violations: list[FaceViolation] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations


def face_grid(dimension: int, face: Face, samples: int) -> list[Point]:
    """Rational grid of pitch ``1/samples`` on a face, ``(samples + 1)^(n-1)`` points."""
    if samples == 0:
        return []
    fixed = ZERO if face.side == "low" else ONE
    ticks = [Fraction(i, samples) for i in range(samples + 1)]
    points = []
    for rest in product(ticks, repeat=dimension - 1):
        coordinates = list(rest)
        coordinates.insert(face.axis, fixed)
        points.append(tuple(coordinates))
    return points


def boundary_check(
    cover: WeightedCover,
    pa: ProxyAssignment,
    samples_per_face: int,
    nerve: NerveComplex | None = None,
    on_violation: OnViolation = "raise",
) -> BoundaryReport:
    """Check ``pi_k f = 0`` on ``F_k`` and ``pi_k f >= d_k`` on ``F_k'`` at every face grid point."""
    if is_spanning(cover):
        raise InputError("boundary conditions only hold for non-spanning covers", "boundary_check")
    if nerve is None:
        nerve = build_nerve(cover)
    report = BoundaryReport()
    for k in range(cover.dimension):
        for face in (Face.low(k), Face.high(k)):
            report.faces += 1
            for x in face_grid(cover.dimension, face, samples_per_face):
                value = evaluate_f(cover, pa, x, nerve)[k]
                report.samples += 1
                ok = value == ZERO if face.side == "low" else value >= pa.distances[k]
                if not ok:
                    bound = "= 0" if face.side == "low" else f">= {pa.distances[k]}"
                    report.violations.append(
                        FaceViolation(face=str(face), point=[str(c) for c in x], value=str(value), bound=bound)
                    )
    if report.violations:
        logging.error(f"boundary_check: {len(report.violations)} violations, first {report.violations[0]}")
        if on_violation == "raise":
            raise InvariantViolation("boundary condition of f failed", "boundary_check", witness=report.violations[0])
    logging.debug(f"boundary_check: {report.samples} samples on {report.faces} faces")
    return report


#
# SURJECTIVITY EVIDENCE
#
class SurjectivityReport(BaseModel):
    method: Literal["vacuous", "intermediate-value", "winding", "coverage"]
    status: Literal["passed", "failed", "inconclusive", "sampled"]
    resolution: int
    grid_points: int = 0
    covered: int = 0
    evaluations: int = 0
    loop_vertices: int = 0
    failures: list[list[str]] = Field(default_factory=list, description="First uncovered target points")

    @property
    def coverage(self) -> float:
        return 1.0 if self.grid_points == 0 else self.covered / self.grid_points


def _boundary_loop_2d(resolution: int) -> list[list[Point]]:
    """Counter-clockwise sides of the unit square, each as its list of initial sample points."""
    ticks = [Fraction(i, resolution) for i in range(resolution + 1)]
    bottom = [(t, ZERO) for t in ticks]
    right = [(ONE, t) for t in ticks]
    top = [(ONE - t, ONE) for t in ticks]
    left = [(ZERO, ONE - t) for t in ticks]
    return [bottom, right, top, left]


def is_left(point: Point, l0: Point, l1: Point) -> Fraction:
    """Positive when ``point`` is left of the directed line ``l0 -> l1``, zero on it."""
    return (l1[0] - l0[0]) * (point[1] - l0[1]) - (point[0] - l0[0]) * (l1[1] - l0[1])


def winding_number(point: Point, loop: list[Point]) -> int:
    """Winding number of a closed polygonal loop (first vertex repeated at the end) around ``point``."""
    winding = 0
    for source, target in pairwise(loop):
        if source[1] <= point[1]:
            if target[1] > point[1] and is_left(point, source, target) > 0:
                winding += 1
        elif target[1] <= point[1] and is_left(point, source, target) < 0:
            winding -= 1
    return winding


def _linf(a: Point, b: Point) -> Fraction:
    return max(abs(p - q) for p, q in zip(a, b, strict=True))


def _image_loop(
    cover: WeightedCover, pa: ProxyAssignment, nerve: NerveComplex, resolution: int, threshold: Fraction, budget: int
) -> tuple[list[Point], int] | None:
    """Image of the refined boundary loop, or ``None`` when the evaluation budget runs out."""
    evaluations = 0
    loop: list[Point] = []
    for side in _boundary_loop_2d(resolution):
        stack = [(x, evaluate_f(cover, pa, x, nerve)) for x in side]
        evaluations += len(stack)
        refined = [stack[0]]
        pending = list(reversed(stack[1:]))
        while pending:
            x1, f1 = pending[-1]
            x0, f0 = refined[-1]
            if _linf(f0, f1) < threshold:
                refined.append(pending.pop())
                continue
            if evaluations >= budget:
                return None
            mid = tuple((a + b) / 2 for a, b in zip(x0, x1, strict=True))
            pending.append((mid, evaluate_f(cover, pa, mid, nerve)))
            evaluations += 1
        loop.extend(f for _, f in refined[:-1])
    loop.append(loop[0])
    return loop, evaluations


def surjectivity_sample(
    cover: WeightedCover,
    pa: ProxyAssignment,
    resolution: int,
    refinement_budget: int = 200_000,
    nerve: NerveComplex | None = None,
) -> SurjectivityReport:
    """Evidence that ``R = prod_k [0, d_k]`` lies in ``f([0,1]^n)``.

    * ``n = 1``: intermediate values of ``f`` along a grid of ``[0,1]`` bracket every target point.
    * ``n = 2``: winding number of the image of the refined boundary loop around interior grid points of ``R``.
    * ``n >= 3``: share of grid points of ``R`` within L-infinity distance ``1/resolution`` of a sampled image.
    """
    if is_spanning(cover):
        raise InputError("surjectivity evidence needs a non-spanning cover", "surjectivity_sample")
    d = pa.distances
    n = cover.dimension
    if any(dk == ZERO for dk in d):
        return SurjectivityReport(method="vacuous", status="passed", resolution=resolution)
    if nerve is None:
        nerve = build_nerve(cover)
    pitch = max(d) / resolution

    if n == 1:
        xs = [Fraction(i, resolution) for i in range(resolution + 1)]
        values = [evaluate_f(cover, pa, (x,), nerve)[0] for x in xs]
        targets = [pitch * i for i in range(resolution + 1)]
        report = SurjectivityReport(
            method="intermediate-value", status="passed", resolution=resolution, evaluations=len(xs)
        )
        for t in targets:
            report.grid_points += 1
            if any(min(a, b) <= t <= max(a, b) for a, b in pairwise(values)):
                report.covered += 1
            elif len(report.failures) < 10:
                report.failures.append([str(t)])
        if report.covered < report.grid_points:
            report.status = "failed"
        return report

    if n == 2:
        threshold = min(Fraction(1, 4 * resolution), pitch / 4)
        traced = _image_loop(cover, pa, nerve, resolution, threshold, refinement_budget)
        if traced is None:
            logging.warning("surjectivity_sample: refinement budget exhausted")
            return SurjectivityReport(
                method="winding", status="inconclusive", resolution=resolution, evaluations=refinement_budget
            )
        loop, evaluations = traced
        report = SurjectivityReport(
            method="winding",
            status="passed",
            resolution=resolution,
            evaluations=evaluations,
            loop_vertices=len(loop) - 1,
        )
        for i, j in product(range(1, resolution + 1), repeat=2):
            target = (pitch * i, pitch * j)
            if not (target[0] < d[0] and target[1] < d[1]):
                continue
            report.grid_points += 1
            if winding_number(target, loop) == 1:
                report.covered += 1
            elif len(report.failures) < 10:
                report.failures.append([str(c) for c in target])
        if report.covered < report.grid_points:
            report.status = "failed"
        return report

    # n >= 3: spatial hash of sampled image points in cells of side 1/resolution
    tolerance = Fraction(1, resolution)
    buckets: dict[tuple[int, ...], list[Point]] = {}
    evaluations = 0
    for x in product([Fraction(i, resolution) for i in range(resolution + 1)], repeat=n):
        fx = evaluate_f(cover, pa, x, nerve)
        evaluations += 1
        buckets.setdefault(tuple(int(c // tolerance) for c in fx), []).append(fx)
    report = SurjectivityReport(method="coverage", status="sampled", resolution=resolution, evaluations=evaluations)
    axes = [[pitch * i for i in range(resolution + 1) if pitch * i <= dk] for dk in d]
    for target in product(*axes):
        report.grid_points += 1
        cell = tuple(int(c // tolerance) for c in target)
        near = any(
            _linf(target, fx) <= tolerance
            for offset in product((-1, 0, 1), repeat=n)
            for fx in buckets.get(tuple(c + o for c, o in zip(cell, offset, strict=True)), ())
        )
        if near:
            report.covered += 1
        elif len(report.failures) < 10:
            report.failures.append([str(c) for c in target])
    return report


#
# CERTIFICATE
#
class LVCertificate(BaseModel):
    """Exact verdict on ``sum_i prod_k w_k(i) >= prod_k d_k`` plus map certificates."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    dimension: int
    sets: int
    volume: Rational
    distances: list[Rational]
    product: Rational
    inequality_holds: bool
    slack: Rational
    spanning: bool
    status: Literal["verified", "degenerate", "spanning", "violated"]
    claims: ClaimReport | None = None
    boundary_report: BoundaryReport | None = None
    surjectivity_report: SurjectivityReport | None = None


def verify_lv(cover: WeightedCover, params: CertifyParameters | None = None) -> LVCertificate:
    """Verify the length-volume inequality exactly and, on non-spanning covers, certify the map."""
    params = params or CertifyParameters()
    if params.validate_cover:
        require_covering(cover)
    g = build_chain_graph(cover)
    nerve = build_nerve(cover)
    pa = build_proxies(cover, g, nerve, on_violation=params.on_violation)
    volume = cover.volume()
    product_d = reduce(mul, pa.distances, ONE)
    holds = volume >= product_d
    spanning = is_spanning(cover)
    status: Literal["verified", "degenerate", "spanning", "violated"]
    if not holds:
        status = "violated"
    elif product_d == ZERO:
        status = "degenerate"
    elif spanning:
        status = "spanning"
    else:
        status = "verified"
    certificate = LVCertificate(
        dimension=cover.dimension,
        sets=cover.size,
        volume=volume,
        distances=list(pa.distances),
        product=product_d,
        inequality_holds=holds,
        slack=volume - product_d,
        spanning=spanning,
        status=status,
        claims=pa.claims,
    )
    if not holds:
        logging.error(f"verify_lv: volume {volume} < product {product_d}")
        if params.on_violation == "raise":
            raise InvariantViolation("length-volume inequality failed", "verify_lv", witness=cover.to_json())
    if status == "verified" and params.certify:
        certificate.boundary_report = boundary_check(
            cover, pa, params.samples_per_face, nerve, on_violation=params.on_violation
        )
        certificate.surjectivity_report = surjectivity_sample(
            cover, pa, params.resolution, params.refinement_budget, nerve
        )
        if not certificate.boundary_report.passed or certificate.surjectivity_report.status == "failed":
            certificate.status = "violated"
    logging.info(f"verify_lv: {cover.size} sets, volume {volume} >= {product_d}: {holds} ({certificate.status})")
    return certificate


def verify_single_weight(cover: WeightedCover, weights: dict[int, Fraction]) -> LVCertificate:
    """``sum_i w(i)^n >= prod_k d_k`` with the same weight on every axis."""
    if set(weights) != set(cover.ids):
        raise InputError("one weight per set id is required", "verify_single_weight")
    reweighted = cover.with_weights([(Fraction(weights[s.id]),) * cover.dimension for s in cover.sets])
    return verify_lv(reweighted, CertifyParameters(certify=False))


def verify_counting(cover: WeightedCover) -> LVCertificate:
    """Number of sets is at least the product of the minimal chain cardinalities between opposite faces."""
    return verify_single_weight(cover, {set_id: ONE for set_id in cover.ids})
