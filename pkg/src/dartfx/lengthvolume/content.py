# SPDX-FileCopyrightText: 2024-present kulnor <pascal.heus@gmail.com>
#
# SPDX-License-Identifier: MIT
"""Finite metric spaces, sampled cube images and Hausdorff content bounds.

A continuous map ``g`` from the cube into a metric space is represented by its values on a
rational grid. The product of the distances between opposite face images bounds the
``n``-dimensional Hausdorff content of the image from below; a greedy ball cover of the image
points bounds it from above. Distances are ``numpy`` float64 with an absolute tolerance ``atol``.
"""

import heapq
import json
import logging
from collections.abc import Iterable, Mapping, Sequence
from fractions import Fraction
from functools import reduce
from itertools import combinations, product
from operator import mul
from pathlib import Path
from typing import Any, Literal

import networkx as nx
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .chains import chain_distance, chain_graph_from_sets
from .cover import ONE, ZERO, Face, Rational, WeightedCover, parse_rational
from .derrick import OnViolation
from .exceptions import InputError, InvariantViolation, MetricAxiomError, ParameterError

Norm = Literal["linf", "l2", "l1"]

MAX_DENSE_POINTS = 3000
MAX_TRIANGLE_POINTS = 1500


#
# FINITE METRIC SPACES
#
class FiniteMetricSpace(BaseModel):
    """Points with either an explicit distance matrix or coordinates and a norm.

    Coordinate-backed spaces compute rows on demand and never materialize the full matrix
    unless asked to.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    labels: tuple[str, ...]
    matrix: np.ndarray | None = Field(default=None, exclude=True)
    coords: np.ndarray | None = Field(default=None, exclude=True)
    norm: Norm = "linf"
    atol: float = Field(default=1e-9, ge=0)
    pseudometric: bool = Field(default=False, description="Allow zero distances between distinct points")

    @model_validator(mode="after")
    def _check_shape(self) -> "FiniteMetricSpace":
        if (self.matrix is None) == (self.coords is None):
            raise ValueError("give exactly one of matrix and coords")
        m = len(self.labels)
        if m == 0:
            raise ValueError("a metric space needs at least one point")
        if self.matrix is not None and self.matrix.shape != (m, m):
            raise ValueError(f"matrix shape {self.matrix.shape} does not match {m} points")
        if self.coords is not None and (self.coords.ndim != 2 or self.coords.shape[0] != m):
            raise ValueError(f"coords must have one row per point, got shape {self.coords.shape}")
        return self

    @property
    def size(self) -> int:
        return len(self.labels)

    def row(self, i: int) -> np.ndarray:
        if self.matrix is not None:
            return self.matrix[i]
        assert self.coords is not None
        diff = np.abs(self.coords - self.coords[i])
        if self.norm == "linf":
            return diff.max(axis=1)
        if self.norm == "l1":
            return diff.sum(axis=1)
        return np.sqrt((diff * diff).sum(axis=1))

    def distance(self, i: int, j: int) -> float:
        return float(self.row(i)[j])

    def block(self, rows: Sequence[int] | np.ndarray, cols: Sequence[int] | np.ndarray) -> np.ndarray:
        cols = np.asarray(cols, dtype=int)
        if self.matrix is not None:
            return self.matrix[np.ix_(np.asarray(rows, dtype=int), cols)]
        return np.array([self.row(i)[cols] for i in rows]).reshape(len(rows), len(cols))

    def set_distance(self, a: Iterable[int], b: Iterable[int]) -> float:
        """``dist(A, B) = min d(x, y)``; 0 when the sets share a point."""
        rows, cols = np.unique(np.fromiter(a, dtype=int)), np.unique(np.fromiter(b, dtype=int))
        if rows.size == 0 or cols.size == 0:
            raise InputError("distance to an empty set", "set_distance")
        return float(min(self.row(i)[cols].min() for i in rows))

    def diameter(self, indices: Sequence[int] | np.ndarray) -> float:
        members = np.unique(np.asarray(indices, dtype=int))
        if members.size <= 1:
            return 0.0
        if self.coords is not None and self.norm == "linf":
            return float(np.ptp(self.coords[members], axis=0).max())
        return float(max(self.row(i)[members].max() for i in members))

    def to_matrix(self) -> np.ndarray:
        if self.matrix is not None:
            return self.matrix
        if self.size > MAX_DENSE_POINTS:
            raise ParameterError("space too large for a dense distance matrix", "to_matrix", {"points": self.size})
        return np.array([self.row(i) for i in range(self.size)])

    def to_dict(self) -> dict[str, Any]:
        if self.coords is not None:
            return {"points": list(self.labels), "coords": self.coords.tolist(), "norm": self.norm}
        assert self.matrix is not None
        return {"points": list(self.labels), "matrix": self.matrix.tolist(), "pseudometric": self.pseudometric}

    @classmethod
    def from_matrix(
        cls,
        matrix: Any,
        labels: Sequence[str] | None = None,
        pseudometric: bool = False,
        atol: float = 1e-9,
        validate: bool = True,
    ) -> "FiniteMetricSpace":
        array = np.asarray(matrix, dtype=np.float64)
        if array.ndim != 2 or array.shape[0] != array.shape[1]:
            raise InputError("distance matrix must be square", "from_matrix", {"shape": array.shape})
        names = tuple(labels) if labels is not None else tuple(str(i) for i in range(array.shape[0]))
        ms = cls(labels=names, matrix=array, pseudometric=pseudometric, atol=atol)
        if validate:
            validate_metric(ms)
        return ms

    @classmethod
    def from_coords(
        cls, coords: Any, norm: Norm = "linf", labels: Sequence[str] | None = None, atol: float = 1e-9
    ) -> "FiniteMetricSpace":
        array = np.asarray(coords, dtype=np.float64)
        if array.ndim == 1:
            array = array.reshape(-1, 1)
        names = tuple(labels) if labels is not None else tuple(str(i) for i in range(array.shape[0]))
        return cls(labels=names, coords=array, norm=norm, atol=atol)

    @classmethod
    def from_edges(
        cls, labels: Sequence[str], edges: Iterable[tuple[str, str, float]], atol: float = 1e-9
    ) -> "FiniteMetricSpace":
        """Shortest-path completion of a weighted graph."""
        graph = nx.Graph()
        graph.add_nodes_from(labels)
        for a, b, w in edges:
            if a not in graph or b not in graph:
                raise InputError(f"edge ({a}, {b}) names an unknown point", "from_edges")
            graph.add_edge(a, b, weight=w)
        matrix = nx.floyd_warshall_numpy(graph, nodelist=list(labels), weight="weight")
        if not np.isfinite(matrix).all():
            raise InputError("edge list does not connect all points", "from_edges")
        return cls.from_matrix(matrix, labels, atol=atol)

    def restricted(self, indices: Sequence[int]) -> "FiniteMetricSpace":
        idx = list(indices)
        labels = tuple(self.labels[i] for i in idx)
        if self.coords is not None:
            return FiniteMetricSpace(labels=labels, coords=self.coords[idx], norm=self.norm, atol=self.atol)
        return FiniteMetricSpace(
            labels=labels, matrix=self.block(idx, idx), pseudometric=self.pseudometric, atol=self.atol
        )


def validate_metric(ms: FiniteMetricSpace) -> None:
    """Raise :class:`MetricAxiomError` unless ``ms`` satisfies the (pseudo)metric axioms within ``atol``.

    Coordinate-backed spaces are metrics by construction. The triangle inequality costs ``O(m^3)``
    and is skipped with a warning above ``MAX_TRIANGLE_POINTS`` points.
    """
    if ms.matrix is None:
        return
    d, tol = ms.matrix, ms.atol
    if not np.isfinite(d).all():
        raise MetricAxiomError("distances must be finite", "validate_metric")
    if np.abs(np.diagonal(d)).max() > tol:
        raise MetricAxiomError("diagonal must be zero", "validate_metric")
    if d.min() < -tol:
        raise MetricAxiomError("distances must be non-negative", "validate_metric", _witness(d < -tol))
    if np.abs(d - d.T).max() > tol:
        raise MetricAxiomError("distance matrix must be symmetric", "validate_metric", _witness(np.abs(d - d.T) > tol))
    if not ms.pseudometric:
        off = d + np.eye(ms.size) * (2 * tol + 1)
        if off.min() <= tol:
            raise MetricAxiomError("distinct points at distance zero", "validate_metric", _witness(off <= tol))
    if ms.size > MAX_TRIANGLE_POINTS:
        logging.warning(f"validate_metric: {ms.size} points, triangle inequality not checked")
        return
    for k in range(ms.size):
        bad = d > d[:, k : k + 1] + d[k : k + 1, :] + tol
        if bad.any():
            details = _witness(bad)
            details["via"] = k
            raise MetricAxiomError("triangle inequality fails", "validate_metric", details)


def _witness(mask: np.ndarray) -> dict[str, Any]:
    i, j = np.argwhere(mask)[0]
    return {"i": int(i), "j": int(j)}


def _as_float(value: Any) -> float:
    return float(parse_rational(value))


def metric_from_dict(data: Mapping[str, Any]) -> FiniteMetricSpace:
    """Build a space from ``{"matrix": ...}``, ``{"edges": [[a, b, w], ...]}`` or ``{"coords": ..., "norm": ...}``.

    Entries may be numbers or rational strings such as ``"1/3"``.
    """
    labels = data.get("points")
    atol = float(data.get("atol", 1e-9))
    try:
        if "matrix" in data:
            matrix = [[_as_float(v) for v in row] for row in data["matrix"]]
            names = [str(p) for p in labels] if labels is not None else None
            return FiniteMetricSpace.from_matrix(matrix, names, bool(data.get("pseudometric", False)), atol)
        if "edges" in data:
            if labels is None:
                raise InputError("an edge list needs a 'points' list", "load_metric")
            edges = [(str(a), str(b), _as_float(w)) for a, b, w in data["edges"]]
            return FiniteMetricSpace.from_edges([str(p) for p in labels], edges, atol)
        if "coords" in data:
            coords = [[_as_float(v) for v in row] for row in data["coords"]]
            names = [str(p) for p in labels] if labels is not None else None
            return FiniteMetricSpace.from_coords(coords, data.get("norm", "linf"), names, atol)
    except (ValueError, TypeError) as e:
        raise InputError(f"invalid metric space: {e}", "load_metric") from e
    raise InputError("metric space needs 'matrix', 'edges' or 'coords'", "load_metric")


def load_metric(path: str | Path) -> FiniteMetricSpace:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise InputError(f"cannot read metric file: {e}", "load_metric", {"path": str(path)}) from e
    if not isinstance(data, dict):
        raise InputError("metric file must hold a JSON object", "load_metric", {"path": str(path)})
    return metric_from_dict(data)


def save_metric(ms: FiniteMetricSpace, path: str | Path) -> None:
    Path(path).write_text(json.dumps(ms.to_dict()) + "\n", encoding="utf-8")


#
# CUBE IMAGES
#
class CubeImage(BaseModel):
    """Values of a map ``[0,1]^n -> X`` on the grid of pitch ``1/resolution``.

    ``table[i_1, ..., i_n]`` is the point index of the image of ``(i_1, ..., i_n) / resolution``.
    Continuity of the sampled map is the caller's responsibility.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    space: FiniteMetricSpace
    dimension: int = Field(ge=1)
    resolution: int = Field(ge=1)
    table: np.ndarray = Field(exclude=True)

    @model_validator(mode="after")
    def _check_table(self) -> "CubeImage":
        expected = (self.resolution + 1,) * self.dimension
        if self.table.shape != expected:
            raise ValueError(f"table shape {self.table.shape} should be {expected}")
        if self.table.min() < 0 or self.table.max() >= self.space.size:
            raise ValueError("table refers to points outside the space")
        return self

    def face_points(self, face: Face) -> np.ndarray:
        index = 0 if face.side == "low" else self.resolution
        return np.unique(np.take(self.table, index, axis=face.axis))

    def points(self) -> np.ndarray:
        return np.unique(self.table)

    def grid(self) -> Iterable[tuple[int, ...]]:
        return product(range(self.resolution + 1), repeat=self.dimension)


def identity_image(resolution: int, dimension: int, norm: Norm = "linf") -> CubeImage:
    """Inclusion of the grid of pitch ``1/resolution`` into the cube with the given norm."""
    shape = (resolution + 1,) * dimension
    coords = np.indices(shape).reshape(dimension, -1).T / resolution
    labels = [",".join(str(i) for i in idx) for idx in np.ndindex(*shape)]
    space = FiniteMetricSpace.from_coords(coords, norm, labels)
    table = np.arange(coords.shape[0]).reshape(shape)
    return CubeImage(space=space, dimension=dimension, resolution=resolution, table=table)


def image_from_dict(data: Mapping[str, Any], space: FiniteMetricSpace) -> CubeImage:
    """``{"dimension", "resolution", "table": [point labels in row-major grid order]}``."""
    try:
        n, r = int(data["dimension"]), int(data["resolution"])
        index = {label: i for i, label in enumerate(space.labels)}
        flat = [index[str(label)] for label in np.asarray(data["table"], dtype=object).ravel()]
        table = np.asarray(flat, dtype=int).reshape((r + 1,) * n)
        return CubeImage(space=space, dimension=n, resolution=r, table=table)
    except (KeyError, ValueError, TypeError) as e:
        raise InputError(f"invalid cube image: {e}", "load_image") from e


def load_image(path: str | Path, space: FiniteMetricSpace) -> CubeImage:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise InputError(f"cannot read image file: {e}", "load_image", {"path": str(path)}) from e
    return image_from_dict(data, space)


def image_face_distances(img: CubeImage) -> list[float]:
    return [
        img.space.set_distance(img.face_points(Face.low(k)), img.face_points(Face.high(k)))
        for k in range(img.dimension)
    ]


def content_lower_bound(img: CubeImage) -> float:
    """``prod_k dist(g(F_k), g(F_k'))`` over the sampled faces, a lower bound for the image content."""
    distances = image_face_distances(img)
    value = float(np.prod(distances))
    logging.debug(f"content_lower_bound: face distances {distances} -> {value}")
    return value


#
# CONTENT UPPER BOUND
#
class ContentSearchParameters(BaseModel):
    q: float = Field(gt=0, description="Exponent Q of the content")
    scale_floor: float = Field(default=0.0, ge=0, description="Added to every set diameter before taking powers")
    budget: int = Field(default=20_000, ge=1, description="Maximum number of candidate balls evaluated")
    exhaustive_threshold: int = Field(default=12, ge=0, description="Exact search when this few candidates exist")


class CoverBall(BaseModel):
    centre: int
    radius: float
    members: int
    diameter: float


class ContentUpperBound(BaseModel):
    value: float = Field(description="sum of (diam + floor)^Q over the chosen sets")
    balls: list[CoverBall]
    candidates: int
    approximate: bool = Field(description="The candidate budget cut the search short")
    exhaustive: bool


def _candidates(ms: FiniteMetricSpace, pts: np.ndarray) -> list[tuple[float, int]]:
    """Closed balls centred at the points with radii the distinct distances, by radius then centre."""
    found = []
    for position, c in enumerate(pts):
        for radius in np.unique(ms.row(int(c))[pts]):
            found.append((float(radius), position))
    found.sort()
    return found


def _members(ms: FiniteMetricSpace, pts: np.ndarray, radius: float, centre: int) -> np.ndarray:
    return ms.row(int(pts[centre]))[pts] <= radius + ms.atol


def content_upper_bound(
    ms: FiniteMetricSpace, subset: Sequence[int] | None, params: ContentSearchParameters
) -> ContentUpperBound:
    """Upper bound of the ``Q``-content of ``subset`` from a cover by closed balls.

    Greedy repeatedly takes the ball with the least ``(2r + floor)^Q`` per newly covered point;
    singletons are always among the candidates, so the search always completes. With at most
    ``exhaustive_threshold`` candidates every sub-family is tried instead.
    """
    pts = np.unique(np.asarray(range(ms.size) if subset is None else list(subset), dtype=int))
    if pts.size == 0:
        raise InputError("subset must not be empty", "content_upper_bound")
    q, floor = params.q, params.scale_floor
    candidates = _candidates(ms, pts)
    total = len(candidates)
    approximate = total > max(params.budget, pts.size)
    if approximate:
        logging.warning(f"content_upper_bound: {total} candidate balls, evaluating the first {params.budget}")
        candidates = candidates[: max(params.budget, pts.size)]

    if total <= params.exhaustive_threshold:
        chosen = _exhaustive(ms, pts, candidates, q, floor)
    else:
        chosen = _greedy(ms, pts, candidates, q, floor)
    balls = []
    for radius, centre in chosen:
        mask = _members(ms, pts, radius, centre)
        balls.append(
            CoverBall(
                centre=int(pts[centre]), radius=radius, members=int(mask.sum()), diameter=ms.diameter(pts[mask])
            )
        )
    value = float(sum((b.diameter + floor) ** q for b in balls))
    return ContentUpperBound(
        value=value,
        balls=balls,
        candidates=len(candidates),
        approximate=approximate,
        exhaustive=total <= params.exhaustive_threshold,
    )


def _greedy(
    ms: FiniteMetricSpace, pts: np.ndarray, candidates: list[tuple[float, int]], q: float, floor: float
) -> list[tuple[float, int]]:
    uncovered = np.ones(pts.size, dtype=bool)
    heap = []
    for radius, centre in candidates:
        count = int(_members(ms, pts, radius, centre).sum())
        heap.append(((2 * radius + floor) ** q / count, radius, centre))
    heapq.heapify(heap)
    chosen = []
    while uncovered.any():
        key, radius, centre = heapq.heappop(heap)
        fresh = int((_members(ms, pts, radius, centre) & uncovered).sum())
        if fresh == 0:
            continue
        current = (2 * radius + floor) ** q / fresh
        # costs only grow as points get covered, so an unchanged key is still the minimum
        if heap and current > key and current > heap[0][0]:
            heapq.heappush(heap, (current, radius, centre))
            continue
        uncovered &= ~_members(ms, pts, radius, centre)
        chosen.append((radius, centre))
    return chosen


def _exhaustive(
    ms: FiniteMetricSpace, pts: np.ndarray, candidates: list[tuple[float, int]], q: float, floor: float
) -> list[tuple[float, int]]:
    masks = [_members(ms, pts, r, c) for r, c in candidates]
    costs = [(ms.diameter(pts[m]) + floor) ** q for m in masks]
    best: tuple[float, tuple[int, ...]] | None = None
    for size in range(1, len(candidates) + 1):
        for family in combinations(range(len(candidates)), size):
            covered = np.logical_or.reduce([masks[i] for i in family])
            if not covered.all():
                continue
            cost = sum(costs[i] for i in family)
            if best is None or cost < best[0]:
                best = (cost, family)
    assert best is not None
    return [candidates[i] for i in best[1]]


#
# WEIGHTED COVERS OF THE IMAGE
#
class ImageSet(BaseModel):
    """A subset of image points with per-axis weights."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    id: int
    members: frozenset[int]
    weights: tuple[Rational, ...]


class ImageCoverReport(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    distances: list[Rational]
    volume: Rational
    product: Rational
    inequality_holds: bool
    slack: Rational


def pushforward_cover(img: CubeImage, cover: WeightedCover) -> list[ImageSet]:
    """Image sets ``g(U_i)`` at grid resolution, keeping the weights of ``cover``."""
    if cover.dimension != img.dimension:
        raise InputError("cover and image have different dimensions", "pushforward_cover")
    members: list[set[int]] = [set() for _ in cover.sets]
    for idx in img.grid():
        x = tuple(Fraction(i, img.resolution) for i in idx)
        for position, s in enumerate(cover.sets):
            if s.contains(x):
                members[position].add(int(img.table[idx]))
    return [
        ImageSet(id=s.id, members=frozenset(m), weights=s.weights)
        for s, m in zip(cover.sets, members, strict=True)
        if m
    ]


def weighted_cover_bound(
    img: CubeImage, sets: Sequence[ImageSet], on_violation: OnViolation = "raise"
) -> ImageCoverReport:
    """``sum_i prod_k w_k(i) >= prod_k d_k(g)`` with chains through shared image points."""
    covered = set().union(*(s.members for s in sets)) if sets else set()
    missing = sorted(set(img.points().tolist()) - covered)
    if missing:
        raise InputError("cover incomplete", "weighted_cover_bound", {"missing": len(missing), "first": missing[0]})
    if any(len(s.weights) != img.dimension for s in sets):
        raise InputError("every set needs one weight per axis", "weighted_cover_bound")
    faces = {}
    for k in range(img.dimension):
        for face in (Face.low(k), Face.high(k)):
            faces[face] = frozenset(int(p) for p in img.face_points(face))
    g = chain_graph_from_sets(
        img.dimension, [s.id for s in sets], [s.members for s in sets], [s.weights for s in sets], faces
    )
    distances = []
    for k in range(img.dimension):
        result = chain_distance(g, k, Face.low(k), Face.high(k))
        if result.distance is None:
            raise InputError("no chain of image sets joins opposite face images", "weighted_cover_bound", {"axis": k})
        distances.append(result.distance)
    volume = sum((reduce(mul, s.weights, ONE) for s in sets), ZERO)
    prod_d = reduce(mul, distances, ONE)
    report = ImageCoverReport(
        distances=distances, volume=volume, product=prod_d, inequality_holds=volume >= prod_d, slack=volume - prod_d
    )
    if not report.inequality_holds:
        logging.error(f"weighted_cover_bound: volume {volume} < {prod_d}")
        if on_violation == "raise":
            raise InvariantViolation("image cover inequality violated", "weighted_cover_bound", witness=distances)
    return report


#
# PSEUDOMETRIC QUOTIENT
#
class FaceIdentity(BaseModel):
    name: str
    original: float
    quotient: float


class QuotientResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    space: FiniteMetricSpace
    projection: list[int] = Field(description="Class index of every input point")
    classes: list[list[int]]
    face_identities: list[FaceIdentity] = Field(default_factory=list)


def pseudometric_quotient(
    ms: FiniteMetricSpace, faces: Mapping[str, tuple[Sequence[int], Sequence[int]]] | None = None
) -> QuotientResult:
    """Identify points at distance zero.

    Classes are the connected components of the zero-distance graph, numbered by their smallest
    point. When ``faces`` maps names to pairs of point sets, the distance between each pair is
    checked to survive the projection unchanged.
    """
    space = ms if ms.pseudometric else ms.model_copy(update={"pseudometric": True})
    validate_metric(space)
    d = space.to_matrix()
    m = space.size
    zero = nx.Graph()
    zero.add_nodes_from(range(m))
    zero.add_edges_from((int(i), int(j)) for i, j in np.argwhere(np.triu(d <= space.atol, 1)))
    classes = sorted(sorted(c) for c in nx.connected_components(zero))
    projection = [0] * m
    for index, members in enumerate(classes):
        for i in members:
            projection[i] = index
    tolerance = space.atol * m
    for (a, ca), (b, cb) in combinations(enumerate(classes), 2):
        values = d[np.ix_(ca, cb)]
        if values.max() - values.min() > tolerance:
            raise InvariantViolation(
                "quotient distance depends on the representative", "pseudometric_quotient", witness=[a, b]
            )
    reps = [c[0] for c in classes]
    try:
        quotient = FiniteMetricSpace.from_matrix(d[np.ix_(reps, reps)], [ms.labels[i] for i in reps], atol=ms.atol)
    except MetricAxiomError as e:
        raise InvariantViolation("quotient is not a metric", "pseudometric_quotient", details={"cause": str(e)}) from e
    identities = []
    for name, (a_pts, b_pts) in (faces or {}).items():
        original = space.set_distance(a_pts, b_pts)
        projected = quotient.set_distance({projection[i] for i in a_pts}, {projection[i] for i in b_pts})
        if abs(original - projected) > tolerance:
            raise InvariantViolation(
                "face distance changed under the quotient", "pseudometric_quotient", witness=name
            )
        identities.append(FaceIdentity(name=name, original=original, quotient=projected))
    logging.debug(f"pseudometric_quotient: {m} points -> {len(classes)} classes")
    return QuotientResult(space=quotient, projection=projection, classes=classes, face_identities=identities)
