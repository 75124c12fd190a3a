# SPDX-FileCopyrightText: 2024-present kulnor <pascal.heus@gmail.com>
#
# SPDX-License-Identifier: MIT
"""Nerve of a box cover, barycentric subdivision addressing and the partition of unity.

For boxes, a family has a common point iff it intersects pairwise (intervals satisfy Helly's
property axis by axis), so the simplices of the nerve are exactly the cliques of the intersection
graph. The barycentric subdivision is never built; a point of the nerve is located in it on demand.
"""

import logging
from collections import Counter
from collections.abc import Iterable, Mapping
from fractions import Fraction
from itertools import combinations

import networkx as nx
from pydantic import BaseModel, ConfigDict, Field

from .cover import ONE, ZERO, Point, Rational, WeightedCover, intersecting_pairs
from .exceptions import InputError, InvariantViolation

BarycentricVector = dict[int, Fraction]
"""Sparse vector over set ids; entries not present are zero."""


class NerveComplex(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    ids: tuple[int, ...]
    graph: nx.Graph = Field(exclude=True, description="Intersection graph on set ids")
    maximal_simplices: tuple[tuple[int, ...], ...] = Field(description="Maximal cliques, each sorted by id")

    def is_simplex(self, simplex: Iterable[int]) -> bool:
        members = list(simplex)
        if not members or any(i not in self.graph for i in members):
            return False
        return all(self.graph.has_edge(a, b) for a, b in combinations(members, 2))

    def dimension(self) -> int:
        return max(len(s) for s in self.maximal_simplices) - 1

    def simplex_counts(self) -> dict[int, int]:
        """Number of simplices per dimension."""
        counts = Counter(len(clique) - 1 for clique in nx.enumerate_all_cliques(self.graph))
        return dict(sorted(counts.items()))


def build_nerve(cover: WeightedCover) -> NerveComplex:
    graph = nx.Graph()
    graph.add_nodes_from(cover.ids)
    ids = cover.ids
    graph.add_edges_from((ids[i], ids[j]) for i, j in intersecting_pairs(cover))
    maximal = sorted(tuple(sorted(clique)) for clique in nx.find_cliques(graph))
    logging.debug(f"nerve: {len(ids)} vertices, {len(maximal)} maximal simplices")
    return NerveComplex(ids=tuple(ids), graph=graph, maximal_simplices=tuple(maximal))


def common_intersection(cover: WeightedCover, simplex: Iterable[int]) -> bool:
    """Direct test that the boxes with the given ids share a point (no pairwise shortcut)."""
    boxes = [cover.by_id(i) for i in simplex]
    if not boxes:
        return False
    for k in range(cover.dimension):
        lo = max([ZERO, *(b.lo[k] for b in boxes)])
        hi = min([ONE, *(b.hi[k] for b in boxes)])
        if not lo < hi:
            return False
    return True


#
# PARTITION OF UNITY
#
def bump(cover: WeightedCover, index: int, x: Point) -> Fraction:
    """``f_i(x)``: L-infinity distance from ``x`` to the part of the cube outside set ``index``, capped at 1.

    A side of the box that reaches past the cube boundary has no complement on that side and is skipped.
    """
    s = cover.sets[index]
    if not s.contains(x):
        return ZERO
    value = ONE
    for k, c in enumerate(x):
        if not s.straddles_low(k):
            value = min(value, c - s.lo[k])
        if not s.straddles_high(k):
            value = min(value, s.hi[k] - c)
    return max(ZERO, value)


def evaluate_phi(cover: WeightedCover, x: Point) -> BarycentricVector:
    """``phi(x)`` as a sparse vector over set ids with exactly rational entries summing to 1."""
    if len(x) != cover.dimension or any(not ZERO <= c <= ONE for c in x):
        raise InputError("point must lie in the unit cube", "evaluate_phi", {"point": [str(c) for c in x]})
    bumps = {s.id: bump(cover, i, x) for i, s in enumerate(cover.sets)}
    total = sum(bumps.values(), ZERO)
    if total == ZERO:
        raise InvariantViolation("no set contains the point", "evaluate_phi", witness=[str(c) for c in x])
    return {set_id: value / total for set_id, value in bumps.items() if value > ZERO}


class BarycentricAddress(BaseModel):
    """A simplex of the nerve with an ordering of its vertices.

    Vertex ``j`` of the addressed subdivision simplex is the barycentre of the first ``j + 1`` sets
    in ``order``.
    """

    model_config = ConfigDict(frozen=True)

    order: tuple[int, ...]

    @property
    def simplex(self) -> frozenset[int]:
        return frozenset(self.order)

    def vertex(self, j: int) -> tuple[int, ...]:
        return self.order[: j + 1]


class SubdivisionPoint(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    address: BarycentricAddress
    coefficients: tuple[Rational, ...] = Field(description="mu_j, weights of the subdivision vertices")

    def point(self) -> BarycentricVector:
        return reconstruct(self.address, self.coefficients)


def barycentre(vertices: Iterable[int]) -> BarycentricVector:
    members = list(vertices)
    return {i: Fraction(1, len(members)) for i in members}


def reconstruct(address: BarycentricAddress, coefficients: Iterable[Fraction]) -> BarycentricVector:
    """``sum_j mu_j p_j`` as a sparse vector, zero entries dropped."""
    result: dict[int, Fraction] = {}
    for j, mu in enumerate(coefficients):
        for i, value in barycentre(address.vertex(j)).items():
            result[i] = result.get(i, ZERO) + mu * value
    return {i: v for i, v in result.items() if v != ZERO}


def _ordered_support(phi: Mapping[int, Fraction]) -> list[int]:
    return sorted((i for i, v in phi.items() if v > ZERO), key=lambda i: (-phi[i], i))


def coefficients_for_order(phi: Mapping[int, Fraction], order: list[int]) -> tuple[Fraction, ...]:
    """``mu_j = (j + 1)(lambda_j - lambda_{j+1})`` along ``order``, with ``lambda_{m+1} = 0``."""
    values = [phi[i] for i in order] + [ZERO]
    return tuple((j + 1) * (values[j] - values[j + 1]) for j in range(len(order)))


def locate_in_subdivision(phi: Mapping[int, Fraction], nerve: NerveComplex | None = None) -> SubdivisionPoint:
    """Address of the subdivision simplex holding ``phi`` and the coefficients of ``phi`` in it.

    The support is ordered by decreasing value, ties by increasing id.
    """
    if any(v < ZERO for v in phi.values()) or sum(phi.values(), ZERO) != ONE:
        raise InputError("not a barycentric vector (entries must be >= 0 and sum to 1)", "locate_in_subdivision")
    order = _ordered_support(phi)
    if nerve is not None and not nerve.is_simplex(order):
        raise InvariantViolation("support is not a simplex of the nerve", "locate_in_subdivision", witness=order)
    address = BarycentricAddress(order=tuple(order))
    return SubdivisionPoint(address=address, coefficients=coefficients_for_order(phi, order))
