# SPDX-FileCopyrightText: 2024-present kulnor <pascal.heus@gmail.com>
#
# SPDX-License-Identifier: MIT
"""Weighted chain distances between faces and sets.

A chain is a sequence of sets with consecutive members intersecting; its length under axis ``k`` is
the sum of ``w_k`` over all members, endpoints included. Distances are node-weighted shortest paths:
Dijkstra charges a node's weight when the node is entered, and two zero-cost virtual terminals stand
for the source and target endpoints.
"""

import logging
import re
from collections.abc import Hashable, Iterable, Sequence
from fractions import Fraction
from typing import Any

import networkx as nx
from pydantic import BaseModel, ConfigDict, Field

from .cover import ZERO, Face, Rational, WeightedCover, box_meets_face, intersecting_pairs
from .exceptions import InputError, InvariantViolation

SOURCE = "__source__"
TARGET = "__target__"

Endpoint = Face | int
"""A face, or a set id."""


class ChainGraph(BaseModel):
    """Intersection graph of a family of sets with per-axis node weights and face incidences.

    Nodes are set positions ``0..M-1``; ``ids`` maps them back to set ids. ``faces`` holds, for
    every face, the positions of the sets meeting it.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    dimension: int
    ids: tuple[int, ...]
    weights: tuple[tuple[Fraction, ...], ...]
    graph: nx.Graph = Field(exclude=True)
    faces: dict[Face, frozenset[int]]

    @property
    def size(self) -> int:
        return len(self.ids)

    def position(self, set_id: int) -> int:
        try:
            return self.ids.index(set_id)
        except ValueError as e:
            raise InputError(f"unknown set id {set_id}", "chain_distance") from e

    def closed_neighbourhood(self, node: int) -> set[int]:
        return {node, *self.graph.neighbors(node)}

    def meets(self, node: int, face: Face) -> bool:
        return node in self.faces[face]

    def is_chain(self, chain: Sequence[int]) -> bool:
        """True iff the positions in ``chain`` form a chain (consecutive members adjacent)."""
        return bool(chain) and all(self.graph.has_edge(a, b) for a, b in zip(chain, chain[1:], strict=False))

    def chain_length(self, chain: Iterable[int], axis: int) -> Fraction:
        return sum((self.weights[i][axis] for i in chain), ZERO)


def build_chain_graph(cover: WeightedCover) -> ChainGraph:
    """Chain graph of a box cover."""
    graph = nx.Graph()
    graph.add_nodes_from(range(cover.size))
    graph.add_edges_from(intersecting_pairs(cover))
    faces = {}
    for k in range(cover.dimension):
        for face in (Face.low(k), Face.high(k)):
            faces[face] = frozenset(i for i, s in enumerate(cover.sets) if box_meets_face(s, face))
    logging.debug(f"chain graph: {graph.number_of_nodes()} sets, {graph.number_of_edges()} intersecting pairs")
    return ChainGraph(
        dimension=cover.dimension,
        ids=tuple(cover.ids),
        weights=tuple(tuple(s.weights) for s in cover.sets),
        graph=graph,
        faces=faces,
    )


def chain_graph_from_sets(
    dimension: int,
    ids: Sequence[int],
    members: Sequence[frozenset[Hashable]],
    weights: Sequence[Sequence[Fraction]],
    face_points: dict[Face, frozenset[Hashable]],
) -> ChainGraph:
    """Chain graph of a family of finite point sets.

    Two sets intersect when they share a point; a set meets a face when it contains one of the
    face's points.
    """
    if not (len(ids) == len(members) == len(weights)):
        raise InputError("ids, members and weights must have the same length", "chain_graph_from_sets")
    graph = nx.Graph()
    graph.add_nodes_from(range(len(ids)))
    graph.add_edges_from(
        (i, j) for i in range(len(members)) for j in range(i + 1, len(members)) if members[i] & members[j]
    )
    faces = {face: frozenset(i for i, m in enumerate(members) if m & points) for face, points in face_points.items()}
    return ChainGraph(
        dimension=dimension,
        ids=tuple(ids),
        weights=tuple(tuple(w) for w in weights),
        graph=graph,
        faces=faces,
    )


class ChainDistance(BaseModel):
    """Result of a distance query; ``distance`` is ``None`` when no admissible chain exists."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    distance: Rational | None
    witness_chain: list[int] = Field(default_factory=list, description="Set ids of an optimal chain")

    @property
    def reachable(self) -> bool:
        return self.distance is not None


def _terminals(g: ChainGraph, endpoint: Endpoint) -> set[int]:
    if isinstance(endpoint, Face):
        if endpoint not in g.faces:
            raise InputError(f"face {endpoint} is not part of the graph", "chain_distance")
        return set(g.faces[endpoint])
    return g.closed_neighbourhood(g.position(endpoint))


def _terminal_graph(g: ChainGraph, sources: set[int], targets: set[int]) -> nx.Graph:
    h = g.graph.copy()
    h.add_edges_from((SOURCE, s) for s in sources)
    h.add_edges_from((t, TARGET) for t in targets)
    return h


def _is_empty_chain(g: ChainGraph, source: Endpoint, target: Endpoint) -> bool:
    return isinstance(source, Face) and not isinstance(target, Face) and g.meets(g.position(target), source)


def _check_axis(g: ChainGraph, axis: int) -> None:
    if not 0 <= axis < g.dimension:
        raise InputError(f"axis {axis} out of range", "chain_distance", {"dimension": g.dimension})


def entry_cost(g: ChainGraph, axis: int) -> Any:
    """Edge-weight callback for networkx charging the weight of the node being entered."""
    weights = g.weights

    def cost(_u: Any, v: Any, _data: dict[str, Any]) -> Fraction:
        return weights[v][axis] if isinstance(v, int) else ZERO

    return cost


def chain_distance(g: ChainGraph, axis: int, source: Endpoint, target: Endpoint) -> ChainDistance:
    """Minimal ``w_axis`` length of a chain connecting ``source`` and ``target``.

    A set id endpoint is connected by any set intersecting it (the set itself included), so the
    endpoint set does not have to be part of the chain. When ``source`` is a face already met by the
    target set the result is 0 with an empty chain.
    """
    _check_axis(g, axis)
    sources, targets = _terminals(g, source), _terminals(g, target)
    if _is_empty_chain(g, source, target):
        return ChainDistance(distance=ZERO, witness_chain=[])
    h = _terminal_graph(g, sources, targets)
    try:
        length, path = nx.single_source_dijkstra(h, SOURCE, target=TARGET, weight=entry_cost(g, axis))
    except nx.NetworkXNoPath:
        logging.warning(f"chain_distance: no chain connects {source} and {target}")
        return ChainDistance(distance=None)
    chain = [g.ids[node] for node in path[1:-1]]
    return ChainDistance(distance=Fraction(length), witness_chain=chain)


def brute_force_distance(g: ChainGraph, axis: int, source: Endpoint, target: Endpoint, max_len: int) -> ChainDistance:
    """Minimum over all simple chains with at most ``max_len`` sets.

    Weights are non-negative, so dropping a repeated stretch never lengthens a chain and simple
    chains reach the optimum.
    """
    _check_axis(g, axis)
    if max_len < 1:
        raise InputError("max_len must be at least 1", "brute_force_distance")
    sources, targets = _terminals(g, source), _terminals(g, target)
    if _is_empty_chain(g, source, target):
        return ChainDistance(distance=ZERO, witness_chain=[])
    h = _terminal_graph(g, sources, targets)
    best: Fraction | None = None
    best_chain: list[int] = []
    for path in nx.all_simple_paths(h, SOURCE, TARGET, cutoff=max_len + 1):
        chain = path[1:-1]
        length = g.chain_length(chain, axis)
        if best is None or length < best:
            best, best_chain = length, chain
    return ChainDistance(distance=best, witness_chain=[g.ids[i] for i in best_chain])


def distances_from_face(g: ChainGraph, axis: int, face: Face) -> dict[int, Fraction]:
    """Length of the shortest chain from ``face`` ending in each reachable set (that set included)."""
    _check_axis(g, axis)
    h = _terminal_graph(g, set(g.faces[face]), set())
    lengths = nx.single_source_dijkstra_path_length(h, SOURCE, weight=entry_cost(g, axis))
    return {node: Fraction(value) for node, value in lengths.items() if isinstance(node, int)}


def offsets_to_sets(g: ChainGraph, axis: int) -> list[Fraction]:
    """``d_axis(i)`` for every set position: 0 if the set meets the low face, else the face-to-set distance.

    One multi-source run replaces a query per set: the distance to set ``i`` is the best chain
    ending in a neighbour of ``i``.
    """
    low = Face.low(axis)
    reach = distances_from_face(g, axis, low)
    offsets = []
    for i in range(g.size):
        if g.meets(i, low):
            offsets.append(ZERO)
            continue
        candidates = [reach[j] for j in g.closed_neighbourhood(i) if j in reach]
        if not candidates:
            raise InvariantViolation(
                "set unreachable from a face of a covering family", "offsets_to_sets", witness=g.ids[i]
            )
        offsets.append(min(candidates))
    return offsets


def face_distances(cover: WeightedCover, g: ChainGraph | None = None) -> tuple[Fraction, ...]:
    """``d_k = dist_{w_k}(F_k, F_k')`` for every axis."""
    if g is None:
        g = build_chain_graph(cover)
    distances = []
    for k in range(cover.dimension):
        result = chain_distance(g, k, Face.low(k), Face.high(k))
        if result.distance is None:
            raise InputError("opposite faces are not connected; the sets do not cover the cube", "face_distances")
        distances.append(result.distance)
    return tuple(distances)


_FACE_PATTERN = re.compile(r"^F(\d+)('?)$")


def parse_endpoint(text: str) -> Endpoint:
    """Parse ``F2`` / ``F2'`` (axes counted from 1) or a set id."""
    match = _FACE_PATTERN.match(text.strip())
    if match:
        axis = int(match.group(1)) - 1
        if axis < 0:
            raise InputError(f"invalid face {text!r}", "parse_endpoint")
        return Face.high(axis) if match.group(2) else Face.low(axis)
    try:
        return int(text)
    except ValueError as e:
        raise InputError(f"endpoint must be a face like F1/F1' or a set id, got {text!r}", "parse_endpoint") from e
