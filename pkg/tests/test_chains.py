from fractions import Fraction

import pytest

from dartfx.lengthvolume.chains import (
    brute_force_distance,
    build_chain_graph,
    chain_distance,
    chain_graph_from_sets,
    distances_from_face,
    face_distances,
    offsets_to_sets,
    parse_endpoint,
)
from dartfx.lengthvolume.cover import Face, WeightedCover
from dartfx.lengthvolume.exceptions import InputError
from dartfx.lengthvolume.generators import random_boxes


def test_face_to_face_distance(line_cover: WeightedCover) -> None:
    g = build_chain_graph(line_cover)
    result = chain_distance(g, 0, Face.low(0), Face.high(0))
    assert result.distance == 10
    assert result.witness_chain == [1, 2, 3]
    assert face_distances(line_cover) == (Fraction(10),)


def test_face_to_set_distance_stops_at_a_neighbour(line_cover: WeightedCover) -> None:
    g = build_chain_graph(line_cover)
    assert chain_distance(g, 0, Face.low(0), 2).distance == 2
    assert chain_distance(g, 0, Face.low(0), 3).distance == 7
    empty = chain_distance(g, 0, Face.low(0), 1)
    assert empty.distance == 0
    assert empty.witness_chain == []


def test_offsets(line_cover: WeightedCover) -> None:
    g = build_chain_graph(line_cover)
    assert offsets_to_sets(g, 0) == [0, 2, 7]
    assert distances_from_face(g, 0, Face.low(0)) == {0: 2, 1: 7, 2: 10}


def test_grid_distances(grid_2x2: WeightedCover) -> None:
    assert face_distances(grid_2x2) == (Fraction(1), Fraction(1))


def test_unreachable_target() -> None:
    g = chain_graph_from_sets(
        1,
        [1, 2],
        [frozenset({"a"}), frozenset({"b"})],
        [[Fraction(1)], [Fraction(1)]],
        {Face.low(0): frozenset({"a"}), Face.high(0): frozenset({"b"})},
    )
    result = chain_distance(g, 0, Face.low(0), Face.high(0))
    assert not result.reachable


def test_point_set_chains() -> None:
    g = chain_graph_from_sets(
        1,
        [1, 2, 3],
        [frozenset({0, 1}), frozenset({1, 2}), frozenset({2, 3})],
        [[Fraction(1)], [Fraction(4)], [Fraction(2)]],
        {Face.low(0): frozenset({0}), Face.high(0): frozenset({3})},
    )
    assert chain_distance(g, 0, Face.low(0), Face.high(0)).distance == 7


def test_axis_out_of_range(line_cover: WeightedCover) -> None:
    g = build_chain_graph(line_cover)
    with pytest.raises(InputError):
        chain_distance(g, 1, Face.low(0), Face.high(0))


@pytest.mark.parametrize("seed", range(12))
def test_dijkstra_matches_enumeration(seed: int) -> None:
    cover = random_boxes(6, 2, seed)
    g = build_chain_graph(cover)
    for k in range(2):
        for target in [Face.high(k), *cover.ids]:
            fast = chain_distance(g, k, Face.low(k), target)
            slow = brute_force_distance(g, k, Face.low(k), target, cover.size)
            assert fast.distance == slow.distance
            if fast.witness_chain:
                assert g.chain_length([g.position(i) for i in fast.witness_chain], k) == fast.distance


def test_parse_endpoint() -> None:
    assert parse_endpoint("F1") == Face.low(0)
    assert parse_endpoint("F3'") == Face.high(2)
    assert parse_endpoint("12") == 12
    with pytest.raises(InputError):
        parse_endpoint("F0")
    with pytest.raises(InputError):
        parse_endpoint("G1")
