import json
from fractions import Fraction
from math import comb

import pytest

from dartfx.lengthvolume.cover import Face
from dartfx.lengthvolume.exceptions import InputError, ParameterError
from dartfx.lengthvolume.simplex import (
    SimplexCover,
    SimplexSet,
    connects_all_faces,
    load_simplex_cover,
    meets_face,
    sets_intersect,
    simplex_chain_graph,
    simplex_diameter,
    simplex_patch,
    validate_simplex_cover,
    verify_simplex_bounds,
)


def test_set_must_meet_the_simplex() -> None:
    with pytest.raises(ValueError):
        SimplexSet(id=1, lo=("3/4", "3/4"), hi=("1", "1"), weight=1)
    with pytest.raises(ValueError):
        SimplexSet(id=1, lo=("0",), hi=("1",), weight=1)


def test_face_incidence() -> None:
    corner = SimplexSet(id=1, lo=("1/2", "-1", "-1"), hi=("2", "1/2", "1/2"), weight=1)
    assert not meets_face(corner, 0)
    assert meets_face(corner, 1)
    assert meets_face(corner, 2)


def test_intersection() -> None:
    a = SimplexSet(id=1, lo=("-1", "1/2"), hi=("1/2", "2"), weight=1)
    b = SimplexSet(id=2, lo=("1/2", "-1"), hi=("2", "1/2"), weight=1)
    c = SimplexSet(id=3, lo=("1/4", "1/4"), hi=("3/4", "3/4"), weight=1)
    assert not sets_intersect(a, b)
    assert sets_intersect(a, c)
    assert sets_intersect(b, c)


@pytest.mark.parametrize("depth", [1, 2, 5])
def test_interval_patches(depth: int) -> None:
    cover = simplex_patch(1, depth)
    assert cover.size == depth + 1
    assert validate_simplex_cover(cover, 4 * depth) is None
    result = simplex_diameter(cover)
    assert result.diameter == result.pair_bound == depth + 1
    assert result.nodes == 1


def test_triangle_patch() -> None:
    cover = simplex_patch(2, 1)
    assert cover.size == 3
    result = simplex_diameter(cover)
    assert result.diameter == 2
    assert len(result.witness) == 2
    assert result.pair_bound == 1
    report = verify_simplex_bounds(cover)
    assert report.volume_bound == 2
    assert report.count_bound == 3
    assert report.holds


def test_triangle_chain_graph() -> None:
    g = simplex_chain_graph(simplex_patch(2, 1))
    assert g.dimension == 3
    assert g.ids == (1, 2, 3)
    assert g.graph.number_of_edges() == 3
    assert g.faces == {
        Face.low(0): frozenset({0, 1}),
        Face.low(1): frozenset({0, 2}),
        Face.low(2): frozenset({1, 2}),
    }
    assert connects_all_faces(g, {0, 1})
    assert not connects_all_faces(g, {0})


@pytest.mark.parametrize(("n", "depth"), [(2, 1), (2, 2), (2, 3), (2, 4), (3, 1), (3, 2)])
def test_bounds_on_patches(n: int, depth: int) -> None:
    cover = simplex_patch(n, depth)
    assert cover.size == comb(depth + n, n)
    assert validate_simplex_cover(cover, 3 * depth) is None
    report = verify_simplex_bounds(cover)
    assert report.volume_bound_holds
    assert report.count_bound_holds
    assert report.unit_weights


def test_weighted_bound() -> None:
    sets = [
        SimplexSet(id=s.id, lo=s.lo, hi=s.hi, weight=Fraction(1, 2) if s.id % 2 else Fraction(3, 2))
        for s in simplex_patch(2, 2).sets
    ]
    report = verify_simplex_bounds(SimplexCover(dimension=2, sets=tuple(sets)))
    assert not report.unit_weights
    assert report.count_bound is None
    assert report.holds


def test_too_many_sets() -> None:
    with pytest.raises(ParameterError):
        simplex_diameter(simplex_patch(2, 5))


def test_disconnected_family() -> None:
    lone = SimplexSet(id=1, lo=("1/4", "1/4"), hi=("3/4", "3/4"), weight=1)
    with pytest.raises(ParameterError):
        simplex_diameter(SimplexCover(dimension=1, sets=(lone,)))


def test_load(tmp_path) -> None:
    path = tmp_path / "patch.json"
    path.write_text(simplex_patch(2, 2).model_dump_json(), encoding="utf-8")
    assert load_simplex_cover(path).size == 6
    path.write_text(json.dumps({"dimension": 2, "sets": []}), encoding="utf-8")
    with pytest.raises(InputError):
        load_simplex_cover(path)
