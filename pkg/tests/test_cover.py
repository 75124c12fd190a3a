from fractions import Fraction

import pytest

from dartfx.lengthvolume.cover import (
    Face,
    OpenBox,
    WeightedCover,
    box_meets_face,
    boxes_intersect,
    intersecting_pairs,
    is_covering,
    is_spanning,
    load_cover,
    load_cover_dict,
    parse_rational,
    require_covering,
    save_cover,
    spanning_witness,
    validate_cover,
)
from dartfx.lengthvolume.exceptions import InputError


def test_parse_rational() -> None:
    assert parse_rational("3/8") == Fraction(3, 8)
    assert parse_rational(" -1/10 ") == Fraction(-1, 10)
    assert parse_rational(0.1) == Fraction(1, 10)
    assert parse_rational(2) == Fraction(2)
    with pytest.raises(ValueError):
        parse_rational("one half")
    with pytest.raises(ValueError):
        parse_rational(True)


def test_box_rejects_empty_or_outside_intervals() -> None:
    with pytest.raises(ValueError):
        OpenBox(lo=("1/2",), hi=("1/4",))
    with pytest.raises(ValueError):
        OpenBox(lo=("1",), hi=("2",))
    with pytest.raises(ValueError):
        OpenBox(lo=("0", "0"), hi=("1",))


def test_box_contains_boundary_only_when_straddling() -> None:
    box = OpenBox(lo=("-1/10", "0"), hi=("1/2", "1/2"))
    assert box.contains((Fraction(0), Fraction(1, 4)))
    assert not box.contains((Fraction(1, 4), Fraction(0)))
    assert box_meets_face(box, Face.low(0))
    assert not box_meets_face(box, Face.low(1))
    assert not box_meets_face(box, Face.high(0))


def test_face_names() -> None:
    assert str(Face.low(0)) == "F1"
    assert str(Face.high(1)) == "F2'"
    assert Face.low(2).opposite() == Face.high(2)


def test_boxes_intersect_is_strict() -> None:
    a = OpenBox(lo=("-1",), hi=("1/2",))
    b = OpenBox(lo=("1/2",), hi=("2",))
    c = OpenBox(lo=("2/5",), hi=("2",))
    assert not boxes_intersect(a, b)
    assert boxes_intersect(a, c)


def test_single_weight_is_replicated() -> None:
    cover = load_cover_dict({"dimension": 2, "sets": [{"id": 7, "lo": [-1, -1], "hi": [2, 2], "weights": "1/2"}]})
    assert cover.sets[0].weights == (Fraction(1, 2), Fraction(1, 2))
    assert cover.volume() == Fraction(1, 4)


def test_invalid_cover_is_an_input_error() -> None:
    with pytest.raises(InputError):
        load_cover_dict({"dimension": 1, "sets": []})
    with pytest.raises(InputError):
        load_cover_dict({"dimension": 1, "sets": [{"id": 1, "lo": [-1], "hi": [2], "weights": [-1]}]})
    duplicate = {"id": 1, "lo": [-1], "hi": [2], "weights": [1]}
    with pytest.raises(InputError):
        load_cover_dict({"dimension": 1, "sets": [duplicate, duplicate]})


def test_volume_and_lookup(line_cover: WeightedCover) -> None:
    assert line_cover.size == 3
    assert line_cover.ids == [1, 2, 3]
    assert line_cover.volume() == 10
    assert line_cover.by_id(2).weights == (Fraction(5),)
    with pytest.raises(InputError):
        line_cover.index_of(99)


def test_validate_cover_finds_gap() -> None:
    gappy = WeightedCover.from_boxes([(["-1"], ["1/2"]), (["1/2"], ["2"])])
    gap = validate_cover(gappy)
    assert gap == (Fraction(1, 2),)
    with pytest.raises(InputError):
        require_covering(gappy)


def test_validate_cover_accepts_coverings(line_cover: WeightedCover, grid_2x2: WeightedCover) -> None:
    assert is_covering(line_cover)
    assert is_covering(grid_2x2)


def test_validate_cover_two_dimensional_gap() -> None:
    cover = WeightedCover.from_boxes(
        [
            (["-1", "-1"], ["2", "1/2"]),
            (["-1", "1/2"], ["1/2", "2"]),
            (["1/2", "1/2"], ["2", "2"]),
        ]
    )
    gap = validate_cover(cover)
    assert gap is not None
    assert not any(s.contains(gap) for s in cover.sets)


def test_spanning(line_cover: WeightedCover, spanning_box: WeightedCover) -> None:
    assert not is_spanning(line_cover)
    assert is_spanning(spanning_box)
    assert spanning_witness(spanning_box) == (1, 0)


def test_intersecting_pairs(line_cover: WeightedCover, grid_2x2: WeightedCover) -> None:
    assert intersecting_pairs(line_cover) == [(0, 1), (1, 2)]
    assert len(intersecting_pairs(grid_2x2)) == 6


def test_save_and_load(tmp_path, grid_2x2: WeightedCover) -> None:
    path = tmp_path / "grid.json"
    save_cover(grid_2x2, path)
    assert load_cover(path) == grid_2x2


def test_load_cover_missing_file(tmp_path) -> None:
    with pytest.raises(InputError):
        load_cover(tmp_path / "missing.json")
