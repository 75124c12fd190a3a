import json
from fractions import Fraction

import pytest

from dartfx.lengthvolume.content import FiniteMetricSpace, load_metric
from dartfx.lengthvolume.cover import WeightedCover, is_covering, is_spanning, load_cover
from dartfx.lengthvolume.exceptions import InputError, ParameterError
from dartfx.lengthvolume.generators import (
    CircleSpec,
    GridSpec,
    circle,
    generate,
    grid_cover,
    line_cover,
    parse_spec,
    random_boxes,
    thin_neck,
    write_generated,
)
from dartfx.lengthvolume.simplex import SimplexCover, load_simplex_cover


@pytest.mark.parametrize(("j", "n"), [(0, 1), (1, 2), (2, 2), (1, 3)])
def test_grid_cover(j: int, n: int) -> None:
    cover = grid_cover(j, n, Fraction(1, 20))
    assert cover.size == 2 ** (j * n)
    assert cover.volume() == 1
    assert is_covering(cover)
    assert is_spanning(cover) == (j == 0)


def test_line_cover_needs_one_weight_per_interval() -> None:
    with pytest.raises(ParameterError):
        line_cover([(Fraction(-1), Fraction(2))], [])


@pytest.mark.parametrize(("count", "n"), [(1, 2), (3, 2), (4, 2), (40, 2), (9, 3)])
def test_random_boxes_cover_the_cube(count: int, n: int) -> None:
    cover = random_boxes(count, n, 17)
    assert cover.size == count
    assert is_covering(cover)
    assert all(Fraction(1, 16) <= w <= 1 and (w * 16).denominator == 1 for s in cover.sets for w in s.weights)
    if count >= 2**n:
        assert not is_spanning(cover)


def test_random_boxes_are_deterministic() -> None:
    assert random_boxes(20, 2, 5) == random_boxes(20, 2, 5)
    assert random_boxes(20, 2, 5) != random_boxes(20, 2, 6)


def test_random_boxes_grid_limit() -> None:
    with pytest.raises(ParameterError):
        random_boxes(4097, 1, 0)


def test_circle_metric() -> None:
    ms = circle(8)
    assert ms.size == 8
    assert ms.distance(0, 4) == pytest.approx(3.141592653589793)
    assert ms.distance(1, 7) == pytest.approx(3.141592653589793 / 2)


def test_thin_neck_shape() -> None:
    ms = thin_neck(3, 4)
    assert ms.size == 3 * 3 * 2 + 3
    assert "2,0" in ms.labels
    assert ms.norm == "l2"


def test_parse_spec() -> None:
    assert isinstance(parse_spec({"kind": "grid", "j": 2, "n": 2}), GridSpec)
    spec = parse_spec({"kind": "circle", "points": 12})
    assert spec == CircleSpec(points=12)
    with pytest.raises(InputError):
        parse_spec({"kind": "grid", "j": 2, "n": 2, "overlap": "1/2"})
    with pytest.raises(InputError):
        parse_spec({"kind": "torus"})


def test_generate_dispatch() -> None:
    assert isinstance(generate(parse_spec({"kind": "spanning_demo", "n": 2})), WeightedCover)
    assert isinstance(generate(parse_spec({"kind": "simplex_patch", "n": 2, "depth": 2})), SimplexCover)
    assert isinstance(generate(parse_spec({"kind": "snowflaked_line", "points": 5, "alpha": "1/2"})), FiniteMetricSpace)
    line = generate(parse_spec({"kind": "line", "intervals": [["-1", "3/5"], ["2/5", "2"]], "weights": [1, 2]}))
    assert isinstance(line, WeightedCover)
    assert line.volume() == 3


def test_written_files_load_back(tmp_path) -> None:
    cover_path = write_generated(random_boxes(6, 2, 1), tmp_path / "cover.json")
    assert load_cover(cover_path) == random_boxes(6, 2, 1)
    patch = generate(parse_spec({"kind": "simplex_patch", "n": 1, "depth": 3}))
    simplex_path = write_generated(patch, tmp_path / "s.json")
    assert load_simplex_cover(simplex_path).size == 4
    metric_path = write_generated(circle(6), tmp_path / "circle.json")
    assert load_metric(metric_path).size == 6
    assert "matrix" in json.loads(metric_path.read_text(encoding="utf-8"))
