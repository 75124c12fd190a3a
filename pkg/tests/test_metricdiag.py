import math

import numpy as np
import pytest

from dartfx.lengthvolume.content import FiniteMetricSpace, identity_image
from dartfx.lengthvolume.exceptions import InvariantViolation, ParameterError
from dartfx.lengthvolume.generators import circle, snowflaked_line, thin_neck
from dartfx.lengthvolume.metricdiag import (
    Property,
    annulus,
    check_comparison,
    check_fat_square,
    check_llc,
    closed_ball,
    covering_growth,
    cross_check_alc,
    delta_graph,
    delta_path_length,
    doubling_estimate,
    open_ball,
    path_exponent,
    snowflake,
)


@pytest.fixture(scope="module")
def line_101() -> FiniteMetricSpace:
    return snowflaked_line(101)


def test_balls(line_101: FiniteMetricSpace) -> None:
    assert open_ball(line_101, 50, 0.1).sum() == 19
    assert closed_ball(line_101, 50, 0.1).sum() == 21
    assert annulus(line_101, 0, 0.5, 1.0).sum() == 51


def test_delta_paths_on_a_line(line_101: FiniteMetricSpace) -> None:
    assert delta_path_length(line_101, 0, 100, 1 / 100).length == 100
    assert delta_path_length(line_101, 0, 100, 1 / 50).length == 50
    assert delta_path_length(line_101, 0, 100, 1).length == 1
    assert delta_path_length(line_101, 7, 7, 1 / 100).length == 0


def test_unreachable_delta_path() -> None:
    ms = FiniteMetricSpace.from_matrix([[0, 1], [1, 0]])
    result = delta_path_length(ms, 0, 1, 0.5)
    assert not result.reachable
    assert result.lower_bound == 2
    with pytest.raises(ParameterError):
        delta_graph(ms, 0)


@pytest.mark.parametrize("scale", [1 / 25, 1 / 50, 1 / 100])
def test_snowflaked_line_path_exponent(scale: float) -> None:
    ms = snowflaked_line(101, alpha=0.5)
    exponent = path_exponent(ms, 0, 100, scale**0.5)
    assert exponent is not None
    assert 1.9 <= exponent <= 2.1


def test_doubling(line_101: FiniteMetricSpace) -> None:
    report = doubling_estimate(line_101)
    assert 2 <= report.doubling <= 3
    single = FiniteMetricSpace.from_matrix([[0]])
    assert doubling_estimate(single).doubling == 1


def test_covering_growth(line_101: FiniteMetricSpace) -> None:
    report = covering_growth(line_101, [(0.5, 0.05), (0.2, 0.1)], exponent=1)
    assert [row.count for row in report.rows] == [11, 3]
    assert report.constant == pytest.approx(1.5)
    with pytest.raises(ParameterError):
        covering_growth(line_101, [(0.1, 0.2)], exponent=1)


@pytest.mark.parametrize("which", ["LLC1", "LLC2", "ALC"])
def test_circle_is_connected_at_all_scales(which: Property) -> None:
    ms = circle(360)
    report = check_llc(ms, which, 3, 2 * math.pi / 360, radii=[math.pi / 4, math.pi / 2], sample_budget=24)
    assert report.verdict == "pass"


def test_thin_neck_fails_annular_connectedness() -> None:
    ms = thin_neck(5, 10)
    centre = ms.labels.index("5,0")
    report = check_llc(ms, "ALC", 2, 1, radii=[6], centres=[centre])
    assert report.verdict == "fail"
    witness = report.failures[0].witness
    assert witness is not None
    a, b = witness
    assert ms.coords is not None
    assert ms.coords[a][0] < 5 < ms.coords[b][0]


def test_lambda_below_one() -> None:
    with pytest.raises(ParameterError):
        check_llc(circle(12), "LLC1", 0.5, 1)


def test_cross_check_on_the_circle() -> None:
    result = cross_check_alc(circle(120), 3, 2 * math.pi / 120, radii=[math.pi / 2])
    assert result.alc.verdict == "pass"
    assert result.llc1 is not None and result.llc2 is not None
    assert result.consistent


def test_snowflake_and_comparison(line_101: FiniteMetricSpace) -> None:
    rooted = snowflake(line_101, 0.5)
    assert rooted.distance(0, 25) == pytest.approx(0.5)
    report = check_comparison(line_101, rooted, 0.5, constant=1.0)
    assert report.constant == pytest.approx(1.0)
    assert report.holds
    assert check_comparison(line_101, rooted, 1.0).constant > 1.0
    with pytest.raises(ParameterError):
        snowflake(line_101, 1.5)


def test_snowflake_of_a_non_metric_fails() -> None:
    ms = FiniteMetricSpace(labels=("a", "b", "c"), matrix=np.array([[0, 1, 3], [1, 0, 1], [3, 1, 0]], dtype=float))
    with pytest.raises(InvariantViolation):
        snowflake(ms, 1.0)


def test_fat_square_of_the_unit_square() -> None:
    img = identity_image(8, 2)
    ms = img.space
    centre = ms.labels.index("4,4")
    report = check_fat_square(ms, img, centre, 1.0, 1.0)
    assert report.contained
    assert report.passed
    too_small = check_fat_square(ms, img, centre, 0.25, 1.0)
    assert not too_small.contained
    assert not too_small.passed


def test_connecting_fat_square() -> None:
    img = identity_image(8, 2)
    ms = img.space
    low, high = ms.labels.index("0,4"), ms.labels.index("8,4")
    report = check_fat_square(ms, img, low, None, 2.0, target=high)
    assert report.endpoint_balls is False
    assert not report.passed
