from fractions import Fraction

import pytest

from dartfx.lengthvolume.cover import WeightedCover
from dartfx.lengthvolume.generators import grid_cover


@pytest.fixture
def line_cover() -> WeightedCover:
    """Three overlapping intervals of [0, 1] with weights 2, 5 and 3."""
    return WeightedCover.from_boxes(
        [(["-1/10"], ["2/5"]), (["3/10"], ["7/10"]), (["3/5"], ["11/10"])],
        ["2", "5", "3"],
    )


@pytest.fixture
def grid_2x2() -> WeightedCover:
    """The four quarter squares of the unit square, widened by 1/10, weights 1/2."""
    return grid_cover(1, 2, Fraction(1, 10))


@pytest.fixture
def spanning_box() -> WeightedCover:
    """A single box containing the whole unit square."""
    return WeightedCover.from_boxes([(["-1", "-1"], ["2", "2"])])
