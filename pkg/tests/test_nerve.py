from fractions import Fraction

import pytest

from dartfx.lengthvolume.cover import WeightedCover
from dartfx.lengthvolume.exceptions import InputError, InvariantViolation
from dartfx.lengthvolume.generators import random_boxes
from dartfx.lengthvolume.nerve import (
    BarycentricAddress,
    build_nerve,
    bump,
    common_intersection,
    evaluate_phi,
    locate_in_subdivision,
    reconstruct,
)


def test_line_nerve(line_cover: WeightedCover) -> None:
    nerve = build_nerve(line_cover)
    assert nerve.maximal_simplices == ((1, 2), (2, 3))
    assert nerve.dimension() == 1
    assert nerve.simplex_counts() == {0: 3, 1: 2}
    assert nerve.is_simplex([2, 3])
    assert not nerve.is_simplex([1, 3])


def test_grid_nerve_is_a_tetrahedron(grid_2x2: WeightedCover) -> None:
    nerve = build_nerve(grid_2x2)
    assert nerve.maximal_simplices == ((1, 2, 3, 4),)
    assert nerve.simplex_counts() == {0: 4, 1: 6, 2: 4, 3: 1}


@pytest.mark.parametrize("seed", range(5))
def test_cliques_have_common_points(seed: int) -> None:
    cover = random_boxes(10, 2, seed)
    nerve = build_nerve(cover)
    for simplex in nerve.maximal_simplices:
        assert common_intersection(cover, simplex)


def test_bump_is_distance_to_the_complement(line_cover: WeightedCover) -> None:
    x = (Fraction(7, 20),)
    assert bump(line_cover, 0, x) == Fraction(1, 20)
    assert bump(line_cover, 1, x) == Fraction(1, 20)
    assert bump(line_cover, 2, x) == 0
    assert bump(line_cover, 0, (Fraction(0),)) == Fraction(2, 5)


def test_phi_is_a_partition_of_unity(line_cover: WeightedCover) -> None:
    assert evaluate_phi(line_cover, (Fraction(7, 20),)) == {1: Fraction(1, 2), 2: Fraction(1, 2)}
    assert evaluate_phi(line_cover, (Fraction(1),)) == {3: 1}
    for i in range(21):
        phi = evaluate_phi(line_cover, (Fraction(i, 20),))
        assert sum(phi.values()) == 1
        assert all(v > 0 for v in phi.values())


def test_phi_outside_the_cube(line_cover: WeightedCover) -> None:
    with pytest.raises(InputError):
        evaluate_phi(line_cover, (Fraction(3, 2),))


def test_locate_in_subdivision(line_cover: WeightedCover) -> None:
    nerve = build_nerve(line_cover)
    located = locate_in_subdivision({1: Fraction(1, 2), 2: Fraction(1, 2)}, nerve)
    assert located.address.order == (1, 2)
    assert located.coefficients == (0, 1)
    assert located.point() == {1: Fraction(1, 2), 2: Fraction(1, 2)}


def test_locate_orders_by_decreasing_value() -> None:
    phi = {4: Fraction(1, 6), 2: Fraction(1, 2), 9: Fraction(1, 3)}
    located = locate_in_subdivision(phi)
    assert located.address.order == (2, 9, 4)
    assert sum(located.coefficients) == 1
    assert reconstruct(located.address, located.coefficients) == phi


def test_locate_rejects_non_simplices(line_cover: WeightedCover) -> None:
    nerve = build_nerve(line_cover)
    with pytest.raises(InvariantViolation):
        locate_in_subdivision({1: Fraction(1, 2), 3: Fraction(1, 2)}, nerve)
    with pytest.raises(InputError):
        locate_in_subdivision({1: Fraction(1, 2)})


def test_address_vertices() -> None:
    address = BarycentricAddress(order=(5, 1, 3))
    assert address.vertex(0) == (5,)
    assert address.vertex(2) == (5, 1, 3)
    assert address.simplex == frozenset({1, 3, 5})
