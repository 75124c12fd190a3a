import json
from fractions import Fraction

import numpy as np
import pytest

from dartfx.lengthvolume.content import (
    ContentSearchParameters,
    FiniteMetricSpace,
    ImageSet,
    content_lower_bound,
    content_upper_bound,
    identity_image,
    image_face_distances,
    image_from_dict,
    load_metric,
    metric_from_dict,
    pseudometric_quotient,
    pushforward_cover,
    save_metric,
    weighted_cover_bound,
)
from dartfx.lengthvolume.cover import WeightedCover
from dartfx.lengthvolume.exceptions import InputError, MetricAxiomError
from dartfx.lengthvolume.generators import grid_cover


def test_matrix_space() -> None:
    ms = FiniteMetricSpace.from_matrix([[0, 1, 2], [1, 0, 1], [2, 1, 0]], ["a", "b", "c"])
    assert ms.size == 3
    assert ms.distance(0, 2) == 2.0
    assert ms.diameter([0, 1, 2]) == 2.0
    assert ms.set_distance([0], [1, 2]) == 1.0
    assert ms.restricted([0, 2]).to_matrix().tolist() == [[0.0, 2.0], [2.0, 0.0]]


def test_metric_axioms_are_checked() -> None:
    with pytest.raises(MetricAxiomError):
        FiniteMetricSpace.from_matrix([[0, 1], [2, 0]])
    with pytest.raises(MetricAxiomError):
        FiniteMetricSpace.from_matrix([[0, 0], [0, 0]])
    with pytest.raises(MetricAxiomError):
        FiniteMetricSpace.from_matrix([[0, 1, 5], [1, 0, 1], [5, 1, 0]])
    assert FiniteMetricSpace.from_matrix([[0, 0], [0, 0]], pseudometric=True).size == 2


def test_coordinate_norms() -> None:
    coords = [[0, 0], [3, 4]]
    assert FiniteMetricSpace.from_coords(coords, "l2").distance(0, 1) == pytest.approx(5.0)
    assert FiniteMetricSpace.from_coords(coords, "l1").distance(0, 1) == pytest.approx(7.0)
    assert FiniteMetricSpace.from_coords(coords, "linf").distance(0, 1) == pytest.approx(4.0)


def test_edge_list_completion() -> None:
    ms = metric_from_dict({"points": ["a", "b", "c"], "edges": [["a", "b", "1/2"], ["b", "c", 1]]})
    assert ms.distance(0, 2) == pytest.approx(1.5)
    with pytest.raises(InputError):
        metric_from_dict({"points": ["a", "b", "c"], "edges": [["a", "b", 1]]})
    with pytest.raises(InputError):
        metric_from_dict({"points": ["a"]})


def test_save_and_load(tmp_path) -> None:
    ms = FiniteMetricSpace.from_matrix([[0, 1], [1, 0]], ["p", "q"])
    path = tmp_path / "two.json"
    save_metric(ms, path)
    loaded = load_metric(path)
    assert loaded.labels == ("p", "q")
    assert loaded.distance(0, 1) == 1.0


def test_identity_image_face_distances() -> None:
    img = identity_image(4, 2)
    assert img.space.size == 25
    assert image_face_distances(img) == [1.0, 1.0]
    assert content_lower_bound(img) == 1.0


def test_image_from_dict() -> None:
    ms = FiniteMetricSpace.from_matrix([[0, 1, 2], [1, 0, 1], [2, 1, 0]], ["a", "b", "c"])
    img = image_from_dict({"dimension": 1, "resolution": 2, "table": ["a", "b", "c"]}, ms)
    assert content_lower_bound(img) == 2.0
    with pytest.raises(InputError):
        image_from_dict({"dimension": 1, "resolution": 2, "table": ["a", "b", "z"]}, ms)


def test_two_points_need_no_content() -> None:
    ms = FiniteMetricSpace.from_matrix([[0, 1], [1, 0]])
    result = content_upper_bound(ms, None, ContentSearchParameters(q=1))
    assert result.value == 0.0
    assert result.exhaustive


def test_upper_bound_of_a_segment() -> None:
    ms = FiniteMetricSpace.from_coords(np.linspace(0, 1, 11))
    result = content_upper_bound(ms, None, ContentSearchParameters(q=1, scale_floor=0.1))
    assert result.value <= 1.1 + 1e-9
    assert sum(b.members for b in result.balls) >= ms.size


@pytest.mark.slow
def test_unit_square_content_is_sharp() -> None:
    img = identity_image(64, 2, "linf")
    assert content_lower_bound(img) == 1.0
    params = ContentSearchParameters(q=2, scale_floor=2**-6)
    result = content_upper_bound(img.space, None, params)
    assert result.value <= 1 + 2**-4


def test_pushforward_and_weighted_bound() -> None:
    img = identity_image(8, 2)
    cover: WeightedCover = grid_cover(1, 2, Fraction(1, 10))
    sets = pushforward_cover(img, cover)
    assert len(sets) == 4
    report = weighted_cover_bound(img, sets)
    assert report.inequality_holds
    assert report.distances == [1, 1]
    with pytest.raises(InputError):
        weighted_cover_bound(img, [ImageSet(id=1, members=frozenset({0}), weights=(Fraction(1), Fraction(1)))])


def test_quotient() -> None:
    ms = FiniteMetricSpace.from_matrix(
        [[0, 0, 1], [0, 0, 1], [1, 1, 0]], ["a", "a'", "b"], pseudometric=True
    )
    result = pseudometric_quotient(ms, {"ends": ([0], [2])})
    assert result.space.size == 2
    assert result.space.distance(0, 1) == 1.0
    assert result.projection == [0, 0, 1]
    assert result.classes == [[0, 1], [2]]
    assert result.face_identities[0].quotient == 1.0


def test_metric_file_must_parse(tmp_path) -> None:
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"matrix": [[0, "x"], ["x", 0]]}), encoding="utf-8")
    with pytest.raises(InputError):
        load_metric(path)
