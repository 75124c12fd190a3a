import csv
import json
from collections.abc import Callable
from fractions import Fraction
from pathlib import Path

import pytest

from dartfx.lengthvolume.chains import brute_force_distance, build_chain_graph, chain_distance
from dartfx.lengthvolume.cover import Face, WeightedCover, is_spanning, save_cover
from dartfx.lengthvolume.derrick import CertifyParameters, verify_lv
from dartfx.lengthvolume.exceptions import InputError
from dartfx.lengthvolume.generators import circle, grid_cover, random_boxes, write_generated
from dartfx.lengthvolume.simplex import simplex_patch
from dartfx.lengthvolume.suite import FileResult, SuiteReport, run_file, run_suite, write_plot_data


@pytest.fixture
def corpus(tmp_path: Path, line_cover: WeightedCover) -> Path:
    save_cover(line_cover, tmp_path / "a_line.json")
    write_generated(random_boxes(6, 2, 3), tmp_path / "b_random.json")
    write_generated(simplex_patch(2, 2), tmp_path / "c_simplex.json")
    write_generated(circle(12), tmp_path / "d_circle.json")
    (tmp_path / "notes.txt").write_text("not part of the corpus", encoding="utf-8")
    return tmp_path


def test_run_suite(corpus: Path) -> None:
    report = run_suite(corpus)
    assert [f.file for f in report.files] == ["a_line.json", "b_random.json", "c_simplex.json", "d_circle.json"]
    assert [f.kind for f in report.files] == ["cover", "cover", "simplex", "metric"]
    assert all(f.status == "pass" for f in report.files)
    assert report.files[0].checks == ["lv", "oracle"]
    assert report.files[0].slack == "0"
    assert report.files[0].coverage == 1.0
    assert report.exit_code == 0
    summary = report.summary()
    assert summary["total"] == 4
    assert summary["passed"] == 4
    assert summary["slack_min"] == 0.0


def test_selected_checks(corpus: Path) -> None:
    report = run_suite(corpus, checks=["simplex"])
    assert [f.checks for f in report.files] == [[], [], ["simplex"], []]
    assert report.exit_code == 0


def test_unreadable_files_are_errors(corpus: Path) -> None:
    (corpus / "e_broken.json").write_text("{", encoding="utf-8")
    (corpus / "f_unknown.json").write_text(json.dumps({"kind": "torus"}), encoding="utf-8")
    report = run_suite(corpus, checks=["simplex"])
    broken, unknown = report.files[-2:]
    assert broken.status == unknown.status == "error"
    assert unknown.kind == "unknown"
    assert broken.message is not None
    assert report.errors == 2
    assert report.exit_code == 2


def test_failures_outrank_errors() -> None:
    report = SuiteReport(
        corpus="x",
        files=[FileResult(file="a.json", status="fail"), FileResult(file="b.json", status="error")],
    )
    assert report.exit_code == 1


def test_uncovered_cover_is_an_error(tmp_path: Path) -> None:
    path = tmp_path / "gap.json"
    path.write_text(
        json.dumps({"dimension": 1, "sets": [{"id": 1, "lo": ["-1"], "hi": ["1/2"], "weights": ["1"]}]}),
        encoding="utf-8",
    )
    result = run_file(path, ["lv"], CertifyParameters(on_violation="report"))
    assert result.status == "error"
    assert result.kind == "cover"


def test_corpus_must_be_a_directory(tmp_path: Path) -> None:
    with pytest.raises(InputError):
        run_suite(tmp_path / "missing")


def test_worker_pool_keeps_order(corpus: Path) -> None:
    assert run_suite(corpus, workers=2).files == run_suite(corpus).files


def test_plot_data(corpus: Path, tmp_path: Path) -> None:
    report = run_suite(corpus)
    path = tmp_path / "plot.csv"
    write_plot_data(report, path)
    with path.open(encoding="utf-8") as handle:
        rows = list(csv.DictReader(handle))
    assert list(rows[0]) == ["file", "kind", "status", "sets", "dimension", "slack", "coverage", "resolution"]
    assert len(rows) == 4
    assert rows[0]["sets"] == "3"
    assert rows[3]["slack"] == ""
    assert json.loads(report.to_json())["summary"]["total"] == 4


#
# CORPUS ACCEPTANCE
#
def _plane_corpus() -> list[WeightedCover]:
    return [random_boxes(4 + seed % 13, 2, seed) for seed in range(200)]


def _space_corpus() -> list[WeightedCover]:
    return [random_boxes(8 + seed % 9, 3, 1000 + seed) for seed in range(50)]


@pytest.mark.slow
def test_inequality_on_random_corpora() -> None:
    params = CertifyParameters(certify=False)
    for cover in _plane_corpus() + _space_corpus():
        certificate = verify_lv(cover, params)
        assert certificate.inequality_holds, cover.model_dump_json()
        assert certificate.volume - certificate.product == certificate.slack >= 0


@pytest.mark.slow
@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("j", [1, 2, 3, 4])
def test_grid_covers_are_sharp(j: int, n: int) -> None:
    overlap = Fraction(1, 2 ** (j + 3))
    cover = grid_cover(j, n, overlap)
    certificate = verify_lv(cover, CertifyParameters(certify=False))
    assert certificate.volume == 1
    assert certificate.distances == [1] * n
    assert certificate.product == 1
    assert certificate.slack <= n * overlap * 2**j


@pytest.mark.slow
def test_chain_oracle_on_small_covers() -> None:
    small = [c for c in _plane_corpus() + _space_corpus() if c.size <= 8]
    assert small
    for cover in small:
        g = build_chain_graph(cover)
        for k in range(cover.dimension):
            for target in (Face.high(k), *cover.ids):
                fast = chain_distance(g, k, Face.low(k), target)
                slow = brute_force_distance(g, k, Face.low(k), target, cover.size)
                assert fast.distance == slow.distance


@pytest.mark.slow
@pytest.mark.parametrize(
    ("corpus_of", "samples", "resolution"), [(_plane_corpus, 250, 4), (_space_corpus, 13, 2)], ids=["plane", "space"]
)
def test_claims_and_boundary_on_every_corpus_cover(
    corpus_of: Callable[[], list[WeightedCover]], samples: int, resolution: int
) -> None:
    params = CertifyParameters(samples_per_face=samples, resolution=resolution, on_violation="report")
    for cover in corpus_of():
        certificate = verify_lv(cover, params)
        assert certificate.claims is not None and certificate.claims.holds
        if not is_spanning(cover):
            assert certificate.boundary_report is not None
            assert certificate.boundary_report.samples >= 1000
            assert certificate.boundary_report.passed


@pytest.mark.slow
def test_surjectivity_on_the_plane_corpus() -> None:
    covers = [c for c in _plane_corpus() if not is_spanning(c)][:20]
    assert len(covers) == 20
    for cover in covers:
        certificate = verify_lv(cover, CertifyParameters(resolution=16, samples_per_face=8))
        report = certificate.surjectivity_report
        assert report is not None
        assert report.status == "passed", cover.model_dump_json()
        assert report.coverage == 1.0
