# SPDX-FileCopyrightText: 2024-present kulnor <pascal.heus@gmail.com>
#
# SPDX-License-Identifier: MIT
"""Corpus runner: certifies every file of a directory and aggregates the results."""

import csv
import json
import logging
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from itertools import repeat
from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, Field

from .chains import brute_force_distance, build_chain_graph, chain_distance
from .content import load_metric
from .cover import Face, load_cover_dict
from .derrick import CertifyParameters, verify_lv
from .exceptions import InputError, InvariantViolation, LengthVolumeError
from .simplex import SimplexCover, verify_simplex_bounds

Check = Literal["lv", "oracle", "simplex", "metric"]
ALL_CHECKS: tuple[Check, ...] = ("lv", "oracle", "simplex", "metric")
ORACLE_MAX_SETS = 8


class FileResult(BaseModel):
    file: str
    kind: Literal["cover", "simplex", "metric", "unknown"] = "unknown"
    status: Literal["pass", "fail", "error"]
    sets: int | None = None
    dimension: int | None = None
    certificate: str | None = Field(default=None, description="Status of the length-volume certificate")
    slack: str | None = None
    coverage: float | None = Field(default=None, description="Surjectivity evidence coverage")
    resolution: int | None = None
    checks: list[str] = Field(default_factory=list)
    message: str | None = None


class SuiteReport(BaseModel):
    corpus: str
    files: list[FileResult]

    @property
    def passed(self) -> int:
        return sum(1 for f in self.files if f.status == "pass")

    @property
    def failed(self) -> int:
        return sum(1 for f in self.files if f.status == "fail")

    @property
    def errors(self) -> int:
        return sum(1 for f in self.files if f.status == "error")

    @property
    def exit_code(self) -> int:
        if self.failed:
            return 1
        return 2 if self.errors else 0

    def summary(self) -> dict[str, Any]:
        slacks = [float(Fraction(f.slack)) for f in self.files if f.slack is not None]
        return {
            "corpus": self.corpus,
            "total": len(self.files),
            "passed": self.passed,
            "failed": self.failed,
            "errors": self.errors,
            "slack_min": min(slacks, default=None),
            "slack_max": max(slacks, default=None),
            "slack_mean": sum(slacks) / len(slacks) if slacks else None,
        }

    def to_json(self) -> str:
        payload = {"summary": self.summary(), "files": [f.model_dump(exclude_none=True) for f in self.files]}
        return json.dumps(payload, indent=2)


def _classify(data: Any) -> Literal["cover", "simplex", "metric", "unknown"]:
    if not isinstance(data, dict):
        return "unknown"
    if any(key in data for key in ("matrix", "edges", "coords")):
        return "metric"
    sets = data.get("sets")
    if isinstance(sets, list) and sets and isinstance(sets[0], dict):
        return "simplex" if "weight" in sets[0] else "cover"
    return "unknown"


def _oracle(cover: Any) -> None:
    g = build_chain_graph(cover)
    for k in range(cover.dimension):
        endpoints: list[Any] = [Face.high(k), *cover.ids]
        for target in endpoints:
            fast = chain_distance(g, k, Face.low(k), target)
            slow = brute_force_distance(g, k, Face.low(k), target, cover.size)
            if fast.distance != slow.distance:
                raise InvariantViolation(
                    "Dijkstra and exhaustive chain distances differ",
                    "oracle",
                    witness={"axis": k, "target": str(target), "fast": str(fast.distance), "slow": str(slow.distance)},
                )


def run_file(path: Path, checks: Sequence[Check], params: CertifyParameters) -> FileResult:
    """Run the applicable checks on one file; every error is caught and recorded."""
    result = FileResult(file=path.name, status="pass")
    try:
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise InputError(f"cannot read file: {e}", "run_suite") from e
        result.kind = _classify(data)
        if result.kind == "unknown":
            raise InputError("not a cover, simplex cover or metric space", "run_suite")
        if result.kind == "cover":
            cover = load_cover_dict(data)
            result.sets, result.dimension = cover.size, cover.dimension
            if "lv" in checks:
                certificate = verify_lv(cover, params)
                result.certificate, result.slack = certificate.status, str(certificate.slack)
                if certificate.surjectivity_report is not None:
                    result.coverage = certificate.surjectivity_report.coverage
                    result.resolution = certificate.surjectivity_report.resolution
                result.checks.append("lv")
                if certificate.status == "violated" or (certificate.claims and not certificate.claims.holds):
                    result.status = "fail"
            if "oracle" in checks and cover.size <= ORACLE_MAX_SETS:
                _oracle(cover)
                result.checks.append("oracle")
        elif result.kind == "simplex":
            simplex_cover = SimplexCover.model_validate(data)
            result.sets, result.dimension = simplex_cover.size, simplex_cover.dimension
            if "simplex" in checks:
                report = verify_simplex_bounds(simplex_cover, on_violation="report")
                result.checks.append("simplex")
                if not report.holds:
                    result.status = "fail"
        elif "metric" in checks:
            space = load_metric(path)
            result.sets = space.size
            result.checks.append("metric")
    except InvariantViolation as e:
        result.status, result.message = "fail", str(e)
    except (LengthVolumeError, ValueError) as e:
        result.status, result.message = "error", str(e)
    return result


def run_suite(
    corpus: str | Path,
    checks: Sequence[Check] = ALL_CHECKS,
    params: CertifyParameters | None = None,
    workers: int = 1,
) -> SuiteReport:
    """Certify every ``*.json`` file of ``corpus``; results keep file name order."""
    root = Path(corpus)
    if not root.is_dir():
        raise InputError("corpus must be a directory", "run_suite", {"path": str(root)})
    params = params or CertifyParameters(on_violation="report")
    paths = sorted(root.glob("*.json"), key=lambda p: p.name)
    logging.info(f"run_suite: {len(paths)} files in {root}")
    if workers > 1 and len(paths) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            files = list(pool.map(run_file, paths, repeat(list(checks)), repeat(params)))
    else:
        files = [run_file(path, checks, params) for path in paths]
    for f in files:
        if f.status != "pass":
            logging.warning(f"run_suite: {f.file}: {f.status} {f.message or ''}")
    return SuiteReport(corpus=str(root), files=files)


def write_plot_data(report: SuiteReport, path: str | Path) -> None:
    """CSV rows for slack against instance size and coverage against resolution."""
    columns = ["file", "kind", "status", "sets", "dimension", "slack", "coverage", "resolution"]
    with Path(path).open("w", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=columns)
        writer.writeheader()
        for f in report.files:
            row = f.model_dump(include=set(columns))
            writer.writerow({key: "" if row.get(key) is None else row[key] for key in columns})
