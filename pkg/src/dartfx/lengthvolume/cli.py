import json
import logging
from collections.abc import Iterator
from contextlib import contextmanager
from enum import StrEnum
from pathlib import Path
from typing import Annotated, Any

import typer
from pydantic import BaseModel, ValidationError
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from dartfx.lengthvolume.chains import brute_force_distance, build_chain_graph, chain_distance, parse_endpoint
from dartfx.lengthvolume.content import (
    ContentSearchParameters,
    CubeImage,
    FiniteMetricSpace,
    content_lower_bound,
    content_upper_bound,
    identity_image,
    image_face_distances,
    load_image,
    metric_from_dict,
    pseudometric_quotient,
    save_metric,
)
from dartfx.lengthvolume.cover import load_cover, parse_rational, require_covering, save_cover
from dartfx.lengthvolume.derrick import (
    CertifyParameters,
    boundary_check,
    build_proxies,
    evaluate_f,
    surjectivity_sample,
    verify_lv,
)
from dartfx.lengthvolume.exceptions import InputError, InvariantViolation
from dartfx.lengthvolume.generators import generate, parse_spec, write_generated
from dartfx.lengthvolume.metricdiag import (
    Property,
    check_comparison,
    check_fat_square,
    check_llc,
    covering_growth,
    cross_check_alc,
    delta_path_length,
    doubling_estimate,
    snowflake,
)
from dartfx.lengthvolume.nerve import build_nerve, evaluate_phi, locate_in_subdivision
from dartfx.lengthvolume.reduction import reduce_spanning, spanning_limit_check
from dartfx.lengthvolume.simplex import load_simplex_cover, validate_simplex_cover, verify_simplex_bounds
from dartfx.lengthvolume.suite import ALL_CHECKS, Check, run_suite, write_plot_data

app = typer.Typer(
    name="dartfx-lv",
    help="Exact verification of the discrete length-volume inequality and related metric-space checks.",
    add_completion=False,
)
content_app = typer.Typer(help="Hausdorff content bounds of sampled cube images.", add_completion=False)
diag_app = typer.Typer(help="Doubling, connectivity and discrete path diagnostics.", add_completion=False)
app.add_typer(content_app, name="content")
app.add_typer(diag_app, name="diag")
console = Console()


class OutputFormat(StrEnum):
    TABLE = "table"
    JSON = "json"


class LLCKind(StrEnum):
    LLC1 = "LLC1"
    LLC2 = "LLC2"


@app.callback()
def main(
    log_level: Annotated[
        str, typer.Option("--log-level", help="Logging level (DEBUG, INFO, WARNING, ERROR)")
    ] = "WARNING",
) -> None:
    logging.basicConfig(
        level=log_level.upper(), format="%(message)s", handlers=[RichHandler(console=Console(stderr=True))], force=True
    )


@contextmanager
def reporting() -> Iterator[None]:
    """Map library errors to exit codes: 1 for failed theorem checks, 2 for bad input."""
    try:
        yield
    except InvariantViolation as e:
        console.print(f"[bold red]Error:[/] {e}")
        raise typer.Exit(code=1) from e
    except InputError as e:
        console.print(f"[bold red]Error:[/] {e}")
        raise typer.Exit(code=2) from e
    except ValidationError as e:
        first = e.errors()[0]
        location = ".".join(str(part) for part in first.get("loc", ()))
        console.print(f"[bold red]Error:[/] invalid parameter {location}: {first.get('msg')}")
        raise typer.Exit(code=2) from e


def emit(result: BaseModel | dict[str, Any] | list[Any]) -> None:
    if isinstance(result, BaseModel):
        console.print_json(result.model_dump_json())
    else:
        console.print_json(data=result)


def rational(text: str) -> Any:
    try:
        return parse_rational(text)
    except ValueError as e:
        raise InputError(str(e), "parse") from e


def number(text: str) -> float:
    return float(rational(text))


def load_space(path: Path, pseudometric: bool = False) -> FiniteMetricSpace:
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise InputError(f"cannot read metric file: {e}", "load_metric", {"path": str(path)}) from e
    if pseudometric:
        data["pseudometric"] = True
    return metric_from_dict(data)


def point_index(ms: FiniteMetricSpace, label: str) -> int:
    try:
        return ms.labels.index(label)
    except ValueError as e:
        raise InputError(f"unknown point {label!r}", "point_index") from e


def cube_image(metric: Path | None, image: Path | None, identity: int | None, dimension: int, norm: str) -> CubeImage:
    if identity is not None:
        return identity_image(identity, dimension, norm)  # type: ignore[arg-type]
    if metric is None or image is None:
        raise InputError("give --identity or both --metric and --image", "cube_image")
    return load_image(image, load_space(metric))


MetricOption = Annotated[Path, typer.Option("--metric", "-m", help="Metric space JSON file")]
ImageOption = Annotated[Path | None, typer.Option("--image", help="Cube image JSON file (grid -> point labels)")]
IdentityOption = Annotated[
    int | None, typer.Option("--identity", help="Use the identity image of the cube at this grid resolution")
]
DimensionOption = Annotated[int, typer.Option("--dimension", "-n", help="Cube dimension for --identity")]
NormOption = Annotated[str, typer.Option("--norm", help="Norm for --identity (linf, l2, l1)")]
GENERATOR_HELP = "Generator: grid, line, random_boxes, spanning_demo, simplex_patch, circle, snowflaked_line, thin_neck"


#
# COVERS
#
@app.command()
def gen(
    kind: Annotated[str, typer.Argument(help=GENERATOR_HELP)],
    out: Annotated[Path, typer.Option("--out", "-o", help="Output JSON file")],
    params: Annotated[
        list[str] | None, typer.Option("--set", "-s", help="Generator parameter key=value (values may be JSON)")
    ] = None,
) -> None:
    """Generate a cover, simplex cover or metric space."""
    with reporting():
        data: dict[str, Any] = {"kind": kind}
        for item in params or []:
            key, sep, value = item.partition("=")
            if not sep:
                raise InputError(f"expected key=value, got {item!r}", "gen")
            try:
                data[key.strip()] = json.loads(value)
            except json.JSONDecodeError:
                data[key.strip()] = value
        path = write_generated(generate(parse_spec(data)), out)
    console.print(f"[bold green]Wrote[/] {path}")


@app.command("verify-lv")
def verify_lv_command(
    cover_file: Annotated[Path, typer.Argument(help="Cover JSON file")],
    certify: Annotated[bool, typer.Option("--certify/--no-certify", help="Run map certificates")] = True,
    resolution: Annotated[int, typer.Option("--resolution", "-r", help="Surjectivity grid resolution")] = 16,
    samples: Annotated[int, typer.Option("--samples", help="Face samples per axis (grid pitch 1/samples)")] = 32,
    format: Annotated[OutputFormat, typer.Option("--format", "-f", help="Output format")] = OutputFormat.JSON,
) -> None:
    """Verify sum_i prod_k w_k(i) >= prod_k d_k exactly."""
    with reporting():
        cover = load_cover(cover_file)
        params = CertifyParameters(certify=certify, resolution=resolution, samples_per_face=samples)
        certificate = verify_lv(cover, params)

    if format == OutputFormat.JSON:
        emit(certificate)
    else:
        table = Table(title=f"Length-volume certificate for {cover_file.name}")
        table.add_column("Quantity", style="cyan")
        table.add_column("Value", style="magenta")
        table.add_row("sets", str(certificate.sets))
        table.add_row("volume", str(certificate.volume))
        for k, d in enumerate(certificate.distances, start=1):
            table.add_row(f"d{k}", str(d))
        table.add_row("product", str(certificate.product))
        table.add_row("slack", str(certificate.slack))
        table.add_row("status", certificate.status)
        console.print(table)
    if certificate.status == "violated":
        raise typer.Exit(code=1)


@app.command("chain-dist")
def chain_dist(
    cover_file: Annotated[Path, typer.Argument(help="Cover JSON file")],
    axis: Annotated[int, typer.Option("--axis", "-k", help="Weight axis, counted from 1")],
    source: Annotated[str, typer.Option("--source", help="Face (F1, F1') or set id")],
    target: Annotated[str, typer.Option("--target", help="Face (F1, F1') or set id")],
    brute_force: Annotated[bool, typer.Option("--brute-force", help="Also enumerate all simple chains")] = False,
) -> None:
    """Weighted chain distance between two faces or sets."""
    with reporting():
        cover = load_cover(cover_file)
        g = build_chain_graph(cover)
        src, dst = parse_endpoint(source), parse_endpoint(target)
        result = chain_distance(g, axis - 1, src, dst)
        payload: dict[str, Any] = json.loads(result.model_dump_json())
        if brute_force:
            slow = brute_force_distance(g, axis - 1, src, dst, cover.size)
            payload["brute_force"] = None if slow.distance is None else str(slow.distance)
            if slow.distance != result.distance:
                raise InvariantViolation("chain distance disagrees with enumeration", "chain-dist", payload)
    emit(payload)


@app.command()
def nerve(
    cover_file: Annotated[Path, typer.Argument(help="Cover JSON file")],
    point: Annotated[
        str | None, typer.Option("--point", help="Comma separated cube point: evaluate phi and locate it")
    ] = None,
) -> None:
    """Nerve statistics and, optionally, the partition of unity at a point."""
    with reporting():
        cover = load_cover(cover_file)
        require_covering(cover)
        complex_ = build_nerve(cover)
        payload: dict[str, Any] = {
            "vertices": len(complex_.ids),
            "dimension": complex_.dimension(),
            "simplex_counts": complex_.simplex_counts(),
            "maximal_simplices": [list(s) for s in complex_.maximal_simplices],
        }
        if point is not None:
            x = tuple(rational(c) for c in point.split(","))
            phi = evaluate_phi(cover, x)
            located = locate_in_subdivision(phi, complex_)
            payload["phi"] = {str(i): str(v) for i, v in sorted(phi.items())}
            payload["subdivision"] = json.loads(located.model_dump_json())
    emit(payload)


@app.command()
def certify(
    cover_file: Annotated[Path, typer.Argument(help="Cover JSON file")],
    resolution: Annotated[int, typer.Option("--resolution", "-r", help="Surjectivity grid resolution")] = 16,
    samples: Annotated[int, typer.Option("--samples", help="Face samples per axis (grid pitch 1/samples)")] = 32,
    point: Annotated[list[str] | None, typer.Option("--point", help="Comma separated point to evaluate f at")] = None,
) -> None:
    """Proxy claims, exact boundary checks and surjectivity evidence for a non-spanning cover."""
    with reporting():
        cover = load_cover(cover_file)
        require_covering(cover)
        nerve_ = build_nerve(cover)
        pa = build_proxies(cover, nerve=nerve_, on_violation="report")
        boundary = boundary_check(cover, pa, samples, nerve_, on_violation="report")
        surjectivity = surjectivity_sample(cover, pa, resolution, CertifyParameters().refinement_budget, nerve_)
        images = {}
        for item in point or []:
            x = tuple(rational(c) for c in item.split(","))
            images[item] = [str(v) for v in evaluate_f(cover, pa, x, nerve_)]
    emit(
        {
            "distances": [str(d) for d in pa.distances],
            "claims": json.loads(pa.claims.model_dump_json()),
            "boundary": json.loads(boundary.model_dump_json()),
            "surjectivity": json.loads(surjectivity.model_dump_json()),
            "f": images,
        }
    )
    if not (pa.claims.holds and boundary.passed) or surjectivity.status == "failed":
        raise typer.Exit(code=1)


@app.command("reduce-spanning")
def reduce_spanning_command(
    cover_file: Annotated[Path, typer.Argument(help="Cover JSON file")],
    eps: Annotated[list[str], typer.Option("--eps", help="Margin eps as p/q; repeat for a limit check")],
    out: Annotated[Path | None, typer.Option("--out", "-o", help="Write the reduced cover (single eps)")] = None,
) -> None:
    """Replace a cover by a non-spanning one at volume cost O(eps)."""
    with reporting():
        cover = load_cover(cover_file)
        values = [rational(e) for e in eps]
        if len(values) > 1:
            emit(spanning_limit_check(cover, values))
            return
        reduction = reduce_spanning(cover, values[0])
        if out is not None:
            save_cover(reduction.reduced_cover, out)
    emit(reduction)


@app.command()
def simplex(
    cover_file: Annotated[Path, typer.Argument(help="Simplex cover JSON file")],
    check_resolution: Annotated[
        int | None, typer.Option("--check-resolution", help="Check coverage on the barycentric grid first")
    ] = None,
) -> None:
    """Diameter-volume bounds of a weighted cover of the standard simplex."""
    with reporting():
        cover = load_simplex_cover(cover_file)
        if check_resolution is not None:
            gap = validate_simplex_cover(cover, check_resolution)
            if gap is not None:
                raise InputError("sets do not cover the simplex", "simplex", {"gap": [str(c) for c in gap]})
        report = verify_simplex_bounds(cover)
    emit(report)


#
# CONTENT
#
@content_app.command("lower")
def content_lower(
    metric: Annotated[Path | None, typer.Option("--metric", "-m", help="Metric space JSON file")] = None,
    image: ImageOption = None,
    identity: IdentityOption = None,
    dimension: DimensionOption = 2,
    norm: NormOption = "linf",
) -> None:
    """Product of opposite face image distances (for the sampled map)."""
    with reporting():
        img = cube_image(metric, image, identity, dimension, norm)
        emit({"face_distances": image_face_distances(img), "lower_bound": content_lower_bound(img)})


@content_app.command("upper")
def content_upper(
    q: Annotated[str, typer.Option("--q", help="Content exponent Q")],
    metric: Annotated[Path | None, typer.Option("--metric", "-m", help="Metric space JSON file")] = None,
    identity: IdentityOption = None,
    dimension: DimensionOption = 2,
    norm: NormOption = "linf",
    floor: Annotated[str, typer.Option("--floor", help="Scale floor added to every diameter")] = "0",
    budget: Annotated[int, typer.Option("--budget", help="Candidate ball budget")] = 20_000,
) -> None:
    """Greedy ball-cover upper bound of the Q-content of a finite space."""
    with reporting():
        if identity is not None:
            ms = identity_image(identity, dimension, norm).space  # type: ignore[arg-type]
        elif metric is not None:
            ms = load_space(metric)
        else:
            raise InputError("give --identity or --metric", "content upper")
        params = ContentSearchParameters(q=number(q), scale_floor=number(floor), budget=budget)
        result = content_upper_bound(ms, None, params)
    emit(result)


@content_app.command("quotient")
def content_quotient(
    metric: MetricOption,
    out: Annotated[Path | None, typer.Option("--out", "-o", help="Write the quotient metric space")] = None,
) -> None:
    """Metric quotient of a pseudometric space."""
    with reporting():
        result = pseudometric_quotient(load_space(metric, pseudometric=True))
        if out is not None:
            save_metric(result.space, out)
    emit({"points": list(result.space.labels), "projection": result.projection, "classes": result.classes})


#
# DIAGNOSTICS
#
RadiusOption = Annotated[list[str] | None, typer.Option("--radius", "-r", help="Radius to test (repeatable)")]


def _radii(values: list[str] | None) -> list[float] | None:
    return None if not values else [number(v) for v in values]


@diag_app.command("doubling")
def diag_doubling(metric: MetricOption, radius: RadiusOption = None) -> None:
    """Greedy doubling constant estimate."""
    with reporting():
        emit(doubling_estimate(load_space(metric), _radii(radius)))


@diag_app.command("llc")
def diag_llc(
    metric: MetricOption,
    lam: Annotated[str, typer.Option("--lambda", help="Constant lambda >= 1")],
    delta: Annotated[str, typer.Option("--delta", help="Chain resolution")],
    which: Annotated[LLCKind, typer.Option("--which", help="LLC1 or LLC2")] = LLCKind.LLC1,
    radius: RadiusOption = None,
    budget: Annotated[int | None, typer.Option("--budget", help="Maximum number of centres")] = None,
) -> None:
    """Linear local connectedness at resolution delta."""
    with reporting():
        kind: Property = "LLC1" if which is LLCKind.LLC1 else "LLC2"
        report = check_llc(load_space(metric), kind, number(lam), number(delta), _radii(radius), sample_budget=budget)
    emit({"verdict": report.verdict, **report.model_dump()})
    if report.verdict == "fail":
        raise typer.Exit(code=1)


@diag_app.command("alc")
def diag_alc(
    metric: MetricOption,
    lam: Annotated[str, typer.Option("--lambda", help="Constant lambda >= 1")],
    delta: Annotated[str, typer.Option("--delta", help="Chain resolution")],
    radius: RadiusOption = None,
    cross_check: Annotated[bool, typer.Option("--cross-check", help="Also run the implied LLC checks")] = False,
) -> None:
    """Annular linear connectedness at resolution delta."""
    with reporting():
        ms = load_space(metric)
        if cross_check:
            result = cross_check_alc(ms, number(lam), number(delta), _radii(radius))
            if not result.consistent:
                raise InvariantViolation("ALC passed but an implied LLC check failed", "alc", result.model_dump())
            report = result.alc
        else:
            report = check_llc(ms, "ALC", number(lam), number(delta), _radii(radius))
    emit({"verdict": report.verdict, **report.model_dump()})
    if report.verdict == "fail":
        raise typer.Exit(code=1)


@diag_app.command("delta-path")
def diag_delta_path(
    metric: MetricOption,
    x: Annotated[str, typer.Option("--x", help="Start point label")],
    y: Annotated[str, typer.Option("--y", help="End point label")],
    delta: Annotated[str, typer.Option("--delta", help="Chain resolution")],
) -> None:
    """Fewest steps of a delta-chain between two points."""
    with reporting():
        ms = load_space(metric)
        emit(delta_path_length(ms, point_index(ms, x), point_index(ms, y), number(delta)))


@diag_app.command("snowflake")
def diag_snowflake(
    metric: MetricOption,
    alpha: Annotated[str, typer.Option("--alpha", help="Exponent in (0, 1]")],
    out: Annotated[Path, typer.Option("--out", "-o", help="Output metric space JSON file")],
) -> None:
    """Write the snowflaked space d^alpha."""
    with reporting():
        save_metric(snowflake(load_space(metric), number(alpha)), out)
    console.print(f"[bold green]Wrote[/] {out}")


@diag_app.command("compare")
def diag_compare(
    metric_d: Annotated[Path, typer.Option("--metric-d", help="Metric space with distances d")],
    metric_rho: Annotated[Path, typer.Option("--metric-rho", help="Metric space with distances rho")],
    exponent: Annotated[str, typer.Option("--exponent", help="Exponent e in rho ~ d^e")],
    constant: Annotated[str | None, typer.Option("--constant", help="Constant C to test against")] = None,
) -> None:
    """Tightest C with d^e / C <= rho <= C d^e."""
    with reporting():
        c = None if constant is None else number(constant)
        emit(check_comparison(load_space(metric_d), load_space(metric_rho), number(exponent), c))


@diag_app.command("fat-square")
def diag_fat_square(
    metric: MetricOption,
    image: Annotated[Path, typer.Option("--image", help="Square image JSON file")],
    centre: Annotated[str, typer.Option("--centre", help="Centre point label")],
    lam: Annotated[str, typer.Option("--lambda", help="Constant lambda")],
    radius: Annotated[str | None, typer.Option("--radius", help="Ball radius (plain variant)")] = None,
    target: Annotated[str | None, typer.Option("--target", help="Second point label (connecting variant)")] = None,
) -> None:
    """Certificate check of a sampled fat (connecting) square."""
    with reporting():
        ms = load_space(metric)
        img = load_image(image, ms)
        report = check_fat_square(
            ms,
            img,
            point_index(ms, centre),
            None if radius is None else number(radius),
            number(lam),
            None if target is None else point_index(ms, target),
        )
    emit(report)
    if not report.passed:
        raise typer.Exit(code=1)


@diag_app.command("growth")
def diag_growth(
    metric: MetricOption,
    pair: Annotated[list[str], typer.Option("--pair", help="R,r radius pair (repeatable)")],
    exponent: Annotated[str, typer.Option("--exponent", help="Exponent s in C (R/r)^s")],
) -> None:
    """Covering counts of R-balls by r-balls."""
    with reporting():
        pairs = []
        for item in pair:
            big, _, small = item.partition(",")
            pairs.append((number(big), number(small)))
        emit(covering_growth(load_space(metric), pairs, number(exponent)))


#
# SUITE
#
@app.command()
def suite(
    corpus: Annotated[Path, typer.Argument(help="Directory of cover, simplex cover and metric JSON files")],
    checks: Annotated[
        list[str] | None, typer.Option("--check", help="Checks to run (lv, oracle, simplex, metric)")
    ] = None,
    workers: Annotated[int, typer.Option("--workers", "-w", help="Worker processes")] = 1,
    csv_path: Annotated[Path | None, typer.Option("--csv", help="Write plot data CSV")] = None,
    out: Annotated[Path | None, typer.Option("--out", "-o", help="Write the JSON report to a file")] = None,
) -> None:
    """Certify a corpus; exit 1 if any check failed, 2 if any file could not be processed."""
    with reporting():
        selected = checks or list(ALL_CHECKS)
        unknown = [c for c in selected if c not in ALL_CHECKS]
        if unknown:
            raise InputError(f"unknown checks {unknown}", "suite")
        checked: list[Check] = selected  # type: ignore[assignment]
        report = run_suite(corpus, checked, workers=workers)
    if csv_path is not None:
        write_plot_data(report, csv_path)
    if out is not None:
        out.write_text(report.to_json() + "\n", encoding="utf-8")
    console.print_json(report.to_json())
    if report.exit_code:
        raise typer.Exit(code=report.exit_code)


if __name__ == "__main__":
    app()
