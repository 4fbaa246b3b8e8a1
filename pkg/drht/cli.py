"""
drht command line.

Reports go to stdout (or --out) as JSON or CSV; logs go to stderr.
Exit codes: 0 success, 1 negative verdict or law violation, 2 invalid
input, 3 search budget exceeded.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

import click
from pydantic import BaseModel, ValidationError

from . import __version__
from .analytic_examples import (
    CIRCLE_SAMPLES,
    hole_threshold,
    power_map_homotopy,
    step_count,
    two_hole_instance,
    two_hole_sweep,
    verify_analytic,
)
from .config import (
    DEFAULT_BUDGET,
    DEFAULT_MIN_NONTRIVIAL,
    DEFAULT_MIN_PASSES,
    DEFAULT_PRODUCT_METRIC,
    DEFAULT_SEED,
    DEFAULT_TRIALS,
    DEFAULT_WORKERS,
    LOG_FORMAT,
    LOG_LEVEL,
)
from .distance import DistanceResult, dr_sweep, homotopic_distance, verify_distance_certificate
from .homotopy_search import find_homotopy, verify_homotopy
from .invariants import cat_map, cat_space, tc_space, verify_motion_plan
from .lipschitz_maps import ScaleParams, lipschitz_constant
from .metric_space import generate
from .models.files import DistanceCertificateFile, HomotopyFile, MapFile, MotionPlanFile, SpaceFile
from .models.run_config import RunConfig
from .scalar import format_scalar
from .theorem_checks import LAWS, run_suite

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_NEGATIVE, EXIT_INVALID, EXIT_BUDGET = 0, 1, 2, 3


def configure_logging(verbosity: int = 0) -> None:
    level = {0: LOG_LEVEL, 1: "INFO"}.get(verbosity, "DEBUG")
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr, force=True)


# ---------------------------------------------------------------------------
# I/O helpers
# ---------------------------------------------------------------------------


def _read_model(model: type[BaseModel], path: str) -> BaseModel:
    return model.model_validate_json(Path(path).read_text(encoding="utf-8"))


def _write_text(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)


def _emit(payload, fmt: str, out: Optional[str]) -> None:
    """JSON with sorted keys, or CSV when payload is a list of flat rows."""
    if fmt == "csv":
        rows = payload if isinstance(payload, list) else [payload]
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=list(rows[0]) if rows else [], lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        _write_text(buffer.getvalue(), out)
    else:
        _write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", out)


def _write_sidecar(model: BaseModel, path: Optional[str]) -> None:
    if path:
        Path(path).write_text(model.model_dump_json(indent=2) + "\n", encoding="utf-8")
        logger.info(f"certificate written to {path}")


def _distance_row(result: DistanceResult, r=None) -> dict:
    row = {
        "status": result.status,
        "value": result.display(),
        "lower": "" if result.lower is None else result.lower,
        "upper": "" if result.upper is None else result.upper,
        "s": format_scalar(result.params.s),
        "r": format_scalar(result.params.r if r is None else r),
        "cover_size": len(result.cover),
    }
    if result.reason:
        row["reason"] = result.reason
    return row


def _distance_exit(result: DistanceResult) -> int:
    return EXIT_BUDGET if result.status == "bounded" else EXIT_OK


def _load_pair(f_path: str, g_path: str):
    return _read_model(MapFile, f_path).to_map(), _read_model(MapFile, g_path).to_map()


def _params(config: RunConfig, *maps) -> ScaleParams:
    if config.r is None:
        raise click.UsageError("--r is required")
    s = config.scale()
    if s is None:
        s = max(lipschitz_constant(m) for m in maps)
    return ScaleParams(s, config.step())


def _split_list(text: Optional[str]) -> list[str]:
    return [item.strip() for item in text.split(",") if item.strip()] if text else []


class DrhtGroup(click.Group):
    """Turns domain errors raised by any subcommand into exit code 2."""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except (ValueError, ValidationError, OSError) as e:
            logger.error(f"invalid input: {e}")
            click.echo(f"error: {e}", err=True)
            ctx.exit(EXIT_INVALID)


format_option = click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True)
out_option = click.option("--out", type=click.Path(dir_okay=False), help="Write the report here instead of stdout.")
budget_option = click.option("--budget", type=int, default=DEFAULT_BUDGET, show_default=True, help="Search states per query.")
certificate_option = click.option("--certificate", type=click.Path(dir_okay=False), help="Write a sidecar certificate JSON.")


@click.group(cls=DrhtGroup)
@click.version_option(__version__, prog_name="drht")
@click.option("-v", "--verbose", count=True, help="-v for INFO, -vv for DEBUG logging.")
def cli(verbose: int):
    """Discrete (s, r)-homotopy toolkit for finite metric spaces."""
    configure_logging(verbose)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


@cli.command()
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@format_option
@out_option
@click.pass_context
def validate(ctx, path, fmt, out):
    """Re-verify a space, homotopy, distance certificate or motion plan file."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    kind = data.get("kind", "space")
    if kind == "homotopy":
        homotopy = HomotopyFile.model_validate(data).to_homotopy()
        ok, violations = verify_homotopy(homotopy, homotopy.start, homotopy.end)
    elif kind == "distance":
        result, f, g = DistanceCertificateFile.model_validate(data).to_result()
        ok, violations = verify_distance_certificate(result, f, g)
    elif kind == "motion_plan":
        plan_file = MotionPlanFile.model_validate(data)
        space, plans = plan_file.to_plans()
        violations = []
        for plan in plans:
            violations += verify_motion_plan(plan, space, plan_file.r, plan_file.product_metric)[1]
        ok = not violations
    elif kind == "space":
        SpaceFile.model_validate(data).to_space()
        ok, violations = True, []
    else:
        raise ValueError(f"unknown file kind {kind!r}")
    _emit({"kind": kind, "valid": ok, "violations": "; ".join(violations) if fmt == "csv" else violations}, fmt, out)
    ctx.exit(EXIT_OK if ok else EXIT_NEGATIVE)


@cli.command("generate")
@click.argument("kind", type=click.Choice(["interval", "cycle", "grid", "two_hole_grid"]))
@click.option("--m", type=int, help="interval: largest point")
@click.option("--n", type=int, help="cycle: number of points")
@click.option("--mode", type=click.Choice(["geodesic", "chord-rationalized", "chord"]), default="geodesic", show_default=True)
@click.option("--width", type=int)
@click.option("--height", type=int)
@click.option("--hole", "holes", multiple=True, help="two_hole_grid: x0,y0,x1,y1 (repeatable)")
@click.option("--unit", default="1", show_default=True)
@out_option
def generate_command(kind, m, n, mode, width, height, holes, unit, out):
    """Generate a metric space file."""
    if kind == "interval":
        space = generate(kind, m=m)
    elif kind == "cycle":
        space = generate(kind, n=n, mode=mode)
    elif kind == "grid":
        space = generate(kind, width=width, height=height, unit=unit)
    else:
        rects = [tuple(int(v) for v in hole.split(",")) for hole in holes]
        if any(len(rect) != 4 for rect in rects):
            raise ValueError("--hole takes four integers x0,y0,x1,y1")
        space = generate(kind, width=width, height=height, holes=rects, unit=unit)
    _write_text(SpaceFile.from_space(space).model_dump_json(indent=2) + "\n", out)


@cli.command()
@click.option("--f", "f_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--g", "g_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--s", default=None, help="Lipschitz scale (default max(Lip f, Lip g)).")
@click.option("--r", required=True, help="Step size.")
@budget_option
@format_option
@out_option
@certificate_option
@click.pass_context
def homotopy(ctx, f_path, g_path, s, r, budget, fmt, out, certificate):
    """Search for a shortest (s, r)-homotopy from f to g."""
    config = RunConfig(s=s, r=r, budget=budget, output_format=fmt)
    f, g = _load_pair(f_path, g_path)
    params = _params(config, f, g)
    verdict = find_homotopy(f, g, params, config.budget)
    report = {
        "status": verdict.status,
        "length": "" if verdict.homotopy is None else verdict.homotopy.length,
        "states_visited": verdict.states_visited,
        "reachable_size": "" if verdict.reachable_size is None else verdict.reachable_size,
        "s": format_scalar(params.s),
        "r": format_scalar(params.r),
    }
    _emit(report, fmt, out)
    if verdict.found:
        _write_sidecar(HomotopyFile.from_homotopy(verdict.homotopy), certificate)
    ctx.exit({"found": EXIT_OK, "not_homotopic": EXIT_NEGATIVE}.get(verdict.status, EXIT_BUDGET))


@cli.command()
@click.option("--f", "f_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--g", "g_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--s", default=None, help="Lipschitz scale (default max(Lip f, Lip g)).")
@click.option("--r", required=True, help="Step size.")
@budget_option
@format_option
@out_option
@certificate_option
@click.pass_context
def distance(ctx, f_path, g_path, s, r, budget, fmt, out, certificate):
    """Compute D_r(f, g) with a covering certificate."""
    config = RunConfig(s=s, r=r, budget=budget, output_format=fmt)
    f, g = _load_pair(f_path, g_path)
    result = homotopic_distance(f, g, _params(config, f, g), config.budget, config.exhaustive_limit)
    _emit(_distance_row(result), fmt, out)
    _write_sidecar(DistanceCertificateFile.from_result(result, f, g), certificate)
    ctx.exit(_distance_exit(result))


@cli.command()
@click.option("--f", "f_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--g", "g_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--s", default=None, help="Lipschitz scale (default max(Lip f, Lip g)).")
@click.option("--r-list", "r_list", required=True, help="Comma-separated ascending step sizes.")
@budget_option
@format_option
@out_option
@click.pass_context
def sweep(ctx, f_path, g_path, s, r_list, budget, fmt, out):
    """D_r(f, g) over a list of step sizes."""
    config = RunConfig(s=s, r_list=_split_list(r_list), budget=budget, output_format=fmt)
    f, g = _load_pair(f_path, g_path)
    scale = config.scale() if config.s is not None else max(lipschitz_constant(f), lipschitz_constant(g))
    rows = dr_sweep(f, g, scale, config.steps(), config.budget, config.exhaustive_limit)
    _emit([_distance_row(row.result, row.r) for row in rows], fmt, out)
    ctx.exit(EXIT_BUDGET if any(row.result.status == "bounded" for row in rows) else EXIT_OK)


@cli.command()
@click.option("--space", "space_path", type=click.Path(exists=True, dir_okay=False), help="Space file for cat_r(X).")
@click.option("--map", "map_path", type=click.Path(exists=True, dir_okay=False), help="Map file for cat_r(f).")
@click.option("--s", default=None, help="Scale for cat_r(f) (default Lip f).")
@click.option("--r", required=True)
@click.option("--method", type=click.Choice(["by-definition", "via-distance"]), default="by-definition", show_default=True)
@budget_option
@format_option
@out_option
@click.pass_context
def cat(ctx, space_path, map_path, s, r, method, budget, fmt, out):
    """Discrete LS-category of a space or of a map."""
    config = RunConfig(s=s, r=r, budget=budget, output_format=fmt)
    if (space_path is None) == (map_path is None):
        raise click.UsageError("give exactly one of --space or --map")
    if space_path:
        space = _read_model(SpaceFile, space_path).to_space()
        invariant = cat_space(space, config.step(), config.budget, method, exhaustive_limit=config.exhaustive_limit)
    else:
        f = _read_model(MapFile, map_path).to_map()
        invariant = cat_map(f, config.step(), config.scale(), config.budget, method, exhaustive_limit=config.exhaustive_limit)
    _emit({**_distance_row(invariant.result), "method": invariant.method}, fmt, out)
    ctx.exit(_distance_exit(invariant.result))


@cli.command()
@click.option("--space", "space_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--r", required=True)
@click.option("--product-metric", type=click.Choice(["l1", "max"]), default=DEFAULT_PRODUCT_METRIC, show_default=True)
@budget_option
@format_option
@out_option
@certificate_option
@click.pass_context
def tc(ctx, space_path, r, product_metric, budget, fmt, out, certificate):
    """Discrete topological complexity with motion-plan certificates."""
    config = RunConfig(r=r, budget=budget, product_metric=product_metric, output_format=fmt)
    space = _read_model(SpaceFile, space_path).to_space()
    invariant = tc_space(space, config.step(), config.product_metric, config.budget, config.exhaustive_limit)
    _emit({**_distance_row(invariant.result), "product_metric": config.product_metric}, fmt, out)
    if invariant.plans:
        _write_sidecar(
            MotionPlanFile.from_plans(space, config.step(), config.product_metric, list(invariant.plans)), certificate
        )
    ctx.exit(_distance_exit(invariant.result))


@cli.command()
@click.option("--trials", type=int, default=DEFAULT_TRIALS, show_default=True)
@click.option("--seed", type=int, default=DEFAULT_SEED, show_default=True)
@click.option("--only", "only", multiple=True, type=click.Choice(sorted(LAWS)), help="Run only these laws (repeatable).")
@click.option("--first-trial", type=int, default=0, show_default=True, help="Index of the first trial (for replays).")
@click.option("--workers", type=int, default=DEFAULT_WORKERS, show_default=True)
@click.option("--min-passes", type=int, default=DEFAULT_MIN_PASSES, show_default=True, help="Passes before a law counts as exercised.")
@click.option(
    "--min-nontrivial",
    type=int,
    default=DEFAULT_MIN_NONTRIVIAL,
    show_default=True,
    help="Passes with 0 < D_r < infinity each distance law needs.",
)
@click.option("--counterexamples", type=click.Path(dir_okay=False), help="Write failing instances as JSON.")
@budget_option
@format_option
@out_option
@click.pass_context
def laws(ctx, trials, seed, only, first_trial, workers, min_passes, min_nontrivial, counterexamples, budget, fmt, out):
    """Run the randomized law suite."""
    config = RunConfig(
        trials=trials,
        seed=seed,
        workers=workers,
        min_passes=min_passes,
        min_nontrivial=min_nontrivial,
        budget=budget,
        output_format=fmt,
    )
    report = run_suite(
        only or None,
        config.trials,
        config.seed,
        config.budget,
        config.workers,
        first_trial,
        config.min_passes,
        config.min_nontrivial,
    )
    rows = report.rows()
    if fmt == "json":
        payload = {
            "seed": report.seed,
            "trials": report.trials,
            "ok": report.ok,
            "unexercised": report.unexercised,
            "starved": report.starved,
            "laws": rows,
        }
        _emit(payload, fmt, out)
    else:
        _emit(rows, fmt, out)
    if counterexamples:
        found = [c for s in report.stats for c in s.counterexamples]
        Path(counterexamples).write_text(json.dumps(found, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    ctx.exit(EXIT_OK if report.ok else EXIT_NEGATIVE)


@cli.group()
def example():
    """Worked examples."""


@example.command("circle")
@click.option("--n", type=int, required=True)
@click.option("--k", type=int, required=True)
@click.option("--r", required=True)
@click.option("--samples", type=int, default=CIRCLE_SAMPLES, show_default=True)
@format_option
@out_option
@click.pass_context
def circle(ctx, n, k, r, samples, fmt, out):
    """Straight-line homotopy between z^n and z^k on sampled circle points."""
    config = RunConfig(r=r, output_format=fmt)
    report = verify_analytic(power_map_homotopy(n, k, config.step(), samples))
    payload = {
        "n": n,
        "k": k,
        "r": config.r,
        "m": step_count(config.step()),
        "samples": samples,
        "passed": report.passed,
        "max_lipschitz_ratio": f"{report.max_lipschitz_ratio:.9f}",
        "max_step": f"{report.max_step:.9f}",
    }
    _emit(payload, fmt, out)
    ctx.exit(EXIT_OK if report.passed else EXIT_NEGATIVE)


example.add_command(circle, "power-map")


@example.command("two-hole")
@click.option("--r-list", "r_list", default="1,2,3,4", show_default=True)
@click.option("--width", type=int, default=15, show_default=True)
@click.option("--height", type=int, default=10, show_default=True)
@click.option("--hole0", default="3,3,4,4", show_default=True)
@click.option("--hole1", default="9,3,12,5", show_default=True)
@click.option("--thresholds", is_flag=True, help="Also measure the least r that frees each loop.")
@budget_option
@format_option
@out_option
@click.pass_context
def two_hole(ctx, r_list, width, height, hole0, hole1, thresholds, budget, fmt, out):
    """Sweep D_r between two loops around the holes of a grid, crossed into a torus."""
    config = RunConfig(r_list=_split_list(r_list), budget=budget, output_format=fmt)
    instance = two_hole_instance(
        width, height, [int(v) for v in hole0.split(",")], [int(v) for v in hole1.split(",")]
    )
    rows = []
    for row in two_hole_sweep(instance, config.steps(), config.budget):
        rows.append({**_distance_row(row.distance, row.r), "stuck_loops": row.stuck_loops})
    if thresholds:
        for hole in range(2):
            found = hole_threshold(instance, hole, budget=config.budget)
            logger.info(f"hole {hole} loop frees up at r={found}")
            for entry in rows:
                entry[f"threshold{hole}"] = "" if found is None else format_scalar(found)
    _emit(rows, fmt, out)
    ctx.exit(EXIT_BUDGET if any(r["status"] == "bounded" for r in rows) else EXIT_OK)


def run(argv: Sequence[str]) -> int:
    """Run the CLI in-process and return its exit code."""
    try:
        code = cli.main(args=list(argv), prog_name="drht", standalone_mode=False)
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.ClickException as e:
        e.show()
        return EXIT_INVALID
    except click.Abort:
        return EXIT_INVALID
    return code if isinstance(code, int) else EXIT_OK


def main() -> None:
    cli(prog_name="drht")


if __name__ == "__main__":
    main()
