"""Command-line surface: bounds tables, quadrature solves, builds, verification.

Exit codes: 0 when every requested certification passed, 1 when a
certification failed or a solve did not converge, 2 for unreadable input
files.  Output files contain no timestamps or environment data, so identical
commands with identical cache state produce byte-identical files.
"""
from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import numpy as np

from .cache import QuadratureCache, atomic_write_text, dump_json
from .construct import (
    BuildError,
    Design,
    a_sequence,
    build,
    lower_bound,
    plan,
)
from .moments import JacobiWeight
from .quadrature import NoConvergenceError, SolverOptions, solve_equal_weight
from .verify import verify_gegenbauer, verify_monomials

_cache_dir_option = click.option(
    "--cache-dir",
    type=click.Path(file_okay=False, path_type=Path),
    envvar="DESIGNFORGE_CACHE",
    default=None,
    help="Quadrature cache directory (env: DESIGNFORGE_CACHE; flag wins).",
)


class ParseError(click.ClickException):
    exit_code = 2


def _positive(ctx, param, value):
    if value is not None and value <= 0:
        raise click.BadParameter("must be strictly positive")
    return value


def _solver_options(tol_quad, max_k, max_iter, seed) -> SolverOptions:
    return SolverOptions(tolerance=tol_quad, max_iterations=max_iter, max_K=max_k, seed=seed)


@click.group()
def main():
    """Build and certify averaging point sets on spheres."""


@main.command()
@click.argument("n", type=int)
@click.argument("t_max", type=int)
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
@_cache_dir_option
def bounds(n, t_max, fmt, cache_dir):
    """Print, for t = 1..T_MAX, the size lower bound on S^N, the growth
    exponent, t^exponent, and any cardinality achieved by earlier builds."""
    cache = QuadratureCache(cache_dir) if cache_dir else None
    exponent = a_sequence(n)
    rows = []
    for t in range(1, t_max + 1):
        achieved = cache.achieved(n, t) if cache else None
        rows.append(
            {
                "t": t,
                "lower_bound": lower_bound(n, t),
                "t_pow_exponent": t**exponent,
                "achieved": achieved,
            }
        )
    if fmt == "json":
        click.echo(json.dumps({"n": n, "exponent": exponent, "rows": rows}, indent=2))
        return
    click.echo(f"sphere S^{n}, growth exponent a_n = {exponent}")
    header = f"{'t':>4}  {'lower_bound':>12}  {'t^a_n':>14}  {'achieved':>10}"
    click.echo(header)
    click.echo("-" * len(header))
    for row in rows:
        achieved = row["achieved"] if row["achieved"] is not None else "-"
        click.echo(
            f"{row['t']:>4}  {row['lower_bound']:>12}  {row['t_pow_exponent']:>14}  {achieved:>10}"
        )


@main.command()
@click.argument("m", type=int)
@click.argument("n", type=int)
@click.argument("t", type=int)
@click.option("-o", "--output", type=click.Path(dir_okay=False, path_type=Path), default=None)
@click.option("--tol-quad", type=float, default=1e-12, show_default=True, callback=_positive)
@click.option("--max-k", type=int, default=512, show_default=True, callback=_positive)
@click.option("--max-iter", type=int, default=300, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@_cache_dir_option
def quadrature(m, n, t, output, tol_quad, max_k, max_iter, seed, cache_dir):
    """Solve (or load) an equal-weight rule of degree T for the (M, N) weight."""
    cache = QuadratureCache(cache_dir) if cache_dir else None
    opts = _solver_options(tol_quad, max_k, max_iter, seed)
    exit_code = 0
    q = cache.lookup(m, n, t, tol_quad) if cache else None
    if q is None:
        try:
            q, _ = solve_equal_weight(JacobiWeight(m, n), t, opts)
            if cache:
                cache.store(q)
        except NoConvergenceError as exc:
            click.echo(f"no convergence: {exc}", err=True)
            q = exc.best
            exit_code = 1
    if output:
        atomic_write_text(output, dump_json(q.to_json_dict()))
    click.echo(
        f"weight (m={m}, n={n}) degree {t}: K={q.K}, "
        f"max residual {q.max_abs_residual:.3e}, certified={q.certified}"
    )
    sys.exit(exit_code)


def _design_csv(design: Design) -> str:
    lines = [",".join(format(float(v), ".17g") for v in row) for row in design.points]
    return "\n".join(lines) + "\n"


@main.command("build")
@click.argument("n", type=int)
@click.argument("t", type=int)
@click.option("-o", "--output", type=click.Path(dir_okay=False, path_type=Path), default=None)
@click.option("--report-out", type=click.Path(dir_okay=False, path_type=Path), default=None)
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True)
@click.option("--tol-quad", type=float, default=1e-12, show_default=True, callback=_positive)
@click.option("--tol-design", type=float, default=1e-9, show_default=True, callback=_positive)
@click.option("--max-k", type=int, default=512, show_default=True, callback=_positive)
@click.option("--max-iter", type=int, default=300, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--phase", type=float, default=0.0, show_default=True, help="Rotation of polygon leaves (radians).")
@click.option("--plan", "plan_file", type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None, help="JSON file mapping ambient dims to [m, n] split overrides.")
@_cache_dir_option
def build_cmd(n, t, output, report_out, fmt, tol_quad, tol_design, max_k, max_iter, seed, phase, plan_file, cache_dir):
    """Plan, build, and verify a degree-T design on S^N."""
    overrides = None
    if plan_file:
        raw = json.loads(plan_file.read_text())
        overrides = {int(k): (int(v[0]), int(v[1])) for k, v in raw.items()}
    cache = QuadratureCache(cache_dir) if cache_dir else None
    opts = _solver_options(tol_quad, max_k, max_iter, seed)
    bp = plan(n, t, overrides)
    try:
        design, report = build(bp, solver_opts=opts, design_tol=tol_design, cache_obj=cache, phase=phase)
    except (BuildError, NoConvergenceError) as exc:
        click.echo(f"build failed: {exc}", err=True)
        sys.exit(1)
    if cache:
        cache.record_build(n, t, design.count)
    if output:
        if fmt == "csv":
            atomic_write_text(output, _design_csv(design))
        else:
            atomic_write_text(output, dump_json(design.to_json_dict()))
    if report_out:
        atomic_write_text(report_out, dump_json(report.to_json_dict()))
    click.echo(
        f"S^{n} degree {t}: {design.count} points "
        f"(lower bound {report.dgs_lower_bound}), max residual {report.max_residual:.3e}"
    )
    sys.exit(0)


def _load_design(path: Path, t: int) -> Design:
    text = path.read_text()
    if not text.strip():
        raise ParseError(f"parse error in {path}: file is empty")
    if text.lstrip().startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(
                f"parse error in {path} at line {exc.lineno}, column {exc.colno}: {exc.msg}"
            )
        try:
            return Design.from_json_dict(data)
        except (KeyError, ValueError, TypeError) as exc:
            raise ParseError(f"parse error in {path}: {exc}")
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            rows.append([float(v) for v in line.split(",")])
        except ValueError as exc:
            raise ParseError(f"parse error in {path} at line {lineno}: {exc}")
    if not rows:
        raise ParseError(f"parse error in {path}: no data rows")
    try:
        return Design(ambient_dim=len(rows[0]), degree=t, points=np.array(rows))
    except ValueError as exc:
        raise ParseError(f"parse error in {path}: {exc}")


@main.command()
@click.argument("design_file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("-t", "--degree", type=int, required=True)
@click.option("--tol", type=float, default=1e-9, show_default=True, callback=_positive)
@click.option("--method", type=click.Choice(["monomial", "gegenbauer", "both"]), default="both", show_default=True)
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
def verify(design_file, degree, tol, method, fmt):
    """Verify the design property of a point file at the given degree."""
    design = _load_design(design_file, degree)
    reports = []
    if method in ("monomial", "both"):
        reports.append(verify_monomials(design, degree, tol))
    if method in ("gegenbauer", "both") and design.ambient_dim >= 2:
        reports.append(verify_gegenbauer(design, degree, tol))
    if not reports:
        raise click.ClickException("no applicable verification method")
    if fmt == "json":
        click.echo(json.dumps([r.to_json_dict() for r in reports], indent=2))
    else:
        for r in reports:
            click.echo(
                f"{r.method}: degree {r.degree_checked}, max residual "
                f"{r.max_abs_residual:.3e}, tol {r.tolerance:g} -> "
                f"{'pass' if r.passed else 'FAIL'}"
            )
    sys.exit(0 if all(r.passed for r in reports) else 1)


if __name__ == "__main__":
    main()
