"""Command-line front end.

Every pipeline is a subcommand taking flags (never positional arguments);
`--config file.json` supplies defaults but explicit flags always win.
Exit codes: 0 pass/success, 1 fail verdict, 2 degenerate or undecided,
3 usage error.  With `--json`, stdout carries exactly one JSON document
and nothing else; human-readable notes go to stderr.
"""

from __future__ import annotations

import json
import math
import sys
from pathlib import Path

import click
import numpy as np

from ._util import resolve_seed
from .borel import borel_partition, verify_borel_conclusions
from .curves import CurveError, curve_from_json
from .geometry import (
    EliminationUndecided,
    GeometryError,
    PlaneCurve,
    build_fermat_waring,
    check_general_position,
    grassmann_gamma_codim,
    plane_curve_genus,
    smoothness_check,
)
from .nevanlinna import nevanlinna_profile
from .polynomials import (
    PolynomialError,
    affine_from_json,
    poly_from_dict,
    poly_from_json,
    linear_form,
)
from .smt import (
    emit_report,
    run_cartan_check,
    run_fmt_check,
    run_prop21_check,
    run_theorem_b_check,
)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_DEGENERATE = 2
EXIT_USAGE = 3


def _config_callback(ctx: click.Context, param: click.Parameter, value):
    if value is None:
        return None
    try:
        defaults = json.loads(Path(value).read_text())
    except FileNotFoundError as exc:
        raise click.UsageError(f"config file not found: {value}") from exc
    except json.JSONDecodeError as exc:
        raise click.UsageError(f"config field error in {value}: {exc}") from exc
    if not isinstance(defaults, dict):
        raise click.UsageError("config must be a JSON object of flag defaults")
    # config keys are flag spellings; map them onto parameter names
    mapped = {}
    for p in ctx.command.params:
        spellings = {p.name}
        for opt in list(p.opts) + list(p.secondary_opts):
            spellings.add(opt.lstrip("-").replace("-", "_"))
        for key in spellings & set(defaults):
            mapped[p.name] = defaults[key]
    unknown = set(defaults) - {
        s for p in ctx.command.params
        for s in ({p.name} | {o.lstrip("-").replace("-", "_")
                              for o in list(p.opts) + list(p.secondary_opts)})
    }
    if unknown:
        raise click.UsageError(
            f"config field not recognized: {', '.join(sorted(unknown))}"
        )
    ctx.default_map = {**mapped, **(ctx.default_map or {})}
    return value


def _shared(fn):
    fn = click.option("--config", type=str, default=None, is_eager=True,
                      expose_value=False, callback=_config_callback,
                      help="JSON file of flag defaults (flags win).")(fn)
    fn = click.option("--json", "as_json", is_flag=True, default=False,
                      help="Emit a single JSON document on stdout.")(fn)
    fn = click.option("--jobs", type=int, default=1, show_default=True,
                      help="Worker cap for grid evaluation.")(fn)
    fn = click.option("--seed", type=int, default=None,
                      help="Random seed (fallback: NEVANLAB_SEED, then 42).")(fn)
    return fn


def _grid_options(fn):
    fn = click.option("--rmin", type=float, default=2.0, show_default=True)(fn)
    fn = click.option("--rmax", type=float, default=10.0, show_default=True)(fn)
    fn = click.option("--count", type=int, default=15, show_default=True)(fn)
    fn = click.option("--spacing", type=click.Choice(["log", "linear"]),
                      default="log", show_default=True)(fn)
    return fn


def _make_grid(rmin: float, rmax: float, count: int, spacing: str) -> list[float]:
    if rmin <= 1.0:
        raise click.UsageError("grid field rmin must be > 1")
    if count < 2:
        raise click.UsageError("grid field count must be >= 2")
    if rmax <= rmin:
        raise click.UsageError("grid field rmax must exceed rmin")
    if spacing == "log":
        return list(np.geomspace(rmin, rmax, count))
    return list(np.linspace(rmin, rmax, count))


def _load_curve(path: str):
    try:
        return curve_from_json(Path(path).read_text())
    except FileNotFoundError as exc:
        raise click.UsageError(f"curve file not found: {path}") from exc
    except (CurveError, json.JSONDecodeError, KeyError) as exc:
        raise click.UsageError(f"curve field error in {path}: {exc}") from exc


def _load_poly(path: str):
    try:
        return poly_from_json(Path(path).read_text())
    except FileNotFoundError as exc:
        raise click.UsageError(f"polynomial file not found: {path}") from exc
    except (PolynomialError, json.JSONDecodeError) as exc:
        raise click.UsageError(f"polynomial field error in {path}: {exc}") from exc


def _emit(obj: dict, as_json: bool, text: str) -> None:
    if as_json:
        click.echo(json.dumps(obj))
    else:
        click.echo(text)


def _report_exit(report) -> int:
    if report.verdict == "pass":
        return EXIT_PASS
    if report.verdict == "degenerate":
        return EXIT_DEGENERATE
    return EXIT_FAIL


def _finish_report(report, out: str | None, name: str, as_json: bool) -> int:
    paths = {}
    if out:
        paths = {k: str(v) for k, v in emit_report(report, Path(out) / name).items()}
    payload = json.loads(report.to_json())
    payload["files"] = paths
    _emit(payload, as_json,
          f"{report.inequality_id}: {report.verdict} "
          f"(pass fraction {report.pass_fraction:.3f})"
          + (f"; wrote {paths['csv']}" if paths else ""))
    return _report_exit(report)


@click.group()
def cli():
    """Nevanlinna-functional laboratory for entire curves."""


@cli.command("functionals")
@_shared
@_grid_options
@click.option("--curve", "curve_path", required=True, type=str)
@click.option("--poly", "poly_path", required=True, type=str)
@click.option("--level", type=str, default="inf", show_default=True,
              help="Truncation level (positive integer or 'inf').")
@click.option("--out", type=str, default=None, help="Output directory.")
def functionals_cmd(curve_path, poly_path, level, out, rmin, rmax, count,
                    spacing, seed, jobs, as_json):
    """T / N / m profile of a curve against a divisor over an r grid."""
    f = _load_curve(curve_path)
    D = _load_poly(poly_path)
    lvl = math.inf if level == "inf" else int(level)
    grid = _make_grid(rmin, rmax, count, spacing)
    profile = nevanlinna_profile(f, D, lvl, grid, jobs=jobs)
    files = {}
    if out:
        base = Path(out)
        base.mkdir(parents=True, exist_ok=True)
        (base / "profile.csv").write_text(profile.to_csv())
        (base / "profile.json").write_text(profile.to_json())
        files = {"csv": str(base / "profile.csv"), "json": str(base / "profile.json")}
    payload = json.loads(profile.to_json())
    payload["files"] = files
    _emit(payload, as_json,
          f"T({grid[-1]:.3g}) = {profile.T[-1]:.6g}, "
          f"N({grid[-1]:.3g}) = {profile.N_trunc[-1]:.6g}, "
          f"m({grid[-1]:.3g}) = {profile.prox[-1]:.6g}")
    return EXIT_PASS


@cli.command("fmt-check")
@_shared
@_grid_options
@click.option("--curve", "curve_path", required=True, type=str)
@click.option("--poly", "poly_path", required=True, type=str)
@click.option("--out", type=str, default=None)
def fmt_cmd(curve_path, poly_path, out, rmin, rmax, count, spacing, seed,
            jobs, as_json):
    """First-main-theorem residual boundedness check."""
    f = _load_curve(curve_path)
    D = _load_poly(poly_path)
    grid = _make_grid(rmin, rmax, count, spacing)
    report = run_fmt_check(f, D, grid, jobs=jobs)
    return _finish_report(report, out, "fmt", as_json)


@cli.command("cartan-check")
@_shared
@_grid_options
@click.option("--curve", "curve_path", required=True, type=str)
@click.option("--lines", "lines_path", type=str, default=None,
              help="JSON list of linear-form literals.")
@click.option("--random-lines", "q_random", type=int, default=None,
              help="Generate q seeded random integer lines in general position.")
@click.option("--out", type=str, default=None)
def cartan_cmd(curve_path, lines_path, q_random, out, rmin, rmax, count,
               spacing, seed, jobs, as_json):
    """Truncated second main theorem for hyperplanes."""
    f = _load_curve(curve_path)
    if (lines_path is None) == (q_random is None):
        raise click.UsageError("provide exactly one of --lines / --random-lines")
    if lines_path:
        raw = json.loads(Path(lines_path).read_text())
        hyperplanes = [poly_from_dict(o) for o in raw]
    else:
        hyperplanes = random_general_position_lines(
            q_random, f.dim, resolve_seed(seed)
        )
    grid = _make_grid(rmin, rmax, count, spacing)
    report = run_cartan_check(f, hyperplanes, grid, jobs=jobs)
    return _finish_report(report, out, "cartan", as_json)


def random_general_position_lines(q: int, n: int, seed: int):
    """Seeded integer linear forms, resampled until in general position."""
    from .smt import _hyperplanes_general_position

    rng = np.random.default_rng(seed)
    for _ in range(200):
        forms = [linear_form([int(v) for v in rng.integers(-9, 10, n + 1)])
                 for _ in range(q)]
        try:
            if all(not P.is_zero for P in forms) and _hyperplanes_general_position(forms, n):
                return forms
        except Exception:
            continue
    raise GeometryError("could not sample general-position lines")


@cli.command("prop21-check")
@_shared
@_grid_options
@click.option("--curve", "curve_path", required=True, type=str)
@click.option("--d", "degree", required=True, type=int)
@click.option("--qfile", type=str, default=None,
              help="JSON list of the Q_i literals (with --deltas).")
@click.option("--deltas", type=str, default=None, help="Comma list, e.g. 0,2,2,2")
@click.option("--out", type=str, default=None)
def prop21_cmd(curve_path, degree, qfile, deltas, out, rmin, rmax, count,
               spacing, seed, jobs, as_json):
    """Degeneracy-threshold estimate for sum z_i^(d-delta_i) Q_i.

    Without --qfile, all Q_i = 1 (pure power-sum hypersurface)."""
    f = _load_curve(curve_path)
    n = f.dim
    if qfile:
        raw = json.loads(Path(qfile).read_text())
        Q_list = [poly_from_dict(o) for o in raw]
        if deltas is None:
            raise click.UsageError("--deltas required with --qfile")
        delta_list = [int(v) for v in deltas.split(",")]
    else:
        from .polynomials import HomogeneousPolynomial

        Q_list = [
            HomogeneousPolynomial(n + 1, 0, {(0,) * (n + 1): 1.0 + 0j})
            for _ in range(n + 1)
        ]
        delta_list = [0] * (n + 1)
    grid = _make_grid(rmin, rmax, count, spacing)
    report = run_prop21_check(f, Q_list, delta_list, degree, grid, jobs=jobs)
    return _finish_report(report, out, "prop21", as_json)


@cli.command("theoremb-check")
@_shared
@_grid_options
@click.option("--curve", "curve_path", required=True, type=str)
@click.option("--n", "nn", required=True, type=int)
@click.option("--m", "mm", required=True, type=int)
@click.option("--d", "dd", required=True, type=int)
@click.option("--mode", type=click.Choice(["theorem", "explore"]),
              default="theorem", show_default=True)
@click.option("--out", type=str, default=None)
def theoremb_cmd(curve_path, nn, mm, dd, mode, out, rmin, rmax, count,
                 spacing, seed, jobs, as_json):
    """Fermat-Waring second-main-theorem estimate with defect surrogate."""
    f = _load_curve(curve_path)
    try:
        fw = build_fermat_waring(nn, mm, dd, resolve_seed(seed), mode=mode)
    except GeometryError as exc:
        raise click.UsageError(str(exc)) from exc
    grid = _make_grid(rmin, rmax, count, spacing)
    report = run_theorem_b_check(fw, f, grid, jobs=jobs)
    return _finish_report(report, out, "theoremb", as_json)


@cli.command("borel-partition")
@_shared
@click.option("--curve", "curve_path", required=True, type=str,
              help="Component list as a curve literal.")
@click.option("--case", type=click.Choice(["logarithmic", "compact"]),
              default="logarithmic", show_default=True)
@click.option("--radius", type=float, default=10.0, show_default=True)
def borel_cmd(curve_path, case, radius, seed, jobs, as_json):
    """Ratio-constancy partition and clause verification of components."""
    try:
        f = curve_from_json(Path(curve_path).read_text(), validate=False)
    except FileNotFoundError as exc:
        raise click.UsageError(f"curve file not found: {curve_path}") from exc
    g = list(f.components)
    part = borel_partition(g)
    report = verify_borel_conclusions(g, part, case, radius=radius)
    payload = json.loads(report.to_json())
    _emit(payload, as_json,
          f"classes {payload['classes']}, exceptional {payload['exceptional']}, "
          f"clauses {payload['clauses']}, hypothesis {payload['hypothesis']}")
    ok = report.all_pass and report.hypothesis != "failed"
    return EXIT_PASS if ok else EXIT_FAIL


@cli.command("genus")
@_shared
@click.option("--curve", "curve_path", required=True, type=str,
              help="Affine plane-curve literal (vars = 2).")
def genus_cmd(curve_path, seed, jobs, as_json):
    """Genus of a plane curve via the ordinary-singularity formula."""
    try:
        F = affine_from_json(Path(curve_path).read_text())
    except FileNotFoundError as exc:
        raise click.UsageError(f"curve file not found: {curve_path}") from exc
    except (PolynomialError, json.JSONDecodeError) as exc:
        raise click.UsageError(f"curve field error: {exc}") from exc
    report = plane_curve_genus(PlaneCurve(F))
    payload = json.loads(report.to_json())
    if report.verdict == "ok":
        text = f"g = {report.genus}, " + ("smooth" if report.smooth else
                                          f"{len(report.singularities)} ordinary singularities")
        _emit(payload, as_json, text)
        return EXIT_PASS
    _emit(payload, as_json, f"{report.verdict}: {report.note}")
    return EXIT_DEGENERATE


@cli.command("smoothness")
@_shared
@click.option("--poly", "poly_path", required=True, type=str)
@click.option("--mode", type=click.Choice(["exact", "probabilistic"]),
              default="exact", show_default=True)
@click.option("--starts", type=int, default=200, show_default=True)
def smoothness_cmd(poly_path, mode, starts, seed, jobs, as_json):
    """Smoothness certificate for a surface in CP^3."""
    P = _load_poly(poly_path)
    try:
        cert = smoothness_check(P, mode=mode, seed=resolve_seed(seed), starts=starts)
    except EliminationUndecided as exc:
        _emit({"verdict": "undecided", "reason": str(exc)}, as_json,
              f"undecided: {exc}")
        return EXIT_DEGENERATE
    payload = json.loads(cert.to_json())
    _emit(payload, as_json, f"{cert.mode}: {cert.verdict}")
    if cert.verdict == "smooth" or cert.verdict.startswith("no singularity"):
        return EXIT_PASS
    return EXIT_FAIL


@cli.command("general-position")
@_shared
@click.option("--polys", "polys_path", required=True, type=str,
              help="JSON list of homogeneous literals.")
@click.option("--n", "nn", required=True, type=int)
def general_position_cmd(polys_path, nn, seed, jobs, as_json):
    """Empty-intersection check for every (n+1)-subset of the family."""
    try:
        raw = json.loads(Path(polys_path).read_text())
        family = [poly_from_dict(o) for o in raw]
    except FileNotFoundError as exc:
        raise click.UsageError(f"file not found: {polys_path}") from exc
    except (PolynomialError, json.JSONDecodeError) as exc:
        raise click.UsageError(f"polynomial field error: {exc}") from exc
    try:
        ok = check_general_position(family, nn)
    except EliminationUndecided as exc:
        _emit({"verdict": "undecided", "reason": str(exc)}, as_json,
              f"undecided: {exc}")
        return EXIT_DEGENERATE
    _emit({"verdict": "general_position" if ok else "degenerate_family"},
          as_json, "in general position" if ok else "NOT in general position")
    return EXIT_PASS if ok else EXIT_FAIL


@cli.command("grassmann")
@_shared
@click.option("--m", "mm", required=True, type=int)
@click.option("--a", "aa", required=True, type=int)
@click.option("--b", "bb", required=True, type=int)
@click.option("--c", "cc", required=True, type=int)
def grassmann_cmd(mm, aa, bb, cc, seed, jobs, as_json):
    """Codimension (m-c)(a+b-c) of the Grassmannian incidence locus."""
    try:
        value = grassmann_gamma_codim(mm, aa, bb, cc)
    except GeometryError as exc:
        raise click.UsageError(str(exc)) from exc
    _emit({"codimension": value, "m": mm, "a": aa, "b": bb, "c": cc},
          as_json, str(value))
    return EXIT_PASS


def main(argv: list[str] | None = None) -> int:
    """Entry point with the documented exit-code contract."""
    try:
        rv = cli.main(args=argv, standalone_mode=False)
        return int(rv) if isinstance(rv, int) else EXIT_PASS
    except click.UsageError as exc:
        click.echo(f"usage error: {exc.format_message()}", err=True)
        return EXIT_USAGE
    except click.Abort:
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
