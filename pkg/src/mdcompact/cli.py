"""Command-line front end: ``mdcompact <command> --config <file> [--out <dir>]``."""

from __future__ import annotations

import argparse
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import reports
from .bench import run_bench
from .config import COMMANDS, ConfigError, RunConfig, parse_config
from .solver import (
    BlowUpError,
    MultivaluedSolutionError,
    axis_speeds,
    diagonal_line,
    error_norms,
    exact_burgers_diagonal,
    exact_circular,
    exact_translation,
    initial_field,
    make_config,
    solve,
)
from .spectral import IcfBracketError, anisotropy_gap, optimize_icf, phase_spread, polar_diagram
from .stability import AllUnstableError, empirical_cfl, stability_report

OUT_ENV = "MDCOMPACT_OUT"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BLOWUP = 3
EXIT_IO = 4
EXIT_NUMERICAL = 5


def output_dir(cfg: RunConfig, flag: str | None) -> Path:
    """``--out`` beats the environment variable, which beats the config file."""
    return Path(flag or os.environ.get(OUT_ENV) or cfg.out or ".")


# ---------------------------------------------------------------------------
# commands


def cmd_analyze(cfg: RunConfig, out: Path) -> None:
    beta = cfg.resolved_beta
    samples = polar_diagram(cfg.order, beta, cfg.ppw, cfg.n_theta)
    path = reports.emit_polar_csv(out / "polar.csv", samples)
    print(f"order {cfg.order}, beta {beta:.6g}: {len(samples)} samples -> {path}")
    for ppw in cfg.ppw:
        print(f"  ppw {ppw:g}: phase-velocity spread {phase_spread(cfg.order, beta, ppw):.3e}"
              f" (beta = 0: {phase_spread(cfg.order, 0.0, ppw):.3e})")


def cmd_icf(cfg: RunConfig, out: Path) -> None:
    dims = cfg.spatial_dims
    rows = []
    for ppw in cfg.ppw_range():
        beta = optimize_icf(cfg.order, ppw, dims)
        rows.append((ppw, beta, anisotropy_gap(cfg.order, 0.0, ppw, dims), anisotropy_gap(cfg.order, beta, ppw, dims)))
    path = reports.emit_icf_csv(out / "icf.csv", rows)
    print(f"order {cfg.order}, {dims}D: {len(rows)} rows -> {path}")
    for ppw, beta, _, _ in rows:
        print(f"  ppw {ppw:6.2f}  beta {beta:.6f}")


def cmd_stability(cfg: RunConfig, out: Path) -> None:
    problem = cfg.problem_spec()
    scheme = cfg.scheme()
    u0 = initial_field(problem)
    speeds = axis_speeds(problem, u0)
    report = stability_report(speeds, sigma=cfg.sigma, scheme=scheme)
    if cfg.empirical:
        report.empirical_limit = empirical_cfl(problem, scheme, horizon=cfg.resolved_horizon, growth=cfg.growth)
    txt, table = reports.emit_stability_report(out, report)
    sys.stdout.write(reports.stability_text(report))
    print(f"-> {txt}, {table}")


def _exact_for(problem, t: float, grid_n: int):
    if problem.kind == "circular-advection":
        return exact_circular(t, problem, grid_n)
    if problem.kind in ("advection-2d", "advection-3d"):
        return exact_translation(t, problem, grid_n)
    return None


def cmd_run(cfg: RunConfig, out: Path) -> None:
    problem = cfg.problem_spec()
    scheme = cfg.scheme()
    dt = None if cfg.dt == "auto" else float(cfg.dt)
    tcfg = make_config(problem, scheme, dt=dt)
    result = solve(problem, tcfg)
    t = result.final_time
    print(f"{scheme.name} on {problem.kind}, {problem.n}^{problem.dims} points, dt {tcfg.dt:.6e}, {tcfg.n_steps} steps, t = {t:g}")
    if cfg.snapshot:
        reports.emit_snapshot(out / "snapshot.csv", result.field, t)
    reports.emit_norms(out / "norms.csv", result.times, result.max_norms)
    exact = _exact_for(problem, t, problem.n)
    if exact is not None:
        l2, linf = error_norms(result.field, exact)
        peak = float(np.max(np.abs(exact.values)))
        print(f"  error vs exact: L2 {l2:.6e}  Linf {linf:.6e}  (relative Linf {linf / peak:.4%})")
    elif problem.kind == "burgers-2d":
        s, values = diagonal_line(result.field)
        try:
            ref = np.array([exact_burgers_diagonal(t, si, problem) for si in s])
            print(f"  diagonal Linf error vs characteristics: {np.max(np.abs(values - ref)):.6e}")
        except MultivaluedSolutionError as err:
            print(f"  no single-valued exact solution: {err}")
    print(f"-> {out / 'norms.csv'}" + (f", {out / 'snapshot.csv'}" if cfg.snapshot else ""))


def cmd_bench(cfg: RunConfig, out: Path) -> None:
    problem = cfg.problem_spec()
    md = cfg.scheme()
    base = cfg.scheme(beta=0.0)
    report = run_bench(
        problem,
        base,
        md,
        repeats=cfg.repeats,
        horizon=cfg.resolved_horizon,
        growth=cfg.growth,
        isotropy_ppw=cfg.icf_ppw if cfg.isotropy_matched else None,
    )
    path = reports.write_text(out / "bench.csv", reports.csv_text(reports.BENCH_COLUMNS, [report.row()]))
    print(report.table())
    print(f"-> {path}")


HANDLERS = {
    "analyze": cmd_analyze,
    "icf": cmd_icf,
    "stability": cmd_stability,
    "run": cmd_run,
    "bench": cmd_bench,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mdcompact", description=__doc__)
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="key = value configuration file")
    parser.add_argument("--out", default=None, help=f"output directory (overrides ${OUT_ENV} and the config)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = Path(args.config).read_text(encoding="utf-8")
    except OSError as err:
        print(f"error: cannot read config: {err}", file=sys.stderr)
        return EXIT_IO
    try:
        cfg = parse_config(text)
        if cfg.command != args.command:
            raise ConfigError(
                f"config declares command {cfg.command!r} but {args.command!r} was requested", cfg.lines.get("command")
            )
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    out = output_dir(cfg, args.out)
    try:
        HANDLERS[cfg.command](cfg, out)
    except BlowUpError as err:
        tail = ", ".join(f"{v:.3e}" for v in err.history[-5:] if math.isfinite(v))
        print(f"blow-up: {err} (last max-norms: {tail or 'n/a'})", file=sys.stderr)
        return EXIT_BLOWUP
    except (AllUnstableError, IcfBracketError) as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as err:
        print(f"I/O error: {err}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
