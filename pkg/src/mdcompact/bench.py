"""Timing harness comparing a one-dimensional scheme with its multidimensional twin."""

from __future__ import annotations

import math
import statistics
import time
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import brentq

from .scheme import SpatialScheme
from .solver import BlowUpError, ProblemSpec, initial_field, make_config, reference_speed, solve
from .spectral import phase_spread
from .stability import empirical_cfl

DT_FRACTION = 0.9


@dataclass
class TimedRun:
    scheme: str
    sigma: float
    dt: float
    n_steps: int
    wall: float
    grid_n: int


@dataclass
class SpeedupReport:
    baseline: TimedRun
    md: TimedRun
    isotropy_baseline: TimedRun | None = None

    @property
    def dt_ratio(self) -> float:
        return self.md.dt / self.baseline.dt

    @property
    def speedup_pct(self) -> float:
        return 100.0 * (self.baseline.wall - self.md.wall) / self.baseline.wall

    @property
    def isotropy_speedup_pct(self) -> float | None:
        if self.isotropy_baseline is None:
            return None
        t = self.isotropy_baseline.wall
        return 100.0 * (t - self.md.wall) / t

    def row(self) -> tuple:
        b, m = self.baseline, self.md
        return (
            b.scheme, m.scheme, b.sigma, m.sigma, b.dt, m.dt, self.dt_ratio,
            b.n_steps, m.n_steps, b.wall, m.wall, self.speedup_pct, self.isotropy_speedup_pct,
        )

    def table(self) -> str:
        b, m = self.baseline, self.md
        lines = [
            f"{'scheme':<8}{'grid':>6}{'sigma':>10}{'dt':>14}{'steps':>8}{'wall [s]':>12}",
            f"{b.scheme:<8}{b.grid_n:>6}{b.sigma:>10.4f}{b.dt:>14.6e}{b.n_steps:>8}{b.wall:>12.4f}",
            f"{m.scheme:<8}{m.grid_n:>6}{m.sigma:>10.4f}{m.dt:>14.6e}{m.n_steps:>8}{m.wall:>12.4f}",
            f"dt ratio {m.scheme}/{b.scheme}: {self.dt_ratio:.4f}",
            f"speedup (max allowable dt): {self.speedup_pct:.1f}%",
        ]
        if self.isotropy_baseline is not None:
            iso = self.isotropy_baseline
            lines.append(
                f"speedup (isotropy matched, {iso.scheme} on {iso.grid_n} points): {self.isotropy_speedup_pct:.1f}%"
            )
        return "\n".join(lines)


def _timed_solve(problem: ProblemSpec, scheme: SpatialScheme, sigma: float, repeats: int, growth: float, n=None) -> TimedRun:
    u0 = initial_field(problem, n)
    dt = sigma * u0.grid.h / reference_speed(problem, u0)
    cfg = make_config(problem, scheme, n=n, dt=dt)
    peak = float(np.max(np.abs(u0.values)))
    walls = []
    for k in range(repeats + 1):  # first run is a discarded warm-up
        start = time.perf_counter()
        result = solve(problem, cfg, u0=u0, record=False)
        elapsed = time.perf_counter() - start
        final_peak = float(np.max(np.abs(result.field.values)))
        if final_peak > growth * peak:
            raise BlowUpError(cfg.n_steps, list(result.max_norms))
        if k:
            walls.append(elapsed)
    return TimedRun(scheme.name, sigma, cfg.dt, cfg.n_steps, statistics.median(walls), u0.grid.n_per_axis[0])


def matched_grid(order: int, beta: float, ppw: float, n: int) -> int:
    """Baseline grid whose phase-velocity spread equals the multidimensional one at ``ppw``.

    The spread of the beta = 0 scheme falls monotonically with resolution, so the
    matching ppw is bracketed between ``ppw`` and a generously fine value.
    """
    target = phase_spread(order, beta, ppw)
    f = lambda p: phase_spread(order, 0.0, p) - target
    hi = ppw
    while f(hi) > 0.0:
        hi *= 2.0
    ppw_match = brentq(f, ppw, hi, xtol=1e-6) if hi > ppw else ppw
    return int(math.ceil(n * ppw_match / ppw))


def run_bench(
    problem: ProblemSpec,
    baseline: SpatialScheme,
    md: SpatialScheme,
    repeats: int = 3,
    horizon: int | None = None,
    growth: float = 10.0,
    isotropy_ppw: float | None = None,
) -> SpeedupReport:
    """Time both schemes to the problem's final time at 0.9x their own empirical limit."""
    if baseline.beta != 0.0:
        raise ValueError("the baseline scheme needs beta = 0")
    sig_b = empirical_cfl(problem, baseline, horizon=horizon, growth=growth)
    sig_m = empirical_cfl(problem, md, horizon=horizon, growth=growth)
    base = _timed_solve(problem, baseline, DT_FRACTION * sig_b, repeats, growth)
    fast = _timed_solve(problem, md, DT_FRACTION * sig_m, repeats, growth)
    report = SpeedupReport(base, fast)
    if isotropy_ppw is not None and baseline.family == "compact" and md.beta > 0.0:
        n_match = matched_grid(md.order, md.beta, isotropy_ppw, problem.n)
        # a finer grid takes more steps to the same time, so its limit is measured afresh
        refined = replace(problem, n=n_match)
        sig_r = empirical_cfl(refined, baseline, horizon=horizon, growth=growth)
        report.isotropy_baseline = _timed_solve(refined, baseline, DT_FRACTION * sig_r, repeats, growth)
    return report
