"""MacCormack predictor-corrector marching for the three periodic test problems.

The model equation is ``u_t = c . grad(u)`` (Burgers: ``c = (u, u)``), so the
predictor and corrector read::

    u'   = u   + dt sum_i c_i F_i u
    u''  = u'  + dt sum_i c_i B_i u'
    u^+  = (u + u'') / 2

with forward operators ``F_i`` and backward operators ``B_i``.  Velocities are
sampled at the nodes from the stage input and multiply the nodal derivative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .scheme import GridError, GridSpec, ScalarField, SpatialScheme
from .stability import analytic_limits

KINDS = ("circular-advection", "burgers-2d", "advection-2d", "advection-3d")
ROTATION_RATE = math.pi / 2.0
DT_SAFETY = 0.9


class BlowUpError(FloatingPointError):
    def __init__(self, step: int, history: Sequence[float] = ()):
        super().__init__(f"non-finite values after step {step}")
        self.step = step
        self.history = list(history)


class MultivaluedSolutionError(ValueError):
    def __init__(self, t: float, t_star: float):
        super().__init__(f"characteristics cross at t* = {t_star:.6g}; requested t = {t:.6g}")
        self.t = t
        self.t_star = t_star


@dataclass(frozen=True)
class ProblemSpec:
    kind: str
    lower: float
    upper: float
    n: int
    center: tuple[float, ...]
    width: float
    amplitude: float = 1.0
    offset: float = 0.0
    velocity: tuple[float, ...] | None = None
    final_time: float = 2.0
    log2_gaussian: bool = True

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown problem kind {self.kind!r}; expected one of {KINDS}")
        if not self.width > 0.0:
            raise ValueError("Gaussian width must be positive")
        if self.upper <= self.lower:
            raise ValueError("domain upper bound must exceed the lower bound")
        if self.kind in ("advection-2d", "advection-3d") and self.velocity is None:
            raise ValueError(f"{self.kind} needs a constant velocity")

    @property
    def dims(self) -> int:
        return len(self.center)

    @property
    def period(self) -> float:
        return self.upper - self.lower

    def grid(self, n: int | None = None) -> GridSpec:
        return GridSpec.cube(n or self.n, self.dims, self.lower, self.upper)

    def gaussian(self, *coords: np.ndarray) -> np.ndarray:
        r2 = sum((x - x0) ** 2 for x, x0 in zip(coords, self.center))
        k = math.log(2.0) if self.log2_gaussian else 1.0
        return self.amplitude * np.exp(-k * r2 / self.width**2) + self.offset


def circular_advection(n: int = 200, final_time: float = 2.0) -> ProblemSpec:
    return ProblemSpec("circular-advection", -2.0, 2.0, n, (0.25, 0.0), 0.04, final_time=final_time)


def burgers_2d(n: int = 100, final_time: float = 2.0) -> ProblemSpec:
    return ProblemSpec(
        "burgers-2d", -0.5, 0.5, n, (0.0, 0.0), 0.2, amplitude=0.12, offset=1.0,
        final_time=final_time, log2_gaussian=False,
    )


def advection_3d(n: int = 100, final_time: float = 1.0) -> ProblemSpec:
    return ProblemSpec(
        "advection-3d", -0.5, 0.5, n, (0.0, 0.0, 0.0), 0.08, velocity=(1.0, 1.0, 1.0), final_time=final_time
    )


def advection_2d(
    velocity: tuple[float, float] = (1.0, 1.0),
    n: int = 64,
    width: float = 0.08,
    final_time: float = 1.0,
) -> ProblemSpec:
    return ProblemSpec("advection-2d", -0.5, 0.5, n, (0.0, 0.0), width, velocity=velocity, final_time=final_time)


@dataclass(frozen=True)
class TimeIntegrationConfig:
    dt: float
    n_steps: int
    scheme: SpatialScheme

    def __post_init__(self) -> None:
        if self.dt < 0.0:
            raise ValueError("time step must be non-negative")
        if self.n_steps < 0:
            raise ValueError("number of steps must be non-negative")


def initial_field(problem: ProblemSpec, n: int | None = None) -> ScalarField:
    grid = problem.grid(n)
    return ScalarField(grid, problem.gaussian(*grid.mesh()))


def _grid_velocity(problem: ProblemSpec, grid: GridSpec) -> list[np.ndarray] | None:
    if problem.kind == "burgers-2d":
        return None
    if problem.kind == "circular-advection":
        x, y = grid.mesh()
        return [ROTATION_RATE * y, -ROTATION_RATE * x]
    return [np.full(grid.shape, float(c)) for c in problem.velocity]


def reference_speed(problem: ProblemSpec, u: ScalarField) -> float:
    """Largest velocity component over the grid."""
    vel = _grid_velocity(problem, u.grid)
    if vel is None:
        return float(np.max(np.abs(u.values)))
    return float(max(np.max(np.abs(v)) for v in vel))


def axis_speeds(problem: ProblemSpec, u: ScalarField) -> list[float]:
    vel = _grid_velocity(problem, u.grid)
    if vel is None:
        peak = float(np.max(np.abs(u.values)))
        return [peak] * u.grid.dims
    return [float(np.max(np.abs(v))) for v in vel]


class _Stepper:
    def __init__(self, problem: ProblemSpec, grid: GridSpec, scheme: SpatialScheme):
        if problem.dims != grid.dims:
            raise GridError(f"{problem.kind} is {problem.dims}D but the grid is {grid.dims}D")
        self.problem = problem
        self.grid = grid
        self.scheme = scheme
        self.velocity = _grid_velocity(problem, grid)

    def _rate(self, u: np.ndarray, backward: bool) -> np.ndarray:
        h = self.grid.h
        vel = self.velocity if self.velocity is not None else [u] * u.ndim
        out = np.zeros_like(u)
        for axis, c in enumerate(vel):
            out += c * self.scheme.derivative(u, axis, h, backward=backward)
        return out

    def step(self, u: np.ndarray, dt: float) -> np.ndarray:
        if dt == 0.0:
            return u.copy()
        pred = u + dt * self._rate(u, backward=False)
        corr = pred + dt * self._rate(pred, backward=True)
        return 0.5 * (u + corr)


def maccormack_step(u: ScalarField, problem: ProblemSpec, cfg: TimeIntegrationConfig) -> ScalarField:
    stepper = _Stepper(problem, u.grid, cfg.scheme)
    new = stepper.step(u.values, cfg.dt)
    if not np.all(np.isfinite(new)):
        raise BlowUpError(1)
    return ScalarField(u.grid, new)


@dataclass
class SolveResult:
    field: ScalarField
    times: np.ndarray
    max_norms: np.ndarray
    config: TimeIntegrationConfig

    @property
    def final_time(self) -> float:
        return float(self.times[-1])


def run_steps(u0: ScalarField, problem: ProblemSpec, cfg: TimeIntegrationConfig) -> ScalarField:
    return solve(problem, cfg, u0=u0, record=False).field


def solve(
    problem: ProblemSpec,
    cfg: TimeIntegrationConfig,
    u0: ScalarField | None = None,
    record: bool = True,
    callback=None,
) -> SolveResult:
    """March ``cfg.n_steps`` steps, recording the max norm after each one."""
    if u0 is None:
        u0 = initial_field(problem)
    stepper = _Stepper(problem, u0.grid, cfg.scheme)
    u = u0.values.astype(float, copy=True)
    norms = [float(np.max(np.abs(u)))]
    for k in range(1, cfg.n_steps + 1):
        # overflow is caught below as a non-finite peak
        with np.errstate(over="ignore", invalid="ignore"):
            u = stepper.step(u, cfg.dt)
        peak = float(np.max(np.abs(u)))
        if not math.isfinite(peak):
            raise BlowUpError(k, norms)
        if record:
            norms.append(peak)
        if callback is not None:
            callback(k, u)
    if not record:
        norms.append(float(np.max(np.abs(u))))
        times = np.array([0.0, cfg.n_steps * cfg.dt])
    else:
        times = cfg.dt * np.arange(cfg.n_steps + 1)
    return SolveResult(ScalarField(u0.grid, u), times, np.array(norms), cfg)


def stable_dt(problem: ProblemSpec, scheme: SpatialScheme, n: int | None = None, safety: float = DT_SAFETY) -> float:
    """``safety`` times the analytic limit for the problem's peak velocity components."""
    u0 = initial_field(problem, n)
    speeds = axis_speeds(problem, u0)
    report = analytic_limits(speeds, scheme=scheme)
    return safety * report.limit_md * u0.grid.h / max(speeds)


def make_config(
    problem: ProblemSpec,
    scheme: SpatialScheme,
    n: int | None = None,
    dt: float | None = None,
    final_time: float | None = None,
) -> TimeIntegrationConfig:
    """Config reaching ``final_time`` exactly with a step no larger than ``dt``."""
    t_final = problem.final_time if final_time is None else final_time
    if dt is None:
        dt = stable_dt(problem, scheme, n)
    if t_final == 0.0:
        return TimeIntegrationConfig(dt=dt, n_steps=0, scheme=scheme)
    n_steps = max(1, math.ceil(t_final / dt - 1e-9))
    return TimeIntegrationConfig(dt=t_final / n_steps, n_steps=n_steps, scheme=scheme)


# ---------------------------------------------------------------------------
# exact solutions


def exact_circular(t: float, problem: ProblemSpec, n: int | None = None) -> ScalarField:
    """The initial Gaussian carried around the origin at angular rate pi/2.

    Characteristics of ``u_t = c . grad(u)`` move with ``-c``, which for this
    field is a counter-clockwise rotation.
    """
    if problem.kind != "circular-advection":
        raise ValueError("exact_circular needs the circular-advection problem")
    grid = problem.grid(n)
    x, y = grid.mesh()
    angle = ROTATION_RATE * t
    ca, sa = math.cos(angle), math.sin(angle)
    return ScalarField(grid, problem.gaussian(x * ca + y * sa, -x * sa + y * ca))


def rotated_center(t: float, problem: ProblemSpec) -> tuple[float, float]:
    x0, y0 = problem.center
    angle = ROTATION_RATE * t
    return (x0 * math.cos(angle) - y0 * math.sin(angle), x0 * math.sin(angle) + y0 * math.cos(angle))


def _wrap(x, lower: float, period: float):
    return (np.asarray(x) - lower) % period + lower


def exact_translation(t: float, problem: ProblemSpec, n: int | None = None) -> ScalarField:
    """``u0(x + c t)`` for constant velocity, wrapped periodically."""
    if problem.velocity is None or problem.kind not in ("advection-2d", "advection-3d"):
        raise ValueError("exact_translation needs a constant-velocity problem")
    grid = problem.grid(n)
    coords = [_wrap(x + c * t, problem.lower, problem.period) for x, c in zip(grid.mesh(), problem.velocity)]
    return ScalarField(grid, problem.gaussian(*coords))


def _diagonal_profile(problem: ProblemSpec):
    """Initial data along ``x = y`` as a function of ``x`` (periodically wrapped)."""
    k = math.log(2.0) if problem.log2_gaussian else 1.0
    w2 = problem.width**2
    amp = problem.amplitude

    def g(x):
        xw = _wrap(x, problem.lower, problem.period)
        return amp * np.exp(-2.0 * k * xw**2 / w2) + problem.offset

    def dg(x):
        xw = _wrap(x, problem.lower, problem.period)
        return -amp * (4.0 * k * xw / w2) * np.exp(-2.0 * k * xw**2 / w2)

    return g, dg


def burgers_shock_time(problem: ProblemSpec) -> float:
    """First time characteristics on the diagonal cross."""
    k = math.log(2.0) if problem.log2_gaussian else 1.0
    # steepest ascent of amp*exp(-2k x^2/w^2) sits at x = -w/(2 sqrt(k))
    slope = abs(problem.amplitude) * 2.0 * math.sqrt(k) / problem.width * math.exp(-0.5)
    return math.inf if slope == 0.0 else 1.0 / slope


def exact_burgers_diagonal(t: float, s: float, problem: ProblemSpec | None = None, tol: float = 1e-12) -> float:
    """Solution of ``u = g(s + sqrt(2) u t)`` on the diagonal ``x = y = s / sqrt(2)``."""
    problem = problem or burgers_2d()
    t_star = burgers_shock_time(problem)
    if t >= t_star:
        raise MultivaluedSolutionError(t, t_star)
    g, dg = _diagonal_profile(problem)
    x = s / math.sqrt(2.0)
    if t == 0.0:
        return float(g(x))

    def resid(u):
        return u - float(g(x + u * t))

    lo = problem.offset + min(0.0, problem.amplitude)
    hi = problem.offset + max(0.0, problem.amplitude)
    if resid(lo) >= 0.0:
        return lo
    if resid(hi) <= 0.0:
        return hi
    u = float(g(x))
    for _ in range(200):
        f = resid(u)
        if f < 0.0:
            lo = u
        else:
            hi = u
        slope = 1.0 - float(dg(x + u * t)) * t
        step_ok = slope != 0.0
        trial = u - f / slope if step_ok else 0.5 * (lo + hi)
        if not lo < trial < hi:
            trial = 0.5 * (lo + hi)
        if abs(trial - u) <= tol:
            return trial
        u = trial
    return u


def diagonal_line(field: ScalarField) -> tuple[np.ndarray, np.ndarray]:
    """Node values on ``x = y`` and their diagonal coordinate ``s = sqrt(2) x``."""
    grid = field.grid
    if grid.dims != 2 or grid.n_per_axis[0] != grid.n_per_axis[1]:
        raise GridError("diagonal extraction needs a square 2D grid")
    x = grid.axis_coordinates(0)
    return math.sqrt(2.0) * x, np.diagonal(field.values).copy()


def error_norms(numeric: ScalarField, exact: ScalarField) -> tuple[float, float]:
    if numeric.grid != exact.grid:
        raise GridError("fields live on different grids")
    diff = np.asarray(numeric.values) - np.asarray(exact.values)
    h = numeric.grid.h
    l2 = math.sqrt(h**numeric.grid.dims * float(np.sum(np.abs(diff) ** 2)))
    return l2, float(np.max(np.abs(diff)))


def peak_location(field: ScalarField) -> tuple[float, ...]:
    idx = np.unravel_index(int(np.argmax(field.values)), field.values.shape)
    return tuple(field.grid.axis_coordinates(a)[i] for a, i in enumerate(idx))
