"""Von Neumann analysis of MacCormack time marching with prefactored operators.

The amplification factor of one predictor-corrector step is::

    G = 1/2 [1 + (1 - sum_i s_i psi_i) (1 + sum_i s_i conj(psi_i))]

where ``psi_i`` is the forward Fourier image along axis ``i`` and ``s_i`` the
Courant number along that axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from ._golden import golden_section
from .scheme import SpatialScheme
from .spectral import fourier_symbol, md_wavenumber, numerical_wavenumber

XI_SCAN_POINTS = {1: 2001, 2: 2001, 3: 101}
XI_TOL = 1e-8


class UndefinedLimitError(ValueError):
    pass


class AllUnstableError(RuntimeError):
    pass


class Condition(NamedTuple):
    satisfied: bool
    margin: float


@dataclass(frozen=True)
class CflNumbers:
    sigma: tuple[float, ...]

    @classmethod
    def from_velocity(cls, c: Sequence[float], dt: float, h: float) -> "CflNumbers":
        return cls(tuple(abs(ci) * dt / h for ci in c))

    def __post_init__(self) -> None:
        object.__setattr__(self, "sigma", tuple(float(s) for s in self.sigma))
        if any(s < 0.0 for s in self.sigma):
            raise ValueError("Courant numbers are non-negative")


@dataclass
class StabilityReport:
    scheme: str
    xi_max: float
    limit_1d: float
    limit_diagonal: float
    limit_md: float | None = None
    restriction: str = ""
    limit_hong: Condition | None = None
    heuristic_3d: float | None = None
    empirical_limit: float | None = None
    max_abs_G: float | None = None
    extra: dict = field(default_factory=dict)

    def items(self) -> list[tuple[str, object]]:
        rows = [
            ("scheme", self.scheme),
            ("xi_max", self.xi_max),
            ("limit_1d", self.limit_1d),
            ("limit_diagonal", self.limit_diagonal),
            ("limit_md", self.limit_md),
            ("restriction", self.restriction),
        ]
        if self.limit_hong is not None:
            rows += [("hong_satisfied", self.limit_hong.satisfied), ("hong_margin", self.limit_hong.margin)]
        rows += [
            ("heuristic_3d", self.heuristic_3d),
            ("empirical_limit", self.empirical_limit),
            ("max_abs_G", self.max_abs_G),
        ]
        rows += sorted(self.extra.items())
        return rows


def _as_scheme(order: int | None, beta: float, scheme: SpatialScheme | None) -> SpatialScheme:
    if scheme is not None:
        return scheme
    return SpatialScheme("compact", order, beta)


# ---------------------------------------------------------------------------
# maximum numerical wavenumber


def _real_wavenumber(scheme: SpatialScheme, eta: Sequence):
    if scheme.family == "compact":
        return md_wavenumber(scheme.order, scheme.beta if len(eta) > 1 else 0.0, eta)
    return numerical_wavenumber(scheme, scheme.beta, eta, 0, "centered").real


def xi_max(order: int | None = 4, beta: float = 0.0, dims: int = 1, scheme: SpatialScheme | None = None) -> float:
    """Maximum real numerical wavenumber over the resolvable box ``[0, pi]**dims``."""
    scheme = _as_scheme(order, beta, scheme)
    if beta == 0.0 and scheme.beta == 0.0:
        dims = 1
    n = XI_SCAN_POINTS[dims]
    axes = np.linspace(0.0, math.pi, n)
    mesh = np.meshgrid(*([axes] * dims), indexing="ij")
    values = _real_wavenumber(scheme, mesh)
    k = np.unravel_index(int(np.argmax(values)), values.shape)
    point = [float(axes[i]) for i in k]
    spacing = axes[1] - axes[0]

    # coordinate-wise golden refinement around the best scan node
    for _ in range(3 if dims > 1 else 1):
        for ax in range(dims):
            def neg(x, ax=ax):
                trial = list(point)
                trial[ax] = x
                return -float(_real_wavenumber(scheme, trial))

            lo = max(point[ax] - spacing, 0.0)
            hi = min(point[ax] + spacing, math.pi)
            point[ax], _ = golden_section(neg, lo, hi, tol=XI_TOL)
    best = float(_real_wavenumber(scheme, point))
    return max(best, float(np.max(values)))


# ---------------------------------------------------------------------------
# amplification factor


def amplification_factor(
    sigma: CflNumbers | Sequence[float],
    eta_vec: Sequence,
    order: int | None = 4,
    beta: float = 0.0,
    scheme: SpatialScheme | None = None,
):
    scheme = _as_scheme(order, beta, scheme)
    s = sigma.sigma if isinstance(sigma, CflNumbers) else tuple(sigma)
    if len(s) != len(eta_vec):
        raise ValueError("need one Courant number per wavenumber component")
    source = scheme if scheme.family == "explicit" else scheme.coeffs
    total = 0.0
    for axis, si in enumerate(s):
        if si == 0.0:
            continue
        total = total + si * fourier_symbol(source, scheme.beta, eta_vec, axis, "forward")
    g = 0.5 * (1.0 + (1.0 - total) * (1.0 + np.conj(total)))
    return g if np.ndim(g) else complex(g)


def max_amplification(
    sigma: CflNumbers | Sequence[float],
    order: int | None = 4,
    beta: float = 0.0,
    n: int = 201,
    scheme: SpatialScheme | None = None,
) -> float:
    s = sigma.sigma if isinstance(sigma, CflNumbers) else tuple(sigma)
    axes = np.linspace(-math.pi, math.pi, n)
    mesh = np.meshgrid(*([axes] * len(s)), indexing="ij")
    g = amplification_factor(s, mesh, order, beta, scheme)
    return float(np.max(np.abs(g)))


def scanned_limit(
    direction: Sequence[float],
    order: int | None = 4,
    beta: float = 0.0,
    n: int = 201,
    scheme: SpatialScheme | None = None,
    tol: float = 1e-6,
    hi: float = 4.0,
) -> float:
    """Largest ``s`` with ``max|G| <= 1`` for Courant numbers ``s * direction``."""
    d = np.asarray(direction, dtype=float)
    d = d / np.max(np.abs(d))
    lo = 0.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if max_amplification(tuple(mid * d), order, beta, n, scheme) <= 1.0 + 1e-12:
            lo = mid
        else:
            hi = mid
    return lo


# ---------------------------------------------------------------------------
# analytic conditions


def wendroff_condition(sigma_x: float, sigma_y: float) -> Condition:
    lhs = sigma_x**2 * sigma_y**2 + sigma_x**2 + sigma_y**2
    margin = 0.125 - lhs
    return Condition(margin >= 0.0, margin)


def hong_condition(sigma_x: float, sigma_y: float, xi: float = 1.0) -> Condition:
    margin = 1.0 / xi - (sigma_x ** (2.0 / 3.0) + sigma_y ** (2.0 / 3.0))
    return Condition(margin >= 0.0, margin)


def md_condition(sigma_x: float, sigma_y: float, xi: float, beta: float) -> tuple[Condition, str]:
    """Restriction for multidimensional schemes, picked by the dominant Courant number."""
    rhs = (1.0 + beta) ** (2.0 / 3.0) / xi
    if sigma_x >= sigma_y:
        lhs = (sigma_x * (1.0 + beta)) ** (2.0 / 3.0) + sigma_y ** (2.0 / 3.0)
        tag = "x-dominant"
    else:
        lhs = sigma_x ** (2.0 / 3.0) + (sigma_y * (1.0 + beta)) ** (2.0 / 3.0)
        tag = "y-dominant"
    margin = rhs - lhs
    return Condition(margin >= 0.0, margin), tag


def restriction_limit(xi: float, beta: float, ratio: float) -> float:
    """Largest dominant Courant number allowed when the minor one is ``ratio`` times it.

    Reduces to the one-dimensional-operator condition at ``beta = 0`` and to the
    diagonal restriction at ``ratio = 1``.
    """
    if not 0.0 <= ratio <= 1.0:
        raise ValueError("ratio must lie in [0, 1]")
    k = (1.0 + beta) ** (2.0 / 3.0)
    return (1.0 + beta) / (xi**1.5 * (k + ratio ** (2.0 / 3.0)) ** 1.5)


def diagonal_limit(xi: float, beta: float) -> float:
    return (1.0 + beta) / (xi**1.5 * (1.0 + (1.0 + beta) ** (2.0 / 3.0)) ** 1.5)


def heuristic_limit_3d(xi: float, c: Sequence[float]) -> float:
    """Dominant Courant number allowed by ``sum s_i**(2/3) <= 1/xi`` (a heuristic in 3D)."""
    c = np.abs(np.asarray(c, dtype=float))
    ratios = c / np.max(c)
    return float((1.0 / (xi * np.sum(ratios ** (2.0 / 3.0)))) ** 1.5)


def analytic_limits(
    c: Sequence[float],
    order: int | None = 4,
    beta: float = 0.0,
    scheme: SpatialScheme | None = None,
    xi: float | None = None,
) -> StabilityReport:
    """Analytic Courant limits for advection with velocity ``c``.

    ``limit_md`` is the largest dominant Courant number ``max_i |c_i| k / h``
    admitted by the applicable restriction.
    """
    scheme = _as_scheme(order, beta, scheme)
    c = [abs(float(v)) for v in c]
    if not c or max(c) == 0.0:
        raise UndefinedLimitError("stability limit is undefined for zero velocity")
    if xi is None:
        xi = xi_max(scheme=scheme)
    b = scheme.beta
    report = StabilityReport(
        scheme=scheme.name,
        xi_max=xi,
        limit_1d=1.0 / xi,
        limit_diagonal=diagonal_limit(xi, b),
    )
    if len(c) == 1:
        report.limit_md = 1.0 / xi
        report.restriction = "1d"
    elif len(c) == 2:
        major = max(c)
        ratio = min(c) / major
        report.limit_md = restriction_limit(xi, b, ratio)
        report.restriction = ("x-dominant" if c[0] >= c[1] else "y-dominant") if b > 0.0 else "one-dimensional-pair"
    else:
        report.heuristic_3d = heuristic_limit_3d(xi, c)
        report.limit_md = report.heuristic_3d
        report.restriction = "3d-heuristic"
    return report


def stability_report(
    c: Sequence[float],
    sigma: Sequence[float] | None = None,
    order: int | None = 4,
    beta: float = 0.0,
    scheme: SpatialScheme | None = None,
    n: int = 201,
) -> StabilityReport:
    """Analytic limits plus the Hong margin and ``max|G|`` at the given Courant numbers."""
    scheme = _as_scheme(order, beta, scheme)
    report = analytic_limits(c, scheme=scheme)
    if sigma is not None:
        if len(sigma) == 2:
            report.limit_hong = hong_condition(sigma[0], sigma[1], report.xi_max)
        report.max_abs_G = max_amplification(tuple(sigma), scheme=scheme, n=n)
    return report


# ---------------------------------------------------------------------------
# empirical limit


def empirical_cfl(
    problem,
    scheme: SpatialScheme,
    grid_n: int | None = None,
    horizon: int | None = 50,
    growth: float = 10.0,
    tol: float = 1e-3,
    bracket: tuple[float, float] = (0.0, 4.0),
) -> float:
    """Largest Courant number whose run stays below ``growth`` times the initial peak.

    The Courant number is ``max |velocity| * dt / h`` over the initial grid.
    ``horizon`` counts steps; ``None`` marches to the problem's final time.
    """
    from .solver import BlowUpError, TimeIntegrationConfig, initial_field, reference_speed, run_steps

    u0 = initial_field(problem, grid_n)
    h = u0.grid.h
    speed = reference_speed(problem, u0)
    peak = float(np.max(np.abs(u0.values)))

    def stable(sigma: float) -> bool:
        dt = sigma * h / speed
        steps = horizon if horizon is not None else max(1, math.ceil(problem.final_time / dt))
        cfg = TimeIntegrationConfig(dt=dt, n_steps=steps, scheme=scheme)
        try:
            u = run_steps(u0, problem, cfg)
        except BlowUpError:
            return False
        return float(np.max(np.abs(u.values))) <= growth * peak

    lo, hi = bracket
    if stable(hi):
        return hi
    found = False
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if stable(mid):
            lo, found = mid, True
        else:
            hi = mid
    # the bottom of the bracket is probed last: with a full-time horizon it is the costliest run
    if not found and not stable(lo + tol):
        raise AllUnstableError(
            f"{scheme.name} is unstable already at Courant number {lo + tol:g} on {problem.kind}"
        )
    return lo if found else lo + tol
