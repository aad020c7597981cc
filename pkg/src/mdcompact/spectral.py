"""Numerical wavenumbers, phase/group velocity and the isotropy corrector factor.

Conventions: the Fourier image ``psi`` of a derivative operator is ``h`` times
its eigenvalue on ``exp(i k x)``, so the exact derivative has ``psi = i k h``.
The numerical wavenumber is ``(kh)* = -i psi``; its real part carries the
dispersion and its imaginary part the dissipation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from ._golden import golden_section
from .scheme import (
    EXPLICIT_FORWARD,
    SchemeCoefficients,
    SpatialScheme,
    UnsupportedOrderError,
    diagonal_weight,
    make_coefficients,
)

SINGULAR_TOL = 1e-14
FD_STEP = 1e-6
ICF_BRACKET = (0.0, 2.0)
ICF_TOL = 1e-8


class SingularSymbolError(ArithmeticError):
    pass


class ResolvabilityError(ValueError):
    pass


class IcfBracketError(RuntimeError):
    def __init__(self, message: str, betas: np.ndarray, values: np.ndarray):
        super().__init__(message)
        self.betas = betas
        self.values = values


@dataclass(frozen=True)
class SpectralPoint:
    eta: tuple[float, ...]
    ppw: float
    theta: float

    @classmethod
    def from_polar(cls, ppw: float, theta: float) -> "SpectralPoint":
        _check_ppw(ppw)
        mag = 2.0 * math.pi / ppw
        return cls((mag * math.cos(theta), mag * math.sin(theta)), ppw, theta)


@dataclass(frozen=True)
class SpectralSample:
    point: SpectralPoint
    kh_real: float
    kh_imag: float
    phase_velocity: float
    group_velocity: tuple[float, float]

    @property
    def group_speed(self) -> float:
        return math.hypot(*self.group_velocity)

    @property
    def group_angle(self) -> float:
        return math.atan2(self.group_velocity[1], self.group_velocity[0])


def _check_ppw(ppw: float) -> None:
    if not ppw >= 2.0:
        raise ResolvabilityError(f"points per wavelength must be >= 2, got {ppw}")


def _check_order(order: int) -> None:
    if order not in (4, 6):
        raise UnsupportedOrderError(f"unsupported order {order!r}; supported orders are (4, 6)")


# ---------------------------------------------------------------------------
# closed forms


def wavenumber_1d(order: int, eta):
    """Real numerical wavenumber of the one-dimensional prefactored scheme."""
    _check_order(order)
    eta = np.asarray(eta, dtype=float)
    if order == 4:
        out = 3.0 * np.sin(eta) / (2.0 + np.cos(eta))
    else:
        out = (28.0 * np.sin(eta) + np.sin(2.0 * eta)) / (18.0 + 12.0 * np.cos(eta))
    return out if out.ndim else float(out)


def md_wavenumber(order: int, beta: float, eta_vec: Sequence):
    """Real numerical wavenumber of the multidimensional scheme, derivative along the first component."""
    eta_vec = [np.asarray(v, dtype=float) for v in eta_vec]
    ex, transverse = eta_vec[0], eta_vec[1:]
    if not transverse:
        return wavenumber_1d(order, ex)
    w = diagonal_weight(len(eta_vec), beta)
    acc = wavenumber_1d(order, ex)
    for et in transverse:
        acc = acc + w * (wavenumber_1d(order, ex + et) + wavenumber_1d(order, ex - et))
    out = np.asarray(acc / (1.0 + beta))
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# exact rational symbols


def _line_image(coeffs: Union[SchemeCoefficients, SpatialScheme], theta):
    """Forward Fourier image of a line operator at phase increment ``theta``."""
    z = np.exp(1j * np.asarray(theta, dtype=float))
    if isinstance(coeffs, SpatialScheme):
        if coeffs.family == "explicit":
            return sum(w * z**k for k, w in EXPLICIT_FORWARD[coeffs.order].items())
        coeffs = coeffs.coeffs
    num = coeffs.b * z - coeffs.e - coeffs.f / z
    den = coeffs.a * z + coeffs.diagonal + coeffs.c / z
    if np.any(np.abs(den) < SINGULAR_TOL):
        raise SingularSymbolError("implicit side of the scheme has a vanishing Fourier image")
    return num / den


def fourier_symbol(
    coeffs: Union[SchemeCoefficients, SpatialScheme],
    beta: float,
    eta: Sequence,
    axis: int = 0,
    direction: str = "forward",
):
    """Fourier image of the forward or backward (multidimensional) operator.

    ``eta`` holds one phase increment per grid axis; components may be arrays.
    The backward image is minus the complex conjugate of the forward image.
    """
    if direction not in ("forward", "backward"):
        raise ValueError(f"direction must be 'forward' or 'backward', got {direction!r}")
    eta = [np.asarray(v, dtype=float) for v in eta]
    if not 0 <= axis < len(eta):
        raise ValueError(f"axis {axis} out of range for {len(eta)} components")
    ea = eta[axis]
    psi = _line_image(coeffs, ea)
    if len(eta) > 1 and beta != 0.0:
        w = diagonal_weight(len(eta), beta)
        diag = 0.0
        for t, et in enumerate(eta):
            if t == axis:
                continue
            diag = diag + _line_image(coeffs, ea + et) + _line_image(coeffs, ea - et)
        psi = (psi + w * diag) / (1.0 + beta)
    if direction == "backward":
        psi = -np.conj(psi)
    return psi if np.ndim(psi) else complex(psi)


def numerical_wavenumber(coeffs, beta, eta, axis=0, direction="forward"):
    """Complex ``(kh)*``; ``direction='centered'`` averages the forward and backward operators."""
    if direction == "centered":
        psi = 0.5 * (fourier_symbol(coeffs, beta, eta, axis, "forward") + fourier_symbol(coeffs, beta, eta, axis, "backward"))
    else:
        psi = fourier_symbol(coeffs, beta, eta, axis, direction)
    return -1j * psi


# ---------------------------------------------------------------------------
# phase and group velocity


def _rotated(eta: Sequence[float], axis: int) -> list:
    return [eta[axis]] + [e for i, e in enumerate(eta) if i != axis]


def dispersion(order: int, beta: float, eta: Sequence, direction: Sequence[float]):
    """Semi-discrete frequency (times h) for advection along ``direction``."""
    return sum(d * md_wavenumber(order, beta, _rotated(eta, i)) for i, d in enumerate(direction))


def phase_velocity_along(order: int, beta: float, eta_mag: float, direction: Sequence[float]) -> float:
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)
    return float(dispersion(order, beta, eta_mag * d, d) / eta_mag)


def phase_velocity(order: int, beta: float, ppw: float, theta: float) -> float:
    _check_order(order)
    _check_ppw(ppw)
    eta_mag = 2.0 * math.pi / ppw
    return phase_velocity_along(order, beta, eta_mag, (math.cos(theta), math.sin(theta)))


def group_velocity(order: int, beta: float, ppw: float, theta: float) -> np.ndarray:
    """Gradient of the numerical frequency with respect to the wave vector."""
    _check_order(order)
    _check_ppw(ppw)
    mag = 2.0 * math.pi / ppw
    d = np.array([math.cos(theta), math.sin(theta)])
    eta = mag * d
    grad = np.empty(2)
    for k in range(2):
        step = np.zeros(2)
        step[k] = FD_STEP
        grad[k] = (dispersion(order, beta, eta + step, d) - dispersion(order, beta, eta - step, d)) / (2.0 * FD_STEP)
    return grad


# ---------------------------------------------------------------------------
# isotropy corrector factor


def main_diagonal(dims: int) -> np.ndarray:
    return np.ones(dims) / math.sqrt(dims)


def anisotropy_gap(order: int, beta: float, ppw: float, dims: int) -> float:
    """Axis-aligned minus main-diagonal normalised dispersion error."""
    eta_mag = 2.0 * math.pi / ppw
    axis = np.zeros(dims)
    axis[0] = 1.0
    e_axis = phase_velocity_along(order, beta, eta_mag, axis) - 1.0
    e_diag = phase_velocity_along(order, beta, eta_mag, main_diagonal(dims)) - 1.0
    return e_axis - e_diag


def optimize_icf(order: int, ppw: float, dims: int = 2) -> float:
    """Isotropy corrector factor equalising axis and diagonal dispersion errors."""
    _check_order(order)
    _check_ppw(ppw)
    if dims not in (2, 3):
        raise ValueError(f"dims must be 2 or 3, got {dims}")

    def objective(beta: float) -> float:
        return anisotropy_gap(order, beta, ppw, dims) ** 2

    lo, hi = ICF_BRACKET
    betas = np.linspace(lo, hi, 41)
    values = np.array([objective(b) for b in betas])
    k = int(np.argmin(values))
    if k == len(betas) - 1:
        raise IcfBracketError(
            f"no interior minimum of the anisotropy objective in [{lo}, {hi}] at ppw={ppw}", betas, values
        )
    a = betas[max(k - 1, 0)]
    b = betas[min(k + 1, len(betas) - 1)]
    beta, _ = golden_section(objective, a, b, tol=ICF_TOL)
    return max(beta, 0.0)


def icf_curve(order: int, ppw_values: Sequence[float], dims: int = 2) -> list[tuple[float, float]]:
    return [(float(p), optimize_icf(order, p, dims)) for p in ppw_values]


def polar_diagram(order: int, beta: float, ppw_list: Sequence[float], n_theta: int) -> list[SpectralSample]:
    if n_theta < 8:
        raise ValueError(f"n_theta must be at least 8, got {n_theta}")
    coeffs = make_coefficients(order)
    rows = []
    for ppw in ppw_list:
        for m in range(n_theta):
            theta = 2.0 * math.pi * m / n_theta
            point = SpectralPoint.from_polar(ppw, theta)
            d = (math.cos(theta), math.sin(theta))
            kh = sum(
                d[i] * numerical_wavenumber(coeffs, beta, point.eta, axis=i, direction="centered")
                for i in range(2)
            )
            gv = group_velocity(order, beta, ppw, theta)
            rows.append(
                SpectralSample(
                    point=point,
                    kh_real=float(kh.real),
                    kh_imag=float(kh.imag),
                    phase_velocity=phase_velocity(order, beta, ppw, theta),
                    group_velocity=(float(gv[0]), float(gv[1])),
                )
            )
    return rows


def phase_spread(order: int, beta: float, ppw: float, n_theta: int = 64) -> float:
    """Max minus min phase velocity over propagation angles."""
    v = [phase_velocity(order, beta, ppw, 2.0 * math.pi * m / n_theta) for m in range(n_theta)]
    return max(v) - min(v)
