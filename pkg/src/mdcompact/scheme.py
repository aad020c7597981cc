"""Prefactored compact derivative operators on periodic grids.

The fourth- and sixth-order prefactored schemes split a centered compact
derivative into a forward-biased and a backward-biased operator.  With
``c = 0`` each operator is a cyclic bidiagonal system that is solved by a
single sweep across the grid.

For the forward operator along ``x`` the defining relation is::

    a D[i+1] + (1 - a) D[i] = (b u[i+1] - e u[i] - f u[i-1]) / h

and the backward operator is its mirror image::

    a D[i-1] + (1 - a) D[i] = (f u[i+1] + e u[i] - b u[i-1]) / h

Solving for ``D[i]`` gives a recursion with coefficient ``-a / (1 - a)``,
whose magnitude is below one, so the forward sweep marches from high to low
index and the backward sweep from low to high index.

Multidimensional operators blend the line operator along the derivative axis
with the same operator applied along the diagonal lines through each node,
weighted by the isotropy corrector factor ``beta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.signal import lfilter

SUPPORTED_ORDERS = (4, 6)
MIN_POINTS = 4

# ring-pass closure for diagonal sweeps whose wrap-around is shifted
CLOSURE_TOL = 1e-13
CLOSURE_MAX_PASSES = 200


class UnsupportedOrderError(ValueError):
    pass


class GridError(ValueError):
    pass


@dataclass(frozen=True)
class SchemeCoefficients:
    """Coefficients of one prefactored compact scheme."""

    order: int
    a: float
    b: float
    c: float = 0.0

    @property
    def alpha(self) -> float:
        return (self.a + self.c - 1.0) / self.a

    @property
    def e(self) -> float:
        return 2.0 * self.b - 1.0

    @property
    def f(self) -> float:
        return 1.0 - self.b

    @property
    def diagonal(self) -> float:
        return 1.0 - self.a - self.c

    @property
    def ratio(self) -> float:
        """Recursion coefficient of the stable sweep, ``-a / (1 - a - c)``."""
        return -self.a / self.diagonal


def make_coefficients(order: int) -> SchemeCoefficients:
    if order == 4:
        a = 0.5 - 1.0 / (2.0 * math.sqrt(3.0))
        return SchemeCoefficients(order=4, a=a, b=1.0, c=0.0)
    if order == 6:
        a = 0.5 - 1.0 / (2.0 * math.sqrt(5.0))
        return SchemeCoefficients(order=6, a=a, b=1.0 - 1.0 / (30.0 * a), c=0.0)
    raise UnsupportedOrderError(
        f"unsupported order {order!r}; supported orders are {SUPPORTED_ORDERS}"
    )


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic Cartesian grid with a single spacing ``h``."""

    n_per_axis: tuple[int, ...]
    lengths: tuple[float, ...]
    origin: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        n = tuple(int(v) for v in self.n_per_axis)
        lengths = tuple(float(v) for v in self.lengths)
        object.__setattr__(self, "n_per_axis", n)
        object.__setattr__(self, "lengths", lengths)
        if not 1 <= len(n) <= 3:
            raise GridError(f"grid must have 1 to 3 axes, got {len(n)}")
        if len(lengths) != len(n):
            raise GridError("lengths and n_per_axis differ in length")
        if any(v < MIN_POINTS for v in n):
            raise GridError(f"every axis needs at least {MIN_POINTS} points, got {n}")
        if any(v <= 0.0 for v in lengths):
            raise GridError("axis lengths must be positive")
        h = lengths[0] / n[0]
        for length, count in zip(lengths, n):
            if not math.isclose(length / count, h, rel_tol=1e-12):
                raise GridError("all axes must share the same spacing h")
        if not self.origin:
            object.__setattr__(self, "origin", (0.0,) * len(n))
        elif len(self.origin) != len(n):
            raise GridError("origin and n_per_axis differ in length")
        else:
            object.__setattr__(self, "origin", tuple(float(v) for v in self.origin))

    @classmethod
    def cube(cls, n: int, dims: int, lower: float, upper: float) -> "GridSpec":
        return cls((n,) * dims, (upper - lower,) * dims, (lower,) * dims)

    @property
    def dims(self) -> int:
        return len(self.n_per_axis)

    @property
    def h(self) -> float:
        return self.lengths[0] / self.n_per_axis[0]

    @property
    def shape(self) -> tuple[int, ...]:
        return self.n_per_axis

    def axis_coordinates(self, axis: int) -> np.ndarray:
        return self.origin[axis] + self.h * np.arange(self.n_per_axis[axis])

    def mesh(self) -> tuple[np.ndarray, ...]:
        axes = [self.axis_coordinates(i) for i in range(self.dims)]
        return tuple(np.meshgrid(*axes, indexing="ij"))


@dataclass
class ScalarField:
    grid: GridSpec
    values: np.ndarray

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values)
        if self.values.shape != self.grid.shape:
            raise GridError(
                f"values shape {self.values.shape} does not match grid {self.grid.shape}"
            )


@dataclass(frozen=True)
class MdOperatorConfig:
    beta: float
    dims: int = 2

    def __post_init__(self) -> None:
        if self.beta < 0.0:
            raise ValueError("beta must be non-negative")
        if self.dims not in (2, 3):
            raise GridError(f"multidimensional operators need 2 or 3 dims, got {self.dims}")


# ---------------------------------------------------------------------------
# sweeps


def _check_line(n: int, h: float) -> None:
    if n < MIN_POINTS:
        raise GridError(f"need at least {MIN_POINTS} points along the sweep axis, got {n}")
    if not h > 0.0:
        raise GridError(f"spacing must be positive, got {h}")


def _shear_index(n: int, nt: int, step: int, sign: int) -> np.ndarray:
    i = np.arange(n)[:, None]
    j = np.arange(nt)[None, :]
    return (j + sign * step * i) % nt


def _solve_ring(g: np.ndarray, r: float, reverse: bool, wrap: int) -> np.ndarray:
    """Solve ``D[i] = r D[i+1] + g[i]`` (``D[i-1]`` if ``reverse``) along axis 0.

    The line beyond the last one is the first line rolled by ``wrap`` along
    axis 1; ``wrap == 0`` is the ordinary periodic ring.
    """
    n = g.shape[0]
    if reverse:
        # mirror the index so the recursion always reaches upward
        return _solve_ring(g[::-1], r, False, -wrap)[::-1]

    powers = r ** np.arange(n)
    seed = np.tensordot(powers, g, axes=(0, 0)) / (1.0 - r**n)
    b, a = [1.0], [1.0, -r]
    rev = g[::-1]
    if wrap == 0 or g.ndim < 2:
        out, _ = lfilter(b, a, rev, axis=0, zi=(r * seed)[None])
        return out[::-1]

    for _ in range(CLOSURE_MAX_PASSES):
        tail = np.roll(seed, -wrap, axis=0)
        out, _ = lfilter(b, a, rev, axis=0, zi=(r * tail)[None])
        new_seed = out[-1]
        change = np.max(np.abs(new_seed - seed))
        scale = max(1.0, float(np.max(np.abs(new_seed))))
        seed = new_seed
        if change <= CLOSURE_TOL * scale:
            break
    else:  # pragma: no cover - contraction factor is |r|**n
        raise RuntimeError("periodic closure of diagonal sweep did not converge")
    return out[::-1]


def _sweep(
    g: np.ndarray,
    r: float,
    axis: int,
    reverse: bool,
    transverse: int | None = None,
    step: int = 0,
) -> np.ndarray:
    """Periodic first-order recursion along ``axis``.

    With ``transverse`` set, the recursion links node ``(i, j)`` to
    ``(i + 1, j + step)`` (or ``(i - 1, j - step)`` when ``reverse``), i.e. it
    runs along a diagonal line of the grid.
    """
    if transverse is None or step == 0:
        moved = np.moveaxis(g, axis, 0)
        return np.moveaxis(_solve_ring(moved, r, reverse, 0), 0, axis)

    moved = np.moveaxis(g, (axis, transverse), (0, 1))
    n, nt = moved.shape[:2]
    idx = _shear_index(n, nt, step, +1)
    idx = idx.reshape(idx.shape + (1,) * (moved.ndim - 2))
    sheared = np.take_along_axis(moved, np.broadcast_to(idx, moved.shape), axis=1)
    # the wrap-around of a diagonal lands n * step columns away
    wrap = (n * step) % nt
    solved = _solve_ring(sheared, r, reverse, wrap)
    back = _shear_index(n, nt, step, -1)
    back = back.reshape(back.shape + (1,) * (moved.ndim - 2))
    unsheared = np.take_along_axis(solved, np.broadcast_to(back, moved.shape), axis=1)
    return np.moveaxis(unsheared, (0, 1), (axis, transverse))


def _shifted(u: np.ndarray, offset: int, axis: int, transverse: int | None, step: int) -> np.ndarray:
    """Values at node ``p + offset * d`` where ``d`` is the line direction."""
    if offset == 0:
        return u
    if transverse is None or step == 0:
        return np.roll(u, -offset, axis=axis)
    return np.roll(u, (-offset, -offset * step), axis=(axis, transverse))


def compact_line(
    u: np.ndarray,
    h: float,
    coeffs: SchemeCoefficients,
    axis: int,
    backward: bool = False,
    transverse: int | None = None,
    step: int = 0,
) -> np.ndarray:
    """Apply the forward or backward prefactored operator along one family of lines."""
    if coeffs.c != 0.0:
        raise UnsupportedOrderError("only c = 0 schemes can be solved by a single sweep")
    u = np.asarray(u)
    if not np.issubdtype(u.dtype, np.inexact):
        u = u.astype(float)
    _check_line(u.shape[axis], h)
    b, e, f = coeffs.b, coeffs.e, coeffs.f
    up = _shifted(u, 1, axis, transverse, step)
    down = _shifted(u, -1, axis, transverse, step)
    if backward:
        rhs = f * up + e * u - b * down
    else:
        rhs = b * up - e * u - f * down
    g = rhs / (coeffs.diagonal * h)
    return _sweep(g, coeffs.ratio, axis, backward, transverse, step)


def forward_derivative_line(samples: Sequence[float], h: float, coeffs: SchemeCoefficients) -> np.ndarray:
    u = np.asarray(samples)
    if u.ndim != 1:
        raise GridError("expected a one-dimensional sequence")
    return compact_line(u, h, coeffs, axis=0)


def backward_derivative_line(samples: Sequence[float], h: float, coeffs: SchemeCoefficients) -> np.ndarray:
    u = np.asarray(samples)
    if u.ndim != 1:
        raise GridError("expected a one-dimensional sequence")
    return compact_line(u, h, coeffs, axis=0, backward=True)


def centered_derivative_line(samples: Sequence[float], h: float, coeffs: SchemeCoefficients) -> np.ndarray:
    """Average of the forward and backward operators.

    For order 4 this is the classical tridiagonal Pade derivative
    ``(D[i-1] + 4 D[i] + D[i+1]) / 6 = (u[i+1] - u[i-1]) / (2 h)``.
    """
    return 0.5 * (forward_derivative_line(samples, h, coeffs) + backward_derivative_line(samples, h, coeffs))


def residual_line(
    derivative: np.ndarray, samples: np.ndarray, h: float, coeffs: SchemeCoefficients, backward: bool = False
) -> tuple[np.ndarray, np.ndarray]:
    """Residual of the defining relation and its right-hand side, node by node."""
    d = np.asarray(derivative)
    u = np.asarray(samples)
    a, c, dg = coeffs.a, coeffs.c, coeffs.diagonal
    b, e, f = coeffs.b, coeffs.e, coeffs.f
    up, down = np.roll(u, -1), np.roll(u, 1)
    dup, ddown = np.roll(d, -1), np.roll(d, 1)
    if backward:
        lhs = c * dup + a * ddown + dg * d
        rhs = (f * up + e * u - b * down) / h
    else:
        lhs = a * dup + c * ddown + dg * d
        rhs = (b * up - e * u - f * down) / h
    return lhs - rhs, rhs


# ---------------------------------------------------------------------------
# multidimensional operators


def transverse_lines(ndim: int, axis: int) -> list[tuple[int, int]]:
    """``(transverse axis, step)`` pairs of the diagonal lines through a node."""
    return [(t, s) for t in range(ndim) if t != axis for s in (1, -1)]


def diagonal_weight(dims: int, beta: float) -> float:
    """Weight of each diagonal line relative to the axis line (before normalisation)."""
    return beta / 2.0 if dims == 2 else beta / 4.0


def blend_lines(line_op, u: np.ndarray, axis: int, beta: float, dims: int) -> np.ndarray:
    """``(1/(1+beta)) [L_axis u + w sum_diag L_diag u]`` for a line operator ``L``."""
    total = line_op(u, axis, None, 0)
    w = diagonal_weight(dims, beta)
    diag = None
    for t, s in transverse_lines(u.ndim, axis):
        term = line_op(u, axis, t, s)
        diag = term if diag is None else diag + term
    return (total + w * diag) / (1.0 + beta)


def _md_apply(field: ScalarField, axis: int, coeffs: SchemeCoefficients, cfg: MdOperatorConfig, backward: bool) -> ScalarField:
    grid = field.grid
    if grid.dims < 2:
        raise GridError("multidimensional operators need a 2D or 3D field")
    if not 0 <= axis < grid.dims:
        raise GridError(f"axis {axis} out of range for a {grid.dims}D field")
    if cfg.dims != grid.dims:
        raise GridError(f"operator configured for {cfg.dims}D but field is {grid.dims}D")
    h = grid.h

    def line(u, ax, t, s):
        return compact_line(u, h, coeffs, ax, backward=backward, transverse=t, step=s)

    return ScalarField(grid, blend_lines(line, field.values, axis, cfg.beta, grid.dims))


def md_forward_derivative(field: ScalarField, axis: int, coeffs: SchemeCoefficients, cfg: MdOperatorConfig) -> ScalarField:
    return _md_apply(field, axis, coeffs, cfg, backward=False)


def md_backward_derivative(field: ScalarField, axis: int, coeffs: SchemeCoefficients, cfg: MdOperatorConfig) -> ScalarField:
    return _md_apply(field, axis, coeffs, cfg, backward=True)


# ---------------------------------------------------------------------------
# explicit MacCormack baselines (2-2, 2-4, 2-6)

# forward-biased weights by offset; backward operators are mirror images
EXPLICIT_FORWARD = {
    2: {1: 1.0, 0: -1.0},
    4: {2: -1.0 / 6.0, 1: 8.0 / 6.0, 0: -7.0 / 6.0},
    6: {3: 1.0 / 30.0, 2: -9.0 / 30.0, 1: 45.0 / 30.0, 0: -37.0 / 30.0},
}


def explicit_line(
    u: np.ndarray,
    h: float,
    order: int,
    axis: int,
    backward: bool = False,
    transverse: int | None = None,
    step: int = 0,
) -> np.ndarray:
    try:
        weights = EXPLICIT_FORWARD[order]
    except KeyError:
        raise UnsupportedOrderError(
            f"unsupported explicit order {order!r}; supported orders are {tuple(EXPLICIT_FORWARD)}"
        ) from None
    u = np.asarray(u)
    _check_line(u.shape[axis], h)
    out = np.zeros(u.shape, dtype=np.result_type(u.dtype, float))
    for offset, w in weights.items():
        if backward:
            out -= w * _shifted(u, -offset, axis, transverse, step)
        else:
            out += w * _shifted(u, offset, axis, transverse, step)
    return out / h


# ---------------------------------------------------------------------------
# scheme selection used by the solver and the stability tools


@dataclass(frozen=True)
class SpatialScheme:
    """A forward/backward operator pair: prefactored compact or explicit MacCormack.

    ``multidimensional`` selects the line-blended operator; it defaults to
    ``beta > 0``.  Forcing it on with ``beta = 0`` runs the blended code path,
    which must reproduce the one-dimensional operators exactly.
    """

    family: str
    order: int
    beta: float = 0.0
    multidimensional: bool | None = None
    coeffs: SchemeCoefficients | None = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        if self.family not in ("compact", "explicit"):
            raise ValueError(f"unknown scheme family {self.family!r}")
        if self.beta < 0.0:
            raise ValueError("beta must be non-negative")
        if self.family == "compact":
            object.__setattr__(self, "coeffs", make_coefficients(self.order))
        elif self.order not in EXPLICIT_FORWARD:
            raise UnsupportedOrderError(
                f"unsupported explicit order {self.order!r}; supported orders are {tuple(EXPLICIT_FORWARD)}"
            )
        if self.multidimensional is None:
            object.__setattr__(self, "multidimensional", self.beta > 0.0)

    @classmethod
    def from_name(cls, name: str, beta: float = 0.0) -> "SpatialScheme":
        """Parse ``PC4``, ``MPC6``, ``MC2``, ``MMC4`` and friends."""
        key = name.strip().upper()
        md = key.startswith("MPC") or key.startswith("MMC")
        stem = key[1:] if md else key
        if stem.startswith("PC"):
            family = "compact"
        elif stem.startswith("MC"):
            family = "explicit"
        else:
            raise ValueError(f"unknown scheme name {name!r}")
        order = int(stem[2:])
        if md and beta <= 0.0:
            raise ValueError(f"{name} needs a positive isotropy corrector factor")
        return cls(family, order, beta if md else 0.0)

    @property
    def name(self) -> str:
        base = ("PC" if self.family == "compact" else "MC") + str(self.order)
        return ("M" + base) if self.beta > 0.0 else base

    def _line(self, u, h, axis, backward, transverse=None, step=0):
        if self.family == "compact":
            return compact_line(u, h, self.coeffs, axis, backward, transverse, step)
        return explicit_line(u, h, self.order, axis, backward, transverse, step)

    def derivative(self, u: np.ndarray, axis: int, h: float, backward: bool = False) -> np.ndarray:
        if not self.multidimensional or u.ndim == 1:
            return self._line(u, h, axis, backward)

        def line(v, ax, t, s):
            return self._line(v, h, ax, backward, t, s)

        return blend_lines(line, u, axis, self.beta, u.ndim)

    def forward(self, u: np.ndarray, axis: int, h: float) -> np.ndarray:
        return self.derivative(u, axis, h, backward=False)

    def backward(self, u: np.ndarray, axis: int, h: float) -> np.ndarray:
        return self.derivative(u, axis, h, backward=True)
