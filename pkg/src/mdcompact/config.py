"""Plain-text ``key = value`` run configuration."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

from .scheme import EXPLICIT_FORWARD, SUPPORTED_ORDERS, SpatialScheme
from .solver import ProblemSpec, advection_2d, advection_3d, burgers_2d, circular_advection
from .spectral import optimize_icf

COMMANDS = ("analyze", "icf", "stability", "run", "bench")
PROBLEMS = {
    "circular": "circular-advection",
    "circular-advection": "circular-advection",
    "burgers": "burgers-2d",
    "burgers-2d": "burgers-2d",
    "advection-2d": "advection-2d",
    "advection-3d": "advection-3d",
}
REQUIRED = ("command", "order")


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


# ---------------------------------------------------------------------------
# value parsers


def _int(text: str) -> int:
    return int(text)


def _float(text: str) -> float:
    v = float(text)
    if not math.isfinite(v):
        raise ValueError(f"{text!r} is not finite")
    return v


def _float_or_auto(text: str):
    return "auto" if text.lower() == "auto" else _float(text)


def _floats(text: str) -> tuple[float, ...]:
    parts = [p for p in text.replace(",", " ").split() if p]
    if not parts:
        raise ValueError("empty list")
    return tuple(_float(p) for p in parts)


def _bool(text: str) -> bool:
    low = text.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"{text!r} is not a boolean")


def _horizon(text: str):
    if text.lower() == "full":
        return None
    v = int(text)
    if v < 1:
        raise ValueError("horizon must be a positive step count or 'full'")
    return v


def _choice(options) -> Callable[[str], str]:
    def parse(text: str) -> str:
        if text not in options:
            raise ValueError(f"{text!r} is not one of {', '.join(options)}")
        return text

    return parse


KEYS: dict[str, tuple[Callable[[str], object], str]] = {
    "command": (_choice(COMMANDS), "one of " + "|".join(COMMANDS)),
    "order": (_int, "integer"),
    "family": (_choice(("compact", "explicit")), "compact|explicit"),
    "beta": (_float_or_auto, "real or auto"),
    "icf_ppw": (_float, "real"),
    "dims": (_int, "integer"),
    "problem": (_choice(tuple(PROBLEMS)), "problem name"),
    "n": (_int, "integer"),
    "final_time": (_float, "real"),
    "dt": (_float_or_auto, "real or auto"),
    "velocity": (_floats, "list of reals"),
    "width": (_float, "real"),
    "ppw": (_floats, "list of reals"),
    "ppw_min": (_float, "real"),
    "ppw_max": (_float, "real"),
    "ppw_step": (_float, "real"),
    "n_theta": (_int, "integer"),
    "sigma": (_floats, "list of reals"),
    "empirical": (_bool, "boolean"),
    "horizon": (_horizon, "integer or full"),
    "growth": (_float, "real"),
    "repeats": (_int, "integer"),
    "isotropy_matched": (_bool, "boolean"),
    "snapshot": (_bool, "boolean"),
    "out": (str, "path"),
    "seed": (_int, "integer"),
}


@dataclass(frozen=True)
class RunConfig:
    command: str
    order: int
    family: str = "compact"
    beta: float | str = 0.0
    icf_ppw: float = 10.0
    dims: int | None = None
    problem: str = "circular-advection"
    n: int | None = None
    final_time: float | None = None
    dt: float | str = "auto"
    velocity: tuple[float, ...] | None = None
    width: float | None = None
    ppw: tuple[float, ...] = (4.0, 6.0, 8.0)
    ppw_min: float = 4.0
    ppw_max: float = 16.0
    ppw_step: float = 1.0
    n_theta: int = 72
    sigma: tuple[float, ...] | None = None
    empirical: bool = False
    horizon: int | None | str = "default"
    growth: float = 10.0
    repeats: int = 3
    isotropy_matched: bool = False
    snapshot: bool = True
    out: str | None = None
    seed: int = 0
    lines: dict = field(default_factory=dict, compare=False, repr=False)

    # -- derived ---------------------------------------------------------

    @property
    def spatial_dims(self) -> int:
        if self.dims is not None:
            return self.dims
        return 3 if self.problem == "advection-3d" else 2

    @property
    def resolved_beta(self) -> float:
        if self.beta == "auto":
            return optimize_icf(self.order, self.icf_ppw, self.spatial_dims)
        return float(self.beta)

    @property
    def resolved_horizon(self) -> int | None:
        """Empirical-CFL horizon: 50 steps, or the full run for ``bench``."""
        if self.horizon == "default":
            return None if self.command == "bench" else 50
        return self.horizon

    def scheme(self, beta: float | None = None) -> SpatialScheme:
        b = self.resolved_beta if beta is None else beta
        return SpatialScheme(self.family, self.order, b)

    def problem_spec(self) -> ProblemSpec:
        kind = self.problem
        if kind == "circular-advection":
            spec = circular_advection()
        elif kind == "burgers-2d":
            spec = burgers_2d()
        elif kind == "advection-3d":
            spec = advection_3d()
        else:
            spec = advection_2d(self.velocity or (1.0, 1.0))
        changes = {}
        if self.n is not None:
            changes["n"] = self.n
        if self.final_time is not None:
            changes["final_time"] = self.final_time
        if self.width is not None:
            changes["width"] = self.width
        if self.velocity is not None and kind in ("advection-2d", "advection-3d"):
            changes["velocity"] = tuple(self.velocity)
        return replace(spec, **changes) if changes else spec

    def ppw_range(self) -> list[float]:
        count = int(math.floor((self.ppw_max - self.ppw_min) / self.ppw_step + 1e-9)) + 1
        return [self.ppw_min + k * self.ppw_step for k in range(count)]


def _validate(values: dict, lines: dict) -> None:
    def fail(key: str, message: str):
        raise ConfigError(message, lines.get(key))

    family = values.get("family", "compact")
    beta = values.get("beta", 0.0)
    if beta != "auto" and beta < 0.0:
        fail("beta", "beta must be non-negative")
    if beta == "auto" and family != "compact":
        fail("beta", "beta = auto needs the compact family")
    dims = values.get("dims")
    if dims is not None and dims not in (2, 3):
        fail("dims", "dims must be 2 or 3")
    if values.get("n") is not None and values["n"] < 4:
        fail("n", "n must be at least 4")
    for key in ("final_time", "width", "growth", "icf_ppw", "ppw_step"):
        if key in values and values[key] <= 0.0:
            fail(key, f"{key} must be positive")
    dt = values.get("dt", "auto")
    if dt != "auto" and dt <= 0.0:
        fail("dt", "dt must be positive or auto")
    if values.get("n_theta", 72) < 8:
        fail("n_theta", "n_theta must be at least 8")
    if values.get("repeats", 3) < 1:
        fail("repeats", "repeats must be at least 1")
    if any(p < 2.0 for p in values.get("ppw", ())):
        fail("ppw", "points per wavelength must be at least 2")
    if values.get("ppw_min", 4.0) < 2.0 or values.get("ppw_max", 16.0) < values.get("ppw_min", 4.0):
        fail("ppw_min" if "ppw_min" in values else "ppw_max", "need 2 <= ppw_min <= ppw_max")
    if "sigma" in values and any(s < 0.0 for s in values["sigma"]):
        fail("sigma", "Courant numbers are non-negative")
    problem = values.get("problem", "circular-advection")
    velocity = values.get("velocity")
    if velocity is not None:
        want = 3 if problem == "advection-3d" else 2
        if len(velocity) != want:
            fail("velocity", f"{problem} needs {want} velocity components")


def parse_config(text: str) -> RunConfig:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values: dict[str, object] = {}
    lines: dict[str, int] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", number)
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in KEYS:
            raise ConfigError(f"unknown key {key!r}", number)
        if key in values:
            raise ConfigError(f"duplicate key {key!r} (first set on line {lines[key]})", number)
        parser, kind = KEYS[key]
        try:
            parsed = parser(value)
        except ValueError as err:
            raise ConfigError(f"{key}: expected {kind}, got {value!r} ({err})", number) from None
        if key == "problem":
            parsed = PROBLEMS[parsed]
        values[key] = parsed
        lines[key] = number
    if "order" in values:
        family = values.get("family", "compact")
        supported = SUPPORTED_ORDERS if family == "compact" else tuple(EXPLICIT_FORWARD)
        if values["order"] not in supported:
            raise ConfigError(
                f"unsupported order {values['order']}; supported orders are {supported}", lines["order"]
            )
    missing = [k for k in REQUIRED if k not in values]
    if missing:
        raise ConfigError(f"missing required key(s): {', '.join(missing)} (required: {', '.join(REQUIRED)})")
    _validate(values, lines)
    return RunConfig(**values, lines=lines)
