"""Deterministic CSV and key-value emitters.

Floats are written with 17 significant digits so that a fixed configuration
always produces byte-identical files.
"""

from __future__ import annotations

import csv
import io
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .scheme import ScalarField
from .spectral import SpectralSample
from .stability import StabilityReport

POLAR_COLUMNS = ("ppw", "theta", "kh_real", "phase_velocity", "group_velocity_magnitude", "group_velocity_angle")
ICF_COLUMNS = ("ppw", "beta", "gap_beta0", "gap_beta")
NORM_COLUMNS = ("step", "t", "max_abs")
BENCH_COLUMNS = (
    "baseline",
    "md",
    "sigma_baseline",
    "sigma_md",
    "dt_baseline",
    "dt_md",
    "dt_ratio",
    "steps_baseline",
    "steps_md",
    "wall_baseline",
    "wall_md",
    "speedup_pct",
    "isotropy_speedup_pct",
)


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isnan(v):
            return "nan"
        return "%.17g" % v
    return str(value)


def csv_text(columns: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def write_text(path: Path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return path


def polar_rows(samples: Sequence[SpectralSample]) -> list[tuple]:
    return [
        (s.point.ppw, s.point.theta, s.kh_real, s.phase_velocity, s.group_speed, s.group_angle)
        for s in samples
    ]


def emit_polar_csv(path: Path, samples: Sequence[SpectralSample]) -> Path:
    return write_text(path, csv_text(POLAR_COLUMNS, polar_rows(samples)))


def emit_icf_csv(path: Path, rows: Sequence[tuple]) -> Path:
    return write_text(path, csv_text(ICF_COLUMNS, rows))


def stability_text(report: StabilityReport) -> str:
    return "".join(f"{k} = {fmt(v)}\n" for k, v in report.items())


def emit_stability_report(directory: Path, report: StabilityReport) -> tuple[Path, Path]:
    directory = Path(directory)
    txt = write_text(directory / "stability.txt", stability_text(report))
    table = write_text(directory / "stability.csv", csv_text(("key", "value"), report.items()))
    return txt, table


def snapshot_text(field: ScalarField, t: float) -> str:
    """Header ``nx, ny[, nz], h, t`` with its values, then coordinates and ``u`` in C order."""
    grid = field.grid
    names = ("nx", "ny", "nz")[: grid.dims]
    axes = ("x", "y", "z")[: grid.dims]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(list(names) + ["h", "t"])
    writer.writerow([fmt(n) for n in grid.n_per_axis] + [fmt(grid.h), fmt(t)])
    writer.writerow(list(axes) + ["u"])
    coords = [c.ravel() for c in grid.mesh()]
    values = np.asarray(field.values).ravel()
    for k in range(values.size):
        writer.writerow([fmt(c[k]) for c in coords] + [fmt(values[k])])
    return buf.getvalue()


def emit_snapshot(path: Path, field: ScalarField, t: float) -> Path:
    return write_text(path, snapshot_text(field, t))


def emit_norms(path: Path, times: np.ndarray, norms: np.ndarray) -> Path:
    rows = [(k, float(t), float(v)) for k, (t, v) in enumerate(zip(times, norms))]
    return write_text(path, csv_text(NORM_COLUMNS, rows))
