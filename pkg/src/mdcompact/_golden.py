from __future__ import annotations

import math
from typing import Callable

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section(
    func: Callable[[float], float], lo: float, hi: float, tol: float = 1e-8, max_iter: int = 500
) -> tuple[float, float]:
    """Minimise a unimodal ``func`` on ``[lo, hi]``; returns ``(x, func(x))``."""
    x1 = hi - INV_PHI * (hi - lo)
    x2 = lo + INV_PHI * (hi - lo)
    f1, f2 = func(x1), func(x2)
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - INV_PHI * (hi - lo)
            f1 = func(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + INV_PHI * (hi - lo)
            f2 = func(x2)
    x = 0.5 * (lo + hi)
    return x, func(x)
