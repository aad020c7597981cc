import math

import numpy as np
import pytest

from mdcompact.scheme import SpatialScheme, backward_derivative_line, forward_derivative_line, make_coefficients
from mdcompact.solver import advection_2d
from mdcompact.stability import (
    AllUnstableError,
    CflNumbers,
    StabilityReport,
    UndefinedLimitError,
    amplification_factor,
    analytic_limits,
    diagonal_limit,
    empirical_cfl,
    heuristic_limit_3d,
    hong_condition,
    max_amplification,
    md_condition,
    restriction_limit,
    scanned_limit,
    stability_report,
    wendroff_condition,
    xi_max,
)

MC2 = SpatialScheme("explicit", 2)


def step_matrix_growth(order, sigma, n=128):
    """Spectral radius minus one of the assembled 1D predictor-corrector step."""
    c = make_coefficients(order)
    eye = np.eye(n)
    fwd = np.column_stack([forward_derivative_line(eye[k], 1.0, c) for k in range(n)])
    bwd = np.column_stack([backward_derivative_line(eye[k], 1.0, c) for k in range(n)])
    step = 0.5 * (eye + (eye + sigma * bwd) @ (eye + sigma * fwd))
    return np.abs(np.linalg.eigvals(step)).max() - 1.0


# ---------------------------------------------------------------------------
# xi_max


def test_xi_max_order4():
    assert xi_max(4) == pytest.approx(math.sqrt(3.0), abs=1e-10)
    # stationary point of 3 sin/(2 + cos) sits at cos = -1/2
    eta = 2 * math.pi / 3
    assert 3 * math.sin(eta) / (2 + math.cos(eta)) == pytest.approx(math.sqrt(3.0), abs=1e-15)


def test_xi_max_order6():
    assert xi_max(6) == pytest.approx(1.98943, abs=1e-3)
    eta = np.linspace(0, math.pi, 200001)
    dense = np.max((28 * np.sin(eta) + np.sin(2 * eta)) / (18 + 12 * np.cos(eta)))
    assert xi_max(6) == pytest.approx(dense, abs=1e-9)


@pytest.mark.parametrize("order,beta", [(4, 0.24), (6, 0.12)])
def test_xi_max_md_not_below_1d(order, beta):
    assert xi_max(order, beta, 2) >= xi_max(order) - 1e-9


# ---------------------------------------------------------------------------
# amplification factor


def test_amplification_trivial_cases():
    eta = np.linspace(-math.pi, math.pi, 11)
    ex, ey = np.meshgrid(eta, eta)
    assert np.all(amplification_factor((0.0, 0.0), [ex, ey], 4, 0.24) == 1.0)
    assert amplification_factor((0.3, 0.1), [0.0, 0.0], 6, 0.0) == 1.0
    with pytest.raises(ValueError):
        amplification_factor((0.1,), [0.0, 0.0])
    with pytest.raises(ValueError):
        CflNumbers((-0.1, 0.2))


def test_amplification_matches_step_matrix():
    # the rational-symbol growth agrees with the assembled step operator
    n = 128
    eta = 2 * math.pi * np.arange(n) / n
    for order in (4, 6):
        for sigma in (0.1, 0.3, 0.55):
            sym = np.abs(amplification_factor((sigma,), [eta], order)).max() - 1.0
            assert sym == pytest.approx(step_matrix_growth(order, sigma, n), abs=1e-12)


def test_small_sigma_inside_region_is_stable():
    assert max_amplification((0.1, 0.1), 4, 0.0, n=101) <= 1.0 + 1e-10


def test_sigma_point_two_is_still_stable():
    # (0.2, 0.2) lies outside the 2/3-power bound for order 4 yet the scan shows no growth:
    # the exact same-sign region is wider than that bound
    assert not hong_condition(0.2, 0.2, math.sqrt(3)).satisfied
    assert max_amplification((0.2, 0.2), 4, 0.0, n=201) <= 1.0 + 1e-12


def test_classical_scanned_limits():
    # classical 2-2 scheme: same-sign region is sx + sy <= 1
    assert scanned_limit((1, 1), scheme=MC2) == pytest.approx(0.5, abs=1e-5)
    assert scanned_limit((1, 0), scheme=MC2) == pytest.approx(1.0, abs=1e-5)


def test_compact_scanned_limits():
    assert scanned_limit((1, 0), order=4) == pytest.approx(1 / math.sqrt(3), abs=1e-5)
    assert scanned_limit((1, 1), order=4) == pytest.approx(1 / (2 * math.sqrt(3)), abs=1e-5)
    # order 6: frozen from bisection on the assembled step matrix (n = 256 ring)
    assert scanned_limit((1,), order=6, n=20001, tol=1e-8) == pytest.approx(0.20622, abs=1e-4)
    assert step_matrix_growth(6, 0.19) < 1e-12
    assert step_matrix_growth(6, 0.25) > 1e-6


def test_mixed_sign_directions_grow_weakly():
    # opposite-signed Courant numbers make the product of forward symbols non-dissipative
    g = amplification_factor((0.1, -0.1), np.meshgrid(np.linspace(-math.pi, math.pi, 201), np.linspace(-math.pi, math.pi, 201)), 4)
    assert 1.0 < np.abs(g).max() < 1.01


# ---------------------------------------------------------------------------
# conditions


@pytest.mark.parametrize(
    "sx,sy,ok,margin",
    [(0.0, 0.0, True, 0.125), (0.25, 0.25, False, 0.125 - 0.12890625), (0.2, 0.2, True, 0.125 - 0.0816)],
)
def test_wendroff(sx, sy, ok, margin):
    cond = wendroff_condition(sx, sy)
    assert cond.satisfied is ok
    assert cond.margin == pytest.approx(margin, abs=1e-15)


def test_hong_classical_diagonal():
    s = 2 ** -1.5
    assert s == pytest.approx(0.35355, abs=1e-5)
    assert hong_condition(s, s).margin == pytest.approx(0.0, abs=1e-14)
    assert diagonal_limit(1.0, 0.0) == pytest.approx(s, abs=1e-15)


def test_md_condition_branches():
    cond, tag = md_condition(0.2, 0.1, math.sqrt(3), 0.24)
    assert tag == "x-dominant"
    lhs = (0.2 * 1.24) ** (2 / 3) + 0.1 ** (2 / 3)
    assert cond.margin == pytest.approx(1.24 ** (2 / 3) / math.sqrt(3) - lhs, abs=1e-14)
    assert md_condition(0.1, 0.2, math.sqrt(3), 0.24)[1] == "y-dominant"


def test_restriction_limit_reductions():
    xi = 1.7
    assert restriction_limit(xi, 0.3, 1.0) == pytest.approx(diagonal_limit(xi, 0.3), rel=1e-14)
    # beta = 0: the 2/3-power bound on the diagonal
    assert restriction_limit(xi, 0.0, 1.0) == pytest.approx((2 * xi) ** -1.5, rel=1e-14)
    # axis-aligned: the 2/3-power form gives xi**-1.5 whatever beta is
    assert restriction_limit(xi, 0.7, 0.0) == pytest.approx(xi**-1.5, rel=1e-14)
    assert restriction_limit(xi, 0.0, 0.0) == pytest.approx(xi**-1.5, rel=1e-14)
    with pytest.raises(ValueError):
        restriction_limit(xi, 0.0, 1.5)


def test_diagonal_limit_asymptotes():
    for xi in (1.0, math.sqrt(3), 1.98943):
        assert diagonal_limit(xi, 1e-8) == pytest.approx((2 * xi) ** -1.5, rel=1e-7)
        assert diagonal_limit(xi, 1e8) == pytest.approx(xi**-1.5, rel=1e-4)


def test_diagonal_limit_ratio_order4():
    want = 1.24 * 2**1.5 / (1 + 1.24 ** (2 / 3)) ** 1.5
    assert want == pytest.approx(1.109, abs=1e-3)
    xi = math.sqrt(3)
    assert diagonal_limit(xi, 0.24) / diagonal_limit(xi, 0.0) == pytest.approx(want, rel=1e-14)


def test_analytic_limits_report():
    rep = analytic_limits((1.0, 1.0), 4, 0.24)
    assert isinstance(rep, StabilityReport)
    assert rep.restriction == "x-dominant"
    assert rep.limit_md == pytest.approx(diagonal_limit(math.sqrt(3), 0.24), rel=1e-9)
    assert analytic_limits((1.0, 2.0), 4, 0.24).restriction == "y-dominant"
    assert analytic_limits((1.0, 1.0), 4, 0.0).restriction == "one-dimensional-pair"
    assert analytic_limits((1.0,), 6).limit_md == pytest.approx(1 / xi_max(6))
    rep3 = analytic_limits((1.0, 1.0, 1.0), 4, 0.11)
    assert rep3.restriction == "3d-heuristic"
    assert rep3.heuristic_3d == pytest.approx(heuristic_limit_3d(rep3.xi_max, (1, 1, 1)))
    assert rep3.heuristic_3d == pytest.approx((3 * math.sqrt(3)) ** -1.5, rel=1e-9)
    assert all(v >= 0 for k, v in rep.items() if isinstance(v, float))


def test_analytic_limits_zero_velocity():
    with pytest.raises(UndefinedLimitError):
        analytic_limits((0.0, 0.0))


def test_stability_report_with_sigma():
    rep = stability_report((1.0, 1.0), sigma=(0.1, 0.1), order=4)
    assert rep.limit_hong.satisfied
    assert rep.max_abs_G <= 1.0 + 1e-12
    keys = [k for k, _ in rep.items()]
    assert keys[:3] == ["scheme", "xi_max", "limit_1d"]


@pytest.mark.parametrize("order,beta", [(4, 0.0), (4, 0.24)])
def test_inside_analytic_region_is_stable_order4(order, beta):
    xi = xi_max(order)
    for ratio in np.linspace(0, 1, 6):
        lim = restriction_limit(xi, beta, ratio) - 1e-3
        for sig in ((lim, ratio * lim), (ratio * lim, lim)):
            assert max_amplification(sig, order, beta, n=201) <= 1.0 + 1e-9


def test_order6_axis_limit_exceeds_scan():
    # the 1/xi bound admits Courant numbers the order-6 pair cannot sustain
    lim = 1 / xi_max(6) - 1e-3
    assert max_amplification((lim, 0.0), 6, 0.0, n=201) > 1.0 + 1e-3


# ---------------------------------------------------------------------------
# empirical limits (small grids)


def test_empirical_classical_diagonal():
    value = empirical_cfl(advection_2d((1.0, 1.0), n=32), MC2)
    # above the exact linear limit: a 50-step horizon cannot see slow growth from round-off seeds
    assert 0.5 <= value <= 0.7


def test_empirical_compact_floor_and_gain():
    p = advection_2d((1.0, 1.0), n=32)
    base = empirical_cfl(p, SpatialScheme("compact", 4))
    md = empirical_cfl(p, SpatialScheme("compact", 4, 0.24))
    assert base >= (2 * math.sqrt(3)) ** -1.5 - 0.01
    assert md / base >= 1.10


def test_empirical_all_unstable():
    with pytest.raises(AllUnstableError):
        empirical_cfl(advection_2d((1.0, 1.0), n=16), MC2, bracket=(3.0, 4.0))
