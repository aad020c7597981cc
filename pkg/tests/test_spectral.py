import math

import numpy as np
import pytest

from mdcompact.scheme import UnsupportedOrderError, make_coefficients
from mdcompact.spectral import (
    IcfBracketError,
    ResolvabilityError,
    SingularSymbolError,
    SpectralPoint,
    anisotropy_gap,
    fourier_symbol,
    group_velocity,
    icf_curve,
    md_wavenumber,
    numerical_wavenumber,
    optimize_icf,
    phase_spread,
    phase_velocity,
    polar_diagram,
    wavenumber_1d,
)
from mdcompact.scheme import SchemeCoefficients


def f4(e):
    return 3 * np.sin(e) / (2 + np.cos(e))


def f6(e):
    return (28 * np.sin(e) + np.sin(2 * e)) / (18 + 12 * np.cos(e))


@pytest.mark.parametrize(
    "order,eta,want", [(4, 0.0, 0.0), (4, math.pi / 2, 1.5), (6, math.pi, 0.0)]
)
def test_wavenumber_1d_examples(order, eta, want):
    assert wavenumber_1d(order, eta) == pytest.approx(want, abs=1e-15)


def test_wavenumber_1d_rejects_order():
    with pytest.raises(UnsupportedOrderError):
        wavenumber_1d(8, 0.3)


@pytest.mark.parametrize("order,closed", [(4, f4), (6, f6)])
def test_centered_symbol_matches_closed_form(order, closed):
    c = make_coefficients(order)
    eta = np.linspace(0.0, math.pi, 64)
    kh = numerical_wavenumber(c, 0.0, [eta], direction="centered")
    np.testing.assert_allclose(kh.real, closed(eta), atol=1e-12)
    assert np.abs(kh.imag).max() < 1e-12


def test_symbol_zero_mode_and_backward_conjugate(coeffs):
    assert fourier_symbol(coeffs, 0.0, [0.0]) == 0j
    rng = np.random.default_rng(0)
    ex, ey = rng.uniform(-math.pi, math.pi, (2, 50))
    for axis in (0, 1):
        fwd = fourier_symbol(coeffs, 0.3, [ex, ey], axis)
        bwd = fourier_symbol(coeffs, 0.3, [ex, ey], axis, "backward")
        np.testing.assert_allclose(bwd, -np.conj(fwd), atol=1e-15)


def test_forward_and_backward_share_real_wavenumber(coeffs):
    eta = np.linspace(-math.pi, math.pi, 41)
    fw = numerical_wavenumber(coeffs, 0.0, [eta])
    bw = numerical_wavenumber(coeffs, 0.0, [eta], direction="backward")
    np.testing.assert_allclose(fw.real, bw.real, atol=1e-14)
    np.testing.assert_allclose(fw.imag, -bw.imag, atol=1e-14)


def test_md_centered_symbol_matches_formula():
    c = make_coefficients(4)
    beta = 0.24
    ex, ey = np.meshgrid(np.linspace(-math.pi, math.pi, 33), np.linspace(-math.pi, math.pi, 33))
    kh = numerical_wavenumber(c, beta, [ex, ey], direction="centered")
    want = (f4(ex) + beta / 2 * (f4(ex + ey) + f4(ex - ey))) / (1 + beta)
    np.testing.assert_allclose(kh.real, want, atol=1e-12)
    np.testing.assert_allclose(md_wavenumber(4, beta, [ex, ey]), want, atol=1e-14)


def test_md_wavenumber_examples():
    assert md_wavenumber(4, 0.0, (0.7, 1.1)) == pytest.approx(f4(0.7), abs=1e-15)
    assert md_wavenumber(4, 0.3, (0.0, 1.1)) == pytest.approx(0.0, abs=1e-15)
    assert md_wavenumber(4, 0.24, (math.pi / 2, math.pi / 2)) == pytest.approx(1.5 / 1.24, abs=1e-12)
    assert md_wavenumber(4, 0.24, (math.pi / 2, math.pi / 2)) == pytest.approx(1.2097, abs=1e-4)


def test_md_wavenumber_3d_uses_quarter_weights():
    beta = 0.11
    e = (0.4, 0.9, -1.3)
    want = (f6(0.4) + beta / 4 * (f6(1.3) + f6(-0.5) + f6(-0.9) + f6(1.7))) / (1 + beta)
    assert md_wavenumber(6, beta, e) == pytest.approx(want, abs=1e-14)
    c = make_coefficients(6)
    assert numerical_wavenumber(c, beta, e, direction="centered").real == pytest.approx(want, abs=1e-12)


@pytest.mark.parametrize("beta", [0.0, 0.24, 1.0])
def test_oddness_and_consistency(coeffs, beta):
    rng = np.random.default_rng(1)
    e = rng.uniform(-math.pi, math.pi, (2, 30))
    np.testing.assert_allclose(md_wavenumber(coeffs.order, beta, -e), -md_wavenumber(coeffs.order, beta, e), atol=1e-14)
    small = 1e-3
    assert md_wavenumber(coeffs.order, beta, (small, 0.0)) / small == pytest.approx(1.0, abs=1e-5)


def test_singular_symbol_detected():
    bad = SchemeCoefficients(order=4, a=0.5, b=1.0)  # a + (1 - a) z^{-1}... vanishes at z = -1
    with pytest.raises(SingularSymbolError):
        fourier_symbol(bad, 0.0, [math.pi])


def test_direction_validation(coeffs):
    with pytest.raises(ValueError):
        fourier_symbol(coeffs, 0.0, [0.1], direction="sideways")
    with pytest.raises(ValueError):
        fourier_symbol(coeffs, 0.0, [0.1, 0.2], axis=2)


# ---------------------------------------------------------------------------
# phase and group velocity


def test_phase_velocity_examples():
    assert phase_velocity(4, 0.0, 4.0, 0.0) == pytest.approx(1.5 / (math.pi / 2), abs=1e-12)
    assert phase_velocity(4, 0.0, 4.0, 0.0) == pytest.approx(0.95493, abs=1e-5)
    for theta in np.linspace(0, 2 * math.pi, 7, endpoint=False):
        assert phase_velocity(6, 0.12, 1e6, theta) == pytest.approx(1.0, abs=1e-6)


def test_resolvability():
    with pytest.raises(ResolvabilityError):
        phase_velocity(4, 0.0, 1.5, 0.0)
    with pytest.raises(ResolvabilityError):
        SpectralPoint.from_polar(1.9, 0.0)


def test_group_velocity_analytic_order4():
    for ppw in (3.0, 4.0, 8.0):
        eta = 2 * math.pi / ppw
        gv = group_velocity(4, 0.0, ppw, 0.0)
        assert gv[0] == pytest.approx(3 * (2 * math.cos(eta) + 1) / (2 + math.cos(eta)) ** 2, abs=1e-6)
        assert gv[1] == pytest.approx(0.0, abs=1e-9)


def test_group_velocity_continuum_limit():
    for theta in (0.0, 0.3, 1.2, 2.5):
        gv = group_velocity(6, 0.12, 1e5, theta)
        np.testing.assert_allclose(gv, [math.cos(theta), math.sin(theta)], atol=1e-5)


@pytest.mark.parametrize("beta", [0.0, 0.24])
def test_group_velocity_diagonal_reflection(beta):
    for theta in (0.1, 0.4, 0.7):
        a = group_velocity(4, beta, 5.0, theta)
        b = group_velocity(4, beta, 5.0, math.pi / 2 - theta)
        np.testing.assert_allclose(a, b[::-1], atol=1e-10)


# ---------------------------------------------------------------------------
# isotropy corrector factor


@pytest.mark.parametrize("order,target", [(4, 0.24), (6, 0.12)])
def test_icf_hits_2d_value_within_tolerance(order, target):
    betas = [optimize_icf(order, p, 2) for p in np.arange(4.0, 10.5, 0.5)]
    assert min(abs(b - target) for b in betas) <= 0.05


@pytest.mark.parametrize("order,ppw", [(4, 4.0), (4, 8.0), (6, 6.0)])
def test_icf_is_a_minimiser(order, ppw):
    beta = optimize_icf(order, ppw, 2)
    assert abs(anisotropy_gap(order, beta, ppw, 2)) <= abs(anisotropy_gap(order, 0.0, ppw, 2))
    assert abs(anisotropy_gap(order, beta, ppw, 2)) < 1e-6


def test_icf_frozen_values():
    # frozen from scipy brentq on the hand-expanded closed forms (axis vs diagonal error gap)
    assert optimize_icf(4, 4.0, 2) == pytest.approx(0.1915119657, abs=1e-7)
    assert optimize_icf(6, 6.0, 2) == pytest.approx(0.1079066230, abs=1e-7)


def test_icf_brentq_oracle():
    from scipy.optimize import brentq

    def gap(beta, ppw):
        m = 2 * math.pi / ppw
        ax = md_wavenumber(4, beta, (m, 0.0)) / m
        d = m / math.sqrt(2)
        diag = 2 * md_wavenumber(4, beta, (d, d)) / math.sqrt(2) / m
        return ax - diag

    for ppw in (4.0, 6.0, 10.0):
        root = brentq(gap, 0.0, 2.0, args=(ppw,), xtol=1e-12)
        assert optimize_icf(4, ppw, 2) == pytest.approx(root, abs=1e-6)


def test_icf_errors():
    with pytest.raises(ValueError):
        optimize_icf(4, 6.0, dims=1)
    with pytest.raises(ResolvabilityError):
        optimize_icf(4, 1.0)


def test_icf_3d_bracket_diagnostic():
    # with the four face-diagonal pairs the body-diagonal gap closes only near beta ~ 1;
    # whichever way the search ends, it must either return a minimiser or carry the scan
    try:
        beta = optimize_icf(4, 6.0, 3)
    except IcfBracketError as err:
        assert len(err.betas) == len(err.values) > 0
    else:
        assert abs(anisotropy_gap(4, beta, 6.0, 3)) <= abs(anisotropy_gap(4, 0.0, 6.0, 3))


def test_icf_curve_shape():
    curve = icf_curve(4, [4, 6, 8])
    assert [p for p, _ in curve] == [4.0, 6.0, 8.0]
    assert all(b > 0 for _, b in curve)


# ---------------------------------------------------------------------------
# polar diagrams


def test_polar_rows_and_symmetry():
    rows = polar_diagram(4, 0.24, [4.0, 8.0], n_theta=16)
    assert len(rows) == 32
    for r in rows:
        assert r.point.ppw * math.hypot(*r.point.eta) == pytest.approx(2 * math.pi, rel=1e-14)
        assert abs(r.kh_imag) < 1e-12
    for k in range(2):
        block = rows[16 * k : 16 * (k + 1)]
        for m in range(16):
            assert block[m].phase_velocity == pytest.approx(block[(m + 4) % 16].phase_velocity, abs=1e-10)


def test_polar_requires_eight_angles():
    with pytest.raises(ValueError):
        polar_diagram(4, 0.0, [4.0], n_theta=7)


@pytest.mark.parametrize("order", [4, 6])
@pytest.mark.parametrize("ppw", [4.0, 6.0, 8.0])
def test_spread_reduced_by_icf(order, ppw):
    beta = optimize_icf(order, ppw)
    assert phase_spread(order, beta, ppw) < phase_spread(order, 0.0, ppw)
