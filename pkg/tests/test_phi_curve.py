import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import E_32, GE_32, S_32, T0_32, TE_32
from trace_sobolev import DomainError, FamilyTag, ModeError, PhiCurve, iso_ball
from trace_sobolev.errors import PropertyViolation


def test_anchor_values(phi32, const32):
    assert phi32(const32.T_0) == pytest.approx(2 ** (-1 / 3) * S_32, rel=1e-8)
    assert phi32(const32.T_E) == pytest.approx(GE_32, rel=1e-8)
    pt = phi32.phi(const32.T_E)
    assert pt.family is FamilyTag.ESCOBAR and pt.t == -1.0


def test_zero_has_no_minimizer(phi32):
    with pytest.raises(DomainError):
        phi32.phi(0.0)
    with pytest.raises(DomainError):
        phi32.phi(-1.0)


@pytest.mark.parametrize("T,family", [(0.3, FamilyTag.SOBOLEV), (1.2855, FamilyTag.SOBOLEV),
                                      (1.48, FamilyTag.SOBOLEV), (1.49, FamilyTag.BEYOND_ESCOBAR),
                                      (4.0, FamilyTag.BEYOND_ESCOBAR)])
def test_branches(phi32, T, family):
    pt = phi32.phi(T)
    assert pt.family is family
    assert pt.phi > 0


def test_slopes_at_escobar_point(phi32):
    left, right = phi32.one_sided_slopes_at_te()
    assert abs(left - E_32) < 1e-3
    assert abs(right - E_32) < 1e-3


def test_derivative_signs(phi32, const32):
    T0 = const32.T_0
    for T in (0.2, 0.6, 1.0, 0.95 * T0):
        assert phi32.phi_prime(T) < 0
    for T in (1.05 * T0, 1.4, 2.0, 5.0):
        assert phi32.phi_prime(T) > 0
    assert abs(phi32.phi_prime(T0)) < 1e-3


def test_derivative_matches_finite_difference(phi32):
    for T in (0.7, 1.9):
        h = 1e-4
        fd = (phi32(T + h) - phi32(T - h)) / (2 * h)
        assert phi32.phi_prime(T) == pytest.approx(fd, rel=1e-5, abs=1e-7)


def test_multipliers(phi32, const32):
    T0, TE = const32.T_0, const32.T_E
    assert abs(phi32.multipliers(T0).sigma) < 1e-6
    assert phi32.multipliers(0.6 * T0).sigma < 0
    assert phi32.multipliers(1.2 * T0).sigma > 0
    for T in (0.5 * T0, TE, 2 * TE):
        m = phi32.multipliers(T)
        assert m.lam + m.sigma * T ** 4 == pytest.approx(phi32(T) ** 2, rel=1e-4)
        assert m.sigma == pytest.approx(m.sigma_direct, rel=1e-3, abs=1e-6)


def test_multiplier_signs_by_family(phi32, const32):
    # the interior multiplier is positive, zero or negative as the family base constant
    assert phi32.multipliers(1.0).lam > 0
    assert abs(phi32.multipliers(const32.T_E).lam) < 1e-6
    assert phi32.multipliers(2.0).lam < 0


def test_envelope(phi32, const32):
    c = const32
    assert phi32.envelope(0.0) == pytest.approx(2 ** (-1 / 3) * c.S)
    assert phi32.envelope(c.T_E) == pytest.approx(phi32(c.T_E), rel=1e-10)
    assert phi32.envelope(c.T_0) == pytest.approx(phi32(c.T_0), rel=1e-8)
    assert phi32.envelope(10.0) == pytest.approx(10.0 ** 4 / 4)
    grid = np.linspace(0.05, 3 * c.T_E, 41)
    for T in grid:
        phi = phi32(T)
        assert phi >= phi32.envelope(T) - 1e-9
        assert phi > T ** 4 / 4


def test_asymptotics(phi32):
    gaps = [phi32.asymptotic_gap(T) for T in (3, 5, 8, 12)]
    assert all(g > 0 for g in gaps)
    assert np.all(np.diff(gaps) < 0)
    # p# Phi / T^{p#} - 1, formed from the cancellation-free gap
    excess = [4 * phi32.asymptotic_gap(T) / T ** 4 for T in (5, 10)]
    assert excess[0] > excess[1] > 0
    assert excess[1] < 1e-3
    assert 4 * phi32(10.0) / 1e4 == pytest.approx(1.0, rel=1e-6)


def test_convexity_report(phi32, const32):
    c = const32
    rep = phi32.convexity_report(np.linspace(1.01 * c.T_0, 3 * c.T_E, 12))
    assert rep["convex_checked"] == 10 and not rep["violations"]
    assert all(d > 0 for d in rep["second_differences"])
    rep = phi32.convexity_report(np.linspace(0.1, 0.99 * c.T_star, 8))
    assert rep["concave_checked"] == 6
    assert all(d < 0 for d in rep["second_differences"])


def test_convexity_report_flags_bad_data(phi32, const32):
    with pytest.raises(DomainError):
        phi32.convexity_report([1.5, 2.0])
    grid = np.linspace(2.0, 3.0, 5)
    with pytest.raises(PropertyViolation):
        phi32.convexity_report(grid, values=-grid ** 2)


def test_psi(phi32, const32):
    c = const32
    assert phi32.psi(c.T_0 ** 4) == pytest.approx(8 * (2 ** (-1 / 3) * c.S) ** 2, rel=1e-8)
    assert phi32.psi(c.T_E ** 4) == pytest.approx(8 * c.G_E ** 2, rel=1e-8)
    for T in (0.5, 1.7, 3.0):
        assert math.sqrt(phi32.psi(T ** 4) / 8) == pytest.approx(phi32(T), rel=1e-12)
    with pytest.raises(ModeError):
        PhiCurve.for_pair(4, 1.5).psi(1.0)


@given(st.floats(0.05, 4.5))
def test_round_trip(T):
    curve = _CURVE
    pt = curve.phi(T)
    if pt.family is FamilyTag.SOBOLEV:
        back = curve.curves.t_s(pt.t)
    elif pt.family is FamilyTag.BEYOND_ESCOBAR:
        back = curve.curves.member(pt.family, None, eps=pt.eps).T
    else:
        back = curve.constants.T_E
    assert abs(back - T) <= 1e-9 * max(1.0, T)
    assert pt.phi >= curve.envelope(T) - 1e-9


_CURVE = PhiCurve.for_pair(3, 2)


@pytest.mark.parametrize("n,p", [(4, 1.5), (2, 1.2), (5, 3)])
def test_other_pairs(n, p):
    curve = PhiCurve.for_pair(n, p)
    c = curve.constants
    assert curve(c.T_0) == pytest.approx(2 ** (-1 / n) * c.S, rel=1e-7)
    assert curve(c.T_E) == pytest.approx(c.G_E, rel=1e-8)
    assert curve.phi_prime(0.5 * c.T_0) < 0 < curve.phi_prime(1.5 * c.T_E)


def test_p1_curve():
    curve = PhiCurve.for_pair(2, 1)
    c = curve.constants
    assert c.S == pytest.approx(iso_ball(2))
    pt = curve.phi(c.T_0, with_derivative=True)
    assert pt.family is FamilyTag.BALL_P1
    assert pt.phi == pytest.approx(math.sqrt(2 * math.pi), rel=1e-9)
    assert abs(pt.t) < 1e-8
    assert abs(pt.dphi) < 1e-6
    # Phi(T) - T shrinks as the cap flattens onto the boundary
    gaps = [curve(T) - T for T in (3.0, 5.0, 8.0)]
    assert gaps[0] > gaps[1] > gaps[2] > 0
    with pytest.raises(ModeError):
        curve.multipliers(1.0)
