import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from trace_sobolev import (QuadratureSpec, RadialIntegrand, boundary_integral, cap_area, cap_volume,
                           fullspace_integral, halfspace_integral, integrate, sigma)
from trace_sobolev.errors import DomainError, EnvelopeViolation

PI = math.pi
Q = QuadratureSpec()


def power(a):
    return RadialIntegrand(lambda r: r ** (-a), tail_exponent=a)


def bubble(k, m=0):
    # (1 + r^2)^(-k) r^m, bounded by r^(m - 2k)
    return RadialIntegrand(lambda r: (1 + r * r) ** (-k) * r ** m, tail_exponent=2 * k - m)


def test_cap_area_examples():
    assert cap_area(3, 2.0, -1.0) == pytest.approx(4 * PI, rel=1e-13)
    assert cap_area(3, 1.0, 0.0) == pytest.approx(2 * PI, rel=1e-13)
    for n in (2, 3, 5):
        assert cap_area(n, 1.5, 2.0) == pytest.approx(sigma(n - 1) * 1.5 ** (n - 1), rel=1e-13)
    assert cap_area(3, 1.0, -1.5) == 0.0
    with pytest.raises(DomainError):
        cap_area(3, 0.0, 0.0)


@given(st.integers(2, 7), st.floats(0.05, 5.0), st.floats(0.0, 0.999))
def test_complementary_caps(n, r, frac):
    t = frac * r
    total = cap_area(n, r, t) + cap_area(n, r, -t)
    assert total == pytest.approx(sigma(n - 1) * r ** (n - 1), rel=1e-11)


@pytest.mark.parametrize("t,a,exact", [(-1.0, 6, PI / 6), (-1.0, 4, PI)])
def test_halfspace_closed_forms(t, a, exact):
    res = halfspace_integral(3, t, power(a), Q)
    assert res == pytest.approx(exact, rel=1e-9)
    assert abs(res - exact) <= res.error


def test_halfspace_bubble_is_half_of_full_space():
    res = halfspace_integral(3, 0.0, bubble(3), Q)
    assert res == pytest.approx(PI ** 2 / 8, rel=1e-9)
    assert abs(res - PI ** 2 / 8) <= res.error
    assert fullspace_integral(3, bubble(3), Q) == pytest.approx(PI ** 2 / 4, rel=1e-9)


@pytest.mark.parametrize("t", [0.0, 0.5, -1.3, 3.0])
def test_boundary_planar_bubble(t):
    assert boundary_integral(3, t, bubble(2), Q) == pytest.approx(PI / (1 + t * t), rel=1e-9)


def test_boundary_examples():
    assert boundary_integral(3, -1.0, power(4), Q) == pytest.approx(PI, rel=1e-9)
    ind = RadialIntegrand(lambda s: np.where(s < 1.0, 1.0, 0.0), tail_exponent=3.0, tail_const=0.0,
                          tail_start=1.0)
    assert boundary_integral(2, 0.0, ind, Q) == pytest.approx(2.0, rel=1e-9)


def test_cap_volume():
    assert cap_volume(2, 0.0) == pytest.approx(PI / 2, rel=1e-13)
    assert cap_volume(3, 0.0) == pytest.approx(2 * PI / 3, rel=1e-13)
    # missing segment of height h has area ~ (4 sqrt2 / 3) h^{3/2}
    for h in (1e-2, 1e-3, 1e-4):
        deficit = PI - cap_volume(2, 1 - h)
        assert deficit / h ** 1.5 == pytest.approx(4 * math.sqrt(2) / 3, rel=2 * h)
    for bad in (-1.0, 1.0, 2.0):
        with pytest.raises(DomainError):
            cap_volume(3, bad)


@given(st.integers(2, 5), st.floats(0.0, 2.5))
def test_halfspace_symmetry(n, t):
    f = bubble(n + 1)
    both = halfspace_integral(n, t, f, Q) + halfspace_integral(n, -t, f, Q)
    assert both == pytest.approx(fullspace_integral(n, f, Q), rel=1e-8)


def test_envelope_is_enforced():
    liar = RadialIntegrand(lambda r: r ** -4.0, tail_exponent=6.0, tail_const=1.0, tail_start=1.0)
    with pytest.raises(EnvelopeViolation):
        halfspace_integral(3, 0.0, liar, Q)


def test_divergent_tail_rejected():
    with pytest.raises(DomainError):
        halfspace_integral(3, 0.0, power(2.5), Q)


def test_integrate_reports_error():
    res = integrate(np.sin, [0.0, PI], Q)
    assert res == pytest.approx(2.0, abs=1e-12)
    assert 0 <= res.error <= 1e-9


def test_quadrature_spec_validation():
    with pytest.raises(DomainError):
        QuadratureSpec(abs_tol=0)
    with pytest.raises(DomainError):
        QuadratureSpec(max_subdivisions=8)


@pytest.mark.parametrize("t", [1e-12, 1e-9, 1e-6])
def test_cap_measures_keep_precision_near_center(t):
    # first-order growth: chord length 2 in the plane, the full equatorial disk in space
    assert (cap_volume(2, t) - cap_volume(2, -t)) / (2 * t) == pytest.approx(2.0, rel=1e-3)
    assert (cap_area(3, 1.0, t) - cap_area(3, 1.0, -t)) / (2 * t) == pytest.approx(2 * PI, rel=1e-3)
