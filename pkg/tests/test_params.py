import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from trace_sobolev import DomainError, derive_exponents, iso_ball, omega, sigma


@pytest.mark.parametrize("n,p,star,sharp,prime", [
    (3, 2, 6.0, 4.0, 2.0),
    (2, 1, 2.0, 1.0, math.inf),
    (4, 1.5, 2.4, 1.8, 3.0),
])
def test_exponent_examples(n, p, star, sharp, prime):
    e = derive_exponents(n, p)
    assert e.p_star == pytest.approx(star, rel=1e-15)
    assert e.p_sharp == pytest.approx(sharp, rel=1e-15)
    assert e.p_prime == prime


def test_p1_is_flagged():
    e = derive_exponents(5, 1)
    assert e.is_p1 and e.p_sharp == 1.0 and e.p_star == pytest.approx(5 / 4)
    assert not derive_exponents(5, 1.5).is_p1


@pytest.mark.parametrize("n,p", [(1, 0.5), (3, 0.9), (3, 3), (3, 3.5), (2, 1 + 1e-8), (3, 3 - 1e-8),
                                 (2.5, 1.5), (3, math.nan), (3, math.inf)])
def test_rejects_outside_domain(n, p):
    with pytest.raises(DomainError):
        derive_exponents(n, p)


def test_guard_boundary_is_inclusive_of_valid_values():
    derive_exponents(2, 1 + 2e-6)
    derive_exponents(3, 3 - 2e-6)


def test_iso_ball_values():
    assert iso_ball(2) == pytest.approx(3.5449077, abs=1e-7)
    assert iso_ball(3) == pytest.approx(4.8359758, abs=1e-7)
    assert iso_ball(2) == pytest.approx(2 * math.sqrt(math.pi), rel=1e-14)
    with pytest.raises(DomainError):
        iso_ball(1)


def test_sphere_and_ball_measures():
    assert sigma(1) == pytest.approx(2 * math.pi, rel=1e-14)
    assert sigma(1) == pytest.approx(2 * omega(2), rel=1e-14)
    assert sigma(0) == pytest.approx(2.0)
    assert omega(0) == pytest.approx(1.0)
    assert omega(3) == pytest.approx(4 * math.pi / 3, rel=1e-14)
    with pytest.raises(DomainError):
        sigma(-1)


@given(st.integers(2, 12))
def test_sphere_area_is_n_times_ball_volume(n):
    assert sigma(n - 1) == pytest.approx(n * omega(n), rel=1e-13)
    assert iso_ball(n) == pytest.approx(n * omega(n) ** (1 / n), rel=1e-13)


@st.composite
def pairs(draw):
    n = draw(st.integers(2, 10))
    frac = draw(st.floats(1e-5, 1 - 1e-5))
    return n, 1 + frac * (n - 1)


@given(pairs())
def test_product_identities_and_ordering(np_pair):
    n, p = np_pair
    try:
        e = derive_exponents(n, p)
    except DomainError:
        return
    assert e.p_star * (n - p) == pytest.approx(n * p, rel=1e-14)
    assert e.p_sharp * (n - p) == pytest.approx((n - 1) * p, rel=1e-14)
    assert e.p_sharp < e.p_star
    assert 1 / e.p + 1 / e.p_prime == pytest.approx(1.0, rel=1e-14)
