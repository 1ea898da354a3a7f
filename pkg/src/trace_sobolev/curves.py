"""Curve functionals of the normalized family members and the constants built from them.

For a member ``U`` centered at ``t e1`` the module works with four raw
integrals of the unnormalized profile::

    Z = int_H U^{p*}            M = int_H U^{p*} |x - t e1|^{p'}
    W = int_H U^{p#}            B = int_{dH} U^{p#}

and combines them as ratios (the gradient integral is ``kappa^p * M``)::

    T = B^{1/p#} / Z^{1/p*}     G = kappa * M^{1/p} / Z^{1/p*}
    Y = (M / Z)^{1/p'}          int_H u^{p#} = W / Z^{p#/p*}

where ``u = U / Z^{1/p*}`` is the normalized member.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import gammaln

from .errors import DomainError, InvarianceViolation, ModeError
from .params import Exponents, derive_exponents, omega
from .profiles import FamilyTag, check_admissible, power_integrand
from .radial_quad import (QuadratureSpec, RadialIntegrand, boundary_integral, cap_area, cap_volume,
                          fullspace_integral, halfspace_integral)

ESCOBAR_REFERENCE_T = -1.0
ESCOBAR_CHECK_T = (-0.5, -2.0, -5.0)


class Member(NamedTuple):
    """Raw integrals and derived functionals of one family member."""

    family: FamilyTag
    t: float
    Z: float
    M: float
    W: float
    B: float
    T: float
    G: float
    Y: float
    boundary_mass: float   # int_H u^{p#} of the normalized member


@dataclass(frozen=True)
class CurveConstants:
    exps: Exponents
    S: float
    T_E: float
    G_E: float
    Y_E: float
    E: float
    T_0: float
    T_star: float
    quad: QuadratureSpec
    phi_T0: float = math.nan    # G_S(0), equal to 2^{-1/n} S


def te_gamma_formula(n, p) -> float:
    """Gamma-function expression proportional to T_E^{p#} at fixed n.

    Evaluated through log-Gamma; raises OverflowError only when the
    arguments exceed 1e8, i.e. for p within about 1e-8 of 1.
    """
    if n < 2 or not 1.0 < p < n:
        raise DomainError(f"need n >= 2 and 1 < p < n, got n={n}, p={p}")
    q = 2.0 * (p - 1.0)
    a1 = (n - 1.0) / q
    a2 = (n - 1.0) * p / q
    b1 = (n + p - 1.0) / q
    b2 = n * p / q
    if max(a2, b2) > 1e8:
        raise OverflowError(f"Gamma arguments too large for p={p}")
    log_r = (gammaln(a1) - gammaln(a2)) - (n - 1.0) / n * (math.log(p - 1.0) + gammaln(b1) - gammaln(b2))
    return math.exp(log_r)


def escobar_dimension_constant(n) -> float:
    """The p-independent factor with T_E^{p#} = factor * te_gamma_formula(n, p)."""
    return math.pi ** ((n - 1.0) / (2.0 * n)) * n ** ((n - 1.0) / n)


class Curves:
    """Curve functionals for a fixed exponent pair.

    Quadrature runs in relative mode (only ``quad.rel_tol`` binds) because
    the raw integrals range over many orders of magnitude along the families.
    """

    def __init__(self, exps: Exponents, quad: QuadratureSpec = QuadratureSpec()):
        self.exps = exps
        self.quad = quad
        self._rq = quad.relative()
        self._members = {}
        self._constants = None

    @classmethod
    def for_pair(cls, n, p, quad: QuadratureSpec = QuadratureSpec()):
        return cls(derive_exponents(n, p), quad)

    # ------------------------------------------------------------------ members

    def _require_p_gt_1(self):
        if self.exps.is_p1:
            raise ModeError("operation needs p > 1; use the p = 1 routines")

    def member(self, family, t, eps=None) -> Member:
        """All functionals of a family member; beyond-Escobar may pass eps = -1 - t."""
        self._require_p_gt_1()
        family = FamilyTag(family)
        if family is FamilyTag.BEYOND_ESCOBAR and eps is not None:
            eps = float(eps)
            if not eps > 0:
                raise DomainError("beyond-Escobar offset needs eps > 0")
            t = -1.0 - eps
            key = (family, "eps", eps)
        else:
            family = check_admissible(family, self.exps, t)
            t = float(t)
            if family is FamilyTag.BEYOND_ESCOBAR:
                eps = -1.0 - t
            key = (family, t)
        hit = self._members.get(key)
        if hit is not None:
            return hit
        e = self.exps
        n = e.n
        z = halfspace_integral(n, t, power_integrand(e, family, t, n, eps=eps), self._rq)
        m = halfspace_integral(n, t, power_integrand(e, family, t, n, e.p_prime, eps=eps), self._rq)
        w = halfspace_integral(n, t, power_integrand(e, family, t, n - 1, eps=eps), self._rq)
        b = boundary_integral(n, t, power_integrand(e, family, t, n - 1, eps=eps), self._rq)
        z, m, w, b = float(z), float(m), float(w), float(b)
        zn = z ** (1.0 / e.p_star)
        out = Member(
            family=family, t=t, Z=z, M=m, W=w, B=b,
            T=b ** (1.0 / e.p_sharp) / zn,
            G=e.kappa * m ** (1.0 / e.p) / zn,
            Y=(m / z) ** (1.0 / e.p_prime),
            boundary_mass=w / z ** (e.p_sharp / e.p_star),
        )
        self._members[key] = out
        return out

    def trace_only(self, family, t, eps=None) -> float:
        """T alone (two integrals instead of four); used inside root finding."""
        self._require_p_gt_1()
        family = FamilyTag(family)
        if family is FamilyTag.BEYOND_ESCOBAR:
            if eps is None:
                eps = -1.0 - float(t)
            t = -1.0 - eps
            key = (family, "eps", float(eps))
        else:
            family = check_admissible(family, self.exps, t)
            t = float(t)
            key = (family, t)
        hit = self._members.get(key)
        if hit is not None:
            return hit.T
        hit = self._members.get(("T",) + key)
        if hit is not None:
            return hit
        e = self.exps
        z = halfspace_integral(e.n, t, power_integrand(e, family, t, e.n, eps=eps), self._rq)
        b = boundary_integral(e.n, t, power_integrand(e, family, t, e.n - 1, eps=eps), self._rq)
        val = float(b) ** (1.0 / e.p_sharp) / float(z) ** (1.0 / e.p_star)
        self._members[("T",) + key] = val
        return val

    def t_s(self, t):
        if self.exps.is_p1:
            return self.p1_curve(t)[0]
        return self.member(FamilyTag.SOBOLEV, t).T

    def g_s(self, t):
        if self.exps.is_p1:
            return self.p1_curve(t)[1]
        return self.member(FamilyTag.SOBOLEV, t).G

    def y_s(self, t):
        if self.exps.is_p1:
            check_admissible(FamilyTag.BALL_P1, self.exps, t)
            return 1.0
        return self.member(FamilyTag.SOBOLEV, t).Y

    def t_be(self, t):
        return self.member(FamilyTag.BEYOND_ESCOBAR, t).T

    def g_be(self, t):
        return self.member(FamilyTag.BEYOND_ESCOBAR, t).G

    def y_be(self, t):
        return self.member(FamilyTag.BEYOND_ESCOBAR, t).Y

    def t_e(self, t=ESCOBAR_REFERENCE_T):
        return self.member(FamilyTag.ESCOBAR, t).T

    def g_e(self, t=ESCOBAR_REFERENCE_T):
        return self.member(FamilyTag.ESCOBAR, t).G

    def y_e(self, t=ESCOBAR_REFERENCE_T):
        return self.member(FamilyTag.ESCOBAR, t).Y

    # ---------------------------------------------------------------- constants

    def escobar_constants(self):
        """(T_E, G_E, Y_E) at the reference offset, checked for offset independence."""
        self._require_p_gt_1()
        ref = self.member(FamilyTag.ESCOBAR, ESCOBAR_REFERENCE_T)
        limit = 10.0 * self.quad.rel_tol
        for t in ESCOBAR_CHECK_T:
            other = self.member(FamilyTag.ESCOBAR, t)
            for name, a, b in (("T", other.T, ref.T), ("G", other.G, ref.G),
                               ("Y/|t|", other.Y / abs(t), ref.Y)):
                if abs(a - b) > limit * abs(b):
                    raise InvarianceViolation(
                        f"Escobar {name} at t={t} differs from t=-1 by {abs(a - b) / abs(b):.3g} (relative)")
        return ref.T, ref.G, ref.Y

    def sobolev_constant(self) -> float:
        """Sharp Sobolev quotient of the full-space bubble."""
        self._require_p_gt_1()
        e = self.exps
        num = fullspace_integral(e.n, power_integrand(e, FamilyTag.SOBOLEV, 0.0, e.n, e.p_prime), self._rq)
        den = fullspace_integral(e.n, power_integrand(e, FamilyTag.SOBOLEV, 0.0, e.n), self._rq)
        return e.kappa * float(num) ** (1.0 / e.p) / float(den) ** (1.0 / e.p_star)

    def t_star_offset(self) -> float:
        """Offset whose Sobolev trace norm is the concavity threshold T_*."""
        return self.exps.p_star ** (1.0 / self.exps.p_prime)

    def constants(self) -> CurveConstants:
        if self._constants is not None:
            return self._constants
        e = self.exps
        if e.is_p1:
            iso = e.dims.iso_b1
            t0, g0 = self.p1_curve(0.0)
            self._constants = CurveConstants(e, iso, math.inf, math.inf, 1.0, 1.0, t0, math.nan,
                                             self.quad, g0)
            return self._constants
        t_e, g_e, y_e = self.escobar_constants()
        s = self.sobolev_constant()
        t0 = self.t_s(0.0)
        g0 = self.g_s(0.0)
        t_star = self.t_s(self.t_star_offset())
        tol = 1e3 * self.quad.rel_tol
        if not t0 < t_e:
            raise InvarianceViolation(f"T_0={t0} is not below T_E={t_e}")
        if abs(g0 - 2.0 ** (-1.0 / e.n) * s) > tol * s:
            raise InvarianceViolation("G_S(0) differs from 2^(-1/n) S")
        self._constants = CurveConstants(e, s, t_e, g_e, y_e, g_e / t_e, t0, t_star, self.quad, g0)
        return self._constants

    # ----------------------------------------------------------------- identities

    def equality_identity_residual(self, family, t) -> float:
        """Relative residual of n int u^{p#} = p# G Y + t T^{p#} for a normalized member."""
        m = self.member(family, t)
        lhs = self.exps.n * m.boundary_mass
        rhs = self.exps.p_sharp * m.G * m.Y + m.t * m.T ** self.exps.p_sharp
        return abs(lhs - rhs) / abs(lhs)

    def be_excess(self, eps):
        """(Y - |t|, gap) for the beyond-Escobar member with t = -1 - eps.

        ``gap`` is G - T^{p#}/p#, rewritten through the equality identity so
        that no two nearly equal numbers are subtracted:
        ``gap = (n int u^{p#} / p# - G (Y - |t|)) / |t|``.
        """
        e = self.exps
        eps = float(eps)
        mem = self.member(FamilyTag.BEYOND_ESCOBAR, None, eps=eps)
        a = 1.0 + eps
        pp = e.p_prime
        apow = a ** pp
        k = e.n

        def func(r):
            return (r ** pp - apow) * np.expm1(pp * np.log(r)) ** (-k)

        def func_offset(v):
            x = eps + v
            return apow * np.expm1(pp * np.log1p(v / a)) * np.expm1(pp * np.log1p(x)) ** (-k)

        base = power_integrand(e, FamilyTag.BEYOND_ESCOBAR, mem.t, k, pp, eps=eps)
        f = RadialIntegrand(func, base.tail_exponent, base.tail_const, base.tail_start, base.scale,
                            func_offset=func_offset)
        excess = float(halfspace_integral(e.n, mem.t, f, self._rq))
        y_minus_a = a * math.expm1(math.log1p(excess / (mem.Z * apow)) / pp)
        gap = (e.n * mem.boundary_mass / e.p_sharp - mem.G * y_minus_a) / a
        return y_minus_a, gap

    def h_boundary(self, t) -> float:
        """Boundary integral of U_S^{p#} over the hyperplane at signed distance t."""
        e = self.exps
        return float(boundary_integral(e.n, t, power_integrand(e, FamilyTag.SOBOLEV, t, e.n - 1), self._rq))

    # ----------------------------------------------------------------------- p = 1

    def p1_curve(self, t):
        """(T, G) of the normalized cap B_1(t e1) in H, in closed form."""
        if not self.exps.is_p1:
            raise ModeError("p1_curve needs p = 1")
        return p1_curve(self.exps.n, t)

    def p1_mass(self, t) -> float:
        """int_H u for the normalized p = 1 profile, V(t)^{1/n}."""
        if not -1.0 < t < 1.0:
            raise DomainError(f"need -1 < t < 1, got {t}")
        return cap_volume(self.exps.n, t) ** (1.0 / self.exps.n)


def p1_curve(n, t):
    t = float(t)
    if not -1.0 < t < 1.0:
        raise DomainError(f"p = 1 curve needs -1 < t < 1, got {t}")
    vol = cap_volume(n, t)
    level = vol ** (-(n - 1.0) / n)
    trace = omega(n - 1) * ((1.0 - t) * (1.0 + t)) ** (0.5 * (n - 1)) * level
    perimeter = cap_area(n, 1.0, t) * level
    return trace, perimeter
