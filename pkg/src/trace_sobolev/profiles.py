"""Radial profiles of the three minimizer families and the p = 1 ball family."""

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError, ModeError, NormalizationFailure
from .params import Exponents
from .radial_quad import QuadratureSpec, RadialIntegrand, cap_volume, halfspace_integral


class FamilyTag(str, enum.Enum):
    SOBOLEV = "Sobolev"
    ESCOBAR = "Escobar"
    BEYOND_ESCOBAR = "BeyondEscobar"
    BALL_P1 = "BallP1"

    def __str__(self):
        return self.value


# additive constant c in the base c + r^p'
_BASE_CONST = {FamilyTag.SOBOLEV: 1.0, FamilyTag.ESCOBAR: 0.0, FamilyTag.BEYOND_ESCOBAR: -1.0}


def check_admissible(family, exps: Exponents, t):
    family = FamilyTag(family)
    t = float(t)
    if not math.isfinite(t):
        raise DomainError("offset t must be finite")
    if exps.is_p1:
        if family not in (FamilyTag.BALL_P1, FamilyTag.SOBOLEV):
            raise ModeError(f"{family} is not defined for p = 1")
        if not -1.0 < t < 1.0:
            raise DomainError(f"p = 1 profiles need -1 < t < 1, got {t}")
        return FamilyTag.BALL_P1
    if family is FamilyTag.BALL_P1:
        raise ModeError("the ball family exists only for p = 1")
    if family is FamilyTag.ESCOBAR and not t < 0:
        raise DomainError(f"Escobar profiles need t < 0, got {t}")
    if family is FamilyTag.BEYOND_ESCOBAR and not t < -1:
        raise DomainError(f"beyond-Escobar profiles need t < -1, got {t}")
    return family


def _domain_check(family, r):
    if np.any(r < 0):
        raise DomainError("radius must be nonnegative")
    if family is FamilyTag.ESCOBAR and np.any(r <= 0):
        raise DomainError("Escobar profile is singular at r = 0")
    if family is FamilyTag.BEYOND_ESCOBAR and np.any(r <= 1):
        raise DomainError("beyond-Escobar profile is defined only for r > 1")


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def raw_value(family, exps: Exponents, r):
    """Unnormalized family profile as a function of the distance to its center."""
    family = FamilyTag(family)
    r = np.asarray(r, dtype=float)
    if family is FamilyTag.BALL_P1 or exps.is_p1:
        if np.any(r < 0):
            raise DomainError("radius must be nonnegative")
        return _scalar(np.where(r < 1.0, 1.0, 0.0))
    _domain_check(family, r)
    pp = exps.p_prime
    expo = (exps.p - exps.n) / exps.p
    with np.errstate(over="raise", divide="raise"):
        try:
            if family is FamilyTag.SOBOLEV:
                out = (1.0 + r ** pp) ** expo
            elif family is FamilyTag.ESCOBAR:
                out = r ** ((exps.p - exps.n) / (exps.p - 1.0))
            else:
                out = np.expm1(pp * np.log(r)) ** expo
        except FloatingPointError as exc:
            raise OverflowError(f"{family} profile overflows at r={r}") from exc
    return _scalar(out)


def raw_gradient_magnitude(family, exps: Exponents, r):
    """|grad U| of the unnormalized profile at distance ``r`` from the center."""
    family = FamilyTag(family)
    if family is FamilyTag.BALL_P1 or exps.is_p1:
        raise ModeError("for p = 1 the gradient is a measure; use the geometric p = 1 routines")
    r = np.asarray(r, dtype=float)
    _domain_check(family, r)
    pp = exps.p_prime
    kappa = exps.kappa
    with np.errstate(over="raise", divide="raise"):
        try:
            if family is FamilyTag.SOBOLEV:
                out = kappa * r ** (pp - 1.0) * (1.0 + r ** pp) ** (-exps.n / exps.p)
            elif family is FamilyTag.ESCOBAR:
                out = kappa * r ** ((1.0 - exps.n) / (exps.p - 1.0))
            else:
                out = kappa * r ** (pp - 1.0) * np.expm1(pp * np.log(r)) ** (-exps.n / exps.p)
        except FloatingPointError as exc:
            raise OverflowError(f"{family} gradient overflows at r={r}") from exc
    return _scalar(out)


def power_integrand(exps: Exponents, family, t, k, m=0.0, eps=None) -> RadialIntegrand:
    """Radial integrand ``r**m * (c + r**p')**(-k)`` for the family centered at ``t e1``.

    Powers of the profile and of its gradient are all of this form.  For the
    beyond-Escobar family ``eps = -1 - t`` may be passed explicitly so that
    the distance to the singular shell keeps full relative precision.
    """
    family = FamilyTag(family)
    pp = exps.p_prime
    decay = pp * k - m
    t = float(t)
    if family is FamilyTag.SOBOLEV:
        return RadialIntegrand(
            func=lambda r: r ** m * (1.0 + r ** pp) ** (-k),
            tail_exponent=decay, tail_const=1.0, tail_start=1.0, scale=1.0)
    if family is FamilyTag.ESCOBAR:
        a = abs(t)
        return RadialIntegrand(
            func=lambda r: r ** (-decay),
            tail_exponent=decay, tail_const=1.0, tail_start=a, scale=a)
    if family is not FamilyTag.BEYOND_ESCOBAR:
        raise ModeError(f"no power integrand for {family}")
    if eps is None:
        eps = -1.0 - t
    eps = float(eps)
    if not eps > 0:
        raise DomainError("beyond-Escobar profiles need t < -1")
    a = 1.0 + eps
    shell_sq = eps * (2.0 + eps)

    def func(r):
        return r ** m * np.expm1(pp * np.log(r)) ** (-k)

    def func_offset(v):
        x = eps + v
        return (1.0 + x) ** m * np.expm1(pp * np.log1p(x)) ** (-k)

    def func_plane(rho):
        q = rho * rho + shell_sq
        return (1.0 + q) ** (0.5 * m) * np.expm1(0.5 * pp * np.log1p(q)) ** (-k)

    return RadialIntegrand(
        func=func, tail_exponent=decay, tail_const=2.0 ** k,
        tail_start=max(2.0 ** (1.0 / pp), a), scale=min(eps, 1.0) if eps < 1 else 1.0,
        func_offset=func_offset, func_plane=func_plane,
        plane_scale=min(math.sqrt(shell_sq), a))


@dataclass(frozen=True)
class Profile:
    """A family member centered at ``t e1``, normalized to unit L^{p*}(H) norm."""

    exps: Exponents
    family: FamilyTag
    t: float
    z_norm: float

    def value(self, r):
        """Normalized profile at distance ``r`` from the center."""
        if self.family is FamilyTag.BALL_P1:
            return raw_value(self.family, self.exps, r) * ball_level(self.exps.n, self.t)
        return raw_value(self.family, self.exps, r) / self.z_norm

    def gradient_magnitude(self, r):
        return raw_gradient_magnitude(self.family, self.exps, r) / self.z_norm

    def value_at(self, x):
        """Normalized profile at points ``x`` of shape (..., n)."""
        x = np.asarray(x, dtype=float)
        shifted = x.copy()
        shifted[..., 0] -= self.t
        return self.value(np.linalg.norm(shifted, axis=-1))


def ball_level(n, t) -> float:
    """Height of the normalized p = 1 profile on its cap: V(t)^(-(n-1)/n)."""
    return cap_volume(n, t) ** (-(n - 1.0) / n)


@lru_cache(maxsize=512)
def _z_raw(exps, family, t, quad):
    f = power_integrand(exps, family, t, exps.n)
    return halfspace_integral(exps.n, t, f, quad)


def normalize(family, exps: Exponents, t, quad: QuadratureSpec = QuadratureSpec()) -> Profile:
    """Normalize the family member centered at ``t e1`` in L^{p*}(H)."""
    family = check_admissible(family, exps, t)
    t = float(t)
    if family is FamilyTag.BALL_P1:
        return Profile(exps, family, t, cap_volume(exps.n, t) ** (1.0 / exps.p_star))
    zp = _z_raw(exps, family, t, quad)
    z_norm = float(zp) ** (1.0 / exps.p_star)
    if not (math.isfinite(z_norm) and z_norm > 0):
        raise NormalizationFailure(f"bad normalization constant {z_norm!r}")
    # independent recomputation of the normalized mass without the endpoint substitution
    check_quad = QuadratureSpec(quad.abs_tol, quad.rel_tol, quad.max_subdivisions,
                                quad.tail_exponent_margin, not quad.endpoint_substitution)
    f = power_integrand(exps, family, t, exps.n)
    mass = halfspace_integral(exps.n, t, f, check_quad) / float(zp)
    tol = 10.0 * (quad.rel_tol + zp.error / float(zp))
    if abs(mass - 1.0) > tol:
        raise NormalizationFailure(f"normalized mass {mass!r} differs from 1 by more than {tol:.2g}")
    return Profile(exps, family, t, z_norm)
