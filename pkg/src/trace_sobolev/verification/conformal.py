"""Euler-Lagrange and conformal-curvature checks for p = 2.

A normalized family member ``u`` solves ``-Delta u = lam u^{2*-1}`` in H with
``-d_1 u = sig u^{2#-1}`` on the boundary.  Read as a conformal factor, the
metric ``u^{4/(n-2)} |dx|^2`` has constant scalar curvature
``R = 4(n-1)/(n-2) lam`` and constant boundary mean curvature
``h = 2/(n-2) sig``.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from ..curves import Curves
from ..errors import ConstancyViolation, CrossCheckFailure, ModeError, SignViolation
from ..params import derive_exponents
from ..phi_curve import PhiCurve
from ..profiles import FamilyTag, check_admissible, normalize
from ..radial_quad import QuadratureSpec
from .mother import CheckResult

SPREAD_TOL = 1e-5
ZERO_TOL = 1e-8
CURVATURE_ZERO_TOL = 1e-6
CROSS_TOL = 1e-3
INTERIOR_X1 = (0.2, 0.7, 1.5, 3.0)
INTERIOR_RHO = (0.0, 0.5, 1.3, 2.5)
BOUNDARY_RHO = (0.1, 0.5, 1.0, 2.0, 4.0)
_BASE = {FamilyTag.SOBOLEV: 1.0, FamilyTag.ESCOBAR: 0.0, FamilyTag.BEYOND_ESCOBAR: -1.0}


def _radial_derivatives(c, n, r):
    """U, U', U'' for U = (c + r^2)^{-(n-2)/2}."""
    a = 0.5 * (n - 2)
    base = c + r * r
    u = base ** (-a)
    du = -2.0 * a * r * base ** (-a - 1)
    d2u = -2.0 * a * base ** (-a - 1) + 4.0 * a * (a + 1) * r * r * base ** (-a - 2)
    return u, du, d2u


def _spread(vals):
    vals = np.asarray(vals, dtype=float)
    mean = float(np.mean(vals))
    if np.max(np.abs(vals)) <= ZERO_TOL:
        return mean, 0.0
    return mean, float((np.max(vals) - np.min(vals)) / abs(mean))


@dataclass
class ELReport:
    family: FamilyTag
    t: float
    n: int
    lam_samples: np.ndarray
    sigma_samples: np.ndarray
    lam: float
    sigma: float
    lam_spread: float
    sigma_spread: float
    curve_lam: float = math.nan
    curve_sigma: float = math.nan
    records: list = field(default_factory=list)


def check_el(family, t, n=3, quad: QuadratureSpec = QuadratureSpec(), curve: PhiCurve = None,
             cross_check=True) -> ELReport:
    """Pointwise multipliers of the p = 2 member, tested for constancy."""
    exps = derive_exponents(n, 2.0)
    family = check_admissible(family, exps, t)
    t = float(t)
    curve = curve or PhiCurve(Curves(exps, quad))
    member = curve.curves.member(family, t)
    z = member.Z ** (1.0 / exps.p_star)
    c = _BASE[family]

    x1, rho = np.meshgrid(INTERIOR_X1, INTERIOR_RHO)
    r = np.hypot(x1.ravel() - t, rho.ravel())
    u, du, d2u = _radial_derivatives(c, n, r)
    lap = (d2u + (n - 1) * du / r) / z
    lam_vals = -lap / (u / z) ** (exps.p_star - 1)

    rb = np.hypot(t, max(1.0, abs(t)) * np.asarray(BOUNDARY_RHO))
    ub, dub, _ = _radial_derivatives(c, n, rb)
    d1u = dub * (0.0 - t) / rb / z
    sig_vals = -d1u / (ub / z) ** (exps.p_sharp - 1)

    lam, lam_spread = _spread(lam_vals)
    sig, sig_spread = _spread(sig_vals)
    rep = ELReport(family, t, n, lam_vals, sig_vals, lam, sig, lam_spread, sig_spread)
    params = {"n": n, "p": 2.0, "family": str(family), "t": t}
    rep.records.append(CheckResult("el-lambda-constancy", params, lam_spread, SPREAD_TOL,
                                   SPREAD_TOL - lam_spread, lam_spread < SPREAD_TOL))
    rep.records.append(CheckResult("el-sigma-constancy", params, sig_spread, SPREAD_TOL,
                                   SPREAD_TOL - sig_spread, sig_spread < SPREAD_TOL))
    if family is FamilyTag.ESCOBAR:
        ok = abs(lam) < ZERO_TOL
        rep.records.append(CheckResult("el-escobar-harmonic", params, abs(lam), ZERO_TOL,
                                       ZERO_TOL - abs(lam), ok))
    for res in rep.records:
        if not res.passed:
            raise ConstancyViolation(f"{res.check} fails for {family} at t={t}: {res.lhs:.3g}")

    if cross_check:
        mult = curve.multipliers(member.T)
        rep.curve_lam, rep.curve_sigma = mult.lam, mult.sigma
        scale = max(abs(lam), abs(sig) * member.T ** exps.p_sharp, 1e-3 * member.G ** 2)
        for name, mine, theirs in (("lambda", lam, mult.lam), ("sigma", sig, mult.sigma)):
            ref = scale if name == "lambda" else scale / member.T ** exps.p_sharp
            ok = abs(mine - theirs) <= CROSS_TOL * ref
            rep.records.append(CheckResult(f"el-{name}-curve", params, mine, theirs,
                                           abs(mine - theirs), ok))
            if not ok:
                raise CrossCheckFailure(f"{name} = {mine:.8g} pointwise but {theirs:.8g} from the curve")
    return rep


@dataclass
class ConformalReport:
    family: FamilyTag
    t: float
    n: int
    R: float
    h: float
    R_spread: float
    h_spread: float
    volume: float
    area: float
    records: list = field(default_factory=list)


def expected_signs(family, t):
    """Signs (R, h) of the curvatures for a family member."""
    family = FamilyTag(family)
    if family is FamilyTag.SOBOLEV:
        return 1, (-1 if t > 0 else (0 if t == 0 else 1))
    if family is FamilyTag.ESCOBAR:
        return 0, 1
    return -1, 1


def _sign(x, tol):
    return 0 if abs(x) <= tol else (1 if x > 0 else -1)


def conformal_check(family, t, n=3, quad: QuadratureSpec = QuadratureSpec(), curve: PhiCurve = None,
                    cross_check=True) -> ConformalReport:
    if n < 3:
        raise ModeError("the conformal reading needs n >= 3")
    exps = derive_exponents(n, 2.0)
    el = check_el(family, t, n, quad, curve, cross_check)
    family, t = el.family, el.t
    R_vals = 4.0 * (n - 1) / (n - 2) * el.lam_samples
    h_vals = 2.0 / (n - 2) * el.sigma_samples
    R, R_spread = _spread(R_vals)
    h, h_spread = _spread(h_vals)
    prof = normalize(family, exps, t, quad)    # raises if the renormalized volume is off
    m = (curve.curves if curve else Curves(exps, quad)).member(family, t)
    vol = m.Z / prof.z_norm ** exps.p_star
    area = m.T ** exps.p_sharp
    rep = ConformalReport(family, t, n, R, h, R_spread, h_spread, vol, area, list(el.records))
    params = {"n": n, "p": 2.0, "family": str(family), "t": t}
    want_R, want_h = expected_signs(family, t)
    got_R, got_h = _sign(R, CURVATURE_ZERO_TOL), _sign(h, CURVATURE_ZERO_TOL)
    rep.records += [
        CheckResult("conformal-R-constancy", params, R_spread, SPREAD_TOL, SPREAD_TOL - R_spread,
                    R_spread < SPREAD_TOL),
        CheckResult("conformal-h-constancy", params, h_spread, SPREAD_TOL, SPREAD_TOL - h_spread,
                    h_spread < SPREAD_TOL),
        CheckResult("conformal-R-sign", params, R, want_R, float(got_R == want_R), got_R == want_R),
        CheckResult("conformal-h-sign", params, h, want_h, float(got_h == want_h), got_h == want_h),
        CheckResult("conformal-volume", params, vol, 1.0, -abs(vol - 1.0), abs(vol - 1.0) < 1e-8),
    ]
    for res in rep.records:
        if not res.passed:
            cls = SignViolation if res.check.endswith("sign") else ConstancyViolation
            raise cls(f"{res.check} fails for {family} at t={t}: got {res.lhs!r}, want {res.rhs!r}")
    return rep
