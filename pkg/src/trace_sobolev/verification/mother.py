"""The transport inequality on trial pairs, its family lower bounds, and equality detection.

For normalized ``f, g`` on H and any real ``t`` the inequality reads::

    n int_H g^{p#}  <=  p# ||grad f||_p Y(t, g) + t int_{dH} f^{p#}

with ``Y(t, g)`` the ``p'``-moment of ``g^{p*}`` about ``t e1``, or for
p = 1 the largest distance from ``t e1`` to the support of ``g``.
"""

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from ..curves import Curves
from ..errors import AmbiguousClassification, DomainError, InequalityViolation, ModeError
from ..params import omega
from ..profiles import FamilyTag
from ..radial_quad import QuadratureSpec, cap_area, cap_volume
from .norms import TrialNorms, trial_moment, trial_norms
from .trials import BallTrial, RadialTrial

CLASSIFY_TOL = 1e-4
ESCOBAR_SHAPE_TOL = 1e-8
FIT_RESIDUAL_TOL = 1e-6
T_FIT_TOL = 1e-3
TOL_FACTOR = 10.0


class NotExtremal(str, enum.Enum):
    NOT_EXTREMAL = "NotExtremal"

    def __str__(self):
        return self.value


NOT_EXTREMAL = NotExtremal.NOT_EXTREMAL


@dataclass
class CheckResult:
    """One verified comparison ``lhs <= rhs`` (or ``lhs == rhs``)."""

    check: str
    params: dict
    lhs: float
    rhs: float
    margin: float
    passed: bool
    tol: float = 0.0
    detail: dict = field(default_factory=dict)

    def record(self) -> dict:
        return {"check": self.check, "params": self.params, "lhs": self.lhs, "rhs": self.rhs,
                "margin": self.margin, "pass": bool(self.passed)}

    @property
    def relative_margin(self):
        return self.margin / abs(self.lhs) if self.lhs else math.inf


# ------------------------------------------------------------------ p = 1 geometry


@dataclass(frozen=True)
class BallGeometry:
    volume: float      # |B ∩ H|
    perimeter: float   # area of the sphere part inside H
    face: float        # area of the flat part on dH


def ball_geometry(ball: BallTrial) -> BallGeometry:
    n, c, mu = ball.exps.n, ball.center, ball.radius
    if c >= mu:
        return BallGeometry(omega(n) * mu ** n, cap_area(n, mu, c), 0.0)
    vol = mu ** n * cap_volume(n, c / mu)
    face = omega(n - 1) * ((mu - c) * (mu + c)) ** (0.5 * (n - 1))
    return BallGeometry(vol, cap_area(n, mu, c), face)


def ball_reach(ball: BallTrial, t) -> float:
    """Largest distance from ``t e1`` to the closed set B ∩ closure(H)."""
    c, mu = ball.center, ball.radius
    if t <= c:
        return c + mu - t
    if c - mu >= 0:
        return t - c + mu
    return math.sqrt((mu - c) * (mu + c) + t * t)


# ---------------------------------------------------------------------- normalized


@dataclass(frozen=True)
class Normalized:
    """Normalized functionals of a trial: gradient norm, trace, interior p# mass."""

    grad: float
    trace: float       # int_{dH} f^{p#}
    mass: float        # int_H f^{p#}
    raw: object


def normalized(trial, quad: QuadratureSpec) -> Normalized:
    e = trial.exps
    if isinstance(trial, BallTrial):
        geo = ball_geometry(trial)
        level = geo.volume ** (-(e.n - 1.0) / e.n)
        return Normalized(geo.perimeter * level, geo.face * level, geo.volume * level, geo)
    if e.is_p1:
        raise ModeError("p = 1 checks take ball trials")
    raw: TrialNorms = trial_norms(trial, quad)
    zr = raw.Z ** (1.0 / e.p_star)
    return Normalized(raw.D ** (1.0 / e.p) / zr, raw.B / zr ** e.p_sharp, raw.W / zr ** e.p_sharp, raw)


def moment_y(trial, t, quad: QuadratureSpec, norms: Normalized = None) -> float:
    """Y(t, g) for a trial ``g``."""
    if isinstance(trial, BallTrial):
        return ball_reach(trial, t)
    raw = (norms or normalized(trial, quad)).raw
    return (trial_moment(trial, t, quad) / raw.Z) ** (1.0 / trial.exps.p_prime)


def _tolerance(quad, *terms):
    return TOL_FACTOR * max(quad.abs_tol, quad.rel_tol * sum(abs(x) for x in terms))


def _mother_terms(nf, ng, y, t, exps):
    lhs = exps.n * ng.mass
    grad_term = exps.p_sharp * nf.grad * y
    trace_term = t * nf.trace
    return lhs, grad_term, trace_term


def check_mother(f, g, t, quad: QuadratureSpec = QuadratureSpec(), *, raise_on_violation=True,
                 _cache=None) -> CheckResult:
    """Both sides of the transport inequality for the pair ``(f, g)`` at offset ``t``."""
    if f.exps != g.exps:
        raise DomainError("trials f and g use different exponents")
    t = float(t)
    if not math.isfinite(t):
        raise DomainError("t must be finite")
    exps = f.exps
    cache = _cache if _cache is not None else {}
    nf = cache.get(f) or cache.setdefault(f, normalized(f, quad))
    ng = cache.get(g) or cache.setdefault(g, normalized(g, quad))
    y = moment_y(g, t, quad, ng)
    lhs, grad_term, trace_term = _mother_terms(nf, ng, y, t, exps)
    rhs = grad_term + trace_term
    margin = rhs - lhs
    tol = _tolerance(quad, lhs, grad_term, trace_term)
    res = CheckResult("mother", {"n": exps.n, "p": exps.p, "t": t, "f": f.describe(), "g": g.describe()},
                      lhs, rhs, margin, margin >= -tol, tol,
                      {"grad": nf.grad, "trace": nf.trace, "Y": y})
    if not res.passed and raise_on_violation:
        raise InequalityViolation(f"transport inequality fails by {-margin:.3g} (tolerance {tol:.3g}) at t={t}")
    return res


# ----------------------------------------------------------------- family bounds


def check_corollary_bounds(h, t, quad: QuadratureSpec = QuadratureSpec(), curves: Curves = None,
                           *, raise_on_violation=True) -> list:
    """The three family lower bounds for a normalized trial ``h`` at offset ``t``.

    Each bound reads ``p# Y G + s T^{p#} <= p# Y ||grad h|| + s int_{dH} h^{p#}``
    with the family's (T, G, Y) at offset ``s``; the beyond-Escobar bound
    exists only for ``t < -1`` and the Escobar bound always uses ``s = -1``.
    Inapplicable bounds are returned with ``passed = None``.
    """
    exps = h.exps
    curves = curves or Curves(exps, quad)
    t = float(t)
    nh = normalized(h, quad)
    out = []

    def bound(name, s, T, G, Y, psharp):
        lhs = psharp * Y * G + s * T ** psharp
        rhs = psharp * Y * nh.grad + s * nh.trace
        tol = _tolerance(quad, psharp * Y * G, s * T ** psharp, psharp * Y * nh.grad, s * nh.trace)
        res = CheckResult(f"corollary-{name}", {"n": exps.n, "p": exps.p, "t": s, "h": h.describe()},
                          lhs, rhs, rhs - lhs, rhs - lhs >= -tol, tol)
        out.append(res)

    if exps.is_p1:
        if not -1.0 < t < 1.0:
            raise DomainError("the p = 1 bound needs -1 < t < 1")
        T, G = curves.p1_curve(t)
        bound("sobolev", t, T, G, 1.0, 1.0)
    else:
        m = curves.member(FamilyTag.SOBOLEV, t)
        bound("sobolev", t, m.T, m.G, m.Y, exps.p_sharp)
        if t < -1.0:
            m = curves.member(FamilyTag.BEYOND_ESCOBAR, t)
            bound("beyond_escobar", t, m.T, m.G, m.Y, exps.p_sharp)
        else:
            out.append(CheckResult("corollary-beyond_escobar",
                                   {"n": exps.n, "p": exps.p, "t": t, "h": h.describe()},
                                   math.nan, math.nan, math.nan, None))
        t_e, g_e, y_e = curves.escobar_constants()
        bound("escobar", -1.0, t_e, g_e, y_e, exps.p_sharp)

    if raise_on_violation:
        for res in out:
            if res.passed is False:
                raise InequalityViolation(f"{res.check} fails by {-res.margin:.3g} for {h.describe()}")
    return out


# ---------------------------------------------------------------- classification


def _fit_shape(f: RadialTrial):
    """Fit f^(-1/alpha) = a + b r^{p'} on sample radii; return (a/(b r_ref^{p'}), residual)."""
    e = f.exps
    alpha = (e.n - e.p) / e.p
    lo = abs(f.center) if f.center < 0 else 0.0
    r = lo + f.scale * np.array([0.3, 0.6, 1.0, 1.5, 2.5, 4.0])
    vals = np.asarray(f.value(r), dtype=float)
    if np.any(~(vals > 0)) or not np.all(np.isfinite(vals)):
        return math.nan, math.inf
    y = vals ** (-1.0 / alpha)
    x = r ** e.p_prime
    design = np.column_stack([np.ones_like(x), x])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = np.max(np.abs(design @ coef - y)) / np.max(np.abs(y))
    a, b = coef
    if not b > 0:
        return math.nan, math.inf
    r_ref = max(lo, f.scale)
    return a / (b * r_ref ** e.p_prime), resid


def _best_offset(f, t, quad, cache):
    """Offset near ``t`` minimizing the relative margin with g = f."""
    def rel(s):
        r = check_mother(f, f, s, quad, raise_on_violation=False, _cache=cache)
        return r.margin / abs(r.lhs)

    width = 0.5 * max(1.0, abs(t))
    res = minimize_scalar(rel, bounds=(t - width, t + width), method="bounded",
                          options={"xatol": 1e-7 * max(1.0, abs(t))})
    return float(res.x)


def classify_equality(f, t, quad: QuadratureSpec = QuadratureSpec(), tol=CLASSIFY_TOL):
    """Family of ``f`` if the pair ``(f, f)`` attains equality at ``t``, else NOT_EXTREMAL."""
    t = float(t)
    cache = {}
    res = check_mother(f, f, t, quad, raise_on_violation=False, _cache=cache)
    if abs(res.relative_margin) > tol:
        return NOT_EXTREMAL
    if isinstance(f, BallTrial):
        inside = -1.0 < f.center / f.radius < 1.0
        return FamilyTag.BALL_P1 if inside and abs(f.center - t) <= T_FIT_TOL * max(1.0, abs(t)) \
            else NOT_EXTREMAL
    if not isinstance(f, RadialTrial):
        return NOT_EXTREMAL
    shape, resid = _fit_shape(f)
    if not resid < FIT_RESIDUAL_TOL:
        return NOT_EXTREMAL
    if abs(shape) <= ESCOBAR_SHAPE_TOL:
        family = FamilyTag.ESCOBAR
        consistent = t < 0
    elif abs(shape) >= tol:
        family = FamilyTag.SOBOLEV if shape > 0 else FamilyTag.BEYOND_ESCOBAR
        consistent = family is FamilyTag.SOBOLEV or t < -f.scale
    else:
        raise AmbiguousClassification(
            f"shape constant {shape:.3g} lies between the Escobar and Sobolev/beyond-Escobar thresholds")
    t_fit = _best_offset(f, t, quad, cache)
    if not (consistent and abs(t_fit - t) <= T_FIT_TOL * max(1.0, abs(t))):
        return NOT_EXTREMAL
    return family
