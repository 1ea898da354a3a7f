"""Raw integrals of trial functions.

For a trial ``f`` (not normalized) this computes::

    Z = int_H f^{p*}    D = int_H |grad f|^p    W = int_H f^{p#}    B = int_{dH} f^{p#}

and the moment ``M(t) = int_H f^{p*} |x - t e1|^{p'}``.  Radial trials go
through the one-dimensional radial integrators; axial products split into a
transverse radial factor and an ``x1`` factor, except for ``D`` and ``M``
which need a genuine two-dimensional rule.
"""

import math
from typing import NamedTuple

import numpy as np

from ..errors import DomainError, NormalizationFailure
from ..params import sigma
from ..radial_quad import (QuadratureSpec, QuadResult, boundary_integral, halfspace_integral,
                           halfspace_moment, integrate)
from .trials import AxialTrial, RadialTrial

# Gaussian factors are cut where exp(-GAUSS_CUT) is far below any tolerance in use
GAUSS_CUT = 70.0
INNER_PANELS = 12
INNER_NODES = 16
EXTRAP_STEP = 1e-3


class TrialNorms(NamedTuple):
    Z: float
    D: float
    W: float
    B: float


def _checked(name, value):
    value = float(value)
    if not (math.isfinite(value) and value > 0):
        raise NormalizationFailure(f"trial integral {name} = {value!r} is not finite and positive")
    return value


def trial_norms(trial, quad: QuadratureSpec) -> TrialNorms:
    quad = quad.relative()    # raw norms of small or dilated trials can be far below abs_tol
    e = trial.exps
    if isinstance(trial, RadialTrial):
        n, c = e.n, trial.center
        z = halfspace_integral(n, c, trial.integrand(e.p_star), quad)
        d = halfspace_integral(n, c, trial.grad_integrand(), quad)
        w = halfspace_integral(n, c, trial.integrand(e.p_sharp), quad)
        b = boundary_integral(n, c, trial.integrand(e.p_sharp), quad)
    elif isinstance(trial, AxialTrial):
        z = _axial_separable(trial, e.p_star, quad)
        w = _axial_separable(trial, e.p_sharp, quad)
        b = _transverse(trial, e.p_sharp, quad) * _boundary_limit(trial.w, trial.depth) ** e.p_sharp
        d = _axial_gradient(trial, quad)
    else:
        raise DomainError(f"no integral rules for trial {trial!r}")
    # B may vanish for a trial supported away from the boundary
    b = float(b)
    if not (math.isfinite(b) and b >= 0):
        raise NormalizationFailure(f"trial boundary integral {b!r} is invalid")
    return TrialNorms(_checked("Z", z), _checked("D", d), _checked("W", w), b)


def trial_moment(trial, t, quad: QuadratureSpec) -> float:
    quad = quad.relative()
    e = trial.exps
    if isinstance(trial, RadialTrial):
        return float(halfspace_moment(e.n, trial.center, trial.integrand(e.p_star), t, e.p_prime, quad))
    if isinstance(trial, AxialTrial):
        return _axial_moment(trial, t, quad)
    raise DomainError(f"no moment rule for trial {trial!r}")


# ---------------------------------------------------------------- axial products


def _transverse(trial: AxialTrial, q, quad) -> QuadResult:
    """int over R^{n-1} of u(|x'|)^q."""
    n = trial.exps.n
    cut = trial.width * math.sqrt(GAUSS_CUT / q)
    return integrate(lambda rho: sigma(n - 2) * rho ** (n - 2) * trial.u(rho) ** q,
                     [0.0, trial.width, cut], quad)


def _axial_breaks(trial: AxialTrial, q, extra=()):
    top = max(trial.shift, 0.0) + trial.depth * math.sqrt(GAUSS_CUT / q)
    pts = {0.0, top}
    for x in (trial.shift,) + tuple(extra):
        if 0.0 < x < top:
            pts.add(float(x))
    return sorted(pts)


def _axial_separable(trial: AxialTrial, q, quad) -> float:
    along = integrate(lambda x: trial.w(x) ** q, _axial_breaks(trial, q), quad)
    return float(_transverse(trial, q, quad)) * float(along)


def _boundary_limit(func, length):
    """One-sided limit at x1 = 0 from the cubic through x1 = h, 2h, 3h, 4h."""
    h = EXTRAP_STEP * length
    vals = func(h * np.arange(1, 5))
    return float(4.0 * vals[0] - 6.0 * vals[1] + 4.0 * vals[2] - vals[3])


def _inner_rule(cut):
    x, w = np.polynomial.legendre.leggauss(INNER_NODES)
    edges = np.linspace(0.0, cut, INNER_PANELS + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _two_d(trial: AxialTrial, density, q, quad, extra=()):
    """int_H density(x1, rho) over x1 > 0 and the transverse radius rho."""
    n = trial.exps.n
    rho, wts = _inner_rule(trial.width * math.sqrt(GAUSS_CUT / q))
    wts = wts * sigma(n - 2) * rho ** (n - 2)

    def outer(x1):
        return density(np.asarray(x1)[:, None], rho[None, :]) @ wts

    return float(integrate(outer, _axial_breaks(trial, q, extra), quad))


def _axial_gradient(trial: AxialTrial, quad) -> float:
    p = trial.exps.p

    def density(x1, rho):
        gx = trial.u(rho) * trial.dw(x1)
        gr = trial.du(rho) * trial.w(x1)
        return np.hypot(gx, gr) ** p

    return _two_d(trial, density, p, quad)


def _axial_moment(trial: AxialTrial, t, quad) -> float:
    e = trial.exps

    def density(x1, rho):
        dist = np.hypot(rho, x1 - t) ** e.p_prime
        return dist * (trial.u(rho) * trial.w(x1)) ** e.p_star

    return _two_d(trial, density, e.p_star, quad, extra=(t,))
