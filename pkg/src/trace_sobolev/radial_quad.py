"""Adaptive quadrature for radial integrands over the half-space, its boundary and R^n.

Every integral is reduced to a one-dimensional integral along the radius
``r = |x - t e1|``.  The geometric weight is the area of the part of the
sphere of radius ``r`` lying in ``{x1 > 0}``, which is an incomplete Beta
function and is evaluated in closed form.

The one-dimensional integrals use a vectorised Gauss-Kronrod (7, 15) pair
on a panel list that is refined by bisection and always kept in sorted
order, so the floating-point summation order never depends on how the
refinement went.  Infinite tails are cut at a radius where the integrand's
declared power-law envelope bounds the remainder analytically.
"""

import math
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np
from scipy.special import betainc

from .errors import DomainError, EnvelopeViolation, QuadratureFailure
from .params import omega, sigma

# Kronrod 15-point abscissae on [-1, 1] with the Kronrod and embedded Gauss 7-point weights.
_XK_HALF = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
])
_WK_HALF = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG_HALF = np.array([
    0.0,
    0.129484966168869693270611432679082,
    0.0,
    0.279705391489276667901467771423780,
    0.0,
    0.381830050505118944950369775488975,
    0.0,
    0.417959183673469387755102040816327,
])

XK = np.concatenate([-_XK_HALF[:-1], _XK_HALF[::-1]])
WK = np.concatenate([_WK_HALF[:-1], _WK_HALF[::-1]])
WG = np.concatenate([_WG_HALF[:-1], _WG_HALF[::-1]])


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and policy for the adaptive integrator.

    A result is accepted when its error estimate (panel estimates plus the
    analytic tail bound) is at most ``max(abs_tol, rel_tol * |value|)``.
    ``tail_exponent_margin`` is the minimum excess of the declared decay
    exponent over the integrability threshold.
    """

    abs_tol: float = 1e-9
    rel_tol: float = 1e-9
    max_subdivisions: int = 2000
    tail_exponent_margin: float = 1e-6
    endpoint_substitution: bool = True

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise DomainError("abs_tol and rel_tol must be positive")
        if self.max_subdivisions < 16:
            raise DomainError("max_subdivisions must be at least 16")
        if not self.tail_exponent_margin > 0:
            raise DomainError("tail_exponent_margin must be positive")

    def relative(self) -> "QuadratureSpec":
        """Same spec with a negligible absolute floor, so only ``rel_tol`` binds."""
        return replace(self, abs_tol=np.finfo(float).tiny)

    def tolerance(self, value) -> float:
        return max(self.abs_tol, self.rel_tol * abs(value))


@dataclass(frozen=True)
class RadialIntegrand:
    """Nonnegative radial function with a declared tail envelope.

    The contract is ``func(r) <= tail_const * r**(-tail_exponent)`` for all
    ``r >= tail_start``.  ``scale`` is a length hint for the initial panels.

    Two optional hooks exist for integrands that lose precision when the
    radius is formed explicitly near a singular point:

    ``func_offset(v)``
        equals ``func(abs(t) + v)`` for the offset ``t`` the integrand is used
        with; the half-space integrator calls it beyond the kink at ``|t|``.
    ``func_plane(rho)``
        equals ``func(sqrt(rho**2 + t**2))``; used by :func:`boundary_integral`,
        whose length hint is ``plane_scale``.
    """

    func: Callable
    tail_exponent: float
    tail_const: float = 1.0
    tail_start: float = 1.0
    scale: float = 1.0
    func_offset: Optional[Callable] = None
    func_plane: Optional[Callable] = None
    plane_scale: Optional[float] = None


class QuadResult(float):
    """A float carrying the certified error bound and the final panel count."""

    def __new__(cls, value, error, panels=0):
        obj = super().__new__(cls, value)
        obj.error = float(error)
        obj.panels = int(panels)
        return obj

    @property
    def value(self) -> float:
        return float(self)

    def __repr__(self):
        return f"QuadResult({float(self)!r}, error={self.error:.3g})"


# ----------------------------------------------------------------------------
# spherical caps


def _half_fraction(a, q, q_comp, t):
    """Share of a sphere or ball cut at signed height ``t`` lying on the positive side.

    ``q = 1 - t^2`` and ``q_comp = t^2`` (both relative to the radius); the
    regularized beta function is evaluated on whichever is smaller so that
    neither t -> 0 nor |t| -> 1 loses digits.
    """
    q = np.asarray(q, dtype=float)
    q_comp = np.clip(np.asarray(q_comp, dtype=float), 0.0, 1.0)
    near_center = q_comp < 0.5
    sign = 1.0 if t > 0 else -1.0
    centered = 0.5 + 0.5 * sign * betainc(0.5, a, np.where(near_center, q_comp, 0.0))
    edge = 0.5 * betainc(a, 0.5, np.where(near_center, 1.0, q))
    edge = edge if t <= 0 else 1.0 - edge
    out = np.where(near_center, centered, edge)
    return float(out) if out.ndim == 0 else out


def _cap_fraction(n, r, t, gap=None):
    """Fraction of the sphere |x - t e1| = r that lies in {x1 > 0}.

    ``gap`` may carry ``r - |t|`` computed without cancellation.
    """
    r = np.asarray(r, dtype=float)
    if gap is None:
        q = (r - t) * (r + t) / (r * r)
    else:
        q = (np.asarray(gap, dtype=float) / r) * ((r + abs(t)) / r)
    q = np.clip(q, 0.0, 1.0)
    frac = _half_fraction(0.5 * (n - 1), q, (t / r) ** 2, t)
    inside = r > abs(t) if gap is None else np.asarray(gap) > 0
    full = 1.0 if t > 0 else 0.0
    return np.where(inside, frac, full)


def cap_area(n, r, t):
    """Area of the part of the sphere of radius ``r`` about ``t e1`` inside H."""
    r_arr = np.asarray(r, dtype=float)
    if np.any(~(r_arr > 0)):
        raise DomainError("cap_area needs r > 0")
    out = sigma(n - 1) * r_arr ** (n - 1) * _cap_fraction(n, r_arr, float(t))
    return float(out) if np.ndim(out) == 0 else out


def cap_volume(n, t) -> float:
    """Volume of B_1(t e1) intersected with H, for -1 < t < 1."""
    t = float(t)
    if not -1.0 < t < 1.0:
        raise DomainError(f"cap_volume needs -1 < t < 1, got {t}")
    q = (1.0 - t) * (1.0 + t)
    frac = _half_fraction(0.5 * (n + 1), q, t * t, t)
    return omega(n) * float(frac)


# ----------------------------------------------------------------------------
# adaptive Gauss-Kronrod core


def _gk15(func, lo, hi):
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    x = mid[:, None] + half[:, None] * XK[None, :]
    fx = np.asarray(func(x.ravel()), dtype=float).reshape(x.shape)
    if not np.all(np.isfinite(fx)):
        bad = x[~np.isfinite(fx)][0]
        raise QuadratureFailure(f"integrand is not finite at abscissa {bad!r}")
    kron = half * (fx @ WK)
    gauss = half * (fx @ WG)
    return kron, np.abs(kron - gauss)


def _evaluate(funcs, lo, hi, grp):
    val = np.empty(lo.size)
    err = np.empty(lo.size)
    for g, func in enumerate(funcs):
        m = grp == g
        if np.any(m):
            val[m], err[m] = _gk15(func, lo[m], hi[m])
    return val, err


def adaptive_panels(funcs, lo, hi, grp, quad, budget=1.0, extra_error=0.0):
    """Refine panels until the summed error meets ``budget`` times the tolerance.

    ``funcs[g]`` integrates panels whose group index is ``g``.  Returns
    ``(value, error, panel_count)``.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    grp = np.asarray(grp, dtype=int)
    order = np.lexsort((lo, grp))
    lo, hi, grp = lo[order], hi[order], grp[order]
    val, err = _evaluate(funcs, lo, hi, grp)
    while True:
        total = float(np.sum(val))
        err_total = float(np.sum(err)) + extra_error
        target = budget * quad.tolerance(total)
        if err_total <= target:
            return total, err_total, lo.size
        npan = lo.size
        pick = err > target / npan
        pick[int(np.argmax(err))] = True
        width = hi - lo
        splittable = width > 64 * np.finfo(float).eps * np.maximum(np.abs(lo), np.abs(hi))
        pick &= splittable
        if not np.any(pick):
            raise QuadratureFailure(
                f"panels cannot be refined further (error {err_total:.3g} > target {target:.3g})")
        if npan + int(pick.sum()) > quad.max_subdivisions:
            raise QuadratureFailure(
                f"subdivision budget {quad.max_subdivisions} exhausted "
                f"(error {err_total:.3g} > target {target:.3g})")
        mid = 0.5 * (lo[pick] + hi[pick])
        new_lo = np.concatenate([lo[pick], mid])
        new_hi = np.concatenate([mid, hi[pick]])
        new_grp = np.concatenate([grp[pick], grp[pick]])
        new_val, new_err = _evaluate(funcs, new_lo, new_hi, new_grp)
        keep = ~pick
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        grp = np.concatenate([grp[keep], new_grp])
        val = np.concatenate([val[keep], new_val])
        err = np.concatenate([err[keep], new_err])
        order = np.lexsort((lo, grp))
        lo, hi, grp, val, err = lo[order], hi[order], grp[order], val[order], err[order]


def integrate(func, breakpoints, quad, budget=1.0) -> QuadResult:
    """Adaptive integral of a vectorised ``func`` over consecutive breakpoints."""
    b = np.asarray(breakpoints, dtype=float)
    if b.ndim != 1 or b.size < 2 or np.any(np.diff(b) <= 0):
        raise DomainError("breakpoints must be a strictly increasing sequence")
    value, error, npan = adaptive_panels([func], b[:-1], b[1:], np.zeros(b.size - 1, int), quad, budget)
    return QuadResult(value, error, npan)


def _graded(start, first, stop):
    """Breakpoints start, start+first, start+2*first, start+4*first, ... ending at stop."""
    pts = [start]
    step = first
    while start + step < stop:
        pts.append(start + step)
        step *= 2.0
    pts.append(stop)
    return pts


def _check_envelope(func, env_a, env_c, r0, label):
    r = r0 * 2.0 ** (0.5 * np.arange(41))
    vals = np.asarray(func(r), dtype=float)
    bound = env_c * r ** (-env_a)
    slack = 1e-9 * bound + 1e-300
    if np.any(~np.isfinite(vals)) or np.any(vals > bound + slack):
        i = int(np.argmax(~np.isfinite(vals) | (vals > bound + slack)))
        raise EnvelopeViolation(
            f"{label}: f({r[i]:.6g}) = {vals[i]:.6g} exceeds envelope {bound[i]:.6g}")


def _tail_radius(tail_bound, r_min, target):
    """Smallest R >= r_min (on a doubling ladder) with tail_bound(R) <= target."""
    radius = r_min
    for _ in range(2100):
        if tail_bound(radius) <= target:
            return radius
        radius *= 2.0
    raise QuadratureFailure("tail truncation radius overflow; envelope decays too slowly")


def _semi_infinite(h_prefix, h_kink, kink, first, r_env, tail_bound, quad, substitute):
    """Integrate over [0, kink] (optional prefix) and [kink, infinity).

    ``h_kink`` takes the offset ``v = r - kink``; when ``substitute`` is set the
    first panel beyond the kink is integrated in ``u = sqrt(v)``.
    ``tail_bound(R)`` bounds the integral over ``r > R``.
    """
    funcs = []
    if h_prefix is not None:
        funcs.append(h_prefix)
    funcs.append(lambda u: 2.0 * u * h_kink(u * u))
    funcs.append(h_kink)
    g_pre, g_sub, g_lin = (0, 1, 2) if h_prefix is not None else (-1, 0, 1)

    def build(radius):
        lo, hi, grp = [], [], []
        if h_prefix is not None:
            pts = _graded(0.0, min(first, kink), kink)
            lo += pts[:-1]
            hi += pts[1:]
            grp += [g_pre] * (len(pts) - 1)
        v_end = max(radius - kink, first)
        pts = _graded(0.0, first, v_end)
        if substitute:
            lo.append(0.0)
            hi.append(math.sqrt(pts[1]))
            grp.append(g_sub)
        else:
            lo.append(0.0)
            hi.append(pts[1])
            grp.append(g_lin)
        lo += pts[1:-1]
        hi += pts[2:]
        grp += [g_lin] * (len(pts) - 2)
        return np.array(lo), np.array(hi), np.array(grp)

    radius = max(r_env, kink + first)
    # rough estimate from the unrefined ladder fixes the truncation radius
    lo, hi, grp = build(radius)
    rough, _ = _evaluate(funcs, lo, hi, grp)
    estimate = abs(float(np.sum(rough)))
    for _ in range(8):
        radius = _tail_radius(tail_bound, radius, 0.25 * quad.tolerance(0.5 * estimate))
        lo, hi, grp = build(radius)
        tail = tail_bound(radius)
        value, error, npan = adaptive_panels(funcs, lo, hi, grp, quad, budget=0.5, extra_error=tail)
        if error <= quad.tolerance(value):
            return QuadResult(value, error, npan)
        estimate = abs(value)
    raise QuadratureFailure("tail truncation did not settle")


def _tail_fn(f, dim, surface, quad, extra_power=0.0):
    a = f.tail_exponent - extra_power
    if f.tail_const == 0.0:
        return lambda radius: 0.0 if radius >= f.tail_start else math.inf
    if a - dim < quad.tail_exponent_margin:
        raise DomainError(
            f"declared tail exponent {f.tail_exponent} does not make the integral converge (need > {dim})")
    coef = f.tail_const * surface / (a - dim)

    def bound(radius):
        if radius < f.tail_start:
            return math.inf
        return coef * radius ** (dim - a)

    return bound


def halfspace_integral(n, t, f: RadialIntegrand, quad: QuadratureSpec) -> QuadResult:
    """Integral of ``f(|x - t e1|)`` over H = {x1 > 0}."""
    t = float(t)
    _check_envelope(f.func, f.tail_exponent, f.tail_const, f.tail_start, "halfspace integrand")
    kink = abs(t)
    s_full = sigma(n - 1)
    offset = f.func_offset if f.func_offset is not None else (lambda v: f.func(kink + v))

    def h_kink(v):
        r = kink + v
        return offset(v) * s_full * r ** (n - 1) * _cap_fraction(n, r, t, gap=v)

    h_prefix = None
    if t > 0:
        def h_prefix(r):
            return f.func(r) * s_full * r ** (n - 1)

    # a kink far inside the first panel needs no grading of its own
    first = min(f.scale, kink) if kink > 1e-6 * f.scale else f.scale
    tail = _tail_fn(f, n, s_full, quad)
    return _semi_infinite(h_prefix, h_kink, kink, first, max(f.tail_start, kink), tail, quad,
                          quad.endpoint_substitution and t != 0)


def boundary_integral(n, t, f: RadialIntegrand, quad: QuadratureSpec) -> QuadResult:
    """Integral of ``f(|x - t e1|)`` over the hyperplane {x1 = 0}."""
    t = float(t)
    _check_envelope(f.func, f.tail_exponent, f.tail_const, f.tail_start, "boundary integrand")
    s_plane = sigma(n - 2)
    plane = f.func_plane if f.func_plane is not None else (lambda rho: f.func(np.hypot(rho, t)))

    def h(rho):
        return s_plane * plane(rho) * rho ** (n - 2)

    first = f.plane_scale if f.plane_scale is not None else max(f.scale, abs(t))
    tail = _tail_fn(f, n - 1, s_plane, quad)
    return _semi_infinite(None, h, 0.0, first, f.tail_start, tail, quad, False)


def fullspace_integral(n, f: RadialIntegrand, quad: QuadratureSpec) -> QuadResult:
    """Integral of ``f(|x|)`` over R^n."""
    _check_envelope(f.func, f.tail_exponent, f.tail_const, f.tail_start, "full-space integrand")
    s_full = sigma(n - 1)

    def h(r):
        return s_full * f.func(r) * r ** (n - 1)

    tail = _tail_fn(f, n, s_full, quad)
    return _semi_infinite(None, h, 0.0, f.scale, f.tail_start, tail, quad, False)


def halfspace_moment(n, c, f: RadialIntegrand, t, power, quad: QuadratureSpec, nodes=64) -> QuadResult:
    """Integral over H of ``f(|x - c e1|) * |x - t e1|**power``.

    When ``c != t`` the integrand is not radial about a single point; the
    angular integral over each sphere about ``c e1`` uses a fixed
    Gauss-Legendre rule in the polar angle, and the radial integral is
    adaptive as usual.
    """
    c = float(c)
    t = float(t)
    d = c - t
    if d == 0.0:
        g = RadialIntegrand(
            func=lambda r: f.func(r) * r ** power,
            tail_exponent=f.tail_exponent - power,
            tail_const=f.tail_const,
            tail_start=f.tail_start,
            scale=f.scale,
            func_offset=None if f.func_offset is None else (lambda v: f.func_offset(v) * (abs(c) + v) ** power),
        )
        return halfspace_integral(n, c, g, quad)

    _check_envelope(f.func, f.tail_exponent, f.tail_const, f.tail_start, "moment integrand")
    xg, wg = np.polynomial.legendre.leggauss(nodes)
    s_side = sigma(n - 2)
    kink = abs(c)
    offset = f.func_offset if f.func_offset is not None else (lambda v: f.func(kink + v))

    def angular(r):
        r = np.asarray(r, dtype=float)
        cos_lim = np.clip(-c / r, -1.0, 1.0)
        theta_max = np.arccos(cos_lim)
        theta = 0.5 * theta_max[:, None] * (xg[None, :] + 1.0)
        base = r[:, None] ** 2 + 2.0 * d * r[:, None] * np.cos(theta) + d * d
        dist_pow = np.maximum(base, 0.0) ** (0.5 * power)
        vals = dist_pow * np.sin(theta) ** (n - 2)
        return s_side * r ** (n - 1) * 0.5 * theta_max * (vals @ wg)

    def h_kink(v):
        return offset(v) * angular(kink + v)

    h_prefix = None
    if c > 0:
        def h_prefix(r):
            return f.func(r) * angular(r)

    # |x - t e1|^power <= (2 r)^power once r >= |d|
    shifted = RadialIntegrand(f.func, f.tail_exponent, f.tail_const * 2.0 ** power,
                              max(f.tail_start, abs(d)))
    tail = _tail_fn(shifted, n, sigma(n - 1), quad, extra_power=power)
    # a kink far inside the first panel needs no grading of its own
    first = min(f.scale, kink) if kink > 1e-6 * f.scale else f.scale
    return _semi_infinite(h_prefix, h_kink, kink, first, max(shifted.tail_start, kink), tail, quad,
                          quad.endpoint_substitution)
