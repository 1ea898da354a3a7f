"""Radial optimal transport and the determinant/trace chain it feeds.

For two radial densities about the same center the Brenier map is
``x -> psi(|x|) x/|x|`` with ``psi`` the monotone rearrangement of the
cumulative masses.  The Jacobian has eigenvalue ``psi'`` once and
``psi / r`` with multiplicity ``n - 1``, so the Monge-Ampere equation and
the arithmetic-geometric mean step reduce to statements on a radial grid.
"""

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np
from scipy.integrate import simpson

from ..errors import ChainViolation, DomainError, MassMismatch, MonotonicityFailure
from ..params import sigma
from ..radial_quad import WG, WK, XK, QuadratureSpec, integrate
from .mother import CheckResult

MASS_TOL = 1e-8
MA_TOL = 1e-8
CHAIN_EQ_TOL = 1e-6
DILATION_TOL = 1e-6
AMGM_EQ_TOL = 1e-7
BISECTION_STEPS = 60
_FD6 = np.array([-1.0, 9.0, -45.0, 0.0, 45.0, -9.0, 1.0]) / 60.0


def _fd_weights(at, points=7):
    """Weights of the sixth-order first-derivative rule on nodes 0..6 evaluated at node ``at``."""
    k = np.arange(points, dtype=float) - at
    vander = np.vander(k, points, increasing=True).T
    rhs = np.zeros(points)
    rhs[1] = 1.0
    return np.linalg.solve(vander, rhs)


_FD_EDGE = [_fd_weights(j) for j in range(3)]


def _derivative(y, h):
    """Sixth-order derivative on a uniform grid: centered inside, one-sided at the ends."""
    d = np.empty_like(y)
    d[3:-3] = np.lib.stride_tricks.sliding_window_view(y, 7) @ _FD6 / h
    for j in range(3):
        d[j] = y[:7] @ _FD_EDGE[j] / h
        d[-1 - j] = -(y[::-1][:7] @ _FD_EDGE[j]) / h
    return d


@dataclass(frozen=True)
class RadialDensity:
    """Density ``func(|x - center e1|)`` on R^n, supported in the ball of ``radius``."""

    func: Callable
    n: int
    radius: float = math.inf
    scale: float = 1.0
    center: float = 0.0
    label: str = "density"

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        inside = r < self.radius
        out[inside] = self.func(r[inside])
        return out

    def mass(self, quad=QuadratureSpec()) -> float:
        return float(integrate(self._xi_integrand(), [0.0, 0.5, 1.0], quad))

    def normalized(self, quad=QuadratureSpec()) -> "RadialDensity":
        m = self.mass(quad)
        f = self.func
        return replace(self, func=lambda r: f(r) / m)

    def dilated(self, lam) -> "RadialDensity":
        """Mass-preserving dilation ``lam^-n F(s / lam)`` about the same center."""
        f, n = self.func, self.n
        return replace(self, func=lambda s: lam ** (-n) * f(s / lam), radius=self.radius * lam,
                       scale=self.scale * lam, label=f"{self.label}*{lam:g}")

    # mass coordinate xi in [0, 1]

    def r_of(self, xi):
        xi = np.asarray(xi, dtype=float)
        if math.isfinite(self.radius):
            return self.radius * xi
        with np.errstate(divide="ignore"):
            return self.scale * xi / (1.0 - xi)

    def dr_dxi(self, xi):
        xi = np.asarray(xi, dtype=float)
        if math.isfinite(self.radius):
            return np.full_like(xi, self.radius)
        with np.errstate(divide="ignore"):
            return self.scale / (1.0 - xi) ** 2

    def _xi_integrand(self):
        n = self.n
        s = sigma(n - 1)

        def h(xi):
            r = self.r_of(xi)
            return s * self(r) * r ** (n - 1) * self.dr_dxi(xi)
        return h


def bump_density(n, radius=1.0, k=3, center=0.0, modulation=0.0) -> RadialDensity:
    """Unit-mass ``(1 - (r/R)^2)^k (1 + modulation (r/R)^2)``."""
    if not radius > 0 or k <= 0 or modulation <= -1:
        raise DomainError("bump needs radius > 0, k > 0 and modulation > -1")

    def f(r):
        x = (r / radius) ** 2
        return np.maximum(1.0 - x, 0.0) ** k * (1.0 + modulation * x)
    label = f"bump(R={radius:g},k={k:g},a={modulation:g})"
    return RadialDensity(f, n, radius, radius, center, label).normalized()


def bubble_density(n, p, scale=1.0, center=0.0) -> RadialDensity:
    """Unit-mass ``(1 + (r/s)^{p'})^{-n}``, the p*-th power of a Sobolev profile."""
    pp = p / (p - 1.0)

    def f(r):
        return (1.0 + (r / scale) ** pp) ** (-n)
    return RadialDensity(f, n, math.inf, scale, center, f"bubble(s={scale:g})").normalized()


class _Cumulative:
    """Cumulative mass of a density on a uniform grid in its mass coordinate."""

    def __init__(self, dens: RadialDensity, cells: int):
        self.h = dens._xi_integrand()
        self.cells = cells
        self.edges = np.linspace(0.0, 1.0, cells + 1)
        vals, errs = self._gk(self.edges[:-1], self.edges[1:])
        self.cum = np.concatenate([[0.0], np.cumsum(vals)])
        self.rest = np.concatenate([np.cumsum(vals[::-1])[::-1], [0.0]])
        self.error = float(np.sum(errs))

    def _gk(self, lo, hi):
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        mid = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo)
        x = mid[:, None] + half[:, None] * XK[None, :]
        fx = self.h(x.ravel()).reshape(x.shape)
        fx = np.where(np.isfinite(fx), fx, 0.0)
        k = half * (fx @ WK)
        g = half * (fx @ WG)
        return k, np.abs(k - g)

    def __call__(self, xi):
        xi = np.asarray(xi, dtype=float)
        j = np.clip(np.floor(xi * self.cells).astype(int), 0, self.cells - 1)
        part, _ = self._gk(self.edges[j], xi)
        return self.cum[j] + part

    def remaining(self, xi):
        """Mass beyond ``xi``, summed from the far end so it keeps relative precision."""
        xi = np.asarray(xi, dtype=float)
        j = np.clip(np.floor(xi * self.cells).astype(int), 0, self.cells - 1)
        part, _ = self._gk(xi, self.edges[j + 1])
        return self.rest[j + 1] + part

    @property
    def total(self):
        return float(self.cum[-1])


@dataclass
class TransportPlan:
    n: int
    F: RadialDensity
    G: RadialDensity
    xi: np.ndarray
    r: np.ndarray
    psi: np.ndarray
    dpsi: np.ndarray          # psi'(r)
    mass_F: float
    mass_G: float
    residual: float           # max Monge-Ampere residual over interior nodes

    @property
    def interior(self):
        return np.isfinite(self.dpsi) & (self.r > 0)  # the center is a removable point


def radial_brenier(F: RadialDensity, G: RadialDensity, grid_size=2000) -> TransportPlan:
    """Monotone radial map pushing ``F dx`` to ``G dx``."""
    if F.n != G.n:
        raise DomainError("densities live in different dimensions")
    if F.center != G.center:
        raise DomainError("radial transport needs densities about the same center")
    if math.isfinite(F.radius) and not math.isfinite(G.radius):
        raise DomainError("a compactly supported source cannot be mapped onto an unbounded target")
    if grid_size < 16:
        raise DomainError("grid_size must be at least 16")
    n = F.n
    qf = _Cumulative(F, grid_size)
    qg = _Cumulative(G, grid_size)
    mf, mg = qf.total, qg.total
    if abs(mf - 1.0) > MASS_TOL or abs(mg - 1.0) > MASS_TOL or abs(mf - mg) > MASS_TOL:
        raise MassMismatch(f"masses {mf!r} and {mg!r} are not both 1 within {MASS_TOL:g}")

    xi = qf.edges
    if not math.isfinite(F.radius):
        xi = xi[:-1]
    # match the mass below r on the inner half and the mass beyond r on the outer half
    below_f = qf.cum[: xi.size] * (mg / mf)
    above_f = qf.rest[: xi.size] * (mg / mf)
    outer = below_f > 0.5 * mg

    lo = np.zeros_like(xi)
    hi = np.ones_like(xi)
    for _ in range(BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        below = np.where(outer, qg.remaining(mid) > above_f, qg(mid) < below_f)
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    eta = 0.5 * (lo + hi)
    eta[0] = 0.0
    if math.isfinite(F.radius) and math.isfinite(G.radius):
        eta[-1] = 1.0
    psi = G.r_of(eta)
    r = F.r_of(xi)
    if np.any(np.diff(psi) <= 0):
        raise MonotonicityFailure("computed radial map is not strictly increasing")

    dpsi = _derivative(psi, xi[1] - xi[0]) / F.dr_dxi(xi)
    plan = TransportPlan(n, F, G, xi, r, psi, dpsi, mf, mg, math.nan)
    plan.residual = ma_residual(plan)
    return plan


def ma_residual(plan: TransportPlan) -> float:
    k = plan.interior
    r, psi, dpsi = plan.r[k], plan.psi[k], plan.dpsi[k]
    res = plan.F(r) - plan.G(psi) * dpsi * (psi / r) ** (plan.n - 1)
    return float(np.max(np.abs(res))) if res.size else 0.0


def check_transport_chain(plan: TransportPlan, quad=QuadratureSpec()) -> CheckResult:
    """The determinant identity and the arithmetic-geometric mean step on a plan.

    ``A = int G^{1-1/n}`` must equal ``B = int det(DT)^{1/n} F^{1-1/n}``, and
    ``B <= C = (1/n) int F^{1-1/n} div T``, with ``C = B`` exactly for dilations.
    """
    n = plan.n
    F, G = plan.F, plan.G
    for d in (F, G):
        if not (math.isfinite(d.radius) and d.center - d.radius > 0):
            raise DomainError("chain check needs both densities supported strictly inside H")
    s = sigma(n - 1)
    e = 1.0 - 1.0 / n
    A = float(integrate(lambda x: s * G(x) ** e * x ** (n - 1), [0.0, 0.5 * G.radius, G.radius], quad))

    # keep the center node: psi/r tends to psi'(0) there and the weight vanishes
    k = np.isfinite(plan.dpsi)
    r, psi, dpsi = plan.r[k], plan.psi[k], plan.dpsi[k]
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.where(r > 0, psi / np.where(r > 0, r, 1.0), dpsi)
    det = dpsi * ratio ** (n - 1)
    weight = s * F(r) ** e * r ** (n - 1)
    B = float(simpson(det ** (1.0 / n) * weight, x=r))
    C = float(simpson((dpsi + (n - 1) * ratio) / n * weight, x=r))
    identity_gap = abs(A - B) / A
    amgm_gap = (C - B) / C
    dilation = float(np.max(np.abs(dpsi - ratio)) / np.max(ratio))
    is_dilation = dilation < DILATION_TOL
    is_equal = amgm_gap < AMGM_EQ_TOL
    ok = identity_gap < CHAIN_EQ_TOL and amgm_gap > -AMGM_EQ_TOL and is_dilation == is_equal
    res = CheckResult("transport-chain", {"n": n, "F": F.label, "G": G.label}, B, C, C - B, ok,
                      AMGM_EQ_TOL,
                      {"A": A, "identity_gap": identity_gap, "amgm_gap": amgm_gap,
                       "dilation_defect": dilation, "is_dilation": is_dilation,
                       "ma_residual": plan.residual})
    if not ok:
        raise ChainViolation(
            f"chain fails: |A-B|/A={identity_gap:.3g}, (C-B)/C={amgm_gap:.3g}, dilation defect {dilation:.3g}")
    return res
