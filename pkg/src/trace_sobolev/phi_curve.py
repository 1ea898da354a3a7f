"""Evaluation of the trace-Sobolev curve by inverting the parametric families.

Below T_E the curve is traced by the Sobolev family, above it by the
beyond-Escobar family, and T_E itself is attained by the Escobar family.
The beyond-Escobar branch is parametrized internally by ``log(eps)`` with
``t = -1 - eps``, which keeps resolution as ``t -> -1`` where T grows without
bound.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .curves import Curves, p1_curve
from .errors import CrossCheckFailure, DomainError, ModeError, PropertyViolation, RootBracketFailure
from .profiles import FamilyTag

BRACKET = 2.0
BRACKET_EXPANSIONS = 60
ROOT_REL_TOL = 1e-9
MATCH_REL_TOL = 1e-7
FD_STEP = 1e-4
SIGMA_CROSS_TOL = 1e-3
# boundary radii (multiples of the member's length scale) for the pointwise multiplier
SIGMA_SAMPLE_RADII = (0.1, 0.25, 0.7, 1.5, 3.0)


@dataclass(frozen=True)
class CurvePoint:
    T: float
    phi: float
    family: FamilyTag
    t: float
    y: float
    dphi: Optional[float] = None
    eps: Optional[float] = None     # -1 - t, kept at full precision on the beyond-Escobar branch


class Multipliers(NamedTuple):
    lam: float
    sigma: float
    sigma_direct: float

    @property
    def lambda_(self):
        return self.lam


class PhiCurve:
    """The curve T -> Phi(T) for one exponent pair."""

    def __init__(self, curves: Curves):
        self.curves = curves
        self.exps = curves.exps

    @classmethod
    def for_pair(cls, n, p, quad=None):
        return cls(Curves.for_pair(n, p) if quad is None else Curves.for_pair(n, p, quad))

    @property
    def constants(self):
        return self.curves.constants()

    # --------------------------------------------------------------- parameters

    def _trace(self, branch, x):
        """T along a branch: x is t (Sobolev), log(eps) (beyond-Escobar) or atanh(t) (p = 1)."""
        if branch == "p1":
            return p1_curve(self.exps.n, math.tanh(x))[0]
        if branch is FamilyTag.SOBOLEV:
            return self.curves.trace_only(FamilyTag.SOBOLEV, x)
        return self.curves.trace_only(FamilyTag.BEYOND_ESCOBAR, None, eps=math.exp(x))

    def _pair(self, branch, x):
        """(T, G) along a branch at parameter x."""
        if branch == "p1":
            return p1_curve(self.exps.n, math.tanh(x))
        if branch is FamilyTag.SOBOLEV:
            m = self.curves.member(FamilyTag.SOBOLEV, x)
        else:
            m = self.curves.member(FamilyTag.BEYOND_ESCOBAR, None, eps=math.exp(x))
        return m.T, m.G

    def _solve(self, branch, target):
        """Bisection for trace(x) = target; every branch has trace decreasing in x."""
        root_tol = ROOT_REL_TOL * max(1.0, target)
        lo, hi = -BRACKET, BRACKET
        for _ in range(BRACKET_EXPANSIONS):
            if self._trace(branch, lo) >= target:
                break
            lo *= 2.0
        else:
            raise RootBracketFailure(f"no lower bracket for T={target}")
        for _ in range(BRACKET_EXPANSIONS):
            if self._trace(branch, hi) <= target:
                break
            hi *= 2.0
        else:
            raise RootBracketFailure(f"no upper bracket for T={target}")
        best, best_err = lo, math.inf
        for _ in range(400):
            mid = 0.5 * (lo + hi)
            if mid in (lo, hi):
                break
            val = self._trace(branch, mid)
            err = abs(val - target)
            if err < best_err:
                best, best_err = mid, err
            if err <= root_tol:
                return mid
            if val > target:
                lo = mid
            else:
                hi = mid
        if best_err <= 100.0 * root_tol:
            return best
        raise RootBracketFailure(f"bisection stalled at |dT|={best_err:.3g} for T={target}")

    def locate(self, T):
        """(branch, parameter) of the minimizer with trace norm T."""
        T = float(T)
        if not T > 0:
            raise DomainError("Phi(0) has no minimizer; its value is the Sobolev constant S")
        if self.exps.is_p1:
            return "p1", self._solve("p1", T)
        const = self.constants
        if abs(T - const.T_E) <= MATCH_REL_TOL * const.T_E:
            return FamilyTag.ESCOBAR, -1.0
        if T < const.T_E:
            return FamilyTag.SOBOLEV, self._solve(FamilyTag.SOBOLEV, T)
        return FamilyTag.BEYOND_ESCOBAR, self._solve(FamilyTag.BEYOND_ESCOBAR, T)

    # ---------------------------------------------------------------------- phi

    def phi(self, T, with_derivative=False) -> CurvePoint:
        branch, x = self.locate(T)
        if branch == "p1":
            t = math.tanh(x)
            _, g = p1_curve(self.exps.n, t)
            point = CurvePoint(float(T), g, FamilyTag.BALL_P1, t, 1.0)
        elif branch is FamilyTag.ESCOBAR:
            c = self.constants
            point = CurvePoint(float(T), c.G_E, FamilyTag.ESCOBAR, -1.0, c.Y_E)
        elif branch is FamilyTag.SOBOLEV:
            m = self.curves.member(branch, x)
            point = CurvePoint(float(T), m.G, branch, x, m.Y)
        else:
            eps = math.exp(x)
            m = self.curves.member(branch, None, eps=eps)
            point = CurvePoint(float(T), m.G, branch, m.t, m.Y, eps=eps)
        if with_derivative:
            point = CurvePoint(point.T, point.phi, point.family, point.t, point.y,
                               self._slope(branch, x), point.eps)
        return point

    def __call__(self, T):
        return self.phi(T).phi

    # ---------------------------------------------------------------- derivative

    def _slope(self, branch, x):
        if branch is FamilyTag.ESCOBAR:
            return self.constants.E
        h = FD_STEP * (max(1.0, abs(x)) if branch is FamilyTag.SOBOLEV else 1.0)

        def central(step):
            tp, gp = self._pair(branch, x + step)
            tm, gm = self._pair(branch, x - step)
            return (tp - tm) / (2 * step), (gp - gm) / (2 * step)

        dt1, dg1 = central(h)
        dt2, dg2 = central(0.5 * h)
        dt = (4.0 * dt2 - dt1) / 3.0
        dg = (4.0 * dg2 - dg1) / 3.0
        return dg / dt

    def phi_prime(self, T) -> float:
        """dPhi/dT by parameter-space central differences with one Richardson step."""
        branch, x = self.locate(T)
        return self._slope(branch, x)

    def _chart(self, c):
        """(T, G) of the member with additive constant c, rescaled to center -1.

        c > 0 is the Sobolev member at t = -c^{-1/p'}, c = 0 the Escobar member
        and c < 0 the beyond-Escobar member at t = -|c|^{-1/p'}; T and G are
        invariant under that rescaling, and the chart is smooth through c = 0.
        """
        pp = self.exps.p_prime
        if c > 0:
            m = self.curves.member(FamilyTag.SOBOLEV, -c ** (-1.0 / pp))
        elif c == 0:
            m = self.curves.member(FamilyTag.ESCOBAR, -1.0)
        else:
            m = self.curves.member(FamilyTag.BEYOND_ESCOBAR, None, eps=math.expm1(-math.log(-c) / pp))
        return m.T, m.G

    def one_sided_slopes_at_te(self):
        """(left, right) limits of Phi' at T_E from one-sided differences in the chart constant."""
        self._require_p_gt_1()
        h = FD_STEP
        t0, g0 = self._chart(0.0)

        def one_sided(sign, step):
            t1, g1 = self._chart(sign * step)
            t2, g2 = self._chart(2 * sign * step)
            dt = (-3 * t0 + 4 * t1 - t2) / (2 * sign * step)
            dg = (-3 * g0 + 4 * g1 - g2) / (2 * sign * step)
            return dt, dg

        out = []
        for sign in (1.0, -1.0):    # c > 0 approaches T_E from below
            dt1, dg1 = one_sided(sign, h)
            dt2, dg2 = one_sided(sign, 0.5 * h)
            out.append(((4 * dg2 - dg1) / 3) / ((4 * dt2 - dt1) / 3))
        return tuple(out)

    # -------------------------------------------------------------- multipliers

    def _require_p_gt_1(self):
        if self.exps.is_p1:
            raise ModeError("needs p > 1")

    def sigma_direct(self, point: CurvePoint) -> float:
        """Boundary multiplier -|grad u|^{p-2} d_1 u / u^{p#-1}, averaged over boundary samples."""
        e = self.exps
        family = point.family
        m = (self.curves.member(family, None, eps=point.eps) if point.eps is not None
             else self.curves.member(family, point.t))
        t = m.t
        pp = e.p_prime
        alpha = (e.n - e.p) / e.p
        z = m.Z ** (1.0 / e.p_star)
        scale = max(1.0, abs(t))
        rho = scale * np.asarray(SIGMA_SAMPLE_RADII)
        r = np.hypot(rho, t)
        if family is FamilyTag.SOBOLEV:
            base = 1.0 + r ** pp
        elif family is FamilyTag.ESCOBAR:
            base = r ** pp
        else:
            eps = -1.0 - t if point.eps is None else point.eps
            base = np.expm1(0.5 * pp * np.log1p(rho * rho + eps * (2.0 + eps)))
        u = base ** (-alpha) / z
        du_dr = -alpha * pp * r ** (pp - 1.0) * base ** (-alpha - 1.0) / z
        d1u = du_dr * (0.0 - t) / r
        vals = -np.abs(du_dr) ** (e.p - 2.0) * d1u / u ** (e.p_sharp - 1.0)
        return float(np.mean(vals))

    def lambda_direct(self, point: CurvePoint) -> float:
        """Interior multiplier -Delta_p u / u^{p*-1}, averaged over interior samples.

        Uses the radial form Delta_p u = r^{1-n} (r^{n-1} |u'|^{p-2} u')' with the
        derivative of the flux evaluated from the closed-form profile.
        """
        e = self.exps
        family = point.family
        m = (self.curves.member(family, None, eps=point.eps) if point.eps is not None
             else self.curves.member(family, point.t))
        pp = e.p_prime
        alpha = (e.n - e.p) / e.p
        z = m.Z ** (1.0 / e.p_star)
        c = {FamilyTag.SOBOLEV: 1.0, FamilyTag.ESCOBAR: 0.0, FamilyTag.BEYOND_ESCOBAR: -1.0}[family]
        r = (1.5 if c < 0 else 0.5) * np.array([1.0, 1.3, 2.0, 3.5])
        base = c + r ** pp
        # flux(r) = r^{n-1} |u'|^{p-2} u' = -(kappa/z)^{p-1} r^n base^{-n/p'}
        k1 = (e.kappa / z) ** (e.p - 1.0)
        dflux = -k1 * (e.n * r ** (e.n - 1) * base ** (-e.n / pp)
                       - (e.n / pp) * r ** e.n * base ** (-e.n / pp - 1.0) * pp * r ** (pp - 1.0))
        lap_p = dflux / r ** (e.n - 1)
        u = base ** (-alpha) / z
        return float(np.mean(-lap_p / u ** (e.p_star - 1.0)))

    def multipliers(self, T) -> Multipliers:
        """Interior and boundary Lagrange multipliers of the minimizer with trace norm T.

        The boundary multiplier is normalized as in -|grad u|^{p-2} d_1 u = sigma u^{p#-1};
        with that normalization Phi' = sigma T^{p#-1} / Phi^{p-1}.
        """
        self._require_p_gt_1()
        e = self.exps
        point = self.phi(T, with_derivative=True)
        phi = point.phi
        sig = point.dphi * phi ** (e.p - 1.0) * T ** (1.0 - e.p_sharp)
        lam = phi ** e.p - sig * T ** e.p_sharp
        direct = self.sigma_direct(point)
        floor = 1e-3 * phi ** e.p / T ** e.p_sharp
        if abs(sig - direct) > SIGMA_CROSS_TOL * max(abs(direct), floor):
            raise CrossCheckFailure(
                f"boundary multiplier from the curve slope ({sig:.6g}) disagrees with the "
                f"pointwise value ({direct:.6g}) at T={T}")
        lam_pt = self.lambda_direct(point)
        if abs(lam - lam_pt) > SIGMA_CROSS_TOL * max(abs(lam_pt), 1e-3 * phi ** e.p):
            raise CrossCheckFailure(
                f"interior multiplier {lam:.6g} disagrees with the pointwise value {lam_pt:.6g} at T={T}")
        return Multipliers(lam, sig, direct)

    # ----------------------------------------------------------------- envelope

    def envelope(self, T) -> float:
        """Largest of the three elementary lower bounds for Phi(T)."""
        T = float(T)
        if T < 0:
            raise DomainError("T must be nonnegative")
        c = self.constants
        e = self.exps
        return max(c.E * T, 2.0 ** (-1.0 / e.n) * c.S, T ** e.p_sharp / e.p_sharp)

    def asymptotic_gap(self, T) -> float:
        """Phi(T) - T^{p#}/p# for T > T_E, computed without cancellation."""
        branch, x = self.locate(T)
        if branch is not FamilyTag.BEYOND_ESCOBAR:
            return self.phi(T).phi - T ** self.exps.p_sharp / self.exps.p_sharp
        return self.curves.be_excess(math.exp(x))[1]

    # ------------------------------------------------------------------- shape

    def sample(self, grid, with_derivative=False, workers=1):
        grid = [float(T) for T in grid]
        if workers > 1:
            from concurrent.futures import ThreadPoolExecutor
            with ThreadPoolExecutor(max_workers=workers) as pool:
                return list(pool.map(lambda T: self.phi(T, with_derivative), grid))
        return [self.phi(T, with_derivative) for T in grid]

    def convexity_report(self, grid, values=None):
        """Signs of second divided differences of Phi against the concave/convex regions."""
        grid = np.asarray(grid, dtype=float)
        if grid.ndim != 1 or grid.size < 3:
            raise DomainError("a second difference needs at least three grid points")
        if np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
            raise DomainError("grid must be positive and strictly increasing")
        if values is None:
            values = np.array([p.phi for p in self.sample(grid)])
        values = np.asarray(values, dtype=float)
        c = self.constants
        h1 = np.diff(grid)
        slopes = np.diff(values) / h1
        second = 2.0 * np.diff(slopes) / (grid[2:] - grid[:-2])
        triples = [tuple(grid[i:i + 3]) for i in range(grid.size - 2)]
        bad = []
        convex_checked = concave_checked = 0
        for tri, d2 in zip(triples, second):
            if tri[0] > c.T_0:
                convex_checked += 1
                if not d2 > 0:
                    bad.append((tri, float(d2), "convex"))
            elif math.isfinite(c.T_star) and tri[2] < c.T_star:
                concave_checked += 1
                if not d2 < 0:
                    bad.append((tri, float(d2), "concave"))
        report = {
            "second_differences": second.tolist(),
            "convex_checked": convex_checked,
            "concave_checked": concave_checked,
            "violations": bad,
        }
        if bad:
            raise PropertyViolation(f"second differences with the wrong sign: {bad}")
        return report

    # ------------------------------------------------------------------ p = 2

    def psi(self, P) -> float:
        """Conformal reformulation: 4(n-1)/(n-2) * Phi(P^{1/2#})^2 (p = 2 only)."""
        e = self.exps
        if e.p != 2.0:
            raise ModeError("the conformal reformulation exists only for p = 2")
        if not P > 0:
            raise DomainError("P must be positive")
        return 4.0 * (e.n - 1) / (e.n - 2) * self.phi(P ** (1.0 / e.p_sharp)).phi ** 2
