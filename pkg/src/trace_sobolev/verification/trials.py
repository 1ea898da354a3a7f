"""Trial functions for the transport inequality checks.

Every trial is either radial about a point ``center * e1`` or a product
``u(|x'|) w(x1)``, so all norms reduce to one- or two-dimensional quadrature.
Radial trials are written as ``phi(r / scale)`` and carry, for the profile
and its derivative, power-law bounds ``A * rho**(-a)`` valid for
``rho >= rho0``; these become the tail envelopes handed to the integrator.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from ..errors import DomainError
from ..params import Exponents
from ..profiles import FamilyTag
from ..radial_quad import RadialIntegrand

RADIAL_KINDS = ("sobolev", "escobar", "beyond_escobar", "power", "bump", "perturbed")
FAMILY_KIND = {
    FamilyTag.SOBOLEV: "sobolev",
    FamilyTag.ESCOBAR: "escobar",
    FamilyTag.BEYOND_ESCOBAR: "beyond_escobar",
}


@dataclass(frozen=True)
class RadialTrial:
    """``phi(|x - center e1| / scale)`` for one of the shapes in ``RADIAL_KINDS``.

    ``beta`` is the decay exponent of the ``power`` shape, ``k`` the edge
    exponent of the compact ``bump``, and ``amplitude`` the size of the
    compactly supported bump multiplying the ``perturbed`` Sobolev shape.
    """

    kind: str
    exps: Exponents
    center: float
    scale: float = 1.0
    beta: float = math.nan
    k: float = 3.0
    amplitude: float = 0.0

    def __post_init__(self):
        if self.kind not in RADIAL_KINDS:
            raise DomainError(f"unknown radial trial kind {self.kind!r}")
        if self.exps.is_p1:
            raise DomainError("radial trials need p > 1; use BallTrial for p = 1")
        if not self.scale > 0:
            raise DomainError("trial scale must be positive")
        if self.kind == "escobar" and not self.center < 0:
            raise DomainError("Escobar trial needs its singular point outside H")
        if self.kind == "beyond_escobar" and not self.center + self.scale < 0:
            raise DomainError("beyond-Escobar trial needs its singular shell outside H")
        if self.kind == "bump" and not self.center + self.scale > 0:
            raise DomainError("bump trial does not meet H")
        if self.kind == "power" and not self.beta > self.min_power_decay(self.exps):
            raise DomainError(f"power decay {self.beta} too slow for finite moments")
        if self.kind == "perturbed" and not abs(self.amplitude) < 1:
            raise DomainError("perturbation amplitude must lie in (-1, 1)")

    @staticmethod
    def min_power_decay(exps: Exponents) -> float:
        """beta above which (1 + r^p')^(-beta) has every norm the inequality needs."""
        return (exps.n + exps.p_prime) / (exps.p_prime * exps.p_star)

    @property
    def alpha(self):
        return (self.exps.n - self.exps.p) / self.exps.p

    @property
    def radial(self):
        return True

    @property
    def family(self):
        for tag, kind in FAMILY_KIND.items():
            if kind == self.kind:
                return tag
        return None

    # shape and derivative in the scaled radius rho = r / scale

    def phi(self, rho):
        rho = np.asarray(rho, dtype=float)
        pp = self.exps.p_prime
        al = self.alpha
        kind = self.kind
        if kind == "sobolev":
            return (1.0 + rho ** pp) ** (-al)
        if kind == "escobar":
            return rho ** (-al * pp)
        if kind == "beyond_escobar":
            return np.expm1(pp * np.log(rho)) ** (-al)
        if kind == "power":
            return (1.0 + rho ** pp) ** (-self.beta)
        if kind == "bump":
            return np.maximum(1.0 - rho * rho, 0.0) ** self.k
        base = (1.0 + rho ** pp) ** (-al)
        return base * (1.0 + self.amplitude * np.maximum(1.0 - rho * rho, 0.0) ** 3)

    def dphi(self, rho):
        rho = np.asarray(rho, dtype=float)
        pp = self.exps.p_prime
        al = self.alpha
        kind = self.kind
        if kind == "sobolev":
            return -al * pp * rho ** (pp - 1) * (1.0 + rho ** pp) ** (-al - 1)
        if kind == "escobar":
            return -al * pp * rho ** (-al * pp - 1)
        if kind == "beyond_escobar":
            return -al * pp * rho ** (pp - 1) * np.expm1(pp * np.log(rho)) ** (-al - 1)
        if kind == "power":
            return -self.beta * pp * rho ** (pp - 1) * (1.0 + rho ** pp) ** (-self.beta - 1)
        if kind == "bump":
            inside = np.maximum(1.0 - rho * rho, 0.0)
            return -2.0 * self.k * rho * inside ** (self.k - 1)
        base = (1.0 + rho ** pp) ** (-al)
        dbase = -al * pp * rho ** (pp - 1) * (1.0 + rho ** pp) ** (-al - 1)
        inside = np.maximum(1.0 - rho * rho, 0.0)
        return dbase * (1.0 + self.amplitude * inside ** 3) - base * self.amplitude * 6.0 * rho * inside ** 2

    def _bounds(self):
        """(A, a, A', a', rho0): phi <= A rho^-a and |phi'| <= A' rho^-a' for rho >= rho0."""
        pp = self.exps.p_prime
        al = self.alpha
        kind = self.kind
        if kind in ("sobolev", "perturbed"):
            return 1.0, al * pp, al * pp, al * pp + 1, 1.0
        if kind == "escobar":
            return 1.0, al * pp, al * pp, al * pp + 1, abs(self.center) / self.scale
        if kind == "beyond_escobar":
            return 2.0 ** al, al * pp, al * pp * 2.0 ** (al + 1), al * pp + 1, 2.0 ** (1.0 / pp)
        if kind == "power":
            b = self.beta
            return 1.0, b * pp, b * pp, b * pp + 1, 1.0
        return 0.0, 1.0, 0.0, 1.0, 1.0

    # radial functions of r = |x - center e1|

    def value(self, r):
        return self.phi(np.asarray(r, dtype=float) / self.scale)

    def grad(self, r):
        return np.abs(self.dphi(np.asarray(r, dtype=float) / self.scale)) / self.scale

    def integrand(self, q) -> RadialIntegrand:
        """``value**q`` with its tail envelope."""
        amp, a, _, _, rho0 = self._bounds()
        s = self.scale
        scale_hint = abs(self.center) if self.kind == "escobar" else s
        return RadialIntegrand(lambda r: self.value(r) ** q, a * q, amp ** q * s ** (a * q),
                               s * rho0, scale_hint)

    def grad_integrand(self) -> RadialIntegrand:
        """``|grad|**p`` with its tail envelope."""
        p = self.exps.p
        _, _, amp, a, rho0 = self._bounds()
        s = self.scale
        scale_hint = abs(self.center) if self.kind == "escobar" else s
        return RadialIntegrand(lambda r: self.grad(r) ** p, a * p, (amp * s ** (a - 1)) ** p,
                               s * rho0, scale_hint)

    def dilate(self, lam) -> "RadialTrial":
        """Mass-preserving dilation about the origin (a boundary point)."""
        return replace(self, center=self.center / lam, scale=self.scale / lam)

    def describe(self):
        d = {"kind": self.kind, "center": self.center, "scale": self.scale}
        if self.kind == "power":
            d["beta"] = self.beta
        if self.kind == "bump":
            d["k"] = self.k
        if self.kind == "perturbed":
            d["amplitude"] = self.amplitude
        return d


@dataclass(frozen=True)
class AxialTrial:
    """``exp(-(|x'|/width)^2) * exp(-((x1 - shift)/depth)^2)`` restricted to H."""

    exps: Exponents
    width: float = 1.0
    depth: float = 1.0
    shift: float = 0.0

    def __post_init__(self):
        if self.exps.is_p1:
            raise DomainError("axial trials need p > 1")
        if not (self.width > 0 and self.depth > 0):
            raise DomainError("axial trial widths must be positive")

    kind = "axial"
    radial = False
    family = None

    def u(self, rho):
        return np.exp(-(np.asarray(rho) / self.width) ** 2)

    def du(self, rho):
        rho = np.asarray(rho)
        return -2.0 * rho / self.width ** 2 * self.u(rho)

    def w(self, x1):
        return np.exp(-((np.asarray(x1) - self.shift) / self.depth) ** 2)

    def dw(self, x1):
        x1 = np.asarray(x1)
        return -2.0 * (x1 - self.shift) / self.depth ** 2 * self.w(x1)

    def dilate(self, lam) -> "AxialTrial":
        return replace(self, width=self.width / lam, depth=self.depth / lam, shift=self.shift / lam)

    def describe(self):
        return {"kind": "axial", "width": self.width, "depth": self.depth, "shift": self.shift}


@dataclass(frozen=True)
class BallTrial:
    """Indicator of the ball of ``radius`` about ``center e1``, restricted to H (p = 1)."""

    exps: Exponents
    center: float
    radius: float = 1.0

    def __post_init__(self):
        if not self.radius > 0:
            raise DomainError("ball radius must be positive")
        if not self.center + self.radius > 0:
            raise DomainError("ball does not meet H")

    kind = "ball"
    radial = True

    @property
    def family(self):
        return FamilyTag.BALL_P1

    def dilate(self, lam) -> "BallTrial":
        return replace(self, center=self.center / lam, radius=self.radius / lam)

    def describe(self):
        return {"kind": "ball", "center": self.center, "radius": self.radius}


def family_trial(exps: Exponents, family, t) -> "RadialTrial | BallTrial":
    """The family member centered at ``t e1`` with unit scale, as a trial."""
    family = FamilyTag(family)
    if exps.is_p1 or family is FamilyTag.BALL_P1:
        return BallTrial(exps, float(t), 1.0)
    kind = FAMILY_KIND[family]
    scale = abs(float(t)) if family is FamilyTag.ESCOBAR else 1.0
    return RadialTrial(kind, exps, float(t), scale)


def random_trial(rng: np.random.Generator, exps: Exponents, kinds=None):
    """Draw one trial; the same generator state always yields the same trial."""
    if exps.is_p1:
        radius = float(rng.uniform(0.3, 2.0))
        center = float(rng.uniform(-0.9 * radius, 2.0 * radius))
        return BallTrial(exps, center, radius)
    kinds = kinds or RADIAL_KINDS + ("axial",)
    kind = kinds[int(rng.integers(len(kinds)))]
    if kind == "axial":
        return AxialTrial(exps, float(rng.uniform(0.5, 2.0)), float(rng.uniform(0.5, 2.0)),
                          float(rng.uniform(-1.0, 1.0)))
    scale = float(rng.uniform(0.5, 2.0))
    if kind == "sobolev":
        return RadialTrial(kind, exps, float(rng.uniform(-2.0, 2.0)), scale)
    if kind == "escobar":
        center = float(rng.uniform(-2.0, -0.2))
        return RadialTrial(kind, exps, center, abs(center))
    if kind == "beyond_escobar":
        scale = float(rng.uniform(0.5, 1.5))
        return RadialTrial(kind, exps, -scale * float(rng.uniform(1.1, 3.0)), scale)
    if kind == "power":
        lo = RadialTrial.min_power_decay(exps)
        return RadialTrial(kind, exps, float(rng.uniform(-1.5, 1.5)), scale,
                           beta=lo * float(rng.uniform(1.2, 3.0)))
    if kind == "bump":
        center = float(rng.uniform(-0.5, 2.0))
        scale = max(scale, abs(center) + 0.3) if center < 0 else scale
        return RadialTrial(kind, exps, center, scale, k=float(rng.integers(2, 5)))
    return RadialTrial(kind, exps, float(rng.uniform(-1.5, 1.5)), scale,
                       amplitude=float(rng.uniform(-0.5, 0.5)))
