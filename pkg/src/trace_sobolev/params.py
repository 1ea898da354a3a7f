"""Exponent bookkeeping and dimensional constants."""

import math
from dataclasses import dataclass
from functools import cached_property

from scipy.special import gammaln

from .errors import DomainError

ENDPOINT_GUARD = 1e-6


@dataclass(frozen=True)
class Exponents:
    """Validated pair (n, p) with the derived critical exponents.

    ``p_prime`` is ``math.inf`` when ``p == 1``; code paths for that case
    should branch on :attr:`is_p1` rather than on the value of ``p_prime``.
    """

    n: int
    p: float
    p_star: float
    p_sharp: float
    p_prime: float

    @property
    def is_p1(self) -> bool:
        return self.p == 1.0

    @property
    def kappa(self) -> float:
        """Constant in the gradient of the family profiles, (n - p)/(p - 1)."""
        return (self.n - self.p) / (self.p - 1.0)

    @cached_property
    def dims(self) -> "DimConstants":
        return DimConstants(self.n)

    def __repr__(self):
        return f"Exponents(n={self.n}, p={self.p:g})"


def derive_exponents(n, p) -> Exponents:
    """Validate ``(n, p)`` and compute p*, p# and p'."""
    if isinstance(n, bool) or int(n) != n:
        raise DomainError(f"dimension must be an integer, got {n!r}")
    n = int(n)
    p = float(p)
    if n < 2:
        raise DomainError(f"need n >= 2, got n={n}")
    if not math.isfinite(p) or p < 1.0 or p >= n:
        raise DomainError(f"need 1 <= p < n, got p={p} for n={n}")
    if p != 1.0 and p - 1.0 < ENDPOINT_GUARD:
        raise DomainError(f"p={p!r} is too close to 1 (guard {ENDPOINT_GUARD})")
    if n - p < ENDPOINT_GUARD:
        raise DomainError(f"p={p!r} is too close to n={n} (guard {ENDPOINT_GUARD})")
    p_star = n * p / (n - p)
    p_sharp = (n - 1) * p / (n - p)
    p_prime = math.inf if p == 1.0 else p / (p - 1.0)
    return Exponents(n, p, p_star, p_sharp, p_prime)


def sigma(k) -> float:
    """Area of the unit k-sphere in R^(k+1); ``sigma(0) == 2``."""
    if k < 0:
        raise DomainError(f"sphere dimension must be >= 0, got {k}")
    return 2.0 * math.exp(0.5 * (k + 1) * math.log(math.pi) - gammaln(0.5 * (k + 1)))


def omega(k) -> float:
    """Volume of the unit ball in R^k; ``omega(0) == 1``."""
    if k < 0:
        raise DomainError(f"ball dimension must be >= 0, got {k}")
    return math.exp(0.5 * k * math.log(math.pi) - gammaln(0.5 * k + 1.0))


def iso_ball(n) -> float:
    """Isoperimetric ratio of the unit ball, P(B1) / |B1|^((n-1)/n)."""
    if n < 2:
        raise DomainError(f"need n >= 2, got {n}")
    return n * omega(n) ** (1.0 / n)


@dataclass(frozen=True)
class DimConstants:
    n: int

    def sigma(self, k) -> float:
        return sigma(k)

    def omega(self, k) -> float:
        return omega(k)

    @property
    def iso_b1(self) -> float:
        return iso_ball(self.n)
