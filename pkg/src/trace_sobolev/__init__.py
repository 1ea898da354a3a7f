"""Numerics for the sharp Sobolev inequality on a half-space with a prescribed boundary trace."""

from .curves import CurveConstants, Curves, Member, p1_curve, te_gamma_formula
from .errors import (DomainError, ModeError, NumericalFailure, TraceSobolevError, Violation)
from .params import Exponents, derive_exponents, iso_ball, omega, sigma
from .phi_curve import CurvePoint, Multipliers, PhiCurve
from .profiles import FamilyTag, Profile, check_admissible, normalize
from .radial_quad import (QuadratureSpec, QuadResult, RadialIntegrand, boundary_integral, cap_area,
                          cap_volume, fullspace_integral, halfspace_integral, integrate)

__version__ = "0.1.0"

__all__ = [
    "CurveConstants", "CurvePoint", "Curves", "DomainError", "Exponents", "FamilyTag", "Member",
    "ModeError", "Multipliers", "NumericalFailure", "PhiCurve", "Profile", "QuadResult",
    "QuadratureSpec", "RadialIntegrand", "TraceSobolevError", "Violation", "boundary_integral",
    "cap_area", "cap_volume", "check_admissible", "derive_exponents", "fullspace_integral",
    "halfspace_integral", "integrate", "iso_ball", "normalize", "omega", "p1_curve", "sigma",
    "te_gamma_formula",
]
