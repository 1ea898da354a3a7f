"""Independent numerical oracles: the transport inequality, radial transport and p = 2 curvature."""

from .conformal import check_el, conformal_check
from .mother import (NOT_EXTREMAL, CheckResult, check_corollary_bounds, check_mother,
                     classify_equality)
from .suites import SUITES, SuiteConfig, run_suite, to_jsonl
from .transport import (RadialDensity, TransportPlan, bubble_density, bump_density,
                        check_transport_chain, radial_brenier)
from .trials import AxialTrial, BallTrial, RadialTrial, family_trial, random_trial

__all__ = [
    "AxialTrial", "BallTrial", "CheckResult", "NOT_EXTREMAL", "RadialDensity", "RadialTrial",
    "SUITES", "SuiteConfig", "TransportPlan", "bubble_density", "bump_density", "check_corollary_bounds",
    "check_el", "check_mother", "check_transport_chain", "classify_equality", "conformal_check",
    "family_trial", "radial_brenier", "random_trial", "run_suite", "to_jsonl",
]
