"""Radial transport maps and the conformal reading of the p = 2 family."""

from trace_sobolev.verification.conformal import conformal_check
from trace_sobolev.verification.transport import bump_density, check_transport_chain, radial_brenier

F = bump_density(3, radius=1.0, center=2.0)
for label, G in (("dilation", F.dilated(1.7)),
                 ("modulated bump", bump_density(3, radius=1.3, center=2.0, modulation=0.8))):
    plan = radial_brenier(F, G)
    res = check_transport_chain(plan)
    print(f"{label}: MA residual {plan.residual:.1e}, AM-GM gap {res.detail['amgm_gap']:.2e}")

print("\nconstant curvatures of the p = 2 members in dimension 3")
for fam, t in (("Sobolev", 1.0), ("Sobolev", -1.0), ("Escobar", -1.0), ("BeyondEscobar", -2.0)):
    rep = conformal_check(fam, t)
    print(f"  {fam:14s} t={t:+.1f}  R={rep.R:+.6f}  h={rep.h:+.6f}")
