"""Walk through the three minimizer families for n = 3, p = 2.

Prints the sharp constants and shows how the trace T and the gradient
level G move as the offset t sweeps each family.
"""

import numpy as np

from trace_sobolev import Curves, FamilyTag

curves = Curves.for_pair(3, 2)
c = curves.constants()
print("sharp constants for n=3, p=2")
for name in ("S", "T_0", "phi_T0", "T_E", "G_E", "E", "T_star", "Y_E"):
    print(f"  {name:7s} {getattr(c, name):.10f}")

print("\nSobolev family: t runs over the real line, T falls as t grows")
for t in (-3.0, -1.0, 0.0, 1.0, 3.0):
    m = curves.member(FamilyTag.SOBOLEV, t)
    print(f"  t={t:+.1f}  T={m.T:.6f}  G={m.G:.6f}")

print("\nEscobar family: every offset gives the same point")
for t in (-0.5, -1.0, -5.0):
    m = curves.member(FamilyTag.ESCOBAR, t)
    print(f"  t={t:+.1f}  T={m.T:.10f}  G={m.G:.10f}")

print("\nbeyond-Escobar family: T grows without bound as t approaches -1")
for t in (-5.0, -2.0, -1.2, -1.05):
    m = curves.member(FamilyTag.BEYOND_ESCOBAR, t)
    print(f"  t={t:+.2f}  T={m.T:.6f}  G={m.G:.6f}")

worst = max(curves.equality_identity_residual(fam, t)
            for fam, ts in ((FamilyTag.SOBOLEV, np.linspace(-3, 3, 7)),
                            (FamilyTag.BEYOND_ESCOBAR, (-1.5, -3.0)))
            for t in ts)
print(f"\nequality identity, worst relative residual: {worst:.2e}")
