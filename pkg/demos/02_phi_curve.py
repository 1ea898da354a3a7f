"""Sample the sharp curve and compare it with its lower envelope.

Writes phi_curve.svg into the working directory and prints landmarks:
the minimum at T0 and the smooth passage through T_E, followed by the
gap to the asymptote on the right.
"""

import numpy as np

from trace_sobolev import PhiCurve
from trace_sobolev.cli import rows_to_svg

curve = PhiCurve.for_pair(3, 2)
c = curve.constants

print(f"minimum at T0={c.T_0:.6f}: phi={curve(c.T_0):.8f}")
left, right = curve.one_sided_slopes_at_te()
print(f"slopes either side of T_E={c.T_E:.6f}: {left:.6f}, {right:.6f} (E={c.E:.6f})")
for T in (3, 5, 8, 12):
    print(f"  asymptotic gap at T={T:2d}: {curve.asymptotic_gap(T):.3e}")

grid = np.linspace(c.T_0 / 20, 3 * c.T_E, 40)
points = curve.sample(grid)
rows = [(T, pt.phi, str(pt.family), pt.t, pt.dphi, curve.envelope(T)) for T, pt in zip(grid, points)]
with open("phi_curve.svg", "w") as fh:
    fh.write(rows_to_svg(rows, "n=3, p=2"))
print("wrote phi_curve.svg")
