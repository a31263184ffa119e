"""Green function identities on (-1, 1), checked point by point.

Run: python demos/01_interval_identities.py
"""
import numpy as np

from frax.constants import FracParams
from frax.green1d import robin, torsion
from frax.identities import check_derivative_representation, check_pohozaev_green, check_robin_gradient

for s in (0.25, 0.5, 0.75):
    p = FracParams(s)
    u0 = torsion(p, 0.0)[0]
    print(f"\ns = {s}: torsion u(0) = {u0:.12g}")
    for x in (-0.6, 0.0, 0.4):
        r = check_derivative_representation(p, x)
        print(f"  u'({x:+.1f}) = {r.lhs:+.12e}   via Green: {r.rhs:+.12e}   [{'ok' if r.passed else 'FAIL'}]")
    R, dR = robin(p, 0.4)
    g = check_robin_gradient(p, 0.4)
    print(f"  Robin R(0.4) = {R:.10g}, R'(0.4) = {dR:.10g}; boundary-ratio form gives {g.rhs:.10g}")
    if s != 0.5:
        q = check_pohozaev_green(p, 0.2, -0.5)
        print(f"  two-point identity at (0.2, -0.5): abs err {q.abs_err:.2e}")

# the two-point identity degenerates to the Robin gradient as y -> x
p = FracParams(0.25)
print("\napproach to the diagonal, s = 0.25, x = 0.3:")
for h in np.geomspace(1e-1, 1e-4, 4):
    print(f"  y = x + {h:.0e}: {check_pohozaev_green(p, 0.3, 0.3 + h).lhs:+.10f}")
print(f"  -R'(0.3)      : {-robin(p, 0.3)[1]:+.10f}")
