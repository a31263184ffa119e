"""Hadamard-type shape derivatives under dilation of the interval.

Closed-form derivatives are compared with boundary-ratio formulas and with
centred differences in the dilation parameter.

Run: python demos/02_shape_derivatives.py
"""
from frax.constants import FracParams
from frax.hadamard import energy_shape_derivative, hadamard_green, hadamard_robin

print("torsion energy derivative (closed form vs boundary formula vs differences)")
for s in (0.1, 0.25, 0.5, 0.75, 0.9):
    p = FracParams(s)
    a = energy_shape_derivative(p)
    b = energy_shape_derivative(p, method="fd")
    print(f"  s={s:<4}  {a.lhs:.12f}  {a.rhs:.12f}  {b.lhs:.12f}")

print("\nGreen function variation at (0.2, -0.5); gated only below s = 1/2")
for s in (0.2, 0.4, 0.75):
    r = hadamard_green(FracParams(s), 0.2, -0.5)
    tag = "gated" if r.gated else "exploratory"
    print(f"  s={s:<4} lhs={r.lhs:+.10e} rhs={r.rhs:+.10e} abs_err={r.abs_err:.1e} ({tag})")

print("\nRobin function variation at x = 0.4")
for s in (0.25, 0.5, 0.75):
    r = hadamard_robin(FracParams(s), 0.4)
    print(f"  s={s:<4} lhs={r.lhs:+.10e} rhs={r.rhs:+.10e} tol={r.tol:g} {'ok' if r.passed else 'FAIL'}")
