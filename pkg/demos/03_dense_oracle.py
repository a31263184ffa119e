"""An independent finite-element solver for the fractional Dirichlet problem.

The closed-form torsion function is recovered by a dense Galerkin
discretisation; the error shrinks as the graded mesh is refined.

Run: python demos/03_dense_oracle.py
"""
import numpy as np

from frax.constants import FracParams
from frax.fracoracle import assemble_dense, boundary_ratios_dense
from frax.green1d import boundary_ratios, torsion

for s in (0.25, 0.5, 0.75):
    p = FracParams(s)
    print(f"\ns = {s}")
    prev = None
    for n in (100, 200, 400):
        op = assemble_dense(p, n)
        err = np.abs(op.torsion() - torsion(p, op.nodes)[0]).max()
        rate = "" if prev is None else f"  ratio {prev / err:.2f}"
        print(f"  n={n:4d} max torsion error {err:.3e}{rate}")
        prev = err
    if s == 0.5:
        continue  # no closed-form Green function at this order
    dense = boundary_ratios_dense(p, 0.3)
    exact = [float(v) for v in boundary_ratios(p, 0.3)]
    print(f"  boundary ratios of G(0.3, .): dense {np.round(dense, 6)} exact {np.round(exact, 6)}")
