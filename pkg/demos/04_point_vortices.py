"""s-point vortices in the plane and in the unit disk.

Run: python demos/04_point_vortices.py
"""
import numpy as np

from frax.constants import FracParams
from frax.vortex import StepperConfig, VortexState, angular_speed_disk, run_trajectory, single_vortex_in_disk

p = FracParams(0.5, 2)
cfg = StepperConfig(dt=1e-3)

pair = VortexState(0.0, [[-0.5, 0.0], [0.5, 0.0]], (1.0, 1.0))
traj = run_trajectory(pair, cfg, p, 10.0)
sep = [np.hypot(*(st.positions[1] - st.positions[0])) for st in traj.states]
print("equal pair: separation stays within", f"{max(abs(d - 1) for d in sep):.1e}", "of 1")
print("  relative drifts:", {k: f"{v:.1e}" for k, v in traj.drift().items()})

three = VortexState(0.0, [[1.0, 0.0], [-0.5, 0.8], [-0.3, -0.9]], (1.0, 0.7, 1.3))
for s in (0.3, 0.75):
    t = run_trajectory(three, StepperConfig(method="implicit_midpoint", dt=1e-3), FracParams(s, 2), 2.0)
    print(f"three vortices, s={s}, implicit midpoint: drifts",
          {k: f"{v:.1e}" for k, v in t.drift().items()})

disk = single_vortex_in_disk([0.5, 0.0], cfg, p, 10.0)
print("disk orbit: radius drift", f"{np.max(np.abs(disk.extras['radius'] - 0.5)):.1e}",
      f"angular speed {disk.extras['measured_angular_speed']:.6f}",
      f"predicted {angular_speed_disk(p, 0.5):.6f}")
