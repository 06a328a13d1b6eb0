"""
Coating flow on a sphere
========================

The physical model adds gravity drainage (a), rotation (b) and surface
tension (c) to a cubic mobility. Profiles are exchanged in the polar
angle theta and computed in x = -cos(theta).
"""

import numpy as np

from thinfilm.grid import build_grid
from thinfilm.physical import PhysicalParams, integrate_physical, mass_in, to_theta_profile
from thinfilm.stepper import SolverConfig, default_initial

grid = build_grid(65)
pp = PhysicalParams(a=1.0, b=0.01, c=0.01, eps=1e-2, delta=1e-1)
times = np.linspace(0, 1e-2, 6)
traj = integrate_physical(default_initial(grid), pp, SolverConfig(T_final=1e-2),
                          output_times=times[1:])

####################################################################
# Drainage
# --------
# Gravity moves fluid towards the x = +1 pole.

for u in traj.sampled().snapshots:
    print(f"t={u.t:.3f}  mass in x > 0: {mass_in(u, 0.0, 1.0):.5f}")

####################################################################
# Final profile in theta
# ----------------------

theta, h = to_theta_profile(traj.final)
for th, v in list(zip(theta, h))[::16]:
    print(f"theta={th:.3f}  h={v:.5f}")
