"""Steady pipe flow: the solver reproduces the Poiseuille parabola exactly.

The quadratic velocity / linear pressure pair is in the discrete space,
so the only error left is the linear-solver roundoff.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from nozzlebench.cases import FlowCase
from nozzlebench.meshing import generate_pipe_mesh
from nozzlebench.metrics import extract_wall_pressure
from nozzlebench.spaces import evaluate_field
from nozzlebench.stepping import CaseOperators, solve_steady

radius, length = 0.006, 0.06
mesh = generate_pipe_mesh(radius=radius, length=length, h=1.5e-3)
case = FlowCase(mesh=mesh, re_throat=500.0)
ops = CaseOperators(case)
state = solve_steady(case, ops)
print(f"mesh: {len(mesh.triangles)} triangles, "
      f"{ops.space.n_total} unknowns")

# radial velocity profile at mid-pipe vs the analytic parabola
r = np.linspace(0.0, radius, 41)
uz = np.array([evaluate_field(state.field, (ri, length / 2))[1] for ri in r])
exact = case.inlet_velocity()(r)
print(f"max |u_z - parabola| = {np.max(np.abs(uz - exact)):.3e} m/s")

# wall pressure: linear drop with the classic slope 8 mu u_mean / R^2
zs = np.linspace(0.004, 0.056, 9)
wall = extract_wall_pressure(state, zs)
slope = np.polyfit(wall.z, wall.values, 1)[0]
expected = -8.0 * case.mu * case.u_mean_throat / radius**2
print(f"dp/dz = {slope:.6e} Pa/m (analytic {expected:.6e})")

fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.5))
ax1.plot(uz, r * 1e3, "o", label="computed")
ax1.plot(exact, r * 1e3, "-", label="parabola")
ax1.set_xlabel("u_z (m/s)")
ax1.set_ylabel("r (mm)")
ax1.legend()
ax2.plot(wall.z, wall.values, "o-")
ax2.set_xlabel("z (m)")
ax2.set_ylabel("wall pressure (Pa)")
fig.tight_layout()
fig.savefig("poiseuille_pipe.png", dpi=150)
print("wrote poiseuille_pipe.png")
