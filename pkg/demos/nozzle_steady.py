"""Steady nozzle benchmark at throat Reynolds number 500.

Solves the axisymmetric flow through the converging nozzle with sudden
expansion, then plots the normalized centerline velocity and wall
pressure and reports the sectional mass-conservation error E_Q.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from nozzlebench.cases import FlowCase
from nozzlebench.geometry import build_nozzle_profile
from nozzlebench.meshing import generate_axisym_mesh
from nozzlebench.metrics import (
    compute_EQ,
    extract_centerline,
    extract_wall_pressure,
    normalize,
)
from nozzlebench.stepping import CaseOperators, solve_steady

profile = build_nozzle_profile()
sizing = {"inlet": 2.4e-3, "convergent": 1.6e-3,
          "throat": 8e-4, "expansion": 1.6e-3}
mesh = generate_axisym_mesh(profile, sizing)
case = FlowCase(mesh=mesh, profile=profile, re_throat=500.0)
ops = CaseOperators(case)
state = solve_steady(case, ops)
print(f"mesh: {len(mesh.triangles)} triangles, {ops.space.n_total} unknowns; "
      f"Picard iterations: {state.nonlinear_iterations}")

stations = [-0.088, -0.064, -0.048, -0.02, -0.008, 0.0,
            0.008, 0.016, 0.024, 0.032, 0.06, 0.08]
zs = np.linspace(-0.095, 0.095, 120)
u = normalize(extract_centerline(state, zs), case)
p = normalize(extract_wall_pressure(state, zs, profile=profile), case,
              reference_z=zs[0])

for z, eq in compute_EQ(state, case, stations, profile=profile):
    print(f"  z = {z:+.3f} m: E_Q = {eq:.3f} %")

fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
ax1.plot(u.z, u.values)
ax1.set_ylabel("u_z / u_mean_inlet")
ax2.plot(p.z, p.values)
ax2.set_ylabel("normalized wall pressure")
ax2.set_xlabel("z (m)")
for ax in (ax1, ax2):
    ax.axvspan(-0.04, 0.0, color="0.9", label="throat")
fig.tight_layout()
fig.savefig("nozzle_steady.png", dpi=150)
print("wrote nozzle_steady.png")
