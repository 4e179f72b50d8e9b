"""Transient startup in a straight pipe with a ramped inlet.

Marches from rest with BDF2 time stepping while the inlet profile is
smoothly ramped, and tracks the centerline velocity approaching the
steady Poiseuille value.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from nozzlebench.cases import FlowCase
from nozzlebench.meshing import generate_pipe_mesh
from nozzlebench.spaces import evaluate_field
from nozzlebench.stepping import CaseOperators, solve_steady, solve_transient


def smoothstep(t, t_ramp):
    s = np.clip(t / t_ramp, 0.0, 1.0)
    return s * s * (3.0 - 2.0 * s)


mesh = generate_pipe_mesh(radius=0.002, length=0.04, h=4e-4)
t_end = 3.0
case = FlowCase(
    mesh=mesh, re_throat=500.0, dt=5e-3, t_end=t_end,
    nonlinear_mode="semi-implicit",
    inlet_ramp=lambda t: smoothstep(t, 0.5),
)
ops = CaseOperators(case)
trajectory, diagnostics = solve_transient(case, ops, store=10,
                                          steady_tol=1e-10)

steady = solve_steady(FlowCase(mesh=mesh, re_throat=500.0), ops)
u_ref = evaluate_field(steady.field, (0.0, 0.02))[1]

times = [s.time for s in trajectory]
u_center = [evaluate_field(s.field, (0.0, 0.02))[1] for s in trajectory]
print(f"{len(diagnostics)} steps; final centerline velocity "
      f"{u_center[-1]:.6f} m/s (steady {u_ref:.6f})")
print(f"final divergence norm {trajectory[-1].divergence_norm:.3e}")

fig, ax = plt.subplots(figsize=(6, 4))
ax.plot(times, u_center, "-", label="transient")
ax.axhline(u_ref, color="k", linestyle=":", label="steady solve")
ax.set_xlabel("t (s)")
ax.set_ylabel("centerline u_z (m/s)")
ax.legend()
fig.tight_layout()
fig.savefig("transient_startup.png", dpi=150)
print("wrote transient_startup.png")
