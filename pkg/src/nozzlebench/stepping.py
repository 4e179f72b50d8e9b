"""Steady and transient solution drivers.

Transient runs march BDF1 (first step) then BDF2 with the convection
field frozen at the BDF-consistent extrapolation (semi-implicit mode)
or re-solved by Picard iteration.  The steady driver is plain Picard on
the Oseen problem.  Boundary conditions: Poiseuille inlet, no-slip
walls, u_r = 0 on the axis, natural (do-nothing) outflow.
"""

from collections import deque
from dataclasses import dataclass

import numpy as np

from nozzlebench.assembly import (
    SaddleSystem,
    apply_dirichlet,
    assemble_convection,
    assemble_divergence_block,
    assemble_forcing,
    assemble_mass,
    assemble_viscous_block,
    saddle_system,
)
from nozzlebench.cases import FlowCase
from nozzlebench.errors import InvalidParameterError, NonConvergenceError
from nozzlebench.linalg import sparse_lu
from nozzlebench.pcd import build_pcd, solve_saddle_direct, solve_saddle_gmres
from nozzlebench.spaces import Field, function_space


@dataclass
class SolutionState:
    """One snapshot of the discrete solution with solver diagnostics."""

    field: Field
    time: float
    step: int
    divergence_norm: float = 0.0
    nonlinear_iterations: int = 0
    linear_iterations: int = 0


def velocity_constraints(space, inlet_uz=None, extra=None):
    """Dirichlet map for the benchmark boundary conditions.

    inlet: u_r = 0 and u_z = inlet_uz(r); wall: no-slip; axis: u_r = 0.
    ``extra`` entries override (used for manufactured solutions).
    """
    n = space.n_scalar_u
    coords = space.velocity_map.dof_coords
    cons = {}
    for d in space.boundary_scalar_dofs("inlet"):
        cons[int(d)] = 0.0
        if inlet_uz is not None:
            cons[int(d) + n] = float(inlet_uz(coords[d, 0]))
        else:
            cons[int(d) + n] = 0.0
    for d in space.boundary_scalar_dofs("wall"):
        cons[int(d)] = 0.0
        cons[int(d) + n] = 0.0
    for d in space.boundary_scalar_dofs("axis"):
        cons[int(d)] = 0.0
    if extra:
        cons.update(extra)
    return cons


class CaseOperators:
    """Once-per-case assembled blocks shared by all steps and drivers."""

    def __init__(self, case: FlowCase, space=None, constraints=None):
        self.case = case
        self.space = space or function_space(case.mesh, case.order)
        self.A_visc = assemble_viscous_block(self.space, case.mu)
        self.B = assemble_divergence_block(self.space)
        self.M_v = assemble_mass(self.space, "velocity", rho=case.rho)
        if case.forcing is not None:
            f_r, f_z = case.forcing
            self.f0 = assemble_forcing(self.space, f_r, f_z)
        else:
            self.f0 = np.zeros(self.space.n_velocity)
        if constraints is None:
            constraints = velocity_constraints(self.space, case.inlet_velocity())
        self.constraints = constraints
        n = self.space.n_scalar_u
        self._inlet_uz_dofs = set(
            int(d) + n for d in self.space.boundary_scalar_dofs("inlet")
        )
        self.M_p = assemble_mass(self.space, "pressure")
        self._mp_lu = None

    def zero_field(self):
        return Field(self.space, np.zeros(self.space.n_total))

    def constraints_at(self, time=None):
        """Dirichlet map, with the inlet scaled by the ramp when present."""
        ramp = self.case.inlet_ramp
        if ramp is None or time is None:
            return self.constraints
        s = float(ramp(time))
        return {
            d: (v * s if d in self._inlet_uz_dofs else v)
            for d, v in self.constraints.items()
        }

    def oseen_system(self, w: Field, dt_alpha=None, rhs_u=None,
                     time=None) -> SaddleSystem:
        """[(alpha/dt) M_v + A + N(w)] u + Bt p = f with M_v rho-scaled;
        applies all boundary conditions."""
        F = self.A_visc + assemble_convection(self.space, w, rho=self.case.rho)
        if dt_alpha is not None:
            F = F + (dt_alpha / self.case.dt) * self.M_v
        f = self.f0 if rhs_u is None else self.f0 + rhs_u
        sys0 = saddle_system(F, self.B, f=f)
        return apply_dirichlet(sys0, self.constraints_at(time))

    def solve(self, system: SaddleSystem, pcd_w=None, dt_alpha=None):
        """Dispatch to the configured linear solver; returns (x, lin_iters)."""
        case = self.case
        if case.solver_mode == "direct":
            return solve_saddle_direct(system), 0
        dt = case.dt if dt_alpha is not None else None
        pcd = build_pcd(
            self.space, case.mu, case.rho, pcd_w or self.zero_field(),
            dt=dt, bdf_alpha=dt_alpha if dt_alpha is not None else 1.0,
        )
        x, iters, _ = solve_saddle_gmres(
            system, pcd, tol=case.gmres_tol, restart=case.gmres_restart
        )
        return x, iters

    def divergence_norm(self, field: Field):
        """sqrt(d' M_p^-1 d) with d = B u."""
        d = self.B @ field.velocity
        if self._mp_lu is None:
            self._mp_lu = sparse_lu(self.M_p)
        return float(np.sqrt(abs(d @ self._mp_lu.solve(d))))


def divergence_norm(state: SolutionState, ops: CaseOperators = None):
    if ops is None:
        raise InvalidParameterError("divergence_norm needs the case operators")
    return ops.divergence_norm(state.field)


def assemble_step_system(case: FlowCase, history, ops: CaseOperators = None):
    """One BDF time-step system from the previous 1-2 states.

    One previous state selects BDF1 (the bootstrap step); two select
    BDF2 with the transport field extrapolated to 2 u^n - u^{n-1}.
    """
    ops = ops or CaseOperators(case)
    states = list(history)
    if len(states) == 1:
        alpha = 1.0
        u_n = states[0].field
        w = u_n
        rhs = (1.0 / case.dt) * (ops.M_v @ u_n.velocity)
    elif len(states) == 2:
        alpha = 1.5
        u_n = states[-1].field
        u_nm1 = states[-2].field
        w = Field(ops.space, 2.0 * u_n.coeffs - u_nm1.coeffs)
        rhs = (1.0 / case.dt) * (
            ops.M_v @ (2.0 * u_n.velocity - 0.5 * u_nm1.velocity)
        )
    else:
        raise InvalidParameterError(
            f"history must hold 1 (BDF1) or 2 (BDF2) states, got {len(states)}"
        )
    t_next = (states[-1].step + 1) * case.dt
    system = ops.oseen_system(w, dt_alpha=alpha, rhs_u=rhs, time=t_next)
    return system, w, alpha


def _state_from_vector(ops, x, time, step, nonlin=0, lin=0):
    field = Field(ops.space, x)
    return SolutionState(
        field=field,
        time=time,
        step=step,
        divergence_norm=ops.divergence_norm(field),
        nonlinear_iterations=nonlin,
        linear_iterations=lin,
    )


def solve_transient(case: FlowCase, ops: CaseOperators = None, store="all",
                    steady_tol=None):
    """March from rest to t_end with fixed dt.

    Returns (trajectory, diagnostics) where diagnostics is a list of
    per-step dicts.  ``store`` is "all", "last", or an int stride (the
    final state is always kept).  ``steady_tol`` optionally stops early
    once the relative velocity change over 10 steps drops below it.
    """
    ops = ops or CaseOperators(case)
    n_steps = int(round(case.t_end / case.dt))
    state = _state_from_vector(ops, np.zeros(ops.space.n_total), 0.0, 0)
    trajectory = [state]
    diagnostics = []
    recent = deque([state.field.coeffs], maxlen=11)
    stride = 1 if store == "all" else (n_steps if store == "last" else int(store))

    history = [state]
    for step in range(1, n_steps + 1):
        if case.nonlinear_mode == "semi-implicit":
            system, w, alpha = assemble_step_system(case, history, ops)
            x, lin = ops.solve(system, pcd_w=w, dt_alpha=alpha)
            nonlin = 1
        else:
            x, nonlin, lin, alpha = _picard_step(case, ops, history)
        t = step * case.dt
        state = _state_from_vector(ops, x, t, step, nonlin, lin)
        history = [history[-1], state][-2:]
        diagnostics.append(
            {
                "step": step,
                "time": t,
                "divergence_norm": state.divergence_norm,
                "nonlinear_iterations": nonlin,
                "linear_iterations": lin,
            }
        )
        recent.append(state.field.coeffs)
        if step % stride == 0:
            trajectory.append(state)
        if steady_tol is not None and len(recent) == 11:
            unow = recent[-1][: ops.space.n_velocity]
            uold = recent[0][: ops.space.n_velocity]
            nrm = np.linalg.norm(unow)
            if nrm > 0 and np.linalg.norm(unow - uold) / nrm <= steady_tol:
                break
    if trajectory[-1] is not state:
        trajectory.append(state)
    return trajectory, diagnostics


def _picard_step(case, ops, history):
    """Fixed-point iteration on one implicit time step."""
    states = list(history)
    alpha = 1.0 if len(states) == 1 else 1.5
    if len(states) == 1:
        rhs = (1.0 / case.dt) * (ops.M_v @ states[0].field.velocity)
    else:
        rhs = (1.0 / case.dt) * (
            ops.M_v @ (2.0 * states[-1].field.velocity - 0.5 * states[-2].field.velocity)
        )
    w = states[-1].field
    lin_total = 0
    x = None
    for it in range(1, 51):
        t_next = (states[-1].step + 1) * case.dt
        system = ops.oseen_system(w, dt_alpha=alpha, rhs_u=rhs, time=t_next)
        if x is not None:
            res = np.linalg.norm(system.matvec(x) - system.rhs)
            ref = np.linalg.norm(system.rhs)
            if ref == 0.0 or res <= case.picard_tol * ref:
                return x, it - 1, lin_total, alpha
        x, lin = ops.solve(system, pcd_w=w, dt_alpha=alpha)
        lin_total += lin
        w = Field(ops.space, x)
    raise NonConvergenceError(
        f"Picard did not converge within 50 iterations at t = "
        f"{(states[-1].step + 1) * case.dt}",
        best=x,
    )


def solve_steady(case: FlowCase, ops: CaseOperators = None,
                 initial: Field = None) -> SolutionState:
    """Picard iteration on the steady Oseen problem.

    Converges when the relative nonlinear residual of the constrained
    system drops below case.picard_tol; raises NonConvergenceError with
    the residual history past case.picard_maxiter iterations.
    """
    ops = ops or CaseOperators(case)
    w = initial if initial is not None else ops.zero_field()
    x = w.coeffs.copy() if initial is not None else None
    relax = case.picard_relax
    residuals = []
    lin_total = 0
    for it in range(1, case.picard_maxiter + 1):
        system = ops.oseen_system(w)
        ref = np.linalg.norm(system.rhs)
        if ref == 0.0:
            return _state_from_vector(ops, np.zeros(ops.space.n_total), 0.0, 0,
                                      nonlin=it, lin=lin_total)
        if x is not None:
            res = np.linalg.norm(system.matvec(x) - system.rhs) / ref
            residuals.append(res)
            if res <= case.picard_tol:
                return _state_from_vector(ops, x, 0.0, 0, nonlin=it - 1,
                                          lin=lin_total)
        x_new, lin = ops.solve(system, pcd_w=w)
        lin_total += lin
        x = x_new if x is None or relax == 1.0 else relax * x_new + (1 - relax) * x
        w = Field(ops.space, x)
    raise NonConvergenceError(
        f"steady Picard stalled after {case.picard_maxiter} iterations "
        f"(last residual {residuals[-1] if residuals else float('nan'):.3e}); "
        "the regime may not be steady-solvable",
        best=x,
        history=residuals,
    )


def save_checkpoint(path, state: SolutionState, case: FlowCase):
    """Plain-text restartable checkpoint: parameters + coefficients."""
    with open(path, "w") as f:
        f.write("nozzlebench-checkpoint v1\n")
        for key in ("re_throat", "rho", "mu", "dt", "t_end"):
            f.write(f"{key} = {getattr(case, key):.17g}\n")
        f.write(f"order = {case.order}\n")
        f.write(f"time = {state.time:.17g}\n")
        f.write(f"step = {state.step}\n")
        f.write(f"coefficients {len(state.field.coeffs)}\n")
        for c in state.field.coeffs:
            f.write(f"{c:.17g}\n")


def load_checkpoint(path, space) -> tuple:
    """Read a checkpoint; returns (SolutionState, parameter dict)."""
    from nozzlebench.errors import ParseError

    with open(path) as f:
        lines = f.read().splitlines()
    if not lines or lines[0].strip() != "nozzlebench-checkpoint v1":
        raise ParseError("bad checkpoint header", line=1)
    params = {}
    i = 1
    while i < len(lines) and not lines[i].startswith("coefficients"):
        key, _, value = lines[i].partition("=")
        params[key.strip()] = float(value)
        i += 1
    if i >= len(lines):
        raise ParseError("missing coefficients section", line=len(lines))
    n = int(lines[i].split()[1])
    coeffs = np.array([float(v) for v in lines[i + 1 : i + 1 + n]])
    if len(coeffs) != n or n != space.n_total:
        raise ParseError("coefficient count mismatch", line=i + 1)
    field = Field(space, coeffs)
    state = SolutionState(
        field=field, time=params.get("time", 0.0), step=int(params.get("step", 0))
    )
    return state, params
