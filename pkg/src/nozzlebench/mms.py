"""Manufactured solution used for order-of-accuracy verification.

The exact field comes from the Stokes stream function
``psi = r^2 (1 - r^2) sin(pi z)`` on the unit square ``(r, z) in
[0, 1]^2``, which is divergence-free in the axisymmetric sense and
regular on the axis:

    u_r = -pi r (1 - r^2) cos(pi z)
    u_z = (2 - 4 r^2) sin(pi z)
    p   = r^2 cos(pi z)

The body force below is the symbolic momentum residual of this triple
(derived once with a computer-algebra system and simplified), so the
steady solver should reproduce the field up to discretization error.
"""

import numpy as np

from nozzlebench.assembly import assemble_mass
from nozzlebench.cases import FlowCase
from nozzlebench.elements import quadrature_rule, reference_basis_eval
from nozzlebench.meshing import generate_rect_mesh
from nozzlebench.spaces import function_space
from nozzlebench.stepping import CaseOperators, solve_steady

PI = np.pi


def exact_velocity(r, z):
    """(u_r, u_z) of the manufactured field."""
    r = np.asarray(r, dtype=float)
    z = np.asarray(z, dtype=float)
    u_r = -PI * r * (1.0 - r**2) * np.cos(PI * z)
    u_z = (2.0 - 4.0 * r**2) * np.sin(PI * z)
    return u_r, u_z


def exact_pressure(r, z):
    r = np.asarray(r, dtype=float)
    z = np.asarray(z, dtype=float)
    return r**2 * np.cos(PI * z)


def forcing(rho, mu):
    """Momentum-residual body force (f_r, f_z) as vectorized callables."""

    def f_r(r, z):
        c = np.cos(PI * z)
        s2 = np.sin(PI * z) ** 2
        visc = PI**3 * mu * (r**2 - 1.0) * c - 8.0 * PI * mu * c
        conv = PI**2 * rho * (
            (s2 + 3.0) * r**4 - (2.0 * s2 + 4.0) * r**2 + s2 + 1.0
        )
        return r * (visc + conv + 2.0 * c)

    def f_z(r, z):
        c = np.cos(PI * z)
        poly = (
            -4.0 * PI**2 * mu * r**2
            + 16.0 * mu
            + 2.0 * PI**2 * mu
            + 8.0 * PI * rho * c * (r**4 - r**2)
            - PI * r**2
            + 4.0 * PI * rho * c
        )
        return poly * np.sin(PI * z)

    return f_r, f_z


def mms_constraints(space):
    """Exact Dirichlet data on every boundary velocity dof, plus a
    single exact pressure pin to fix the constant mode."""
    n = space.n_scalar_u
    coords = space.velocity_map.dof_coords
    cons = {}
    for tag in ("inlet", "outlet", "wall", "axis"):
        for d in space.boundary_scalar_dofs(tag):
            u_r, u_z = exact_velocity(coords[d, 0], coords[d, 1])
            cons[int(d)] = float(u_r)
            cons[int(d) + n] = float(u_z)
    p0 = space.pressure_map.dof_coords[0]
    cons[space.n_velocity + 0] = float(exact_pressure(p0[0], p0[1]))
    return cons


def mms_case(h, order=1, rho=1.0, mu=1.0):
    """Steady manufactured-solution case on the unit square."""
    mesh = generate_rect_mesh(0.0, 1.0, 0.0, 1.0, h)
    case = FlowCase(
        mesh=mesh,
        profile=None,
        rho=rho,
        mu=mu,
        order=order,
        solver_mode="direct",
        nonlinear_mode="picard",
        forcing=forcing(rho, mu),
    )
    space = function_space(mesh, order)
    ops = CaseOperators(case, space=space, constraints=mms_constraints(space))
    return case, ops


def solve_mms(h, order=1, rho=1.0, mu=1.0):
    case, ops = mms_case(h, order=order, rho=rho, mu=mu)
    state = solve_steady(case, ops)
    return state, ops


def _l2_errors(state, ops):
    """Weighted L2 errors (velocity vector, mean-adjusted pressure)."""
    space = ops.space
    mesh = space.mesh
    rule = quadrature_rule(10)
    vals_u = reference_basis_eval(space.order + 1, rule.points)[0]
    vals_p = reference_basis_eval(space.order, rule.points)[0]
    verts = mesh.vertices[mesh.triangles]
    v0 = verts[:, 0]
    jac = np.stack([verts[:, 1] - v0, verts[:, 2] - v0], axis=2)
    det = np.abs(np.linalg.det(jac))
    xy = rule.points[:, 1:] if rule.points.shape[1] == 3 else rule.points
    rz = v0[:, None, :] + np.einsum("qp,edp->eqd", xy, jac)
    r, z = rz[..., 0], rz[..., 1]
    w = rule.weights[None, :] * det[:, None] * r

    n = space.n_scalar_u
    du = space.velocity_map.cell_dofs
    dp = space.pressure_map.cell_dofs
    uh_r = np.einsum("qa,ea->eq", vals_u, state.field.coeffs[du])
    uh_z = np.einsum("qa,ea->eq", vals_u, state.field.coeffs[n + du])
    ph = np.einsum("qa,ea->eq", vals_p, state.field.coeffs[space.n_velocity + dp])
    ex_r, ex_z = exact_velocity(r, z)
    ex_p = exact_pressure(r, z)

    vol = w.sum()
    shift = ((ph - ex_p) * w).sum() / vol
    err_u = np.sqrt((w * ((uh_r - ex_r) ** 2 + (uh_z - ex_z) ** 2)).sum())
    nrm_u = np.sqrt((w * (ex_r**2 + ex_z**2)).sum())
    err_p = np.sqrt((w * (ph - ex_p - shift) ** 2).sum())
    nrm_p = np.sqrt((w * ex_p**2).sum())
    return err_u / nrm_u, err_p / nrm_p


def convergence_study(hs, order=1, rho=1.0, mu=1.0):
    """Relative L2 errors for a list of mesh sizes; returns
    (errors_u, errors_p) arrays aligned with ``hs``."""
    eu, ep = [], []
    for h in hs:
        state, ops = solve_mms(h, order=order, rho=rho, mu=mu)
        a, b = _l2_errors(state, ops)
        eu.append(a)
        ep.append(b)
    return np.array(eu), np.array(ep)


def observed_orders(hs, errors):
    """Least-squares slope of log(error) vs log(h)."""
    return float(np.polyfit(np.log(hs), np.log(errors), 1)[0])
