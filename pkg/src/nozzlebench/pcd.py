"""Pressure convection-diffusion (PCD) block preconditioning.

The Schur complement of [[F, Bt], [B, 0]] is approximated through
pressure-space operators: mass M_p, Laplacian A_p, and the
convection-diffusion operator F_p = alpha*rho/dt M_p + mu A_p + rho N_p(w).
The inverse action is fixed project-wide as

    S^-1 r ~ -(A_p^-1 (F_p (M_p^-1 r)))

and the full right preconditioner is the upper block triangle
[[F, Bt], [0, S]]: solve the pressure block first, then back-substitute
through F.  Inner solves are exact sparse LU.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from nozzlebench.assembly import (
    SaddleSystem,
    assemble_mass,
    assemble_pressure_boundary_mass,
    assemble_pressure_convection,
    assemble_pressure_stiffness,
)
from nozzlebench.errors import InvalidParameterError, SingularMatrixError
from nozzlebench.linalg import gmres, sparse_lu
from nozzlebench.spaces import Field, FunctionSpace

BC_MODES = ("outflow-dirichlet", "inflow-robin")


def _pin_rows_cols(m, dofs):
    """Identity rows/columns at the given dofs (preconditioner-side BC)."""
    n = m.shape[0]
    keep = np.ones(n)
    keep[dofs] = 0.0
    d = sp.diags(keep)
    pin = sp.diags(1.0 - keep)
    return (d @ m @ d + pin).tocsr()


def _boundary_pressure_dofs(space, tag):
    dm = space.pressure_map
    nv = space.mesh.n_vertices
    per_edge = space.k_p - 1
    dofs = set()
    for (a, b), etag in zip(space.mesh.boundary_edges, space.mesh.boundary_tags):
        if etag != tag:
            continue
        dofs.add(int(a))
        dofs.add(int(b))
        if per_edge:
            eid = dm.edge_ids[(a, b) if a < b else (b, a)]
            for s in range(per_edge):
                dofs.add(nv + per_edge * eid + s)
    return np.array(sorted(dofs), dtype=np.int64)


@dataclass
class PcdOperator:
    """Assembled PCD triple with cached inner factorizations."""

    M_p: sp.csr_matrix
    A_p: sp.csr_matrix
    F_p: sp.csr_matrix
    bc_mode: str
    _mp_lu: object = field(default=None, repr=False)
    _ap_lu: object = field(default=None, repr=False)

    def schur_solve(self, r_p):
        """Approximate Schur-inverse action (negated pressure solve)."""
        if self._mp_lu is None:
            self._mp_lu = sparse_lu(self.M_p)
        if self._ap_lu is None:
            self._ap_lu = sparse_lu(self.A_p)
        z = self._mp_lu.solve(r_p)
        z = self.F_p @ z
        z = self._ap_lu.solve(z)
        return -z


def build_pcd(space: FunctionSpace, mu, rho, w: Field, bc_mode="outflow-dirichlet",
              dt=None, bdf_alpha=1.0):
    """Assemble the PCD operator for the current transport field.

    ``dt`` switches the unsteady contribution (bdf_alpha * rho / dt) M_p
    into F_p; leave it None for steady problems.  ``bc_mode`` either
    pins outflow-boundary pressure dofs in A_p / F_p
    ("outflow-dirichlet") or adds a Robin-type inflow boundary term to
    F_p ("inflow-robin").
    """
    if bc_mode not in BC_MODES:
        raise InvalidParameterError(f"bc_mode must be one of {BC_MODES}")
    m_p = assemble_mass(space, "pressure")
    a_p = assemble_pressure_stiffness(space)
    f_p = mu * a_p + assemble_pressure_convection(space, w, rho)
    if dt is not None:
        f_p = f_p + (bdf_alpha * rho / dt) * m_p
    if bc_mode == "outflow-dirichlet":
        out = _boundary_pressure_dofs(space, "outlet")
        a_p = _pin_rows_cols(a_p, out)
        f_p = _pin_rows_cols(f_p, out)
    else:
        f_p = f_p + assemble_pressure_boundary_mass(space, w, rho, "inlet")
        # the pure-Neumann pressure Laplacian is singular; fix its
        # constant mode with a Dirichlet condition at the inflow
        a_p = _pin_rows_cols(a_p, _boundary_pressure_dofs(space, "inlet"))
    return PcdOperator(M_p=m_p.tocsr(), A_p=a_p.tocsr(), F_p=f_p.tocsr(),
                       bc_mode=bc_mode)


def _f_factor(system: SaddleSystem):
    lu = getattr(system, "_f_lu", None)
    if lu is None:
        lu = sparse_lu(system.F)
        system._f_lu = lu
    return lu


def apply_block_precond(system: SaddleSystem, pcd, residual):
    """Upper block-triangular preconditioner action.

    ``pcd`` is any object with a ``schur_solve(r_p)`` method (the PCD
    operator, or an exact Schur inverse in tests).  Inner solver
    failures are re-raised tagged with the offending block.
    """
    residual = np.asarray(residual, dtype=float)
    if residual.shape != (system.n_velocity + system.n_pressure,):
        raise InvalidParameterError("residual size does not match the system")
    r_u = residual[: system.n_velocity]
    r_p = residual[system.n_velocity :]
    try:
        q = pcd.schur_solve(r_p)
    except SingularMatrixError as exc:
        raise SingularMatrixError(f"pressure-block inner solve failed: {exc}")
    try:
        v = _f_factor(system).solve(r_u - system.Bt @ q)
    except SingularMatrixError as exc:
        raise SingularMatrixError(f"velocity-block inner solve failed: {exc}")
    return np.concatenate([v, q])


def solve_saddle_direct(system: SaddleSystem):
    """Monolithic sparse LU solve of the saddle system."""
    return sparse_lu(system.monolithic()).solve(system.rhs)


def solve_saddle_gmres(system: SaddleSystem, pcd, tol=1e-8, restart=200,
                       maxiter=1000):
    """PCD-preconditioned right GMRES solve; returns (x, iters, history)."""
    return gmres(
        system.matvec,
        system.rhs,
        precond=lambda r: apply_block_precond(system, pcd, r),
        tol=tol,
        restart=restart,
        maxiter=maxiter,
    )
