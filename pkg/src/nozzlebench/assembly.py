"""Vectorized assembly of the axisymmetric weak-form operator blocks.

All volume integrals carry the cylindrical measure r dr dz (the 2*pi
factor is omitted; flow-rate computations reinsert it).  The swirl-free
formulation adds the u_r*v_r / r^2 metric term to the viscous block and
couples nothing across the (u_r, u_z) components elsewhere, so vector
blocks are assembled as two copies of scalar kernels.

Quadrature exactness is 2*k_u + 2 throughout, absorbing the r weight
and the transport-field degree; assembly is chunked over elements and
independent of visitation order up to float addition roundoff.
"""

from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse as sp

from nozzlebench.elements import quadrature_rule, reference_element
from nozzlebench.errors import InvalidParameterError
from nozzlebench.spaces import Field, FunctionSpace

_CHUNK = 4096


def quadrature_exactness(space):
    return 2 * space.k_u + 2


def _cell_geometry(mesh):
    """Jacobian inverse-transpose (nt,2,2) and |det J| (nt,) per cell."""
    p = mesh.triangle_coords()
    J = np.stack([p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]], axis=-1)
    det = J[:, 0, 0] * J[:, 1, 1] - J[:, 0, 1] * J[:, 1, 0]
    inv = np.empty_like(J)
    inv[:, 0, 0] = J[:, 1, 1]
    inv[:, 0, 1] = -J[:, 0, 1]
    inv[:, 1, 0] = -J[:, 1, 0]
    inv[:, 1, 1] = J[:, 0, 0]
    inv /= det[:, None, None]
    invT = np.swapaxes(inv, 1, 2)
    return invT, np.abs(det), p


class _ElementData:
    """Per-space tabulated basis data at the quadrature points."""

    def __init__(self, space: FunctionSpace, exactness=None):
        self.space = space
        self.rule = quadrature_rule(exactness or quadrature_exactness(space))
        xy = self.rule.xy
        self.vals_u, self.grads_u = reference_element(space.k_u).eval(xy)
        self.vals_p, self.grads_p = reference_element(space.k_p).eval(xy)
        self.lam = self.rule.points  # (nq, 3) barycentric for coordinates
        self.invT, self.det, self.coords = _cell_geometry(space.mesh)

    def chunks(self):
        nt = self.space.mesh.n_triangles
        for s in range(0, nt, _CHUNK):
            yield slice(s, min(s + _CHUNK, nt))

    def rz(self, sl):
        """Quadrature-point coordinates (e, q) for r and z."""
        p = self.coords[sl]
        r = np.einsum("qv,ev->eq", self.lam, p[:, :, 0])
        z = np.einsum("qv,ev->eq", self.lam, p[:, :, 1])
        return r, z

    def phys_grads(self, sl, which):
        g = self.grads_u if which == "u" else self.grads_p
        return np.einsum("edk,qbk->eqbd", self.invT[sl], g)


def _scatter(triplets_list, shape):
    rows = np.concatenate([t[0] for t in triplets_list])
    cols = np.concatenate([t[1] for t in triplets_list])
    vals = np.concatenate([t[2] for t in triplets_list])
    m = sp.coo_matrix((vals, (rows, cols)), shape=shape)
    return m.tocsr()


def _cell_triplets(dofs_rows, dofs_cols, elem_mats):
    e, a, b = elem_mats.shape
    rows = np.repeat(dofs_rows, b, axis=1).reshape(e, a, b)
    cols = np.repeat(dofs_cols[:, None, :], a, axis=1)
    return rows.ravel(), cols.ravel(), elem_mats.ravel()


def _two_blocks(m, n_scalar):
    """Block-diagonal [[m, 0], [0, m]] over the (u_r, u_z) layout."""
    return sp.block_diag([m, m], format="csr")


def assemble_scalar_stiffness(space, data=None, which="u"):
    """integral grad(phi_a) . grad(phi_b) r dr dz on one scalar space."""
    data = data or _ElementData(space)
    dm = space.velocity_map if which == "u" else space.pressure_map
    n = dm.n_dofs
    w = data.rule.weights
    out = []
    for sl in data.chunks():
        r, _ = data.rz(sl)
        g = data.phys_grads(sl, which)
        weight = w[None, :] * data.det[sl][:, None] * r
        ke = np.einsum("eq,eqad,eqbd->eab", weight, g, g)
        out.append(_cell_triplets(dm.cell_dofs[sl], dm.cell_dofs[sl], ke))
    return _scatter(out, (n, n))


def assemble_scalar_mass(space, data=None, which="u", weight_fn=None):
    """integral phi_a phi_b r dr dz (optionally extra weight w(r, z))."""
    data = data or _ElementData(space)
    dm = space.velocity_map if which == "u" else space.pressure_map
    vals = data.vals_u if which == "u" else data.vals_p
    n = dm.n_dofs
    w = data.rule.weights
    out = []
    for sl in data.chunks():
        r, z = data.rz(sl)
        weight = w[None, :] * data.det[sl][:, None] * r
        if weight_fn is not None:
            weight = weight * weight_fn(r, z)
        me = np.einsum("eq,qa,qb->eab", weight, vals, vals)
        out.append(_cell_triplets(dm.cell_dofs[sl], dm.cell_dofs[sl], me))
    return _scatter(out, (n, n))


def assemble_viscous_block(space: FunctionSpace, mu):
    """Vector viscous operator: mu [grad u : grad v + u_r v_r / r^2] r dr dz.

    Quadrature points are strictly interior, so the 1/r term stays
    finite on axis-touching elements; rows of constrained axis dofs are
    eliminated downstream.
    """
    if mu <= 0:
        raise InvalidParameterError("mu must be strictly positive")
    data = _ElementData(space)
    k = assemble_scalar_stiffness(space, data)
    # u_r v_r / r^2 with measure r dr dz -> extra weight 1/r^2
    mr2 = assemble_scalar_mass(space, data, weight_fn=lambda r, z: 1.0 / r**2)
    return mu * sp.block_diag([k + mr2, k], format="csr")


def assemble_divergence_block(space: FunctionSpace):
    """B (n_p x 2 n_u): -integral q [d(r u_r)/dr + r du_z/dz] dr dz."""
    data = _ElementData(space)
    dmu, dmp = space.velocity_map, space.pressure_map
    w = data.rule.weights
    out_r, out_z = [], []
    for sl in data.chunks():
        r, _ = data.rz(sl)
        g = data.phys_grads(sl, "u")
        wdet = w[None, :] * data.det[sl][:, None]
        # d(r u_r)/dr = r du_r/dr + u_r
        term_r = r[:, :, None] * g[:, :, :, 0] + data.vals_u[None, :, :]
        br = -np.einsum("eq,qa,eqb->eab", wdet, data.vals_p, term_r)
        bz = -np.einsum("eq,qa,eqb->eab", wdet * r, data.vals_p, g[:, :, :, 1])
        out_r.append(_cell_triplets(dmp.cell_dofs[sl], dmu.cell_dofs[sl], br))
        out_z.append(_cell_triplets(dmp.cell_dofs[sl], dmu.cell_dofs[sl], bz))
    n_p, n_u = dmp.n_dofs, dmu.n_dofs
    return sp.hstack(
        [_scatter(out_r, (n_p, n_u)), _scatter(out_z, (n_p, n_u))], format="csr"
    )


def assemble_mass(space: FunctionSpace, which="velocity", rho=1.0):
    """Mass matrix: rho-scaled vector velocity mass or unit pressure mass."""
    if which == "velocity":
        if rho <= 0:
            raise InvalidParameterError("rho must be strictly positive")
        m = assemble_scalar_mass(space, which="u")
        return rho * sp.block_diag([m, m], format="csr")
    if which == "pressure":
        return assemble_scalar_mass(space, which="p")
    raise InvalidParameterError(f"unknown mass kind {which!r}")


def assemble_convection(space: FunctionSpace, w: Field, rho=1.0):
    """Linearized transport rho ((w . grad) u, v) r dr dz, block diagonal."""
    if w.space is not space:
        raise InvalidParameterError("transport field lives on a different space")
    data = _ElementData(space)
    dm = space.velocity_map
    wq = data.rule.weights
    out = []
    for sl in data.chunks():
        r, _ = data.rz(sl)
        g = data.phys_grads(sl, "u")
        dofs = dm.cell_dofs[sl]
        wr_q = np.einsum("qb,eb->eq", data.vals_u, w.u_r[dofs])
        wz_q = np.einsum("qb,eb->eq", data.vals_u, w.u_z[dofs])
        weight = wq[None, :] * data.det[sl][:, None] * r
        adv = wr_q[:, :, None] * g[:, :, :, 0] + wz_q[:, :, None] * g[:, :, :, 1]
        ce = rho * np.einsum("eq,qa,eqb->eab", weight, data.vals_u, adv)
        out.append(_cell_triplets(dofs, dofs, ce))
    n = dm.n_dofs
    c = _scatter(out, (n, n))
    return sp.block_diag([c, c], format="csr")


def assemble_pressure_stiffness(space: FunctionSpace):
    """Pressure-space Laplacian integral grad p . grad q r dr dz."""
    return assemble_scalar_stiffness(space, which="p")


def assemble_pressure_convection(space: FunctionSpace, w: Field, rho=1.0):
    """Pressure-space transport rho (w . grad p, q) r dr dz (for PCD)."""
    data = _ElementData(space)
    dmp, dmu = space.pressure_map, space.velocity_map
    wq = data.rule.weights
    out = []
    for sl in data.chunks():
        r, _ = data.rz(sl)
        g = data.phys_grads(sl, "p")
        udofs = dmu.cell_dofs[sl]
        wr_q = np.einsum("qb,eb->eq", data.vals_u, w.u_r[udofs])
        wz_q = np.einsum("qb,eb->eq", data.vals_u, w.u_z[udofs])
        weight = wq[None, :] * data.det[sl][:, None] * r
        adv = wr_q[:, :, None] * g[:, :, :, 0] + wz_q[:, :, None] * g[:, :, :, 1]
        ce = rho * np.einsum("eq,qa,eqb->eab", weight, data.vals_p, adv)
        out.append(_cell_triplets(dmp.cell_dofs[sl], dmp.cell_dofs[sl], ce))
    n = dmp.n_dofs
    return _scatter(out, (n, n))


def assemble_forcing(space: FunctionSpace, f_r=None, f_z=None):
    """Load vector (f, v) r dr dz for callables f_r(r, z), f_z(r, z)."""
    data = _ElementData(space)
    dm = space.velocity_map
    n = dm.n_dofs
    rhs = np.zeros(2 * n)
    wq = data.rule.weights
    for sl in data.chunks():
        r, z = data.rz(sl)
        weight = wq[None, :] * data.det[sl][:, None] * r
        dofs = dm.cell_dofs[sl]
        for off, f in ((0, f_r), (n, f_z)):
            if f is None:
                continue
            fe = np.einsum("eq,qa->ea", weight * f(r, z), data.vals_u)
            np.add.at(rhs, off + dofs.ravel(), fe.ravel())
    return rhs


def _boundary_edge_elements(mesh):
    """Map each boundary edge to (triangle, local edge index)."""
    local_edges = ((0, 1), (1, 2), (2, 0))
    lookup = {}
    for t, tri in enumerate(mesh.triangles):
        for le, (a, b) in enumerate(local_edges):
            key = tuple(sorted((int(tri[a]), int(tri[b]))))
            lookup[key] = (t, le)
    out = []
    for a, b in mesh.boundary_edges:
        out.append(lookup[tuple(sorted((int(a), int(b))))])
    return out


def assemble_pressure_boundary_mass(space: FunctionSpace, w: Field, rho, tag):
    """Robin-type boundary term integral_Gamma rho (w . n) p q r ds."""
    from scipy.special import roots_legendre

    mesh = space.mesh
    dmp, dmu = space.pressure_map, space.velocity_map
    n_p = dmp.n_dofs
    xg, wg = roots_legendre(space.k_u + 2)
    xg = 0.5 * (xg + 1.0)
    wg = 0.5 * wg
    elem_p = reference_element(space.k_p)
    elem_u = reference_element(space.k_u)
    local_edges = ((0, 1), (1, 2), (2, 0))
    ref_verts = np.array([(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)])

    rows, cols, vals = [], [], []
    edge_elems = _boundary_edge_elements(mesh)
    for (a, b), etag, (t, le) in zip(
        mesh.boundary_edges, mesh.boundary_tags, edge_elems
    ):
        if etag != tag:
            continue
        tri = mesh.triangles[t]
        # walk the edge from vertex a to b in reference coordinates
        la = list(tri).index(a)
        lb = list(tri).index(b)
        ref_pts = np.outer(1 - xg, ref_verts[la]) + np.outer(xg, ref_verts[lb])
        vp, _ = elem_p.eval(ref_pts)
        vu, _ = elem_u.eval(ref_pts)
        pa, pb = mesh.vertices[a], mesh.vertices[b]
        dvec = pb - pa
        ds = np.hypot(*dvec)
        # outward normal: rotate the tangent; boundary edges wind so the
        # domain lies left when walking a -> b within the adjacent triangle
        c = mesh.vertices[tri[3 - la - lb]]  # opposite vertex
        nvec = np.array([dvec[1], -dvec[0]]) / ds
        if nvec @ (c - pa) > 0:
            nvec = -nvec
        rpts = (1 - xg) * pa[0] + xg * pb[0]
        udofs = dmu.cell_dofs[t]
        wn = (vu @ w.u_r[udofs]) * nvec[0] + (vu @ w.u_z[udofs]) * nvec[1]
        pdofs = dmp.cell_dofs[t]
        me = rho * np.einsum("q,qa,qb->ab", wg * ds * rpts * wn, vp, vp)
        rows.append(np.repeat(pdofs, len(pdofs)))
        cols.append(np.tile(pdofs, len(pdofs)))
        vals.append(me.ravel())
    if not rows:
        return sp.csr_matrix((n_p, n_p))
    return sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n_p, n_p),
    ).tocsr()


@dataclass
class SaddleSystem:
    """Block system [[F, Bt], [B, C]] (u, p) = (f, g).

    C is zero for the plain saddle problem; Dirichlet elimination and
    pressure pinning write into it.
    """

    F: sp.csr_matrix
    B: sp.csr_matrix
    Bt: sp.csr_matrix
    f: np.ndarray
    g: np.ndarray
    C: sp.csr_matrix = None

    def __post_init__(self):
        if self.C is None:
            self.C = sp.csr_matrix((self.B.shape[0], self.B.shape[0]))

    @property
    def n_velocity(self):
        return self.F.shape[0]

    @property
    def n_pressure(self):
        return self.B.shape[0]

    @property
    def rhs(self):
        return np.concatenate([self.f, self.g])

    def monolithic(self):
        return sp.bmat([[self.F, self.Bt], [self.B, self.C]], format="csr")

    def matvec(self, x):
        u, p = x[: self.n_velocity], x[self.n_velocity :]
        return np.concatenate(
            [self.F @ u + self.Bt @ p, self.B @ u + self.C @ p]
        )


def saddle_system(F, B, f=None, g=None):
    nu, np_ = B.shape[1], B.shape[0]
    return SaddleSystem(
        F=F.tocsr(),
        B=B.tocsr(),
        Bt=B.T.tocsr(),
        f=np.zeros(nu) if f is None else np.asarray(f, dtype=float),
        g=np.zeros(np_) if g is None else np.asarray(g, dtype=float),
    )


def _normalize_constraints(constraints, n_total):
    if hasattr(constraints, "items"):
        items = constraints.items()
    else:
        items = list(constraints)
    out = {}
    for dof, value in items:
        dof = int(dof)
        if dof < 0 or dof >= n_total:
            raise InvalidParameterError(f"constrained dof {dof} out of range")
        if dof in out and out[dof] != value:
            raise InvalidParameterError(
                f"conflicting constraints on dof {dof}: {out[dof]} vs {value}"
            )
        out[dof] = float(value)
    return out


def apply_dirichlet(system: SaddleSystem, constraints) -> SaddleSystem:
    """Symmetric row/column elimination of prescribed dof values.

    Constrained rows become identity rows with the prescribed value on
    the right-hand side; column contributions move to the right-hand
    side, preserving block symmetry.  Dofs >= n_velocity address
    pressure unknowns (pinning).  An empty constraint map returns the
    system unchanged.
    """
    nu, npr = system.n_velocity, system.n_pressure
    cmap = _normalize_constraints(constraints, nu + npr)
    if not cmap:
        return system
    dofs = np.fromiter(cmap.keys(), dtype=np.int64)
    values = np.fromiter(cmap.values(), dtype=float)
    cu = dofs[dofs < nu]
    vu = values[dofs < nu]
    cp = dofs[dofs >= nu] - nu
    vp = values[dofs >= nu]

    xu = np.zeros(nu)
    xu[cu] = vu
    xp = np.zeros(npr)
    xp[cp] = vp

    f = system.f - system.F @ xu - system.Bt @ xp
    g = system.g - system.B @ xu - system.C @ xp

    keep_u = np.ones(nu)
    keep_u[cu] = 0.0
    keep_p = np.ones(npr)
    keep_p[cp] = 0.0
    Du = sp.diags(keep_u)
    Dp = sp.diags(keep_p)

    pin_u = sp.diags(1.0 - keep_u)
    pin_p = sp.diags(1.0 - keep_p)
    F = (Du @ system.F @ Du + pin_u).tocsr()
    Bt = (Du @ system.Bt @ Dp).tocsr()
    B = (Dp @ system.B @ Du).tocsr()
    C = (Dp @ system.C @ Dp + pin_p).tocsr()
    f[cu] = vu
    g[cp] = vp
    return SaddleSystem(F=F, B=B, Bt=Bt, f=f, g=g, C=C)
