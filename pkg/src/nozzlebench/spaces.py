"""Taylor-Hood function spaces: dof maps, fields, and point evaluation.

Scalar Lagrange dofs are numbered vertices first, then unique-edge
nodes, then per-triangle interior nodes, giving a contiguous 0-based
range.  A velocity-pressure coefficient vector is laid out as
``[u_r | u_z | p]``.
"""

from dataclasses import dataclass

import numpy as np

from nozzlebench.elements import reference_element
from nozzlebench.errors import InvalidParameterError
from nozzlebench.meshing import AxisymMesh, barycentric, locate_point


@dataclass(frozen=True)
class DofMap:
    """Scalar Lagrange dof map of one degree on one mesh."""

    degree: int
    n_dofs: int
    cell_dofs: np.ndarray  # (nt, n_basis) global dof per local node
    dof_coords: np.ndarray  # (n_dofs, 2) (r, z) node positions
    edge_ids: dict  # sorted vertex pair -> unique edge index


def build_dof_map(mesh: AxisymMesh, k: int) -> DofMap:
    """Continuous Lagrange dof map; shared entities get shared dofs."""
    elem = reference_element(k)
    edges = mesh.unique_edges()
    edge_ids = {tuple(e): i for i, e in enumerate(map(tuple, edges))}
    nv = mesh.n_vertices
    ne = len(edges)
    nt = mesh.n_triangles
    per_edge = k - 1
    per_cell = (k - 1) * (k - 2) // 2
    n_dofs = nv + per_edge * ne + per_cell * nt

    nb = elem.n_basis
    cell_dofs = np.empty((nt, nb), dtype=np.int64)
    dof_coords = np.empty((n_dofs, 2))
    dof_coords[:nv] = mesh.vertices

    local_edges = ((0, 1), (1, 2), (2, 0))
    for t, tri in enumerate(mesh.triangles):
        cell_dofs[t, :3] = tri
        pos = 3
        for a, b in local_edges:
            ga, gb = int(tri[a]), int(tri[b])
            eid = edge_ids[(ga, gb) if ga < gb else (gb, ga)]
            base = nv + per_edge * eid
            # local edge nodes walk a -> b; global slots walk low -> high index
            slots = range(per_edge) if ga < gb else range(per_edge - 1, -1, -1)
            for m, s in enumerate(slots):
                g = base + s
                cell_dofs[t, pos + m] = g
                lam = (m + 1) / k
                dof_coords[g] = (1 - lam) * mesh.vertices[ga] + lam * mesh.vertices[gb]
            pos += per_edge
        base = nv + per_edge * ne + per_cell * t
        for m in range(per_cell):
            g = base + m
            cell_dofs[t, pos + m] = g
            x, y = elem.nodes[pos + m]
            p = mesh.triangle_coords(t)
            dof_coords[g] = (1 - x - y) * p[0] + x * p[1] + y * p[2]
        pos += per_cell
    return DofMap(degree=k, n_dofs=n_dofs, cell_dofs=cell_dofs,
                  dof_coords=dof_coords, edge_ids=edge_ids)


@dataclass(frozen=True)
class FunctionSpace:
    """Generalized Taylor-Hood pair P_{N+1} / P_N on an axisymmetric mesh."""

    mesh: AxisymMesh
    order: int  # N; velocity degree is N + 1
    velocity_map: DofMap
    pressure_map: DofMap

    @property
    def k_u(self):
        return self.order + 1

    @property
    def k_p(self):
        return self.order

    @property
    def n_scalar_u(self):
        return self.velocity_map.n_dofs

    @property
    def n_velocity(self):
        return 2 * self.velocity_map.n_dofs

    @property
    def n_pressure(self):
        return self.pressure_map.n_dofs

    @property
    def n_total(self):
        return self.n_velocity + self.n_pressure

    def boundary_scalar_dofs(self, tags):
        """Scalar velocity-space dofs lying on boundary edges with the
        given tag(s), sorted ascending."""
        if isinstance(tags, str):
            tags = (tags,)
        k = self.k_u
        dm = self.velocity_map
        nv = self.mesh.n_vertices
        per_edge = k - 1
        dofs = set()
        for (a, b), tag in zip(self.mesh.boundary_edges, self.mesh.boundary_tags):
            if tag not in tags:
                continue
            dofs.add(int(a))
            dofs.add(int(b))
            eid = dm.edge_ids[(a, b) if a < b else (b, a)]
            for s in range(per_edge):
                dofs.add(nv + per_edge * eid + s)
        return np.array(sorted(dofs), dtype=np.int64)

    def interpolate(self, u_r=None, u_z=None, p=None):
        """Field from callables of (r, z); missing components are zero."""
        coeffs = np.zeros(self.n_total)
        vc = self.velocity_map.dof_coords
        pc = self.pressure_map.dof_coords
        n = self.n_scalar_u
        if u_r is not None:
            coeffs[:n] = u_r(vc[:, 0], vc[:, 1])
        if u_z is not None:
            coeffs[n : 2 * n] = u_z(vc[:, 0], vc[:, 1])
        if p is not None:
            coeffs[2 * n :] = p(pc[:, 0], pc[:, 1])
        return Field(self, coeffs)


def function_space(mesh: AxisymMesh, order: int) -> FunctionSpace:
    if order not in (1, 2):
        raise InvalidParameterError("order N must be 1 or 2")
    return FunctionSpace(
        mesh=mesh,
        order=order,
        velocity_map=build_dof_map(mesh, order + 1),
        pressure_map=build_dof_map(mesh, order),
    )


@dataclass
class Field:
    """Coefficient vector (u_r block, u_z block, p block) on a space."""

    space: FunctionSpace
    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=float)
        if self.coeffs.shape != (self.space.n_total,):
            raise InvalidParameterError(
                f"coefficient vector length {self.coeffs.shape} does not match "
                f"space size {self.space.n_total}"
            )

    @property
    def u_r(self):
        return self.coeffs[: self.space.n_scalar_u]

    @property
    def u_z(self):
        return self.coeffs[self.space.n_scalar_u : self.space.n_velocity]

    @property
    def p(self):
        return self.coeffs[self.space.n_velocity :]

    @property
    def velocity(self):
        return self.coeffs[: self.space.n_velocity]


def evaluate_field(field: Field, point):
    """(u_r, u_z, p) at an (r, z) point inside the domain."""
    space = field.space
    t, lam = locate_point(space.mesh, point)
    vals_u, _ = reference_element(space.k_u).eval([lam[1:]])
    vals_p, _ = reference_element(space.k_p).eval([lam[1:]])
    udofs = space.velocity_map.cell_dofs[t]
    pdofs = space.pressure_map.cell_dofs[t]
    ur = float(vals_u[0] @ field.u_r[udofs])
    uz = float(vals_u[0] @ field.u_z[udofs])
    pv = float(vals_p[0] @ field.p[pdofs])
    return ur, uz, pv
