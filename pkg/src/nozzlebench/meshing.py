"""Graded triangular meshes of the axisymmetric (r, z) half-domain.

The generator is a structured advancing-column scheme: radial node lines
follow fixed fractions of the local wall radius upstream of the sudden
expansion, and a fixed radial ladder downstream, so the two blocks share
their interface nodes and the mesh stays conforming across the step.
Quads are split into positively oriented triangles and a 20-degree
minimum-angle floor is enforced after generation.

Meshes are immutable after generation and safe to share across threads.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from nozzlebench.errors import (
    InvalidParameterError,
    MeshingFailureError,
    ParseError,
    PointNotFoundError,
)
from nozzlebench.geometry import REGION_NAMES, NozzleProfile

BOUNDARY_TAGS = ("inlet", "wall", "outlet", "axis")
SIZING_KEYS = ("inlet", "convergent", "throat", "expansion")

MIN_ANGLE_DEG = 20.0
#: max leg-length ratio of a right-triangle cell compatible with the angle floor
_MAX_ASPECT = 1.0 / math.tan(math.radians(MIN_ANGLE_DEG + 1.0))


@dataclass(frozen=True)
class AxisymMesh:
    """Conforming triangulation of the meridian half-domain.

    vertices      : (nv, 2) float array of (r, z) coordinates
    triangles     : (nt, 3) int array, positively oriented
    boundary_edges: (nb, 2) int array
    boundary_tags : (nb,) array of tag strings
    region_ids    : (nt,) int array indexing REGION_NAMES
    """

    vertices: np.ndarray
    triangles: np.ndarray
    boundary_edges: np.ndarray
    boundary_tags: np.ndarray
    region_ids: np.ndarray
    _tree: object = field(default=None, repr=False, compare=False)

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_triangles(self):
        return len(self.triangles)

    def triangle_coords(self, t=None):
        """(nt, 3, 2) vertex coordinates of triangles (or one triangle)."""
        if t is None:
            return self.vertices[self.triangles]
        return self.vertices[self.triangles[t]]

    def signed_areas(self):
        p = self.triangle_coords()
        d1 = p[:, 1] - p[:, 0]
        d2 = p[:, 2] - p[:, 0]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    def unique_edges(self):
        """(ne, 2) sorted vertex pairs, each edge once."""
        t = self.triangles
        e = np.vstack([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
        e.sort(axis=1)
        return np.unique(e, axis=0)

    def edge_lengths(self, edges):
        d = self.vertices[edges[:, 1]] - self.vertices[edges[:, 0]]
        return np.hypot(d[:, 0], d[:, 1])

    def boundary_edges_of(self, tag):
        return self.boundary_edges[self.boundary_tags == tag]

    def centroid_tree(self):
        if self._tree is None:
            centroids = self.triangle_coords().mean(axis=1)
            object.__setattr__(self, "_tree", cKDTree(centroids))
        return self._tree


@dataclass(frozen=True)
class MeshStats:
    """Edge-length statistics over the unique edge set."""

    h_min: float
    h_max: float
    h_avg: float
    n_elt: int
    n_vertices: int


def _make_mesh(vertices, triangles, boundary_edges, boundary_tags, region_ids):
    vertices = np.asarray(vertices, dtype=float)
    triangles = np.asarray(triangles, dtype=np.int64)
    boundary_edges = np.asarray(boundary_edges, dtype=np.int64).reshape(-1, 2)
    boundary_tags = np.asarray(boundary_tags, dtype=object)
    region_ids = np.asarray(region_ids, dtype=np.int64)
    # enforce positive orientation
    p = vertices[triangles]
    d1 = p[:, 1] - p[:, 0]
    d2 = p[:, 2] - p[:, 0]
    areas = 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])
    flip = areas < 0
    triangles[flip] = triangles[flip][:, [0, 2, 1]]
    return AxisymMesh(vertices, triangles, boundary_edges, boundary_tags, region_ids)


def _min_angle_deg(mesh):
    p = mesh.triangle_coords()
    worst = 90.0
    worst_t = 0
    for k in range(3):
        a = p[:, (k + 1) % 3] - p[:, k]
        b = p[:, (k + 2) % 3] - p[:, k]
        cosv = (a * b).sum(axis=1) / (
            np.linalg.norm(a, axis=1) * np.linalg.norm(b, axis=1)
        )
        ang = np.degrees(np.arccos(np.clip(cosv, -1.0, 1.0)))
        i = int(np.argmin(ang))
        if ang[i] < worst:
            worst, worst_t = float(ang[i]), i
    return worst, worst_t


def _structured_grid_mesh(z_cols, r_nodes, region_of_cell):
    """Triangulate a logically rectangular grid.

    z_cols  : (nz+1,) axial column coordinates
    r_nodes : (nz+1, nr+1) radial node positions per column
    Returns vertices, triangles, region ids and the vertex index grid.
    """
    nzp, nrp = r_nodes.shape
    idx = np.arange(nzp * nrp).reshape(nzp, nrp)
    rr = r_nodes.ravel()
    zz = np.repeat(z_cols, nrp)
    vertices = np.column_stack([rr, zz])

    tris = []
    regions = []
    for i in range(nzp - 1):
        reg = region_of_cell(i)
        for j in range(nrp - 1):
            a, b = idx[i, j], idx[i + 1, j]
            c, d = idx[i + 1, j + 1], idx[i, j + 1]
            tris.append((a, b, c))
            tris.append((a, c, d))
            regions.extend((reg, reg))
    return vertices, np.array(tris), np.array(regions), idx


def _cells(length, h):
    return max(1, int(math.ceil(length / h - 1e-9)))


def _column_dz(h_reg, dr_min, dr_max):
    """Axial step keeping cells within the sizing and aspect limits."""
    dz = min(h_reg, _MAX_ASPECT * dr_min)
    dz = max(dz, dr_max / _MAX_ASPECT)
    return dz


def generate_rect_mesh(r0, r1, z0, z1, h):
    """Structured triangulation of the rectangle [r0, r1] x [z0, z1].

    Edges at z = z0 are tagged inlet, at z = z1 outlet, at r = r1 wall,
    and at r = r0 axis when r0 = 0 (wall otherwise).  Used for pipe
    cases and rectangle sanity checks; region id 0 everywhere.
    """
    if h <= 0:
        raise InvalidParameterError("h must be positive")
    if not (r1 > r0 >= 0.0 and z1 > z0):
        raise InvalidParameterError("degenerate rectangle")
    n_r = _cells(r1 - r0, h)
    n_z = _cells(z1 - z0, h)
    # keep aspect ratio within the angle floor
    dr = (r1 - r0) / n_r
    dz = (z1 - z0) / n_z
    if dz / dr > _MAX_ASPECT:
        n_z = _cells((z1 - z0), dr * _MAX_ASPECT)
    elif dr / dz > _MAX_ASPECT:
        n_r = _cells((r1 - r0), dz * _MAX_ASPECT)
    z_cols = np.linspace(z0, z1, n_z + 1)
    r_line = np.linspace(r0, r1, n_r + 1)
    r_nodes = np.tile(r_line, (n_z + 1, 1))
    vertices, tris, regions, idx = _structured_grid_mesh(z_cols, r_nodes, lambda i: 0)
    bedges = []
    btags = []
    axis_tag = "axis" if abs(r0) < 1e-12 else "wall"
    for j in range(n_r):
        bedges.append((idx[0, j], idx[0, j + 1]))
        btags.append("inlet")
        bedges.append((idx[-1, j], idx[-1, j + 1]))
        btags.append("outlet")
    for i in range(n_z):
        bedges.append((idx[i, 0], idx[i + 1, 0]))
        btags.append(axis_tag)
        bedges.append((idx[i, -1], idx[i + 1, -1]))
        btags.append("wall")
    return _make_mesh(vertices, tris, bedges, btags, regions)


def generate_pipe_mesh(radius, length, h, z0=0.0):
    """Straight-pipe half-domain: r in [0, radius], z in [z0, z0+length]."""
    return generate_rect_mesh(0.0, radius, z0, z0 + length, h)


def _sizing_dict(sizing):
    if np.isscalar(sizing):
        return {k: float(sizing) for k in SIZING_KEYS}
    unknown = set(sizing) - set(SIZING_KEYS)
    if unknown:
        raise InvalidParameterError(f"unknown sizing regions: {sorted(unknown)}")
    missing = set(SIZING_KEYS) - set(sizing)
    if missing:
        raise InvalidParameterError(f"missing sizing regions: {sorted(missing)}")
    return {k: float(sizing[k]) for k in SIZING_KEYS}


def generate_axisym_mesh(profile: NozzleProfile, sizing):
    """Generate the graded, conforming nozzle mesh.

    ``sizing`` is a target edge length in meters, either one float for
    all regions or a dict with keys inlet / convergent / throat /
    expansion.  Every triangle's longest edge stays below twice its
    region's target and the minimum angle stays above 20 degrees.
    """
    hs = _sizing_dict(sizing)
    ri, rt = profile.inlet_radius, profile.throat_radius
    extents = {"inlet": ri, "convergent": rt, "throat": rt, "expansion": ri}
    for reg, h in hs.items():
        if h <= 0:
            raise InvalidParameterError(f"sizing for {reg} must be positive")
        if h >= extents[reg]:
            raise MeshingFailureError(
                f"target h = {h} exceeds the radial extent {extents[reg]} "
                f"of region {reg!r}",
                region=reg,
            )

    zb = profile.z_breaks

    # Upstream block (inlet + convergent + throat): radial lines at fixed
    # fractions of the local wall radius so columns stay conforming.
    n_r = max(
        2,
        _cells(ri, hs["inlet"]),
        _cells(ri, hs["convergent"]),
        _cells(rt, hs["throat"]),
    )
    fracs = np.arange(n_r + 1) / n_r

    z_cols = [zb[0]]
    cell_region = []
    for reg_idx, (reg, za, zend) in enumerate(
        [("inlet", zb[0], zb[1]), ("convergent", zb[1], zb[2]), ("throat", zb[2], zb[3])]
    ):
        r_hi = ri if reg == "inlet" else (ri if reg == "convergent" else rt)
        r_lo = rt if reg in ("convergent", "throat") else ri
        dr_min = min(r_hi, r_lo) / n_r
        dr_max = max(r_hi, r_lo) / n_r
        dz = _column_dz(hs[reg], dr_min, dr_max)
        n = _cells(zend - za, dz)
        z_cols.extend(np.linspace(za, zend, n + 1)[1:])
        cell_region.extend([reg_idx] * n)
    z_cols = np.array(z_cols)
    wall_r = np.array([profile.radius(z, side="inner") for z in z_cols])
    r_nodes_a = np.outer(wall_r, fracs)

    verts_a, tris_a, regions_a, idx_a = _structured_grid_mesh(
        z_cols, r_nodes_a, lambda i: cell_region[i]
    )

    # Downstream block: core radial ladder matches the throat interface
    # nodes exactly, extended by a coarser ladder up to the outer wall.
    n_up = _cells(ri - rt, hs["expansion"])
    r_line_b = np.concatenate([fracs * rt, rt + (ri - rt) * np.arange(1, n_up + 1) / n_up])
    dr_min_b = min(np.diff(r_line_b))
    dr_max_b = max(np.diff(r_line_b))
    dz_b = _column_dz(hs["expansion"], dr_min_b, dr_max_b)
    n_out = _cells(zb[4] - zb[3], dz_b)
    z_cols_b = np.linspace(zb[3], zb[4], n_out + 1)
    r_nodes_b = np.tile(r_line_b, (n_out + 1, 1))

    verts_b, tris_b, regions_b, idx_b = _structured_grid_mesh(
        z_cols_b, r_nodes_b, lambda i: 3
    )

    # Merge: block B column 0, rows 0..n_r coincide with block A's last column.
    n_a = len(verts_a)
    remap = np.full(len(verts_b), -1, dtype=np.int64)
    keep = np.ones(len(verts_b), dtype=bool)
    for j in range(n_r + 1):
        remap[idx_b[0, j]] = idx_a[-1, j]
        keep[idx_b[0, j]] = False
    remap[keep] = n_a + np.arange(int(keep.sum()))
    vertices = np.vstack([verts_a, verts_b[keep]])
    tris_b = remap[tris_b]
    idx_b_g = remap[idx_b]
    triangles = np.vstack([tris_a, tris_b])
    regions = np.concatenate([regions_a, regions_b])

    bedges = []
    btags = []
    for j in range(n_r):  # inlet plane
        bedges.append((idx_a[0, j], idx_a[0, j + 1]))
        btags.append("inlet")
    for i in range(len(z_cols) - 1):  # axis + profile wall, upstream
        bedges.append((idx_a[i, 0], idx_a[i + 1, 0]))
        btags.append("axis")
        bedges.append((idx_a[i, -1], idx_a[i + 1, -1]))
        btags.append("wall")
    for j in range(n_r, len(r_line_b) - 1):  # sudden-expansion step
        bedges.append((idx_b_g[0, j], idx_b_g[0, j + 1]))
        btags.append("wall")
    for i in range(n_out):  # axis + outer wall, downstream
        bedges.append((idx_b_g[i, 0], idx_b_g[i + 1, 0]))
        btags.append("axis")
        bedges.append((idx_b_g[i, -1], idx_b_g[i + 1, -1]))
        btags.append("wall")
    for j in range(len(r_line_b) - 1):  # outlet plane
        bedges.append((idx_b_g[-1, j], idx_b_g[-1, j + 1]))
        btags.append("outlet")

    mesh = _make_mesh(vertices, triangles, bedges, btags, regions)

    worst, worst_t = _min_angle_deg(mesh)
    if worst < MIN_ANGLE_DEG - 1e-9:
        reg = REGION_NAMES[mesh.region_ids[worst_t]]
        raise MeshingFailureError(
            f"minimum angle {worst:.2f} deg below the {MIN_ANGLE_DEG} deg floor "
            f"in region {reg!r}; refine the sizing",
            region=reg,
        )
    # longest-edge bound per region
    p = mesh.triangle_coords()
    emax = np.max(
        [np.linalg.norm(p[:, (k + 1) % 3] - p[:, k], axis=1) for k in range(3)], axis=0
    )
    limits = np.array([hs["inlet"], hs["convergent"], hs["throat"], hs["expansion"]])
    bad = emax > 2.0 * limits[mesh.region_ids] + 1e-12
    if np.any(bad):
        t = int(np.argmax(bad))
        reg = REGION_NAMES[mesh.region_ids[t]]
        raise MeshingFailureError(
            f"edge length exceeds twice the target in region {reg!r}", region=reg
        )
    return mesh


def refine_uniform(mesh: AxisymMesh) -> AxisymMesh:
    """Red refinement: split every triangle into 4 congruent children."""
    edges = mesh.unique_edges()
    edge_id = {tuple(e): i for i, e in enumerate(map(tuple, edges))}
    mids = 0.5 * (mesh.vertices[edges[:, 0]] + mesh.vertices[edges[:, 1]])
    nv = mesh.n_vertices
    vertices = np.vstack([mesh.vertices, mids])

    def mid(a, b):
        return nv + edge_id[(a, b) if a < b else (b, a)]

    tris = []
    regions = []
    for (a, b, c), reg in zip(mesh.triangles, mesh.region_ids):
        ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
        tris.extend([(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)])
        regions.extend([reg] * 4)

    bedges = []
    btags = []
    for (a, b), tag in zip(mesh.boundary_edges, mesh.boundary_tags):
        m = mid(a, b)
        bedges.extend([(a, m), (m, b)])
        btags.extend([tag, tag])
    return _make_mesh(vertices, np.array(tris), bedges, btags, np.array(regions))


def mesh_stats(mesh: AxisymMesh) -> MeshStats:
    """Edge-length statistics over unique edges plus entity counts."""
    if mesh.n_triangles == 0:
        raise InvalidParameterError("empty mesh")
    lengths = mesh.edge_lengths(mesh.unique_edges())
    return MeshStats(
        h_min=float(lengths.min()),
        h_max=float(lengths.max()),
        h_avg=float(lengths.mean()),
        n_elt=mesh.n_triangles,
        n_vertices=mesh.n_vertices,
    )


def barycentric(mesh, t, point):
    """Barycentric coordinates of (r, z) in triangle t."""
    p = mesh.triangle_coords(t)
    T = np.column_stack([p[1] - p[0], p[2] - p[0]])
    lam12 = np.linalg.solve(T, np.asarray(point, dtype=float) - p[0])
    return np.array([1.0 - lam12.sum(), lam12[0], lam12[1]])


def locate_point(mesh: AxisymMesh, point, tol=1e-10):
    """Find the triangle containing (r, z); returns (triangle id, barycentric).

    Points on edges/vertices resolve to one of the adjacent triangles.
    Raises PointNotFoundError when the point lies outside the closure.
    """
    point = np.asarray(point, dtype=float)
    scale = max(1.0, np.abs(mesh.vertices).max())
    tree = mesh.centroid_tree()
    k = min(32, mesh.n_triangles)
    _, cand = tree.query(point, k=k)
    cand = np.atleast_1d(cand)
    best = None
    best_neg = np.inf
    for t in cand:
        lam = barycentric(mesh, int(t), point)
        neg = -min(lam.min(), 0.0)
        if neg < best_neg:
            best, best_neg = (int(t), lam), neg
        if neg == 0.0:
            break
    if best_neg > tol / scale:
        # fall back to an exhaustive scan before giving up
        for t in range(mesh.n_triangles):
            lam = barycentric(mesh, t, point)
            neg = -min(lam.min(), 0.0)
            if neg < best_neg:
                best, best_neg = (t, lam), neg
            if neg == 0.0:
                break
    if best_neg > tol / scale:
        raise PointNotFoundError(f"point {tuple(point)} outside the mesh")
    t, lam = best
    return t, lam


def save_mesh(mesh: AxisymMesh, path):
    """Write the plain-text v1 mesh format (deterministic ordering)."""
    with open(path, "w") as f:
        f.write("axisym-mesh v1\n")
        f.write(f"{mesh.n_vertices}\n")
        for r, z in mesh.vertices:
            f.write(f"{r:.17g} {z:.17g}\n")
        f.write(f"{mesh.n_triangles}\n")
        for (a, b, c), reg in zip(mesh.triangles, mesh.region_ids):
            f.write(f"{a} {b} {c} {reg}\n")
        f.write(f"{len(mesh.boundary_edges)}\n")
        for (a, b), tag in zip(mesh.boundary_edges, mesh.boundary_tags):
            f.write(f"{a} {b} {tag}\n")


def load_mesh(path) -> AxisymMesh:
    """Read the plain-text v1 mesh format."""
    with open(path) as f:
        lines = f.read().splitlines()
    it = iter(enumerate(lines, start=1))

    def next_line():
        try:
            return next(it)
        except StopIteration:
            raise ParseError("unexpected end of mesh file", line=len(lines))

    ln, header = next_line()
    if header.strip() != "axisym-mesh v1":
        raise ParseError(f"bad mesh header {header!r}", line=ln)
    try:
        _, n = next_line()
        nv = int(n)
        vertices = np.empty((nv, 2))
        for i in range(nv):
            ln, s = next_line()
            vertices[i] = [float(x) for x in s.split()]
        _, n = next_line()
        nt = int(n)
        triangles = np.empty((nt, 3), dtype=np.int64)
        regions = np.empty(nt, dtype=np.int64)
        for i in range(nt):
            ln, s = next_line()
            a, b, c, reg = (int(x) for x in s.split())
            triangles[i] = (a, b, c)
            regions[i] = reg
        _, n = next_line()
        nb = int(n)
        bedges = np.empty((nb, 2), dtype=np.int64)
        btags = []
        for i in range(nb):
            ln, s = next_line()
            a, b, tag = s.split()
            bedges[i] = (int(a), int(b))
            btags.append(tag)
    except (ValueError, IndexError) as exc:
        raise ParseError(f"malformed mesh line: {exc}", line=ln)
    return _make_mesh(vertices, triangles, bedges, btags, regions)
