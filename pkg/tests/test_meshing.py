import numpy as np
import pytest

from nozzlebench.errors import (
    InvalidParameterError,
    MeshingFailureError,
    ParseError,
    PointNotFoundError,
)
from nozzlebench.meshing import (
    barycentric,
    generate_axisym_mesh,
    generate_pipe_mesh,
    generate_rect_mesh,
    load_mesh,
    locate_point,
    mesh_stats,
    refine_uniform,
    save_mesh,
)

from conftest import COARSE_SIZING


def _triangle_areas(mesh):
    v = mesh.vertices[mesh.triangles]
    a = v[:, 1] - v[:, 0]
    b = v[:, 2] - v[:, 0]
    return 0.5 * np.abs(a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0])


def _min_angles(mesh):
    v = mesh.vertices[mesh.triangles]
    angles = []
    for i in range(3):
        a = v[:, (i + 1) % 3] - v[:, i]
        b = v[:, (i + 2) % 3] - v[:, i]
        cosang = (a * b).sum(axis=1) / (
            np.linalg.norm(a, axis=1) * np.linalg.norm(b, axis=1)
        )
        angles.append(np.degrees(np.arccos(np.clip(cosang, -1, 1))))
    return np.min(angles, axis=0)


def test_rect_mesh_tags_and_counts(unit_square_mesh):
    m = unit_square_mesh
    assert m.n_triangles == 2
    assert len(m.vertices) == 4
    assert set(m.boundary_tags) <= {"inlet", "outlet", "wall", "axis"}


def test_pipe_mesh_axis_and_wall(small_pipe_mesh):
    m = small_pipe_mesh
    axis = m.boundary_edges_of("axis")
    wall = m.boundary_edges_of("wall")
    assert np.allclose(m.vertices[axis.ravel(), 0], 0.0)
    assert np.allclose(m.vertices[wall.ravel(), 0], 0.002)


def test_nozzle_mesh_quality(coarse_nozzle_mesh, nozzle_profile):
    m = coarse_nozzle_mesh
    assert _min_angles(m).min() >= 20.0
    # meridional area preserved to rounding: the boundary is piecewise
    # linear and the generator places nodes exactly on it
    assert _triangle_areas(m).sum() == pytest.approx(
        nozzle_profile.area(), rel=1e-12
    )


def test_nozzle_mesh_edge_lengths_bounded(coarse_nozzle_mesh, nozzle_profile):
    m = coarse_nozzle_mesh
    region_h = {0: "inlet", 1: "convergent", 2: "throat", 3: "expansion"}
    v = m.vertices[m.triangles]
    for t in range(m.n_triangles):
        zc = v[t, :, 1].mean()
        h = COARSE_SIZING[region_h[nozzle_profile.region_of(zc)]]
        edges = np.linalg.norm(np.roll(v[t], -1, axis=0) - v[t], axis=1)
        assert edges.max() <= 2.0 * h + 1e-12


def test_nozzle_mesh_conforming(coarse_nozzle_mesh):
    m = coarse_nozzle_mesh
    from collections import Counter

    count = Counter()
    for tri in m.triangles:
        for i in range(3):
            e = tuple(sorted((tri[i], tri[(i + 1) % 3])))
            count[e] += 1
    assert set(count.values()) <= {1, 2}
    n_boundary = sum(1 for c in count.values() if c == 1)
    assert n_boundary == len(m.boundary_edges)


def test_throat_has_at_least_four_layers(nozzle_profile):
    m = generate_axisym_mesh(nozzle_profile, 5e-4)
    in_throat = (m.vertices[:, 1] > -0.035) & (m.vertices[:, 1] < -0.005)
    radii = np.unique(np.round(m.vertices[in_throat, 0], 12))
    assert len(radii) >= 5  # >= 4 element layers across the throat


def test_refine_uniform_counts_and_area(coarse_nozzle_mesh):
    m = coarse_nozzle_mesh
    m2 = refine_uniform(m)
    assert m2.n_triangles == 4 * m.n_triangles
    assert _triangle_areas(m2).sum() == pytest.approx(
        _triangle_areas(m).sum(), rel=1e-12
    )
    assert set(np.unique(m2.boundary_tags)) == set(np.unique(m.boundary_tags))


def test_refine_uniform_h_avg_ratio_on_square(unit_square_mesh):
    # Unique-edge averages: before = (4 + sqrt 2)/5, after = (6 + 2 sqrt 2)/16.
    # The ratio is close to, but not exactly, 1/2 because boundary edges
    # contribute relatively more short edges after refinement.
    s0 = mesh_stats(unit_square_mesh)
    s1 = mesh_stats(refine_uniform(unit_square_mesh))
    expected = ((6 + 2 * np.sqrt(2)) / 16) / ((4 + np.sqrt(2)) / 5)
    assert s1.h_avg / s0.h_avg == pytest.approx(expected, abs=1e-12)
    assert s1.h_max == pytest.approx(0.5 * s0.h_max, abs=1e-12)


def test_mesh_stats_brute_force(coarse_nozzle_mesh):
    m = coarse_nozzle_mesh
    edges = set()
    for tri in m.triangles:
        for i in range(3):
            edges.add(tuple(sorted((tri[i], tri[(i + 1) % 3]))))
    lengths = np.array(
        [np.linalg.norm(m.vertices[a] - m.vertices[b]) for a, b in edges]
    )
    s = mesh_stats(m)
    assert s.h_min == pytest.approx(lengths.min(), rel=1e-14)
    assert s.h_max == pytest.approx(lengths.max(), rel=1e-14)
    assert s.h_avg == pytest.approx(lengths.mean(), rel=1e-14)
    assert s.n_elt == m.n_triangles
    assert s.n_vertices == len(m.vertices)


def test_locate_point_vertex_and_centroid(small_pipe_mesh):
    m = small_pipe_mesh
    t, lam = locate_point(m, m.vertices[m.triangles[5, 0]])
    assert np.isclose(lam.max(), 1.0)
    centroid = m.vertices[m.triangles[7]].mean(axis=0)
    t, lam = locate_point(m, centroid)
    assert t == 7 or np.allclose(lam, 1 / 3, atol=1e-12)


def test_locate_point_matches_exhaustive_scan(small_pipe_mesh, rng):
    m = small_pipe_mesh
    for _ in range(100):
        tri = rng.integers(m.n_triangles)
        lam = rng.dirichlet([2.0, 2.0, 2.0])
        point = lam @ m.vertices[m.triangles[tri]]
        t, bary = locate_point(m, point)
        # the located triangle must actually contain the point
        lam2 = barycentric(m, t, point)
        assert lam2.min() >= -1e-10
        assert np.allclose(lam2 @ m.vertices[m.triangles[t]], point, atol=1e-12)


def test_locate_point_outside(small_pipe_mesh):
    with pytest.raises(PointNotFoundError):
        locate_point(small_pipe_mesh, (0.01, 0.01))


def test_save_load_round_trip(tmp_path, coarse_nozzle_mesh):
    path = tmp_path / "mesh.txt"
    save_mesh(coarse_nozzle_mesh, path)
    m2 = load_mesh(path)
    assert np.array_equal(m2.vertices, coarse_nozzle_mesh.vertices)
    assert np.array_equal(m2.triangles, coarse_nozzle_mesh.triangles)
    assert np.array_equal(m2.boundary_edges, coarse_nozzle_mesh.boundary_edges)
    assert list(m2.boundary_tags) == list(coarse_nozzle_mesh.boundary_tags)


def test_load_mesh_bad_header(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("not-a-mesh\n")
    with pytest.raises(ParseError):
        load_mesh(path)


def test_invalid_sizing_errors(nozzle_profile):
    with pytest.raises(InvalidParameterError):
        generate_rect_mesh(0, 1, 0, 1, -0.5)
    with pytest.raises(MeshingFailureError) as exc:
        generate_axisym_mesh(nozzle_profile, 1.0)
    assert exc.value.region is not None
    with pytest.raises(InvalidParameterError):
        generate_axisym_mesh(nozzle_profile, {"inlet": 1e-3})
