"""Acceptance gate: end-to-end checks of the benchmark deliverables.

Each test prints a single pass/fail line so the suite doubles as an
acceptance report when run with ``pytest -s tests/test_acceptance.py``.
"""

import hashlib
import time

import numpy as np
import pytest

from nozzlebench import cli
from nozzlebench.cases import FlowCase, flow_rate_from_reynolds, mean_velocity
from nozzlebench.meshing import generate_pipe_mesh, refine_uniform
from nozzlebench.metrics import (
    compute_EQ,
    compute_Ez,
    extract_centerline,
    extract_wall_pressure,
    normalize,
)
from nozzlebench.mms import convergence_study, observed_orders
from nozzlebench.pcd import build_pcd, solve_saddle_gmres
from nozzlebench.spaces import Field, function_space
from nozzlebench.stepping import (
    CaseOperators,
    SolutionState,
    assemble_step_system,
    solve_steady,
    solve_transient,
)

STATIONS = [
    -0.088, -0.064, -0.048, -0.02, -0.008, 0.0,
    0.008, 0.016, 0.024, 0.032, 0.06, 0.08,
]


def _check(name, ok, detail):
    status = "PASS" if ok else "FAIL"
    print(f"[acceptance] {name}: {status} ({detail})")
    assert ok, f"{name}: {detail}"


def _steady_nozzle(mesh, profile):
    case = FlowCase(mesh=mesh, profile=profile, re_throat=500.0)
    ops = CaseOperators(case)
    t0 = time.perf_counter()
    state = solve_steady(case, ops)
    return case, ops, state, time.perf_counter() - t0


@pytest.fixture(scope="module")
def refined_nozzle_mesh(coarse_nozzle_mesh):
    return refine_uniform(coarse_nozzle_mesh)


@pytest.fixture(scope="module")
def coarse_solution(coarse_nozzle_mesh, nozzle_profile):
    return _steady_nozzle(coarse_nozzle_mesh, nozzle_profile)


@pytest.fixture(scope="module")
def refined_solution(refined_nozzle_mesh, nozzle_profile):
    return _steady_nozzle(refined_nozzle_mesh, nozzle_profile)


def test_acceptance_1_poiseuille_exactness():
    t0 = time.perf_counter()
    radius, length = 0.006, 0.06
    mesh = generate_pipe_mesh(radius=radius, length=length, h=1.5e-3)
    case = FlowCase(mesh=mesh, re_throat=500.0)
    ops = CaseOperators(case)
    state = solve_steady(case, ops)

    coords = ops.space.velocity_map.dof_coords
    exact = np.concatenate(
        [np.zeros(len(coords)), case.inlet_velocity()(coords[:, 0])]
    )
    err = exact - state.field.velocity
    m = ops.M_v
    rel_l2 = float(np.sqrt((err @ (m @ err)) / (exact @ (m @ exact))))

    zs = np.linspace(0.004, 0.056, 9)
    wall = extract_wall_pressure(state, zs)
    slope, intercept = np.polyfit(wall.z, wall.values, 1)
    fit_dev = float(np.max(np.abs(wall.values - (slope * wall.z + intercept))))
    expected_slope = -8.0 * case.mu * case.u_mean_throat / radius**2
    slope_rel = abs(slope - expected_slope) / abs(expected_slope)
    elapsed = time.perf_counter() - t0

    _check(
        "poiseuille exactness",
        rel_l2 <= 1e-8 and slope_rel <= 1e-6
        and fit_dev <= 1e-6 * abs(expected_slope * length)
        and elapsed < 30.0,
        f"rel L2 u error {rel_l2:.2e}, dp/dz rel error {slope_rel:.2e}, "
        f"{elapsed:.1f} s",
    )


def test_acceptance_2_convergence_orders():
    t0 = time.perf_counter()
    hs1 = [0.2, 0.1, 0.05]
    eu1, ep1 = convergence_study(hs1, order=1)
    order_u1 = observed_orders(hs1, eu1)
    order_p1 = observed_orders(hs1, ep1)
    hs2 = [0.2, 0.1]
    eu2, _ = convergence_study(hs2, order=2)
    order_u2 = observed_orders(hs2, eu2)
    elapsed = time.perf_counter() - t0

    _check(
        "manufactured-solution convergence orders",
        order_u1 >= 2.7 and order_p1 >= 1.7 and order_u2 >= 3.6
        and elapsed < 300.0,
        f"N=1 u {order_u1:.2f} / p {order_p1:.2f}, N=2 u {order_u2:.2f}, "
        f"{elapsed:.1f} s",
    )


def test_acceptance_3_mass_conservation(coarse_solution, refined_solution,
                                        nozzle_profile):
    case_c, _, state_c, t_c = coarse_solution
    case_r, _, state_r, t_r = refined_solution
    eq_c = [e for _, e in compute_EQ(state_c, case_c, STATIONS,
                                     profile=nozzle_profile)]
    eq_r = [e for _, e in compute_EQ(state_r, case_r, STATIONS,
                                     profile=nozzle_profile)]
    _check(
        "mass conservation E_Q",
        max(eq_r) <= 2.0 and max(eq_c) <= 15.0 and t_c + t_r < 600.0,
        f"refined max E_Q {max(eq_r):.3f}%, coarse max E_Q {max(eq_c):.3f}%, "
        f"solves {t_c + t_r:.0f} s",
    )


def test_acceptance_4_normalization_constants():
    t0 = time.perf_counter()
    rho, mu = 1056.0, 0.0035
    q = flow_rate_from_reynolds(500.0, mu, rho, 0.004)
    u_i = mean_velocity(q, 0.012)
    u_t = mean_velocity(q, 0.004)
    dyn_t = 0.5 * rho * u_t**2
    elapsed = time.perf_counter() - t0
    _check(
        "normalization constants",
        abs(u_i - 0.04603291471) / 0.04603291471 <= 1e-4
        and abs(dyn_t - 90.62664235) / 90.62664235 <= 1e-4
        and elapsed < 1.0,
        f"u_mean_inlet {u_i:.10f}, throat dynamic pressure {dyn_t:.8f}",
    )


def test_acceptance_5_profile_physics_bounds(refined_solution):
    case, _, state, _ = refined_solution
    centerline = normalize(extract_centerline(state, STATIONS), case)
    u_inlet = float(centerline.interpolate(-0.088))
    u_throat = float(centerline.interpolate(-0.02))

    zs = np.linspace(-0.0615, -0.0405, 8)
    wall = normalize(
        extract_wall_pressure(state, zs, profile=case.profile),
        case, reference_z=zs[0],
    )
    monotone = bool(np.all(np.diff(wall.values) < 0.0))

    _check(
        "profile physics bounds",
        abs(u_inlet - 2.0) <= 0.05 and 9.0 < u_throat < 18.0 and monotone,
        f"inlet u_norm {u_inlet:.3f}, throat u_norm {u_throat:.2f}, "
        f"convergent dp monotone {monotone}",
    )


def test_acceptance_6_saddle_solver_equivalence(coarse_nozzle_mesh,
                                                nozzle_profile):
    t0 = time.perf_counter()
    case = FlowCase(
        mesh=coarse_nozzle_mesh, profile=nozzle_profile, re_throat=500.0,
        dt=1e-3, t_end=0.05, nonlinear_mode="semi-implicit",
    )
    ops = CaseOperators(case)
    trajectory, _ = solve_transient(case, ops, store="all")
    assert len(trajectory) == 51

    worst = 0.0
    for k in range(1, len(trajectory)):
        history = trajectory[max(0, k - 2):k]
        system, w, alpha = assemble_step_system(case, history, ops)
        pcd = build_pcd(ops.space, case.mu, case.rho, w,
                        dt=case.dt, bdf_alpha=alpha)
        # drive the residual near machine precision: the step systems are
        # stiff enough that a 1e-8 residual still leaves ~1e-4 in solution
        x, _, _ = solve_saddle_gmres(system, pcd, tol=1e-13, restart=200)
        ref = trajectory[k].field.coeffs
        worst = max(worst, float(np.linalg.norm(x - ref)
                                 / np.linalg.norm(ref)))
    elapsed = time.perf_counter() - t0
    _check(
        "transient GMRES+PCD vs LU",
        worst <= 1e-6 and elapsed < 600.0,
        f"worst per-step relative difference {worst:.2e} over 50 steps, "
        f"{elapsed:.0f} s",
    )


def test_acceptance_6b_pcd_iteration_growth(coarse_solution, refined_solution):
    iters = []
    for case, ops, state, _ in (coarse_solution, refined_solution):
        system = ops.oseen_system(state.field)
        pcd = build_pcd(ops.space, case.mu, case.rho, state.field)
        _, it, _ = solve_saddle_gmres(system, pcd, tol=1e-6,
                                      restart=case.gmres_restart)
        iters.append(it)
    _check(
        "PCD iteration growth under refinement",
        iters[1] <= 2 * iters[0],
        f"coarse {iters[0]} iterations, refined {iters[1]}",
    )


def test_acceptance_7_metric_oracles(small_pipe_mesh, coarse_solution):
    t0 = time.perf_counter()
    case_n, _, state_n, _ = coarse_solution
    computed = normalize(extract_centerline(state_n, STATIONS), case_n)
    ez = compute_Ez(computed, [computed], STATIONS)
    ez_exact_zero = all(v == 0.0 for _, v in ez)

    case = FlowCase(mesh=small_pipe_mesh, re_throat=500.0)
    space = function_space(small_pipe_mesh, 1)
    coords = space.velocity_map.dof_coords
    coeffs = np.zeros(space.n_total)
    n = space.n_scalar_u
    coeffs[n:2 * n] = case.inlet_velocity()(coords[:, 0])
    state = SolutionState(field=Field(space, coeffs), time=0.0, step=0)
    eq = compute_EQ(state, case, np.linspace(0.005, 0.035, 7))
    eq_max = max(v for _, v in eq)
    elapsed = time.perf_counter() - t0

    _check(
        "metric oracles",
        ez_exact_zero and eq_max <= 1e-8 and elapsed < 10.0,
        f"E_z exactly zero {ez_exact_zero}, Poiseuille max E_Q {eq_max:.2e}%",
    )


def test_acceptance_8_determinism(tmp_path):
    config = tmp_path / "config.yaml"
    config.write_text(
        "schema: nozzlebench-config v1\n"
        "mode: steady\n"
        f"stations: {STATIONS}\n"
    )
    digests = []
    for tag in ("a", "b"):
        out = tmp_path / tag
        assert cli.main(["all", "--config", str(config),
                         "--out", str(out)]) == 0
        digests.append({
            name: hashlib.sha256((out / name).read_bytes()).hexdigest()
            for name in ("metrics.csv", "summary.txt")
        })
    _check(
        "pipeline determinism",
        digests[0] == digests[1],
        f"metrics.csv sha256 {digests[0]['metrics.csv'][:12]}... "
        f"identical across runs: {digests[0] == digests[1]}",
    )
