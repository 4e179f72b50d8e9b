import numpy as np
import pytest

from nozzlebench.cases import FlowCase
from nozzlebench.datasets import ExperimentalDataset
from nozzlebench.errors import InsufficientDataError, PointNotFoundError
from nozzlebench.metrics import (
    EQ_DEFINITION,
    EZ_DEFINITION,
    compute_EQ,
    compute_Ez,
    default_stations,
    extract_centerline,
    extract_wall_pressure,
    normalize,
    sectional_flow_rate,
)
from nozzlebench.spaces import evaluate_field
from nozzlebench.stepping import CaseOperators, solve_steady


@pytest.fixture(scope="module")
def pipe_solution(small_pipe_mesh):
    case = FlowCase(mesh=small_pipe_mesh, profile=None, order=1,
                    solver_mode="direct", nonlinear_mode="picard")
    ops = CaseOperators(case)
    return case, solve_steady(case, ops)


def test_metric_definitions_published():
    assert "max" in EZ_DEFINITION and "1e-3" in EZ_DEFINITION
    assert "2 pi" in EQ_DEFINITION and "64" in EQ_DEFINITION


def test_default_stations():
    z = default_stations(12)
    assert len(z) == 12
    assert z[0] == -0.1 and z[-1] == 0.1


def test_extract_centerline_matches_pointwise(pipe_solution):
    _, state = pipe_solution
    zs = np.linspace(0.005, 0.035, 7)
    prof = extract_centerline(state, zs)
    for z, v in zip(prof.z, prof.values):
        assert v == pytest.approx(evaluate_field(state.field, (0.0, z))[1])


def test_wall_pressure_matches_centerline_in_pipe(pipe_solution):
    # fully developed pipe pressure is r-independent
    _, state = pipe_solution
    zs = np.linspace(0.005, 0.035, 7)
    wall = extract_wall_pressure(state, zs)
    for z, v in zip(wall.z, wall.values):
        center = evaluate_field(state.field, (0.0, z))[2]
        assert v == pytest.approx(center, abs=1e-6 * max(1.0, abs(center)))


def test_normalize_constant_velocity(pipe_solution):
    case, _ = pipe_solution
    from nozzlebench.metrics import Profile

    prof = Profile(kind="velocity", z=np.array([0.0, 1.0]),
                   values=np.full(2, case.u_mean_inlet))
    out = normalize(prof, case)
    assert np.allclose(out.values, 1.0, atol=1e-14)
    assert np.allclose(out.denormalize(), prof.values, atol=1e-14)


def test_normalize_pressure_zero_at_reference(pipe_solution):
    case, _ = pipe_solution
    from nozzlebench.metrics import Profile

    prof = Profile(kind="pressure", z=np.linspace(0.0, 1.0, 5),
                   values=np.linspace(3.0, -1.0, 5))
    out = normalize(prof, case, reference_z=0.0)
    assert out.values[0] == pytest.approx(0.0, abs=1e-14)
    assert out.pressure_shift == pytest.approx(3.0)
    assert np.allclose(out.denormalize(), prof.values, atol=1e-12)


def test_dynamic_pressure_constant(pipe_solution):
    case, _ = pipe_solution
    from nozzlebench.metrics import Profile

    prof = Profile(kind="pressure", z=np.array([0.0, 1.0]),
                   values=np.zeros(2))
    out = normalize(prof, case)
    # mesh radius is the 0.002 throat scale, so u_t matches the
    # benchmark throat constant
    assert out.dyn_pressure_throat == pytest.approx(90.62664235, rel=1e-4)


def test_sectional_flow_rate_exact_interpolant(pipe_solution):
    case, state = pipe_solution
    q = sectional_flow_rate(state, 0.02, r_wall=0.002)
    assert abs(q - case.flow_rate) / case.flow_rate < 1e-10


def test_compute_EQ_exact_poiseuille(pipe_solution):
    case, state = pipe_solution
    eq = compute_EQ(state, case, np.linspace(0.004, 0.036, 9))
    assert max(v for _, v in eq) < 1e-8  # percent


def test_compute_EQ_zero_field(pipe_solution):
    case, state = pipe_solution
    ops = CaseOperators(case)
    from nozzlebench.stepping import SolutionState

    zero = SolutionState(field=ops.zero_field(), time=0.0, step=0,
                         divergence_norm=0.0)
    eq = compute_EQ(zero, case, [0.02])
    assert eq[0][1] == pytest.approx(100.0)


def test_compute_Ez_self_comparison_zero(pipe_solution):
    case, state = pipe_solution
    zs = np.linspace(0.005, 0.035, 7)
    prof = extract_centerline(state, zs)
    ds = ExperimentalDataset(label="self", kind="velocity",
                             z=prof.z.copy(), values=prof.values.copy())
    norm_c = normalize(prof, case)
    norm_d = normalize(ds, case)
    ez = compute_Ez(norm_c, [norm_d], zs)
    assert max(v for _, v in ez) == 0.0


def test_compute_Ez_uncovered_location(pipe_solution):
    case, state = pipe_solution
    zs = np.linspace(0.005, 0.035, 7)
    prof = extract_centerline(state, zs)
    ds = ExperimentalDataset(label="short", kind="velocity",
                             z=prof.z[:3].copy(), values=prof.values[:3].copy())
    with pytest.raises(InsufficientDataError):
        compute_Ez(normalize(prof, case), [normalize(ds, case)], [0.035])


def test_extract_outside_domain_raises(pipe_solution):
    _, state = pipe_solution
    with pytest.raises(PointNotFoundError):
        extract_centerline(state, [1.0])
