import math

import numpy as np
import pytest
from scipy.integrate import quad

from nozzlebench.cases import (
    DEFAULT_DENSITY,
    DEFAULT_VISCOSITY,
    FlowCase,
    flow_rate_from_reynolds,
    mean_velocity,
    poiseuille_inlet,
)
from nozzlebench.errors import InvalidParameterError

U_MEAN_INLET_REF = 0.04603291471
DYN_PRESSURE_THROAT_REF = 90.62664235


def test_fluid_defaults():
    assert DEFAULT_DENSITY == 1056.0
    assert DEFAULT_VISCOSITY == 0.0035


def test_flow_rate_re500():
    q = flow_rate_from_reynolds(500, 0.0035, 1056.0, 0.004)
    assert q == pytest.approx(5.2063e-6, rel=1e-4)
    # against the charted mean-inlet-velocity constant
    u_i = mean_velocity(q, 0.012)
    assert u_i == pytest.approx(U_MEAN_INLET_REF, rel=1e-4)


def test_dynamic_pressure_constant():
    q = flow_rate_from_reynolds(500, 0.0035, 1056.0, 0.004)
    u_t = mean_velocity(q, 0.004)
    assert 0.5 * 1056.0 * u_t**2 == pytest.approx(
        DYN_PRESSURE_THROAT_REF, rel=1e-4
    )


def test_flow_rate_invalid():
    with pytest.raises(InvalidParameterError):
        flow_rate_from_reynolds(0, 0.0035, 1056.0, 0.004)
    with pytest.raises(InvalidParameterError):
        flow_rate_from_reynolds(500, -1.0, 1056.0, 0.004)


def test_poiseuille_profile_carries_flow_rate():
    q = 5.2e-6
    d = 0.012
    profile = poiseuille_inlet(q, d)
    total, _ = quad(lambda r: 2 * math.pi * r * profile(r), 0.0, d / 2)
    assert total == pytest.approx(q, rel=1e-12)
    assert profile(d / 2) == pytest.approx(0.0, abs=1e-18)
    assert profile(0.0) == pytest.approx(2 * mean_velocity(q, d), rel=1e-12)


def test_flow_case_derived_quantities(coarse_nozzle_mesh, nozzle_profile):
    case = FlowCase(mesh=coarse_nozzle_mesh, profile=nozzle_profile)
    assert case.throat_diameter == pytest.approx(0.004)
    assert case.inlet_diameter == pytest.approx(0.012)
    assert case.u_mean_inlet == pytest.approx(U_MEAN_INLET_REF, rel=1e-4)
    assert case.u_mean_throat / case.u_mean_inlet == pytest.approx(9.0, rel=1e-12)


def test_flow_case_validation(coarse_nozzle_mesh, nozzle_profile):
    with pytest.raises(InvalidParameterError):
        FlowCase(mesh=coarse_nozzle_mesh, profile=nozzle_profile, order=3)
    with pytest.raises(InvalidParameterError):
        FlowCase(mesh=coarse_nozzle_mesh, profile=nozzle_profile, dt=-1.0)
    with pytest.raises(InvalidParameterError):
        FlowCase(
            mesh=coarse_nozzle_mesh, profile=nozzle_profile,
            solver_mode="magic",
        )
    with pytest.raises(InvalidParameterError):
        FlowCase(
            mesh=coarse_nozzle_mesh, profile=nozzle_profile,
            nonlinear_mode="newton",
        )


def test_inlet_velocity_override(coarse_nozzle_mesh, nozzle_profile):
    case = FlowCase(
        mesh=coarse_nozzle_mesh,
        profile=nozzle_profile,
        inlet_profile=lambda r: 1.0,
    )
    assert case.inlet_velocity()(0.003) == 1.0
