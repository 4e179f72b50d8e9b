"""Profile extraction, normalization, and the E_z / E_Q validation metrics.

Normalization follows the benchmark convention: axial velocity divided
by the mean inlet velocity u_i = 4Q / (pi D_i^2); pressure shifted to
zero at z = 0 and divided by the mean-throat dynamic pressure
rho u_t^2 / 2 with u_t = 4Q / (pi D_t^2).

E_Q(z) is the percent deviation of the numerically integrated sectional
flow rate from the prescribed one.  E_z(z) compares the computed
normalized centerline velocity against the mean of the normalized
experimental datasets: |u_comp - u_exp_mean| / max(|u_exp_mean|, 1e-3).
Both definitions are recorded in every report since the benchmark
literature leaves the exact formulas to its references.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import roots_legendre

from nozzlebench.cases import FlowCase
from nozzlebench.errors import (
    InsufficientDataError,
    InvalidParameterError,
    PointNotFoundError,
)
from nozzlebench.spaces import evaluate_field

EZ_FLOOR = 1e-3

EZ_DEFINITION = (
    "E_z(z) = |u_comp_norm(z) - mean_datasets(u_exp_norm)(z)| "
    "/ max(|mean_datasets(u_exp_norm)(z)|, 1e-3)"
)
EQ_DEFINITION = (
    "E_Q(z) = 100 * |Q_num(z) - Q| / Q with Q_num(z) = "
    "2 pi int_0^r_wall(z) u_z(r, z) r dr (composite Gauss, >= 64 points)"
)


@dataclass(frozen=True)
class Profile:
    """Dimensional (z, value) samples extracted from a solution."""

    kind: str  # velocity | pressure
    z: np.ndarray
    values: np.ndarray


@dataclass(frozen=True)
class NormalizedProfile:
    """Dimensionless profile plus the constants used to normalize it."""

    kind: str
    z: np.ndarray
    values: np.ndarray
    u_mean_inlet: float
    u_mean_throat: float
    dyn_pressure_throat: float
    pressure_shift: float = 0.0

    def denormalize(self):
        if self.kind == "velocity":
            return self.values * self.u_mean_inlet
        return self.values * self.dyn_pressure_throat + self.pressure_shift

    def interpolate(self, z):
        return np.interp(z, self.z, self.values)


def default_stations(n=12, z_min=-0.1, z_max=0.1):
    """Evenly spaced metric chart locations over the benchmark range."""
    return np.linspace(z_min, z_max, n)


def extract_centerline(state, z_samples) -> Profile:
    """Axial velocity u_z(r=0, z) at the given stations."""
    z = np.sort(np.asarray(z_samples, dtype=float))
    vals = np.empty(len(z))
    for i, zi in enumerate(z):
        try:
            vals[i] = evaluate_field(state.field, (0.0, zi))[1]
        except PointNotFoundError:
            raise PointNotFoundError(f"centerline sample z = {zi} outside domain")
    return Profile(kind="velocity", z=z, values=vals)


def _wall_radius(state, profile, z):
    if profile is not None:
        return profile.radius(z, side="inner")
    mesh = state.field.space.mesh
    return float(mesh.vertices[:, 0].max())


def extract_wall_pressure(state, z_samples, profile=None) -> Profile:
    """Pressure at the inner wall trace r_wall(z)."""
    z = np.sort(np.asarray(z_samples, dtype=float))
    vals = np.empty(len(z))
    for i, zi in enumerate(z):
        rw = _wall_radius(state, profile, zi)
        try:
            vals[i] = evaluate_field(state.field, (rw, zi))[2]
        except PointNotFoundError:
            raise PointNotFoundError(f"wall sample z = {zi} outside domain")
    return Profile(kind="pressure", z=z, values=vals)


def normalize(profile, case: FlowCase, reference_z=0.0) -> NormalizedProfile:
    """Apply the benchmark normalizations; works on extracted Profiles
    and on ExperimentalDatasets alike."""
    kind = profile.kind
    z = np.asarray(profile.z, dtype=float)
    values = np.asarray(profile.values, dtype=float)
    u_i = case.u_mean_inlet
    u_t = case.u_mean_throat
    dyn = 0.5 * case.rho * u_t**2
    shift = 0.0
    if kind == "velocity":
        out = values / u_i
    elif kind == "pressure":
        if not (z.min() - 1e-12 <= reference_z <= z.max() + 1e-12):
            raise InvalidParameterError(
                f"pressure normalization needs z = {reference_z} inside the "
                f"sample range [{z.min()}, {z.max()}]"
            )
        shift = float(np.interp(reference_z, z, values))
        out = (values - shift) / dyn
    else:
        raise InvalidParameterError(f"unknown profile kind {kind!r}")
    return NormalizedProfile(
        kind=kind,
        z=z,
        values=out,
        u_mean_inlet=u_i,
        u_mean_throat=u_t,
        dyn_pressure_throat=dyn,
        pressure_shift=shift,
    )


def sectional_flow_rate(state, z, r_wall, n_points=64):
    """Q_num(z) = 2 pi int_0^r_wall u_z r dr by composite Gauss quadrature."""
    n_sub = max(1, int(np.ceil(n_points / 4)))
    xg, wg = roots_legendre(4)
    edges = np.linspace(0.0, r_wall, n_sub + 1)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        rq = 0.5 * (a + b) + 0.5 * (b - a) * xg
        wq = 0.5 * (b - a) * wg
        for r, w in zip(rq, wq):
            uz = evaluate_field(state.field, (r, z))[1]
            total += w * uz * r
    return 2.0 * np.pi * total


def compute_EQ(state, case: FlowCase, z_sections, profile=None):
    """Conservation-of-mass error, percent, per cross-section."""
    q_ref = case.flow_rate
    out = []
    for z in np.asarray(z_sections, dtype=float):
        rw = _wall_radius(state, profile, z)
        q_num = sectional_flow_rate(state, z, rw)
        out.append((float(z), 100.0 * abs(q_num - q_ref) / q_ref))
    return out


def compute_Ez(computed: NormalizedProfile, datasets, locations):
    """Validation metric against the dataset-mean normalized velocity.

    ``datasets`` are NormalizedProfiles of the experimental data; every
    location must be covered by the computed profile and at least one
    dataset.
    """
    locations = np.asarray(locations, dtype=float)
    out = []
    for z in locations:
        if not (computed.z.min() - 1e-12 <= z <= computed.z.max() + 1e-12):
            raise InsufficientDataError(
                f"location z = {z} not covered by the computed profile"
            )
        exp_vals = [
            ds.interpolate(z)
            for ds in datasets
            if ds.z.min() - 1e-12 <= z <= ds.z.max() + 1e-12
        ]
        if not exp_vals:
            raise InsufficientDataError(
                f"location z = {z} not covered by any dataset"
            )
        mean_exp = float(np.mean(exp_vals))
        u_comp = float(computed.interpolate(z))
        ez = abs(u_comp - mean_exp) / max(abs(mean_exp), EZ_FLOOR)
        out.append((float(z), ez))
    return out
