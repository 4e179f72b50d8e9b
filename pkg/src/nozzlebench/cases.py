"""Benchmark flow cases: fluid properties, flow rate, inlet profile.

The volumetric flow rate follows from the throat Reynolds number via
Re_t = rho * u_t * D_t / mu with mean throat velocity u_t = 4Q / (pi D_t^2),
so Q = pi * D_t * mu * Re_t / (4 rho).
"""

import math
from dataclasses import dataclass, field

from nozzlebench.errors import InvalidParameterError
from nozzlebench.geometry import NozzleProfile

DEFAULT_DENSITY = 1056.0  # kg/m^3
DEFAULT_VISCOSITY = 0.0035  # Pa.s

SOLVER_MODES = ("direct", "gmres+pcd")
NONLINEAR_MODES = ("picard", "semi-implicit")


def flow_rate_from_reynolds(re_t, mu, rho, d_t):
    """Volumetric flow rate (m^3/s) producing throat Reynolds number re_t."""
    for name, v in (("re_t", re_t), ("mu", mu), ("rho", rho), ("d_t", d_t)):
        if v <= 0:
            raise InvalidParameterError(f"{name} must be strictly positive")
    return math.pi * d_t * mu * re_t / (4.0 * rho)


def mean_velocity(q, d):
    """Sectional mean velocity 4Q / (pi d^2)."""
    return 4.0 * q / (math.pi * d * d)


def poiseuille_inlet(q, d_i):
    """Parabolic profile u_z(r) carrying flow rate q through diameter d_i."""
    if q <= 0 or d_i <= 0:
        raise InvalidParameterError("q and d_i must be strictly positive")
    u_mean = mean_velocity(q, d_i)
    radius = 0.5 * d_i

    def u_z(r):
        return 2.0 * u_mean * (1.0 - (r / radius) ** 2)

    return u_z


@dataclass
class FlowCase:
    """One benchmark regime on one mesh."""

    mesh: object
    profile: NozzleProfile = None
    re_throat: float = 500.0
    rho: float = DEFAULT_DENSITY
    mu: float = DEFAULT_VISCOSITY
    dt: float = 1e-3
    t_end: float = 0.1
    order: int = 1  # velocity degree is order + 1
    solver_mode: str = "direct"
    nonlinear_mode: str = "semi-implicit"
    gmres_tol: float = 1e-8
    gmres_restart: int = 200
    picard_tol: float = 1e-8
    picard_maxiter: int = 100
    picard_relax: float = 1.0
    forcing: object = None  # optional (f_r(r,z), f_z(r,z)) callables
    inlet_profile: object = field(default=None, repr=False)
    inlet_ramp: object = field(default=None, repr=False)  # optional s(t) in [0,1]

    def __post_init__(self):
        for name in ("re_throat", "rho", "mu", "dt", "t_end"):
            if getattr(self, name) <= 0:
                raise InvalidParameterError(f"{name} must be strictly positive")
        if self.dt >= self.t_end:
            raise InvalidParameterError("dt must be smaller than t_end")
        if self.order not in (1, 2):
            raise InvalidParameterError("order N must be 1 or 2")
        if self.solver_mode not in SOLVER_MODES:
            raise InvalidParameterError(f"solver_mode must be one of {SOLVER_MODES}")
        if self.nonlinear_mode not in NONLINEAR_MODES:
            raise InvalidParameterError(
                f"nonlinear_mode must be one of {NONLINEAR_MODES}"
            )

    @property
    def throat_diameter(self):
        if self.profile is not None:
            return 2.0 * self.profile.throat_radius
        return 2.0 * float(self.mesh.vertices[:, 0].max())

    @property
    def inlet_diameter(self):
        if self.profile is not None:
            return 2.0 * self.profile.inlet_radius
        return 2.0 * float(self.mesh.vertices[:, 0].max())

    @property
    def flow_rate(self):
        return flow_rate_from_reynolds(
            self.re_throat, self.mu, self.rho, self.throat_diameter
        )

    @property
    def u_mean_inlet(self):
        return mean_velocity(self.flow_rate, self.inlet_diameter)

    @property
    def u_mean_throat(self):
        return mean_velocity(self.flow_rate, self.throat_diameter)

    def inlet_velocity(self):
        """Inlet u_z(r); the benchmark Poiseuille profile by default."""
        if self.inlet_profile is not None:
            return self.inlet_profile
        return poiseuille_inlet(self.flow_rate, self.inlet_diameter)
