"""Parametric nozzle cross-section in the (r, z) meridian half-plane.

The device is a straight inlet pipe, a conical convergent, a narrow
throat, and a sudden expansion back to the inlet diameter.  ``z = 0`` is
pinned at the sudden-expansion plane so axial coordinates line up with
the benchmark charts.  Default dimensions are reconstructed from the
benchmark's normalization constants (inlet diameter 0.012 m, throat
diameter 0.004 m) and a 10-degree half-angle convergent; they are
configuration defaults, not authoritative device drawings, and every
length can be overridden.
"""

from dataclasses import dataclass

import numpy as np

from nozzlebench.errors import InvalidParameterError

#: Default dimensions in meters.
DEFAULT_INLET_RADIUS = 0.006
DEFAULT_THROAT_RADIUS = 0.002
DEFAULT_INLET_LENGTH = 0.04
#: (R_inlet - R_throat) / tan(10 deg), the conical contraction length.
DEFAULT_CONVERGENT_LENGTH = 0.022676
DEFAULT_THROAT_LENGTH = 0.04
DEFAULT_OUTLET_LENGTH = 0.1

REGION_NAMES = ("inlet-pipe", "convergent", "throat", "expansion-pipe")


@dataclass(frozen=True)
class NozzleProfile:
    """Piecewise-linear wall radius r(z) with one jump at ``z_origin``."""

    inlet_radius: float = DEFAULT_INLET_RADIUS
    throat_radius: float = DEFAULT_THROAT_RADIUS
    inlet_length: float = DEFAULT_INLET_LENGTH
    convergent_length: float = DEFAULT_CONVERGENT_LENGTH
    throat_length: float = DEFAULT_THROAT_LENGTH
    outlet_length: float = DEFAULT_OUTLET_LENGTH
    z_origin: float = 0.0

    @property
    def z_min(self):
        return self.z_origin - (
            self.inlet_length + self.convergent_length + self.throat_length
        )

    @property
    def z_max(self):
        return self.z_origin + self.outlet_length

    @property
    def z_breaks(self):
        """Axial section boundaries: inlet end, cone end, expansion, outlet."""
        z0 = self.z_min
        return (
            z0,
            z0 + self.inlet_length,
            z0 + self.inlet_length + self.convergent_length,
            self.z_origin,
            self.z_max,
        )

    def radius(self, z, side="inner"):
        """Wall radius at axial coordinate z.

        At the sudden-expansion jump the value is ambiguous; ``side``
        picks the throat value ("inner", default) or the outlet-pipe
        value ("outer").
        """
        z = np.asarray(z, dtype=float)
        zb = self.z_breaks
        if np.any(z < zb[0] - 1e-12) or np.any(z > zb[4] + 1e-12):
            raise InvalidParameterError(f"z out of profile range [{zb[0]}, {zb[4]}]")
        ri, rt = self.inlet_radius, self.throat_radius
        # piecewise: inlet pipe, linear cone, throat, outlet pipe
        r = np.empty(z.shape)
        r[...] = ri
        cone = (z >= zb[1]) & (z <= zb[2])
        with np.errstate(invalid="ignore"):
            frac = (z - zb[1]) / max(zb[2] - zb[1], 1e-300)
        r = np.where(cone, ri + (rt - ri) * np.clip(frac, 0.0, 1.0), r)
        if side == "inner":
            r = np.where((z >= zb[2]) & (z <= zb[3]), rt, r)
        else:
            r = np.where((z >= zb[2]) & (z < zb[3]), rt, r)
        return float(r) if r.ndim == 0 else r

    def region_of(self, z):
        """0-based region index (see REGION_NAMES) containing z; the
        expansion plane itself belongs to the expansion pipe."""
        zb = self.z_breaks
        if z < zb[1]:
            return 0
        if z < zb[2]:
            return 1
        if z < zb[3]:
            return 2
        return 3

    def polygon(self):
        """Closed boundary polygon of the half-domain, counterclockwise
        starting at the inlet-axis corner."""
        zb = self.z_breaks
        ri, rt = self.inlet_radius, self.throat_radius
        return np.array(
            [
                (0.0, zb[0]),
                (0.0, zb[4]),
                (ri, zb[4]),
                (ri, zb[3]),
                (rt, zb[3]),
                (rt, zb[2]),
                (ri, zb[1]),
                (ri, zb[0]),
            ]
        )

    def area(self):
        """Meridian-plane area of the half-domain."""
        zb = self.z_breaks
        ri, rt = self.inlet_radius, self.throat_radius
        a = ri * self.inlet_length
        a += 0.5 * (ri + rt) * self.convergent_length
        a += rt * self.throat_length
        a += ri * self.outlet_length
        return a


def build_nozzle_profile(**dims):
    """Build a NozzleProfile, validating dimension overrides.

    Raises InvalidParameterError for non-positive lengths/radii, a
    degenerate contraction (throat radius >= inlet radius), or a zero
    convergent length with distinct radii (which would create a second
    radius jump).
    """
    unknown = set(dims) - set(NozzleProfile.__dataclass_fields__)
    if unknown:
        raise InvalidParameterError(f"unknown profile dimensions: {sorted(unknown)}")
    profile = NozzleProfile(**dims)
    for name in (
        "inlet_radius",
        "throat_radius",
        "inlet_length",
        "throat_length",
        "outlet_length",
    ):
        if getattr(profile, name) <= 0.0:
            raise InvalidParameterError(f"{name} must be strictly positive")
    if profile.convergent_length < 0.0:
        raise InvalidParameterError("convergent_length must be non-negative")
    if profile.throat_radius >= profile.inlet_radius:
        raise InvalidParameterError("throat_radius must be smaller than inlet_radius")
    if profile.convergent_length == 0.0:
        raise InvalidParameterError(
            "convergent_length = 0 with distinct radii would put a second "
            "radius jump at the cone; only the sudden expansion may jump"
        )
    return profile
