import numpy as np
import pytest

from nozzlebench.errors import InvalidParameterError
from nozzlebench.geometry import REGION_NAMES, build_nozzle_profile


def test_default_radii(nozzle_profile):
    p = nozzle_profile
    # throat ends at z = 0; pipe resumes at the sudden expansion
    assert p.radius(-0.02) == pytest.approx(0.002)
    assert p.radius(0.05) == pytest.approx(0.006)
    assert p.radius(-0.09) == pytest.approx(0.006)


def test_z_breaks_ordered(nozzle_profile):
    zb = nozzle_profile.z_breaks
    assert len(zb) == 5
    assert all(a < b for a, b in zip(zb, zb[1:]))
    assert zb[3] == 0.0  # expansion plane
    assert zb[4] == pytest.approx(0.1)


def test_convergent_is_linear(nozzle_profile):
    p = nozzle_profile
    z0, z1 = p.z_breaks[1], p.z_breaks[2]
    zs = np.linspace(z0, z1, 7)
    rs = np.array([p.radius(z) for z in zs])
    assert np.allclose(np.diff(rs, 2), 0.0, atol=1e-15)
    assert rs[0] == pytest.approx(0.006)
    assert rs[-1] == pytest.approx(0.002)


def test_region_names(nozzle_profile):
    p = nozzle_profile
    assert REGION_NAMES == ("inlet-pipe", "convergent", "throat", "expansion-pipe")
    assert p.region_of(-0.09) == 0
    assert p.region_of(-0.05) == 1
    assert p.region_of(-0.01) == 2
    assert p.region_of(0.05) == 3


def test_polygon_area_matches_trapezoid_sum(nozzle_profile):
    p = nozzle_profile
    # meridional area: sum of rectangle/trapezoid strips per region
    zb = p.z_breaks
    expected = (
        0.006 * (zb[1] - zb[0])
        + 0.5 * (0.006 + 0.002) * (zb[2] - zb[1])
        + 0.002 * (zb[3] - zb[2])
        + 0.006 * (zb[4] - zb[3])
    )
    assert p.area() == pytest.approx(expected, rel=1e-12)


def test_kink_sides(nozzle_profile):
    p = nozzle_profile
    assert p.radius(0.0, side="inner") == pytest.approx(0.002)
    assert p.radius(0.0, side="outer") == pytest.approx(0.006)


@pytest.mark.parametrize(
    "bad",
    [
        {"throat_radius": 0.012},  # not smaller than inlet
        {"inlet_radius": -1.0},
        {"convergent_length": 0.0},
        {"outlet_length": 0.0},
    ],
)
def test_invalid_dimensions_rejected(bad):
    with pytest.raises(InvalidParameterError):
        build_nozzle_profile(**bad)
