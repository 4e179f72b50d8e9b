"""Axisymmetric FEM Navier-Stokes solver and validation harness for the
sudden-expansion nozzle benchmark.

The package is organized as a plain numpy/scipy library:

- :mod:`nozzlebench.geometry`   parametric nozzle cross-section
- :mod:`nozzlebench.meshing`    graded triangular meshes of the (r, z) half-domain
- :mod:`nozzlebench.elements`   reference Lagrange elements and quadrature
- :mod:`nozzlebench.spaces`     Taylor-Hood function spaces and field evaluation
- :mod:`nozzlebench.assembly`   axisymmetric weak-form operator blocks
- :mod:`nozzlebench.linalg`     CSR utilities, sparse LU, GMRES
- :mod:`nozzlebench.pcd`        pressure convection-diffusion block preconditioner
- :mod:`nozzlebench.cases`      benchmark flow cases and inlet profiles
- :mod:`nozzlebench.stepping`   steady / transient solution drivers
- :mod:`nozzlebench.datasets`   experimental profile ingestion
- :mod:`nozzlebench.metrics`    profile extraction, normalization, E_z / E_Q
- :mod:`nozzlebench.report`     CSV / SVG / summary emission
- :mod:`nozzlebench.config`     run configuration
- :mod:`nozzlebench.cli`        ``nozzlebench`` command-line pipeline
"""

from nozzlebench.geometry import NozzleProfile, build_nozzle_profile
from nozzlebench.meshing import (
    AxisymMesh,
    MeshStats,
    generate_axisym_mesh,
    generate_rect_mesh,
    generate_pipe_mesh,
    refine_uniform,
    mesh_stats,
    locate_point,
    save_mesh,
    load_mesh,
)
from nozzlebench.cases import FlowCase, flow_rate_from_reynolds, poiseuille_inlet
from nozzlebench.spaces import FunctionSpace, Field

__all__ = [
    "NozzleProfile",
    "build_nozzle_profile",
    "AxisymMesh",
    "MeshStats",
    "generate_axisym_mesh",
    "generate_rect_mesh",
    "generate_pipe_mesh",
    "refine_uniform",
    "mesh_stats",
    "locate_point",
    "save_mesh",
    "load_mesh",
    "FlowCase",
    "flow_rate_from_reynolds",
    "poiseuille_inlet",
    "FunctionSpace",
    "Field",
]

__version__ = "0.1.0"

MESH_FORMAT_VERSION = "axisym-mesh v1"
CHECKPOINT_FORMAT_VERSION = "nozzlebench-checkpoint v1"
CONFIG_SCHEMA_VERSION = "nozzlebench-config v1"
