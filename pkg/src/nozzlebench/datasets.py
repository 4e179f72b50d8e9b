"""Experimental profile dataset ingestion.

Files hold two numeric columns (whitespace- or comma-separated) with an
optional single header line: axial arc length in meters and a
dimensional value (m/s for velocity, Pa for pressure).  Values are
normalized later, in the harness, never at load time.
"""

from dataclasses import dataclass, replace

import numpy as np

from nozzlebench.errors import InsufficientDataError, InvalidParameterError, ParseError

DATASET_KINDS = ("velocity", "pressure")


@dataclass(frozen=True)
class ExperimentalDataset:
    """Sorted (z, value) samples of one measured profile."""

    label: str
    kind: str
    z: np.ndarray
    values: np.ndarray
    offset_applied: float = 0.0

    def __post_init__(self):
        if self.kind not in DATASET_KINDS:
            raise InvalidParameterError(f"kind must be one of {DATASET_KINDS}")
        if len(self.z) < 2:
            raise InsufficientDataError(
                f"dataset {self.label!r} has {len(self.z)} samples; need >= 2"
            )
        if not np.all(np.diff(self.z) > 0):
            raise InvalidParameterError("z samples must be strictly increasing")

    def interpolate(self, z):
        """Linear interpolation; raises outside the sample range."""
        z = np.asarray(z, dtype=float)
        if np.any(z < self.z[0] - 1e-12) or np.any(z > self.z[-1] + 1e-12):
            raise InvalidParameterError(
                f"z outside dataset {self.label!r} range "
                f"[{self.z[0]}, {self.z[-1]}]"
            )
        return np.interp(z, self.z, self.values)


def _numeric_pair(parts):
    return float(parts[0]), float(parts[1])


def load_experimental(path, kind, label=None) -> ExperimentalDataset:
    """Load one profile file; duplicate z rows are averaged, rows sorted."""
    zs, vals = [], []
    with open(path) as f:
        lines = f.read().splitlines()
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.replace(",", " ").split()
        if len(parts) != 2:
            raise ParseError(
                f"expected two columns, got {len(parts)}: {raw!r}", line=lineno
            )
        try:
            z, v = _numeric_pair(parts)
        except ValueError:
            if lineno == 1:  # single header line allowed
                continue
            raise ParseError(f"non-numeric data: {raw!r}", line=lineno)
        zs.append(z)
        vals.append(v)
    if len(zs) < 2:
        raise InsufficientDataError(f"{path}: fewer than 2 samples")
    z = np.array(zs)
    v = np.array(vals)
    order = np.argsort(z, kind="stable")
    z, v = z[order], v[order]
    # average duplicate z values
    uz, inverse, counts = np.unique(z, return_inverse=True, return_counts=True)
    if len(uz) < len(z):
        sums = np.zeros(len(uz))
        np.add.at(sums, inverse, v)
        v = sums / counts
        z = uz
    if len(z) < 2:
        raise InsufficientDataError(f"{path}: fewer than 2 distinct z samples")
    return ExperimentalDataset(
        label=label or str(path), kind=kind, z=z, values=v
    )


def align_pressure_offset(dataset: ExperimentalDataset, reference_z=0.0):
    """Shift a pressure dataset so its interpolated value at reference_z is 0."""
    if dataset.kind != "pressure":
        raise InvalidParameterError(
            f"offset alignment applies to pressure data, not {dataset.kind!r}"
        )
    if not (dataset.z[0] - 1e-12 <= reference_z <= dataset.z[-1] + 1e-12):
        raise InvalidParameterError(
            f"reference z = {reference_z} outside dataset range "
            f"[{dataset.z[0]}, {dataset.z[-1]}]"
        )
    shift = float(np.interp(reference_z, dataset.z, dataset.values))
    return replace(
        dataset,
        values=dataset.values - shift,
        offset_applied=dataset.offset_applied + shift,
    )
