"""Validation report assembly and file emission (CSV / SVG / summary).

Output is bit-stable across runs given identical inputs: CSV numbers
are written with 12 significant digits, and the SVG is rendered with a
fixed hash salt and no date metadata.
"""

import io
from dataclasses import dataclass, field

import numpy as np

from nozzlebench.errors import InvalidParameterError
from nozzlebench.metrics import EQ_DEFINITION, EZ_DEFINITION


def _fmt(x):
    return f"{float(x):.12g}"


@dataclass
class ValidationReport:
    """Everything write_report emits: profiles, metrics, and context."""

    case_summary: dict
    mesh_stats: dict
    solver_diagnostics: dict = field(default_factory=dict)
    velocity_profile: object = None  # NormalizedProfile
    pressure_profile: object = None  # NormalizedProfile
    velocity_datasets: list = field(default_factory=list)
    pressure_datasets: list = field(default_factory=list)
    dataset_labels: list = field(default_factory=list)
    e_z: list = field(default_factory=list)  # (z, value)
    e_q: list = field(default_factory=list)  # (z, percent)

    def __post_init__(self):
        for z, v in list(self.e_z) + list(self.e_q):
            if v < 0:
                raise InvalidParameterError("metric values must be non-negative")


def _profile_csv(computed, datasets, labels):
    buf = io.StringIO()
    cols = ["z", "computed_norm"] + [f"{lbl}_norm" for lbl in labels]
    buf.write(",".join(cols) + "\n")
    if computed is None:
        return buf.getvalue()
    for i, z in enumerate(computed.z):
        row = [_fmt(z), _fmt(computed.values[i])]
        for ds in datasets:
            if ds.z.min() - 1e-12 <= z <= ds.z.max() + 1e-12:
                row.append(_fmt(ds.interpolate(z)))
            else:
                row.append("")
        buf.write(",".join(row) + "\n")
    return buf.getvalue()


def _metrics_csv(e_z, e_q):
    buf = io.StringIO()
    buf.write("z,E_z,E_Q\n")
    zs = sorted({z for z, _ in e_z} | {z for z, _ in e_q})
    ez_map = dict(e_z)
    eq_map = dict(e_q)
    for z in zs:
        row = [
            _fmt(z),
            _fmt(ez_map[z]) if z in ez_map else "",
            _fmt(eq_map[z]) if z in eq_map else "",
        ]
        buf.write(",".join(row) + "\n")
    return buf.getvalue()


def _render_svg(report, path):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    with matplotlib.rc_context({"svg.hashsalt": "nozzlebench"}):
        fig, axes = plt.subplots(2, 2, figsize=(11, 7.5))
        ax = axes[0, 0]
        if report.velocity_profile is not None:
            ax.plot(report.velocity_profile.z, report.velocity_profile.values,
                    "g--", lw=2, label="computed")
        for ds, lbl in zip(report.velocity_datasets, report.dataset_labels):
            ax.plot(ds.z, ds.values, ".", ms=3, label=lbl)
        ax.set_xlabel("z [m]")
        ax.set_ylabel("normalized u_z")
        if ax.lines:
            ax.legend(fontsize=7)
        ax = axes[0, 1]
        if report.pressure_profile is not None:
            ax.plot(report.pressure_profile.z, report.pressure_profile.values,
                    "g--", lw=2, label="computed")
        for ds, lbl in zip(report.pressure_datasets, report.dataset_labels):
            ax.plot(ds.z, ds.values, ".", ms=3, label=lbl)
        ax.set_xlabel("z [m]")
        ax.set_ylabel("normalized pressure difference")
        if ax.lines:
            ax.legend(fontsize=7)
        ax = axes[1, 0]
        if report.e_z:
            z, v = zip(*report.e_z)
            if max(v) > 0:
                ax.semilogy(z, v, "s-")
            else:
                ax.plot(z, v, "s-")
        ax.set_xlabel("z [m]")
        ax.set_ylabel("E_z")
        ax = axes[1, 1]
        if report.e_q:
            z, v = zip(*report.e_q)
            ax.plot(z, v, "s-")
        ax.set_xlabel("z [m]")
        ax.set_ylabel("E_Q [%]")
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)


def _summary_text(report):
    buf = io.StringIO()
    buf.write("nozzlebench validation summary\n")
    buf.write("==============================\n\ncase\n----\n")
    for k in sorted(report.case_summary):
        buf.write(f"{k} = {report.case_summary[k]}\n")
    buf.write("\nmesh\n----\n")
    for k in sorted(report.mesh_stats):
        buf.write(f"{k} = {report.mesh_stats[k]}\n")
    if report.solver_diagnostics:
        buf.write("\nsolver\n------\n")
        for k in sorted(report.solver_diagnostics):
            buf.write(f"{k} = {report.solver_diagnostics[k]}\n")
    buf.write("\nmetric definitions\n------------------\n")
    buf.write(EZ_DEFINITION + "\n")
    buf.write(EQ_DEFINITION + "\n")
    if report.e_q:
        worst = max(v for _, v in report.e_q)
        buf.write(f"\nmax E_Q = {_fmt(worst)} %\n")
    if report.e_z:
        worst = max(v for _, v in report.e_z)
        buf.write(f"max E_z = {_fmt(worst)}\n")
    return buf.getvalue()


def write_report(report: ValidationReport, out_dir):
    """Emit profiles_velocity.csv, profiles_pressure.csv, metrics.csv,
    report.svg, and summary.txt into out_dir; returns the paths."""
    from pathlib import Path

    out = Path(out_dir)
    if not out.is_dir():
        raise OSError(f"output directory {out} does not exist")
    paths = {}
    paths["profiles_velocity"] = out / "profiles_velocity.csv"
    paths["profiles_velocity"].write_text(
        _profile_csv(report.velocity_profile, report.velocity_datasets,
                     report.dataset_labels)
    )
    paths["profiles_pressure"] = out / "profiles_pressure.csv"
    paths["profiles_pressure"].write_text(
        _profile_csv(report.pressure_profile, report.pressure_datasets,
                     report.dataset_labels)
    )
    paths["metrics"] = out / "metrics.csv"
    paths["metrics"].write_text(_metrics_csv(report.e_z, report.e_q))
    paths["svg"] = out / "report.svg"
    _render_svg(report, paths["svg"])
    paths["summary"] = out / "summary.txt"
    paths["summary"].write_text(_summary_text(report))
    return paths
