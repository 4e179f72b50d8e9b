"""``nozzlebench`` command line: mesh / run / validate / report / all.

Every invocation works inside a single run directory holding the echoed
effective config, the mesh, checkpoints, the diagnostics time series,
and the validation report, so a finished directory is a self-contained
reproducibility record.
"""

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from nozzlebench import (
    CHECKPOINT_FORMAT_VERSION,
    CONFIG_SCHEMA_VERSION,
    MESH_FORMAT_VERSION,
    __version__,
)
from nozzlebench import metrics as nbmetrics
from nozzlebench.cases import FlowCase
from nozzlebench.config import RunConfig, dump_config, parse_config
from nozzlebench.datasets import align_pressure_offset, load_experimental
from nozzlebench.errors import (
    ConfigError,
    DependencyError,
    MeshingFailureError,
    NonConvergenceError,
    NozzleBenchError,
    ParseError,
    PointNotFoundError,
    SingularMatrixError,
)
from nozzlebench.geometry import build_nozzle_profile
from nozzlebench.meshing import (
    generate_axisym_mesh,
    load_mesh,
    mesh_stats,
    refine_uniform,
    save_mesh,
)
from nozzlebench.report import ValidationReport, write_report
from nozzlebench.spaces import function_space
from nozzlebench.stepping import (
    CaseOperators,
    load_checkpoint,
    save_checkpoint,
    solve_steady,
    solve_transient,
)

EXIT_CONFIG = 1
EXIT_MESH = 2
EXIT_SOLVE = 3
EXIT_VALIDATE = 4
EXIT_IO = 5

COMMANDS = ("mesh", "run", "validate", "report", "all")


def _profile_of(cfg: RunConfig):
    return build_nozzle_profile(
        inlet_radius=cfg.inlet_radius,
        throat_radius=cfg.throat_radius,
        inlet_length=cfg.inlet_length,
        convergent_length=cfg.convergent_length,
        throat_length=cfg.throat_length,
        outlet_length=cfg.outlet_length,
    )


def _sizing_of(cfg: RunConfig):
    return {
        "inlet": cfg.sizing_inlet,
        "convergent": cfg.sizing_convergent,
        "throat": cfg.sizing_throat,
        "expansion": cfg.sizing_expansion,
    }


def _case_of(cfg: RunConfig, mesh, profile) -> FlowCase:
    return FlowCase(
        mesh=mesh,
        profile=profile,
        re_throat=cfg.re_throat,
        rho=cfg.rho,
        mu=cfg.mu,
        dt=cfg.dt,
        t_end=cfg.t_end,
        order=cfg.order,
        solver_mode=cfg.solver_mode,
        nonlinear_mode=cfg.nonlinear_mode,
    )


def _do_mesh(cfg: RunConfig, out: Path):
    profile = _profile_of(cfg)
    mesh = generate_axisym_mesh(profile, _sizing_of(cfg))
    for _ in range(cfg.refine_levels):
        mesh = refine_uniform(mesh)
    save_mesh(mesh, out / "mesh.txt")
    stats = mesh_stats(mesh)
    lines = [f"{k} = {v}" for k, v in sorted(vars(stats).items())]
    (out / "mesh_stats.txt").write_text("\n".join(lines) + "\n")
    return mesh


def _load_run_mesh(cfg: RunConfig, out: Path, needed_by: str):
    path = out / "mesh.txt"
    if not path.exists():
        raise DependencyError(
            f"{needed_by} needs {path}; run `nozzlebench mesh` first",
            needed_command="mesh",
        )
    return load_mesh(path)


def _do_run(cfg: RunConfig, out: Path):
    mesh = _load_run_mesh(cfg, out, "run")
    profile = _profile_of(cfg)
    case = _case_of(cfg, mesh, profile)
    ops = CaseOperators(case)
    diagnostics = []
    if cfg.mode == "steady":
        state = solve_steady(case, ops)
        diagnostics.append(
            {
                "step": state.step,
                "time": state.time,
                "divergence_norm": state.divergence_norm,
                "nonlinear_iterations": state.nonlinear_iterations,
                "linear_iterations": state.linear_iterations,
            }
        )
    else:
        traj, diagnostics = solve_transient(case, ops, store="last")
        state = traj[-1]
    save_checkpoint(out / "checkpoint.txt", state, case)
    with open(out / "diagnostics.csv", "w", newline="") as f:
        fieldnames = [
            "step", "time", "divergence_norm",
            "nonlinear_iterations", "linear_iterations",
        ]
        writer = csv.DictWriter(f, fieldnames=fieldnames, extrasaction="ignore")
        writer.writeheader()
        for row in diagnostics:
            writer.writerow(row)
    return state


def _load_state(cfg: RunConfig, out: Path, needed_by: str):
    path = out / "checkpoint.txt"
    if not path.exists():
        raise DependencyError(
            f"{needed_by} needs {path}; run `nozzlebench run` first",
            needed_command="run",
        )
    mesh = _load_run_mesh(cfg, out, needed_by)
    space = function_space(mesh, cfg.order)
    state, _ = load_checkpoint(path, space)
    profile = _profile_of(cfg)
    case = _case_of(cfg, mesh, profile)
    return state, case, profile


def _build_report(cfg: RunConfig, out: Path, needed_by="validate"):
    state, case, profile = _load_state(cfg, out, needed_by)
    stations = np.asarray(cfg.stations, dtype=float)
    vel = nbmetrics.extract_centerline(state, stations)
    pres = nbmetrics.extract_wall_pressure(state, stations, profile=profile)
    norm_v = nbmetrics.normalize(vel, case)
    norm_p = nbmetrics.normalize(pres, case, reference_z=float(stations[0]))
    e_q = nbmetrics.compute_EQ(state, case, stations, profile=profile)

    vel_ds, pres_ds, labels = [], [], []
    for path in cfg.velocity_data:
        ds = load_experimental(path, kind="velocity", label=Path(path).stem)
        vel_ds.append(nbmetrics.normalize(ds, case))
        labels.append(ds.label)
    for path in cfg.pressure_data:
        ds = align_pressure_offset(
            load_experimental(path, kind="pressure", label=Path(path).stem),
            reference_z=float(stations[0]),
        )
        pres_ds.append(nbmetrics.normalize(ds, case))
    e_z = nbmetrics.compute_Ez(norm_v, vel_ds, stations) if vel_ds else []

    stats = mesh_stats(case.mesh)
    report = ValidationReport(
        case_summary={
            "re_throat": cfg.re_throat,
            "rho": cfg.rho,
            "mu": cfg.mu,
            "order": cfg.order,
            "mode": cfg.mode,
            "solver_mode": cfg.solver_mode,
            "flow_rate": f"{case.flow_rate:.12g}",
            "u_mean_inlet": f"{case.u_mean_inlet:.12g}",
            "u_mean_throat": f"{case.u_mean_throat:.12g}",
        },
        mesh_stats={k: v for k, v in sorted(vars(stats).items())},
        solver_diagnostics={
            "time": state.time,
            "step": state.step,
            "divergence_norm": f"{state.divergence_norm:.6g}",
            "nonlinear_iterations": state.nonlinear_iterations,
            "linear_iterations": state.linear_iterations,
        },
        velocity_profile=norm_v,
        pressure_profile=norm_p,
        velocity_datasets=vel_ds,
        pressure_datasets=pres_ds,
        dataset_labels=labels,
        e_z=e_z,
        e_q=e_q,
    )
    return report


def _do_validate(cfg: RunConfig, out: Path):
    from nozzlebench.report import _metrics_csv

    report = _build_report(cfg, out, needed_by="validate")
    (out / "metrics.csv").write_text(_metrics_csv(report.e_z, report.e_q))
    return report


def _do_report(cfg: RunConfig, out: Path):
    report = _build_report(cfg, out, needed_by="report")
    write_report(report, out)
    return report


_STAGES = {
    "mesh": (_do_mesh, EXIT_MESH),
    "run": (_do_run, EXIT_SOLVE),
    "validate": (_do_validate, EXIT_VALIDATE),
    "report": (_do_report, EXIT_VALIDATE),
}


def run_pipeline(cfg: RunConfig, command: str, out_dir=None) -> int:
    """Execute one pipeline command; returns a process exit code."""
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}")
    out = Path(out_dir if out_dir is not None else cfg.out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        dump_config(cfg, out / "effective_config.yaml")
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    steps = COMMANDS[:-1] if command == "all" else (command,)
    for step in steps:
        fn, fail_code = _STAGES[step]
        try:
            fn(cfg, out)
        except (ParseError, OSError) as exc:
            print(f"error [{step}]: {exc}", file=sys.stderr)
            return EXIT_IO
        except MeshingFailureError as exc:
            print(f"error [{step}]: {exc}", file=sys.stderr)
            return EXIT_MESH
        except (NonConvergenceError, SingularMatrixError) as exc:
            print(f"error [{step}]: {exc}", file=sys.stderr)
            return EXIT_SOLVE
        except DependencyError as exc:
            print(f"error [{step}]: {exc}", file=sys.stderr)
            return fail_code
        except (PointNotFoundError, NozzleBenchError) as exc:
            print(f"error [{step}]: {exc}", file=sys.stderr)
            return fail_code
        print(f"[{step}] done -> {out}")
    return 0


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="nozzlebench",
        description="FDA-nozzle benchmark pipeline (axisymmetric FEM).",
    )
    parser.add_argument(
        "--version",
        action="version",
        version=(
            f"nozzlebench {__version__} "
            f"(config schema: {CONFIG_SCHEMA_VERSION}; "
            f"mesh format: {MESH_FORMAT_VERSION}; "
            f"checkpoint format: {CHECKPOINT_FORMAT_VERSION})"
        ),
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="YAML config path")
    parser.add_argument("--out", default=None, help="run directory override")
    parser.add_argument("--order", type=int, default=None,
                        help="velocity order override (1 or 2)")
    parser.add_argument("--re", type=float, default=None,
                        help="throat Reynolds number override")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = parse_config(args.config)
        overrides = {}
        if args.order is not None:
            overrides["order"] = args.order
        if args.re is not None:
            overrides["re_throat"] = args.re
        if overrides:
            from dataclasses import replace

            cfg = replace(cfg, **overrides)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return run_pipeline(cfg, args.command, out_dir=args.out)


if __name__ == "__main__":
    sys.exit(main())
