"""Command-line entry point.

Exit codes: 0 ok, 2 configuration error, 3 numerical convergence or
ambiguity error, 4 boundary spill.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

import numpy as np
import scipy.fft as sfft

from . import io
from .analysis import oam_spectrum, orientation_angle, rotation_from_snapshots, theory_comparison
from .bohmian import ModeVelocityField, integrate_trajectory, sample_starts
from .errors import (
    AmbiguousUnwrapError,
    BandwidthError,
    BoundarySpillError,
    ConfigError,
    ConvergenceError,
    DomainError,
)
from .experiment import default_extent, run_knife_edge
from .field import mode_field
from .modes import beam_width
from .params import PhysicalSetup
from .recipes import emit_figure_recipes
from .theory import (
    RotationModel,
    landau_frequency,
    mean_angular_frequency,
    reversal_points,
    rotation_angle,
)

log = logging.getLogger("landau_gouy")

UM = 1e-6
EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_SPILL = 0, 2, 3, 4


# used when no --config is given: 1.9 T, 200 keV, z_R = 1000 um
DEFAULT_CONFIG = io.RunConfig(setup=io.SetupConfig(zr_um=(1000.0,)))


def _load(args) -> io.RunConfig:
    cfg = io.load_config(args.config) if args.config else DEFAULT_CONFIG.validate()
    if args.out_dir:
        cfg = io.override(cfg, "output", dir=args.out_dir)
    return cfg


def _out_dir(cfg: io.RunConfig) -> Path:
    out = Path(cfg.output.dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _default_span(setup: PhysicalSetup) -> tuple[float, float]:
    if setup.is_free_space:
        return -5 * setup.z_R, 0.0
    return -math.pi * setup.z_m, 0.0


def _z_grid(cfg: io.RunConfig, setup: PhysicalSetup) -> np.ndarray:
    zs = cfg.knife_edge_range(setup)
    if zs.size == 0:
        zs = np.linspace(*_default_span(setup), cfg.geometry.steps)
    return zs


def cmd_params(cfg, args) -> int:
    out = _out_dir(cfg)
    rows = []
    for i, (setup, mode) in enumerate(cfg.cases()):
        print(f"case {i}: n={mode.n} ell={mode.ell}")
        for label, value, unit in setup.rows():
            print(f"  {label:<10s} {value:.10g} {unit}")
            rows.append((i, label, float(value), unit))
    io.write_csv(out / "params.csv", ["case", "quantity", "value", "unit"], rows)
    return EXIT_OK


def cmd_mode_profile(cfg, args) -> int:
    out = _out_dir(cfg)
    z = args.z_um * UM
    files = []
    for i, (setup, mode) in enumerate(cfg.cases()):
        extent = cfg.numerics.extent_um * UM if cfg.numerics.extent_um else default_extent(
            setup, cfg.numerics.grid, z, z, cfg.numerics.extent_factor
        )
        f = mode_field(setup, mode, z, cfg.numerics.grid, extent)
        w = beam_width(setup, z)
        if "csv" in cfg.output.formats:
            X, Y = f.mesh()
            csv_path = out / f"profile_{i}.csv"
            io.write_csv(
                csv_path,
                ["x_um", "y_um", "density", "phase"],
                zip((X / UM).ravel(), (Y / UM).ravel(), f.intensity().ravel(), np.angle(f.data).ravel()),
            )
            files.append(csv_path)
        if "pgm" in cfg.output.formats:
            pgm = out / f"profile_{i}.pgm"
            io.write_field_pgm(f, pgm, cfg.output.gamma)
            files.append(pgm)
        print(f"case {i}: w({args.z_um} um) = {w / UM:.6g} um, grid extent {extent / UM:.6g} um")
    io.write_manifest(out, cfg, [s for s, _ in cfg.cases()], files)
    return EXIT_OK


def _curve_overrides(cfg, args):
    cfg = io.override(cfg, "recipe", models=tuple(args.model) if args.model else None)
    cfg = io.override(cfg, "mode", ell=(args.ell,) if args.ell is not None else None,
                      n=(args.n,) if args.n is not None else None)
    if args.zr_um is not None:
        cfg = io.override(cfg, "setup", zr_um=(args.zr_um,), waist_nm=(), zr_zm=None)
    if args.zk_range_um is not None:
        cfg = io.override(cfg, "geometry", zk_range_um=tuple(args.zk_range_um), zk_range_pi_zm=())
    return io.override(cfg, "geometry", zdf_um=args.zdf_um, steps=args.steps)


def cmd_rotation_curve(cfg, args) -> int:
    cfg = _curve_overrides(cfg, args)
    out = _out_dir(cfg)
    models = [RotationModel(m) for m in cfg.recipe.models]
    files = []
    for i, (setup, mode) in enumerate(cfg.cases()):
        zs = _z_grid(cfg, setup)
        rows = []
        for m in models:
            angles = np.degrees(rotation_angle(m, setup, mode, zs, cfg.z_df))
            rows.extend((z, a, m.value) for z, a in zip(zs / UM, angles))
        path = out / f"rotation_{i}.csv"
        io.write_csv(path, ["z_k_um", "angle_deg", "model"], rows)
        files.append(path)

        if not setup.is_free_space and mode.ell != 0:
            omega = mean_angular_frequency(setup, mode, zs) / setup.omega_L
            fpath = out / f"frequency_{i}.csv"
            n = zs.size
            io.write_csv(
                fpath,
                ["z_um", "z_over_zm", "w_um", "omega_over_omegaL", "landau_pos", "landau_zero", "landau_neg",
                 "landau_this"],
                zip(zs / UM, zs / setup.z_m, beam_width(setup, zs) / UM, omega,
                    [2.0] * n, [1.0] * n, [0.0] * n, [landau_frequency(setup, mode) / setup.omega_L] * n),
            )
            files.append(fpath)
            roots = reversal_points(setup, mode, float(zs[0]), float(zs[-1]))
            if roots:
                print(f"case {i}: <omega> changes sign at z_um = " + ", ".join(f"{z / UM:.6f}" for z in roots))
        print(f"case {i}: n={mode.n} ell={mode.ell}, {zs.size} knife-edge positions -> {path.name}")
    io.write_manifest(out, cfg, [s for s, _ in cfg.cases()], files)
    return EXIT_OK


def cmd_trajectories(cfg, args) -> int:
    out = _out_dir(cfg)
    files = []
    for i, (setup, mode) in enumerate(cfg.cases()):
        zs = _z_grid(cfg, setup)
        z0, z1 = float(zs[0]), float(zs[-1])
        vf = ModeVelocityField(setup, mode)
        starts = sample_starts(setup, mode, z0, cfg.numerics.trajectories, seed=args.seed)
        for k, (x, y, _) in enumerate(starts):
            t = integrate_trajectory(vf, (x, y), z0, z1, samples=cfg.geometry.steps)
            path = out / f"traj_{i}_{k:03d}.csv"
            io.write_csv(path, ["x_um", "y_um", "z_um"], t.points / UM)
            files.append(path)
            if t.status != "complete":
                log.warning("trajectory %d of case %d stopped near a node at z=%.6e", k, i, t.z[-1])
        print(f"case {i}: {len(starts)} streamlines over [{z0 / UM:.6g}, {z1 / UM:.6g}] um")
    io.write_manifest(out, cfg, [s for s, _ in cfg.cases()], files, extra={"seed": args.seed})
    return EXIT_OK


def _simulate_overrides(cfg, args):
    cfg = io.override(cfg, "mode", ell=(args.ell,) if args.ell is not None else None,
                      n=(args.n,) if args.n is not None else None)
    if args.zr_um is not None:
        cfg = io.override(cfg, "setup", zr_um=(args.zr_um,), waist_nm=(), zr_zm=None)
    if args.zk_um is not None:
        cfg = io.override(cfg, "geometry", zk_um=tuple(args.zk_um), zk_pi_zm=())
    cfg = io.override(cfg, "geometry", zdf_um=args.zdf_um)
    cfg = io.override(cfg, "numerics", grid=args.grid, extent_factor=args.extent_factor,
                      dz_frac=args.dz_frac, planes=args.planes)
    return cfg


def cmd_simulate(cfg, args) -> int:
    cfg = _simulate_overrides(cfg, args)
    out = _out_dir(cfg)
    num = cfg.numerics
    files, runs, setups = [], [], []
    for i, (setup, mode) in enumerate(cfg.cases()):
        setups.append(setup)
        cuts = cfg.knife_edges(setup)
        if cuts.size == 0:
            raise ConfigError("simulate needs geometry.zk_um or geometry.zk_pi_zm")
        for j, z_k in enumerate(cuts):
            extent = num.extent_um * UM if num.extent_um else default_extent(
                setup, num.grid, z_k, cfg.z_df, num.extent_factor
            )
            scale = setup.z_R if setup.is_free_space else setup.z_m
            run = run_knife_edge(
                setup, mode, float(z_k), cfg.z_df,
                grid=num.grid, extent=extent, dz=math.pi * scale / num.dz_frac, planes=num.planes,
                tol=num.cheb_tol, spill_tol=num.spill_tol, regrid_factor=num.regrid_factor,
            )
            tag = f"run_{i}_{j}"
            rdir = out / tag
            rdir.mkdir(exist_ok=True)
            planes = []
            for p, (rec, snap) in enumerate(zip(run.records, run.snapshots)):
                entry = {"z": rec.z, "dx": snap.dx, "dy": snap.dy, "nx": snap.nx, "ny": snap.ny}
                if "pgm" in cfg.output.formats:
                    path = rdir / f"plane_{p:03d}.pgm"
                    io.write_field_pgm(snap, path, cfg.output.gamma)
                    files.append(path)
                    entry["pgm"] = f"{tag}/{path.name}"
                if "npy" in cfg.output.formats:
                    path = rdir / f"plane_{p:03d}.npy"
                    io.save_field(snap, path)
                    files.append(path)
                    entry["npy"] = f"{tag}/{path.name}"
                planes.append(entry)
            csv_path = rdir / "planes.csv"
            io.write_csv(
                csv_path,
                ["z_um", "norm", "lz_over_hbar", "angle_deg", "resultant"],
                [(r.z / UM, r.norm, r.lz, math.degrees(r.angle), r.resultant) for r in run.records],
            )
            files.append(csv_path)
            runs.append({
                "tag": tag, "case": i, "n": mode.n, "ell": mode.ell, "z_k": float(z_k), "z_df": cfg.z_df,
                "status": run.curve.status, "rotation_deg": math.degrees(run.rotation),
                "predicted_deg": math.degrees(run.predicted), "planes": planes,
            })
            print(
                f"{tag}: ell={mode.ell} z_k={z_k / UM:.6g} um rotation {math.degrees(run.rotation):.3f} deg "
                f"(generalized Gouy {math.degrees(run.predicted):.3f} deg), norm drift {run.norm_drift:.1e}"
            )
    io.write_manifest(out, cfg, setups, files, extra={"runs": runs})
    return EXIT_OK


def cmd_analyze(cfg, args) -> int:
    manifest = io.load_manifest(args.manifest)
    root = Path(manifest["_root"])
    run_cfg = io.parse_config(manifest["config"], source=str(args.manifest))
    cases = run_cfg.cases()
    out = Path(args.out_dir) if args.out_dir else root
    out.mkdir(parents=True, exist_ok=True)
    if not manifest.get("runs"):
        raise ConfigError(f"{args.manifest} has no simulation runs to analyse")
    table = []
    for run in manifest["runs"]:
        setup, mode = cases[run["case"]]
        snaps = []
        for entry in run["planes"]:
            if "npy" not in entry:
                raise ConfigError(f"run {run['tag']} was written without npy snapshots")
            snaps.append(io.load_field(root / entry["npy"], entry["dx"], entry["dy"], entry["z"]))
        curve = rotation_from_snapshots(snaps)
        rows = []
        for k, f in enumerate(snaps):
            o = orientation_angle(f)
            angle = curve.angles[k] if curve.samples else float("nan")
            rows.append((f.z / UM, math.degrees(angle), o.resultant, oam_spectrum(f, mode.ell).mean))
        io.write_csv(out / f"{run['tag']}_analysis.csv", ["z_um", "angle_deg", "resultant", "oam_mean"], rows)
        sim = curve.angles[-1] if curve.samples else float("nan")
        cmp = theory_comparison(setup, mode, run["z_k"], run["z_df"], sim)
        table.append((run["tag"], mode.ell, cmp["z_k"] / UM, math.degrees(sim), math.degrees(cmp["gouy"]),
                      math.degrees(cmp["free_lg"]), math.degrees(cmp["gouy_error"])))
    io.write_csv(out / "comparison.csv",
                 ["run", "ell", "z_k_um", "simulated_deg", "gouy_deg", "free_lg_deg", "gouy_error_deg"], table)
    for row in table:
        print(f"{row[0]}: ell={row[1]} z_k={row[2]:.6g} um  sim {row[3]:8.3f}  gouy {row[4]:8.3f}  "
              f"free-LG {row[5]:8.3f}  (sim - gouy {row[6]:+.3f}) deg")
    return EXIT_OK


def cmd_recipes(cfg, args) -> int:
    out = Path(args.out_dir or "recipes")
    for p in emit_figure_recipes(out):
        print(p)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI run configuration")
    common.add_argument("--out-dir", help="output directory (overrides output.dir)")
    common.add_argument("--threads", type=int, default=1, help="FFT worker threads")
    common.add_argument("--seed", type=int, default=0, help="seed for sampled start points")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="landau-gouy", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("params", parents=[common], help="derived lengths and frequencies")
    mp = sub.add_parser("mode-profile", parents=[common], help="intensity of the analytic mode")
    mp.add_argument("--z-um", type=float, default=0.0)
    rc = sub.add_parser("rotation-curve", parents=[common], help="closed-form rotation and frequency curves")
    rc.add_argument("--model", action="append", choices=[m.value for m in RotationModel if m is not RotationModel.SIMULATED],
                    help="repeat for several models")
    rc.add_argument("--ell", type=int)
    rc.add_argument("--n", type=int)
    rc.add_argument("--zr-um", type=float)
    rc.add_argument("--zdf-um", type=float)
    rc.add_argument("--zk-range-um", type=float, nargs=2, metavar=("LO", "HI"))
    rc.add_argument("--steps", type=int)
    sub.add_parser("trajectories", parents=[common], help="Bohmian streamlines as CSV")
    sim = sub.add_parser("simulate", parents=[common], help="knife-edge wave simulation")
    sim.add_argument("--ell", type=int)
    sim.add_argument("--n", type=int)
    sim.add_argument("--zr-um", type=float)
    sim.add_argument("--zk-um", type=float, nargs="+")
    sim.add_argument("--zdf-um", type=float)
    sim.add_argument("--grid", type=int)
    sim.add_argument("--extent-factor", type=float)
    sim.add_argument("--dz-frac", type=float, help="step = pi z_m / dz_frac")
    sim.add_argument("--planes", type=int)
    an = sub.add_parser("analyze", parents=[common], help="orientation and OAM from a simulate manifest")
    an.add_argument("manifest")
    sub.add_parser("recipes", parents=[common], help="write the figure preset configs")
    return p


COMMANDS = {
    "params": cmd_params,
    "mode-profile": cmd_mode_profile,
    "rotation-curve": cmd_rotation_curve,
    "trajectories": cmd_trajectories,
    "simulate": cmd_simulate,
    "analyze": cmd_analyze,
    "recipes": cmd_recipes,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        with sfft.set_workers(max(1, args.threads)):
            cfg = None if args.command in ("recipes", "analyze") else _load(args)
            return COMMANDS[args.command](cfg, args)
    except (ConfigError, DomainError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConvergenceError, BandwidthError, AmbiguousUnwrapError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except BoundarySpillError as exc:
        print(f"boundary spill: {exc}", file=sys.stderr)
        return EXIT_SPILL


if __name__ == "__main__":
    sys.exit(main())
