"""Command-line driver: simulate, consistency, verify, winterbottom.

Configuration comes from an optional TOML file plus flag overrides (flags
win). Every command that writes files stages its output directory under
<parent>/_incomplete/<name> and moves it into place only after a clean
finish, so interrupted or failed runs never masquerade as results. Exit
codes: 0 pass, 1 suite or run failure, 2 invalid configuration (the message
names the violated precondition).
"""

from __future__ import annotations

import argparse
import json
import os
import shutil
import sys
from dataclasses import dataclass
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # python 3.10
    import tomli as tomllib

import numpy as np

from . import verify, winterbottom
from .energy import AdhesionField
from .flatflow import run_flat_flow
from .grid import BinarySet, HalfSpaceGrid, rasterize_cap, write_cmcf1

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2

SIMULATE_DEFAULTS = {
    "shape": "hemisphere",  # hemisphere | winterbottom | ball
    "rho": 0.5,
    "beta0": 0.0,  # contact cosine of the initial shape
    "beta": None,  # adhesion coefficient; defaults to beta0
    "h": 1.0 / 32,
    "tau": None,  # defaults to 4 h^2
    "steps": 10,
    "extremal": "minimal",
    "center_height": None,  # interior-ball seat; defaults to 1.15 rho
}

# desk-scale demo config; the acceptance-scale study (finer grids, tighter
# tolerances) lives in verify.CONSISTENCY_DEFAULTS.  The symdiff monotonicity
# slack forgives sub-voxel noise between adjacent levels (the h ratio is only
# 1.25 here and early sample times clamp every level to its first step).
CONSISTENCY_CLI_DEFAULTS = {
    "kind": "winterbottom",
    "R0": 0.5,
    "beta0": 0.4,
    "T": 0.02,
    "hs": (1.0 / 16, 1.0 / 20, 1.0 / 24),
    "n_samples": 8,
    "mono_slack_symdiff": 0.01,
}

VERIFY_DEFAULTS = {"suites": "all"}

WINTERBOTTOM_DEFAULTS = {
    "rho": 1.0,
    "beta0": 0.0,
    "ball_R0": None,  # with ball_height, also reports the inscribed cap
    "ball_height": 0.0,
}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    """Resolved parameters of one command invocation."""

    command: str
    params: dict
    out: Path | None = None
    seed: int | None = None
    threads: int | None = None
    export_vtk: bool = False
    config_path: Path | None = None

    def require_out(self) -> Path:
        if self.out is None:
            raise ConfigError(f"{self.command} needs --out <dir> for its outputs")
        return self.out


# -- config plumbing -------------------------------------------------------------


def _parse_cell_size(text) -> float:
    """Cell sizes accept plain floats or fractions like 1/64."""
    if isinstance(text, (int, float)):
        v = float(text)
    else:
        s = str(text).strip()
        if "/" in s:
            num, den = s.split("/", 1)
            v = float(num) / float(den)
        else:
            v = float(s)
    if not (v > 0 and np.isfinite(v)):
        raise ConfigError(f"cell size must be a positive number, got {text!r}")
    return v


def _parse_h_list(text) -> tuple:
    items = text.split(",") if isinstance(text, str) else list(text)
    hs = tuple(_parse_cell_size(t) for t in items)
    if not hs:
        raise ConfigError("refinement list must name at least one cell size")
    return hs


def _load_toml(path: Path, command: str, known: dict) -> dict:
    try:
        with open(path, "rb") as f:
            data = tomllib.load(f)
    except (OSError, tomllib.TOMLDecodeError) as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    if command in data and isinstance(data[command], dict):
        data = data[command]
    unknown = [k for k in data if k not in known and k not in COMMON_KEYS]
    if unknown:
        raise ConfigError(f"unknown config keys for {command}: {', '.join(sorted(unknown))}")
    return data


COMMON_KEYS = ("out", "seed", "threads", "export_vtk")


def _resolve(args: argparse.Namespace, defaults: dict) -> RunConfig:
    params = dict(defaults)
    common: dict = {}
    cfg_path = getattr(args, "config", None)
    if cfg_path is not None:
        file_cfg = _load_toml(cfg_path, args.command, defaults)
        for k, v in file_cfg.items():
            (common if k in COMMON_KEYS else params)[k] = v
    for k in list(params) + list(COMMON_KEYS):
        v = getattr(args, k, None)
        if v is not None:
            (common if k in COMMON_KEYS else params)[k] = v
    out = common.get("out")
    return RunConfig(
        command=args.command,
        params=params,
        out=Path(out) if out is not None else None,
        seed=int(common["seed"]) if common.get("seed") is not None else None,
        threads=int(common["threads"]) if common.get("threads") is not None else None,
        export_vtk=bool(common.get("export_vtk", False)),
        config_path=cfg_path,
    )


def _apply_threads(n: int | None) -> None:
    if n is None:
        return
    if n < 1:
        raise ConfigError("thread count must be at least 1")
    try:
        import numba

        numba.set_num_threads(n)
    except (ImportError, ValueError):
        pass  # more threads than the runtime allows: keep its maximum


# -- staged output ----------------------------------------------------------------


def _stage(out: Path) -> Path:
    stage = out.parent / "_incomplete" / out.name
    if stage.exists():
        shutil.rmtree(stage)
    stage.mkdir(parents=True)
    return stage


def _commit(stage: Path, out: Path) -> None:
    out.parent.mkdir(parents=True, exist_ok=True)
    if out.exists():
        shutil.rmtree(out)
    os.replace(stage, out)
    try:
        stage.parent.rmdir()  # drop the quarantine root when it empties
    except OSError:
        pass


def _write_meta(cfg: RunConfig, stage: Path, extra: dict | None = None) -> None:
    meta = {"command": cfg.command}
    meta.update({k: v for k, v in cfg.params.items() if v is not None})
    if cfg.seed is not None:
        meta["seed"] = cfg.seed
    if cfg.export_vtk:
        meta["export_vtk"] = True
    meta.update(extra or {})
    lines = []
    for k, v in sorted(meta.items()):
        if isinstance(v, bool):
            s = "true" if v else "false"
        elif isinstance(v, (int, np.integer)):
            s = repr(int(v))
        elif isinstance(v, (float, np.floating)):
            s = repr(float(v))
        elif isinstance(v, (list, tuple)):
            s = "[" + ", ".join(
                repr(int(x)) if isinstance(x, (int, np.integer)) else repr(float(x))
                for x in v
            ) + "]"
        else:
            s = json.dumps(str(v))
        lines.append(f"{k} = {s}\n")
    (stage / "meta.toml").write_text("".join(lines))


def write_vtk_structured_points(E: BinarySet, path, name: str = "droplet") -> None:
    """Legacy ASCII structured-points snapshot of the occupancy bits.

    Cell centers become points (x fastest), values are unsigned char 0/1.
    """
    g = E.grid
    with open(path, "w") as f:
        f.write("# vtk DataFile Version 3.0\n")
        f.write(f"{name}\n")
        f.write("ASCII\n")
        f.write("DATASET STRUCTURED_POINTS\n")
        f.write(f"DIMENSIONS {g.nx} {g.ny} {g.nz}\n")
        f.write(
            f"ORIGIN {g.origin_x + 0.5 * g.h} {g.origin_y + 0.5 * g.h} {0.5 * g.h}\n"
        )
        f.write(f"SPACING {g.h} {g.h} {g.h}\n")
        f.write(f"POINT_DATA {g.n_cells}\n")
        f.write(f"SCALARS {name} unsigned_char 1\n")
        f.write("LOOKUP_TABLE default\n")
        E.bits.astype(np.uint8).ravel().tofile(f, sep=" ")
        f.write("\n")


# -- commands ---------------------------------------------------------------------


def cmd_simulate(cfg: RunConfig) -> int:
    p = cfg.params
    shape = str(p["shape"])
    if shape not in ("hemisphere", "winterbottom", "ball"):
        raise ConfigError(f"shape must be hemisphere, winterbottom or ball, got {shape!r}")
    rho = float(p["rho"])
    if rho <= 0:
        raise ConfigError("rho must be positive")
    beta0 = float(p["beta0"])
    if not -1.0 < beta0 < 1.0:
        raise ConfigError("contact cosine beta0 must lie in (-1, 1)")
    h = _parse_cell_size(p["h"])
    tau = float(p["tau"]) if p["tau"] is not None else 4.0 * h * h
    if tau <= 0:
        raise ConfigError("step size tau must be positive")
    steps = int(p["steps"])
    if steps < 1:
        raise ConfigError("steps must be at least 1")
    extremal = str(p["extremal"])
    if extremal not in ("minimal", "maximal"):
        raise ConfigError("extremal must be 'minimal' or 'maximal'")
    beta_val = float(p["beta"]) if p["beta"] is not None else beta0
    if not -1.0 < beta_val < 1.0:
        raise ConfigError("adhesion coefficient beta must lie in (-1, 1)")
    out = cfg.require_out()

    margin = 10 * h + 3.0 * np.sqrt(tau)
    if shape == "ball":
        ch = float(p["center_height"]) if p["center_height"] is not None else 1.15 * rho
        if ch < rho:
            raise ConfigError("an interior ball needs center_height >= rho")
        grid = HalfSpaceGrid.cover(rho + margin, ch + rho + margin, h, pad=4)
        E0 = rasterize_cap(grid, rho, center_height=ch)
    elif shape == "winterbottom":
        W = winterbottom.WinterbottomShape(rho, beta0)
        grid = HalfSpaceGrid.cover(
            max(W.contact_radius, rho) + margin, W.apex_height + margin, h, pad=4
        )
        E0 = W.rasterize(grid)
    else:
        grid = HalfSpaceGrid.cover(rho + margin, rho + margin, h, pad=4)
        E0 = rasterize_cap(grid, rho)
    adhesion = AdhesionField.constant(grid, beta_val)

    traj = run_flat_flow(E0, adhesion, tau, steps, extremal=extremal)

    stage = _stage(out)
    try:
        _write_meta(
            cfg,
            stage,
            {
                "tau": tau,
                "beta": beta_val,
                "grid": list(grid.shape),
                "extinction_step": traj.extinction_step
                if traj.extinction_step is not None
                else -1,
            },
        )
        with open(stage / "energies.csv", "w") as f:
            f.write("step,t,perimeter,adhesion,capillary,dissipation,volume\n")
            for k, e in enumerate(traj.energies):
                f.write(
                    f"{k},{k * tau!r},{e.perimeter!r},{e.adhesion!r},"
                    f"{e.capillary!r},{e.dissipation!r},{traj.set_at(k).volume()!r}\n"
                )
        for k in range(len(traj.sets)):
            write_cmcf1(traj.set_at(k), stage / f"step_{k:04d}.cmcf")
        if cfg.export_vtk:
            vtk = stage / "vtk"
            vtk.mkdir()
            for k in range(len(traj.sets)):
                write_vtk_structured_points(traj.set_at(k), vtk / f"step_{k:04d}.vtk")
    except BaseException:
        raise  # leave the staged directory under _incomplete for inspection
    _commit(stage, out)
    last = traj.set_at(traj.n_steps)
    print(f"simulate: {traj.n_steps} steps, final volume {last.volume():.6g} -> {out}")
    return EXIT_PASS


def cmd_consistency(cfg: RunConfig) -> int:
    p = dict(cfg.params)
    p["hs"] = _parse_h_list(p["hs"])
    out = cfg.require_out()
    exp_cfg = {
        "kind": p["kind"],
        "R0": float(p["R0"]),
        "beta0": float(p["beta0"]),
        "T": float(p["T"]),
        "hs": p["hs"],
        "n_samples": int(p["n_samples"]),
        "mono_slack_symdiff": float(p["mono_slack_symdiff"]),
        "keep_data": cfg.export_vtk,
    }
    report = verify.consistency_experiment(exp_cfg)
    stage = _stage(out)
    _write_meta(cfg, stage, {"hs": p["hs"]})
    report.save(stage / "report.json")
    if cfg.export_vtk:
        vtk = stage / "vtk"
        vtk.mkdir()
        _, _, _, traj = report.data["levels"][-1]
        ks = sorted({c["k_by_level"][-1] for c in report.cases if "k_by_level" in c})
        for k in ks:
            write_vtk_structured_points(traj.set_at(k), vtk / f"finest_step_{k:04d}.vtk")
    _commit(stage, out)
    print(f"consistency[{p['kind']}]: {'pass' if report.passed else 'FAIL'} -> {out}")
    for case in report.failing_cases()[:5]:
        print(f"  failing case: t={case.get('t')}")
    for note in report.notes:
        print(f"  note: {note}")
    return EXIT_PASS if report.passed else EXIT_FAIL


def cmd_verify(cfg: RunConfig) -> int:
    names = cfg.params["suites"]
    if isinstance(names, str):
        names = [s.strip() for s in names.split(",")] if names != "all" else list(verify.SUITES)
    unknown = [n for n in names if n not in verify.SUITES]
    if unknown:
        raise ConfigError(
            f"unknown suites: {', '.join(unknown)} (have {', '.join(verify.SUITES)})"
        )
    out = cfg.require_out()
    stage = _stage(out)
    _write_meta(cfg, stage, {"suites": ", ".join(names)})
    all_ok = True
    for name in names:
        overrides = {"seed": cfg.seed} if cfg.seed is not None else None
        try:
            report = verify.SUITES[name](overrides)
        except TypeError:
            report = verify.SUITES[name]()
        report.save(stage / f"{name}.json")
        status = "pass" if report.passed else "FAIL"
        print(f"verify[{name}]: {status}")
        for case in report.failing_cases():
            label = case.get("case", "?")
            print(f"  failing case: {label}")
        all_ok = all_ok and report.passed
    _commit(stage, out)
    return EXIT_PASS if all_ok else EXIT_FAIL


def cmd_winterbottom(cfg: RunConfig) -> int:
    p = cfg.params
    rho = float(p["rho"])
    beta0 = float(p["beta0"])
    try:
        m = winterbottom.cap_measures(rho, beta0)
        c_beta = winterbottom.isoperimetric_constant(beta0)
    except ValueError as e:
        raise ConfigError(str(e)) from e
    rows = [
        ("volume", m.volume),
        ("spherical_area", m.spherical_area),
        ("wetted_area", m.wetted_area),
        ("energy", m.energy),
        ("isoperimetric_constant", c_beta),
    ]
    if p["ball_R0"] is not None:
        try:
            shape, apex_bound = winterbottom.largest_inscribed(
                float(p["ball_R0"]), float(p["ball_height"]), beta0
            )
        except ValueError as e:
            raise ConfigError(str(e)) from e
        rows += [
            ("inscribed_rho", shape.rho),
            ("inscribed_apex_bound", int(apex_bound)),
        ]
    text = "".join(f"{k},{v!r}\n" for k, v in rows)
    sys.stdout.write(text)
    if cfg.out is not None:
        stage = _stage(cfg.out)
        _write_meta(cfg, stage)
        (stage / "measures.csv").write_text(text)
        _commit(stage, cfg.out)
    return EXIT_PASS


# -- entry point ------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="TOML config; flags override it")
    common.add_argument("--out", type=Path, help="output directory")
    common.add_argument("--seed", type=int, help="seed for randomized suites")
    common.add_argument("--threads", type=int, help="numba thread count")
    common.add_argument(
        "--export-vtk", dest="export_vtk", action="store_true", default=None,
        help="additionally write legacy ASCII VTK snapshots",
    )
    parser = argparse.ArgumentParser(
        prog="dropflow",
        description="Minimizing-movement droplet flows with prescribed contact angle.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("simulate", parents=[common], help="run a flat flow, persist it")
    ps.add_argument("--shape", choices=("hemisphere", "winterbottom", "ball"))
    ps.add_argument("--rho", type=float, help="shape radius")
    ps.add_argument("--beta0", type=float, help="contact cosine of the initial shape")
    ps.add_argument("--beta", type=float, help="adhesion coefficient (default beta0)")
    ps.add_argument("--h", help="cell size, float or fraction like 1/32")
    ps.add_argument("--tau", type=float, help="step size (default 4 h^2)")
    ps.add_argument("--steps", type=int)
    ps.add_argument("--extremal", choices=("minimal", "maximal"))
    ps.add_argument("--center-height", dest="center_height", type=float,
                    help="interior-ball center height (ball shape)")

    pc = sub.add_parser("consistency", parents=[common],
                        help="flat flow vs smooth reference across refinements")
    pc.add_argument("--kind", choices=("hemisphere", "winterbottom"))
    pc.add_argument("--R0", type=float)
    pc.add_argument("--beta0", type=float)
    pc.add_argument("--T", type=float)
    pc.add_argument("--hs", help="comma list of cell sizes, e.g. 1/16,1/20,1/24")
    pc.add_argument("--n-samples", dest="n_samples", type=int)

    pv = sub.add_parser("verify", parents=[common], help="run verification suites")
    pv.add_argument("--suites", help="comma list or 'all'")

    pw = sub.add_parser("winterbottom", parents=[common],
                        help="closed-form cap measures as CSV")
    pw.add_argument("--rho", type=float)
    pw.add_argument("--beta0", type=float)
    pw.add_argument("--ball-R0", dest="ball_R0", type=float,
                    help="with --ball-height, also report the inscribed cap")
    pw.add_argument("--ball-height", dest="ball_height", type=float)
    return parser


_DEFAULTS = {
    "simulate": SIMULATE_DEFAULTS,
    "consistency": CONSISTENCY_CLI_DEFAULTS,
    "verify": VERIFY_DEFAULTS,
    "winterbottom": WINTERBOTTOM_DEFAULTS,
}

_COMMANDS = {
    "simulate": cmd_simulate,
    "consistency": cmd_consistency,
    "verify": cmd_verify,
    "winterbottom": cmd_winterbottom,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _resolve(args, _DEFAULTS[args.command])
        _apply_threads(cfg.threads)
        return _COMMANDS[args.command](cfg)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as e:
        # domain preconditions raised by library constructors
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except RuntimeError as e:
        print(f"run failed: {e}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    raise SystemExit(main())
