"""Verification suites confronting the discrete flow with its guarantees.

Each suite runs a deterministic battery of cases, measures the quantities a
guarantee speaks about, fits the free constants that the estimates only
prove to exist, and asserts the bounds with explicit discretization slack.
Reports serialize to stable JSON: same config in, byte-identical report out.

The suites:

  consistency_experiment  flat flows vs the smooth reference under joint
                          (tau, h) refinement with tau = 4 h^2
  ball_suite              interior-ball radius recursion and persistence /
                          exclusion of small balls under the flow
  density_suite           one-step displacement scaling ~ sqrt(tau) and
                          interface density bounds
  holder_suite            1/2-Hölder continuity of t -> E(t) in volume
  barrier_suite           one step trapped between forced marker flows
  comparison_suite        discrete inclusion/disjointness preservation and
                          smooth strong comparison
  isoperimetric_suite     capillary isoperimetric inequality at fixed angle
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import axisym, winterbottom
from .axisym import AxisymFront, SmoothFlowConfig
from .energy import AdhesionField, capillary
from .flatflow import minimize_step, run_flat_flow
from .grid import (
    BinarySet,
    HalfSpaceGrid,
    hausdorff,
    perimeter_in_ball,
    ball_volume_fraction,
    rasterize_box,
    rasterize_cap,
    sample_bits_at_points,
    signed_distance,
)


def _as_py(obj):
    """Recursively convert numpy scalars/arrays so json output is canonical."""
    if isinstance(obj, dict):
        return {str(k): _as_py(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_as_py(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_as_py(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


@dataclass
class SuiteReport:
    name: str
    cases: list
    fitted_constants: dict
    passed: bool
    notes: list = field(default_factory=list)

    def to_json(self) -> str:
        payload = {
            "name": self.name,
            "pass": bool(self.passed),
            "fitted_constants": _as_py(self.fitted_constants),
            "cases": _as_py(self.cases),
            "notes": _as_py(self.notes),
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"

    def save(self, path) -> None:
        with open(path, "w") as f:
            f.write(self.to_json())

    def failing_cases(self) -> list:
        return [c for c in self.cases if not c.get("pass", True)]


def rasterize_front(grid: HalfSpaceGrid, front: AxisymFront) -> BinarySet:
    """Voxelize the revolved marker profile by cell-center membership."""
    x, y, z = grid.center_axes()
    pts = np.empty((grid.n_cells, 3))
    pts[:, 0] = np.broadcast_to(x, grid.shape).ravel()
    pts[:, 1] = np.broadcast_to(y, grid.shape).ravel()
    pts[:, 2] = np.broadcast_to(z, grid.shape).ravel()
    bits = front.contains_points(pts).reshape(grid.shape)
    return BinarySet(grid, bits)


def _loglog_slope(xs, ys) -> float:
    xs = np.log(np.asarray(xs, float))
    ys = np.log(np.asarray(ys, float))
    if xs.size < 2:
        return float("nan")
    return float(np.polyfit(xs, ys, 1)[0])


# -- consistency --------------------------------------------------------------

CONSISTENCY_DEFAULTS = {
    "kind": "hemisphere",  # or "winterbottom"
    "R0": 0.6,
    "beta0": 0.0,
    "T": 0.05,
    "hs": (1.0 / 32, 1.0 / 45, 1.0 / 64),
    "n_samples": 8,
    "extremal": "minimal",
    "n_markers": 240,
    "hausdorff_tol_cells": 3.0,
    "symdiff_rel_tol": 0.05,
    "mono_slack_hausdorff": 0.0,
    "mono_slack_symdiff": 0.0,
    "keep_data": False,
}


def consistency_experiment(config: dict | None = None) -> SuiteReport:
    """Joint refinement study: flat flow against the smooth reference.

    For each level j the flow runs with tau_j = 4 h_j^2; at the sample times
    i T / n the voxel state E(tau_j, floor(t/tau_j)) is compared with the
    reference droplet (exact shrinking hemisphere for beta0 = 0, otherwise
    the marker solver) rasterized on the same grid. Hausdorff gap and
    relative symmetric difference must not increase under refinement and the
    finest level must meet the stated tolerances at every sample time.
    """
    cfg = dict(CONSISTENCY_DEFAULTS)
    cfg.update(config or {})
    kind = cfg["kind"]
    beta0 = float(cfg["beta0"])
    R0 = float(cfg["R0"])
    T = float(cfg["T"])
    hs = sorted(cfg["hs"], reverse=True)
    n = int(cfg["n_samples"])
    times = [T * (i + 1) / n for i in range(n)]

    if kind == "hemisphere":
        if beta0 != 0.0:
            raise ValueError("the exact-law reference requires beta0 = 0")
        if T >= 0.25 * R0 * R0:
            raise ValueError("horizon exceeds the hemisphere extinction time")
        lat0, ht0 = R0, R0
    elif kind == "winterbottom":
        sh = winterbottom.WinterbottomShape(R0, beta0)
        lat0 = sh.rho if beta0 >= 0 else sh.contact_radius
        ht0 = sh.apex_height
    else:
        raise ValueError(f"unknown consistency kind {kind!r}")

    levels = []
    for h in hs:
        tau = 4.0 * h * h
        grid = HalfSpaceGrid.cover(lat0 + 10 * h, ht0 + 10 * h, h, pad=5)
        if kind == "hemisphere":
            E0 = rasterize_cap(grid, R0)
        else:
            E0 = winterbottom.WinterbottomShape(R0, beta0).rasterize(grid)
        beta = AdhesionField.constant(grid, beta0)
        n_steps = int(np.ceil(T / tau - 1e-9))
        traj = run_flat_flow(E0, beta, tau, n_steps, extremal=cfg["extremal"])
        levels.append((h, tau, grid, traj))
    h_fin, tau_fin, _, traj_fin = levels[-1]
    if traj_fin.extinction_step is not None and traj_fin.extinction_step * tau_fin <= T:
        raise RuntimeError("flat flow extinct before the horizon at the finest level")

    # each level is evaluated at its own representable time round(t/tau)*tau,
    # so the comparison measures scheme error without the O(tau) clock lag
    ksteps = np.zeros((len(hs), n), int)
    tgrid = np.zeros((len(hs), n))
    for j, (h, tau, grid, traj) in enumerate(levels):
        for i, t in enumerate(times):
            k = min(max(1, int(round(t / tau))), traj.n_steps)
            ksteps[j, i] = k
            tgrid[j, i] = k * tau

    if kind == "hemisphere":

        def reference(grid, tk):
            return rasterize_cap(grid, axisym.exact_hemisphere(R0, tk))

    else:
        front0 = AxisymFront.cap(R0, beta0, n=int(cfg["n_markers"]))
        want = sorted({round(tk, 12) for tk in tgrid.ravel()})
        res = axisym.evolve(front0, max(want) + 1e-9, SmoothFlowConfig(beta0), save_times=want)
        if res.extinct or res.pinched:
            raise RuntimeError("smooth reference died before the horizon; shorten T")
        snaps = {round(s.t, 12): s for s in res.snapshots}
        if not all(w in snaps for w in want):
            raise RuntimeError("reference snapshots do not cover the sample times")

        def reference(grid, tk):
            return rasterize_front(grid, snaps[round(tk, 12)])

    hd = np.zeros((len(hs), n))
    sdrel = np.zeros((len(hs), n))
    for j, (h, tau, grid, traj) in enumerate(levels):
        for i, t in enumerate(times):
            E = traj.set_at(int(ksteps[j, i]))
            ref = reference(grid, tgrid[j, i])
            if E.volume() == 0.0:
                # a coarse level may die before the horizon (the finest one
                # raised above); distance to an empty set is infinite
                hd[j, i] = np.inf
            else:
                hd[j, i] = hausdorff(E, ref).max
            sdrel[j, i] = E.symdiff_volume(ref) / ref.volume()

    cases = []
    slack_h = float(cfg["mono_slack_hausdorff"])
    slack_s = float(cfg["mono_slack_symdiff"])
    tol_hd = float(cfg["hausdorff_tol_cells"]) * hs[-1]
    tol_sd = float(cfg["symdiff_rel_tol"])
    for i, t in enumerate(times):
        mono_h = all(hd[j + 1, i] <= hd[j, i] + slack_h for j in range(len(hs) - 1))
        mono_s = all(sdrel[j + 1, i] <= sdrel[j, i] + slack_s for j in range(len(hs) - 1))
        ok = (
            (mono_h or len(hs) == 1)
            and (mono_s or len(hs) == 1)
            and hd[-1, i] <= tol_hd
            and sdrel[-1, i] <= tol_sd
        )
        cases.append(
            {
                "t": t,
                "t_by_level": list(tgrid[:, i]),
                "k_by_level": [int(v) for v in ksteps[:, i]],
                "hausdorff_by_level": list(hd[:, i]),
                "symdiff_rel_by_level": list(sdrel[:, i]),
                "monotone_hausdorff": mono_h,
                "monotone_symdiff": mono_s,
                "finest_hausdorff": hd[-1, i],
                "finest_hausdorff_bound": tol_hd,
                "finest_symdiff_rel": sdrel[-1, i],
                "finest_symdiff_rel_bound": tol_sd,
                "pass": ok,
            }
        )
    rate = _loglog_slope(hs, hd.mean(axis=1))
    fitted = {
        "hs": list(map(float, hs)),
        "taus": [4.0 * h * h for h in hs],
        "hausdorff_rate_vs_h": float(rate) if np.isfinite(rate) else None,
        "max_finest_hausdorff": float(hd[-1].max()),
        "max_finest_symdiff_rel": float(sdrel[-1].max()),
    }
    # how much of the reference volume change the finest flow realized;
    # values near zero mean the minimizer pinned (per-step displacement
    # kappa*tau below the cell size is not representable by voxel flips)
    fin_grid, fin_traj = levels[-1][2], levels[-1][3]
    v0 = fin_traj.set_at(0).volume()
    v_end = fin_traj.set_at(int(ksteps[-1, -1])).volume()
    ref_moved = v0 - reference(fin_grid, tgrid[-1, -1]).volume()
    fitted["finest_volume_motion_ratio"] = (
        (v0 - v_end) / ref_moved if abs(ref_moved) > 1e-12 else None
    )
    report = SuiteReport(
        name=f"consistency[{kind}]",
        cases=cases,
        fitted_constants=fitted,
        passed=all(c["pass"] for c in cases),
    )
    ratio = fitted["finest_volume_motion_ratio"]
    if ratio is not None and ratio < 0.5:
        report.notes.append(
            "finest flow realized {:.0%} of the reference volume change: "
            "per-step displacement is below one cell at tau = 4h^2, so the "
            "lattice minimizer pins instead of tracking the flow".format(max(ratio, 0.0))
        )
    if cfg["keep_data"]:
        report.data = {"levels": levels, "times": times}
    return report


# -- ball persistence ----------------------------------------------------------

BALL_DEFAULTS = {
    "recursion_h": 1.0 / 32,
    "recursion_tau": 0.01,
    "recursion_steps": 5,
    "persist_h": 1.0 / 64,
    "persist_steps": 10,
    "ball_R0": 0.4,
    "beta": 0.3,
    "beta0": 0.65,
}


def ball_suite(config: dict | None = None) -> SuiteReport:
    """Radius recursion for interior balls and ball persistence/exclusion.

    Cases: (1) five steps from an interior unit ball obey
    rho_k^2 >= rho_{k-1}^2 - 5 tau - 3 h rho_{k-1} and the cumulative bound
    rho_k^2 >= 1 - 5 k tau - 3h; (2) a droplet containing a ball B_R0(p)
    keeps the concentric ball of radius beta0 R0 / 16 for every computed
    step, and theta0_fit = k tau / R0^2 records how long that was checked;
    (3) a droplet disjoint from B_R0(p) never enters that smaller ball.
    """
    cfg = dict(BALL_DEFAULTS)
    cfg.update(config or {})
    beta_val = float(cfg["beta"])
    beta0 = float(cfg["beta0"])
    if beta0 <= abs(beta_val):
        raise ValueError("need beta0 > the field bound |beta|")
    cases = []

    # interior ball radius recursion
    h = float(cfg["recursion_h"])
    tau = float(cfg["recursion_tau"])
    ksteps = int(cfg["recursion_steps"])
    grid = HalfSpaceGrid.cover(1.0 + 8 * h, 2.3 + 8 * h, h, pad=4)
    E = rasterize_cap(grid, 1.0, center_height=1.15)
    beta = AdhesionField.constant(grid, 0.0)
    rho_prev = (3.0 * E.volume() / (4.0 * np.pi)) ** (1.0 / 3.0)
    radii = [rho_prev]
    ok_rec = True
    for k in range(1, ksteps + 1):
        E = minimize_step(E, beta, tau).minimal
        rho = (3.0 * E.volume() / (4.0 * np.pi)) ** (1.0 / 3.0)
        if rho ** 2 < rho_prev ** 2 - 5.0 * tau - 3.0 * h * rho_prev:
            ok_rec = False
        if rho ** 2 < 1.0 - 5.0 * k * tau - 3.0 * h:
            ok_rec = False
        radii.append(rho)
        rho_prev = rho
    cases.append(
        {
            "case": "radius_recursion",
            "h": h,
            "tau": tau,
            "radii": radii,
            "per_step_bound": "rho_k^2 >= rho_{k-1}^2 - 5 tau - 3 h rho_{k-1}",
            "cumulative_bound": "rho_k^2 >= 1 - 5 k tau - 3 h",
            "pass": ok_rec,
        }
    )

    # persistence of a small concentric ball inside a droplet
    hp = float(cfg["persist_h"])
    taup = 4.0 * hp * hp
    R0 = float(cfg["ball_R0"])
    p = np.array([0.0, 0.0, 0.22])
    r_small = beta0 * R0 / 16.0
    gridp = HalfSpaceGrid.cover(0.78, 0.85, hp, pad=5)
    E0 = rasterize_cap(gridp, 0.62, center_height=0.1)
    ball_pts = _ball_cell_centers(gridp, p, R0)
    if not sample_bits_at_points(E0, ball_pts).all():
        raise RuntimeError("persistence case setup: droplet does not contain the ball")
    small_pts = _ball_cell_centers(gridp, p, r_small)
    betap = AdhesionField.constant(gridp, beta_val)
    traj = run_flat_flow(E0, betap, taup, int(cfg["persist_steps"]))
    k_pass = 0
    for k in range(1, traj.n_steps + 1):
        if sample_bits_at_points(traj.set_at(k), small_pts).all():
            k_pass = k
        else:
            break
    theta0_fit = k_pass * taup / R0 ** 2
    cases.append(
        {
            "case": "stay_inside",
            "h": hp,
            "tau": taup,
            "R0": R0,
            "inner_radius": r_small,
            "inner_cells": int(len(small_pts)),
            "steps_checked": traj.n_steps,
            "steps_holding": k_pass,
            "theta0_fit": theta0_fit,
            "pass": k_pass == traj.n_steps,
        }
    )

    # exclusion from a disjoint ball
    gridx = HalfSpaceGrid.cover(1.3, 0.5, hp, pad=5)
    Ex = rasterize_cap(gridx, 0.3)
    px = np.array([0.85, 0.0, 0.1])
    if Ex.volume() <= 0:
        raise RuntimeError("exclusion case setup failed")
    small_x = _ball_cell_centers(gridx, px, r_small)
    betax = AdhesionField.constant(gridx, beta_val)
    trajx = run_flat_flow(Ex, betax, taup, int(cfg["persist_steps"]))
    ok_out = all(
        not sample_bits_at_points(trajx.set_at(k), small_x).any()
        for k in range(1, trajx.n_steps + 1)
    )
    cases.append(
        {
            "case": "stay_outside",
            "h": hp,
            "tau": taup,
            "ball_center": list(px),
            "inner_radius": r_small,
            "steps_checked": trajx.n_steps,
            "pass": ok_out,
        }
    )

    fitted = {"theta0_fit": theta0_fit, "radii_recursion": radii}
    return SuiteReport(
        name="ball",
        cases=cases,
        fitted_constants=fitted,
        passed=all(c["pass"] for c in cases),
    )


def _ball_cell_centers(grid: HalfSpaceGrid, center, radius) -> np.ndarray:
    x, y, z = grid.center_axes()
    inside = (x - center[0]) ** 2 + (y - center[1]) ** 2 + (z - center[2]) ** 2 <= radius ** 2
    kk, jj, ii = np.nonzero(inside)
    pts = np.empty((kk.size, 3))
    pts[:, 0] = grid.origin_x + (ii + 0.5) * grid.h
    pts[:, 1] = grid.origin_y + (jj + 0.5) * grid.h
    pts[:, 2] = (kk + 0.5) * grid.h
    if pts.shape[0] == 0:
        raise RuntimeError("probe ball contains no cell centers; refine the grid")
    return pts


# -- density estimates ---------------------------------------------------------

DENSITY_DEFAULTS = {
    "hs": (1.0 / 32, 1.0 / 45, 1.0 / 64),
    "tau_over_h2": 16.0,  # tau_j = 16 h_j^2, so tau = (0.0156, ..., 0.0039)
    "ball_h": 1.0 / 48,
    "ball_taus": (0.04, 0.01, 0.0025),
    "beta": 0.2,
    "ball_radius_fracs": (2.0, 4.0, 6.0),  # in cells, clipped to sqrt(tau)
    "max_probes": 40,
    "exponent_range": (0.4, 0.6),
    "theta_min": 0.05,
}


def density_suite(config: dict | None = None) -> SuiteReport:
    """One-step displacement scaling and interface density bounds.

    The sqrt(tau) displacement law is saturated by corners and creases;
    smooth pieces move like tau, and at the other extreme a set whose
    dissipation volume integral drops below its perimeter vanishes in one
    step, so both ends of a fixed-grid tau ladder leave the corner-scaling
    regime. The battery therefore runs each nonsmooth case (box, union
    crease, notched cap) on a self-similar ladder tau_j proportional to
    h_j^2: the displacement stays a fixed number of cells, the discrete
    rounding constant does not drift with sqrt(tau)/h, and the fitted
    exponent isolates the tau-scaling. The interior-ball case is reported
    separately against its stationarity oracle on the coarser fixed grid
    (its fine-grid displacements pin below one cell). Volume and perimeter
    densities are probed in balls centered on interface cells of each
    minimizer.
    """
    cfg = dict(DENSITY_DEFAULTS)
    cfg.update(config or {})
    hs = sorted(cfg["hs"], reverse=True)
    theta_c = float(cfg["tau_over_h2"])
    rungs = [(h, theta_c * h * h) for h in hs]
    hb = float(cfg["ball_h"])
    ball_taus = sorted(cfg["ball_taus"], reverse=True)
    beta_val = float(cfg["beta"])
    p_lo, p_hi = cfg["exponent_range"]

    # feature sizes ~4x sqrt(tau_max) keep the whole ladder inside the
    # corner-scaling regime and far from one-step extinction
    def make_battery(h):
        g1 = HalfSpaceGrid.cover(0.65, 0.8, h, pad=5)
        box = rasterize_box(g1, (-0.45, 0.45), (-0.45, 0.45), (0.0, 0.6))
        g2 = HalfSpaceGrid.cover(1.02, 0.68, h, pad=5)
        union = rasterize_cap(g2, 0.5, center_xy=(-0.42, 0.0)) | rasterize_cap(
            g2, 0.5, center_xy=(0.42, 0.0)
        )
        g3 = HalfSpaceGrid.cover(0.85, 0.85, h, pad=5)
        notched = rasterize_cap(g3, 0.65) - rasterize_box(
            g3, (-0.12, 0.12), (-0.65, 0.65), (0.42, 0.7)
        )
        return {"box": box, "union": union, "notch": notched}

    cases = []
    disp = {"box": [], "union": [], "notch": []}
    taus = [tau for _, tau in rungs]
    theta_fit = 1.0
    kappa_perim = 0.0
    k_disp = 0.0
    for h, tau in rungs:
        battery = make_battery(h)
        for name, E0 in battery.items():
            beta = AdhesionField.constant(E0.grid, beta_val)
            sd0 = signed_distance(E0)
            res = minimize_step(E0, beta, tau, sd0=sd0)
            Emin = res.minimal
            flipped = Emin.bits != E0.bits
            d = float(np.max(np.abs(sd0.values[flipped]))) if flipped.any() else 0.0
            disp[name].append(d)
            if d > 0:
                k_disp = max(k_disp, d / np.sqrt(tau))
            # density probes around interface cells of the minimizer
            probes = _probe_points(Emin, int(cfg["max_probes"]))
            radii = [
                rc * h
                for rc in cfg["ball_radius_fracs"]
                if rc * h <= max(np.sqrt(tau), 2.6 * h)
            ]
            for r in radii:
                for q in probes:
                    frac = ball_volume_fraction(Emin, q, r)
                    theta_fit = min(theta_fit, frac, 1.0 - frac)
                    kappa_perim = max(kappa_perim, perimeter_in_ball(Emin, q, r) / r ** 2)
    for name in ("box", "union", "notch"):
        ds = disp[name]
        fit_ok = min(ds) > 0
        row = {
            "case": name,
            "hs": list(hs),
            "taus": taus,
            "displacements": ds,
            "exponent": _loglog_slope(taus, ds) if fit_ok else None,
        }
        row["pass"] = bool(
            fit_ok
            and all(d >= 2.0 * h for d, h in zip(ds, hs))
            and p_lo <= row["exponent"] <= p_hi
        )
        cases.append(row)

    # interior ball against the stationarity radius law rho(tau); the
    # displacement is 1 - rho(tau), linear in tau, hence no exponent window,
    # and the smallest tau may pin (move less than a cell)
    g4 = HalfSpaceGrid.cover(1.08, 2.4, hb, pad=4)
    ball = rasterize_cap(g4, 1.0, center_height=1.2)
    beta_b = AdhesionField.constant(g4, beta_val)
    sd0b = signed_distance(ball)
    ball_ds = []
    for tau in ball_taus:
        resb = minimize_step(ball, beta_b, tau, sd0=sd0b)
        flippedb = resb.minimal.bits != ball.bits
        ball_ds.append(float(np.max(np.abs(sd0b.values[flippedb]))) if flippedb.any() else 0.0)
    oracle = [0.5 * (1.0 - np.sqrt(1.0 - 8.0 * t)) for t in ball_taus]
    ball_row = {
        "case": "ball",
        "h": hb,
        "taus": list(ball_taus),
        "displacements": ball_ds,
        "oracle_displacements": oracle,
        "oracle_agreement": bool(
            all(abs(d - o) <= 2.5 * hb for d, o in zip(ball_ds, oracle))
        ),
    }
    ball_row["pass"] = ball_row["oracle_agreement"]
    cases.append(ball_row)

    # stationary droplet: tiny tau moves nothing
    gs = HalfSpaceGrid.cover(0.7, 0.85, hs[-1], pad=5)
    W = winterbottom.WinterbottomShape(0.5, 0.4).rasterize(gs)
    ress = minimize_step(W, AdhesionField.constant(gs, 0.4), 1e-5)
    still = int(np.sum(ress.minimal.bits != W.bits))
    cases.append({"case": "stationary", "tau": 1e-5, "cells_flipped": still, "pass": still == 0})

    envelope = [max(disp[n][i] for n in ("box", "union", "notch")) for i in range(len(taus))]
    p_fit = _loglog_slope(taus, envelope)
    theta_ok = theta_fit >= float(cfg["theta_min"])
    ball_fit = _loglog_slope(ball_taus, ball_ds) if min(ball_ds) > 0 else None
    fitted = {
        "displacement_exponent": p_fit,
        "displacement_exponent_ball": ball_fit,
        "K_displacement": k_disp,
        "theta_fit": theta_fit,
        "perimeter_density_max": kappa_perim,
    }
    ok = all(c["pass"] for c in cases) and (p_lo <= p_fit <= p_hi) and theta_ok
    return SuiteReport(
        name="density",
        cases=cases
        + [
            {
                "case": "envelope_exponent",
                "exponent": p_fit,
                "range": [p_lo, p_hi],
                "pass": bool(p_lo <= p_fit <= p_hi),
            },
            {
                "case": "theta_floor",
                "theta_fit": theta_fit,
                "floor": cfg["theta_min"],
                "pass": bool(theta_ok),
            },
        ],
        fitted_constants=fitted,
        passed=ok,
    )


def _probe_points(E: BinarySet, k: int) -> np.ndarray:
    pts = E.grid.boundary_points(E.boundary_mask())
    if len(pts) == 0:
        return np.empty((0, 3))
    step = max(1, len(pts) // k)
    return pts[::step][:k]


# -- Hölder continuity ---------------------------------------------------------

HOLDER_DEFAULTS = {
    "R0": 0.6,
    "h": 1.0 / 64,
    "tau": 0.01,
    "T": 0.08,
    "max_anchors": 14,
    "exponent_floor": 0.45,
}


def holder_suite(config: dict | None = None, trajectory=None) -> SuiteReport:
    """Time continuity |E(t) symdiff E(s)| <= C |t - s|^(1/2) on a flat flow.

    The default run uses tau large enough that each step moves at least a
    cell (kappa tau > h); below that the lattice pins and every pair has
    zero symmetric difference, leaving nothing to fit. Zero-symdiff pairs
    are excluded from the log-log fit; pairs spanning extinction would be
    excluded too and are reported separately. The smooth hemisphere actually
    moves with exponent 1; the assertion is only the one-sided guarantee
    that the fit is not slower than 0.45.
    """
    cfg = dict(HOLDER_DEFAULTS)
    cfg.update(config or {})
    if trajectory is None:
        h = float(cfg["h"])
        R0 = float(cfg["R0"])
        tau = float(cfg["tau"])
        grid = HalfSpaceGrid.cover(R0 + 10 * h, R0 + 10 * h, h, pad=5)
        E0 = rasterize_cap(grid, R0)
        beta = AdhesionField.constant(grid, 0.0)
        trajectory = run_flat_flow(E0, beta, tau, int(np.floor(cfg["T"] / tau)))
    tau = trajectory.tau
    n = trajectory.n_steps
    ext = trajectory.extinction_step
    # the continuity estimate speaks about t, s >= tau, so anchor from step 1
    anchors = sorted(set(np.linspace(1, n, int(cfg["max_anchors"]), dtype=int)))
    pairs = []
    skipped_extinct = 0
    for a in range(len(anchors)):
        for b in range(a + 1, len(anchors)):
            ka, kb = anchors[a], anchors[b]
            if kb == ka:
                continue
            if ext is not None and (ka >= ext or kb >= ext):
                skipped_extinct += 1
                continue
            sv = trajectory.set_at(ka).symdiff_volume(trajectory.set_at(kb))
            if sv > 0:
                pairs.append({"k": [int(ka), int(kb)], "dt": (kb - ka) * tau, "symdiff": sv})
    if len(pairs) < 5:
        raise RuntimeError("not enough usable pairs for the continuity fit")
    dts = [p["dt"] for p in pairs]
    svs = [p["symdiff"] for p in pairs]
    expo = _loglog_slope(dts, svs)
    c_fit = max(s / np.sqrt(d) for s, d in zip(svs, dts))
    ok = expo >= float(cfg["exponent_floor"])
    fitted = {"holder_exponent": expo, "C_holder": c_fit, "tau": tau}
    return SuiteReport(
        name="holder",
        cases=[
            {
                "case": "exponent_fit",
                "n_pairs": len(pairs),
                "pairs_spanning_extinction": skipped_extinct,
                "exponent": expo,
                "floor": cfg["exponent_floor"],
                "C_holder": c_fit,
                "pass": bool(ok),
            }
        ],
        fitted_constants=fitted,
        passed=ok,
    )


# -- barrier trapping ----------------------------------------------------------

BARRIER_DEFAULTS = {
    "R0": 0.7,
    "beta0": 0.0,
    "s": 0.05,
    "r_off": 0.06,
    "h": 1.0 / 64,
    "margin_cells": 2.0,
    "n_markers": 200,
    "vacuous_tau": 0.5,
}


def barrier_suite(config: dict | None = None) -> SuiteReport:
    """One flat-flow step trapped strictly between forced marker flows.

    The barriers are equilibrium caps of radii R0 -+ (r_off + s) at contact
    cosines beta0 -+ s, run with forcing -s / +s for one step time
    tau = 4 h^2; forced flow preserves equilibrium caps exactly, so the
    barrier hypothesis sd_{G_0}(x)/tau > -kappa(x) + s/2 holds with margin
    close to s/2 minus the curvature drift kappa^2 tau (hence R0 large
    enough that the drift stays well under s/2). The hypothesis is checked
    along the evolved barrier markers before asserting inclusion. A
    deliberately oversized tau (longer than the barrier's life) must be
    reported as a failed hypothesis with no inclusion claim.
    """
    cfg = dict(BARRIER_DEFAULTS)
    cfg.update(config or {})
    R0 = float(cfg["R0"])
    beta0 = float(cfg["beta0"])
    s = float(cfg["s"])
    h = float(cfg["h"])
    tau = 4.0 * h * h
    margin = float(cfg["margin_cells"]) * h
    cases = []

    front = AxisymFront.cap(R0, beta0, n=int(cfg["n_markers"]))
    scfg = SmoothFlowConfig(beta0)
    delta = float(cfg["r_off"]) + s
    lo0 = AxisymFront.cap(R0 - delta, beta0 - s, n=int(cfg["n_markers"]))
    hi0 = AxisymFront.cap(R0 + delta, beta0 + s, n=int(cfg["n_markers"]))
    lo = axisym.evolve(
        lo0, tau, SmoothFlowConfig(beta0 - s, forcing=-s, dt_safety=scfg.dt_safety)
    )
    hi = axisym.evolve(
        hi0, tau, SmoothFlowConfig(beta0 + s, forcing=+s, dt_safety=scfg.dt_safety)
    )
    hy_lo = _barrier_hypothesis(lo0, lo.final, beta0 - s, s, tau, side=-1.0)
    hy_hi = _barrier_hypothesis(hi0, hi.final, beta0 + s, s, tau, side=+1.0)

    grid = HalfSpaceGrid.cover(R0 + float(cfg["r_off"]) + s + 10 * h, R0 + 0.25, h, pad=5)
    E0 = rasterize_cap(grid, R0) if beta0 == 0 else winterbottom.WinterbottomShape(
        R0, beta0
    ).rasterize(grid)
    beta = AdhesionField.constant(grid, beta0)
    res = minimize_step(E0, beta, tau)
    ok_incl = None
    margins = None
    if hy_lo["holds"] and hy_hi["holds"]:
        margins = {}
        for name, E in (("minimal", res.minimal), ("maximal", res.maximal)):
            bp = grid.boundary_points(E.boundary_mask())
            rz = np.stack([np.hypot(bp[:, 0], bp[:, 1]), bp[:, 2]], axis=1)
            inside_hi = hi.final.contains_rz(rz)
            outside_lo = ~lo.final.contains_rz(rz)
            d_hi = float(np.min(hi.final.distance_rz(rz)))
            d_lo = float(np.min(lo.final.distance_rz(rz)))
            margins[name] = {
                "inside_upper": bool(inside_hi.all()),
                "outside_lower": bool(outside_lo.all()),
                "distance_to_upper": d_hi,
                "distance_to_lower": d_lo,
            }
        ok_incl = all(
            m["inside_upper"] and m["outside_lower"]
            and m["distance_to_upper"] >= margin and m["distance_to_lower"] >= margin
            for m in margins.values()
        )
    cases.append(
        {
            "case": "trap",
            "h": h,
            "tau": tau,
            "s": s,
            "hypothesis_lower": hy_lo,
            "hypothesis_upper": hy_hi,
            "margins": margins,
            "margin_bound": margin,
            "pass": bool(ok_incl) if ok_incl is not None else False,
        }
    )

    # degenerate: zero offsets collapse both barriers onto the plain flow
    lo_d, hi_d = axisym.barrier_flows(front, 0.0, 0.0, scfg, tau)
    gap = float(np.max(hi_d.final.distance_rz(np.stack([lo_d.final.r, lo_d.final.z], axis=1))))
    cases.append(
        {
            "case": "degenerate_s0",
            "barrier_gap": gap,
            "informational": True,
            "pass": bool(gap <= 4 * h),
        }
    )

    # vacuous: tau longer than the barrier flow survives
    vac_tau = float(cfg["vacuous_tau"])
    try:
        lo_v, hi_v = axisym.barrier_flows(front, float(cfg["r_off"]), s, scfg, vac_tau)
        vac_failed = lo_v.final is None or hi_v.final is None
    except (RuntimeError, ValueError):
        vac_failed = True
    cases.append(
        {
            "case": "vacuous_large_tau",
            "tau": vac_tau,
            "hypothesis": "failed" if vac_failed else "unexpectedly held",
            "inclusion_asserted": False,
            "pass": bool(vac_failed),
        }
    )

    fitted = {
        "hypothesis_margin_lower": hy_lo["min_margin"],
        "hypothesis_margin_upper": hy_hi["min_margin"],
    }
    return SuiteReport(
        name="barrier",
        cases=cases,
        fitted_constants=fitted,
        passed=all(c["pass"] for c in cases),
    )


def _barrier_hypothesis(g0: AxisymFront, g_tau: AxisymFront | None, beta_eff, s, tau, side):
    """Margin of the trapping inequality sd_{G0}(x)/tau > -kappa(x) + s/2.

    side = +1 checks the outer barrier (the flow must stay inside it);
    side = -1 checks the mirrored inequality for the inner barrier, which is
    the same statement applied to the complement.
    """
    if g_tau is None:
        return {"holds": False, "min_margin": None, "reason": "barrier flow died before tau"}
    kap, _, _ = g_tau.geometry(beta_eff)
    rz = np.stack([g_tau.r, g_tau.z], axis=1)
    d = g0.distance_rz(rz)
    sd = np.where(g0.contains_rz(rz), -d, d)
    margin = side * (sd / tau + kap) - 0.5 * s
    return {
        "holds": bool(np.all(margin > 0)),
        "min_margin": float(np.min(margin)),
        "reason": None,
    }


# -- comparison principles -----------------------------------------------------

COMPARISON_DEFAULTS = {
    "seed": 20240311,
    "n_nested": 25,
    "n_disjoint": 25,
    "h": 1.0 / 24,
    "n_smooth": 10,
    "smooth_T": 0.01,
}


def comparison_suite(config: dict | None = None) -> SuiteReport:
    """Inclusion and disjointness preservation, discrete and smooth.

    Discrete side: for nested droplets with the inner one carrying the
    larger adhesion, one step preserves inclusion (minimal in minimal,
    maximal in maximal); for disjoint droplets with beta_1 + beta_2 >= 0 and
    gap >= 4h, the minimal minimizers stay disjoint. Both follow from unary
    dominance of the two cut problems, which is checked per case as the
    hypothesis. Smooth side: strictly nested marker fronts with ordered
    forcings and angles stay strictly separated.
    """
    cfg = dict(COMPARISON_DEFAULTS)
    cfg.update(config or {})
    rng = np.random.default_rng(int(cfg["seed"]))
    h = float(cfg["h"])
    cases = []

    grid = HalfSpaceGrid.cover(0.95, 0.75, h, pad=5)
    x, y, z = grid.center_axes()
    bottom_idx = 0

    def joint_mask(sd_e, sd_f, tau):
        # both problems must be cut over one free region for the lattice
        # inclusion to be exact; 10h comfortably contains all flips here
        w = max(10 * h, 3.0 * np.sqrt(tau))
        return (np.abs(sd_e.values) <= w) | (np.abs(sd_f.values) <= w)

    for i in range(int(cfg["n_nested"])):
        rho_e = rng.uniform(0.45, 0.52)
        ch_e = rng.uniform(0.0, 0.1)
        gap = rng.uniform(3.2 * h, 4.0 * h)
        rho_f = rho_e - gap - rng.uniform(0.0, 0.02)
        off = rng.uniform(0, max(0.0, rho_e - rho_f - gap - 1e-9) * 0.7)
        ang = rng.uniform(0, 2 * np.pi)
        cf = (off * np.cos(ang), off * np.sin(ang))
        ch_f = ch_e + rng.uniform(-0.02, 0.02)
        if np.hypot(*cf) + abs(ch_f - ch_e) + rho_f > rho_e - gap:
            ch_f = ch_e
            cf = (0.0, 0.0)
        E0 = rasterize_cap(grid, rho_e, ch_e)
        F0 = rasterize_cap(grid, rho_f, ch_f, cf)
        b1 = rng.uniform(-0.5, 0.2)
        b2 = b1 + rng.uniform(0.0, 0.3)
        tau = rng.uniform(1.0, 4.0) * h * h
        sd_e = signed_distance(E0)
        sd_f = signed_distance(F0)
        dom = float(np.min(sd_f.values - sd_e.values))
        hyp = dom >= 0 and b2 >= b1
        mask = joint_mask(sd_e, sd_f, tau)
        res_e = minimize_step(E0, AdhesionField.constant(grid, b1), tau, free_mask=mask, sd0=sd_e)
        res_f = minimize_step(F0, AdhesionField.constant(grid, b2), tau, free_mask=mask, sd0=sd_f)
        ok = (
            res_e.minimal.contains(res_f.minimal)
            and res_e.maximal.contains(res_f.maximal)
            and res_e.maximal.contains(res_f.minimal)
        )
        cases.append(
            {
                "case": f"nested_{i}",
                "rho_outer": rho_e,
                "rho_inner": rho_f,
                "beta": [b1, b2],
                "tau": tau,
                "unary_dominance_min": dom,
                "hypothesis_ok": bool(hyp),
                "pass": bool(ok),
            }
        )

    for i in range(int(cfg["n_disjoint"])):
        rho_e = rng.uniform(0.22, 0.3)
        rho_f = rng.uniform(0.22, 0.3)
        gap = rng.uniform(4.0 * h, 8.0 * h)
        cx = rho_e + gap + rho_f
        E0 = rasterize_cap(grid, rho_e, 0.0, (-cx / 2, 0.0))
        F0 = rasterize_cap(grid, rho_f, 0.0, (cx / 2, 0.0))
        b1 = rng.uniform(-0.3, 0.5)
        b2 = rng.uniform(max(-b1, -0.3), 0.5)
        tau = rng.uniform(1.0, 4.0) * h * h
        sd_e = signed_distance(E0)
        sd_f = signed_distance(F0)
        ssum = float(np.min(sd_e.values + sd_f.values))
        hyp = ssum >= 0 and b1 + b2 >= 0
        mask = joint_mask(sd_e, sd_f, tau)
        res_e = minimize_step(E0, AdhesionField.constant(grid, b1), tau, free_mask=mask, sd0=sd_e)
        res_f = minimize_step(F0, AdhesionField.constant(grid, b2), tau, free_mask=mask, sd0=sd_f)
        inter = int(np.sum(res_e.minimal.bits & res_f.minimal.bits))
        inter_max = int(np.sum(res_e.maximal.bits & res_f.maximal.bits))
        cases.append(
            {
                "case": f"disjoint_{i}",
                "gap": gap,
                "beta": [b1, b2],
                "tau": tau,
                "distance_sum_min": ssum,
                "hypothesis_ok": bool(hyp),
                "overlap_cells_minimal": inter,
                "overlap_cells_maximal": inter_max,
                "pass": inter == 0,
            }
        )

    # smooth strong comparison on marker fronts
    for i in range(int(cfg["n_smooth"])):
        rho_out = rng.uniform(0.5, 0.8)
        sep = rng.uniform(0.05, 0.12)
        rho_in = rho_out - sep
        b_out = rng.uniform(-0.3, 0.2)
        # caps nest iff the generating balls do: the center offset
        # |b_in rho_in - b_out rho_out| must stay below sep, which caps how
        # far the adhesions may be split while keeping beta_in > beta_out
        db_max = 0.9 * sep * (b_out + 0.6) / rho_in
        b_in = b_out + min(rng.uniform(0.05, 0.25), db_max)
        s_in = rng.uniform(-0.2, 0.0)
        s_out = s_in + rng.uniform(0.0, 0.3)
        fi = AxisymFront.cap(rho_in, b_in, n=120)
        fo = AxisymFront.cap(rho_out, b_out, n=120)
        T = float(cfg["smooth_T"])
        ri = axisym.evolve(fi, T, SmoothFlowConfig(b_in, forcing=s_in))
        ro = axisym.evolve(fo, T, SmoothFlowConfig(b_out, forcing=s_out))
        if ri.final is None or ro.final is None:
            sepa = None
            ok = ri.final is None  # inner may die first; outer must survive
        else:
            rz = np.stack([ri.final.r, ri.final.z], axis=1)
            inside = ro.final.contains_rz(rz)
            dmin = float(np.min(ro.final.distance_rz(rz)))
            sepa = dmin
            ok = bool(inside.all()) and dmin > 0
        cases.append(
            {
                "case": f"smooth_{i}",
                "rho": [rho_in, rho_out],
                "beta": [b_in, b_out],
                "forcing": [s_in, s_out],
                "separation": sepa,
                "pass": bool(ok),
            }
        )

    n_viol = sum(1 for c in cases if not c["pass"])
    fitted = {
        "violations": n_viol,
        "min_unary_dominance": min(
            (c["unary_dominance_min"] for c in cases if "unary_dominance_min" in c),
            default=None,
        ),
    }
    return SuiteReport(
        name="comparison",
        cases=cases,
        fitted_constants=fitted,
        passed=n_viol == 0,
    )


# -- isoperimetric inequality ---------------------------------------------------

ISO_DEFAULTS = {
    "seed": 77,
    "n_random": 500,
    "h": 1.0 / 32,
    "slack": 0.06,
    "equality_h": 1.0 / 64,
    "equality_tol": 0.04,
    "equality_betas": (-0.5, -0.25, 0.0, 0.25, 0.5, 0.65),
}


def isoperimetric_suite(config: dict | None = None) -> SuiteReport:
    """C_beta(E) >= (1 - slack) c_beta |E|^(2/3), equality on equilibrium caps.

    Random sets are unions of one to four caps and interior balls; the
    inequality must hold with 6% discretization slack for every draw, and
    rasterized equilibrium caps must sit within 4% of equality.
    """
    cfg = dict(ISO_DEFAULTS)
    cfg.update(config or {})
    rng = np.random.default_rng(int(cfg["seed"]))
    h = float(cfg["h"])
    slack = float(cfg["slack"])
    grid = HalfSpaceGrid.cover(0.9, 0.9, h, pad=5)
    worst = np.inf
    n_fail = 0
    fail_examples = []
    n_random = int(cfg["n_random"])
    for i in range(n_random):
        b0 = rng.uniform(-0.6, 0.6)
        beta = AdhesionField.constant(grid, b0)
        n_parts = rng.integers(1, 5)
        E = None
        for _ in range(n_parts):
            rho = rng.uniform(0.12, 0.32)
            ch = rng.uniform(0.0, 0.35)
            cxy = (rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4))
            part = rasterize_cap(grid, rho, ch, cxy)
            E = part if E is None else (E | part)
        c_b = winterbottom.isoperimetric_constant(b0)
        ratio = capillary(E, beta).capillary / (c_b * E.volume() ** (2.0 / 3.0))
        worst = min(worst, ratio)
        if ratio < 1.0 - slack:
            n_fail += 1
            if len(fail_examples) < 5:
                fail_examples.append({"i": i, "beta0": b0, "ratio": ratio})
    case_rand = {
        "case": "random_unions",
        "n": n_random,
        "h": h,
        "worst_ratio": worst,
        "bound": 1.0 - slack,
        "violations": n_fail,
        "examples": fail_examples,
        "pass": n_fail == 0,
    }

    eq_cases = []
    he = float(cfg["equality_h"])
    ge = HalfSpaceGrid.cover(0.75, 0.95, he, pad=5)
    for b0 in cfg["equality_betas"]:
        W = winterbottom.WinterbottomShape(0.5, float(b0))
        E = W.rasterize(ge)
        beta = AdhesionField.constant(ge, float(b0))
        c_b = winterbottom.isoperimetric_constant(float(b0))
        ratio = capillary(E, beta).capillary / (c_b * E.volume() ** (2.0 / 3.0))
        eq_cases.append(
            {
                "case": f"equality_beta{b0}",
                "ratio": ratio,
                "tol": cfg["equality_tol"],
                "pass": bool(abs(ratio - 1.0) <= float(cfg["equality_tol"])),
            }
        )

    cases = [case_rand] + eq_cases
    fitted = {
        "worst_random_ratio": worst,
        "equality_ratios": {c["case"]: c["ratio"] for c in eq_cases},
    }
    return SuiteReport(
        name="isoperimetric",
        cases=cases,
        fitted_constants=fitted,
        passed=all(c["pass"] for c in cases),
    )


SUITES = {
    "consistency": consistency_experiment,
    "ball": ball_suite,
    "density": density_suite,
    "holder": holder_suite,
    "barrier": barrier_suite,
    "comparison": comparison_suite,
    "isoperimetric": isoperimetric_suite,
}
