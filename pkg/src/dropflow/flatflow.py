"""Discrete minimizing movements for droplets in the half space.

Each step minimizes the one-step movement functional

    F(E; E0, tau) = interface area + adhesion + (h^3/tau) sum_E sd0 + const

over all binary configurations E. The functional is submodular in the
occupancy bits (pairwise terms are positive multiples of [x_a != x_b]), so
one exact min-cut gives a global minimizer, and the residual network yields
the smallest and largest minimizers: the source-reachable set and the
complement of the sink-reaching set. Ties are broken by returning both.

Capacities are quantized to integers with the fixed quantum q = 2^-30 h^2,
so all cut arithmetic is exact; quantization perturbs the minimized energy
by at most q per network arc.

Steps are usually solved on a band around the previous interface: cells with
|sd0| above the band half-width keep their previous label and their pairwise
couplings are folded into the unary terms of free neighbours. If a solution
ever flips a cell close to the frozen shell, the band is widened and the
step re-solved, ending with the full grid, so the reported minimizer never
depends on the banding heuristic.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import kernels, mincut
from .energy import AdhesionField, EnergyBreakdown, atw, capillary
from .grid import (
    BinarySet,
    HalfSpaceGrid,
    SignedDistanceField,
    read_cmcf1,
    sample_bits_at_points,
    signed_distance,
    write_cmcf1,
)

QUANTUM_FACTOR = 2.0 ** -30

# pairwise weights in quantum units; independent of h because both the
# weight (c h^2) and the quantum (2^-30 h^2) scale with h^2
PAIR_WEIGHTS_Q = np.rint(kernels.CROFTON_WEIGHTS / QUANTUM_FACTOR).astype(np.int64)


def quantum(h: float) -> float:
    return QUANTUM_FACTOR * h * h


@dataclass
class CutProblem:
    """One-step functional reduced to free cells, in quantum units."""

    grid: HalfSpaceGrid
    tau: float
    quantum: float
    free_flat: np.ndarray  # int64 flat ids (x fastest) of free cells
    unary_q: np.ndarray  # int64 per free cell, frozen couplings folded in
    edge_a: np.ndarray  # int32 local indices
    edge_b: np.ndarray
    edge_class: np.ndarray  # uint8, indexes PAIR_WEIGHTS_Q
    base_bits: np.ndarray  # (nz, ny, nx) labels used for frozen cells
    const_energy: float  # dropped terms, so that energy() matches atw()

    @property
    def n_free(self) -> int:
        return self.free_flat.size

    @property
    def n_edges(self) -> int:
        return self.edge_a.size

    def labeling(self, free_labels: np.ndarray) -> BinarySet:
        bits = self.base_bits.copy().ravel()
        bits[self.free_flat] = free_labels
        return BinarySet(self.grid, bits.reshape(self.grid.shape))

    def energy_quantized(self, free_labels: np.ndarray) -> int:
        x = free_labels.astype(np.int64)
        e = int(np.sum(self.unary_q * x))
        cut = free_labels[self.edge_a] != free_labels[self.edge_b]
        e += int(np.sum(PAIR_WEIGHTS_Q[self.edge_class[cut]]))
        return e

    def energy(self, free_labels: np.ndarray) -> float:
        return self.quantum * self.energy_quantized(free_labels) + self.const_energy

    def quantization_tolerance(self) -> float:
        """Bound on |energy() - exact functional| from capacity rounding."""
        return self.quantum * (self.n_free + self.n_edges + 1)


def _pair_arrays(free_mask: np.ndarray):
    """Free-free edges and free-frozen folds per stencil offset.

    Yields (offset index, flat_a, flat_b) for pairs of free cells and
    (offset index, flat_free, flat_frozen) folds, each unordered pair once.
    """
    nz, ny, nx = free_mask.shape
    for m, (dx, dy, dz) in enumerate(kernels.STENCIL_OFFSETS):
        dx, dy, dz = int(dx), int(dy), int(dz)
        sl_a = (
            slice(max(0, -dz), nz - max(0, dz)),
            slice(max(0, -dy), ny - max(0, dy)),
            slice(max(0, -dx), nx - max(0, dx)),
        )
        sl_b = (
            slice(max(0, dz), nz + min(0, dz)),
            slice(max(0, dy), ny + min(0, dy)),
            slice(max(0, dx), nx + min(0, dx)),
        )
        yield m, (dx, dy, dz), sl_a, sl_b


def _flat_ids(kk, jj, ii, ny, nx):
    return (kk.astype(np.int64) * ny + jj) * nx + ii


def build_cut_problem(
    E0: BinarySet,
    beta: AdhesionField,
    tau: float,
    band: float | None = None,
    free_mask: np.ndarray | None = None,
    sd0: SignedDistanceField | None = None,
) -> CutProblem:
    """Assemble the quantized one-step functional.

    band restricts the free cells to |sd0| <= band; free_mask overrides the
    band entirely (used for exhaustive cross-checks). Cells in the one-cell
    rim next to lateral/top walls are always frozen so minimizers stay
    interior-compatible.
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    g = E0.grid
    if not g.same_layout(beta.grid):
        raise ValueError("adhesion field lives on a different grid")
    if sd0 is None:
        sd0 = signed_distance(E0)
    if sd0.flagged:
        raise ValueError(f"previous set has no interface ({sd0.degenerate})")
    h = g.h
    q = quantum(h)
    bits0 = E0.bits

    if free_mask is None:
        if band is None:
            free_mask = np.ones(g.shape, bool)
        else:
            free_mask = np.abs(sd0.values) <= band
    else:
        free_mask = free_mask.astype(bool).copy()
    # keep the wall rim frozen (it is 0 for interior-compatible inputs)
    free_mask[:, :, 0] = False
    free_mask[:, :, -1] = False
    free_mask[:, 0, :] = False
    free_mask[:, -1, :] = False
    free_mask[-1, :, :] = False

    free_flat = np.flatnonzero(free_mask.ravel())
    n = free_flat.size
    if n == 0:
        raise ValueError("no free cells in the cut problem")
    local = np.full(g.n_cells, -1, np.int32)
    local[free_flat] = np.arange(n, dtype=np.int32)

    # unary in physical units, then folded and quantized
    uf = (h ** 3 / tau) * sd0.values.ravel()[free_flat]
    bottom = free_flat < g.nx * g.ny
    if bottom.any():
        uf[bottom] += h * h * beta.beta.ravel()[free_flat[bottom]]

    edge_a = []
    edge_b = []
    edge_c = []
    w_float = kernels.CROFTON_WEIGHTS * h * h
    const_energy = 0.0
    frozen1 = ~free_mask & bits0
    for m, (dx, dy, dz), sl_a, sl_b in _pair_arrays(free_mask):
        fa = free_mask[sl_a]
        fb = free_mask[sl_b]
        ba = bits0[sl_a]
        bb = bits0[sl_b]
        # free-free edges
        both = fa & fb
        if both.any():
            kk, jj, ii = np.nonzero(both)
            k0 = kk + sl_a[0].start
            j0 = jj + sl_a[1].start
            i0 = ii + sl_a[2].start
            a_ids = local[_flat_ids(k0, j0, i0, g.ny, g.nx)]
            b_ids = local[_flat_ids(k0 + dz, j0 + dy, i0 + dx, g.ny, g.nx)]
            edge_a.append(a_ids)
            edge_b.append(b_ids)
            edge_c.append(np.full(a_ids.size, kernels.STENCIL_CLASS[m], np.uint8))
        # fold frozen neighbours into the free side (both orientations)
        for fx, fy, by, sx in ((fa, fb, bb, sl_a), (fb, fa, ba, sl_b)):
            fold = fx & ~fy
            if not fold.any():
                continue
            kk, jj, ii = np.nonzero(fold)
            k0 = kk + sx[0].start
            j0 = jj + sx[1].start
            i0 = ii + sx[2].start
            ids = local[_flat_ids(k0, j0, i0, g.ny, g.nx)]
            lbl = by[fold]
            w = w_float[kernels.STENCIL_CLASS[m]]
            np.add.at(uf, ids, np.where(lbl, -w, w))
            const_energy += w * int(lbl.sum())
        # frozen-frozen cut pairs are constants
        zz = ~fa & ~fb & (ba != bb)
        if zz.any():
            const_energy += w_float[kernels.STENCIL_CLASS[m]] * int(zz.sum())

    if edge_a:
        edge_a = np.concatenate(edge_a)
        edge_b = np.concatenate(edge_b)
        edge_c = np.concatenate(edge_c)
    else:
        edge_a = np.empty(0, np.int32)
        edge_b = np.empty(0, np.int32)
        edge_c = np.empty(0, np.uint8)

    unary_q = np.rint(uf / q).astype(np.int64)

    # dropped terms: frozen occupied cells and the -sum_{E0} sd0 part
    f1 = frozen1.ravel()
    const_energy += (h ** 3 / tau) * float(np.sum(sd0.values.ravel()[f1]))
    const_energy += h * h * float(np.sum(beta.beta[frozen1[0]]))
    const_energy -= (h ** 3 / tau) * float(np.sum(sd0.values[bits0]))

    return CutProblem(
        grid=g,
        tau=tau,
        quantum=q,
        free_flat=free_flat,
        unary_q=unary_q,
        edge_a=edge_a,
        edge_b=edge_b,
        edge_class=edge_c,
        base_bits=bits0.copy(),
        const_energy=const_energy,
    )


@dataclass
class StepResult:
    minimal: BinarySet
    maximal: BinarySet
    energy_minimal: EnergyBreakdown
    energy_maximal: EnergyBreakdown
    cut_energy: float  # quantized optimum mapped back to physical units
    problem: CutProblem | None
    stats: dict


def _solve(problem: CutProblem) -> tuple[np.ndarray, np.ndarray, int, int]:
    sol = mincut.solve_binary_energy(
        problem.n_free,
        problem.unary_q,
        problem.edge_a,
        problem.edge_b,
        PAIR_WEIGHTS_Q[problem.edge_class],
    )
    return sol.minimal, sol.maximal, sol.energy, sol.phases


def minimize_step(
    E0: BinarySet,
    beta: AdhesionField,
    tau: float,
    band: float | str | None = "auto",
    free_mask: np.ndarray | None = None,
    sd0: SignedDistanceField | None = None,
) -> StepResult:
    """One exact minimizing-movement step.

    Returns both extremal minimizers. band='auto' starts from a narrow band
    around the previous interface and widens until the solution provably
    stays clear of the frozen shell; band=None solves the full grid at once;
    a float fixes the initial half-width. An explicit free_mask bypasses the
    band logic (the problem is then exact by definition).
    """
    g = E0.grid
    if E0.is_empty:
        empty = BinarySet.empty(g)
        zero = EnergyBreakdown.of(0.0, 0.0, 0.0)
        return StepResult(empty, empty.copy(), zero, zero, 0.0, None, {"vacuous": True})
    if sd0 is None:
        sd0 = signed_distance(E0)

    h = g.h
    max_abs_sd = float(np.max(np.abs(sd0.values)))
    if free_mask is not None:
        widths = [None]
    elif band is None:
        widths = [np.inf]
    elif band == "auto":
        w0 = max(10 * h, 3.0 * np.sqrt(tau))
        widths = []
        w = w0
        while w < max_abs_sd:
            widths.append(w)
            w *= 1.6
        widths.append(np.inf)
    else:
        widths = []
        w = float(band)
        while w < max_abs_sd:
            widths.append(w)
            w *= 1.6
        widths.append(np.inf)

    attempts = 0
    for w in widths:
        attempts += 1
        if free_mask is not None:
            problem = build_cut_problem(E0, beta, tau, free_mask=free_mask, sd0=sd0)
        elif np.isinf(w):
            problem = build_cut_problem(E0, beta, tau, band=None, sd0=sd0)
        else:
            problem = build_cut_problem(E0, beta, tau, band=w, sd0=sd0)
        lab_min, lab_max, cut_q, phases = _solve(problem)
        if free_mask is not None or np.isinf(w):
            break
        # accept only if every flipped cell stays clear of the frozen shell
        prev = problem.base_bits.ravel()[problem.free_flat]
        flipped = (lab_min != prev) | (lab_max != prev)
        if not flipped.any():
            break
        worst = float(np.max(np.abs(sd0.values.ravel()[problem.free_flat[flipped]])))
        if worst <= w - 3.0 * h:
            break

    E_min = problem.labeling(lab_min)
    E_max = problem.labeling(lab_max)
    if not E_max.contains(E_min):
        raise RuntimeError("extremal minimizers are not nested; solver invariant broken")
    if problem.energy_quantized(lab_min) != cut_q or problem.energy_quantized(lab_max) != cut_q:
        raise RuntimeError("reported cut optimum does not match labeling energies")

    e_min = atw(E_min, E0, beta, tau, sd0=sd0)
    e_max = atw(E_max, E0, beta, tau, sd0=sd0)
    cut_energy = problem.quantum * cut_q + problem.const_energy
    tol = problem.quantization_tolerance()
    for eb, name in ((e_min, "minimal"), (e_max, "maximal")):
        if abs(eb.total - cut_energy) > tol + 1e-9 * max(1.0, abs(cut_energy)):
            raise RuntimeError(
                f"{name} minimizer energy {eb.total!r} differs from cut optimum "
                f"{cut_energy!r} beyond quantization tolerance {tol!r}"
            )
    stats = {
        "n_free": problem.n_free,
        "n_edges": problem.n_edges,
        "phases": phases,
        "band_attempts": attempts,
        "band_final": widths[attempts - 1] if free_mask is None else None,
    }
    return StepResult(E_min, E_max, e_min, e_max, cut_energy, problem, stats)


@dataclass
class FlatFlowTrajectory:
    grid: HalfSpaceGrid
    tau: float
    sets: list  # BinarySet, index k = state after k steps
    energies: list  # EnergyBreakdown, [0] has zero dissipation
    extinction_step: int | None
    stats: list

    @property
    def n_steps(self) -> int:
        return len(self.sets) - 1

    def set_at(self, k: int) -> BinarySet:
        if k < len(self.sets):
            return self.sets[k]
        if self.extinction_step is not None:
            return BinarySet.empty(self.grid)
        raise IndexError(f"step {k} was not computed")

    def at_time(self, t: float) -> BinarySet:
        """State at floor(t / tau) steps."""
        return self.set_at(int(np.floor(t / self.tau + 1e-12)))


def run_flat_flow(
    E0: BinarySet,
    beta: AdhesionField,
    tau: float,
    n_steps: int,
    extremal: str = "minimal",
    band: float | str | None = "auto",
) -> FlatFlowTrajectory:
    """Iterate minimize_step, recording configurations and energy breakdowns.

    After extinction the trajectory continues with empty states without
    further solves. The capillary part of the recorded energies must be
    non-increasing along the trajectory (it is a Lyapunov functional); a
    violation beyond quantization noise raises.
    """
    if extremal not in ("minimal", "maximal"):
        raise ValueError("extremal must be 'minimal' or 'maximal'")
    g = E0.grid
    sets = [E0]
    energies = [capillary(E0, beta) if not E0.is_empty else EnergyBreakdown.of(0.0, 0.0, 0.0)]
    stats: list = [None]
    extinction_step = 0 if E0.is_empty else None
    E = E0
    for k in range(1, n_steps + 1):
        if E.is_empty:
            sets.append(BinarySet.empty(g))
            energies.append(EnergyBreakdown.of(0.0, 0.0, 0.0))
            stats.append({"vacuous": True})
            continue
        res = minimize_step(E, beta, tau, band=band)
        E = res.minimal if extremal == "minimal" else res.maximal
        eb = res.energy_minimal if extremal == "minimal" else res.energy_maximal
        if eb.dissipation < -_lyapunov_tol(g):
            raise RuntimeError(f"negative dissipation {eb.dissipation!r} at step {k}")
        prev_cap = energies[-1].capillary
        if eb.capillary > prev_cap + _lyapunov_tol(g):
            raise RuntimeError(
                f"capillary energy increased at step {k}: {prev_cap!r} -> {eb.capillary!r}"
            )
        sets.append(E)
        energies.append(eb)
        stats.append(res.stats)
        if E.is_empty and extinction_step is None:
            extinction_step = k
    return FlatFlowTrajectory(g, tau, sets, energies, extinction_step, stats)


def _lyapunov_tol(g: HalfSpaceGrid) -> float:
    # quantization can shift each step optimum by at most q per arc
    return quantum(g.h) * 30.0 * g.n_cells


# -- persistence --------------------------------------------------------------


def save_trajectory(traj: FlatFlowTrajectory, beta: AdhesionField, outdir) -> None:
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    g = traj.grid
    with open(out / "meta.toml", "w") as f:
        f.write("[grid]\n")
        f.write(f"nx = {g.nx}\nny = {g.ny}\nnz = {g.nz}\n")
        f.write(f"h = {g.h!r}\norigin_x = {g.origin_x!r}\norigin_y = {g.origin_y!r}\n")
        f.write("\n[flow]\n")
        f.write(f"tau = {traj.tau!r}\n")
        f.write(f"n_steps = {traj.n_steps}\n")
        ext = traj.extinction_step
        f.write(f"extinction_step = {ext if ext is not None else -1}\n")
    with open(out / "energies.csv", "w") as f:
        f.write("k,perimeter,adhesion,dissipation,total\n")
        for k, eb in enumerate(traj.energies):
            f.write(f"{k},{eb.perimeter!r},{eb.adhesion!r},{eb.dissipation!r},{eb.total!r}\n")
    for k, E in enumerate(traj.sets):
        write_cmcf1(E, out / f"step_{k:04d}.cmcf1")
    beta.save_csv(out / "adhesion.csv")


def load_trajectory(indir) -> tuple[FlatFlowTrajectory, AdhesionField]:
    src = Path(indir)
    try:
        import tomllib
    except ModuleNotFoundError:  # python 3.10
        import tomli as tomllib
    with open(src / "meta.toml", "rb") as f:
        meta = tomllib.load(f)
    gm = meta["grid"]
    grid = HalfSpaceGrid(gm["nx"], gm["ny"], gm["nz"], gm["h"], gm["origin_x"], gm["origin_y"])
    n_steps = meta["flow"]["n_steps"]
    ext = meta["flow"]["extinction_step"]
    sets = []
    for k in range(n_steps + 1):
        E = read_cmcf1(src / f"step_{k:04d}.cmcf1")
        if not E.grid.same_layout(grid):
            raise ValueError(f"step {k} dump disagrees with meta.toml grid")
        sets.append(E)
    energies = []
    with open(src / "energies.csv") as f:
        header = f.readline().strip()
        if header != "k,perimeter,adhesion,dissipation,total":
            raise ValueError("unexpected energies.csv header")
        for line in f:
            _, p, a, d, t = line.strip().split(",")
            energies.append(EnergyBreakdown(float(p), float(a), float(d), float(t)))
    beta = AdhesionField.load_csv(grid, src / "adhesion.csv")
    traj = FlatFlowTrajectory(
        grid, meta["flow"]["tau"], sets, energies, None if ext < 0 else ext, [None] * (n_steps + 1)
    )
    return traj, beta


# -- initial shapes and self-refinement ---------------------------------------


def build_initial_set(grid: HalfSpaceGrid, shape: dict) -> BinarySet:
    """Construct a droplet from a declarative description.

    kinds: cap {rho, center_height, center_x, center_y}, box {x0,x1,y0,y1,z0,z1},
    union {parts = [shape, ...]}.
    """
    from .grid import rasterize_box, rasterize_cap

    kind = shape.get("kind")
    if kind == "cap":
        return rasterize_cap(
            grid,
            float(shape["rho"]),
            float(shape.get("center_height", 0.0)),
            (float(shape.get("center_x", 0.0)), float(shape.get("center_y", 0.0))),
        )
    if kind == "box":
        return rasterize_box(
            grid,
            (float(shape["x0"]), float(shape["x1"])),
            (float(shape["y0"]), float(shape["y1"])),
            (float(shape["z0"]), float(shape["z1"])),
        )
    if kind == "union":
        parts = shape.get("parts", [])
        if not parts:
            raise ValueError("union shape needs at least one part")
        E = build_initial_set(grid, parts[0])
        for p in parts[1:]:
            E = E | build_initial_set(grid, p)
        return E
    raise ValueError(f"unknown shape kind {kind!r}")


def shape_extent(shape: dict) -> tuple[float, float]:
    """(lateral radius, height) bound of a shape description."""
    kind = shape.get("kind")
    if kind == "cap":
        rho = float(shape["rho"])
        ch = float(shape.get("center_height", 0.0))
        cx = abs(float(shape.get("center_x", 0.0)))
        cy = abs(float(shape.get("center_y", 0.0)))
        return max(cx, cy) + rho, max(ch + rho, 1e-9)
    if kind == "box":
        lat = max(abs(float(shape["x0"])), abs(float(shape["x1"])),
                  abs(float(shape["y0"])), abs(float(shape["y1"])))
        return lat, float(shape["z1"])
    if kind == "union":
        lats, hts = zip(*(shape_extent(p) for p in shape["parts"]))
        return max(lats), max(hts)
    raise ValueError(f"unknown shape kind {kind!r}")


@dataclass
class RefineReport:
    taus: list
    hs: list
    sample_times: list
    symdiff: np.ndarray  # (levels-1, n_samples) volumes between consecutive levels
    extinct: list
    trajectories: list


def gmm_refine(
    shape: dict,
    beta_value: float,
    tau0: float,
    levels: int,
    T: float,
    n_samples: int = 8,
    extremal: str = "minimal",
    max_cells: int = 30_000_000,
) -> RefineReport:
    """Run the flow on a ladder tau_j = tau0 / 2^j with h_j^2 = tau_j / 4 and
    report symmetric-difference volumes between consecutive levels at the
    sample times i T / n_samples, evaluated on the finer grid of each pair.

    The Cauchy behavior of these volumes (non-increasing in j) is the
    refinement diagnostic; asserting it is left to the caller."""
    if levels < 1:
        raise ValueError("need at least one level")
    lat, ht = shape_extent(shape)
    times = [T * (i + 1) / n_samples for i in range(n_samples)]
    trajs = []
    taus = []
    hs = []
    extinct = []
    for j in range(levels):
        tau_j = tau0 * 2.0 ** (-j)
        h_j = 0.5 * np.sqrt(tau_j)
        g = HalfSpaceGrid.cover(lat + 12 * h_j, ht + 12 * h_j, h_j, pad=5)
        if g.n_cells > max_cells:
            raise ValueError(
                f"level {j} grid would need {g.n_cells} cells (cap {max_cells})"
            )
        E0 = build_initial_set(g, shape)
        beta = AdhesionField.constant(g, beta_value)
        n_steps = int(np.floor(T / tau_j + 1e-9))
        traj = run_flat_flow(E0, beta, tau_j, n_steps, extremal=extremal)
        trajs.append(traj)
        taus.append(tau_j)
        hs.append(h_j)
        extinct.append(traj.extinction_step)
    sym = np.zeros((levels - 1, n_samples))
    for j in range(levels - 1):
        fine = trajs[j + 1]
        coarse = trajs[j]
        gf = fine.grid
        x, y, z = gf.center_axes()
        pts = np.empty((gf.n_cells, 3))
        pts[:, 0] = np.broadcast_to(x, gf.shape).ravel()
        pts[:, 1] = np.broadcast_to(y, gf.shape).ravel()
        pts[:, 2] = np.broadcast_to(z, gf.shape).ravel()
        for si, t in enumerate(times):
            Ef = fine.at_time(t)
            Ec = coarse.at_time(t)
            cb = sample_bits_at_points(Ec, pts)
            sym[j, si] = float(np.sum(Ef.bits.ravel() != cb)) * gf.cell_volume
    return RefineReport(taus, hs, times, sym, extinct, trajs)
