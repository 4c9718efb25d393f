#!/usr/bin/env python3
"""One minimizing-movement step from an interior ball, against the closed form.

A ball of radius r far from the substrate is a textbook case: the step
functional P(E) + (1/tau) int_{E sym E0} dist(., bd E0) is minimized by a
concentric ball, and balancing perimeter against dissipation gives the
radius recursion

    rho(tau) = (r + sqrt(r^2 - 8 tau)) / 2.

Keeping a remnant ball B_rho costs 4 pi rho^2 [1 + rho (3 rho - 4r) / (12 tau)]
more than clearing the set; the bracket is negative for some rho exactly when
tau < r^2 / 9, so one step annihilates the ball beyond that (well before the
recursion root disappears at r^2 / 8). This script sweeps tau at fixed grid
size, measures the volume radius of the minimal minimizer, and plots both
regimes against the law.

Run from the repository root:  python3 demos/01_ball_step_law.py
Writes demos/out/ball_step_law.png
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from dropflow import AdhesionField, HalfSpaceGrid, minimize_step, rasterize_cap

R = 0.5
H = 1.0 / 24
TAUS = (0.002, 0.004, 0.008, 0.012, 0.018, 0.024, 0.030)
OUT = Path(__file__).parent / "out"


def law(tau):
    return 0.5 * (R + np.sqrt(R * R - 8.0 * tau)) if tau < R * R / 9 else 0.0


def main():
    grid = HalfSpaceGrid.cover(R + 10 * H, 2.3 * R + 10 * H, H, pad=4)
    E0 = rasterize_cap(grid, R, center_height=1.15 * R)
    beta = AdhesionField.constant(grid, 0.0)
    print(f"ball r={R} on h={H:.4f} grid {grid.shape}, {grid.n_cells / 1e3:.0f}k cells")
    print(f"{'tau':>8} {'rho_measured':>13} {'rho_law':>9} {'diff/h':>7}")

    measured = []
    for tau in TAUS:
        res = minimize_step(E0, beta, tau)
        vol = res.minimal.volume()
        rho = (3.0 * vol / (4.0 * np.pi)) ** (1.0 / 3.0) if vol > 0 else 0.0
        measured.append(rho)
        print(f"{tau:8.4f} {rho:13.4f} {law(tau):9.4f} {abs(rho - law(tau)) / H:7.2f}")

    ts = np.linspace(1e-4, R * R / 8, 400)
    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    ax.plot(ts, [law(t) for t in ts], "-", color="0.4",
            label="radius law (extinction at $r^2/9$)")
    ax.plot(TAUS, measured, "o", color="C3", label=f"one voxel step, h=1/{round(1/H)}")
    ax.axvline(R * R / 9, color="0.7", ls=":", lw=1)
    ax.set_xlabel(r"step size $\tau$")
    ax.set_ylabel(r"radius after one step")
    ax.legend(frameon=False)
    fig.tight_layout()
    OUT.mkdir(exist_ok=True)
    fig.savefig(OUT / "ball_step_law.png", dpi=150)
    print(f"wrote {OUT / 'ball_step_law.png'}")


if __name__ == "__main__":
    main()
