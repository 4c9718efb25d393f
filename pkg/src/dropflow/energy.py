"""Capillary energy of voxel droplets and the one-step movement functional.

The capillary energy of a configuration E is

    C(E) = (relative interface area) + sum over wetted bottom cells of
           beta * h^2,

with a bounded adhesion coefficient beta on the substrate. The one-step
movement functional adds the distance-weighted volume exchange with the
previous configuration,

    F(E; E0, tau) = C(E) + (h^3 / tau) * (sum_{E} sd0 - sum_{E0} sd0),

where sd0 is the signed distance of E0. The rewritten dissipation equals
(1/tau) * sum over the symmetric difference of |sd0|, cell by cell.

Sums are evaluated with numpy's pairwise summation over fixed iteration
order, so every breakdown is bit-reproducible on a fixed grid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .grid import BinarySet, HalfSpaceGrid, SignedDistanceField, perimeter, signed_distance


@dataclass
class AdhesionField:
    """Relative adhesion coefficient on the bottom face, one value per bottom cell.

    eta quantifies the coercivity reserve: |beta| <= 1 - 2 eta must hold
    everywhere with 0 < eta < 1/2. Construction fails loudly otherwise.
    """

    grid: HalfSpaceGrid
    beta: np.ndarray  # (ny, nx)
    eta: float

    def __post_init__(self):
        self.beta = np.asarray(self.beta, float)
        if self.beta.shape != (self.grid.ny, self.grid.nx):
            raise ValueError("beta must have shape (ny, nx)")
        if not (0.0 < self.eta < 0.5):
            raise ValueError("eta must lie in (0, 1/2)")
        bound = 1.0 - 2.0 * self.eta
        if np.max(np.abs(self.beta)) > bound + 1e-12:
            raise ValueError(
                f"max |beta| = {np.max(np.abs(self.beta)):.6g} exceeds 1 - 2 eta = {bound:.6g}"
            )

    @classmethod
    def constant(cls, grid: HalfSpaceGrid, value: float, eta: float | None = None) -> "AdhesionField":
        if eta is None:
            eta = min(0.49, 0.5 * (1.0 - abs(value)))
        return cls(grid, np.full((grid.ny, grid.nx), float(value)), eta)

    def save_csv(self, path) -> None:
        """Rows i,j,beta over all bottom cells, with the eta metadata line first."""
        with open(path, "w") as f:
            f.write(f"# eta={float(self.eta)!r}\n")
            f.write("i,j,beta\n")
            for j in range(self.grid.ny):
                for i in range(self.grid.nx):
                    f.write(f"{i},{j},{float(self.beta[j, i])!r}\n")

    @classmethod
    def load_csv(cls, grid: HalfSpaceGrid, path) -> "AdhesionField":
        eta = None
        beta = np.full((grid.ny, grid.nx), np.nan)
        with open(path) as f:
            for line in f:
                line = line.strip()
                if not line:
                    continue
                if line.startswith("#"):
                    key, _, val = line.lstrip("# ").partition("=")
                    if key.strip() == "eta":
                        eta = float(val)
                    continue
                if line.startswith("i,"):
                    continue
                i_s, j_s, b_s = line.split(",")
                beta[int(j_s), int(i_s)] = float(b_s)
        if eta is None:
            raise ValueError("adhesion csv is missing the eta metadata line")
        if np.isnan(beta).any():
            raise ValueError("adhesion csv does not cover every bottom cell")
        return cls(grid, beta, eta)


@dataclass(frozen=True)
class EnergyBreakdown:
    perimeter: float
    adhesion: float
    dissipation: float
    total: float

    @classmethod
    def of(cls, perimeter: float, adhesion: float, dissipation: float) -> "EnergyBreakdown":
        return cls(perimeter, adhesion, dissipation, perimeter + adhesion + dissipation)

    @property
    def capillary(self) -> float:
        return self.perimeter + self.adhesion


def adhesion_energy(E: BinarySet, beta: AdhesionField) -> float:
    if not E.grid.same_layout(beta.grid):
        raise ValueError("adhesion field lives on a different grid")
    wet = E.bits[0]
    return float(E.grid.h ** 2 * np.sum(beta.beta[wet]))


def capillary(E: BinarySet, beta: AdhesionField) -> EnergyBreakdown:
    """Interface area plus adhesion; dissipation slot is zero."""
    return EnergyBreakdown.of(perimeter(E), adhesion_energy(E, beta), 0.0)


def atw(
    E: BinarySet,
    E0: BinarySet,
    beta: AdhesionField,
    tau: float,
    sd0: SignedDistanceField | None = None,
) -> EnergyBreakdown:
    """One-step movement functional of E relative to the previous set E0."""
    if tau <= 0:
        raise ValueError("tau must be positive")
    E._check(E0)
    if sd0 is None:
        sd0 = signed_distance(E0)
    if sd0.flagged:
        raise ValueError(f"previous set has no interface ({sd0.degenerate})")
    h3 = E.grid.cell_volume
    diss = (h3 / tau) * (float(np.sum(sd0.values[E.bits])) - float(np.sum(sd0.values[E0.bits])))
    return EnergyBreakdown.of(perimeter(E), adhesion_energy(E, beta), diss)


@dataclass
class ContactAngleReport:
    residuals: np.ndarray  # nu_z + beta per usable contact cell
    mean_abs: float
    n_contact_cells: int
    n_skipped: int

    @property
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.residuals))) if self.residuals.size else float("nan")


def contact_angle_measure(
    E: BinarySet, beta: AdhesionField, fit_radius_cells: float = 4.0
) -> ContactAngleReport:
    """Discrete contact angle defect along the contact line.

    For every bottom cell of E bordering a dry bottom cell, fit a plane to
    the interface cell centers within fit_radius_cells * h and report
    nu . e_z + beta with nu the outward unit normal of the fit. Cells whose
    neighbourhood is too thin to fit are skipped and counted.
    """
    g = E.grid
    if not E.grid.same_layout(beta.grid):
        raise ValueError("adhesion field lives on a different grid")
    wet = E.bits[0]
    dry = ~wet
    edge = np.zeros_like(wet)
    edge[:, 1:] |= wet[:, 1:] & dry[:, :-1]
    edge[:, :-1] |= wet[:, :-1] & dry[:, 1:]
    edge[1:, :] |= wet[1:, :] & dry[:-1, :]
    edge[:-1, :] |= wet[:-1, :] & dry[1:, :]
    jj, ii = np.nonzero(edge)
    if jj.size == 0:
        return ContactAngleReport(np.empty(0), np.nan, 0, 0)

    surf_mask = E.boundary_mask()
    surf = g.boundary_points(surf_mask)
    out_mask = E.interface_mask() & ~E.bits
    outside = g.boundary_points(out_mask)
    tree_s = cKDTree(surf)
    tree_o = cKDTree(outside) if len(outside) else None

    radius = fit_radius_cells * g.h
    centers = np.empty((jj.size, 3))
    centers[:, 0] = g.origin_x + (ii + 0.5) * g.h
    centers[:, 1] = g.origin_y + (jj + 0.5) * g.h
    centers[:, 2] = 0.5 * g.h

    residuals = []
    skipped = 0
    for idx in range(jj.size):
        nb = tree_s.query_ball_point(centers[idx], radius)
        if len(nb) < 6:
            skipped += 1
            continue
        pts = surf[nb]
        c = pts.mean(axis=0)
        q = pts - c
        cov = q.T @ q
        w, v = np.linalg.eigh(cov)
        nu = v[:, 0]
        # orient outward: away from the droplet material near the fit point
        if tree_o is not None:
            nbo = tree_o.query_ball_point(centers[idx], radius)
        else:
            nbo = []
        if len(nbo):
            ref = outside[nbo].mean(axis=0) - c
        else:
            ref = centers[idx] - c
        if np.dot(nu, ref) < 0:
            nu = -nu
        residuals.append(nu[2] + beta.beta[jj[idx], ii[idx]])
    residuals = np.asarray(residuals)
    mean_abs = float(np.mean(np.abs(residuals))) if residuals.size else np.nan
    return ContactAngleReport(residuals, mean_abs, int(jj.size), skipped)
