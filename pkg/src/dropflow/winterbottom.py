"""Equilibrium droplet shapes for constant relative adhesion.

For beta0 in (-1, 1) the energy-minimizing droplet of given volume is the
ball of radius rho centered at height beta0 * rho, truncated by the
substrate plane: the outward normal on the contact line then satisfies
nu . e3 = -beta0. All of its measures have closed forms in (rho, beta0),
collected here together with the derived constants used by the flow
estimates (isoperimetric constant, inscribed-shape radius, shrink rate).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import BinarySet, HalfSpaceGrid, rasterize_cap


def _check_beta0(beta0: float) -> float:
    beta0 = float(beta0)
    if not -1.0 < beta0 < 1.0:
        raise ValueError(f"relative adhesion must lie in (-1, 1), got {beta0!r}")
    return beta0


@dataclass(frozen=True)
class CapMeasures:
    volume: float
    spherical_area: float
    wetted_area: float
    energy: float  # spherical_area + beta0 * wetted_area


def cap_measures(rho: float, beta0: float) -> CapMeasures:
    """Closed-form measures of the equilibrium cap of radius rho."""
    beta0 = _check_beta0(beta0)
    if rho <= 0:
        raise ValueError("rho must be positive")
    shape_factor = (1.0 + beta0) ** 2 * (2.0 - beta0)
    vol = np.pi / 3.0 * rho ** 3 * shape_factor
    sph = 2.0 * np.pi * rho ** 2 * (1.0 + beta0)
    wet = np.pi * rho ** 2 * (1.0 - beta0 ** 2)
    return CapMeasures(vol, sph, wet, np.pi * rho ** 2 * shape_factor)


@dataclass(frozen=True)
class WinterbottomShape:
    """Equilibrium cap: ball of radius rho centered at (cx, cy, beta0 rho)."""

    rho: float
    beta0: float
    center_x: float = 0.0
    center_y: float = 0.0

    def __post_init__(self):
        _check_beta0(self.beta0)
        if self.rho <= 0:
            raise ValueError("rho must be positive")

    @property
    def center_height(self) -> float:
        return self.beta0 * self.rho

    @property
    def apex_height(self) -> float:
        return self.rho * (1.0 + self.beta0)

    @property
    def contact_radius(self) -> float:
        return self.rho * np.sqrt(1.0 - self.beta0 ** 2)

    def measures(self) -> CapMeasures:
        return cap_measures(self.rho, self.beta0)

    def scaled(self, rho: float) -> "WinterbottomShape":
        return WinterbottomShape(rho, self.beta0, self.center_x, self.center_y)

    def rasterize(self, grid: HalfSpaceGrid, min_margin: int = 4) -> BinarySet:
        return rasterize_cap(
            grid, self.rho, self.center_height, (self.center_x, self.center_y), min_margin
        )

    def contains_points(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, float)
        d2 = (
            (pts[:, 0] - self.center_x) ** 2
            + (pts[:, 1] - self.center_y) ** 2
            + (pts[:, 2] - self.center_height) ** 2
        )
        return (d2 <= self.rho ** 2) & (pts[:, 2] >= 0.0)

    def farthest_distance_from(self, px: float, py: float, pz: float) -> float:
        """max |x - p| over the cap boundary, by the apex/rim/free candidates.

        Over the spherical part the distance is linear in the surface
        direction, so the maximum sits either at the unconstrained antipodal
        direction (if it respects the contact condition), or on the contact
        rim; the wetted disk never beats the rim.
        """
        c = np.array([self.center_x, self.center_y, self.center_height])
        p = np.array([px, py, pz], float)
        v = c - p
        nv = float(np.linalg.norm(v))
        best = 0.0
        if nv < 1e-15:
            best = self.rho  # whole spherical part equidistant
        else:
            omega = v / nv
            if omega[2] >= -self.beta0:
                best = nv + self.rho
        # rim circle: radius contact_radius at z = 0
        dz = p[2]
        lat = np.hypot(p[0] - self.center_x, p[1] - self.center_y)
        rim = np.sqrt((lat + self.contact_radius) ** 2 + dz * dz)
        if best < rim:
            # constrained maximum over the allowed spherical directions also
            # lands on the rim, so rim distance is exact in this branch
            best = rim
        return float(best)

    def contains(self, other: "WinterbottomShape", tol: float = 1e-12) -> bool:
        if abs(other.beta0 - self.beta0) > 1e-12:
            raise ValueError("containment check assumes equal contact cosines")
        far = other.farthest_distance_from(self.center_x, self.center_y, self.center_height)
        return far <= self.rho + tol


def isoperimetric_constant(beta0: float) -> float:
    """Sharp constant c with energy >= c * volume^(2/3) for all droplets.

    Equality holds exactly on the equilibrium caps, so the constant is the
    energy of the unit-radius cap divided by its volume^(2/3).
    """
    m = cap_measures(1.0, beta0)
    return m.energy / m.volume ** (2.0 / 3.0)


def largest_inscribed(
    R0: float, p_height: float, beta0: float
) -> tuple[WinterbottomShape, bool]:
    """Largest equilibrium cap contained in the ball B_R0((0, 0, p_height)).

    The cap touches the ball either at its spherical apex or on its contact
    rim; the distance from the ball center to the cap boundary is monotone
    along the profile, so those two contacts are the only candidates:

        apex: rho (1 + beta0) - p_height <= R0
        rim:  rho^2 (1 - beta0^2) + p_height^2 <= R0^2

    Returns the cap of the smaller admissible radius and a flag telling
    whether the apex bound (the simple closed form (R0 + p) / (1 + beta0))
    was the binding one; for high ball seats the rim binds first.
    """
    beta0 = _check_beta0(beta0)
    if not 0.0 < beta0 < 1.0:
        raise ValueError("inscribed-shape bound needs beta0 in (0, 1)")
    if R0 <= 0:
        raise ValueError("R0 must be positive")
    if not 0.0 <= p_height < R0:
        raise ValueError("the ball center must sit in [0, R0) so the ball meets the plane")
    rho_apex = (R0 + p_height) / (1.0 + beta0)
    rho_rim = np.sqrt((R0 ** 2 - p_height ** 2) / (1.0 - beta0 ** 2))
    if rho_apex <= rho_rim:
        return WinterbottomShape(rho_apex, beta0), True
    return WinterbottomShape(float(rho_rim), beta0), False


def shrink_constant(beta0: float) -> float:
    """Rate C in the persistence bound rho_k^2 >= rho_0^2 - C k tau.

    Each step can move the inscribed cap boundary by at most the dissipation
    budget spread over its surface; bounding energy / volume and the contact
    geometry of the cap gives C = 5 energy(1) (1 + beta0) / (4 volume(1)
    (1 - beta0)), which is 11.25 at beta0 = 1/2.
    """
    beta0 = _check_beta0(beta0)
    if not 0.0 < beta0 < 1.0:
        raise ValueError("shrink bound needs beta0 in (0, 1)")
    m = cap_measures(1.0, beta0)
    return 5.0 * m.energy * (1.0 + beta0) / (4.0 * m.volume * (1.0 - beta0))


def shrink_bound(rho0: float, tau: float, k: int, beta0: float) -> float:
    """Certified lower bound for rho(tau, k)^2 after k steps of size tau."""
    if rho0 <= 0:
        raise ValueError("rho0 must be positive")
    if k < 0 or tau <= 0:
        raise ValueError("need k >= 0 and tau > 0")
    return max(0.0, rho0 ** 2 - shrink_constant(beta0) * k * tau)
