"""Axisymmetric droplet evolution by explicit marker front tracking.

The free surface is a marker polyline in the (r, z) half plane running from
the symmetry axis to the contact point on the substrate. Markers move with
normal velocity v = -(sum of principal curvatures) + forcing; the contact
marker is constrained to the plane and its tangent to the prescribed contact
cosine through the ghost construction in the kernels. This gives a reference
solution for the smooth flow that the discrete minimizing movements are
compared against.

Explicit Euler needs dt of order (marker spacing)^2; the driver adapts the
substep size, redistributes markers to uniform arc length, and stops cleanly
on extinction (apex reaching the plane or the profile collapsing).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels


@dataclass
class AxisymFront:
    """Marker profile at one instant; index 0 is the apex, -1 the contact."""

    r: np.ndarray
    z: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        self.r = np.asarray(self.r, float)
        self.z = np.asarray(self.z, float)
        if self.r.shape != self.z.shape or self.r.ndim != 1 or self.r.size < 8:
            raise ValueError("need matching 1-d marker arrays with at least 8 markers")
        if abs(self.r[0]) > 1e-12 or abs(self.z[-1]) > 1e-12:
            raise ValueError("profile must start on the axis and end on the plane")

    @classmethod
    def cap(cls, rho: float, beta0: float, n: int = 160, t: float = 0.0) -> "AxisymFront":
        """Equilibrium cap profile: circle of radius rho centered at beta0*rho."""
        if rho <= 0 or not -1.0 < beta0 < 1.0:
            raise ValueError("need rho > 0 and beta0 in (-1, 1)")
        phi_max = np.arccos(-beta0)
        phi = np.linspace(0.0, phi_max, n)
        r = rho * np.sin(phi)
        z = beta0 * rho + rho * np.cos(phi)
        r[0] = 0.0
        z[-1] = 0.0
        return cls(r, z, t)

    @property
    def n_markers(self) -> int:
        return self.r.size

    @property
    def apex_height(self) -> float:
        return float(self.z[0])

    @property
    def contact_radius(self) -> float:
        return float(self.r[-1])

    def arclengths(self) -> np.ndarray:
        return np.hypot(np.diff(self.r), np.diff(self.z))

    def resampled(self, n: int | None = None) -> "AxisymFront":
        """Uniform arc-length redistribution, endpoints pinned."""
        if n is None:
            n = self.n_markers
        s = np.concatenate([[0.0], np.cumsum(self.arclengths())])
        if s[-1] <= 0:
            raise ValueError("degenerate profile cannot be resampled")
        target = np.linspace(0.0, s[-1], n)
        r = np.interp(target, s, self.r)
        z = np.interp(target, s, self.z)
        r[0] = 0.0
        z[-1] = 0.0
        return AxisymFront(r, z, self.t)

    def volume(self) -> float:
        """Enclosed volume, exact for the marker polygon."""
        r, z = self.r, self.z
        dz = np.diff(z)
        seg = dz * (r[:-1] ** 2 + r[:-1] * r[1:] + r[1:] ** 2) / 3.0
        return float(-np.pi * np.sum(seg))

    def area(self) -> float:
        """Free surface area (the wetted disk not included)."""
        ds = self.arclengths()
        return float(np.pi * np.sum((self.r[:-1] + self.r[1:]) * ds))

    def wetted_area(self) -> float:
        return float(np.pi * self.contact_radius ** 2)

    def geometry(self, beta0: float):
        """Curvature sum and outward normal at each marker."""
        n = self.n_markers
        kap = np.empty(n)
        nur = np.empty(n)
        nuz = np.empty(n)
        kernels._curve_geometry(self.r, self.z, beta0, kap, nur, nuz)
        return kap, nur, nuz

    def distance_rz(self, pts_rz: np.ndarray) -> np.ndarray:
        """Unsigned distance from (r, z) points to the profile polyline.

        Because the surface is a revolution of the profile, this equals the
        3-d distance to the free surface for points given as (radius, height).
        """
        pts = np.asarray(pts_rz, float)
        a = np.stack([self.r[:-1], self.z[:-1]], axis=1)
        b = np.stack([self.r[1:], self.z[1:]], axis=1)
        ab = b - a
        den = np.maximum(np.sum(ab * ab, axis=1), 1e-300)
        ap = pts[:, None, :] - a[None, :, :]
        tpar = np.clip(np.sum(ap * ab[None, :, :], axis=2) / den[None, :], 0.0, 1.0)
        foot = a[None, :, :] + tpar[:, :, None] * ab[None, :, :]
        d = np.min(np.linalg.norm(pts[:, None, :] - foot, axis=2), axis=1)
        return d

    def contains_rz(self, pts_rz: np.ndarray) -> np.ndarray:
        """Even-odd test against the closed contour (profile + base + axis)."""
        pts = np.asarray(pts_rz, float)
        poly_r = np.concatenate([self.r, [0.0]])
        poly_z = np.concatenate([self.z, [0.0]])
        x, y = pts[:, 0], pts[:, 1]
        inside = np.zeros(len(pts), bool)
        n = len(poly_r)
        for i in range(n):
            x0, y0 = poly_r[i], poly_z[i]
            x1, y1 = poly_r[(i + 1) % n], poly_z[(i + 1) % n]
            crossing = (y0 > y) != (y1 > y)
            with np.errstate(divide="ignore", invalid="ignore"):
                xi = x0 + (y - y0) * (x1 - x0) / (y1 - y0)
            inside ^= crossing & (x < np.where(crossing, xi, np.inf))
        return inside

    def contains_points(self, pts: np.ndarray) -> np.ndarray:
        """Membership for 3-d points (x, y, z)."""
        pts = np.asarray(pts, float)
        rr = np.hypot(pts[:, 0], pts[:, 1])
        return self.contains_rz(np.stack([rr, pts[:, 2]], axis=1)) & (pts[:, 2] >= 0)


@dataclass
class SmoothFlowConfig:
    beta0: float
    forcing: float = 0.0
    dt_safety: float = 0.2
    redistribute_every: int = 25
    extinction_radius: float = 2e-3
    max_substeps: int = 5_000_000

    def __post_init__(self):
        if not -1.0 < self.beta0 < 1.0:
            raise ValueError("contact cosine must lie in (-1, 1)")
        if not 0 < self.dt_safety <= 0.5:
            raise ValueError("dt_safety must lie in (0, 0.5] for explicit stepping")


@dataclass
class EvolveResult:
    snapshots: list  # AxisymFront at the requested times (and at T)
    final: "AxisymFront | None"
    extinct: bool
    extinction_time: float | None
    pinched: bool
    diagnostics: dict = field(default_factory=dict)


def evolve(
    front: AxisymFront,
    T: float,
    cfg: SmoothFlowConfig,
    save_times: list | None = None,
) -> EvolveResult:
    """March the profile to time front.t + T (or extinction, whichever first).

    save_times are absolute times; a snapshot is also taken at the end time.
    The volume balance between direct measurement and the accumulated normal
    flux is reported in diagnostics as a consistency check on the stepping.
    """
    if T <= 0:
        raise ValueError("T must be positive")
    cur = front.resampled()
    t_end = front.t + T
    events = sorted({float(s) for s in (save_times or [])} | {t_end})
    if any(e < front.t - 1e-12 for e in events):
        raise ValueError("save times must not precede the initial time")
    r = cur.r.copy()
    z = cur.z.copy()
    t = front.t
    snapshots = []
    extinct = False
    pinched = False
    extinction_time = None
    flux_volume = 0.0
    v0 = cur.volume()
    substeps = 0
    max_residual = 0.0
    kap = np.empty(r.size)
    nur = np.empty(r.size)
    nuz = np.empty(r.size)

    for t_evt in events:
        while t < t_evt - 1e-14 and not extinct and not pinched:
            scale = max(z[0], r[-1])
            if scale < cfg.extinction_radius:
                extinct = True
                extinction_time = t
                break
            ds_min = float(np.min(np.hypot(np.diff(r), np.diff(z))))
            dt = cfg.dt_safety * ds_min * ds_min
            if dt <= 0 or not np.isfinite(dt):
                raise RuntimeError("marker spacing collapsed; refine or stop earlier")
            remaining = t_evt - t
            n_need = max(1, int(np.ceil(remaining / dt - 1e-9)))
            nsub = min(cfg.redistribute_every, n_need)
            dt_eff = remaining / n_need
            # flux accounting at the chunk start (first order, like the stepping)
            kernels._curve_geometry(r, z, cfg.beta0, kap, nur, nuz)
            v_n = -kap + cfg.forcing
            ds = np.hypot(np.diff(r), np.diff(z))
            rmid = 0.5 * (r[:-1] + r[1:])
            vmid = 0.5 * (v_n[:-1] + v_n[1:])
            flux_volume += 2.0 * np.pi * float(np.sum(rmid * vmid * ds)) * nsub * dt_eff
            flag = kernels.axisym_advance(r, z, cfg.beta0, cfg.forcing, dt_eff, nsub)
            t += nsub * dt_eff
            substeps += nsub
            if substeps > cfg.max_substeps:
                raise RuntimeError("substep budget exhausted before reaching the end time")
            if flag != 0:
                extinct = True
                extinction_time = t
                break
            if kernels.polyline_self_intersects(r, z):
                pinched = True
                break
            tmp = AxisymFront(r, z, t).resampled()
            r, z = tmp.r, tmp.z
        if extinct or pinched:
            break
        snap = AxisymFront(r.copy(), z.copy(), t)
        snapshots.append(snap)
        res_angle = contact_angle_residual(snap, cfg.beta0)
        max_residual = max(max_residual, res_angle)
        if res_angle > 1e-3:
            raise RuntimeError(
                f"contact condition violated at t={t!r}: residual {res_angle!r}"
            )

    final = None if (extinct or pinched) else AxisymFront(r.copy(), z.copy(), t)
    diag = {"substeps": substeps, "max_contact_residual": max_residual}
    if final is not None:
        dv = final.volume() - v0
        diag["volume_change"] = dv
        diag["volume_flux"] = flux_volume
        diag["volume_defect"] = dv - flux_volume
        diag["volume_defect_rel"] = abs(dv - flux_volume) / max(abs(dv), 1e-12)
    return EvolveResult(snapshots, final, extinct, extinction_time, pinched, diag)


def exact_hemisphere(R0: float, t: float) -> float:
    """Radius of the self-similar hemisphere solution (beta0 = 0, no forcing)."""
    if R0 <= 0:
        raise ValueError("R0 must be positive")
    val = R0 * R0 - 4.0 * t
    if val <= 0:
        raise ValueError(f"hemisphere of radius {R0!r} is extinct by time {t!r}")
    return float(np.sqrt(val))


def hemisphere_extinction_time(R0: float) -> float:
    return 0.25 * R0 * R0


def offset_front(
    front: AxisymFront, delta: float, beta_from: float, beta_to: float | None = None
) -> AxisymFront:
    """Normal offset of the profile by delta (positive = outward).

    Normals come from the current profile with contact cosine beta_from; the
    offset contact marker is slid back onto the plane along the tangent of
    the target cosine beta_to, so the result is a valid initial front for a
    flow with that angle.
    """
    if beta_to is None:
        beta_to = beta_from
    kap, nur, nuz = front.geometry(beta_from)
    r = front.r + delta * nur
    z = front.z + delta * nuz
    r[0] = 0.0
    sb = np.sqrt(1.0 - beta_to ** 2)
    lam = z[-1] / sb
    r[-1] += lam * (-beta_to)
    z[-1] = 0.0
    if r[-1] < 0 or np.any(z[:-1] <= 0) or z[0] <= 0:
        raise ValueError(f"offset {delta!r} empties the profile or crosses the plane")
    out = AxisymFront(r, z, front.t).resampled()
    if kernels.polyline_self_intersects(out.r, out.z):
        raise ValueError(f"offset {delta!r} self-intersects; reduce the offset")
    return out


def barrier_flows(
    front: AxisymFront,
    r_off: float,
    s: float,
    cfg: SmoothFlowConfig,
    T: float,
    save_times: list | None = None,
) -> tuple[EvolveResult, EvolveResult]:
    """Inner and outer forced flows bracketing the plain flow of front.

    The lower barrier starts from the inner offset by r_off + s and runs
    with forcing -s and contact cosine beta0 - s; the upper barrier starts
    from the outer offset and runs with forcing +s and cosine beta0 + s.
    With r_off = s = 0 both reduce to the plain flow.
    """
    if r_off < 0 or s < 0:
        raise ValueError("offsets must be nonnegative")
    if abs(cfg.beta0) + s >= 1.0:
        raise ValueError("perturbed contact cosine leaves (-1, 1)")
    delta = r_off + s
    lo0 = offset_front(front, -delta, cfg.beta0, cfg.beta0 - s) if delta > 0 else front
    hi0 = offset_front(front, +delta, cfg.beta0, cfg.beta0 + s) if delta > 0 else front
    cfg_lo = SmoothFlowConfig(
        cfg.beta0 - s, cfg.forcing - s, cfg.dt_safety, cfg.redistribute_every,
        cfg.extinction_radius, cfg.max_substeps,
    )
    cfg_hi = SmoothFlowConfig(
        cfg.beta0 + s, cfg.forcing + s, cfg.dt_safety, cfg.redistribute_every,
        cfg.extinction_radius, cfg.max_substeps,
    )
    lo = evolve(lo0, T, cfg_lo, save_times)
    hi = evolve(hi0, T, cfg_hi, save_times)
    return lo, hi


def write_fronts_csv(fronts: list, path) -> None:
    """Dump marker profiles as rows t,idx,r,z (one block per front)."""
    with open(path, "w") as f:
        f.write("t,idx,r,z\n")
        for fr in fronts:
            for i in range(fr.n_markers):
                f.write(f"{fr.t!r},{i},{fr.r[i]!r},{fr.z[i]!r}\n")


def contact_angle_residual(front: AxisymFront, beta0: float) -> float:
    """|nu . e3 + beta0| at the contact point, by one-sided quadratic fit.

    The profile near the contact is fitted as r(z) = r_c + a z + b z^2 over
    the last few markers; the outward normal at z = 0 is then
    (1, -a) / sqrt(1 + a^2) up to orientation.
    """
    r, z = front.r, front.z
    m = min(6, r.size - 1)
    zz = z[-m:] - z[-1]
    rr = r[-m:] - r[-1]
    A = np.stack([zz, zz * zz], axis=1)
    coef, *_ = np.linalg.lstsq(A, rr, rcond=None)
    a = coef[0]
    nu_z = -a / np.sqrt(1.0 + a * a)
    return float(abs(nu_z + beta0))
