"""Half-space voxel grids and binary droplet configurations.

The computational domain is a box resting on the substrate plane {z = 0}.
The bottom face of the box lies in the plane; the four lateral faces and the
top face are artificial walls that configurations must stay clear of. Cells
are cubes of side h. A droplet is a binary occupancy field over the cells;
all geometric measurements (signed distance, interface area, Hausdorff gaps)
operate on cell centers.

Sign convention: signed distance is negative inside the set, positive
outside, and it is measured to the relative interface only. Faces lying in
the substrate plane never contribute interface, so a set touching the plane
has no boundary there.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from . import kernels

CMCF1_MAGIC = b"CMCF1"


@dataclass(frozen=True)
class HalfSpaceGrid:
    """Uniform cubic grid covering [ox, ox + nx h] x [oy, oy + ny h] x (0, nz h]."""

    nx: int
    ny: int
    nz: int
    h: float
    origin_x: float = 0.0
    origin_y: float = 0.0

    def __post_init__(self):
        if min(self.nx, self.ny, self.nz) < 4:
            raise ValueError("grid needs at least 4 cells along every axis")
        if not (self.h > 0.0 and np.isfinite(self.h)):
            raise ValueError("cell size h must be positive and finite")

    @classmethod
    def cover(cls, lateral_radius: float, height: float, h: float, pad: int = 5) -> "HalfSpaceGrid":
        """Grid centered laterally on the origin, with pad extra cells of clearance."""
        if lateral_radius <= 0 or height <= 0:
            raise ValueError("extents must be positive")
        half = int(np.ceil(lateral_radius / h)) + pad
        nxy = 2 * half
        nz = int(np.ceil(height / h)) + pad
        return cls(nxy, nxy, max(nz, 4), h, origin_x=-half * h, origin_y=-half * h)

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.nz, self.ny, self.nx)

    @property
    def n_cells(self) -> int:
        return self.nx * self.ny * self.nz

    @property
    def cell_volume(self) -> float:
        return self.h ** 3

    def xs(self) -> np.ndarray:
        return self.origin_x + (np.arange(self.nx) + 0.5) * self.h

    def ys(self) -> np.ndarray:
        return self.origin_y + (np.arange(self.ny) + 0.5) * self.h

    def zs(self) -> np.ndarray:
        return (np.arange(self.nz) + 0.5) * self.h

    def center_axes(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Cell center coordinates as broadcastable (z, y, x) arrays."""
        z = self.zs()[:, None, None]
        y = self.ys()[None, :, None]
        x = self.xs()[None, None, :]
        return x, y, z

    def boundary_points(self, mask: np.ndarray) -> np.ndarray:
        """Cell centers of a (nz, ny, nx) mask as an (n, 3) array."""
        kk, jj, ii = np.nonzero(mask)
        pts = np.empty((kk.size, 3))
        pts[:, 0] = self.origin_x + (ii + 0.5) * self.h
        pts[:, 1] = self.origin_y + (jj + 0.5) * self.h
        pts[:, 2] = (kk + 0.5) * self.h
        return pts

    def same_layout(self, other: "HalfSpaceGrid") -> bool:
        return (
            self.nx == other.nx
            and self.ny == other.ny
            and self.nz == other.nz
            and abs(self.h - other.h) <= 1e-12 * self.h
            and abs(self.origin_x - other.origin_x) <= 1e-9
            and abs(self.origin_y - other.origin_y) <= 1e-9
        )


@dataclass
class BinarySet:
    """Occupancy field over a half-space grid. bits has shape (nz, ny, nx)."""

    grid: HalfSpaceGrid
    bits: np.ndarray

    def __post_init__(self):
        if self.bits.shape != self.grid.shape:
            raise ValueError("bits shape does not match grid")
        if self.bits.dtype != np.bool_:
            self.bits = self.bits.astype(bool)

    @classmethod
    def empty(cls, grid: HalfSpaceGrid) -> "BinarySet":
        return cls(grid, np.zeros(grid.shape, bool))

    @classmethod
    def full(cls, grid: HalfSpaceGrid) -> "BinarySet":
        return cls(grid, np.ones(grid.shape, bool))

    def copy(self) -> "BinarySet":
        return BinarySet(self.grid, self.bits.copy())

    def count(self) -> int:
        return int(self.bits.sum())

    @property
    def is_empty(self) -> bool:
        return not self.bits.any()

    @property
    def is_full(self) -> bool:
        return bool(self.bits.all())

    def volume(self) -> float:
        return self.count() * self.grid.cell_volume

    def interior_margin(self) -> int:
        """Clearance in cells between the occupied region and lateral/top faces."""
        if self.is_empty:
            return min(self.grid.nx, self.grid.ny, self.grid.nz) // 2
        kk, jj, ii = np.nonzero(self.bits)
        g = self.grid
        # the bottom row is the substrate, not a wall, so kk.min() is unconstrained
        return int(
            min(ii.min(), g.nx - 1 - ii.max(), jj.min(), g.ny - 1 - jj.max(), g.nz - 1 - kk.max())
        )

    def is_interior_compatible(self, margin: int = 1) -> bool:
        """True if no occupied cell comes within margin cells of lateral/top faces."""
        return self.is_empty or self.interior_margin() >= margin

    def interface_mask(self) -> np.ndarray:
        """Cells adjacent (6-neighbourhood) to a cell with the opposite bit.

        Missing neighbours below the bottom row do not count: the substrate
        face carries no interface. Missing lateral/top neighbours do count,
        so sets leaking to those walls still expose their boundary there.
        """
        b = self.bits
        out = np.zeros_like(b)
        # x
        d = b[:, :, 1:] != b[:, :, :-1]
        out[:, :, 1:] |= d
        out[:, :, :-1] |= d
        # y
        d = b[:, 1:, :] != b[:, :-1, :]
        out[:, 1:, :] |= d
        out[:, :-1, :] |= d
        # z
        d = b[1:, :, :] != b[:-1, :, :]
        out[1:, :, :] |= d
        out[:-1, :, :] |= d
        # artificial walls: lateral and top faces act like empty space
        out[:, :, 0] |= b[:, :, 0]
        out[:, :, -1] |= b[:, :, -1]
        out[:, 0, :] |= b[:, 0, :]
        out[:, -1, :] |= b[:, -1, :]
        out[-1, :, :] |= b[-1, :, :]
        return out

    def boundary_mask(self) -> np.ndarray:
        """Occupied interface cells (inside layer of the relative boundary)."""
        return self.interface_mask() & self.bits

    def union(self, other: "BinarySet") -> "BinarySet":
        self._check(other)
        return BinarySet(self.grid, self.bits | other.bits)

    def intersection(self, other: "BinarySet") -> "BinarySet":
        self._check(other)
        return BinarySet(self.grid, self.bits & other.bits)

    def difference(self, other: "BinarySet") -> "BinarySet":
        self._check(other)
        return BinarySet(self.grid, self.bits & ~other.bits)

    def symdiff_volume(self, other: "BinarySet") -> float:
        self._check(other)
        return int((self.bits != other.bits).sum()) * self.grid.cell_volume

    def contains(self, other: "BinarySet") -> bool:
        self._check(other)
        return bool(np.all(self.bits | ~other.bits))

    def _check(self, other: "BinarySet"):
        if not self.grid.same_layout(other.grid):
            raise ValueError("sets live on different grids")

    __or__ = union
    __and__ = intersection
    __sub__ = difference


@dataclass
class SignedDistanceField:
    """Signed distance to the relative interface, negative inside.

    For a set with no interface (empty or full) the field is the +inf
    sentinel everywhere and degenerate says which case occurred.
    """

    grid: HalfSpaceGrid
    values: np.ndarray
    degenerate: str | None = None

    @property
    def flagged(self) -> bool:
        return self.degenerate is not None

    def at_points(self, pts: np.ndarray) -> np.ndarray:
        """Trilinear interpolation at (n, 3) physical points, clamped to the box."""
        g = self.grid
        pts = np.asarray(pts, float)
        fx = np.clip((pts[:, 0] - g.origin_x) / g.h - 0.5, 0.0, g.nx - 1.001)
        fy = np.clip((pts[:, 1] - g.origin_y) / g.h - 0.5, 0.0, g.ny - 1.001)
        fz = np.clip(pts[:, 2] / g.h - 0.5, 0.0, g.nz - 1.001)
        i0 = fx.astype(np.int64)
        j0 = fy.astype(np.int64)
        k0 = fz.astype(np.int64)
        tx = fx - i0
        ty = fy - j0
        tz = fz - k0
        v = self.values
        out = np.zeros(len(pts))
        for dk in (0, 1):
            for dj in (0, 1):
                for di in (0, 1):
                    w = (
                        (tx if di else 1 - tx)
                        * (ty if dj else 1 - ty)
                        * (tz if dk else 1 - tz)
                    )
                    out += w * v[k0 + dk, j0 + dj, i0 + di]
        return out


@dataclass(frozen=True)
class HausdorffReport:
    forward: float
    backward: float
    max: float


def signed_distance(E: BinarySet, n_passes: int = 2) -> SignedDistanceField:
    """Signed distance at cell centers via fast sweeping (error about 2h).

    Interface faces between 0/1 cells seed both incident cells at h/2; faces
    in the substrate plane are not interface and contribute nothing.
    """
    g = E.grid
    if E.is_empty:
        return SignedDistanceField(g, np.full(g.shape, np.inf), "empty")
    if E.is_full:
        return SignedDistanceField(g, np.full(g.shape, np.inf), "full")
    if not E.is_interior_compatible(1):
        raise ValueError("set touches a lateral or top wall; signed distance undefined")
    d = np.full(g.shape, kernels.INF)
    seed = E.interface_mask()
    d[seed] = 0.5 * g.h
    kernels.eikonal_sweeps(d, g.h, n_passes)
    values = np.where(E.bits, -d, d)
    return SignedDistanceField(g, values)


def volume(E: BinarySet) -> float:
    return E.volume()


def perimeter(E: BinarySet) -> float:
    """Relative interface area by the calibrated 26-stencil pair count."""
    if not E.is_interior_compatible(1):
        raise ValueError("set touches a lateral or top wall; perimeter undefined")
    c0, c1, c2 = kernels.crofton_class_counts(E.bits, -1.0, -1.0, -1.0, -1.0)
    w = kernels.CROFTON_WEIGHTS
    return float(E.grid.h ** 2 * (w[0] * c0 + w[1] * c1 + w[2] * c2))


def perimeter_in_ball(E: BinarySet, center: np.ndarray, radius: float) -> float:
    """Interface area restricted to pairs whose midpoint lies in a ball."""
    g = E.grid
    ic = (center[0] - g.origin_x) / g.h - 0.5
    jc = (center[1] - g.origin_y) / g.h - 0.5
    kc = center[2] / g.h - 0.5
    c0, c1, c2 = kernels.crofton_class_counts(E.bits, ic, jc, kc, radius / g.h)
    w = kernels.CROFTON_WEIGHTS
    return float(g.h ** 2 * (w[0] * c0 + w[1] * c1 + w[2] * c2))


def ball_volume_fraction(E: BinarySet, center: np.ndarray, radius: float) -> float:
    """|E intersected with a ball| / |ball|, counting cells by center."""
    g = E.grid
    x, y, z = g.center_axes()
    inside = (x - center[0]) ** 2 + (y - center[1]) ** 2 + (z - center[2]) ** 2 <= radius ** 2
    hit = int((inside & E.bits).sum())
    full = (4.0 / 3.0) * np.pi * radius ** 3 / g.cell_volume
    return hit / full


def hausdorff(A: BinarySet, B: BinarySet) -> HausdorffReport:
    """Symmetric Hausdorff gap between the interface cell clouds of two sets."""
    A._check(B)
    pa = A.grid.boundary_points(A.boundary_mask())
    pb = B.grid.boundary_points(B.boundary_mask())
    if len(pa) == 0 or len(pb) == 0:
        raise ValueError("hausdorff needs two sets with nonempty interface")
    ta = cKDTree(pa)
    tb = cKDTree(pb)
    fwd = float(tb.query(pa, k=1)[0].max())
    bwd = float(ta.query(pb, k=1)[0].max())
    return HausdorffReport(fwd, bwd, max(fwd, bwd))


def rasterize_cap(
    grid: HalfSpaceGrid,
    rho: float,
    center_height: float = 0.0,
    center_xy: tuple[float, float] = (0.0, 0.0),
    min_margin: int = 4,
) -> BinarySet:
    """Occupy cells whose center lies in the closed ball of radius rho.

    center_height is the height of the ball center over the substrate plane;
    it may exceed rho (interior ball), be zero (hemisphere) or negative
    (shallow cap). The result must keep min_margin cells of clearance from
    the lateral and top walls.
    """
    if rho <= 0:
        raise ValueError("cap radius must be positive")
    x, y, z = grid.center_axes()
    cx, cy = center_xy
    bits = (x - cx) ** 2 + (y - cy) ** 2 + (z - center_height) ** 2 <= rho * rho
    E = BinarySet(grid, bits)
    if E.is_empty:
        raise ValueError("cap does not intersect the grid")
    if not E.is_interior_compatible(min_margin):
        raise ValueError(
            f"cap violates the interior margin of {min_margin} cells to lateral/top walls"
        )
    return E


def rasterize_box(
    grid: HalfSpaceGrid,
    x_range: tuple[float, float],
    y_range: tuple[float, float],
    z_range: tuple[float, float],
    min_margin: int = 4,
) -> BinarySet:
    """Occupy cells whose center lies in a closed axis-aligned box."""
    x, y, z = grid.center_axes()
    bits = (
        (x >= x_range[0]) & (x <= x_range[1])
        & (y >= y_range[0]) & (y <= y_range[1])
        & (z >= z_range[0]) & (z <= z_range[1])
    )
    E = BinarySet(grid, bits)
    if E.is_empty:
        raise ValueError("box does not intersect the grid")
    if not E.is_interior_compatible(min_margin):
        raise ValueError(
            f"box violates the interior margin of {min_margin} cells to lateral/top walls"
        )
    return E


def offset_set(E: BinarySet, delta: float) -> BinarySet:
    """Sublevel set {sd < delta}: outer thickening for delta > 0, inner core
    for delta < 0. Callers should check is_empty / is_interior_compatible on
    the result; shrinking a set away or growing it into the walls is legal
    but usually means the offset was too aggressive for the grid.
    """
    sd = signed_distance(E)
    if sd.flagged:
        raise ValueError(f"cannot offset a set with no interface ({sd.degenerate})")
    return BinarySet(E.grid, sd.values < delta)


def sample_bits_at_points(E: BinarySet, pts: np.ndarray) -> np.ndarray:
    """Occupancy of the voxel set at arbitrary physical points (False outside the box)."""
    g = E.grid
    pts = np.asarray(pts, float)
    i = np.floor((pts[:, 0] - g.origin_x) / g.h).astype(np.int64)
    j = np.floor((pts[:, 1] - g.origin_y) / g.h).astype(np.int64)
    k = np.floor(pts[:, 2] / g.h).astype(np.int64)
    ok = (i >= 0) & (i < g.nx) & (j >= 0) & (j < g.ny) & (k >= 0) & (k < g.nz)
    out = np.zeros(len(pts), bool)
    out[ok] = E.bits[k[ok], j[ok], i[ok]]
    return out


def write_cmcf1(E: BinarySet, path) -> None:
    """Binary dump: magic, u32 nx ny nz, f64 h origin_x origin_y, then the
    occupancy bits packed x-fastest, LSB first."""
    g = E.grid
    header = CMCF1_MAGIC + struct.pack(
        "<IIIddd", g.nx, g.ny, g.nz, g.h, g.origin_x, g.origin_y
    )
    packed = np.packbits(E.bits.ravel().view(np.uint8), bitorder="little")
    with open(path, "wb") as f:
        f.write(header)
        packed.tofile(f)


def read_cmcf1(path) -> BinarySet:
    with open(path, "rb") as f:
        magic = f.read(5)
        if magic != CMCF1_MAGIC:
            raise ValueError(f"not a CMCF1 file: bad magic {magic!r}")
        nx, ny, nz, h, ox, oy = struct.unpack("<IIIddd", f.read(36))
        grid = HalfSpaceGrid(nx, ny, nz, h, ox, oy)
        n = grid.n_cells
        raw = np.fromfile(f, dtype=np.uint8, count=(n + 7) // 8)
    if raw.size != (n + 7) // 8:
        raise ValueError("CMCF1 file truncated")
    bits = np.unpackbits(raw, count=n, bitorder="little").astype(bool)
    return BinarySet(grid, bits.reshape(grid.shape))
