"""Spacetime observation regions G in [0, T] x T^1 and their rasterization.

A region is a set-algebra tree over a few geometric primitives.  Membership
of a point (t, x) is decided exactly (booleans, no per-child antialiasing),
and rasterization averages membership over a stratified supersample of each
grid cell.  All x coordinates are reduced mod 2*pi; arc sets on the circle
are stored as disjoint half-open intervals [lo, hi) with 0 <= lo < hi <= 2*pi.

Besides the per-cell occupancy ``w``, rasterization also accumulates the
occupancy of G over (xi, eta) = (x+t, x-t) bin pairs at the sample level.
That matrix is the ground truth for all characteristic-fiber analyses: a
per-cell binning would smear one-cell masses across bin boundaries, which
is fatal for regions whose boundaries run along characteristics.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from .grid import TWO_PI, Resolution

ArcSet = Tuple[Tuple[float, float], ...]

_SEAM_EPS = 1e-12


def normalize_arcs(pairs: Sequence[Tuple[float, float]]) -> ArcSet:
    """Reduce raw [a, b] intervals to disjoint half-open arcs on [0, 2*pi).

    An interval of length >= 2*pi becomes the full circle; wrapping arcs
    are split at the seam.  Zero or negative length is rejected.
    """
    pieces: list[Tuple[float, float]] = []
    for a, b in pairs:
        length = b - a
        if not length > 0.0:
            raise ValueError(f"arc [{a}, {b}] has non-positive length")
        if length >= TWO_PI - _SEAM_EPS:
            return ((0.0, TWO_PI),)
        lo = a % TWO_PI
        hi = lo + length
        if hi <= TWO_PI + _SEAM_EPS:
            pieces.append((lo, min(hi, TWO_PI)))
        else:
            pieces.append((lo, TWO_PI))
            pieces.append((0.0, hi - TWO_PI))
    pieces.sort()
    merged: list[Tuple[float, float]] = []
    for lo, hi in pieces:
        if merged and lo <= merged[-1][1] + _SEAM_EPS:
            merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
        else:
            merged.append((lo, hi))
    return tuple(merged)


def arcs_measure(arcs: ArcSet) -> float:
    return float(sum(hi - lo for lo, hi in arcs))


def arcs_contain(arcs: ArcSet, values: np.ndarray) -> np.ndarray:
    v = np.mod(values, TWO_PI)
    out = np.zeros(v.shape, dtype=bool)
    for lo, hi in arcs:
        out |= (v >= lo) & (v < hi)
    return out


def bins_to_arcs(bins: np.ndarray, n: int) -> ArcSet:
    """Convert a boolean bin mask (length n over [0, 2*pi)) to arcs."""
    if bins.shape != (n,):
        raise ValueError("bin mask has wrong length")
    dx = TWO_PI / n
    raw = [(j * dx, (j + 1) * dx) for j in np.flatnonzero(bins)]
    if not raw:
        return ()
    return normalize_arcs(raw)


# --------------------------------------------------------------------------
# Region expression tree
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Cylinder:
    """Time interval times a set of spatial arcs."""

    t_lo: float
    t_hi: float
    arcs: ArcSet

    def contains(self, t: np.ndarray, x: np.ndarray) -> np.ndarray:
        return (t >= self.t_lo) & (t < self.t_hi) & arcs_contain(self.arcs, x)


@dataclass(frozen=True)
class Product:
    """Cartesian product E x F of a time-bin set and a space-bin set."""

    t_intervals: Tuple[Tuple[float, float], ...]
    x_arcs: ArcSet

    def contains(self, t: np.ndarray, x: np.ndarray) -> np.ndarray:
        in_t = np.zeros(t.shape, dtype=bool)
        for lo, hi in self.t_intervals:
            in_t |= (t >= lo) & (t < hi)
        return in_t & arcs_contain(self.x_arcs, x)


@dataclass(frozen=True)
class Polygon:
    """Simple polygon in the (t, x) plane, even-odd fill rule.

    Consecutive vertices are joined the short way around the circle; the
    vertex list is unwrapped accordingly, and query points are tested
    against every 2*pi translate of the unwrapped polygon.
    """

    vertices: Tuple[Tuple[float, float], ...]

    def __post_init__(self) -> None:
        if len(self.vertices) < 3:
            raise ValueError("polygon needs at least 3 vertices")

    def _unwrapped(self) -> list[Tuple[float, float]]:
        verts = []
        t0, x0 = self.vertices[0]
        x_prev = x0 % TWO_PI
        verts.append((t0, x_prev))
        for t, x in self.vertices[1:]:
            xr = x % TWO_PI
            delta = (xr - x_prev % TWO_PI + np.pi) % TWO_PI - np.pi
            x_prev = x_prev + delta
            verts.append((t, x_prev))
        return verts

    def contains(self, t: np.ndarray, x: np.ndarray) -> np.ndarray:
        verts = self._unwrapped()
        xs = [v[1] for v in verts]
        xq = np.mod(x, TWO_PI)
        out = np.zeros(t.shape, dtype=bool)
        m_lo = int(np.floor((min(xs) - TWO_PI) / TWO_PI))
        m_hi = int(np.ceil(max(xs) / TWO_PI))
        for m in range(m_lo, m_hi + 1):
            out ^= self._crossings_odd(t, xq + m * TWO_PI, verts)
        return out

    @staticmethod
    def _crossings_odd(tq, xq, verts) -> np.ndarray:
        # ray cast in the +t direction
        inside = np.zeros(tq.shape, dtype=bool)
        k = len(verts)
        for i in range(k):
            t1, x1 = verts[i]
            t2, x2 = verts[(i + 1) % k]
            if x1 == x2:
                continue
            straddles = (x1 > xq) != (x2 > xq)
            t_at = t1 + (xq - x1) * (t2 - t1) / (x2 - x1)
            inside ^= straddles & (tq < t_at)
        return inside


@dataclass(frozen=True)
class CharBand:
    """Union of characteristic lines over an arc set of traces.

    coord="xi" selects {(t, x): (x + t) mod 2*pi in arcs}; coord="eta"
    selects {(t, x): (x - t) mod 2*pi in arcs}, both clipped to [0, T].
    """

    coord: str
    arcs: ArcSet

    def __post_init__(self) -> None:
        if self.coord not in ("xi", "eta"):
            raise ValueError(f"coord must be 'xi' or 'eta', got {self.coord!r}")

    def contains(self, t: np.ndarray, x: np.ndarray) -> np.ndarray:
        v = x + t if self.coord == "xi" else x - t
        return arcs_contain(self.arcs, v)


@dataclass(frozen=True, eq=False)
class RasterLiteral:
    """Occupancy grid used as a region; cells with occupancy >= 1/2 count.

    The grid covers [0, T] x [0, 2*pi) with rows = time ascending and
    columns = x ascending, independently of the analysis resolution.
    """

    grid: np.ndarray
    horizon: float
    path: Optional[str] = None

    def contains(self, t: np.ndarray, x: np.ndarray) -> np.ndarray:
        nt, n = self.grid.shape
        i = np.clip((t / self.horizon * nt).astype(int), 0, nt - 1)
        j = np.mod((np.mod(x, TWO_PI) / TWO_PI * n).astype(int), n)
        return (self.grid[i, j] >= 0.5) & (t >= 0.0) & (t <= self.horizon)


@dataclass(frozen=True)
class Union:
    children: Tuple["RegionExpr", ...]

    def contains(self, t, x):
        out = np.zeros(t.shape, dtype=bool)
        for c in self.children:
            out |= c.contains(t, x)
        return out


@dataclass(frozen=True)
class Intersection:
    children: Tuple["RegionExpr", ...]

    def contains(self, t, x):
        out = np.ones(t.shape, dtype=bool)
        for c in self.children:
            out &= c.contains(t, x)
        return out


@dataclass(frozen=True)
class Difference:
    """First child minus the union of the rest."""

    children: Tuple["RegionExpr", ...]

    def contains(self, t, x):
        out = self.children[0].contains(t, x)
        for c in self.children[1:]:
            out &= ~c.contains(t, x)
        return out


@dataclass(frozen=True)
class Complement:
    child: "RegionExpr"

    def contains(self, t, x):
        return ~self.child.contains(t, x)


_NODE_TYPES = (
    Cylinder,
    Product,
    Polygon,
    CharBand,
    RasterLiteral,
    Union,
    Intersection,
    Difference,
    Complement,
)


@dataclass(frozen=True)
class SpacetimeRegion:
    """A spacetime measurable observation set G inside [0, T] x T^1."""

    horizon: float
    root: object

    def __post_init__(self) -> None:
        if not self.horizon > 0.0:
            raise ValueError("T must be positive")
        if not isinstance(self.root, _NODE_TYPES):
            raise TypeError(f"unknown region node {type(self.root).__name__}")

    def contains(self, t: np.ndarray, x: np.ndarray) -> np.ndarray:
        inside_slab = (t >= 0.0) & (t <= self.horizon)
        return inside_slab & self.root.contains(t, x)

    @property
    def declared_open(self) -> bool:
        """True when G is built from geometric primitives only (no raster)."""
        return not _has_raster(self.root)


def _has_raster(node) -> bool:
    if isinstance(node, RasterLiteral):
        return True
    if isinstance(node, (Union, Intersection, Difference)):
        return any(_has_raster(c) for c in node.children)
    if isinstance(node, Complement):
        return _has_raster(node.child)
    return False


# --------------------------------------------------------------------------
# Raster mask
# --------------------------------------------------------------------------


@dataclass(eq=False)
class RasterMask:
    """Discretized occupancy of G on the characteristic-aligned grid.

    ``w[i, j]`` is the covered fraction of cell [i*dt, (i+1)*dt) x
    [j*dx, (j+1)*dx).  ``mu[p, q]`` is the occupancy of G over the
    (xi-bin p, eta-bin q) pair in time-measure units (so that its row and
    column sums match the characteristic fiber integrals); it is exact at
    the supersampling level when produced by :func:`rasterize` and may be
    None for masks loaded from plain grids.
    """

    w: np.ndarray
    res: Resolution
    mu: Optional[np.ndarray] = None
    zero_measure: bool = False
    supersample: int = field(default=1)

    @property
    def n(self) -> int:
        return self.res.n

    @property
    def nt(self) -> int:
        return self.res.nt

    @property
    def measure(self) -> float:
        return float(self.w.sum()) * self.res.dt * self.res.dx

    @property
    def l2_mass(self) -> float:
        """Integral of w^2 (equals the measure for a binary mask)."""
        return float((self.w**2).sum()) * self.res.dt * self.res.dx

    def rotated(self, k: int) -> "RasterMask":
        """Mask of G shifted by k bins in x (both w and mu are permuted)."""
        mu = None if self.mu is None else np.roll(np.roll(self.mu, k, 0), k, 1)
        return RasterMask(
            np.roll(self.w, k, axis=1),
            self.res,
            mu,
            self.zero_measure,
            self.supersample,
        )

    def time_truncated(self, nt_new: int) -> "RasterMask":
        """Restriction of G to [0, nt_new*dt]; mu is dropped (stale)."""
        if not 1 <= nt_new <= self.nt:
            raise ValueError("invalid truncation length")
        res = Resolution(self.res.n, nt_new * self.res.dt)
        return RasterMask(self.w[:nt_new].copy(), res, None, self.zero_measure, self.supersample)


def from_grid(w: np.ndarray, horizon: float) -> RasterMask:
    """Wrap a raw occupancy grid (rows = time) as a RasterMask."""
    w = np.asarray(w, dtype=float)
    if w.ndim != 2:
        raise ValueError("occupancy grid must be 2-D")
    if w.min() < 0.0 or w.max() > 1.0:
        raise ValueError("occupancy must lie in [0, 1]")
    res = Resolution(w.shape[1], horizon)
    if res.nt != w.shape[0]:
        raise ValueError(
            f"grid has {w.shape[0]} rows but horizon {horizon} needs {res.nt}"
        )
    return RasterMask(w, res, None, zero_measure=not w.any())


# Fractional stagger of the time offsets (2 minus the golden ratio).  With
# plain subcell centers, a quarter of the sample points sit exactly on
# characteristic lines through grid nodes, where set membership and
# (xi, eta) bin classification can disagree at rounding level; the stagger
# keeps every sample a fixed fraction of a subcell away from any line
# commensurate with the grid.
_T_STAGGER = 0.38196601125010515


def rasterize(region: SpacetimeRegion, res: Optional[Resolution] = None, *,
              n: int = 256, supersample: int = 4) -> RasterMask:
    """Rasterize a region with stratified supersampling.

    Each cell receives supersample^2 stratified sample points (staggered in
    time, see above); occupancy is the in-G fraction.  The same pass
    accumulates the (xi, eta) bin-pair occupancy ``mu``.  Deterministic.
    """
    if supersample < 1:
        raise ValueError("supersample must be >= 1")
    if res is None:
        res = Resolution(n, region.horizon)
    elif not isinstance(res, Resolution):
        raise TypeError("res must be a Resolution")
    if res.n < 8:
        raise ValueError(f"resolution too coarse for rasterization: n={res.n} < 8")

    nt, nx = res.nt, res.n
    dt, dx = res.dt, res.dx
    s = supersample
    w_counts = np.zeros((nt, nx), dtype=np.int64)
    mu = np.zeros(nx * nx, dtype=np.float64)

    i_base = np.arange(nt, dtype=float)[:, None]
    j_base = np.arange(nx, dtype=float)[None, :]
    for a in range(s):
        t = (i_base + (a + 0.5 + _T_STAGGER) / s) * dt
        t = np.broadcast_to(t, (nt, nx))
        for b in range(s):
            x = (j_base + (b + 0.5) / s) * dx
            x = np.broadcast_to(x, (nt, nx))
            inside = region.contains(t, x)
            w_counts += inside
            if inside.any():
                xi_bin = np.floor_divide(x + t, dx).astype(np.int64) % nx
                eta_bin = np.floor_divide(x - t, dx).astype(np.int64) % nx
                flat = (xi_bin * nx + eta_bin)[inside]
                mu += np.bincount(flat, minlength=nx * nx)
    w = w_counts / float(s * s)
    mu = mu.reshape(nx, nx) * (dt / (s * s))
    return RasterMask(w, res, mu, zero_measure=not w_counts.any(), supersample=s)
