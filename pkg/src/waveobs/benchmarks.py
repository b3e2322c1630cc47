"""Built-in benchmark regions with exact piecewise-constant reference solutions.

Both constructions start from free-wave data whose characteristic
derivatives u_xi = u_eta are a common step profile on the circle, and take
G to be exactly the set where the two derivatives agree, i.e. where
u_t = u_xi - u_eta = 0.  Such a G always satisfies the geometric control
condition (every characteristic spends a fixed positive time inside it),
yet the nonzero reference solution is invisible on G, so observability and
unique continuation both fail.  The blocks of equal values are an explicit
symmetry pair of the region.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .grid import TWO_PI, Resolution
from .regions import (
    ArcSet,
    CharBand,
    Intersection,
    SpacetimeRegion,
    Union,
    arcs_contain,
    arcs_measure,
    normalize_arcs,
)
from .wavelab import WaveState

Levels = Tuple[Tuple[float, float, float], ...]  # (lo, hi, value) on [0, 2*pi)


@dataclass(frozen=True)
class ReferenceSolution:
    """Step-profile free-wave data invisible on the companion region.

    ``xi_levels`` / ``eta_levels`` give u_xi(0, x) and u_eta(0, x) as
    piecewise-constant functions of the trace x; ``pair`` is the (A, B)
    symmetry pair realized by the top-level value block.

    Pair detection works at bin granularity, so the value-block
    boundaries must land on bin edges; ``grid_divisor`` is the factor n
    must be divisible by for that (see :meth:`aligned_n`).
    """

    xi_levels: Levels
    eta_levels: Levels
    pair: Tuple[ArcSet, ArcSet]
    energy: float
    grid_divisor: int = 1

    def aligned_n(self, target_n: int) -> int:
        """Nearest bin count to target_n that resolves the block boundaries."""
        d = self.grid_divisor
        return max(8, int(round(target_n / d)) * d)

    def xi_profile(self, res: Resolution) -> np.ndarray:
        return _sample_levels(self.xi_levels, res)

    def eta_profile(self, res: Resolution) -> np.ndarray:
        return _sample_levels(self.eta_levels, res)

    def wave_state(self, res: Resolution) -> WaveState:
        p0 = self.xi_profile(res)
        q0 = self.eta_profile(res)
        return WaveState.from_characteristic(p0, q0, res)


def _sample_levels(levels: Levels, res: Resolution) -> np.ndarray:
    x = res.x_centers()
    out = np.zeros(res.n)
    for lo, hi, value in levels:
        out[(x >= lo) & (x < hi)] = value
    return out


def _matching_blocks_region(arc_sets: Tuple[ArcSet, ...], horizon: float) -> SpacetimeRegion:
    """Union over k of {xi in A_k} intersect {eta in A_k}."""
    blocks = tuple(
        Intersection((CharBand("xi", arcs), CharBand("eta", arcs)))
        for arcs in arc_sets
    )
    return SpacetimeRegion(horizon, Union(blocks))


def figure1_region() -> Tuple[SpacetimeRegion, ReferenceSolution]:
    """Half/half counterexample at T = 2*pi.

    u_xi = u_eta = -1 on (0, pi) and +1 on (pi, 2*pi); G is the union of
    the two matching characteristic blocks.  G fills half the slab
    (|G| = 2*pi^2), meets every characteristic for time pi (line measure
    sqrt(2)*pi), the reference energy is 8*pi, and u_t vanishes on G.
    """
    half1 = normalize_arcs([(0.0, math.pi)])
    half2 = normalize_arcs([(math.pi, TWO_PI)])
    region = _matching_blocks_region((half1, half2), TWO_PI)
    levels: Levels = ((0.0, math.pi, -1.0), (math.pi, TWO_PI, 1.0))
    ref = ReferenceSolution(
        xi_levels=levels,
        eta_levels=levels,
        pair=(half1, half1),
        energy=8.0 * math.pi,
        grid_divisor=2,
    )
    return region, ref


def figure2_region() -> Tuple[SpacetimeRegion, ReferenceSolution]:
    """Unequal-split counterexample at T = 2*pi with levels {1, -2}.

    The value-1 block sits over A = (0, 2*pi/3) u (4*pi/3, 2*pi) (measure
    4*pi/3) and the value -2 block over its complement; the level -2 is
    exactly the mean-zero balancing value -(|A|+|B|)/(4*pi-(|A|+|B|)) for
    A = B.
    """
    third = TWO_PI / 3.0
    a_arcs = normalize_arcs([(0.0, third), (2.0 * third, TWO_PI)])
    a_comp = normalize_arcs([(third, 2.0 * third)])
    region = _matching_blocks_region((a_arcs, a_comp), TWO_PI)
    levels: Levels = (
        (0.0, third, 1.0),
        (third, 2.0 * third, -2.0),
        (2.0 * third, TWO_PI, 1.0),
    )
    # ||u0x||^2 + ||u1||^2 = 2(||p||^2 + ||q||^2) with p = q = the profile
    profile_sq = 1.0**2 * arcs_measure(a_arcs) + 2.0**2 * arcs_measure(a_comp)
    ref = ReferenceSolution(
        xi_levels=levels,
        eta_levels=levels,
        pair=(a_arcs, a_arcs),
        energy=4.0 * profile_sq,
        grid_divisor=3,
    )
    return region, ref


def matching_blocks(arc_sets: Tuple[ArcSet, ...], horizon: float = TWO_PI) -> SpacetimeRegion:
    """General matched-block region: G = union_k L_{xi in A_k} cap L_{eta in A_k}.

    The arc sets should partition the circle; every characteristic of each
    family then meets G for time min_k |A_k| > 0 while the step data with
    distinct values on the A_k remains invisible on G.
    """
    return _matching_blocks_region(arc_sets, horizon)


def reference_ut_zero_on(region: SpacetimeRegion, ref: ReferenceSolution,
                         t: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Pointwise |u_t| of the reference solution restricted to G (test hook)."""
    ut = _eval_levels(ref.xi_levels, x + t) - _eval_levels(ref.eta_levels, x - t)
    return np.where(region.contains(t, x), np.abs(ut), 0.0)


def _eval_levels(levels: Levels, values: np.ndarray) -> np.ndarray:
    v = np.mod(values, TWO_PI)
    out = np.zeros(v.shape)
    for lo, hi, value in levels:
        out[(v >= lo) & (v < hi)] = value
    return out
