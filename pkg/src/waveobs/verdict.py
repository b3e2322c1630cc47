"""Composite verdicts: observability, controllability, unique continuation.

The decision logic composes the fiber analyses:

* observable      <=> uniform fiber bound holds  AND  no symmetry pair;
* unique continuation <=> every fiber has positive mass AND no symmetry pair;
* controllability is reported identical to observability (the two are dual
  statements of one inequality).

Raster verdicts approximate almost-everywhere statements, so geometry that
sits within a couple of grid steps of a threshold is reported as
indeterminate-at-resolution instead of being silently decided.  Every
negative verdict carries constructive witness data whose simulated
observed/total energy ratio is checked to be O(dt).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .estimator import EstimatorResult, rayleigh_convergence
from .fibers import FiberData, GccReport, check_gcc, fiber_profiles, gcc_floor
from .grid import TWO_PI, Resolution
from .regions import RasterMask, Product, SpacetimeRegion, rasterize
from .symmetry import (
    SymmetryVerdict,
    WitnessData,
    detect_osc,
    witness_from_pair,
    zero_fiber_witness,
)
from .wavelab import WaveState

YES = "yes"
NO = "no"
INDETERMINATE = "indeterminate-at-resolution"


@dataclass
class Verdict:
    observable: str
    ucp: str
    controllable: str
    reasons: Tuple[str, ...]
    gcc: GccReport
    symmetry: Optional[SymmetryVerdict]
    witness: Optional[WitnessData] = None
    witness_state: Optional[WaveState] = None
    estimator: Optional[EstimatorResult] = None
    provenance: dict = field(default_factory=dict)


def _margins(gcc: GccReport, sym: Optional[SymmetryVerdict], res: Resolution):
    """Near-threshold checks behind the indeterminate band."""
    floor = gcc_floor(res)
    gcc_marginal = gcc.holds and gcc.c0_est <= 2.0 * floor
    sym_marginal = False
    if sym is not None and sym.kind == "pair" and sym.decomposition is not None:
        smallest = min(min(a, b) for a, b in sym.decomposition.measures())
        sym_marginal = smallest <= 2.0 * res.dx
    return gcc_marginal, sym_marginal


def classify(mask: RasterMask, estimate_modes: Optional[Sequence[int]] = None) -> Verdict:
    """Full pipeline: fibers -> uniform bound -> symmetry -> composition."""
    if mask.zero_measure or not mask.w.any():
        raise ValueError("empty observation region")
    res = mask.res
    fibers = fiber_profiles(mask)
    gcc = check_gcc(fibers)
    sym = detect_osc(fibers, gcc)
    reasons: List[str] = []
    witness: Optional[WitnessData] = None
    witness_state: Optional[WaveState] = None

    gcc_marginal, sym_marginal = _margins(gcc, sym, res)

    if sym.kind == "weak_gcc_failure":
        ucp = NO
        observable = NO
        reasons.append(
            f"characteristics with zero observation mass: "
            f"{len(sym.zero_fibers_xi)} xi-bins, {len(sym.zero_fibers_eta)} eta-bins"
        )
        witness_state = zero_fiber_witness(sym.zero_fibers_xi, sym.zero_fibers_eta, res)
    elif sym.kind == "pair":
        ucp = INDETERMINATE if sym_marginal else NO
        observable = ucp
        a_bins, b_bins = sym.pair
        lo = int(np.argmax(a_bins))
        reasons.append(
            f"symmetry pair with |A|={a_bins.sum() * res.dx:.6g}, "
            f"|B|={b_bins.sum() * res.dx:.6g} (first A-bin {lo}), "
            f"symdiff={sym.symdiff_measure:.3g}"
        )
        if observable == NO:
            witness = witness_from_pair(a_bins, b_bins, res)
            witness_state = witness.state
    else:
        ucp = YES
        if gcc.holds:
            observable = INDETERMINATE if gcc_marginal else YES
            reasons.append(
                f"uniform fiber bound c0={gcc.c0_est:.6g} (time measure), "
                f"single fiber-graph component"
            )
        else:
            observable = NO
            reasons.append(
                f"uniform fiber bound fails: min fiber {gcc.c0_est:.6g} <= "
                f"floor {gcc.floor:.3g}"
            )
            witness_state = _thin_fiber_witness(fibers, res)

    if estimate_modes:
        est = rayleigh_convergence(mask, list(estimate_modes))
        reasons.append(f"estimator lambda_min trace {est.trace}")
    else:
        est = None

    return Verdict(
        observable=observable,
        ucp=ucp,
        controllable=observable,
        reasons=tuple(reasons),
        gcc=gcc,
        symmetry=sym,
        witness=witness,
        witness_state=witness_state,
        estimator=est,
        provenance={
            "n": res.n,
            "t_eff": res.t_eff,
            "supersample": mask.supersample,
            "measure": mask.measure,
        },
    )


def _thin_fiber_witness(fibers: FiberData, res: Resolution) -> WaveState:
    """Near-invisible data concentrated on the least-observed characteristic.

    A one-bin bump on the thinnest fiber, mean-corrected; the correction
    spreads O(dx) amplitude over the other family, so the observed/total
    ratio stays O(dt).
    """
    j_xi = int(np.argmin(fibers.m_minus))
    j_eta = int(np.argmin(fibers.m_plus))
    n = res.n
    bump = np.zeros(n)
    if fibers.m_minus[j_xi] <= fibers.m_plus[j_eta]:
        bump[j_xi] = 1.0
        p0 = bump - 1.0 / (2.0 * n)
        q0 = np.full(n, -1.0 / (2.0 * n))
    else:
        bump[j_eta] = 1.0
        q0 = bump - 1.0 / (2.0 * n)
        p0 = np.full(n, -1.0 / (2.0 * n))
    return WaveState.from_characteristic(p0, q0, res)


def classify_product(t_intervals: Sequence[Tuple[float, float]],
                     x_arcs: Sequence[Tuple[float, float]], horizon: float,
                     n: int = 256, supersample: int = 4) -> Verdict:
    """Fast path for Cartesian products E x F: observable iff the uniform
    fiber bound holds (products admit no symmetry pair once it does).

    Also reports the necessary-size diagnostic |E| + |F| >= 2*pi.
    """
    from .regions import normalize_arcs

    arcs = normalize_arcs(x_arcs)
    t_ivals = tuple((max(0.0, a), min(horizon, b)) for a, b in t_intervals)
    if not arcs or not any(b > a for a, b in t_ivals):
        raise ValueError("empty product factor")
    region = SpacetimeRegion(horizon, Product(t_ivals, arcs))
    mask = rasterize(region, n=n, supersample=supersample)
    fibers = fiber_profiles(mask)
    gcc = check_gcc(fibers)
    floor = gcc_floor(mask.res)
    size_e = sum(b - a for a, b in t_ivals)
    size_f = sum(b - a for a, b in arcs)
    reasons = [f"product fast path: |E|+|F| = {size_e + size_f:.6g} vs 2*pi"]
    if gcc.holds:
        observable = INDETERMINATE if gcc.c0_est <= 2.0 * floor else YES
        reasons.append(f"uniform fiber bound c0={gcc.c0_est:.6g}")
    else:
        observable = NO
        reasons.append(f"uniform fiber bound fails (min fiber {gcc.c0_est:.6g})")
    ucp = YES if gcc.weak_holds else NO
    return Verdict(
        observable=observable,
        ucp=ucp,
        controllable=observable,
        reasons=tuple(reasons),
        gcc=gcc,
        symmetry=None,
        provenance={"n": n, "t_eff": mask.res.t_eff, "supersample": supersample,
                    "measure": mask.measure, "fast_path": "product"},
    )


def classify_open_everywhere(mask: RasterMask, region: SpacetimeRegion) -> Verdict:
    """Every-trace fiber check for declared-open regions.

    For open G a uniform bound at literally every trace excludes symmetry
    pairs in the continuum; at raster scale we additionally keep the pair
    detector as evidence, since bin-level fibers cannot see boundary-null
    degeneracies (those remain the indeterminate band's job).
    """
    if not region.declared_open:
        raise ValueError("region is not declared open (contains raster literals)")
    verdict = classify(mask)
    floor = gcc_floor(mask.res)
    strict = verdict.gcc.c0_est > 2.0 * floor
    reasons = list(verdict.reasons)
    if strict and verdict.symmetry is not None and verdict.symmetry.kind == "no_pair":
        reasons.append("open region with every-bin uniform bound: observable")
        verdict.observable = YES
        verdict.controllable = YES
        verdict.ucp = YES
    elif not strict and verdict.observable == YES:
        verdict.observable = INDETERMINATE
        verdict.controllable = INDETERMINATE
        reasons.append("every-bin uniform bound not met at this resolution")
    verdict.reasons = tuple(reasons)
    verdict.provenance["fast_path"] = "open-everywhere"
    return verdict


@dataclass(frozen=True)
class NecessityProbe:
    direction: str
    bin_index: int
    fiber_mass: float
    ratio: float
    bound: float

    @property
    def ok(self) -> bool:
        return self.ratio <= self.bound


@dataclass(frozen=True)
class NecessityReport:
    probes: Tuple[NecessityProbe, ...]

    @property
    def all_ok(self) -> bool:
        return all(p.ok for p in self.probes)


def gcc_necessity_check(mask: RasterMask, probes_per_side: int = 4,
                        tol: float = 0.05) -> NecessityReport:
    """Empirical necessity of the uniform bound.

    For the thinnest fibers of each family, traveling-wave data
    concentrated on that trace (lifted to wave data via the two branches
    u1 = +-u0x) is observed with energy ratio at most half the fiber mass
    plus a mean-correction tail; the probe checks ratio <= mass/2 + tol.
    The quadrature is the diagonal-aligned one, which reproduces the fiber
    sums exactly for single-family data.
    """
    from .fibers import fiber_profiles
    from .wavelab import aligned_observed_energy

    fibers = fiber_profiles(mask)
    res = mask.res
    n = res.n
    out: List[NecessityProbe] = []
    for direction, prof in (("xi", fibers.m_minus), ("eta", fibers.m_plus)):
        worst = np.argsort(prof)[:probes_per_side]
        for j in worst:
            bump = np.zeros(n)
            if direction == "xi":
                # the corner path of m_minus[j] runs through field bin j-1
                bump[(int(j) - 1) % n] = 1.0
                p0, q0 = bump - 1.0 / (2 * n), np.full(n, -1.0 / (2 * n))
            else:
                bump[int(j)] = 1.0
                q0, p0 = bump - 1.0 / (2 * n), np.full(n, -1.0 / (2 * n))
            observed = aligned_observed_energy(p0, q0, mask)
            total = float(((p0 + q0) ** 2 + (p0 - q0) ** 2).sum() * res.dx)
            ratio = observed / total
            mass = float(prof[j])
            out.append(
                NecessityProbe(direction, int(j), mass, ratio, 0.5 * mass + tol)
            )
    return NecessityReport(tuple(out))
