"""Symmetry pairs of an observation region and the witnesses they generate.

A free wave's u_xi value at a point propagates along its xi-line and, at
every point of G on that line, is pinned to the u_eta value of the crossing
eta-line (u_t = 0 on G forces u_xi = u_eta there).  Occupied (xi, eta) bin
pairs therefore act as edges of a bipartite graph on xi-bins and eta-bins:
a connected graph propagates one constant everywhere (only the zero datum
survives), while each extra component is a value block the observation
cannot see.  The components are exactly the candidate pairs (A, B) with
G cap L_{xi in A} = G cap L_{eta in B} up to raster tolerance, and any
such nontrivial pair yields explicit step data invisible on G.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .fibers import FiberData, GccReport, check_gcc, gcc_floor
from .grid import TWO_PI, Resolution
from .wavelab import WaveState


class UnionFind:
    def __init__(self, size: int):
        self.parent = list(range(size))

    def find(self, a: int) -> int:
        root = a
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[a] != root:
            self.parent[a], a = root, self.parent[a]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def edge_floor(res: Resolution) -> float:
    """A (xi, eta) cell counts as an edge only above discretization noise."""
    return gcc_floor(res) * res.dx / 2.0


@dataclass(frozen=True)
class Component:
    xi_bins: np.ndarray
    eta_bins: np.ndarray
    res: Resolution

    @property
    def xi_measure(self) -> float:
        return float(self.xi_bins.sum()) * self.res.dx

    @property
    def eta_measure(self) -> float:
        return float(self.eta_bins.sum()) * self.res.dx


@dataclass(frozen=True)
class FiberGraph:
    """Connected components of the bipartite xi-bin / eta-bin graph."""

    components: Tuple[Component, ...]
    labels_xi: np.ndarray
    labels_eta: np.ndarray
    res: Resolution

    @property
    def component_count(self) -> int:
        return len(self.components)


def _edge_matrix(fibers: FiberData) -> np.ndarray:
    """Boolean adjacency used by both the detector and the brute-force oracle.

    Besides thresholding mu, every bin whose total fiber mass is positive
    but whose individual entries all sit below the edge floor is attached
    through its heaviest entry, so no positive-mass fiber is orphaned.
    """
    floor_e = edge_floor(fibers.res)
    floor_m = gcc_floor(fibers.res)
    edges = fibers.mu >= floor_e
    for p in np.flatnonzero((fibers.m_minus > floor_m) & ~edges.any(axis=1)):
        edges[p, int(np.argmax(fibers.mu[p]))] = True
    for q in np.flatnonzero((fibers.m_plus > floor_m) & ~edges.any(axis=0)):
        edges[int(np.argmax(fibers.mu[:, q])), q] = True
    return edges


def build_fiber_graph(fibers: FiberData) -> FiberGraph:
    n = fibers.n
    edges = _edge_matrix(fibers)
    uf = UnionFind(2 * n)
    rows, cols = np.nonzero(edges)
    for p, q in zip(rows.tolist(), cols.tolist()):
        uf.union(p, n + q)
    labels_xi = np.full(n, -1)
    labels_eta = np.full(n, -1)
    roots: dict[int, int] = {}
    for p in np.flatnonzero(edges.any(axis=1)):
        labels_xi[p] = roots.setdefault(uf.find(int(p)), len(roots))
    for q in np.flatnonzero(edges.any(axis=0)):
        labels_eta[q] = roots.setdefault(uf.find(int(n + q)), len(roots))
    comps = []
    for label in range(len(roots)):
        comps.append(
            Component(labels_xi == label, labels_eta == label, fibers.res)
        )
    comps.sort(key=lambda c: (-c.xi_measure, int(np.argmax(c.xi_bins))))
    return FiberGraph(tuple(comps), labels_xi, labels_eta, fibers.res)


@dataclass(frozen=True)
class DecompositionPair:
    """Disjoint (A_k, B_k) classes covering all bins that carry mass."""

    classes: Tuple[Tuple[np.ndarray, np.ndarray], ...]
    res: Resolution

    @property
    def count(self) -> int:
        return len(self.classes)

    def measures(self) -> List[Tuple[float, float]]:
        dx = self.res.dx
        return [(float(a.sum()) * dx, float(b.sum()) * dx) for a, b in self.classes]


@dataclass(frozen=True)
class SymmetryVerdict:
    """Outcome of the symmetry search.

    kind = "no_pair":          single component; certificate that no
                               bin-representable nontrivial pair exists.
    kind = "pair":             a decomposition into >= 2 classes; the class
                               of largest xi-measure is the reported (A, B).
    kind = "weak_gcc_failure": some fibers carry no mass at all; those bins
                               are themselves blind directions (handled by
                               the transport witness, not by a pair).
    """

    kind: str
    component_count: int
    decomposition: Optional[DecompositionPair] = None
    pair: Optional[Tuple[np.ndarray, np.ndarray]] = None
    symdiff_measure: Optional[float] = None
    zero_fibers_xi: Tuple[int, ...] = ()
    zero_fibers_eta: Tuple[int, ...] = ()


def osc_check_pair(fibers: FiberData, a_bins: np.ndarray, b_bins: np.ndarray) -> float:
    """Spacetime measure of [G cap L_{xi in A}] symdiff [G cap L_{eta in B}].

    Zero exactly iff (A, B) is an exact raster symmetry pair of G.
    """
    a = np.asarray(a_bins, dtype=bool)
    b = np.asarray(b_bins, dtype=bool)
    mism = fibers.mu[a][:, ~b].sum() + fibers.mu[~a][:, b].sum()
    return float(mism * fibers.res.dx)


def detect_osc(fibers: FiberData, gcc: Optional[GccReport] = None) -> SymmetryVerdict:
    """Classify G: no pair / explicit pair / zero-fiber degeneracy."""
    gcc = gcc or check_gcc(fibers)
    if not gcc.weak_holds:
        return SymmetryVerdict(
            kind="weak_gcc_failure",
            component_count=0,
            zero_fibers_xi=gcc.zero_fibers_xi,
            zero_fibers_eta=gcc.zero_fibers_eta,
        )
    graph = build_fiber_graph(fibers)
    if graph.component_count <= 1:
        return SymmetryVerdict(kind="no_pair", component_count=graph.component_count)
    decomposition = DecompositionPair(
        tuple((c.xi_bins, c.eta_bins) for c in graph.components), fibers.res
    )
    a_bins, b_bins = decomposition.classes[0]
    return SymmetryVerdict(
        kind="pair",
        component_count=graph.component_count,
        decomposition=decomposition,
        pair=(a_bins, b_bins),
        symdiff_measure=osc_check_pair(fibers, a_bins, b_bins),
    )


def brute_force_osc(fibers: FiberData, gcc: Optional[GccReport] = None) -> SymmetryVerdict:
    """Exhaustive oracle over all xi-bin subsets (n <= 12).

    For each candidate A the only possible partner is the set B of eta-bins
    reached by A's edges; (A, B) is a pair iff no edge leaves the complement
    of A into B.
    """
    n = fibers.n
    if n > 12:
        raise ValueError(f"brute force limited to n <= 12, got {n}")
    gcc = gcc or check_gcc(fibers)
    if not gcc.weak_holds:
        return SymmetryVerdict(
            kind="weak_gcc_failure",
            component_count=0,
            zero_fibers_xi=gcc.zero_fibers_xi,
            zero_fibers_eta=gcc.zero_fibers_eta,
        )
    edges = _edge_matrix(fibers)
    best: Optional[Tuple[int, np.ndarray, np.ndarray]] = None
    for bits in range(1, (1 << n) - 1):
        a = np.array([(bits >> j) & 1 == 1 for j in range(n)])
        b = edges[a].any(axis=0)
        if not b.any():
            continue
        if edges[~a][:, b].any():
            continue
        size = int(a.sum())
        if best is None or size > best[0]:
            best = (size, a, b)
    if best is None:
        return SymmetryVerdict(kind="no_pair", component_count=1)
    _, a, b = best
    return SymmetryVerdict(
        kind="pair",
        component_count=2,
        pair=(a, b),
        symdiff_measure=osc_check_pair(fibers, a, b),
    )


@dataclass(frozen=True)
class WitnessData:
    """Step initial data invisible on G, built from a pair (A, B).

    u_xi(0) = 1 on A and a on its complement, u_eta(0) likewise on B, with
    a = -(|A|+|B|) / (4*pi - (|A|+|B|)) making u0x mean-free.  The
    conserved flux in null-coordinate form is |A| + |B|; the
    (u_x +- u_t)-form functional of the conservation check equals twice
    that value.
    """

    state: WaveState
    a_level: float
    predicted_flux: float
    a_bins: np.ndarray
    b_bins: np.ndarray


def witness_from_pair(a_bins: np.ndarray, b_bins: np.ndarray,
                      res: Resolution) -> WitnessData:
    a = np.asarray(a_bins, dtype=bool)
    b = np.asarray(b_bins, dtype=bool)
    dx = res.dx
    meas_a = float(a.sum()) * dx
    meas_b = float(b.sum()) * dx
    total = meas_a + meas_b
    if total == 0.0 or (meas_a >= TWO_PI and meas_b >= TWO_PI):
        raise ValueError("trivial pair: both sides empty or both full")
    if total >= 2.0 * TWO_PI:
        raise ValueError("|A| + |B| = 4*pi leaves the balancing level undefined")
    level = -total / (2.0 * TWO_PI - total)
    p0 = np.where(a, 1.0, level)
    q0 = np.where(b, 1.0, level)
    state = WaveState.from_characteristic(p0, q0, res)
    return WitnessData(state, level, total, a, b)


def zero_fiber_witness(zero_xi: Sequence[int], zero_eta: Sequence[int],
                       res: Resolution) -> WaveState:
    """Transport-type data carried entirely by massless characteristics.

    With a mean-zero profile phi supported on the zero-fiber traces, the
    data u0x = u1 = chi*phi (xi side) or u0x = -u1 = chi*phi (eta side)
    has u_t supported on lines that never meet G.

    Fiber traces are corner paths while sampled profiles live on bins, so
    a bin is fully shielded only when both adjacent corner paths are
    massless; those doubly-covered bins are preferred when they exist.
    """
    if zero_xi:
        raw = np.asarray(sorted(zero_xi), dtype=int)
        side = "xi"
    elif zero_eta:
        raw = np.asarray(sorted(zero_eta), dtype=int)
        side = "eta"
    else:
        raise ValueError("no zero fibers to build a witness from")
    if side == "xi":
        zero_set = set(raw.tolist())
        covered = np.array([p for p in raw if (p + 1) % res.n in zero_set], dtype=int)
        bins = (covered - 0) % res.n if covered.size else raw
        bins = np.asarray(sorted(set(((b) % res.n for b in bins))), dtype=int)
    else:
        bins = raw
    if bins.size >= 2:
        phi = np.zeros(res.n)
        half = bins.size // 2
        phi[bins[:half]] = 1.0
        phi[bins[half:]] = -float(half) / float(bins.size - half)
        work_res = res
    else:
        # a single zero bin: put a +-1 dipole on its two halves at 2n
        work_res = Resolution(2 * res.n, res.horizon)
        phi = np.zeros(work_res.n)
        phi[2 * int(bins[0])] = 1.0
        phi[2 * int(bins[0]) + 1] = -1.0
    if side == "xi":
        p0, q0 = phi, np.zeros_like(phi)
    else:
        p0, q0 = np.zeros_like(phi), phi
    return WaveState.from_characteristic(p0, q0, work_res)


# --------------------------------------------------------------------------
# Symmetric function pairs
# --------------------------------------------------------------------------

StepFunction = Sequence[Tuple[float, np.ndarray]]  # (level, bin mask) pieces


@dataclass(frozen=True)
class SymmetricPairReport:
    kind: str  # "compact", "weak", or "neither"
    class_count: int
    levels: Tuple[float, ...]
    violation: Optional[str] = None


def classify_symmetric_pair(f_steps: StepFunction, g_steps: StepFunction,
                            res: Resolution, l2_remainder: float = 0.0,
                            tol: float = 1e-9) -> SymmetricPairReport:
    """Check whether two step functions form a matched symmetric pair.

    Requirements: pairwise distinct levels; for every level the f-piece
    A_k and g-piece B_k both have positive measure; the A_k (and B_k)
    are disjoint and cover the circle; and integral of (f + g) vanishes.
    A finite family is "compact"; a truncated countable family (declared
    via a positive L2 remainder bound) is "weak".
    """
    def fail(reason: str) -> SymmetricPairReport:
        return SymmetricPairReport("neither", 0, (), reason)

    f_levels = [lv for lv, _ in f_steps]
    g_levels = [lv for lv, _ in g_steps]
    if len(set(f_levels)) != len(f_levels) or len(set(g_levels)) != len(g_levels):
        return fail("levels are not pairwise distinct")
    if sorted(f_levels) != sorted(g_levels):
        return fail("the two functions carry different level sets")
    g_by_level = {lv: bins for lv, bins in g_steps}
    dx = res.dx
    cover_f = np.zeros(res.n, dtype=bool)
    cover_g = np.zeros(res.n, dtype=bool)
    mean = 0.0
    for lv, a_bins in f_steps:
        a = np.asarray(a_bins, dtype=bool)
        b = np.asarray(g_by_level[lv], dtype=bool)
        if not a.any() or not b.any():
            return fail(f"level {lv} has an empty class on one side")
        if (cover_f & a).any() or (cover_g & b).any():
            return fail("classes overlap")
        cover_f |= a
        cover_g |= b
        mean += lv * (a.sum() + b.sum()) * dx
    if not cover_f.all() or not cover_g.all():
        return fail("classes do not cover the circle")
    if abs(mean) > tol * max(1.0, max(abs(lv) for lv in f_levels) * TWO_PI):
        return fail("mean of f + g is nonzero")
    levels = tuple(sorted(f_levels))
    kind = "weak" if l2_remainder > 0.0 else "compact"
    return SymmetricPairReport(kind, len(levels), levels)
