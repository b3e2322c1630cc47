"""Quantitative observability: quadratic form of the observed energy.

For band-limited data the observed energy splits into four oscillatory
sums against the Fourier coefficients of the indicator of G: two diagonal
transport-type terms (one per characteristic family) and two cross terms
whose coefficients are indicator coefficients at (k+l, k-l).  Assembling
those sums into a Hermitian form Q gives data^T Q data = integral over G
of |u_t|^2 exactly (in the cell-center quadrature of the raster), and the
minimal Rayleigh quotient of Q against the energy form is the reciprocal
of the best observability constant restricted to the trial space.

Everything is calibrated for T_eff = 2*pi, where the time frequencies of
the characteristic exponentials live on the lattice of the bi-periodic
transform; other horizons use the same assembly with the rectangle
transform.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .fibers import FiberData
from .grid import TWO_PI, Resolution
from .regions import RasterMask
from .wavelab import WaveState


@dataclass(frozen=True)
class IndicatorSpectrum:
    """Coefficients g_hat(a1, a2) of 1_G, normalized by (2*pi * t_eff).

    g_hat(0, 0) equals |G| / (2*pi*t_eff); Hermitian symmetry holds since
    the mask is real.  ``l2_mass`` is the integral of w^2 (equals |G| for
    a binary mask); the gap |G| - sum of resolved |coefficients|^2 bounds
    the spectral mass beyond the resolved order.
    """

    g_hat: np.ndarray  # shape (2M+1, 2M+1), index [M + a1, M + a2]
    order: int
    res: Resolution
    measure: float
    l2_mass: float

    def value(self, a1: int, a2: int) -> complex:
        m = self.order
        if abs(a1) > m or abs(a2) > m:
            raise ValueError(f"coefficient ({a1}, {a2}) beyond order {m}")
        return complex(self.g_hat[m + a1, m + a2])

    def raw(self, a1: int, a2: int) -> complex:
        """Unnormalized integral of 1_G * exp(i(a1*t + a2*x))."""
        return self.value(a1, a2) * (TWO_PI * self.res.t_eff)


def indicator_fourier(mask: RasterMask, order: int) -> IndicatorSpectrum:
    """Cell-center quadrature transform of the occupancy grid."""
    if order > mask.res.n // 2:
        raise ValueError(f"order {order} too large for n={mask.res.n}")
    if order < 1:
        raise ValueError("order must be >= 1")
    res = mask.res
    nt, n = mask.w.shape
    t_c = (np.arange(nt) + 0.5) * res.dt
    x_c = (np.arange(n) + 0.5) * res.dx
    alphas = np.arange(-order, order + 1)
    e_t = np.exp(1j * np.outer(alphas, t_c))  # (2M+1, nt)
    e_x = np.exp(1j * np.outer(x_c, alphas))  # (n, 2M+1)
    raw = e_t @ mask.w @ e_x * (res.dt * res.dx)
    return IndicatorSpectrum(
        g_hat=raw / (TWO_PI * res.t_eff),
        order=order,
        res=res,
        measure=mask.measure,
        l2_mass=mask.l2_mass,
    )


# --------------------------------------------------------------------------
# Gram matrix over real data coordinates
# --------------------------------------------------------------------------
#
# Real coordinate layout, dimension 4N+1:
#   z[0]                  = b_0 (mean of u1)
#   z[4k-3 .. 4k] (k>=1)  = Re a_k, Im a_k, Re b_k, Im b_k
# with a_k the coefficients of u0 and b_k of u1 (conjugate symmetry of the
# negative modes is implied by real data).  The energy is z^T diag(e) z
# with e = (2*pi; 4*pi*k^2, 4*pi*k^2, 4*pi, 4*pi per k).


@dataclass(frozen=True)
class GramMatrix:
    q: np.ndarray
    e_weights: np.ndarray
    n_modes: int
    res: Resolution

    @property
    def dim(self) -> int:
        return self.q.shape[0]

    def quad_form(self, z: np.ndarray) -> float:
        return float(z @ self.q @ z)

    def energy(self, z: np.ndarray) -> float:
        return float((self.e_weights * z * z).sum())


def coords_from_coeffs(a: Sequence[complex], b: Sequence[complex], b0: float) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    z = np.empty(4 * len(a) + 1)
    z[0] = b0
    z[1::4] = a.real
    z[2::4] = a.imag
    z[3::4] = b.real
    z[4::4] = b.imag
    return z


def coeffs_from_coords(z: np.ndarray) -> Tuple[np.ndarray, np.ndarray, float]:
    a = z[1::4] + 1j * z[2::4]
    b = z[3::4] + 1j * z[4::4]
    return a, b, float(z[0])


def state_from_coords(z: np.ndarray, res: Resolution) -> WaveState:
    a, b, b0 = coeffs_from_coords(z)
    return WaveState.from_spectral(a, b, b0, res)


def energy_weights(n_modes: int) -> np.ndarray:
    e = np.empty(4 * n_modes + 1)
    e[0] = TWO_PI
    k = np.arange(1, n_modes + 1, dtype=float)
    e[1::4] = 2.0 * TWO_PI * k**2
    e[2::4] = 2.0 * TWO_PI * k**2
    e[3::4] = 2.0 * TWO_PI
    e[4::4] = 2.0 * TWO_PI
    return e


def gram_matrix(spectrum: IndicatorSpectrum, n_modes: int) -> GramMatrix:
    """Assemble Q with z^T Q z = integral over G of |u_t|^2 for band-limited data.

    Internally the form is built over the complex amplitudes
    P_k = ik*a_k + b_k and M_k = ik*a_k - b_k of the two characteristic
    families, then pushed to the real coordinate layout.
    """
    if n_modes < 1:
        raise ValueError("n_modes must be >= 1")
    if spectrum.order < 2 * n_modes:
        raise ValueError(
            f"spectrum order {spectrum.order} insufficient for N={n_modes} (need 2N)"
        )
    n = n_modes
    ks = list(range(1, n + 1)) + list(range(-1, -n - 1, -1))  # P/M block order
    dim_c = 1 + 4 * n  # b0, P_k (2n), M_k (2n)
    q_c = np.zeros((dim_c, dim_c), dtype=complex)

    def g(a1: int, a2: int) -> complex:
        return spectrum.raw(a1, a2)

    idx_p = {k: 1 + i for i, k in enumerate(ks)}
    idx_m = {k: 1 + 2 * n + i for i, k in enumerate(ks)}

    q_c[0, 0] = g(0, 0)
    for l in ks:
        q_c[idx_p[l], 0] += 0.5 * g(-l, -l)
        q_c[0, idx_p[l]] += 0.5 * g(l, l)
        q_c[idx_m[l], 0] -= 0.5 * g(l, -l)
        q_c[0, idx_m[l]] -= 0.5 * g(-l, l)
    for k in ks:
        for l in ks:
            q_c[idx_p[l], idx_p[k]] += 0.25 * g(k - l, k - l)
            q_c[idx_m[l], idx_m[k]] += 0.25 * g(l - k, k - l)
            q_c[idx_m[l], idx_p[k]] -= 0.25 * g(k + l, k - l)
            q_c[idx_p[l], idx_m[k]] -= 0.25 * g(-(k + l), k - l)

    # v = L z : P_k = (-k Im a_k + Re b_k) + i (k Re a_k + Im b_k), M_k likewise
    lmat = np.zeros((dim_c, 4 * n + 1), dtype=complex)
    lmat[0, 0] = 1.0
    for k in range(1, n + 1):
        ra, ia, rb, ib = 4 * k - 3, 4 * k - 2, 4 * k - 1, 4 * k
        for sign in (+1, -1):
            kk = sign * k
            p_row = np.zeros(4 * n + 1, dtype=complex)
            p_row[ra] = 1j * kk
            p_row[ia] = 1j * kk * (1j if sign > 0 else -1j)
            p_row[rb] = 1.0
            p_row[ib] = 1j if sign > 0 else -1j
            lmat[idx_p[kk]] = p_row
            m_row = p_row.copy()
            m_row[rb] = -1.0
            m_row[ib] = -(1j if sign > 0 else -1j)
            lmat[idx_m[kk]] = m_row

    q_real = lmat.conj().T @ q_c @ lmat
    q_sym = 0.5 * (q_real + q_real.T)
    imag_resid = float(np.abs(q_sym.imag).max())
    scale = max(1.0, float(np.abs(q_sym.real).max()))
    if imag_resid > 1e-9 * scale:
        raise AssertionError(f"gram assembly lost Hermitian symmetry: {imag_resid}")
    return GramMatrix(q_sym.real, energy_weights(n), n, spectrum.res)


@dataclass(frozen=True)
class EstimatorResult:
    """Minimal Rayleigh quotient of the observed-energy form.

    lambda_min bounds the observed/total energy ratio from below on the
    trial space; its reciprocal is the observability constant estimate.
    """

    lambda_min: float
    n_modes: int
    argmin_coords: np.ndarray
    res: Resolution
    trace: Tuple[Tuple[int, float], ...]

    @property
    def c_obs(self) -> float:
        return float("inf") if self.lambda_min <= 0.0 else 1.0 / self.lambda_min

    def argmin_state(self) -> WaveState:
        return state_from_coords(self.argmin_coords, self.res)


def min_rayleigh(gram: GramMatrix) -> EstimatorResult:
    """Smallest generalized eigenvalue of (Q, diag(e)) via symmetric reduction."""
    s = 1.0 / np.sqrt(gram.e_weights)
    h = gram.q * s[:, None] * s[None, :]
    h = 0.5 * (h + h.T)
    vals, vecs = np.linalg.eigh(h)
    lam = float(max(vals[0], 0.0))
    z = s * vecs[:, 0]
    return EstimatorResult(lam, gram.n_modes, z, gram.res,
                           trace=((gram.n_modes, lam),))


def rayleigh_convergence(mask: RasterMask, mode_list: Sequence[int]) -> EstimatorResult:
    """min_rayleigh across a ladder of trial-space orders (one spectrum pass)."""
    order = 2 * max(mode_list)
    spectrum = indicator_fourier(mask, order)
    trace: List[Tuple[int, float]] = []
    last = None
    for n_modes in mode_list:
        last = min_rayleigh(gram_matrix(spectrum, n_modes))
        trace.append((n_modes, last.lambda_min))
    assert last is not None
    return EstimatorResult(last.lambda_min, last.n_modes, last.argmin_coords,
                           last.res, tuple(trace))


# --------------------------------------------------------------------------
# High-frequency threshold and sampled inequality
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ThresholdReport:
    n_cut: int
    tail: float
    unresolved_mass: float
    reachable: bool
    max_order: int


def high_freq_threshold(spectrum: IndicatorSpectrum, c0_line: float,
                        include_unresolved: bool = True) -> ThresholdReport:
    """Smallest N whose off-diagonal tail is below c0_line / 10.

    The tail at N collects the orthonormal-basis mass of the indicator
    over lattice points with |alpha|^2 > 2 N^2; these are the only
    coefficients the cross terms of the observed-energy form can touch
    when the data lives above frequency N.  ``unresolved_mass`` bounds the
    part of the tail beyond the resolved order (|G| minus resolved mass);
    with include_unresolved it is added under the root, which makes the
    reported tail an upper bound rather than a truncation.
    """
    if not c0_line > 0.0:
        raise ValueError("need a positive uniform fiber bound")
    m = spectrum.order
    # orthonormal-basis mass |raw(a)|^2 / (2*pi)^2, i.e. |g_hat|^2 * t_eff^2
    on_sq = (np.abs(spectrum.g_hat) * spectrum.res.t_eff) ** 2
    alphas = np.arange(-m, m + 1)
    r2 = alphas[:, None] ** 2 + alphas[None, :] ** 2
    resolved_total = float(on_sq.sum())
    unresolved = max(0.0, spectrum.l2_mass - resolved_total)
    target = c0_line / 10.0
    budget = unresolved if include_unresolved else 0.0
    for n_cut in range(1, m + 1):
        tail_sq = float(on_sq[r2 > 2 * n_cut * n_cut].sum()) + budget
        tail = float(np.sqrt(tail_sq))
        if tail <= target:
            return ThresholdReport(n_cut, tail, unresolved, True, m)
    tail = float(np.sqrt(budget))
    return ThresholdReport(m, tail, unresolved, tail <= target, m)


@dataclass(frozen=True)
class HighFreqCheck:
    worst_ratio: float
    mean_ratio: float
    trials: int
    n_cut: int
    k_max: int


def verify_high_freq_inequality(mask: RasterMask, n_cut: int, trials: int = 1000,
                                seed: int = 0, k_max: Optional[int] = None) -> HighFreqCheck:
    """Sample random data supported on |k| > n_cut; report the worst
    observed/total energy ratio over the trials (strictly positive iff the
    high-frequency estimate is effective on the sampled space)."""
    n = mask.res.n
    k_max = k_max if k_max is not None else n // 4
    if not n_cut < k_max:
        raise ValueError(f"need n_cut < k_max; got {n_cut} >= {k_max}")
    spectrum = indicator_fourier(mask, 2 * k_max)
    gram = gram_matrix(spectrum, k_max)
    weights = gram.e_weights
    low = np.zeros(4 * k_max + 1, dtype=bool)
    low[0] = True  # b0 is a frequency-0 mode
    for k in range(1, n_cut + 1):
        low[4 * k - 3 : 4 * k + 1] = True
    rng = np.random.default_rng(seed)
    worst = np.inf
    total = 0.0
    for _ in range(trials):
        z = rng.standard_normal(4 * k_max + 1)
        z[low] = 0.0
        num = gram.quad_form(z)
        den = float((weights * z * z).sum())
        ratio = num / den
        worst = min(worst, ratio)
        total += ratio
    return HighFreqCheck(float(worst), total / trials, trials, n_cut, k_max)


def transport_obs_constant(fibers: FiberData, direction: int) -> float:
    """Exact best constant for one-directional transport observability.

    A profile advected with speed ``direction`` is constant along the
    matching characteristic family, so the observed mass of each value is
    its fiber's time measure; the essential infimum over traces is the
    sharp constant c in  c * ||f0||^2 <= integral over G of |u|^2.
    """
    if direction == +1:
        return float(fibers.m_plus.min())
    if direction == -1:
        return float(fibers.m_minus.min())
    raise ValueError("direction must be +1 or -1")
