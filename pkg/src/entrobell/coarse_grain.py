"""Coarse-grained (binned) outcome distributions of the homodyne records.

Each record is discretised into windows of width Delta centred on l*Delta,
l = -L..L, i.e. window l covers [l*Delta - Delta/2, l*Delta + Delta/2].
The grid half-extent L is chosen from the marginal standard deviation so
that the neglected two-sided tail mass stays below tail_epsilon.

Two independent routes compute the probability of a 2D cell:

* panel quadrature: the inner integral over b is the exact Gaussian slab
  probability of the conditional law b|a ~ N((w/v) a, 1/(2v)); the outer
  integral over a uses fixed-order Gauss-Legendre panels.
* rectangle CDF: the cell is mapped to a standard bivariate normal
  rectangle with correlation w/v and evaluated with Gauss-Legendre applied
  to the correlation-integral representation of the bivariate normal CDF.

The two must agree to 1e-10 absolute; they share no quadrature machinery.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .gaussian_core import JointGaussianCoefficients, PhaseSettings, TmsvParams, coefficients, marginal_pdf

PANEL_QUADRATURE = "panel-quadrature"
RECTANGLE_CDF = "rectangle-cdf"

DEFAULT_TAIL_EPSILON = 1e-12
DEFAULT_CELL_BUDGET = 400_000_000
# Gauss-Legendre order per panel; panels subdivide each window.
_PANEL_ORDER = 16
# Extra panel refinement so the conditional slab edge (width sigma_c/|rho|)
# is resolved, not just the marginal Gaussian.  Without it the fixed rule
# min(Delta, sigma_a)/4 under-resolves cells at large r and phi_sum near 0.
_SLAB_RESOLUTION = 8.0
_DEFAULT_MAX_PANELS = 100_000


class GridTooLarge(Exception):
    """Requested binning needs more cells than the configured budget."""


class QuadratureBudgetExceeded(Exception):
    """Panel subdivision of a window exceeds the configured panel cap."""


@dataclass(frozen=True)
class CoarseGrid:
    """Symmetric bin grid: centres l*delta for l in -l_max..l_max."""

    delta: float
    l_max: int
    tail_epsilon: float

    @property
    def n_bins(self) -> int:
        return 2 * self.l_max + 1

    @property
    def half_extent(self) -> float:
        """Outer edge of the covered region, (l_max + 1/2) delta."""
        return (self.l_max + 0.5) * self.delta

    def centers(self) -> np.ndarray:
        return self.delta * np.arange(-self.l_max, self.l_max + 1, dtype=float)

    def edges(self) -> np.ndarray:
        """The n_bins + 1 window boundaries in increasing order."""
        return self.delta * (np.arange(-self.l_max, self.l_max + 2, dtype=float) - 0.5)


@dataclass(frozen=True)
class BinnedDistribution1D:
    probs: np.ndarray
    captured_mass: float
    grid: CoarseGrid
    r: float


@dataclass(frozen=True)
class BinnedDistribution2D:
    """Cell probabilities indexed [l + l_max, m + l_max] (a-window, b-window)."""

    probs: np.ndarray
    captured_mass: float
    grid: CoarseGrid
    r: float
    phi_sum: float
    method: str

    def marginal_b(self) -> np.ndarray:
        return self.probs.sum(axis=0)

    def marginal_a(self) -> np.ndarray:
        return self.probs.sum(axis=1)

    def to_csv(self, fh) -> None:
        """Write `l,m,p` rows (headers included) for debugging dumps."""
        fh.write("l,m,p\n")
        lmax = self.grid.l_max
        for i in range(self.probs.shape[0]):
            for j in range(self.probs.shape[1]):
                fh.write(f"{i - lmax},{j - lmax},{self.probs[i, j]:.17g}\n")


def make_grid(state: TmsvParams, delta: float,
              tail_epsilon: float = DEFAULT_TAIL_EPSILON,
              cell_budget: int = DEFAULT_CELL_BUDGET) -> CoarseGrid:
    """Smallest symmetric grid whose per-record tail mass is below tail_epsilon.

    The coverage multiple k solves erfc(k/sqrt(2)) < tail_epsilon / 2, i.e.
    each record keeps less than tail_epsilon/2 of two-sided mass outside
    +-k sigma, and l_max is the smallest integer with
    (l_max + 1/2) delta >= k sigma.
    """
    if not (delta > 0.0 and math.isfinite(delta)):
        raise ValueError(f"bin width must be positive and finite, got {delta}")
    if not (0.0 < tail_epsilon <= 1e-6):
        raise ValueError(f"tail_epsilon must be in (0, 1e-6], got {tail_epsilon}")
    k = math.sqrt(2.0) * float(special.erfcinv(0.5 * tail_epsilon))
    sigma_max = state.marginal_sigma
    l_max = max(0, math.ceil(k * sigma_max / delta - 0.5))
    n = 2 * l_max + 1
    if n * n > cell_budget:
        raise GridTooLarge(
            f"grid needs {n}x{n} = {n * n} cells, budget is {cell_budget} "
            f"(delta={delta}, r={state.r}, tail_epsilon={tail_epsilon})"
        )
    return CoarseGrid(delta=delta, l_max=l_max, tail_epsilon=tail_epsilon)


def _phi_diff(z_lo: np.ndarray, z_hi: np.ndarray) -> np.ndarray:
    """Phi(z_hi) - Phi(z_lo) for z_hi >= z_lo, stable in both tails."""
    lower = special.ndtr(z_hi) - special.ndtr(z_lo)
    upper = special.ndtr(-z_lo) - special.ndtr(-z_hi)
    return np.maximum(np.where(z_lo + z_hi > 0.0, upper, lower), 0.0)


def bin_prob_1d(state: TmsvParams, grid: CoarseGrid, m) -> np.ndarray | float:
    """Exact probability of marginal window(s) m via the Gaussian CDF."""
    m_arr = np.asarray(m)
    if np.any(np.abs(m_arr) > grid.l_max):
        raise ValueError(f"window index outside grid of half-extent {grid.l_max}")
    sigma = state.marginal_sigma
    lo = (m_arr * grid.delta - 0.5 * grid.delta) / sigma
    hi = (m_arr * grid.delta + 0.5 * grid.delta) / sigma
    out = _phi_diff(lo, hi)
    return float(out) if np.isscalar(m) else out


def binned_marginal(state: TmsvParams, grid: CoarseGrid) -> BinnedDistribution1D:
    probs = bin_prob_1d(state, grid, np.arange(-grid.l_max, grid.l_max + 1))
    order = np.argsort(np.abs(np.arange(-grid.l_max, grid.l_max + 1)), kind="stable")
    return BinnedDistribution1D(
        probs=probs, captured_mass=float(np.sum(probs[order])), grid=grid, r=state.r,
    )


def _panel_offsets(delta: float, coeffs: JointGaussianCoefficients,
                   max_panels: int = _DEFAULT_MAX_PANELS) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes/weights tiling one window centred at 0."""
    sigma_a = coeffs.sigma_marginal
    scale = min(delta, sigma_a)
    rho = abs(coeffs.correlation)
    if rho > 0.0:
        scale = min(scale, _SLAB_RESOLUTION * coeffs.sigma_conditional / rho)
    n_panels = int(math.ceil(4.0 * delta / scale))
    if n_panels > max_panels:
        raise QuadratureBudgetExceeded(
            f"window needs {n_panels} panels, cap is {max_panels} "
            f"(delta={delta}, r={coeffs.r}, phi_sum={coeffs.phi_sum})"
        )
    x, wts = np.polynomial.legendre.leggauss(_PANEL_ORDER)
    pw = delta / n_panels
    starts = -0.5 * delta + pw * np.arange(n_panels)
    nodes = (starts[:, None] + 0.5 * pw * (x[None, :] + 1.0)).ravel()
    weights = np.tile(0.5 * pw * wts, n_panels)
    return nodes, weights


def _panel_row(state: TmsvParams, coeffs: JointGaussianCoefficients, edges: np.ndarray,
               a_nodes: np.ndarray, a_weights: np.ndarray) -> np.ndarray:
    """Cell probabilities of one a-window against every b-window."""
    f = a_weights * marginal_pdf(state, a_nodes)
    mu = coeffs.correlation * a_nodes
    z = (edges[None, :] - mu[:, None]) / coeffs.sigma_conditional
    slabs = _phi_diff(z[:, :-1], z[:, 1:])
    return f @ slabs


def _ordered_mass(probs: np.ndarray, l_max: int) -> float:
    """Total mass summed in a fixed order: increasing |l|, then |m|, then signs."""
    idx = np.arange(-l_max, l_max + 1)
    labs = np.abs(idx)
    keys = (
        np.broadcast_to(idx[None, :], probs.shape).ravel(),
        np.broadcast_to(idx[:, None], probs.shape).ravel(),
        np.broadcast_to(labs[None, :], probs.shape).ravel(),
        np.broadcast_to(labs[:, None], probs.shape).ravel(),
    )
    order = np.lexsort(keys)
    return float(np.sum(probs.ravel()[order]))


def binned_joint(state: TmsvParams, phi_sum: float, delta: float,
                 tail_epsilon: float = DEFAULT_TAIL_EPSILON,
                 method: str = PANEL_QUADRATURE,
                 cell_budget: int = DEFAULT_CELL_BUDGET,
                 max_panels: int = _DEFAULT_MAX_PANELS) -> BinnedDistribution2D:
    """Full matrix of 2D window probabilities for the joint homodyne law."""
    grid = make_grid(state, delta, tail_epsilon, cell_budget)
    coeffs = coefficients(state, PhaseSettings(0.0, phi_sum))
    edges = grid.edges()
    if method == PANEL_QUADRATURE:
        nodes, weights = _panel_offsets(delta, coeffs, max_panels)
        rows = [
            _panel_row(state, coeffs, edges, l * delta + nodes, weights)
            for l in range(-grid.l_max, grid.l_max + 1)
        ]
        probs = np.vstack(rows)
    elif method == RECTANGLE_CDF:
        probs = np.empty((grid.n_bins, grid.n_bins))
        for i, l in enumerate(range(-grid.l_max, grid.l_max + 1)):
            for j, m in enumerate(range(-grid.l_max, grid.l_max + 1)):
                probs[i, j] = bin_prob_2d(coeffs, grid, l, m, method=RECTANGLE_CDF)
    else:
        raise ValueError(f"unknown method {method!r}")
    return BinnedDistribution2D(
        probs=probs, captured_mass=_ordered_mass(probs, grid.l_max),
        grid=grid, r=state.r, phi_sum=phi_sum, method=method,
    )


def bin_prob_2d(coeffs: JointGaussianCoefficients, grid: CoarseGrid, l: int, m: int,
                method: str = PANEL_QUADRATURE,
                max_panels: int = _DEFAULT_MAX_PANELS) -> float:
    """Probability that record a falls in window l and record b in window m."""
    if abs(l) > grid.l_max or abs(m) > grid.l_max:
        raise ValueError(f"cell ({l}, {m}) outside grid of half-extent {grid.l_max}")
    delta = grid.delta
    if method == PANEL_QUADRATURE:
        state = TmsvParams(coeffs.r)
        nodes, weights = _panel_offsets(delta, coeffs, max_panels)
        edges = np.array([m * delta - 0.5 * delta, m * delta + 0.5 * delta])
        row = _panel_row(state, coeffs, edges, l * delta + nodes, weights)
        return float(row[0])
    if method == RECTANGLE_CDF:
        sigma = coeffs.sigma_marginal
        x_lo, x_hi = (l * delta - 0.5 * delta) / sigma, (l * delta + 0.5 * delta) / sigma
        y_lo, y_hi = (m * delta - 0.5 * delta) / sigma, (m * delta + 0.5 * delta) / sigma
        return bvn_rectangle(x_lo, x_hi, y_lo, y_hi, coeffs.correlation)
    raise ValueError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# Standard bivariate normal probabilities (Gauss-Legendre on the
# correlation-integral representation, with the high-correlation reduction
# of Drezner & Wesolowsky as refined by Genz).

_GL6 = np.polynomial.legendre.leggauss(6)
_GL12 = np.polynomial.legendre.leggauss(12)
_GL20 = np.polynomial.legendre.leggauss(20)


def _gl_rule(rho: float) -> tuple[np.ndarray, np.ndarray]:
    a = abs(rho)
    if a < 0.3:
        return _GL6
    if a < 0.75:
        return _GL12
    return _GL20


def bvn_upper(h: float, k: float, rho: float) -> float:
    """P(X > h, Y > k) for standard bivariate normal with correlation rho."""
    if not -1.0 <= rho <= 1.0:
        raise ValueError(f"correlation must lie in [-1, 1], got {rho}")
    x, wts = _gl_rule(rho)
    hk = h * k
    bvn = 0.0
    if abs(rho) < 0.925:
        if rho != 0.0:
            hs = 0.5 * (h * h + k * k)
            asr = math.asin(rho)
            sn = np.sin(0.5 * asr * (x + 1.0))
            bvn = float(wts @ np.exp((sn * hk - hs) / (1.0 - sn * sn)))
            bvn *= asr / (4.0 * math.pi)
        return bvn + float(special.ndtr(-h) * special.ndtr(-k))
    # |rho| >= 0.925: integrate the residual after removing the rho -> +-1 limit.
    if rho < 0.0:
        k = -k
        hk = -hk
    if abs(rho) < 1.0:
        a_s = (1.0 - rho) * (1.0 + rho)
        a = math.sqrt(a_s)
        bs = (h - k) ** 2
        c = (4.0 - hk) / 8.0
        d = (12.0 - hk) / 16.0
        asr = -0.5 * (bs / a_s + hk)
        if asr > -100.0:
            bvn = a * math.exp(asr) * (1.0 - c * (bs - a_s) * (1.0 - d * bs / 5.0) / 3.0
                                       + c * d * a_s * a_s / 5.0)
        if -hk < 100.0:
            b = math.sqrt(bs)
            bvn -= math.exp(-0.5 * hk) * math.sqrt(2.0 * math.pi) * float(special.ndtr(-b / a)) \
                * b * (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0)
        half = 0.5 * a
        xs = (half * (x + 1.0)) ** 2
        rs = np.sqrt(1.0 - xs)
        asr_v = -0.5 * (bs / xs + hk)
        keep = asr_v > -100.0
        if np.any(keep):
            sp = 1.0 + c * xs * (1.0 + d * xs)
            ep = np.exp(-0.5 * hk * (1.0 - rs) / (1.0 + rs)) / rs
            bvn += half * float(wts[keep] @ (np.exp(asr_v[keep]) * (ep - sp)[keep]))
        bvn = -bvn / (2.0 * math.pi)
    if rho > 0.0:
        return bvn + float(special.ndtr(-max(h, k)))
    bvn = -bvn
    if k > h:
        bvn += float(special.ndtr(k) - special.ndtr(h))
    return bvn


def bvn_rectangle(x_lo: float, x_hi: float, y_lo: float, y_hi: float, rho: float) -> float:
    """P(x_lo < X < x_hi, y_lo < Y < y_hi) for the standard bivariate normal."""
    p = (bvn_upper(x_lo, y_lo, rho) - bvn_upper(x_hi, y_lo, rho)
         - bvn_upper(x_lo, y_hi, rho) + bvn_upper(x_hi, y_hi, rho))
    return max(p, 0.0)
