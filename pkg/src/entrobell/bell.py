"""Entropic Bell functional for coarse-grained homodyne measurements.

Alice measures quadratures at phases theta or theta', Bob at phi or phi'.
For the one-parameter family

    theta' = theta - 2 delta / 3,   phi = -theta + delta,   phi' = -theta + delta / 3,

the chained entropic inequality

    0 <= S(A|B') + S(B'|A') + S(A'|B) - S(A|B)

reduces, because each term depends only on the phase sum of its setting
pair, to  d_qm = 3 S_qm(delta/3) - S_qm(delta).  A negative value
certifies that no noncontextual joint assignment reproduces the binned
statistics.  This module evaluates the functional, scans it over parameter
grids, and minimises it over (r, delta).
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from ._version import __version__
from .coarse_grain import DEFAULT_TAIL_EPSILON, PANEL_QUADRATURE, binned_joint, make_grid
from .entropy import conditional_entropy, s_qm
from .gaussian_core import TmsvParams

SCAN_CSV_HEADER = "r,delta,Delta,d_qm"


@dataclass(frozen=True)
class AngleGeometry:
    """Measurement angles of the chained inequality, parametrised by delta.

    theta is the free base angle; the functional is invariant under it and
    it is exposed only so that invariance can be tested.
    """

    delta: float
    theta: float = 0.0

    @property
    def theta_prime(self) -> float:
        return self.theta - 2.0 * self.delta / 3.0

    @property
    def phi(self) -> float:
        return -self.theta + self.delta

    @property
    def phi_prime(self) -> float:
        return -self.theta + self.delta / 3.0

    def pair_sums(self) -> tuple[float, float, float, float]:
        """Phase sums of the pairs (A,B'), (A',B'), (A',B), (A,B)."""
        return (
            self.theta + self.phi_prime,
            self.theta_prime + self.phi_prime,
            self.theta_prime + self.phi,
            self.theta + self.phi,
        )


@dataclass(frozen=True)
class BellEvaluation:
    """The four conditional-entropy terms and their chained combination."""

    r: float
    delta_bin: float
    tail_epsilon: float
    theta: float
    theta_prime: float
    phi: float
    phi_prime: float
    term_a_given_bprime: float
    term_bprime_given_aprime: float
    term_aprime_given_b: float
    term_a_given_b: float
    d_qm: float
    grid_l_max: int
    delta: float | None = None

    def to_dict(self) -> dict:
        return {
            "version": __version__,
            "r": self.r,
            "delta": self.delta,
            "Delta": self.delta_bin,
            "theta": self.theta,
            "theta_prime": self.theta_prime,
            "phi": self.phi,
            "phi_prime": self.phi_prime,
            "terms": {
                "S(A|B')": self.term_a_given_bprime,
                "S(B'|A')": self.term_bprime_given_aprime,
                "S(A'|B)": self.term_aprime_given_b,
                "S(A|B)": self.term_a_given_b,
            },
            "d_qm": self.d_qm,
            "tail_epsilon": self.tail_epsilon,
            "grid_l_max": self.grid_l_max,
            "method": PANEL_QUADRATURE,
        }


def evaluate_general(state: TmsvParams, theta: float, theta_prime: float,
                     phi: float, phi_prime: float, delta_bin: float,
                     tail_epsilon: float = DEFAULT_TAIL_EPSILON) -> BellEvaluation:
    """Chained combination for four arbitrary angles.

    Builds the four setting-pair joints independently; no term reuse, so the
    reduction identity of the one-parameter geometry can be verified against
    this rather than being baked in.
    """
    ab_prime = binned_joint(state, theta + phi_prime, delta_bin, tail_epsilon)
    aprime_bprime = binned_joint(state, theta_prime + phi_prime, delta_bin, tail_epsilon)
    aprime_b = binned_joint(state, theta_prime + phi, delta_bin, tail_epsilon)
    ab = binned_joint(state, theta + phi, delta_bin, tail_epsilon)

    t1 = conditional_entropy(ab_prime).s_conditional
    t2 = conditional_entropy(aprime_bprime).s_b_given_a
    t3 = conditional_entropy(aprime_b).s_conditional
    t4 = conditional_entropy(ab).s_conditional
    return BellEvaluation(
        r=state.r, delta_bin=delta_bin, tail_epsilon=tail_epsilon,
        theta=theta, theta_prime=theta_prime, phi=phi, phi_prime=phi_prime,
        term_a_given_bprime=t1, term_bprime_given_aprime=t2,
        term_aprime_given_b=t3, term_a_given_b=t4,
        d_qm=t1 + t2 + t3 - t4,
        grid_l_max=ab.grid.l_max,
    )


def evaluate(state: TmsvParams, geometry: AngleGeometry, delta_bin: float,
             tail_epsilon: float = DEFAULT_TAIL_EPSILON) -> BellEvaluation:
    """Chained combination for the one-parameter angle family."""
    ev = evaluate_general(
        state, geometry.theta, geometry.theta_prime, geometry.phi,
        geometry.phi_prime, delta_bin, tail_epsilon,
    )
    return BellEvaluation(**{**ev.__dict__, "delta": geometry.delta})


def evaluate_mutual_info(state: TmsvParams, geometry: AngleGeometry, delta_bin: float,
                         tail_epsilon: float = DEFAULT_TAIL_EPSILON) -> float:
    """Violation margin of the mutual-information form of the inequality.

    Returns LHS - RHS of
        I(A;B') + I(A';B') + I(A';B) - I(A;B) <= S(A') + S(B'),
    so positive values signal violation.  Equals -d_qm up to the numerical
    agreement of the (phase-independent) marginal entropies across settings.
    """
    ab_prime = conditional_entropy(binned_joint(state, geometry.theta + geometry.phi_prime,
                                                delta_bin, tail_epsilon))
    apbp = conditional_entropy(binned_joint(state, geometry.theta_prime + geometry.phi_prime,
                                            delta_bin, tail_epsilon))
    aprime_b = conditional_entropy(binned_joint(state, geometry.theta_prime + geometry.phi,
                                                delta_bin, tail_epsilon))
    ab = conditional_entropy(binned_joint(state, geometry.theta + geometry.phi,
                                          delta_bin, tail_epsilon))
    lhs = (ab_prime.mutual_information + apbp.mutual_information
           + aprime_b.mutual_information - ab.mutual_information)
    rhs = apbp.s_marginal_a + ab_prime.s_marginal_b
    return lhs - rhs


def d_qm_value(state: TmsvParams, delta: float, delta_bin: float,
               tail_epsilon: float = DEFAULT_TAIL_EPSILON) -> float:
    """d_qm = 3 S_qm(delta/3) - S_qm(delta), the reduced two-entropy form."""
    return 3.0 * s_qm(state, delta / 3.0, delta_bin, tail_epsilon) \
        - s_qm(state, delta, delta_bin, tail_epsilon)


def _map_jobs(fn, jobs, workers):
    if workers is not None and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, jobs))
    return [fn(job) for job in jobs]


@dataclass(frozen=True)
class ScanResult:
    """d_qm on an (r, delta) grid at fixed bin width."""

    r_values: np.ndarray
    delta_values: np.ndarray
    delta_bin: float
    d_qm: np.ndarray
    tail_epsilon: float
    grid_l_range: tuple[int, int]

    def min_entry(self) -> tuple[float, float, float]:
        """(d_min, r, delta) of the most negative grid cell."""
        i, j = np.unravel_index(np.argmin(self.d_qm), self.d_qm.shape)
        return float(self.d_qm[i, j]), float(self.r_values[i]), float(self.delta_values[j])

    def to_csv(self, fh) -> None:
        fh.write(SCAN_CSV_HEADER + "\n")
        for i, r in enumerate(self.r_values):
            for j, d in enumerate(self.delta_values):
                fh.write(f"{r:.12g},{d:.12g},{self.delta_bin:.12g},{self.d_qm[i, j]:.12g}\n")

    def to_dict(self) -> dict:
        return {
            "version": __version__,
            "kind": "scan",
            "method": PANEL_QUADRATURE,
            "delta_bin": self.delta_bin,
            "tail_epsilon": self.tail_epsilon,
            "grid_l_range": list(self.grid_l_range),
            "r_values": self.r_values.tolist(),
            "delta_values": self.delta_values.tolist(),
            "d_qm": self.d_qm.tolist(),
        }


def scan(state_values, delta_values, delta_bin: float,
         tail_epsilon: float = DEFAULT_TAIL_EPSILON, workers: int | None = None) -> ScanResult:
    """Dense d_qm matrix over squeezing values (rows) and angle offsets (columns).

    Cells are independent evaluations; the assembled matrix is identical for
    any worker count.
    """
    r_values = np.asarray(state_values, dtype=float)
    d_values = np.asarray(delta_values, dtype=float)
    jobs = [(r, d) for r in r_values for d in d_values]

    def one(job):
        r, d = job
        return d_qm_value(TmsvParams(r), d, delta_bin, tail_epsilon)

    flat = _map_jobs(one, jobs, workers)
    mat = np.array(flat, dtype=float).reshape(len(r_values), len(d_values))
    l_lo = make_grid(TmsvParams(float(r_values.min())), delta_bin, tail_epsilon).l_max
    l_hi = make_grid(TmsvParams(float(r_values.max())), delta_bin, tail_epsilon).l_max
    return ScanResult(
        r_values=r_values, delta_values=d_values, delta_bin=delta_bin,
        d_qm=mat, tail_epsilon=tail_epsilon, grid_l_range=(l_lo, l_hi),
    )


@dataclass(frozen=True)
class ZeroOffsetScanResult:
    """d_qm at delta = 0 (equal to 2 S_qm(0), hence never negative) over (r, Delta)."""

    r_values: np.ndarray
    delta_bin_values: np.ndarray
    d_qm: np.ndarray
    tail_epsilon: float

    def to_csv(self, fh) -> None:
        fh.write(SCAN_CSV_HEADER + "\n")
        for i, r in enumerate(self.r_values):
            for j, db in enumerate(self.delta_bin_values):
                fh.write(f"{r:.12g},0,{db:.12g},{self.d_qm[i, j]:.12g}\n")

    def to_dict(self) -> dict:
        return {
            "version": __version__,
            "kind": "zero-offset-scan",
            "method": PANEL_QUADRATURE,
            "tail_epsilon": self.tail_epsilon,
            "r_values": self.r_values.tolist(),
            "delta_bin_values": self.delta_bin_values.tolist(),
            "d_qm": self.d_qm.tolist(),
        }


def scan_zero_delta(state_values, delta_bin_values,
                    tail_epsilon: float = DEFAULT_TAIL_EPSILON,
                    workers: int | None = None) -> ZeroOffsetScanResult:
    """Map of the delta = 0 boundary value 2 S_qm(0) over (r, Delta).

    At delta = 0 all four setting pairs coincide, so the chained combination
    degenerates to 2 S_qm(0) >= 0: the inequality cannot be violated on this
    axis, whatever the bin width.  The map documents how far from zero the
    boundary value sits.
    """
    r_values = np.asarray(state_values, dtype=float)
    db_values = np.asarray(delta_bin_values, dtype=float)
    jobs = [(r, db) for r in r_values for db in db_values]

    def one(job):
        r, db = job
        return 2.0 * s_qm(TmsvParams(r), 0.0, db, tail_epsilon)

    flat = _map_jobs(one, jobs, workers)
    mat = np.array(flat, dtype=float).reshape(len(r_values), len(db_values))
    return ZeroOffsetScanResult(
        r_values=r_values, delta_bin_values=db_values, d_qm=mat,
        tail_epsilon=tail_epsilon,
    )


@dataclass(frozen=True)
class MinimizeOptions:
    """Multi-start simplex search configuration.

    The coarse stage samples a regular (r, delta) grid plus extra
    log-spaced delta columns accumulating at the lower delta bound, because
    the landscape develops very sharp minima at small offsets for large r.
    """

    r_points: int = 48
    delta_points: int = 48
    log_delta_points: int = 16
    refine_starts: int = 8
    xatol: float = 1e-4
    fatol: float = 1e-5
    max_refine_iter: int = 400
    workers: int | None = None


@dataclass(frozen=True)
class MinimizationResult:
    r_star: float
    delta_star: float
    d_min: float
    delta_bin: float
    converged: bool
    n_evaluations: int
    coarse_d_min: float
    r_bounds: tuple[float, float]
    delta_bounds: tuple[float, float]
    tail_epsilon: float

    def to_dict(self) -> dict:
        return {
            "version": __version__,
            "kind": "minimize",
            "method": PANEL_QUADRATURE,
            "r_star": self.r_star,
            "delta_star": self.delta_star,
            "delta_star_over_pi": self.delta_star / math.pi,
            "d_min": self.d_min,
            "Delta": self.delta_bin,
            "converged": self.converged,
            "n_evaluations": self.n_evaluations,
            "coarse_d_min": self.coarse_d_min,
            "r_bounds": list(self.r_bounds),
            "delta_bounds": list(self.delta_bounds),
            "tail_epsilon": self.tail_epsilon,
        }


def _coarse_deltas(lo: float, hi: float, opts: MinimizeOptions) -> np.ndarray:
    linear = np.linspace(lo, hi, opts.delta_points)
    if opts.log_delta_points > 0 and hi > lo:
        log_part = lo + (hi - lo) * np.geomspace(1e-5, 0.2, opts.log_delta_points)
        return np.unique(np.concatenate([linear, log_part]))
    return linear


def minimize(r_bounds: tuple[float, float], delta_bounds: tuple[float, float],
             delta_bin: float, tail_epsilon: float = DEFAULT_TAIL_EPSILON,
             options: MinimizeOptions = MinimizeOptions()) -> MinimizationResult:
    """Global minimum of d_qm over (r, delta) within bounds.

    Coarse grid enumeration followed by Nelder-Mead refinement from the
    best cells.  Fully deterministic; if no simplex run converges within
    budget the best point seen is still returned, flagged converged=False.
    """
    r_lo, r_hi = map(float, r_bounds)
    d_lo, d_hi = map(float, delta_bounds)
    if not (r_hi >= r_lo >= 0.0) or not (d_hi >= d_lo):
        raise ValueError("bounds must be ordered and squeezing non-negative")

    r_grid = np.linspace(r_lo, r_hi, options.r_points)
    d_grid = _coarse_deltas(d_lo, d_hi, options)
    jobs = [(r, d) for r in r_grid for d in d_grid]

    def one(job):
        r, d = job
        return d_qm_value(TmsvParams(r), d, delta_bin, tail_epsilon)

    flat = np.array(_map_jobs(one, jobs, options.workers))
    n_evals = len(jobs)
    coarse_d_min = float(flat.min())

    best = {"x": None, "f": math.inf}

    def objective(x) -> float:
        r = min(max(float(x[0]), r_lo), r_hi)
        d = min(max(float(x[1]), d_lo), d_hi)
        val = d_qm_value(TmsvParams(r), d, delta_bin, tail_epsilon)
        if val < best["f"]:
            best["x"], best["f"] = (r, d), val
        return val

    for idx, (r0, d0) in enumerate(jobs):
        if flat[idx] < best["f"]:
            best["x"], best["f"] = (r0, d0), float(flat[idx])

    starts = np.argsort(flat, kind="stable")[: options.refine_starts]
    converged = False
    for s in starts:
        x0 = np.array(jobs[int(s)])
        res = optimize.minimize(
            objective, x0, method="Nelder-Mead",
            bounds=[(r_lo, r_hi), (d_lo, d_hi)],
            options={
                "xatol": options.xatol, "fatol": options.fatol,
                "maxiter": options.max_refine_iter, "disp": False,
            },
        )
        n_evals += res.nfev
        converged = converged or bool(res.success)

    r_star, delta_star = best["x"]
    return MinimizationResult(
        r_star=float(r_star), delta_star=float(delta_star), d_min=float(best["f"]),
        delta_bin=delta_bin, converged=converged, n_evaluations=n_evals,
        coarse_d_min=coarse_d_min, r_bounds=(r_lo, r_hi), delta_bounds=(d_lo, d_hi),
        tail_epsilon=tail_epsilon,
    )


def write_json(obj, fh) -> None:
    json.dump(obj.to_dict() if hasattr(obj, "to_dict") else obj, fh, indent=2, sort_keys=True)
    fh.write("\n")
