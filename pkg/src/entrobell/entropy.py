"""Shannon entropies of binned outcome distributions, in nats.

All conditional quantities are formed from one joint matrix and the
marginals obtained by summing that same matrix.  Mixing an analytically
binned marginal with a numerically binned joint would break the guarantee
S(A|B) = S(A,B) - S(B) >= 0 at roundoff level, so it is never done here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coarse_grain import DEFAULT_TAIL_EPSILON, BinnedDistribution2D, binned_joint
from .gaussian_core import TmsvParams

# Bins carrying less than this are treated as empty: p ln p underflows
# anyway and denormals would only add noise.
PROBABILITY_FLOOR = 1e-300

_SUM_LO = 1.0 - 1e-6
_SUM_HI = 1.0 + 1e-10


class InvalidDistribution(Exception):
    """Input is not usable as a probability distribution."""


@dataclass(frozen=True)
class EntropyTerms:
    """Entropies of one binned joint distribution and its own marginals."""

    s_joint: float
    s_marginal_a: float
    s_marginal_b: float

    @property
    def s_conditional(self) -> float:
        """S(A|B): the joint entropy less the entropy of the conditioner B."""
        return self.s_joint - self.s_marginal_b

    @property
    def s_b_given_a(self) -> float:
        return self.s_joint - self.s_marginal_a

    @property
    def mutual_information(self) -> float:
        return self.s_marginal_a + self.s_marginal_b - self.s_joint


def shannon(probs) -> float:
    """-sum p ln p with 0 ln 0 = 0.

    The distribution must be non-negative and sum to 1 within the captured
    mass slack [1 - 1e-6, 1 + 1e-10]; no renormalisation is applied, so a
    quadrature or normalisation bug surfaces here instead of being hidden.
    """
    p = np.asarray(probs, dtype=float).ravel()
    if p.size == 0:
        raise InvalidDistribution("empty distribution")
    if not np.all(np.isfinite(p)):
        raise InvalidDistribution("distribution contains non-finite entries")
    if np.any(p < 0.0):
        raise InvalidDistribution(f"negative probability {p.min():.3e}")
    total = float(p.sum())
    if not (_SUM_LO <= total <= _SUM_HI):
        raise InvalidDistribution(
            f"probabilities sum to {total!r}, outside [{_SUM_LO}, {_SUM_HI}]"
        )
    mask = p > PROBABILITY_FLOOR
    q = p[mask]
    return float(-np.dot(q, np.log(q)))


def conditional_entropy(dist: BinnedDistribution2D) -> EntropyTerms:
    """Joint, marginal, and conditional entropies of one binned joint matrix.

    Marginals come from summing the matrix itself; s_conditional is
    S(A|B) = S(A,B) - S(B) and cannot go negative.
    """
    return EntropyTerms(
        s_joint=shannon(dist.probs),
        s_marginal_a=shannon(dist.marginal_a()),
        s_marginal_b=shannon(dist.marginal_b()),
    )


def mutual_information(dist: BinnedDistribution2D) -> float:
    return conditional_entropy(dist).mutual_information


def s_qm(state: TmsvParams, phi_sum: float, delta_bin: float,
         tail_epsilon: float = DEFAULT_TAIL_EPSILON) -> float:
    """Conditional entropy S(A|B) of the binned joint at phase sum phi_sum.

    Even in phi_sum, and non-negative for every parameter choice; the Bell
    functional is built entirely from this quantity.
    """
    dist = binned_joint(state, phi_sum, delta_bin, tail_epsilon)
    return conditional_entropy(dist).s_conditional
