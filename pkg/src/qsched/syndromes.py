"""Error-likelihood analytics for a 3-qubit phase-flip repetition code.

A logical qubit held in noisy memory undergoes periodic syndrome
measurement rounds.  Each round is classified as "+1" (trivial syndrome,
no physical qubit flagged) or "-1" (one of the three nontrivial
syndromes, which are statistically interchangeable here).  Given the
per-round physical flip probability, these functions compute the
conditional probability that the corrected logical state is unflipped
after an arbitrary history of rounds, which is also the fidelity of the
teleported |+> state.

Everything in this module is a pure function of its arguments; the only
randomness enters through an explicitly passed generator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

__all__ = [
    "Outcome",
    "NoiseParams",
    "SyndromeHistory",
    "CondErrorProbs",
    "phase_flip_prob",
    "cond_error_given_plus",
    "cond_error_given_minus",
    "plus_outcome_prob",
    "success_prob",
    "success_prob_counts",
    "teleport_fidelity",
    "sample_syndrome_round",
    "sample_round_with_flip",
]


class Outcome(Enum):
    """Classified result of one syndrome measurement round."""

    PLUS = "+1"
    MINUS = "-1"


@dataclass(frozen=True)
class NoiseParams:
    """Dephasing noise model: decay rate (Hz) and syndrome round period (s).

    ``gamma`` is the inverse of the memory's T2 time.  The per-round
    physical flip probability is (1 - exp(-gamma * tau)) / 2, which lies
    in (0, 0.5) for any positive gamma and tau.
    """

    gamma: float
    tau: float

    def __post_init__(self) -> None:
        if not self.gamma > 0:
            raise ValueError(f"gamma must be > 0, got {self.gamma}")
        if not self.tau > 0:
            raise ValueError(f"tau must be > 0, got {self.tau}")

    @property
    def flip_prob_per_round(self) -> float:
        return phase_flip_prob(self.gamma, self.tau)


@dataclass(slots=True)
class SyndromeHistory:
    """Counts of "+1" and "-1" rounds accumulated by a stored qubit."""

    n_plus: int = 0
    n_minus: int = 0

    def __post_init__(self) -> None:
        if self.n_plus < 0 or self.n_minus < 0:
            raise ValueError(
                f"syndrome counts must be non-negative, got ({self.n_plus}, {self.n_minus})"
            )

    @property
    def rounds(self) -> int:
        return self.n_plus + self.n_minus

    def record(self, outcome: Outcome) -> None:
        if outcome is Outcome.PLUS:
            self.n_plus += 1
        else:
            self.n_minus += 1

    def copy(self) -> "SyndromeHistory":
        return SyndromeHistory(self.n_plus, self.n_minus)


@dataclass(frozen=True)
class CondErrorProbs:
    """Per-round logical-flip probabilities conditioned on the round outcome.

    ``factor_plus``/``factor_minus`` are the corresponding 1 - 2*prob
    terms; products of these factors over a history determine the
    parity distribution of logical flips.  For flip probability
    p in (0, 0.5): 0 < factor_minus < factor_plus < 1.
    """

    p_given_plus: float
    p_given_minus: float
    factor_plus: float
    factor_minus: float

    @classmethod
    def from_flip_prob(cls, p: float) -> "CondErrorProbs":
        p_plus = cond_error_given_plus(p)
        p_minus = cond_error_given_minus(p)
        return cls(
            p_given_plus=p_plus,
            p_given_minus=p_minus,
            factor_plus=1.0 - 2.0 * p_plus,
            factor_minus=1.0 - 2.0 * p_minus,
        )


def _check_flip_prob(p: float) -> None:
    # The conditional-error algebra is only meaningful below the code's
    # breakeven point; fail loudly rather than clamp.
    if not 0.0 <= p < 0.5:
        raise ValueError(f"per-round flip probability must be in [0, 0.5), got {p}")


def phase_flip_prob(gamma: float, t: float) -> float:
    """Probability of a phase flip after time ``t`` at decay rate ``gamma``.

    Monotone increasing in ``t``, from 0 toward the fully-dephased limit 0.5.
    """
    if not gamma > 0:
        raise ValueError(f"gamma must be > 0, got {gamma}")
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    return (1.0 - math.exp(-gamma * t)) / 2.0


def cond_error_given_plus(p: float) -> float:
    """Logical-flip probability given a trivial ("+1") syndrome round.

    A "+1" round hides an error only when all three physical qubits
    flipped: p^3 / ((1-p)^3 + p^3).
    """
    _check_flip_prob(p)
    q = 1.0 - p
    return p**3 / (q**3 + p**3)


def cond_error_given_minus(p: float) -> float:
    """Logical-flip probability given a nontrivial ("-1") syndrome round.

    Two flips masquerading as one leave probability exactly ``p``,
    identical across the three nontrivial syndromes.
    """
    _check_flip_prob(p)
    return p


def plus_outcome_prob(p: float) -> float:
    """Probability that a round yields the trivial syndrome: (1-p)^3 + p^3."""
    _check_flip_prob(p)
    q = 1.0 - p
    return q**3 + p**3


def success_prob_counts(n_plus: int, n_minus: int, per_round: CondErrorProbs) -> float:
    """No-logical-error probability after ``n_plus`` "+1" and ``n_minus`` "-1" rounds.

    Logical flips cancel in pairs, so this is the probability that the
    flip count across all rounds is even:
    (1 + factor_plus^n_plus * factor_minus^n_minus) / 2.
    """
    if n_plus < 0 or n_minus < 0:
        raise ValueError(f"syndrome counts must be non-negative, got ({n_plus}, {n_minus})")
    return (1.0 + per_round.factor_plus**n_plus * per_round.factor_minus**n_minus) / 2.0


def success_prob(h: SyndromeHistory, per_round: CondErrorProbs) -> float:
    """No-logical-error probability conditioned on a syndrome history."""
    return success_prob_counts(h.n_plus, h.n_minus, per_round)


def teleport_fidelity(h: SyndromeHistory, per_round: CondErrorProbs) -> float:
    """Fidelity of the teleported |+> state given the qubit's history.

    The storage-plus-correction process acts as a dephasing channel on
    |+>, so the fidelity equals the conditional no-error probability.
    """
    return success_prob(h, per_round)


def sample_round_with_flip(p: float, rng: np.random.Generator) -> tuple[Outcome, bool]:
    """Draw one syndrome round jointly with its logical-flip indicator.

    Consumes exactly one uniform from ``rng``.  Marginals: PLUS with
    probability (1-p)^3 + p^3; the flip indicator is conditioned on the
    outcome via the exact per-outcome error probabilities, so physical
    qubits never need to be tracked individually.
    """
    _check_flip_prob(p)
    q_plus = plus_outcome_prob(p)
    u = rng.random()
    if u < q_plus:
        return Outcome.PLUS, u < q_plus * cond_error_given_plus(p)
    return Outcome.MINUS, (u - q_plus) < (1.0 - q_plus) * p


def sample_syndrome_round(p: float, rng: np.random.Generator) -> Outcome:
    """Draw one classified syndrome outcome; consumes one uniform from ``rng``."""
    return sample_round_with_flip(p, rng)[0]
