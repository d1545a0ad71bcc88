"""Independent verification of batch-scheduling optimality.

For a batch of qubits stored simultaneously, serving order only permutes
which qubit departs at which (exogenously given) service instant, and
each qubit's syndrome trajectory is fixed in advance.  That makes
exhaustive permutation enumeration a valid oracle: the claim under test
is that the greedy fewest-minuses-first assignment attains the maximum
total expected success probability over all service orders.

The algebraic engine behind the claim is an interchange inequality: for
any pair of qubits served out of freshness order, swapping them changes
the total by a quantity that factors into three strictly positive
terms.  ``interchange_gap`` evaluates both the raw difference and its
factored form so each can be checked against the other.

A subtlety governs what "fixed in advance" must mean.  The interchange
step hands the waiting interval's syndrome increments to whichever
qubit ends up waiting, i.e. it couples the compared orders through
exchangeable futures.  The static realization of that coupling lets
trajectories differ only over rounds completed before the first
service; from there on all qubits share one outcome stream.  Under this
coupling greedy selection provably attains the enumeration maximum.
With fully independent trajectories it need not: a qubit that looks
fresher now but is fated to collect more "-1"s is better served first
by a clairvoyant order, which no causal policy can match.
``random_instance`` therefore generates coupled futures by default.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .syndromes import CondErrorProbs, NoiseParams, Outcome, plus_outcome_prob

__all__ = [
    "BatchInstance",
    "InterchangeGap",
    "OptimalityReport",
    "InterchangeSweepReport",
    "total_success",
    "fqf_assignment",
    "interchange_gap",
    "random_instance",
    "verify_fqf_optimality",
    "sweep_interchange",
]


@dataclass(frozen=True)
class BatchInstance:
    """A batch stored at time 0 with fixed service times and trajectories.

    ``trajectories[i][r]`` is qubit i's outcome in round r (rounds fire
    at tau, 2*tau, ...).  ``serve_times`` are the strictly increasing
    instants at which a resource pair becomes available; the qubit
    served at time t has completed floor(t / tau) rounds.
    """

    serve_times: tuple[float, ...]
    trajectories: tuple[tuple[Outcome, ...], ...]
    noise: NoiseParams

    def __post_init__(self) -> None:
        if len(self.serve_times) != len(self.trajectories):
            raise ValueError("need exactly one trajectory per serve time")
        if not self.serve_times:
            raise ValueError("instance must contain at least one qubit")
        if self.serve_times[0] <= 0:
            raise ValueError("serve times must be positive")
        if any(b <= a for a, b in zip(self.serve_times, self.serve_times[1:])):
            raise ValueError("serve times must be strictly increasing")
        needed = self.rounds_at(self.serve_times[-1])
        for i, traj in enumerate(self.trajectories):
            if len(traj) < needed:
                raise ValueError(
                    f"trajectory {i} has {len(traj)} rounds, needs >= {needed}"
                )

    @property
    def k(self) -> int:
        return len(self.trajectories)

    def rounds_at(self, t: float) -> int:
        return math.floor(t / self.noise.tau)

    def minus_count(self, qubit: int, t: float) -> int:
        n = self.rounds_at(t)
        traj = self.trajectories[qubit]
        return sum(1 for r in range(n) if traj[r] is Outcome.MINUS)


def _success(m: int, n: int, per_round: CondErrorProbs) -> float:
    # Success probability given n rounds of which m were "-1".
    return (1.0 + per_round.factor_plus ** (n - m) * per_round.factor_minus**m) / 2.0


def total_success(instance: BatchInstance, assignment: Sequence[int]) -> float:
    """Total expected success over the batch under a service order.

    ``assignment[j]`` is the qubit served at ``serve_times[j]``; it must
    be a permutation of the qubit indices.
    """
    if sorted(assignment) != list(range(instance.k)):
        raise ValueError(f"assignment must be a permutation of 0..{instance.k - 1}")
    per_round = CondErrorProbs.from_flip_prob(instance.noise.flip_prob_per_round)
    total = 0.0
    for j, qubit in enumerate(assignment):
        t = instance.serve_times[j]
        total += _success(instance.minus_count(qubit, t), instance.rounds_at(t), per_round)
    return total


def fqf_assignment(instance: BatchInstance) -> tuple[int, ...]:
    """Greedy freshest-first order: at each serve time pick the unserved
    qubit with the fewest "-1" rounds so far, ties by smallest index.

    Attains the maximum of ``total_success`` over all assignments for
    instances with coupled futures (trajectories identical from the
    first service round on); see the module docstring for why fully
    independent trajectories admit better clairvoyant orders.
    """
    unserved = list(range(instance.k))
    order: list[int] = []
    for t in instance.serve_times:
        pick = min(unserved, key=lambda i: (instance.minus_count(i, t), i))
        unserved.remove(pick)
        order.append(pick)
    return tuple(order)


@dataclass(frozen=True)
class InterchangeGap:
    """Raw swap benefit and its factored form (they agree identically)."""

    gap: float
    factors: tuple[float, float, float]

    @property
    def factored_gap(self) -> float:
        f1, f2, f3 = self.factors
        return f1 * f2 * f3 / 2.0


def interchange_gap(
    m1: int, m2: int, m1p: int, nj: int, nl: int, p: float
) -> InterchangeGap:
    """Change in total success from serving the fresher qubit first.

    Setting: at the earlier instant (``nj`` completed rounds) one qubit
    has ``m1`` minuses and another has ``m2 > m1``; whichever waits is
    served at the later instant (``nl`` rounds), by which time the
    fresher qubit would have accumulated ``m1p`` minuses.  The returned
    gap is

        S(m1, nj) + S(m2 + m1p - m1, nl) - S(m2, nj) - S(m1p, nl)

    and its factored form is half the product of the three factors,
    each strictly positive on the admissible domain with nl > nj.
    """
    if not 0.0 < p < 0.5:
        raise ValueError(f"p must be in (0, 0.5), got {p}")
    if not 0 <= m1 < m2 <= nj:
        raise ValueError(f"need 0 <= m1 < m2 <= nj, got m1={m1}, m2={m2}, nj={nj}")
    if m1p < m1:
        raise ValueError(f"need m1p >= m1, got m1p={m1p}, m1={m1}")
    if nl < nj:
        raise ValueError(f"need nl >= nj, got nl={nl}, nj={nj}")
    if m1p - m1 > nl - nj:
        raise ValueError(
            f"extra minuses cannot exceed extra rounds: m1p-m1={m1p - m1}, nl-nj={nl - nj}"
        )
    per_round = CondErrorProbs.from_flip_prob(p)
    f_plus, f_minus = per_round.factor_plus, per_round.factor_minus

    def term(m: int, n: int) -> float:
        return f_plus ** (n - m) * f_minus**m

    # Identical to the difference of the four success probabilities:
    # the additive 1/2 constants cancel, and dropping them keeps the
    # evaluation accurate when the factor products underflow the
    # constants' float resolution at large counts.
    gap = (term(m1, nj) + term(m2 + m1p - m1, nl) - term(m2, nj) - term(m1p, nl)) / 2.0
    factors = (
        f_minus**m1 * f_plus ** (nj - m2),
        f_plus ** (m2 - m1) - f_minus ** (m2 - m1),
        1.0 - f_minus ** (m1p - m1) * f_plus ** (nl - nj - (m1p - m1)),
    )
    return InterchangeGap(gap=gap, factors=factors)


def random_instance(
    rng: np.random.Generator,
    k_max: int = 5,
    max_rounds: int = 8,
    p_range: tuple[float, float] = (0.01, 0.45),
    tau: float = 0.003,
    couple_futures: bool = True,
) -> BatchInstance:
    """Random batch instance with trajectories drawn at the instance's p.

    With ``couple_futures`` (the default), per-qubit outcomes are
    independent only over rounds completed before the first service
    time; later rounds come from one shared stream.  This realizes the
    exchangeable-futures coupling under which greedy freshest-first is
    provably the best assignment.  Disable it to obtain fully
    independent trajectories (useful for bookkeeping checks, not for
    optimality claims).
    """
    k = int(rng.integers(1, k_max + 1))
    p = float(rng.uniform(*p_range))
    gamma = -math.log(1.0 - 2.0 * p) / tau
    noise = NoiseParams(gamma=gamma, tau=tau)
    q_plus = plus_outcome_prob(p)
    # Strictly increasing times in (0, max_rounds * tau); exact round
    # boundaries have probability zero.
    times = np.sort(rng.uniform(0.0, max_rounds * tau, size=k))
    while len(set(times.tolist())) < k or times[0] <= 0.0:
        times = np.sort(rng.uniform(0.0, max_rounds * tau, size=k))

    def draw() -> Outcome:
        return Outcome.PLUS if rng.random() < q_plus else Outcome.MINUS

    if couple_futures:
        n_first = math.floor(times[0] / tau)
        shared_tail = tuple(draw() for _ in range(max_rounds - n_first))
        trajectories = tuple(
            tuple(draw() for _ in range(n_first)) + shared_tail for _ in range(k)
        )
    else:
        trajectories = tuple(
            tuple(draw() for _ in range(max_rounds)) for _ in range(k)
        )
    return BatchInstance(
        serve_times=tuple(float(t) for t in times), trajectories=trajectories, noise=noise
    )


@dataclass(frozen=True)
class OptimalityReport:
    instances: int
    worst_shortfall: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.worst_shortfall <= self.tolerance


def verify_fqf_optimality(
    n_instances: int = 1000,
    seed: int = 0,
    k_max: int = 5,
    max_rounds: int = 8,
    p_range: tuple[float, float] = (0.01, 0.45),
    tolerance: float = 1e-12,
    couple_futures: bool = True,
) -> OptimalityReport:
    """Check greedy-freshest-first against exhaustive enumeration.

    The shortfall for an instance is (best permutation total) - (greedy
    total); ties are allowed, so the check passes when the worst
    shortfall stays within ``tolerance``.
    """
    if k_max > 7:
        raise ValueError("exhaustive enumeration beyond 7 qubits is impractical")
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_instances):
        inst = random_instance(
            rng,
            k_max=k_max,
            max_rounds=max_rounds,
            p_range=p_range,
            couple_futures=couple_futures,
        )
        best = max(
            total_success(inst, perm) for perm in itertools.permutations(range(inst.k))
        )
        shortfall = best - total_success(inst, fqf_assignment(inst))
        if shortfall > worst:
            worst = shortfall
    return OptimalityReport(instances=n_instances, worst_shortfall=worst, tolerance=tolerance)


@dataclass(frozen=True)
class InterchangeSweepReport:
    cases: int
    min_gap: float
    max_mismatch: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.min_gap > 0.0 and self.max_mismatch <= self.tolerance


def sweep_interchange(
    max_count: int = 12,
    p_values: Sequence[float] | None = None,
    tolerance: float = 1e-12,
) -> InterchangeSweepReport:
    """Sweep the full admissible grid of counts up to ``max_count``.

    Requires nl > nj: with nl == nj no new round occurs between the two
    service instants, the swap is a no-op and the gap is exactly zero.
    Verifies strict positivity and agreement of raw vs factored forms.
    """
    if p_values is None:
        p_values = [0.01 + 0.02 * i for i in range(25)]
    cases = 0
    min_gap = math.inf
    max_mismatch = 0.0
    for p in p_values:
        for nj in range(1, max_count):
            for nl in range(nj + 1, max_count + 1):
                for m2 in range(1, nj + 1):
                    for m1 in range(m2):
                        for extra in range(nl - nj + 1):
                            res = interchange_gap(m1, m2, m1 + extra, nj, nl, p)
                            cases += 1
                            if res.gap < min_gap:
                                min_gap = res.gap
                            mismatch = abs(res.gap - res.factored_gap)
                            if mismatch > max_mismatch:
                                max_mismatch = mismatch
    return InterchangeSweepReport(
        cases=cases, min_gap=min_gap, max_mismatch=max_mismatch, tolerance=tolerance
    )
