"""Scheduling and pushout policies over the set of stored request qubits.

Three disciplines are supported:

* OQF (oldest qubit first) serves by minimum arrival time.
* YQF (youngest qubit first) serves by maximum arrival time.
* FQF (freshest qubit first) serves the qubit whose syndrome history
  implies the lowest logical-error likelihood.

Pushout (eviction on arrival to a full buffer) discards the oldest
resident under both timing policies and the highest-error-likelihood
resident under FQF.

All functions are pure decisions over a buffer snapshot.  Ties are
resolved through each record's ``tiebreak`` key, which the simulation
engine sets either to the record id (fully deterministic mode) or to a
seeded random rank within the arrival batch (so that timing policies
behave like random selection among simultaneous arrivals).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable

from .syndromes import CondErrorProbs, SyndromeHistory, success_prob

__all__ = ["PolicyKind", "QubitRecord", "select_for_service", "select_for_pushout", "admit"]


class PolicyKind(Enum):
    OQF = "oqf"
    YQF = "yqf"
    FQF = "fqf"

    @classmethod
    def from_name(cls, name: str) -> "PolicyKind":
        try:
            return cls(name.lower())
        except ValueError:
            valid = ", ".join(p.value for p in cls)
            raise ValueError(f"unknown policy {name!r}; expected one of: {valid}") from None


@dataclass(slots=True)
class QubitRecord:
    """One stored request qubit awaiting teleportation.

    ``last_ec_time`` is the time of the most recent completed syndrome
    round, initialized to the arrival time; the history holds one entry
    per completed round since arrival.
    """

    id: int
    arrival_time: float
    history: SyndromeHistory = field(default_factory=SyndromeHistory)
    last_ec_time: float = -1.0
    tiebreak: int = -1

    def __post_init__(self) -> None:
        if self.last_ec_time < 0:
            self.last_ec_time = self.arrival_time
        if self.tiebreak < 0:
            self.tiebreak = self.id
        if self.last_ec_time < self.arrival_time:
            raise ValueError("last_ec_time cannot precede arrival_time")


def select_for_service(
    policy: PolicyKind, buffer: Iterable[QubitRecord], per_round: CondErrorProbs
) -> int:
    """Id of the record the policy teleports next.  Buffer must be non-empty."""
    records = list(buffer)
    if not records:
        raise ValueError("select_for_service on an empty buffer")
    if policy is PolicyKind.OQF:
        best = min(records, key=lambda r: (r.arrival_time, r.tiebreak))
    elif policy is PolicyKind.YQF:
        best = min(records, key=lambda r: (-r.arrival_time, r.tiebreak))
    else:
        best = min(records, key=lambda r: (-success_prob(r.history, per_round), r.tiebreak))
    return best.id


def select_for_pushout(
    policy: PolicyKind, buffer: Iterable[QubitRecord], per_round: CondErrorProbs
) -> int:
    """Id of the record to evict when an arrival finds the buffer full."""
    records = list(buffer)
    if not records:
        raise ValueError("select_for_pushout on an empty buffer")
    if policy is PolicyKind.FQF:
        worst = min(records, key=lambda r: (success_prob(r.history, per_round), r.tiebreak))
    else:
        # Both timing policies discard the oldest resident.
        worst = min(records, key=lambda r: (r.arrival_time, r.tiebreak))
    return worst.id


def admit(
    buffer: dict[int, QubitRecord],
    arrivals: list[QubitRecord],
    capacity: int | None,
    policy: PolicyKind,
    per_round: CondErrorProbs,
) -> tuple[dict[int, QubitRecord], list[int]]:
    """Admit new arrivals, evicting one resident at a time while over capacity.

    Eviction candidates include the just-admitted arrivals, so a fresh
    qubit can itself be pushed out if the policy ranks it lowest.
    Returns the updated buffer (the input mapping is not modified) and
    the evicted ids in eviction order.
    """
    if capacity is not None and capacity < 1:
        raise ValueError(f"capacity must be >= 1, got {capacity}")
    updated = dict(buffer)
    for rec in arrivals:
        if rec.id in updated:
            raise ValueError(f"duplicate qubit id {rec.id}")
        updated[rec.id] = rec
    evicted: list[int] = []
    if capacity is not None:
        while len(updated) > capacity:
            victim = select_for_pushout(policy, updated.values(), per_round)
            del updated[victim]
            evicted.append(victim)
    return updated, evicted
