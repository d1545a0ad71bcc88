"""Seeded continuous-time discrete-event simulation of one network node.

The node stores arriving request qubits in a (possibly finite) buffer,
runs a syndrome measurement round on each resident every ``tau``
seconds, and generates entanglement resource pairs on demand: a
generation attempt is in progress exactly while the buffer is
non-empty, completes after an exponential delay, and immediately
teleports one resident chosen by the scheduling policy.  A final
syndrome round over the residual interval since the qubit's last
completed round is performed at service.

Events at equal timestamps are ordered EC_ROUND < ARRIVAL < EPR_READY,
so syndrome information is always current before any scheduling or
pushout decision, and a batch arriving at a completion instant is
eligible for immediate service.

Randomness is split into named substreams (arrivals, generation delays,
per-qubit syndrome draws, batch tie-break shuffles) derived from the
root seed, so runs with equal seeds expose identical exogenous
randomness to every policy.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from statistics import fmean

import numpy as np

from . import streams
from .policies import PolicyKind, QubitRecord, admit, select_for_service
from .syndromes import (
    CondErrorProbs,
    NoiseParams,
    cond_error_given_plus,
    phase_flip_prob,
    plus_outcome_prob,
)

__all__ = ["SCENARIOS", "SimConfig", "Departure", "RunMetrics", "run", "load"]

SCENARIOS = ("single_batch", "stream", "batched_stream")

# Tie ranks at equal event times.
_EC_ROUND = 0
_ARRIVAL = 1
_EPR_READY = 2


@dataclass(frozen=True)
class SimConfig:
    """Complete description of one simulation run.

    ``horizon_departures``/``horizon_time``: stop after that many
    services or that much simulated time; single_batch runs default to
    serving the whole batch.  ``warmup`` departures are excluded from
    the recorded statistics (default: 10% of the departure horizon for
    stream scenarios, none otherwise).
    """

    scenario: str
    noise: NoiseParams
    policy: PolicyKind
    lambda_e: float
    lambda_r: float | None = None
    batch_size: int = 1
    buffer_size: int | None = None
    seed: int = 0
    horizon_departures: int | None = None
    horizon_time: float | None = None
    warmup: int | None = None
    random_tiebreak: bool = False
    record_departures: bool = False
    score_drops_as_zero: bool = False

    def __post_init__(self) -> None:
        if self.scenario not in SCENARIOS:
            raise ValueError(f"scenario must be one of {SCENARIOS}, got {self.scenario!r}")
        if not self.lambda_e > 0:
            raise ValueError(f"lambda_e must be > 0, got {self.lambda_e}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.scenario in ("stream", "batched_stream"):
            if self.lambda_r is None or not self.lambda_r > 0:
                raise ValueError(f"{self.scenario} requires lambda_r > 0, got {self.lambda_r}")
            if self.horizon_departures is None and self.horizon_time is None:
                raise ValueError(f"{self.scenario} requires a departure or time horizon")
        if self.buffer_size is not None and self.buffer_size < self.batch_size:
            raise ValueError(
                f"buffer_size must be >= batch_size or infinite, "
                f"got {self.buffer_size} < {self.batch_size}"
            )
        if self.seed < 0:
            raise ValueError(f"seed must be non-negative, got {self.seed}")
        if self.warmup is not None and self.warmup < 0:
            raise ValueError(f"warmup must be non-negative, got {self.warmup}")

    @property
    def effective_horizon_departures(self) -> int | None:
        if self.scenario == "single_batch" and self.horizon_departures is None:
            return self.batch_size
        return self.horizon_departures

    @property
    def effective_warmup(self) -> int:
        if self.warmup is not None:
            return self.warmup
        if self.scenario == "single_batch":
            return 0
        horizon = self.effective_horizon_departures
        return horizon // 10 if horizon is not None else 0


def load(config: SimConfig) -> float:
    """Traffic intensity: offered qubit rate over the service rate."""
    if config.scenario == "single_batch":
        raise ValueError("load is undefined for the single_batch scenario")
    assert config.lambda_r is not None
    return config.lambda_r * config.batch_size / config.lambda_e


@dataclass(frozen=True)
class Departure:
    """Per-service record; the *_pre counts exclude the final partial round."""

    qubit_id: int
    arrival_time: float
    time: float
    n_plus_pre: int
    n_minus_pre: int
    n_plus: int
    n_minus: int
    fidelity: float
    error: bool


@dataclass
class RunMetrics:
    """Outputs of one run.  Sample lists cover post-warmup departures only."""

    seed: int
    arrivals_count: int = 0
    departures_count: int = 0
    pushout_count: int = 0
    pushout_count_post_warmup: int = 0
    residual_count: int = 0
    fidelity_samples: list[float] = field(default_factory=list)
    departure_times: list[float] = field(default_factory=list)
    realized_error_indicators: list[bool] = field(default_factory=list)
    departures: list[Departure] | None = None

    @property
    def mean_fidelity(self) -> float:
        return fmean(self.fidelity_samples)

    @property
    def mean_fidelity_scoring_drops_zero(self) -> float:
        n = len(self.fidelity_samples) + self.pushout_count_post_warmup
        return sum(self.fidelity_samples) / n

    @property
    def drop_rate(self) -> float:
        return self.pushout_count / self.arrivals_count if self.arrivals_count else 0.0


class _Simulation:
    def __init__(self, config: SimConfig):
        self.config = config
        self.tau = config.noise.tau
        self.gamma = config.noise.gamma
        self.p_round = config.noise.flip_prob_per_round
        self.per_round = CondErrorProbs.from_flip_prob(self.p_round)
        # Joint (outcome, flip) thresholds for a full round; one uniform per round.
        q_plus = plus_outcome_prob(self.p_round)
        self.thr_plus_flip = q_plus * cond_error_given_plus(self.p_round)
        self.thr_plus = q_plus
        self.thr_minus_flip = q_plus + (1.0 - q_plus) * self.p_round

        self.heap: list[tuple[float, int, int, int]] = []
        self.seq = 0
        self.buffer: dict[int, QubitRecord] = {}
        self.qubit_rngs: dict[int, np.random.Generator] = {}
        self.flip_parity: dict[int, bool] = {}
        self.next_id = 0
        self.epr_pending = False

        self.arrivals_rng = streams.substream(config.seed, streams.STREAM_ARRIVALS)
        self.epr_rng = streams.substream(config.seed, streams.STREAM_EPR)
        self.tiebreak_rng = streams.substream(config.seed, streams.STREAM_TIEBREAK)

        self.metrics = RunMetrics(seed=config.seed)
        if config.record_departures:
            self.metrics.departures = []
        self.warmup = config.effective_warmup
        self.horizon_departures = config.effective_horizon_departures
        self.horizon_time = config.horizon_time

    def _push(self, time: float, rank: int, payload: int) -> None:
        heapq.heappush(self.heap, (time, rank, self.seq, payload))
        self.seq += 1

    # -- processes ---------------------------------------------------------

    def _schedule_first_arrival(self) -> None:
        cfg = self.config
        if cfg.scenario == "single_batch":
            self._push(0.0, _ARRIVAL, cfg.batch_size)
        else:
            batch = 1 if cfg.scenario == "stream" else cfg.batch_size
            assert cfg.lambda_r is not None
            self._push(self.arrivals_rng.exponential(1.0 / cfg.lambda_r), _ARRIVAL, batch)

    def _start_generation(self, now: float) -> None:
        self._push(now + self.epr_rng.exponential(1.0 / self.config.lambda_e), _EPR_READY, 0)
        self.epr_pending = True

    def _handle_arrival(self, now: float, batch: int) -> None:
        cfg = self.config
        base = self.next_id
        self.next_id += batch
        if cfg.random_tiebreak and batch > 1:
            ranks = self.tiebreak_rng.permutation(batch)
        else:
            ranks = range(batch)
        arrivals = [
            QubitRecord(id=base + i, arrival_time=now, tiebreak=base + int(ranks[i]))
            for i in range(batch)
        ]
        was_empty = not self.buffer
        self.buffer, evicted = admit(
            self.buffer, arrivals, cfg.buffer_size, cfg.policy, self.per_round
        )
        self.metrics.arrivals_count += batch
        self.metrics.pushout_count += len(evicted)
        if self.metrics.departures_count >= self.warmup:
            self.metrics.pushout_count_post_warmup += len(evicted)
        for qid in evicted:
            self.qubit_rngs.pop(qid, None)
            self.flip_parity.pop(qid, None)
        for rec in arrivals:
            if rec.id in self.buffer:
                self.qubit_rngs[rec.id] = streams.substream(
                    cfg.seed, streams.STREAM_SYNDROME, rec.id
                )
                self.flip_parity[rec.id] = False
                self._push(now + self.tau, _EC_ROUND, rec.id)
        if was_empty and self.buffer:
            self._start_generation(now)
        if cfg.scenario != "single_batch":
            assert cfg.lambda_r is not None
            self._push(now + self.arrivals_rng.exponential(1.0 / cfg.lambda_r), _ARRIVAL, batch)

    def _handle_ec_round(self, now: float, qid: int) -> None:
        rec = self.buffer.get(qid)
        if rec is None:
            return  # tombstoned: qubit was served or pushed out
        u = self.qubit_rngs[qid].random()
        if u < self.thr_plus:
            rec.history.n_plus += 1
            flipped = u < self.thr_plus_flip
        else:
            rec.history.n_minus += 1
            flipped = u < self.thr_minus_flip
        if flipped:
            self.flip_parity[qid] = not self.flip_parity[qid]
        rec.last_ec_time = now
        self._push(now + self.tau, _EC_ROUND, qid)

    def _handle_epr_ready(self, now: float) -> None:
        assert self.buffer, "generation completed with no requests pending"
        self.epr_pending = False
        qid = select_for_service(self.config.policy, self.buffer.values(), self.per_round)
        rec = self.buffer.pop(qid)
        rng = self.qubit_rngs.pop(qid)
        parity = self.flip_parity.pop(qid)

        pre_plus, pre_minus = rec.history.n_plus, rec.history.n_minus
        base = self.per_round.factor_plus**pre_plus * self.per_round.factor_minus**pre_minus
        delta = now - rec.last_ec_time
        final_factor = 1.0
        if delta > 0.0:
            # Final partial round: physical flip probability accrued over
            # delta only, so its conditional-error factor differs from a
            # full round's.  The recorded fidelity is the exact no-error
            # probability of the realized round sequence.
            p_delta = phase_flip_prob(self.gamma, delta)
            q_plus = plus_outcome_prob(p_delta)
            u = rng.random()
            if u < q_plus:
                rec.history.n_plus += 1
                p_err = cond_error_given_plus(p_delta)
                if u < q_plus * p_err:
                    parity = not parity
            else:
                rec.history.n_minus += 1
                p_err = p_delta
                if (u - q_plus) < (1.0 - q_plus) * p_delta:
                    parity = not parity
            final_factor = 1.0 - 2.0 * p_err
        fidelity = (1.0 + base * final_factor) / 2.0

        m = self.metrics
        m.departures_count += 1
        if m.departures_count > self.warmup:
            m.fidelity_samples.append(fidelity)
            m.departure_times.append(now)
            m.realized_error_indicators.append(parity)
            if m.departures is not None:
                m.departures.append(
                    Departure(
                        qubit_id=qid,
                        arrival_time=rec.arrival_time,
                        time=now,
                        n_plus_pre=pre_plus,
                        n_minus_pre=pre_minus,
                        n_plus=rec.history.n_plus,
                        n_minus=rec.history.n_minus,
                        fidelity=fidelity,
                        error=parity,
                    )
                )
        if self.buffer:
            self._start_generation(now)

    # -- main loop ----------------------------------------------------------

    def run(self) -> RunMetrics:
        self._schedule_first_arrival()
        heap = self.heap
        while heap:
            time, rank, _, payload = heapq.heappop(heap)
            if self.horizon_time is not None and time > self.horizon_time:
                break
            if rank == _EC_ROUND:
                self._handle_ec_round(time, payload)
            elif rank == _ARRIVAL:
                self._handle_arrival(time, payload)
            else:
                self._handle_epr_ready(time)
                if (
                    self.horizon_departures is not None
                    and self.metrics.departures_count >= self.horizon_departures
                ):
                    break
        self.metrics.residual_count = len(self.buffer)
        return self.metrics


def run(config: SimConfig) -> RunMetrics:
    """Execute one simulation run; bit-identical output for equal configs."""
    return _Simulation(config).run()
