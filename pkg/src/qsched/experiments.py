"""Scenario harness: replicated policy sweeps with paired random numbers.

Three canned experiments cover the evaluation scenarios:

* ``fig1`` — one simultaneous batch, on-demand pair generation; sweeps
  batch size and generation rate, comparing random selection (YQF with
  seeded batch shuffles) against syndrome-aware selection (FQF).
* ``fig2`` — Poisson stream into an infinite buffer; per-policy
  fidelity distribution (empirical CDF) and means.
* ``fig3`` — Poisson batch arrivals into a finite pushout buffer,
  swept over load, with generation rate and buffer scaled by batch
  size.

Every replication index maps to one root seed shared by all policies at
the same sweep coordinate, so policy comparisons are paired and every
row is bit-reproducible from its recorded seed set.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from statistics import fmean, stdev
from typing import Iterable, Sequence

from . import __version__
from .engine import RunMetrics, SimConfig, run
from .policies import PolicyKind
from .syndromes import NoiseParams

__all__ = [
    "ExperimentSpec",
    "ResultRow",
    "GapRow",
    "ExperimentResult",
    "run_fig1",
    "run_fig2",
    "run_fig3",
    "run_experiment",
    "write_rows_csv",
    "write_cdf_csv",
    "write_manifest",
]

_Z95 = 1.959963984540054  # two-sided 95% normal quantile

ROW_COLUMNS = (
    "figure",
    "scenario",
    "policy",
    "batch_size",
    "lambda_r",
    "lambda_e",
    "load",
    "buffer_size",
    "mean_fidelity",
    "ci95",
    "drop_rate",
    "departures",
    "replications",
    "seed_digest",
)

GAP_COLUMNS = (
    "figure",
    "batch_size",
    "lambda_r",
    "lambda_e",
    "load",
    "buffer_size",
    "policy_a",
    "policy_b",
    "mean_gap",
    "ci95",
    "replications",
)

CDF_COLUMNS = ("policy", "fidelity", "cdf")


@dataclass(frozen=True)
class ExperimentSpec:
    """Declarative description of one experiment invocation."""

    name: str
    batch_sizes: tuple[int, ...] = ()
    loads: tuple[float, ...] = ()
    rates: tuple[float, ...] = ()
    policies: tuple[PolicyKind, ...] = ()
    tau: float = 0.003
    gamma: float = 50.0
    lambda_r: float | None = None
    lambda_e: float | None = None
    buffer_size: int | None = None
    horizon: int | None = None
    warmup: int | None = None
    replications: int = 30
    seed: int = 0

    def __post_init__(self) -> None:
        if self.replications < 1:
            raise ValueError(f"replications must be >= 1, got {self.replications}")


@dataclass(frozen=True)
class ResultRow:
    """Aggregated statistics for one sweep coordinate and policy."""

    figure: str
    scenario: str
    policy: str
    batch_size: int
    lambda_r: float | None
    lambda_e: float
    load: float | None
    buffer_size: int | None
    mean_fidelity: float
    ci95: float
    drop_rate: float
    departures: int
    replications: int
    seed_digest: str


@dataclass(frozen=True)
class GapRow:
    """Paired mean difference between two policies at one coordinate."""

    figure: str
    batch_size: int
    lambda_r: float | None
    lambda_e: float
    load: float | None
    buffer_size: int | None
    policy_a: str
    policy_b: str
    mean_gap: float
    ci95: float
    replications: int


@dataclass
class ExperimentResult:
    name: str
    rows: list[ResultRow] = field(default_factory=list)
    gap_rows: list[GapRow] = field(default_factory=list)
    # per (coordinate key, policy name): one mean fidelity per replication
    rep_means: dict[tuple, list[float]] = field(default_factory=dict)
    # fig2 only, per policy name: pooled sorted samples and CDF values
    cdf: dict[str, tuple[list[float], list[float]]] = field(default_factory=dict)
    seeds: list[int] = field(default_factory=list)
    params: dict = field(default_factory=dict)


def _ci95(values: Sequence[float]) -> float:
    if len(values) < 2:
        return math.nan
    return _Z95 * stdev(values) / math.sqrt(len(values))


def _seed_digest(seeds: Iterable[int]) -> str:
    payload = ",".join(str(s) for s in seeds).encode()
    return hashlib.sha256(payload).hexdigest()[:12]


def _rep_seeds(base_seed: int, replications: int) -> list[int]:
    return [base_seed + r for r in range(replications)]


def _paired_gap(a: Sequence[float], b: Sequence[float]) -> tuple[float, float]:
    diffs = [x - y for x, y in zip(a, b)]
    return fmean(diffs), _ci95(diffs)


def _mean_fid(metrics: RunMetrics, config: SimConfig) -> float:
    if config.score_drops_as_zero:
        return metrics.mean_fidelity_scoring_drops_zero
    return metrics.mean_fidelity


def run_fig1(
    batch_sizes: Sequence[int] = (2, 4, 6, 8, 10),
    rates: Sequence[float] = (50.0, 200.0),
    *,
    tau: float = 0.003,
    gamma: float = 50.0,
    policies: Sequence[PolicyKind] = (PolicyKind.YQF, PolicyKind.FQF),
    replications: int = 1000,
    seed: int = 0,
) -> ExperimentResult:
    """Batch-average fidelity for one simultaneous batch, per (b, rate, policy).

    YQF runs in seeded random-permutation tie-break mode, realizing
    random selection among the simultaneously arrived qubits.
    """
    noise = NoiseParams(gamma=gamma, tau=tau)
    seeds = _rep_seeds(seed, replications)
    result = ExperimentResult(
        name="fig1",
        seeds=seeds,
        params={
            "batch_sizes": list(batch_sizes),
            "rates": list(rates),
            "tau": tau,
            "gamma": gamma,
            "replications": replications,
            "seed": seed,
        },
    )
    digest = _seed_digest(seeds)
    for lambda_e in rates:
        for b in batch_sizes:
            coord = (b, lambda_e)
            for policy in policies:
                means = []
                departures = 0
                for s in seeds:
                    cfg = SimConfig(
                        scenario="single_batch",
                        noise=noise,
                        policy=policy,
                        lambda_e=lambda_e,
                        batch_size=b,
                        seed=s,
                        random_tiebreak=True,
                    )
                    metrics = run(cfg)
                    means.append(_mean_fid(metrics, cfg))
                    departures += len(metrics.fidelity_samples)
                result.rep_means[(*coord, policy.value)] = means
                result.rows.append(
                    ResultRow(
                        figure="fig1",
                        scenario="single_batch",
                        policy=policy.value,
                        batch_size=b,
                        lambda_r=None,
                        lambda_e=lambda_e,
                        load=None,
                        buffer_size=None,
                        mean_fidelity=fmean(means),
                        ci95=_ci95(means),
                        drop_rate=0.0,
                        departures=departures,
                        replications=replications,
                        seed_digest=digest,
                    )
                )
            if PolicyKind.FQF in policies and PolicyKind.YQF in policies:
                gap, ci = _paired_gap(
                    result.rep_means[(*coord, "fqf")], result.rep_means[(*coord, "yqf")]
                )
                result.gap_rows.append(
                    GapRow(
                        figure="fig1",
                        batch_size=b,
                        lambda_r=None,
                        lambda_e=lambda_e,
                        load=None,
                        buffer_size=None,
                        policy_a="fqf",
                        policy_b="yqf",
                        mean_gap=gap,
                        ci95=ci,
                        replications=replications,
                    )
                )
    return result


def run_fig2(
    *,
    lambda_r: float = 90.0,
    lambda_e: float = 100.0,
    tau: float = 0.003,
    gamma: float = 50.0,
    policies: Sequence[PolicyKind] = (PolicyKind.OQF, PolicyKind.YQF, PolicyKind.FQF),
    horizon: int = 4000,
    warmup: int | None = None,
    replications: int = 30,
    seed: int = 0,
) -> ExperimentResult:
    """Fidelity distribution for a Poisson stream into an infinite buffer."""
    noise = NoiseParams(gamma=gamma, tau=tau)
    seeds = _rep_seeds(seed, replications)
    result = ExperimentResult(
        name="fig2",
        seeds=seeds,
        params={
            "lambda_r": lambda_r,
            "lambda_e": lambda_e,
            "tau": tau,
            "gamma": gamma,
            "horizon": horizon,
            "warmup": warmup,
            "replications": replications,
            "seed": seed,
        },
    )
    digest = _seed_digest(seeds)
    rho = lambda_r / lambda_e
    for policy in policies:
        means: list[float] = []
        pooled: list[float] = []
        departures = 0
        drops = 0
        arrivals = 0
        for s in seeds:
            cfg = SimConfig(
                scenario="stream",
                noise=noise,
                policy=policy,
                lambda_e=lambda_e,
                lambda_r=lambda_r,
                seed=s,
                horizon_departures=horizon,
                warmup=warmup,
                random_tiebreak=True,
            )
            metrics = run(cfg)
            means.append(_mean_fid(metrics, cfg))
            pooled.extend(metrics.fidelity_samples)
            departures += len(metrics.fidelity_samples)
            drops += metrics.pushout_count
            arrivals += metrics.arrivals_count
        pooled.sort()
        n = len(pooled)
        result.cdf[policy.value] = (pooled, [(i + 1) / n for i in range(n)])
        result.rep_means[(policy.value,)] = means
        result.rows.append(
            ResultRow(
                figure="fig2",
                scenario="stream",
                policy=policy.value,
                batch_size=1,
                lambda_r=lambda_r,
                lambda_e=lambda_e,
                load=rho,
                buffer_size=None,
                mean_fidelity=fmean(means),
                ci95=_ci95(means),
                drop_rate=drops / arrivals if arrivals else 0.0,
                departures=departures,
                replications=replications,
                seed_digest=digest,
            )
        )
    return result


def run_fig3(
    loads: Sequence[float] = (0.5, 0.7, 0.9, 1.1, 1.3, 1.5),
    configs: Sequence[tuple[float, int, int]] = ((25.0, 1, 5), (100.0, 4, 20)),
    *,
    tau: float = 0.003,
    gamma: float = 50.0,
    policies: Sequence[PolicyKind] = (PolicyKind.YQF, PolicyKind.FQF),
    horizon: int = 2500,
    warmup: int | None = None,
    replications: int = 25,
    seed: int = 0,
) -> ExperimentResult:
    """Mean fidelity vs load for batch arrivals into a finite pushout buffer.

    ``configs`` lists (lambda_e, batch_size, buffer_size) triples; the
    arrival rate at each load point is lambda_r = load * lambda_e / b.
    """
    noise = NoiseParams(gamma=gamma, tau=tau)
    seeds = _rep_seeds(seed, replications)
    result = ExperimentResult(
        name="fig3",
        seeds=seeds,
        params={
            "loads": list(loads),
            "configs": [list(c) for c in configs],
            "tau": tau,
            "gamma": gamma,
            "horizon": horizon,
            "warmup": warmup,
            "replications": replications,
            "seed": seed,
        },
    )
    digest = _seed_digest(seeds)
    for lambda_e, b, buffer_size in configs:
        for rho in loads:
            lambda_r = rho * lambda_e / b
            coord = (b, lambda_e, rho)
            drop_rates: dict[str, float] = {}
            for policy in policies:
                means = []
                departures = 0
                drops = 0
                arrivals = 0
                for s in seeds:
                    cfg = SimConfig(
                        scenario="batched_stream",
                        noise=noise,
                        policy=policy,
                        lambda_e=lambda_e,
                        lambda_r=lambda_r,
                        batch_size=b,
                        buffer_size=buffer_size,
                        seed=s,
                        horizon_departures=horizon,
                        warmup=warmup,
                        random_tiebreak=True,
                    )
                    metrics = run(cfg)
                    means.append(_mean_fid(metrics, cfg))
                    departures += len(metrics.fidelity_samples)
                    drops += metrics.pushout_count
                    arrivals += metrics.arrivals_count
                result.rep_means[(*coord, policy.value)] = means
                drop_rates[policy.value] = drops / arrivals if arrivals else 0.0
                result.rows.append(
                    ResultRow(
                        figure="fig3",
                        scenario="batched_stream",
                        policy=policy.value,
                        batch_size=b,
                        lambda_r=lambda_r,
                        lambda_e=lambda_e,
                        load=rho,
                        buffer_size=buffer_size,
                        mean_fidelity=fmean(means),
                        ci95=_ci95(means),
                        drop_rate=drop_rates[policy.value],
                        departures=departures,
                        replications=replications,
                        seed_digest=digest,
                    )
                )
            if PolicyKind.FQF in policies and PolicyKind.YQF in policies:
                gap, ci = _paired_gap(
                    result.rep_means[(*coord, "fqf")], result.rep_means[(*coord, "yqf")]
                )
                result.gap_rows.append(
                    GapRow(
                        figure="fig3",
                        batch_size=b,
                        lambda_r=lambda_r,
                        lambda_e=lambda_e,
                        load=rho,
                        buffer_size=buffer_size,
                        policy_a="fqf",
                        policy_b="yqf",
                        mean_gap=gap,
                        ci95=ci,
                        replications=replications,
                    )
                )
    return result


def run_experiment(spec: ExperimentSpec) -> ExperimentResult:
    """Dispatch an ExperimentSpec to the matching runner."""
    if spec.name == "fig1":
        return run_fig1(
            batch_sizes=spec.batch_sizes or (2, 4, 6, 8, 10),
            rates=spec.rates or (50.0, 200.0),
            tau=spec.tau,
            gamma=spec.gamma,
            policies=spec.policies or (PolicyKind.YQF, PolicyKind.FQF),
            replications=spec.replications,
            seed=spec.seed,
        )
    if spec.name == "fig2":
        return run_fig2(
            lambda_r=spec.lambda_r if spec.lambda_r is not None else 90.0,
            lambda_e=spec.lambda_e if spec.lambda_e is not None else 100.0,
            tau=spec.tau,
            gamma=spec.gamma,
            policies=spec.policies or (PolicyKind.OQF, PolicyKind.YQF, PolicyKind.FQF),
            horizon=spec.horizon if spec.horizon is not None else 4000,
            warmup=spec.warmup,
            replications=spec.replications,
            seed=spec.seed,
        )
    if spec.name == "fig3":
        return run_fig3(
            loads=spec.loads or (0.5, 0.7, 0.9, 1.1, 1.3, 1.5),
            tau=spec.tau,
            gamma=spec.gamma,
            policies=spec.policies or (PolicyKind.YQF, PolicyKind.FQF),
            horizon=spec.horizon if spec.horizon is not None else 2500,
            warmup=spec.warmup,
            replications=spec.replications,
            seed=spec.seed,
        )
    raise ValueError(f"unknown experiment {spec.name!r}")


# -- output ------------------------------------------------------------------


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_rows_csv(path: str, rows: Sequence[ResultRow]) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(ROW_COLUMNS) + "\n")
        for row in rows:
            record = asdict(row)
            fh.write(",".join(_cell(record[c]) for c in ROW_COLUMNS) + "\n")


def write_gaps_csv(path: str, rows: Sequence[GapRow]) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(GAP_COLUMNS) + "\n")
        for row in rows:
            record = asdict(row)
            fh.write(",".join(_cell(record[c]) for c in GAP_COLUMNS) + "\n")


def write_cdf_csv(path: str, result: ExperimentResult) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(CDF_COLUMNS) + "\n")
        for policy, (values, probs) in result.cdf.items():
            for v, c in zip(values, probs):
                fh.write(f"{policy},{v!r},{c!r}\n")


def write_manifest(path: str, result: ExperimentResult) -> None:
    manifest = {
        "experiment": result.name,
        "version": __version__,
        "params": result.params,
        "seeds": result.seeds,
        "row_columns": list(ROW_COLUMNS),
        "gap_columns": list(GAP_COLUMNS),
        "cdf_columns": list(CDF_COLUMNS),
    }
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
