"""Acceptance suite: one test per release criterion.

Each test prints an ``ACCEPTANCE n: PASS/FAIL`` line (run pytest with
``-s -v`` to see them as they complete).  Criteria 1-5 are exact-math
checks at fixed tolerances; 6-8 are seeded trend reproductions whose
statistics are decisive at the pinned scales.
"""

import math
from contextlib import contextmanager
from statistics import fmean

import pytest

from qsched.batchopt import sweep_interchange, verify_fqf_optimality
from qsched.engine import SimConfig, run
from qsched.experiments import run_fig1, run_fig2, run_fig3
from qsched.policies import PolicyKind
from qsched.syndromes import (
    CondErrorProbs,
    NoiseParams,
    cond_error_given_minus,
    cond_error_given_plus,
    phase_flip_prob,
    success_prob_counts,
)

from oracles import history_success_prob

SEED = 20260809
NOISE = NoiseParams(gamma=50.0, tau=0.003)


@contextmanager
def criterion(number: int, description: str):
    try:
        yield
    except Exception:
        print(f"ACCEPTANCE {number}: FAIL - {description}")
        raise
    print(f"ACCEPTANCE {number}: PASS - {description}")


def test_criterion_1_numeric_anchors():
    with criterion(1, "numeric anchors for the reference noise parameters"):
        p = phase_flip_prob(50.0, 0.003)
        assert p == pytest.approx(0.069, abs=1e-3)
        assert cond_error_given_plus(p) == pytest.approx(0.00042, abs=5e-5)
        assert cond_error_given_minus(p) == p
        pr = CondErrorProbs.from_flip_prob(p)
        assert success_prob_counts(0, 1, pr) == pytest.approx(0.93, abs=5e-3)
        assert success_prob_counts(0, 2, pr) == pytest.approx(0.87, abs=5e-3)


def test_criterion_2_brute_force_likelihood_equivalence():
    with criterion(2, "success likelihood matches exhaustive parity enumeration"):
        for p in (0.05, 0.069, 0.2, 0.4):
            pr = CondErrorProbs.from_flip_prob(p)
            for a in range(9):
                for b in range(9 - a):
                    expected = history_success_prob(a, b, p)
                    assert abs(success_prob_counts(a, b, pr) - expected) <= 1e-12


def test_criterion_3_batch_optimality_oracle():
    with criterion(3, "greedy freshest-first attains the enumeration maximum"):
        report = verify_fqf_optimality(
            n_instances=1000, seed=SEED, k_max=5, max_rounds=8, p_range=(0.01, 0.45)
        )
        assert report.instances == 1000
        assert report.worst_shortfall <= 1e-12


def test_criterion_4_interchange_inequality():
    with criterion(4, "interchange gap positive and equal to its factored form"):
        p_values = [0.01 + 0.02 * i for i in range(25)]
        assert p_values[-1] == pytest.approx(0.49)
        report = sweep_interchange(max_count=12, p_values=p_values)
        assert report.min_gap > 0.0
        assert report.max_mismatch <= 1e-12


def test_criterion_5_monte_carlo_self_consistency():
    with criterion(5, "realized no-error frequency matches mean success probability"):
        cfg = SimConfig(
            scenario="stream",
            noise=NOISE,
            policy=PolicyKind.FQF,
            lambda_e=100.0,
            lambda_r=90.0,
            seed=SEED,
            horizon_departures=100_000,
            warmup=0,
        )
        metrics = run(cfg)
        n = len(metrics.fidelity_samples)
        assert n >= 100_000
        mean_fid = metrics.mean_fidelity
        realized = fmean(1.0 - e for e in metrics.realized_error_indicators)
        sigma = math.sqrt(mean_fid * (1.0 - mean_fid) / n)
        assert abs(realized - mean_fid) <= 3 * sigma


def test_criterion_6_stream_cdf_reproduction():
    with criterion(6, "stream CDF steps at the (0, x) anchors and policy ordering"):
        result = run_fig2(horizon=4000, replications=30, seed=SEED)
        pr = CondErrorProbs.from_flip_prob(NOISE.flip_prob_per_round)
        anchors = [success_prob_counts(0, x, pr) for x in (0, 1, 2)]
        for policy, (values, _) in result.cdf.items():
            n = len(values)
            for anchor in anchors:
                mass = sum(1 for v in values if anchor - 0.005 <= v <= anchor + 0.005) / n
                assert mass >= 0.01, f"{policy}: no step near {anchor:.4f} (mass {mass:.4f})"
        means = {row.policy: row.mean_fidelity for row in result.rows}
        cis = {row.policy: row.ci95 for row in result.rows}
        assert means["fqf"] >= means["yqf"] >= means["oqf"]
        assert means["fqf"] - cis["fqf"] > means["oqf"] + cis["oqf"]


def test_criterion_7_batch_sweep_trends():
    with criterion(7, "batch-size sweep: gap positive for b>=4, monotone, rate effect"):
        result = run_fig1(
            batch_sizes=(2, 4, 6, 8, 10), rates=(50.0, 200.0), replications=2000, seed=SEED
        )
        by_rate = {}
        for gap in result.gap_rows:
            by_rate.setdefault(gap.lambda_e, []).append(gap)
        for rate, gaps in by_rate.items():
            gaps.sort(key=lambda g: g.batch_size)
            for gap in gaps:
                assert gap.ci95 > 0.0  # CIs reported per point
                if gap.batch_size >= 4:
                    assert gap.mean_gap - gap.ci95 > 0.0, (
                        f"gap not statistically positive at b={gap.batch_size}, rate={rate}"
                    )
            estimates = [g.mean_gap for g in gaps]
            assert all(x <= y for x, y in zip(estimates, estimates[1:])), (
                f"gap not monotone in batch size at rate {rate}: {estimates}"
            )
        gap_low = next(g for g in by_rate[50.0] if g.batch_size == 10)
        gap_high = next(g for g in by_rate[200.0] if g.batch_size == 10)
        assert gap_high.mean_gap < gap_low.mean_gap


def test_criterion_8_load_sweep_trends():
    with criterion(8, "load sweep: gap grows with load and with batch arrivals"):
        scaled_batch = run_fig3(
            loads=(0.5, 1.1, 1.3), configs=((100.0, 4, 20),),
            horizon=2000, replications=16, seed=SEED,
        )
        gaps = {g.load: g for g in scaled_batch.gap_rows}
        low, high = gaps[0.5], gaps[1.3]
        assert high.mean_gap - high.ci95 > low.mean_gap + low.ci95, (
            f"gap CIs overlap: {low.mean_gap}+-{low.ci95} vs {high.mean_gap}+-{high.ci95}"
        )
        scaled_single = run_fig3(
            loads=(1.1,), configs=((25.0, 1, 5),),
            horizon=2000, replications=16, seed=SEED,
        )
        (single_gap,) = scaled_single.gap_rows
        assert gaps[1.1].mean_gap > single_gap.mean_gap
