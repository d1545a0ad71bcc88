"""Command-line interface: free-form runs, canned experiments, verification.

Subcommands::

    run             one simulation with explicit parameters
    fig1            batch-size / generation-rate sweep (single batch)
    fig2            stream scenario fidelity CDF per policy
    fig3            load sweep with finite pushout buffers
    verify-theorem  exhaustive batch-optimality and interchange checks

A config file of ``key = value`` lines (``#`` comments allowed) can be
passed with ``--config``; its entries override command-line flags.
Validation failures exit with a nonzero status.
"""

from __future__ import annotations

import argparse
import json
import sys

from .batchopt import sweep_interchange, verify_fqf_optimality
from .engine import SimConfig, load, run
from .experiments import (
    ExperimentResult,
    ExperimentSpec,
    run_experiment,
    write_cdf_csv,
    write_gaps_csv,
    write_manifest,
    write_rows_csv,
)
from .policies import PolicyKind
from .syndromes import NoiseParams

_NONE_WORDS = {"none", "inf", "infinite", ""}


def _opt_int(text: str) -> int | None:
    return None if text.lower() in _NONE_WORDS else int(text)


def _opt_float(text: str) -> float | None:
    return None if text.lower() in _NONE_WORDS else float(text)


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.split(","))


def _float_list(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.split(","))


# Coercers for config-file overrides, keyed by argparse dest.
_COERCERS = {
    "scenario": str,
    "tau": float,
    "gamma": float,
    "lambda_r": _opt_float,
    "lambda_e": float,
    "batch_size": int,
    "buffer": _opt_int,
    "policy": str,
    "seed": int,
    "replications": int,
    "horizon": _opt_int,
    "horizon_time": _opt_float,
    "warmup": _opt_int,
    "out": str,
    "plot": str,
    "batch_sizes": _int_list,
    "rates": _float_list,
    "loads": _float_list,
    "instances": int,
    "max_qubits": int,
    "max_rounds": int,
    "p_min": float,
    "p_max": float,
    "grid_max": int,
    "grid_step": float,
}


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--tau", type=float, default=0.003, help="EC round period, seconds")
    parser.add_argument("--gamma", type=float, default=50.0, help="dephasing rate, Hz")
    parser.add_argument("--seed", type=int, default=0, help="root seed")
    parser.add_argument("--out", type=str, default=None, help="output CSV path")
    parser.add_argument("--config", type=str, default=None, help="key=value file overriding flags")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qsched",
        description="Teleportation scheduling simulator for a quantum network node",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one simulation")
    _add_common(p_run)
    p_run.add_argument(
        "--scenario",
        choices=["single_batch", "stream", "batched_stream"],
        default="stream",
    )
    p_run.add_argument("--policy", type=str, default="fqf", help="oqf | yqf | fqf")
    p_run.add_argument("--lambda-r", type=_opt_float, default=None, help="request rate, Hz")
    p_run.add_argument("--lambda-e", type=float, default=100.0, help="EPR generation rate, Hz")
    p_run.add_argument("--batch-size", type=int, default=1)
    p_run.add_argument("--buffer", type=_opt_int, default=None, help="buffer size (default: infinite)")
    p_run.add_argument("--horizon", type=_opt_int, default=None, help="departures to simulate")
    p_run.add_argument("--horizon-time", type=_opt_float, default=None, help="seconds to simulate")
    p_run.add_argument("--warmup", type=_opt_int, default=None, help="departures to discard")

    p1 = sub.add_parser("fig1", help="batch sweep: average fidelity vs batch size")
    _add_common(p1)
    p1.add_argument("--batch-sizes", type=_int_list, default=(2, 4, 6, 8, 10))
    p1.add_argument("--rates", type=_float_list, default=(50.0, 200.0), help="EPR rates, Hz")
    p1.add_argument("--replications", type=int, default=1000)
    p1.add_argument("--plot", type=str, default=None, help="write an SVG plot here")

    p2 = sub.add_parser("fig2", help="stream scenario: fidelity CDF per policy")
    _add_common(p2)
    p2.add_argument("--lambda-r", type=float, default=90.0)
    p2.add_argument("--lambda-e", type=float, default=100.0)
    p2.add_argument("--horizon", type=int, default=4000, help="departures per replication")
    p2.add_argument("--warmup", type=_opt_int, default=None)
    p2.add_argument("--replications", type=int, default=30)
    p2.add_argument("--plot", type=str, default=None)

    p3 = sub.add_parser("fig3", help="load sweep with finite pushout buffers")
    _add_common(p3)
    p3.add_argument("--loads", type=_float_list, default=(0.5, 0.7, 0.9, 1.1, 1.3, 1.5))
    p3.add_argument("--horizon", type=int, default=2500, help="departures per replication")
    p3.add_argument("--warmup", type=_opt_int, default=None)
    p3.add_argument("--replications", type=int, default=25)
    p3.add_argument("--plot", type=str, default=None)

    pv = sub.add_parser("verify-theorem", help="batch-optimality and interchange checks")
    pv.add_argument("--instances", type=int, default=1000)
    pv.add_argument("--max-qubits", type=int, default=5)
    pv.add_argument("--max-rounds", type=int, default=8)
    pv.add_argument("--p-min", type=float, default=0.01)
    pv.add_argument("--p-max", type=float, default=0.45)
    pv.add_argument("--grid-max", type=int, default=12, help="max round count in the sweep")
    pv.add_argument("--grid-step", type=float, default=0.02, help="p step for the sweep")
    pv.add_argument("--seed", type=int, default=0)
    pv.add_argument("--config", type=str, default=None)

    return parser


def _apply_config_file(args: argparse.Namespace) -> None:
    if not getattr(args, "config", None):
        return
    with open(args.config) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"{args.config}:{lineno}: expected 'key = value'")
            dest = key.strip().lower().replace("-", "_")
            if dest not in _COERCERS or not hasattr(args, dest):
                raise ValueError(f"{args.config}:{lineno}: unknown option {key.strip()!r}")
            setattr(args, dest, _COERCERS[dest](value.strip()))


def _cmd_run(args: argparse.Namespace) -> int:
    config = SimConfig(
        scenario=args.scenario,
        noise=NoiseParams(gamma=args.gamma, tau=args.tau),
        policy=PolicyKind.from_name(args.policy),
        lambda_e=args.lambda_e,
        lambda_r=args.lambda_r,
        batch_size=args.batch_size,
        buffer_size=args.buffer,
        seed=args.seed,
        horizon_departures=args.horizon,
        horizon_time=args.horizon_time,
        warmup=args.warmup,
    )
    metrics = run(config)
    summary = {
        "scenario": args.scenario,
        "policy": args.policy,
        "seed": args.seed,
        "arrivals": metrics.arrivals_count,
        "departures": metrics.departures_count,
        "pushouts": metrics.pushout_count,
        "residual": metrics.residual_count,
        "mean_fidelity": metrics.mean_fidelity if metrics.fidelity_samples else None,
        "drop_rate": metrics.drop_rate,
    }
    if config.scenario != "single_batch":
        summary["load"] = load(config)
    print(json.dumps(summary, indent=2))
    if args.out:
        with open(args.out, "w") as fh:
            fh.write("time,fidelity,error\n")
            for t, f, e in zip(
                metrics.departure_times,
                metrics.fidelity_samples,
                metrics.realized_error_indicators,
            ):
                fh.write(f"{t!r},{f!r},{int(e)}\n")
        print(f"wrote {len(metrics.fidelity_samples)} samples to {args.out}")
    return 0


def _write_outputs(result: ExperimentResult, out: str | None) -> None:
    out = out or f"qsched_{result.name}.csv"
    write_rows_csv(out, result.rows)
    print(f"wrote {len(result.rows)} rows to {out}")
    stem = out[:-4] if out.endswith(".csv") else out
    if result.gap_rows:
        write_gaps_csv(f"{stem}_gaps.csv", result.gap_rows)
        print(f"wrote {len(result.gap_rows)} gap rows to {stem}_gaps.csv")
    if result.cdf:
        write_cdf_csv(f"{stem}_cdf.csv", result)
        print(f"wrote CDF table to {stem}_cdf.csv")
    write_manifest(f"{out}.manifest.json", result)
    print(f"wrote manifest to {out}.manifest.json")


def _print_rows(result: ExperimentResult) -> None:
    for row in result.rows:
        coord = f"b={row.batch_size} lambda_e={row.lambda_e:g}"
        if row.load is not None:
            coord += f" load={row.load:g}"
        print(
            f"  {row.figure} {coord} {row.policy}: "
            f"mean={row.mean_fidelity:.5f} +-{row.ci95:.5f} drop_rate={row.drop_rate:.4f}"
        )
    for gap in result.gap_rows:
        coord = f"b={gap.batch_size} lambda_e={gap.lambda_e:g}"
        if gap.load is not None:
            coord += f" load={gap.load:g}"
        print(f"  gap({gap.policy_a}-{gap.policy_b}) {coord}: {gap.mean_gap:.5f} +-{gap.ci95:.5f}")


def _plot_result(result: ExperimentResult, path: str) -> None:
    try:
        import matplotlib
    except ImportError as exc:
        raise ValueError("plotting requires matplotlib (install extra 'plot')") from exc
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    if result.name == "fig2":
        for policy, (values, probs) in result.cdf.items():
            ax.step(values, probs, where="post", label=policy)
        ax.set_xlabel("teleportation fidelity")
        ax.set_ylabel("CDF")
    else:
        x_field = "batch_size" if result.name == "fig1" else "load"
        series: dict[tuple, list[tuple[float, float]]] = {}
        for row in result.rows:
            key = (row.policy, row.lambda_e, row.buffer_size)
            series.setdefault(key, []).append((getattr(row, x_field), row.mean_fidelity))
        for (policy, lam_e, buf), points in sorted(series.items(), key=str):
            points.sort()
            label = f"{policy} lambda_e={lam_e:g}" + (f" B={buf}" if buf else "")
            ax.plot(*zip(*points), marker="o", label=label)
        ax.set_xlabel(x_field.replace("_", " "))
        ax.set_ylabel("mean teleportation fidelity")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    print(f"wrote plot to {path}")


def _cmd_fig(args: argparse.Namespace, name: str) -> int:
    spec = ExperimentSpec(
        name=name,
        batch_sizes=tuple(getattr(args, "batch_sizes", ()) or ()),
        loads=tuple(getattr(args, "loads", ()) or ()),
        rates=tuple(getattr(args, "rates", ()) or ()),
        tau=args.tau,
        gamma=args.gamma,
        lambda_r=getattr(args, "lambda_r", None),
        lambda_e=getattr(args, "lambda_e", None),
        horizon=getattr(args, "horizon", None),
        warmup=getattr(args, "warmup", None),
        replications=args.replications,
        seed=args.seed,
    )
    result = run_experiment(spec)
    _print_rows(result)
    _write_outputs(result, args.out)
    if getattr(args, "plot", None):
        _plot_result(result, args.plot)
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    opt = verify_fqf_optimality(
        n_instances=args.instances,
        seed=args.seed,
        k_max=args.max_qubits,
        max_rounds=args.max_rounds,
        p_range=(args.p_min, args.p_max),
    )
    status = "PASS" if opt.passed else "FAIL"
    print(
        f"batch-optimality: {status} ({opt.instances} instances, "
        f"worst shortfall {opt.worst_shortfall:.3e}, tolerance {opt.tolerance:.1e})"
    )
    n_steps = int(round((0.49 - 0.01) / args.grid_step)) + 1
    p_values = [0.01 + args.grid_step * i for i in range(n_steps) if 0.01 + args.grid_step * i < 0.5]
    sweep = sweep_interchange(max_count=args.grid_max, p_values=p_values)
    s_status = "PASS" if sweep.passed else "FAIL"
    print(
        f"interchange inequality: {s_status} ({sweep.cases} cases, "
        f"min gap {sweep.min_gap:.3e}, worst raw-vs-factored mismatch {sweep.max_mismatch:.3e})"
    )
    return 0 if opt.passed and sweep.passed else 1


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config_file(args)
        if args.command == "run":
            return _cmd_run(args)
        if args.command in ("fig1", "fig2", "fig3"):
            return _cmd_fig(args, args.command)
        if args.command == "verify-theorem":
            return _cmd_verify(args)
        raise ValueError(f"unknown command {args.command!r}")
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
