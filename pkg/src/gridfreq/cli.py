"""Command-line front end: synthesis, estimation, metrics, sweeps, tuning
and benchmarking.

Exit codes: 0 success, 2 input error, 3 divergence, 4 metric-bound failure.
"""

from __future__ import annotations

import argparse
import statistics
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import io as gio
from .errors import GridFreqError
from .estimator import EstimatorConfig, init, run, step
from .metrics import MetricsReport, aggregate, evaluate
from .synth import ScenarioSpec, synthesize
from .tuner import PsoParams, SearchSpace, pso_minimize, pso_tune

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_DIVERGED = 3
EXIT_BOUNDS = 4


def _load_config(path: str | None) -> EstimatorConfig:
    if path is None:
        return EstimatorConfig()
    return gio.read_config(path)


def _print_report(report: MetricsReport, label: str = "") -> None:
    if label:
        print(f"# {label}")
    for name, value in report.rows():
        print(f"{name:>16}: {value:.6g}")
    print(f"{'latency (s)':>16}: {report.latency_s:g}")
    print(f"{'pairs':>16}: {report.n_samples}")
    if report.recon_error is not None:
        print(f"{'recon error':>16}: {report.recon_error:.6g}")


def _check_bounds(report: MetricsReport, args: argparse.Namespace) -> bool:
    ok = True
    for attr, flag in (("max_fe", "max_fe"), ("rmse_fe", "rmse_fe"),
                       ("max_re", "max_re"), ("rmse_re", "rmse_re")):
        bound = getattr(args, flag)
        if bound is not None and getattr(report, attr) > bound:
            print(f"BOUND FAIL: {attr} = {getattr(report, attr):.6g} > {bound:g}")
            ok = False
    return ok


# --------------------------------------------------------------------------
# Subcommands
# --------------------------------------------------------------------------

def cmd_synth(args: argparse.Namespace) -> int:
    spec = gio.read_scenario(args.scenario)
    stream, truth = synthesize(spec, args.fs, seed=args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = Path(args.scenario).stem
    gio.write_samples(out / f"{stem}_samples.csv", stream)
    gio.write_truth(out / f"{stem}_truth.csv", truth)
    print(f"wrote {out / f'{stem}_samples.csv'} ({len(stream)} rows)")
    print(f"wrote {out / f'{stem}_truth.csv'} ({len(truth)} rows)")
    return EXIT_OK


def cmd_estimate(args: argparse.Namespace) -> int:
    stream = gio.read_samples(args.samples)
    config = _load_config(args.config)
    if args.report_every is not None:
        config = replace(config, report_every=args.report_every)
    if args.n is not None:
        config = replace(config, n=args.n, gamma_c=(), gamma_s=())
    series = run(stream, config)
    gio.write_estimates(args.out, series)
    print(f"wrote {args.out} ({len(series)} records)")
    if series.diverged_at is not None:
        print(f"DIVERGED at sample {series.diverged_at} "
              f"(t = {series.diverged_at * config.ts:.4f} s)")
        return EXIT_DIVERGED
    return EXIT_OK


def cmd_metrics(args: argparse.Namespace) -> int:
    latency = args.latency_ms / 1000.0
    config = _load_config(args.config)
    if args.scenario is not None:
        # Monte-Carlo mode: synthesize/run/evaluate over a seed ensemble
        spec = gio.read_scenario(args.scenario)
        reports = []
        diverged = 0
        for seed in range(args.seeds):
            stream, truth = synthesize(spec, args.fs, seed=seed)
            series = run(stream, config)
            if series.diverged_at is not None:
                diverged += 1
                continue
            reports.append(evaluate(series, truth, latency, skip_s=args.skip))
        if diverged:
            print(f"{diverged}/{args.seeds} runs diverged")
            return EXIT_DIVERGED
        mean, worst = aggregate(reports)
        _print_report(mean, f"mean over {args.seeds} seeds")
        _print_report(worst, "worst case")
        report = mean
    else:
        if args.est is None or args.truth is None:
            print("metrics: need either --scenario or both --est and --truth",
                  file=sys.stderr)
            return EXIT_INPUT
        series = gio.read_estimates(args.est)
        truth = gio.read_truth(args.truth)
        report = evaluate(series, truth, latency, skip_s=args.skip)
        _print_report(report)
    if args.out is not None:
        with open(args.out, "w") as fh:
            fh.write("metric,value\n")
            for name, value in report.rows():
                fh.write(f"{name},{value!r}\n")
    if not _check_bounds(report, args):
        return EXIT_BOUNDS
    return EXIT_OK


def cmd_sweep_eta(args: argparse.Namespace) -> int:
    spec = gio.read_scenario(args.scenario)
    base = _load_config(args.config)
    latency = args.latency_ms / 1000.0
    print("ratio,rmse_fe,rmse_re")
    rows = []
    for ratio in args.ratios:
        if ratio < 1.0:
            print(f"sweep-eta: ratio {ratio} < 1", file=sys.stderr)
            return EXIT_INPUT
        # the sweep pins the rate at ratio * eta_opt; the self-tuning band
        # is collapsed so the swept value is actually used
        cfg = replace(base, eta_opt=base.eta_opt * ratio, eta_band=0.0)
        stream, truth = synthesize(spec, args.fs, seed=args.seed)
        series = run(stream, cfg)
        if series.diverged_at is not None:
            print(f"{ratio},DIVERGED,DIVERGED")
            return EXIT_DIVERGED
        rep = evaluate(series, truth, latency, skip_s=args.skip)
        rows.append((ratio, rep.rmse_fe, rep.rmse_re))
        print(f"{ratio},{rep.rmse_fe!r},{rep.rmse_re!r}")
    if args.out is not None:
        with open(args.out, "w") as fh:
            fh.write("ratio,rmse_fe,rmse_re\n")
            for ratio, fe, re in rows:
                fh.write(f"{ratio},{fe!r},{re!r}\n")
    return EXIT_OK


def cmd_tune(args: argparse.Namespace) -> int:
    pso = PsoParams(swarm_size=args.swarm, iterations=args.iterations,
                    seed=args.seed)
    if args.sphere_test:
        space = SearchSpace(bounds=((-5.0, 5.0),) * args.sphere_dims)
        result = pso_minimize(lambda x: float(np.sum(x * x)), space, pso)
        print(f"sphere best score: {result.best_score:.3e}")
        return EXIT_OK if result.best_score < 1e-3 else EXIT_BOUNDS
    config = _load_config(args.config)
    scenarios = []
    for path in args.scenario:
        spec = gio.read_scenario(path)
        scenarios.append(synthesize(spec, args.fs, seed=args.seed))
    dims = 2 * config.n + 2 + (1 if args.tune_eta else 0)
    lo, hi = args.gain_lo, args.gain_hi
    bounds = [(lo, hi)] * (2 * config.n + 2)
    if args.tune_eta:
        bounds.append((args.eta_lo, args.eta_hi))
    space = SearchSpace(bounds=tuple(bounds), log_scale=(True,) * dims)
    best, score, history = pso_tune(space, scenarios, pso, config)
    tuned = config
    tuned = replace(tuned,
                    gamma_c=tuple(best[:config.n]),
                    gamma_s=tuple(best[config.n:2 * config.n]),
                    gamma_dc=float(best[2 * config.n]),
                    gamma_dc1=float(best[2 * config.n + 1]))
    if args.tune_eta:
        tuned = replace(tuned, eta_opt=float(best[-1]))
    gio.write_config(args.out, tuned)
    print(f"wrote {args.out} (fitness {score:.6g})")
    if args.history is not None:
        gio.write_history(args.history, history)
        print(f"wrote {args.history}")
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    config = EstimatorConfig() if args.config is None else gio.read_config(args.config)
    if args.n is not None:
        config = replace(config, n=args.n, gamma_c=(), gamma_s=())
    spec = ScenarioSpec(duration=1.0, base_freq=config.f0)
    stream, _ = synthesize(spec, 1.0 / config.ts, seed=0)
    samples = np.tile(stream.values, args.steps // len(stream) + 1)[:args.steps]
    state = init(config)
    # chunked timing: per-call clock reads would dominate at ~µs step cost
    chunk = 10_000
    times = []
    done = 0
    while done < args.steps:
        hi = min(done + chunk, args.steps)
        t0 = time.perf_counter()
        for k in range(done, hi):
            step(state, float(samples[k]), config)
        dt = time.perf_counter() - t0
        times.append(dt / (hi - done))
        done = hi
        if state.diverged:
            print("bench stream diverged (unexpected)")
            return EXIT_DIVERGED
    mean_us = statistics.fmean(times) * 1e6
    med_us = statistics.median(times) * 1e6
    p99_us = float(np.percentile(times, 99)) * 1e6
    print(f"steps: {args.steps}")
    print(f"mean step time: {mean_us:.2f} us")
    print(f"median step time (per-chunk): {med_us:.2f} us")
    print(f"p99 step time (per-chunk): {p99_us:.2f} us")
    return EXIT_OK


# --------------------------------------------------------------------------
# Parser
# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="gridfreq",
        description="Streaming grid frequency / RoCoF estimation toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="render a scenario to sample + truth CSVs")
    p.add_argument("scenario")
    p.add_argument("--fs", type=float, default=1200.0)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("estimate", help="run the estimator over a sample CSV")
    p.add_argument("samples")
    p.add_argument("--config", default=None)
    p.add_argument("--out", default="estimates.csv")
    p.add_argument("--report-every", type=int, default=None)
    p.add_argument("--n", type=int, default=None)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("metrics", help="latency-aligned FE/RE report")
    p.add_argument("--est", default=None)
    p.add_argument("--truth", default=None)
    p.add_argument("--scenario", default=None,
                   help="Monte-Carlo mode: synthesize and run per seed")
    p.add_argument("--config", default=None)
    p.add_argument("--seeds", type=int, default=20)
    p.add_argument("--fs", type=float, default=1200.0)
    p.add_argument("--latency-ms", type=float, default=100.0)
    p.add_argument("--skip", type=float, default=0.5,
                   help="transient exclusion window (s)")
    p.add_argument("--out", default=None)
    for flag in ("--max-fe", "--rmse-fe", "--max-re", "--rmse-re"):
        p.add_argument(flag, type=float, default=None,
                       help="optional bound; exceeding it exits 4")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("sweep-eta", help="RMSE table over eta/eta_opt ratios")
    p.add_argument("scenario")
    p.add_argument("--config", default=None)
    p.add_argument("--ratios", type=float, nargs="+",
                   default=[1.0, 1.02, 1.04, 1.06])
    p.add_argument("--fs", type=float, default=1200.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--latency-ms", type=float, default=100.0)
    p.add_argument("--skip", type=float, default=0.5)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_sweep_eta)

    p = sub.add_parser("tune", help="PSO gain tuning over a scenario battery")
    p.add_argument("--scenario", action="append", default=[])
    p.add_argument("--config", default=None)
    p.add_argument("--out", default="tuned.cfg")
    p.add_argument("--history", default=None)
    p.add_argument("--fs", type=float, default=1200.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--swarm", type=int, default=30)
    p.add_argument("--iterations", type=int, default=50)
    p.add_argument("--gain-lo", type=float, default=1.0)
    p.add_argument("--gain-hi", type=float, default=500.0)
    p.add_argument("--tune-eta", action="store_true")
    p.add_argument("--eta-lo", type=float, default=100.0)
    p.add_argument("--eta-hi", type=float, default=10000.0)
    p.add_argument("--sphere-test", action="store_true",
                   help="optimizer self-test on the sphere function")
    p.add_argument("--sphere-dims", type=int, default=4)
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("bench", help="per-step throughput measurement")
    p.add_argument("--config", default=None)
    p.add_argument("--steps", type=int, default=1_000_000)
    p.add_argument("--n", type=int, default=None)
    p.set_defaults(func=cmd_bench)

    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (GridFreqError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
