"""Command-line harness: spectrum | evolve | sample | estimate | verify | convergence.

Each command reads a scenario config (file path or preset name), writes CSV
outputs plus a replayable manifest into --out, and uses documented exit codes:
0 success, 2 config or input error, 3 numeric instability, 4 convergence not
reached.
"""

from __future__ import annotations

import argparse
import math
import secrets
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import csvio
from .config import ESTIMATOR_INFINITE, RunConfig, load_config, parse_number
from .errors import AmplificationError, ConfigError, GrowthOverflowError, KLDomainError
from .estimation import convergence_study, error_report, estimate_until_stable, run_estimate
from .manifest import RunManifest, atomic_write_text, fmt, write_csv
from .model import evolve_frames, sample_batch, sample_source, sample_stream
from .noise import noise_covariance, noise_variance, ou_integral_exact, ou_joint_pairs
from .spectral import mode_spectrum

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_NO_CONVERGENCE = 4

_REPORT_HEADER = ["sigma", "n_used", "converged", "sup_error", "c0_error",
                  "max_mode_error", "amplification_max"]


def _parse_times(spec: str) -> list[float]:
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise ConfigError(f"times range must be start:stop:count, got {spec!r}")
        start, stop = parse_number(parts[0]), parse_number(parts[1])
        count = int(parts[2])
        if count < 1:
            raise ConfigError("times count must be >= 1")
        return list(np.linspace(start, stop, count))
    return [parse_number(tok) for tok in spec.split(",")]


def _resolve(args) -> tuple[RunConfig, int | None]:
    """Load the config and settle the effective seed (flag > file > entropy)."""
    run = load_config(args.config)
    scenario = run.scenario
    if getattr(args, "quasi", False):
        scenario = replace(scenario, quasi=True)
    seed = scenario.seed
    if getattr(args, "seed", None) is not None:
        seed = args.seed
    if seed is None and not scenario.quasi:
        seed = secrets.randbits(63)
    scenario = replace(scenario, seed=seed)
    if getattr(args, "n", None) is not None:
        if args.n < 1:
            raise ConfigError("--n must be >= 1")
        scenario = replace(scenario, n=args.n)
    return replace(run, scenario=scenario), seed


def _finish(args, run: RunConfig, command: str, outputs: list[Path], started: float,
            extra: dict | None = None) -> None:
    out_dir = Path(args.out)
    manifest = RunManifest(
        command=command,
        config_text=run.text,
        args={k: v for k, v in vars(args).items() if k not in ("func", "config", "out")},
        seed=run.scenario.seed if not run.scenario.quasi else None,
        scenario=run.scenario.to_dict(),
        outputs=[p.name for p in outputs],
        duration_seconds=time.monotonic() - started,
        extra=extra or {},
    )
    manifest.args["seed"] = run.scenario.seed
    manifest.save(out_dir / f"{command}.manifest.json")


def cmd_spectrum(args) -> int:
    started = time.monotonic()
    run, _ = _resolve(args)
    sc = run.scenario
    spectrum = mode_spectrum(sc.op, sc.mode_count, sc.theta.half_period)
    out = Path(args.out) / "spectrum.csv"
    csvio.write_spectrum_csv(spectrum, out)
    _finish(args, run, "spectrum", [out], started)
    return EXIT_OK


def cmd_evolve(args) -> int:
    started = time.monotonic()
    run, _ = _resolve(args)
    sc = run.scenario
    times = _parse_times(args.times) if args.times else list(np.linspace(0.0, sc.t0, 64))
    frames = evolve_frames(sc, times, noise=args.noise)
    out = Path(args.out) / "frames.csv"
    csvio.write_frames_csv(frames, out)
    _finish(args, run, "evolve", [out], started)
    return EXIT_OK


def cmd_sample(args) -> int:
    started = time.monotonic()
    run, _ = _resolve(args)
    batch = sample_batch(run.scenario)
    out = Path(args.out) / "samples.csv"
    csvio.write_samples_csv(batch, out)
    _finish(args, run, "sample", [out], started)
    return EXIT_OK


def _single_estimate(run: RunConfig, samples_path: str | None):
    sc = run.scenario
    if samples_path is not None:
        batch = csvio.read_samples_csv(samples_path, sc)
    else:
        batch = sample_batch(sc)
    return run_estimate(batch)


def cmd_estimate(args) -> int:
    started = time.monotonic()
    run, _ = _resolve(args)
    out_dir = Path(args.out)
    outputs: list[Path] = []
    rows = []
    exit_code = EXIT_OK
    extra: dict = {}

    if run.estimator == ESTIMATOR_INFINITE:
        sc = run.scenario
        stream = sample_stream(sc)
        estimate, n_used, converged = estimate_until_stable(
            stream, sc.op, sc.t0, sc.mode_count, epsilon=run.epsilon,
            window=run.window, n_max=run.n_max)
        report = error_report(estimate, sc.theta, n_used=n_used)
        est_path = out_dir / "estimate.csv"
        csvio.write_fourier_csv(estimate, est_path)
        outputs.append(est_path)
        rows.append((sc.noise.sigma, n_used, converged, report.sup_error,
                     report.c0_error, report.max_mode_error, report.amplification_max))
        extra = {"converged": converged, "epsilon": run.epsilon, "window": run.window,
                 "n_max": run.n_max}
        if not converged:
            print(f"no convergence after {n_used} samples (epsilon={run.epsilon:g})",
                  file=sys.stderr)
            exit_code = EXIT_NO_CONVERGENCE
    elif run.sigma_grid and args.samples is None:
        for sigma in run.sigma_grid:
            sweep = replace(run, scenario=run.scenario.with_sigma(sigma))
            report = _single_estimate(sweep, None)
            est_path = out_dir / f"estimate_sigma{sigma:g}.csv"
            csvio.write_fourier_csv(report.estimate, est_path)
            outputs.append(est_path)
            rows.append((sigma, report.n_used, True, report.sup_error, report.c0_error,
                         report.max_mode_error, report.amplification_max))
    else:
        report = _single_estimate(run, args.samples)
        est_path = out_dir / "estimate.csv"
        csvio.write_fourier_csv(report.estimate, est_path)
        outputs.append(est_path)
        rows.append((run.scenario.noise.sigma, report.n_used, True, report.sup_error,
                     report.c0_error, report.max_mode_error, report.amplification_max))

    report_path = out_dir / "estimate_report.csv"
    write_csv(report_path, _REPORT_HEADER, rows)
    outputs.append(report_path)
    _finish(args, run, "estimate", outputs, started, extra=extra)
    return exit_code


def cmd_verify(args) -> int:
    """Monte Carlo check of the analytic noise moments (3 standard errors)."""
    started = time.monotonic()
    run, _ = _resolve(args)
    sc = run.scenario
    draws = args.n if args.n is not None else 100000
    rows = []

    rng = sample_source(sc, 0, subkey=(0,))
    values = np.array([ou_integral_exact(sc.noise, sc.t0, rng) for _ in range(draws)])
    analytic = noise_variance(sc.noise, sc.t0)
    empirical = float(values.var(ddof=1))
    se = analytic * math.sqrt(2.0 / (draws - 1))
    rows.append(_check_row("variance", sc.t0, sc.t0, analytic, empirical, se))

    fractions = [(0.25, 0.5), (0.25, 1.0), (0.5, 0.75), (0.5, 1.0), (0.75, 1.0)]
    for i, (fs, ft) in enumerate(fractions):
        s, t = fs * sc.t0, ft * sc.t0
        pair_rng = sample_source(sc, i, subkey=(1,))
        early, late = ou_joint_pairs(sc.noise, s, t, draws, pair_rng)
        analytic = noise_covariance(sc.noise, s, t)
        empirical = float(np.mean((early - early.mean()) * (late - late.mean()))
                          * draws / (draws - 1))
        spread = noise_variance(sc.noise, s) * noise_variance(sc.noise, t) + analytic**2
        se = math.sqrt(spread / (draws - 1))
        rows.append(_check_row("covariance", s, t, analytic, empirical, se))

    out = Path(args.out) / "verify.csv"
    write_csv(out, ["check", "s", "t", "analytic", "empirical", "se", "z", "passed"], rows)
    _finish(args, run, "verify", [out], started,
            extra={"draws": draws, "all_passed": all(r[-1] for r in rows)})
    return EXIT_OK if all(r[-1] for r in rows) else EXIT_NUMERIC


def _check_row(name, s, t, analytic, empirical, se):
    diff = empirical - analytic
    z = 0.0 if (se == 0.0 and diff == 0.0) else (math.inf if se == 0.0 else diff / se)
    return (name, s, t, analytic, empirical, se, z, abs(z) <= 3.0)


def cmd_convergence(args) -> int:
    started = time.monotonic()
    run, _ = _resolve(args)
    try:
        n_grid = [int(tok) for tok in args.n_grid.split(",")]
    except ValueError as exc:
        raise ConfigError(f"bad --n-grid: {exc}") from exc
    study = convergence_study(run.scenario, n_grid, args.trials)
    out_dir = Path(args.out)
    experiment = out_dir / "experiment.csv"
    write_csv(experiment, ["n", "trial", "sup_error", "c0_error", "max_mode_error"], study.rows)
    summary = out_dir / "summary.csv"
    slope_repr = fmt(study.slope) if study.slope is not None else "undefined"
    write_csv(summary, ["n", "mean_error", "sd_error"], study.summary,
              trailer=f"# slope={slope_repr}")
    _finish(args, run, "convergence", [experiment, summary], started,
            extra={"slope": study.slope, "trials": args.trials, "n_grid": n_grid})
    return EXIT_OK


def replay_manifest(manifest_path, out_dir) -> int:
    """Re-run a recorded command with its saved config and arguments."""
    manifest = RunManifest.load(manifest_path)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    cfg_path = out_dir / "replayed.cfg"
    atomic_write_text(cfg_path, manifest.config_text)
    argv = [manifest.command, "--config", str(cfg_path), "--out", str(out_dir)]
    flags = {"seed": "--seed", "n": "--n", "times": "--times", "noise": "--noise",
             "trials": "--trials", "n_grid": "--n-grid", "samples": "--samples"}
    for key, flag in flags.items():
        value = manifest.args.get(key)
        if value is not None:
            argv += [flag, str(value)]
    if manifest.args.get("quasi"):
        argv.append("--quasi")
    return main(argv)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ousignal",
        description="Simulate a stochastically perturbed spectral transmission channel "
                    "and recover the transmitted signal.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True,
                       help="config file path or preset name (ex41, ex42, ex43)")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--seed", type=int, default=None, help="pseudo-random seed override")
        p.add_argument("--quasi", action="store_true",
                       help="drive sampling with the deterministic quasi-random sequence")

    p = sub.add_parser("spectrum", help="emit per-mode rates sigma_k, omega_k")
    common(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("evolve", help="emit frames of the evolving signal")
    common(p)
    p.add_argument("--times", default=None,
                   help="start:stop:count or comma list (pi tokens allowed)")
    p.add_argument("--noise", choices=["none", "path", "iid"], default="none")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("sample", help="draw observed transformed signals")
    common(p)
    p.add_argument("--n", type=int, default=None, help="sample count override")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("estimate", help="recover the input signal from samples")
    common(p)
    p.add_argument("--n", type=int, default=None, help="sample count override")
    p.add_argument("--samples", default=None, help="existing samples CSV to estimate from")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("verify", help="Monte Carlo check of the analytic noise moments")
    common(p)
    p.add_argument("--n", type=int, default=None, help="number of draws (default 100000)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("convergence", help="error decay study over sample sizes")
    common(p)
    p.add_argument("--n-grid", default="100,1000,10000",
                   help="comma list of sample sizes, ascending")
    p.add_argument("--trials", type=int, default=50)
    p.set_defaults(func=cmd_convergence)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    Path(args.out).mkdir(parents=True, exist_ok=True)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (GrowthOverflowError, AmplificationError, KLDomainError) as exc:
        print(f"numeric instability: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
