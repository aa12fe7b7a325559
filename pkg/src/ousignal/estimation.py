"""Recovery of the transmitted signal from observed samples.

The estimator averages the observations and applies the inverse propagator;
by linearity this equals averaging the individually inverted samples, and by
the strong law of large numbers the result converges to the input signal in
sup norm as the sample size grows (at the usual 1/sqrt(n) Monte Carlo rate,
since the only randomness is the constant-mode offset).
"""

from __future__ import annotations

import math
import warnings
from collections import deque
from dataclasses import dataclass, replace

import numpy as np

from .fourier import (
    DEFAULT_PROBE_POINTS,
    FourierSignal,
    GridSignal,
    extract_coefficients,
    sup_distance,
)
from .model import SampleSet, ScenarioConfig, sample_batch
from .spectral import AMPLIFICATION_CAP, OperatorSpec, inverse_propagate, mode_spectrum


@dataclass(frozen=True)
class EstimateReport:
    """Recovered signal plus error metrics against the known input."""

    estimate: FourierSignal
    sup_error: float
    c0_error: float
    max_mode_error: float
    n_used: int
    amplification_max: float


def _cap_unrecoverable_modes(mean_signal: FourierSignal, op: OperatorSpec, t0: float,
                             amplification_cap: float) -> tuple[FourierSignal, float]:
    """Zero out modes whose inverse factor exceeds the cap; report the max applied."""
    spectrum = mode_spectrum(op, mean_signal.mode_count, mean_signal.half_period)
    factors_log = -spectrum.sigma * t0
    log_cap = math.log(amplification_cap)
    over = factors_log > log_cap
    c = mean_signal.c
    d = mean_signal.d
    if np.any(over & ((c != 0.0) | (d != 0.0))):
        dropped = (np.nonzero(over)[0] + 1).tolist()
        warnings.warn(
            f"zeroing unrecoverable modes {dropped}: inverse amplification exceeds "
            f"{amplification_cap:g}", stacklevel=3
        )
        c = np.where(over, 0.0, c)
        d = np.where(over, 0.0, d)
        mean_signal = FourierSignal(mean_signal.half_period, mean_signal.c0, c, d)
    applied = factors_log[~over]
    worst = max(float(np.max(applied)) if applied.size else -math.inf, -op.a0 * t0)
    return mean_signal, math.exp(worst)


def _estimate_with_info(samples: SampleSet, op: OperatorSpec, t0: float,
                        mode_count: int, amplification_cap: float):
    mean = samples.mean_signal()
    if isinstance(mean, GridSignal):
        mean = extract_coefficients(mean, mode_count)
    else:
        mean = mean.padded(mode_count)
    mean, amplification_max = _cap_unrecoverable_modes(mean, op, t0, amplification_cap)
    estimate = inverse_propagate(mean, op, t0, amplification_cap=amplification_cap)
    return estimate, amplification_max


def estimate_signal(samples: SampleSet, op: OperatorSpec, t0: float,
                    mode_count: int | None = None,
                    amplification_cap: float = AMPLIFICATION_CAP) -> FourierSignal:
    """Average the samples and invert the channel.

    Grid samples are averaged pointwise and converted to coefficients by
    quadrature first. Modes damped so strongly that inverting them would
    amplify beyond the cap are zeroed (with a warning) instead of exploding
    quadrature roundoff into the estimate.
    """
    if samples.n < 1:
        raise ValueError("need at least one sample")
    if mode_count is None:
        mode_count = samples.config.mode_count
    return _estimate_with_info(samples, op, t0, mode_count, amplification_cap)[0]


def error_report(estimate: FourierSignal, truth: FourierSignal,
                 probe_points: int = DEFAULT_PROBE_POINTS, n_used: int = 1,
                 amplification_max: float = float("nan")) -> EstimateReport:
    """Error metrics of an estimate against the known input signal."""
    if estimate.half_period != truth.half_period:
        raise ValueError("half_period mismatch between estimate and truth")
    if estimate.mode_count != truth.mode_count:
        raise ValueError("mode count mismatch between estimate and truth")
    sup_error = sup_distance(estimate, truth, probe_points)
    c0_error = estimate.c0 - truth.c0
    if estimate.mode_count:
        max_mode_error = float(np.max(np.hypot(estimate.c - truth.c, estimate.d - truth.d)))
    else:
        max_mode_error = 0.0
    return EstimateReport(estimate, sup_error, c0_error, max_mode_error, n_used,
                          amplification_max)


def run_estimate(samples: SampleSet, truth: FourierSignal | None = None,
                 probe_points: int = DEFAULT_PROBE_POINTS,
                 amplification_cap: float = AMPLIFICATION_CAP) -> EstimateReport:
    """Estimate from a sample set and score it against the scenario's input."""
    config = samples.config
    if truth is None:
        truth = config.theta
    estimate, amplification_max = _estimate_with_info(samples, config.op, config.t0,
                                                      config.mode_count, amplification_cap)
    return error_report(estimate, truth.padded(config.mode_count), probe_points,
                        n_used=samples.n, amplification_max=amplification_max)


def estimate_until_stable(stream, op: OperatorSpec, t0: float, mode_count: int,
                          epsilon: float, window: int = 4, n_max: int = 10000,
                          probe_points: int = DEFAULT_PROBE_POINTS):
    """Running estimate with a Cauchy stopping rule.

    Consumes samples from the stream, maintains the running mean, and stops
    once all consecutive sup-norm gaps inside a window of `window` successive
    estimates fall strictly below epsilon. Returns (estimate, n_used,
    converged); exhausting n_max is reported via converged=False, never by
    fabricating a value.
    """
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    if window < 2:
        raise ValueError("window must be >= 2")
    mean_values = None
    estimate = None
    gaps: deque[float] = deque(maxlen=window - 1)
    n_used = 0
    for z in stream:
        n_used += 1
        values = z.values if isinstance(z, GridSignal) else None
        if values is None:
            values = np.concatenate([[z.c0], z.c, z.d])
        if mean_values is None:
            mean_values = values.astype(float).copy()
            half_period = z.half_period
            is_grid = isinstance(z, GridSignal)
        else:
            mean_values += (values - mean_values) / n_used
        if is_grid:
            mean = extract_coefficients(GridSignal(half_period, mean_values), mode_count)
        else:
            k = (mean_values.size - 1) // 2
            mean = FourierSignal(half_period, mean_values[0],
                                 mean_values[1: k + 1], mean_values[k + 1:]).padded(mode_count)
        previous = estimate
        estimate = inverse_propagate(mean, op, t0)
        if previous is not None:
            gaps.append(sup_distance(estimate, previous, probe_points))
        if len(gaps) == window - 1 and all(g < epsilon for g in gaps):
            return estimate, n_used, True
        if n_used >= n_max:
            return estimate, n_used, False
    return estimate, n_used, False


@dataclass(frozen=True)
class ConvergenceStudy:
    """Per-trial errors, per-n summaries, and the fitted error-decay slope."""

    rows: list[tuple[int, int, float, float, float]]
    summary: list[tuple[int, float, float]]
    slope: float | None


def convergence_study(config: ScenarioConfig, n_grid, trials: int) -> ConvergenceStudy:
    """Repeat the estimation for each sample size and fit the error decay.

    Trial (n, t) draws its samples from streams keyed on (seed, n, t, i), so
    runs are reproducible and trials are independent; with quasi drivers each
    trial gets a disjoint block of streams. The slope is the least-squares
    fit of log(mean sup error) against log(n), left undefined when the
    errors sit at roundoff level (noiseless channel).
    """
    n_grid = [int(n) for n in n_grid]
    if n_grid != sorted(n_grid) or len(set(n_grid)) != len(n_grid):
        raise ValueError("n_grid must be strictly ascending")
    if not n_grid or min(n_grid) < 1:
        raise ValueError("n_grid must hold positive sample sizes")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rows = []
    summary = []
    quasi_shift = 0
    for n in n_grid:
        errors = []
        for trial in range(trials):
            cfg = replace(config, n=n)
            batch = sample_batch(cfg, subkey=(n, trial), quasi_shift=quasi_shift)
            quasi_shift += n
            report = run_estimate(batch)
            rows.append((n, trial, report.sup_error, report.c0_error, report.max_mode_error))
            errors.append(report.sup_error)
        errors = np.array(errors)
        sd = float(errors.std(ddof=1)) if trials > 1 else 0.0
        summary.append((n, float(errors.mean()), sd))
    means = np.array([m for _, m, _ in summary])
    if len(n_grid) >= 2 and np.all(means > 1e-12):
        slope = float(np.polyfit(np.log(np.array(n_grid, dtype=float)), np.log(means), 1)[0])
    else:
        slope = None
    return ConvergenceStudy(rows, summary, slope)
