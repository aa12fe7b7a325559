"""The transmission channel: propagate a signal and observe it under scalar noise.

Every observed sample is the deterministically propagated input plus a single
scalar noise draw times the constant-one function, so the randomness lives
entirely in the constant mode. Samples are reproducible: sample i is driven by
its own stream derived from (seed, ..., i) in pseudo mode or by quasi stream
base + i, which also makes parallel generation order-independent.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .fourier import FourierSignal, GridSignal
from .noise import (
    NoiseParams,
    RandomSource,
    ou_integral_exact,
    ou_integral_series,
)
from .spectral import OperatorSpec, propagate

OBSERVE_GRID = "grid"
OBSERVE_FOURIER = "fourier"
SAMPLER_EXACT = "exact"
SAMPLER_SERIES = "series"

NOISE_NONE = "none"
NOISE_PATH = "path"
NOISE_IID = "iid"


@dataclass(frozen=True)
class ScenarioConfig:
    """Fully resolved description of one simulation/estimation scenario."""

    theta: FourierSignal
    op: OperatorSpec
    noise: NoiseParams
    t0: float
    n: int
    mode_count: int = 20
    grid_points: int = 200
    seed: int | None = 0
    quasi: bool = False
    quasi_base: int = 1
    observation_form: str = OBSERVE_GRID
    sampler: str = SAMPLER_EXACT
    series_variant: str = "variance_matched"

    def __post_init__(self):
        if not self.t0 > 0:
            raise ValueError("observation time t0 must be positive")
        if self.n < 1:
            raise ValueError("sample size n must be >= 1")
        if self.mode_count < 1:
            raise ValueError("mode_count must be >= 1")
        if self.grid_points < 2 * self.mode_count + 1:
            raise ValueError(
                f"grid_points={self.grid_points} cannot resolve mode_count={self.mode_count}; "
                f"need at least {2 * self.mode_count + 1}"
            )
        if self.observation_form not in (OBSERVE_GRID, OBSERVE_FOURIER):
            raise ValueError(f"unknown observation form {self.observation_form!r}")
        if self.sampler not in (SAMPLER_EXACT, SAMPLER_SERIES):
            raise ValueError(f"unknown sampler {self.sampler!r}")
        if self.noise.a0 != self.op.a0:
            raise ValueError("noise a0 must equal the operator's zero-order coefficient")
        if self.theta.mode_count > self.mode_count:
            raise ValueError("theta has more modes than mode_count allows")
        if self.quasi_base < 1:
            raise ValueError("quasi_base starts at 1")
        object.__setattr__(self, "theta", self.theta.padded(self.mode_count))

    def with_sigma(self, sigma: float) -> "ScenarioConfig":
        return replace(self, noise=replace(self.noise, sigma=sigma))

    def to_dict(self) -> dict:
        """Plain-data view of the resolved scenario, e.g. for run manifests."""
        live = [(k + 1, self.theta.c[k], self.theta.d[k])
                for k in range(self.theta.mode_count)
                if self.theta.c[k] != 0.0 or self.theta.d[k] != 0.0]
        return {
            "half_period": self.theta.half_period,
            "theta": {"c0": self.theta.c0,
                      "cos": {str(k): c for k, c, _ in live if c != 0.0},
                      "sin": {str(k): d for k, _, d in live if d != 0.0}},
            "operator": list(self.op.coefficients),
            "sigma": self.noise.sigma,
            "kernel": self.noise.kernel,
            "series_terms": self.noise.series_terms,
            "t0": self.t0,
            "n": self.n,
            "mode_count": self.mode_count,
            "grid_points": self.grid_points,
            "seed": self.seed,
            "quasi": self.quasi,
            "quasi_base": self.quasi_base,
            "observation_form": self.observation_form,
            "sampler": self.sampler,
            "series_variant": self.series_variant,
        }


def analytic_mean(config: ScenarioConfig) -> FourierSignal:
    """Expected observation: the propagated input (the noise is centered)."""
    return propagate(config.theta, config.op, config.t0)


def sample_source(config: ScenarioConfig, index: int, subkey: tuple[int, ...] = (),
                  quasi_shift: int = 0) -> RandomSource:
    """Driver for sample `index` (0-based), independent across indices."""
    if config.quasi:
        return RandomSource.quasi(config.quasi_base + quasi_shift + index)
    if config.seed is None:
        raise ValueError("pseudo-random sampling needs a resolved seed")
    return RandomSource.pseudo(config.seed, *subkey, index)


def _noise_draw(config: ScenarioConfig, rng: RandomSource) -> float:
    if config.sampler == SAMPLER_EXACT:
        return ou_integral_exact(config.noise, config.t0, rng)
    coeffs = rng.normals(config.noise.series_terms + 1)
    return ou_integral_series(config.noise, config.t0, coeffs, config.series_variant)


def sample_transformed(config: ScenarioConfig, rng: RandomSource):
    """One observed signal at time t0 and its noise draw.

    Returns (Z, eta) where Z is the propagated input shifted by the constant
    eta, rendered per config.observation_form.
    """
    base = analytic_mean(config)
    eta = _noise_draw(config, rng)
    if config.observation_form == OBSERVE_GRID:
        return base.evaluate_grid(config.grid_points) + eta, eta
    return base.plus_constant(eta), eta


@dataclass(frozen=True, eq=False)
class SampleSet:
    """A batch of observed signals with their noise draws and provenance.

    Grid observations are stored as one (n, G) value matrix, Fourier
    observations as an (n, 2K+1) coefficient matrix with columns
    c0, c_1..c_K, d_1..d_K. etas holds the per-sample noise draws for
    diagnostics (NaN when the set was read back from disk).
    """

    config: ScenarioConfig
    etas: np.ndarray
    grid_values: np.ndarray | None = None
    fourier_coef: np.ndarray | None = None

    def __post_init__(self):
        if (self.grid_values is None) == (self.fourier_coef is None):
            raise ValueError("exactly one of grid_values / fourier_coef must be set")

    @property
    def n(self) -> int:
        data = self.grid_values if self.grid_values is not None else self.fourier_coef
        return data.shape[0]

    @property
    def form(self) -> str:
        return OBSERVE_GRID if self.grid_values is not None else OBSERVE_FOURIER

    def _split_coef(self, row: np.ndarray):
        k = (row.size - 1) // 2
        return float(row[0]), row[1: k + 1], row[k + 1:]

    def signal(self, i: int):
        """Materialize sample i as a GridSignal or FourierSignal."""
        if self.grid_values is not None:
            return GridSignal(self.config.theta.half_period, self.grid_values[i])
        c0, c, d = self._split_coef(self.fourier_coef[i])
        return FourierSignal(self.config.theta.half_period, c0, c, d)

    def signals(self) -> list:
        return [self.signal(i) for i in range(self.n)]

    def mean_signal(self):
        """Pointwise (grid) or coefficient-wise (Fourier) sample mean."""
        if self.grid_values is not None:
            return GridSignal(self.config.theta.half_period, self.grid_values.mean(axis=0))
        c0, c, d = self._split_coef(self.fourier_coef.mean(axis=0))
        return FourierSignal(self.config.theta.half_period, c0, c, d)

    def values_at(self, x: float) -> np.ndarray:
        """All sample values at location x (nearest grid point in grid form)."""
        if self.grid_values is not None:
            g = GridSignal(self.config.theta.half_period, self.grid_values[0]).nearest_index(x)
            return self.grid_values[:, g].copy()
        k = self.config.mode_count
        q = np.pi / self.config.theta.half_period
        modes = np.arange(1, k + 1)
        basis = np.concatenate([[0.5], np.cos(modes * q * x), np.sin(modes * q * x)])
        return self.fourier_coef @ basis


def _pack_coef(signal: FourierSignal) -> np.ndarray:
    return np.concatenate([[signal.c0], signal.c, signal.d])


def sample_batch(config: ScenarioConfig, subkey: tuple[int, ...] = (),
                 quasi_shift: int = 0, parallel: bool = False) -> SampleSet:
    """Draw n independent observations; identical results sequential or parallel."""
    base = analytic_mean(config)

    def draw(i: int) -> float:
        return _noise_draw(config, sample_source(config, i, subkey, quasi_shift))

    if parallel:
        with ThreadPoolExecutor() as pool:
            etas = np.array(list(pool.map(draw, range(config.n))))
    else:
        etas = np.array([draw(i) for i in range(config.n)])

    if config.observation_form == OBSERVE_GRID:
        base_values = base.evaluate_grid(config.grid_points).values
        return SampleSet(config, etas, grid_values=base_values[None, :] + etas[:, None])
    row = _pack_coef(base)
    coef = np.tile(row, (config.n, 1))
    coef[:, 0] += 2.0 * etas
    return SampleSet(config, etas, fourier_coef=coef)


def sample_stream(config: ScenarioConfig, subkey: tuple[int, ...] = ()):
    """Endless generator of observations, sample i driven by its own stream."""
    i = 0
    while True:
        z, _ = sample_transformed(config, sample_source(config, i, subkey))
        yield z
        i += 1


def empirical_moments(samples: SampleSet, x: float) -> tuple[float, float]:
    """Sample mean and unbiased variance of the observed values at x."""
    values = samples.values_at(x)
    if values.size < 2:
        raise ValueError("variance needs at least two samples")
    return float(values.mean()), float(values.var(ddof=1))


def evolve_frames(config: ScenarioConfig, times, noise: str = NOISE_NONE,
                  rng: RandomSource | None = None) -> list[tuple[float, GridSignal]]:
    """Snapshots of the evolving signal at the given times.

    noise selects how the scalar noise enters: 'none' for the deterministic
    evolution, 'path' for one trajectory driven by a single coefficient vector
    (evaluated through the series form, outside its validity interval if the
    times require it, with a warning), or 'iid' for an independent exact draw
    per frame. Frames at t = 0 carry no noise.
    """
    times = [float(t) for t in times]
    if any(t < 0 for t in times):
        raise ValueError("frame times must be non-negative")
    if sorted(times) != times:
        raise ValueError("frame times must be sorted ascending")
    if noise not in (NOISE_NONE, NOISE_PATH, NOISE_IID):
        raise ValueError(f"unknown noise mode {noise!r}")
    if noise != NOISE_NONE and rng is None:
        rng = sample_source(config, 0)
    coeffs = rng.normals(config.noise.series_terms + 1) if noise == NOISE_PATH else None

    frames = []
    for t in times:
        values = propagate(config.theta, config.op, t).evaluate_grid(config.grid_points)
        if t > 0 and config.noise.sigma > 0 and noise != NOISE_NONE:
            if noise == NOISE_PATH:
                eta = ou_integral_series(config.noise, t, coeffs, config.series_variant,
                                         enforce_domain=False)
            else:
                eta = ou_integral_exact(config.noise, t, rng)
            values = values + eta
        frames.append((t, values))
    return frames
