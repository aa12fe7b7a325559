"""Gaussian drivers and the scalar Ornstein-Uhlenbeck channel noise.

The noise entering the channel is sigma * int_0^t exp(-+ a0 (t - tau)) dW(tau),
a scalar Gaussian whose variance and covariance are known in closed form. Two
samplers are provided: an exact one (a single Gaussian with the analytic
variance) and a Karhunen-Loeve series form driven by an explicit coefficient
vector, which also powers path animation. Drivers are either seeded
pseudo-random streams or deterministic quasi-random sequences built from
fractional parts of multiples of sqrt(prime).
"""

from __future__ import annotations

import copy
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import KLDomainError

KERNEL_MEAN_REVERTING = "mean_reverting"
KERNEL_GROWTH = "growth"
VARIANT_VARIANCE_MATCHED = "variance_matched"
VARIANT_PAPER_FAITHFUL = "paper_faithful"

_SQRT2PI = math.sqrt(2.0 * math.pi)
_EPS = np.finfo(float).eps
_SAFE_LOG = 700.0


@dataclass(frozen=True)
class NoiseParams:
    """Noise amplitude, kernel rate, kernel variant, and series truncation."""

    sigma: float
    a0: float
    kernel: str = KERNEL_MEAN_REVERTING
    series_terms: int = 999

    def __post_init__(self):
        if not (np.isfinite(self.sigma) and self.sigma >= 0):
            raise ValueError("sigma must be a non-negative finite real")
        if not (np.isfinite(self.a0) and self.a0 > 0):
            raise ValueError("a0 must be a positive finite real")
        if self.kernel not in (KERNEL_MEAN_REVERTING, KERNEL_GROWTH):
            raise ValueError(f"unknown kernel {self.kernel!r}")
        if self.series_terms < 1:
            raise ValueError("series_terms must be >= 1")


# ---------------------------------------------------------------------------
# inverse standard normal CDF
#
# Acklam's rational approximation (relative error < 1.15e-9 over (0, 1))
# sharpened by one Halley step against erfc, which brings the result to
# near machine precision.

_ICDF_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
           1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_ICDF_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
           6.680131188771972e+01, -1.328068155288572e+01)
_ICDF_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
           -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_ICDF_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
           3.754408661907416e+00)
_ICDF_SPLIT = 0.02425


def gaussian_inverse_cdf(p: float) -> float:
    """Quantile z with Phi(z) = p for the standard normal law."""
    p = float(p)
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie strictly between 0 and 1")
    a, b, c, d = _ICDF_A, _ICDF_B, _ICDF_C, _ICDF_D
    if p < _ICDF_SPLIT:
        q = math.sqrt(-2.0 * math.log(p))
        z = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) / \
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0)
    elif p > 1.0 - _ICDF_SPLIT:
        q = math.sqrt(-2.0 * math.log(1.0 - p))
        z = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) / \
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0)
    else:
        q = p - 0.5
        r = q * q
        z = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q / \
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0)
    if z * z < 2.0 * _SAFE_LOG:
        err = 0.5 * math.erfc(-z / math.sqrt(2.0)) - p
        if err != 0.0:
            u = err * _SQRT2PI * math.exp(0.5 * z * z)
            z -= u / (1.0 + 0.5 * z * u)
    return z


# ---------------------------------------------------------------------------
# quasi-random Gaussian sequence

_sieve_primes: list[int] = [2, 3, 5, 7, 11, 13]


def nth_prime(index: int) -> int:
    """The index-th prime (1-based: nth_prime(1) == 2), via a growing sieve."""
    if index < 1:
        raise ValueError("prime index starts at 1")
    while len(_sieve_primes) < index:
        limit = max(32, 2 * _sieve_primes[-1])
        is_prime = np.ones(limit + 1, dtype=bool)
        is_prime[:2] = False
        for p in range(2, int(limit**0.5) + 1):
            if is_prime[p]:
                is_prime[p * p:: p] = False
        _sieve_primes[:] = np.nonzero(is_prime)[0].tolist()
    return _sieve_primes[index - 1]


def quasi_gaussian(stream: int, index: int) -> float:
    """Deterministic standard-normal stand-in: Phi^-1 of {index * sqrt(p_stream)}.

    The fractional parts of multiples of an irrational are equidistributed, so
    the sequence has standard normal empirical law. An exactly integral
    multiple (measure zero, impossible for sqrt of a prime in exact arithmetic)
    is clamped away from the endpoints and logged.
    """
    if stream < 1 or index < 1:
        raise ValueError("stream and index are 1-based positive integers")
    u = math.fmod(index * math.sqrt(nth_prime(stream)), 1.0)
    if u <= 0.0 or u >= 1.0:
        warnings.warn(f"fractional part hit an endpoint at stream={stream} index={index}; "
                      "clamping by machine epsilon")
        u = min(max(u, _EPS), 1.0 - _EPS)
    return gaussian_inverse_cdf(u)


class RandomSource:
    """Deterministic Gaussian stream with a draw counter.

    pseudo mode wraps numpy's PCG64 seeded by the key path, so independent
    substreams derived from (seed, path...) can be drawn in any order; quasi
    mode replays quasi_gaussian(stream, j) for j = 1, 2, ... The pair
    (mode/key, counter) fully determines every draw.
    """

    PSEUDO = "pseudo"
    QUASI = "quasi"

    def __init__(self, mode: str, key: tuple[int, ...] = (0,), stream: int = 1,
                 counter: int = 0):
        if mode not in (self.PSEUDO, self.QUASI):
            raise ValueError(f"unknown RandomSource mode {mode!r}")
        self.mode = mode
        self.key = tuple(int(k) for k in key)
        self.stream = int(stream)
        self.counter = int(counter)
        self._gen = None
        if mode == self.QUASI:
            if self.stream < 1:
                raise ValueError("quasi stream index starts at 1")
            self._sqrt_p = math.sqrt(nth_prime(self.stream))

    @classmethod
    def pseudo(cls, seed: int, *path: int) -> "RandomSource":
        return cls(cls.PSEUDO, key=(int(seed), *path))

    @classmethod
    def quasi(cls, stream: int) -> "RandomSource":
        return cls(cls.QUASI, stream=stream)

    def _generator(self) -> np.random.Generator:
        if self._gen is None:
            self._gen = np.random.default_rng(self.key)
            if self.counter:
                self._gen.standard_normal(self.counter)
        return self._gen

    def normal(self) -> float:
        if self.mode == self.PSEUDO:
            value = float(self._generator().standard_normal())
        else:
            value = quasi_gaussian(self.stream, self.counter + 1)
        self.counter += 1
        return value

    def normals(self, count: int) -> np.ndarray:
        if count < 0:
            raise ValueError("count must be non-negative")
        if self.mode == self.PSEUDO:
            values = self._generator().standard_normal(count)
        else:
            j = np.arange(self.counter + 1, self.counter + count + 1, dtype=float)
            u = np.mod(j * self._sqrt_p, 1.0)
            u = np.clip(u, _EPS, 1.0 - _EPS)
            values = np.array([gaussian_inverse_cdf(p) for p in u])
        self.counter += count
        return values

    def substream(self, index: int) -> "RandomSource":
        """Independent pseudo stream keyed by (this key..., index)."""
        if self.mode != self.PSEUDO:
            raise ValueError("quasi sources are indexed by stream, not substream")
        return RandomSource(self.PSEUDO, key=self.key + (int(index),))

    def clone(self) -> "RandomSource":
        dup = RandomSource(self.mode, key=self.key, stream=self.stream, counter=self.counter)
        if self.mode == self.PSEUDO and self._gen is not None:
            dup._gen = copy.deepcopy(self._gen)
        return dup

    def describe(self) -> dict:
        if self.mode == self.PSEUDO:
            return {"mode": self.mode, "key": list(self.key), "counter": self.counter}
        return {"mode": self.mode, "stream": self.stream, "counter": self.counter}

    def __repr__(self):
        ident = f"key={self.key}" if self.mode == self.PSEUDO else f"stream={self.stream}"
        return f"RandomSource({self.mode}, {ident}, counter={self.counter})"


# ---------------------------------------------------------------------------
# Karhunen-Loeve Brownian path and OU integrals


def _kl_sum(coeffs: np.ndarray, s: float) -> float:
    """x_0 s + sqrt(2) sum_n x_n sin(pi n s) / (pi n) over the given coefficients."""
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.ndim != 1 or coeffs.size < 1:
        raise ValueError("coefficient vector must be one-dimensional and non-empty")
    n = np.arange(1, coeffs.size)
    tail = math.sqrt(2.0) * float(np.sum(coeffs[1:] * np.sin(np.pi * n * s) / (np.pi * n)))
    return float(coeffs[0]) * s + tail


def wiener_path_value(coeffs, t: float) -> float:
    """Brownian path value at t in [0, 1] from its sine-series coefficients."""
    if not 0.0 <= t <= 1.0:
        raise KLDomainError(f"the sine-series Brownian expansion is valid only on [0, 1]; got t={t}")
    return _kl_sum(coeffs, float(t))


def noise_variance(params: NoiseParams, t: float) -> float:
    """Variance of the accumulated channel noise at time t."""
    if t < 0:
        raise ValueError("t must be non-negative")
    scale = params.sigma**2 / (2.0 * params.a0)
    if params.kernel == KERNEL_MEAN_REVERTING:
        return scale * (-math.expm1(-2.0 * params.a0 * t))
    return scale * math.expm1(2.0 * params.a0 * t)


def noise_covariance(params: NoiseParams, s: float, t: float) -> float:
    """Covariance of the channel noise between times s and t."""
    if s < 0 or t < 0:
        raise ValueError("times must be non-negative")
    if s > t:
        s, t = t, s
    scale = params.sigma**2 / (2.0 * params.a0)
    if params.kernel == KERNEL_MEAN_REVERTING:
        return scale * (math.exp(-params.a0 * (t - s)) - math.exp(-params.a0 * (t + s)))
    return scale * math.exp(params.a0 * (s + t)) * (-math.expm1(-2.0 * params.a0 * s))


def ou_integral_exact(params: NoiseParams, t0: float, rng: RandomSource) -> float:
    """One exact draw of the noise at time t0; consumes exactly one Gaussian."""
    if t0 <= 0:
        raise ValueError("t0 must be positive")
    g = rng.normal()
    return math.sqrt(noise_variance(params, t0)) * g


def ou_integral_series(params: NoiseParams, t0: float, coeffs,
                       variant: str = VARIANT_VARIANCE_MATCHED,
                       enforce_domain: bool = True) -> float:
    """Series form of the noise draw, built from an explicit coefficient vector.

    The stochastic integral is a time-changed Brownian motion evaluated at
    u = exp(2 a0 t0) - 1; the sine-series path expansion representing it is
    valid only for u in [0, 1]. Larger u is rejected unless enforce_domain is
    switched off, in which case the (wrong-variance) value is still computed,
    with a warning, for faithful reproduction of legacy outputs.

    variance_matched uses the prefactor sigma / sqrt(2 a0) e^{-a0 t0}, whose
    variance agrees with noise_variance; paper_faithful replaces it with
    sigma / (2 a0) e^{-a0 t0}, kept for bit-level reproduction of the
    original formula. Their outputs differ by the exact factor sqrt(2 a0).
    """
    if t0 < 0:
        raise ValueError("t0 must be non-negative")
    if params.kernel != KERNEL_MEAN_REVERTING:
        raise ValueError("the series sampler is defined for the mean_reverting kernel only")
    if variant not in (VARIANT_VARIANCE_MATCHED, VARIANT_PAPER_FAITHFUL):
        raise ValueError(f"unknown series variant {variant!r}")
    u = math.expm1(2.0 * params.a0 * t0)
    if u > 1.0:
        if enforce_domain:
            raise KLDomainError(
                f"time-changed argument u = exp(2 a0 t0) - 1 = {u:.6g} exceeds 1; the "
                "sine-series expansion is not a Brownian representation there "
                "(pass enforce_domain=False to evaluate anyway)"
            )
        warnings.warn(f"evaluating the noise series outside its validity interval (u={u:.6g} > 1); "
                      "sample variance will not match the analytic formula")
    if params.sigma == 0.0:
        return 0.0
    if variant == VARIANT_VARIANCE_MATCHED:
        prefactor = params.sigma / math.sqrt(2.0 * params.a0)
    else:
        prefactor = params.sigma / (2.0 * params.a0)
    return prefactor * math.exp(-params.a0 * t0) * _kl_sum(coeffs, u)


def ou_joint_pairs(params: NoiseParams, s: float, t: float, count: int,
                   rng: RandomSource) -> tuple[np.ndarray, np.ndarray]:
    """Exact joint draws (noise(s), noise(t)) sharing one driving path.

    Uses the Markov decomposition: the later value is the earlier one decayed
    (or grown) plus an independent increment. Consumes 2 * count Gaussians,
    the first count for the earlier time.
    """
    if s < 0 or t < 0:
        raise ValueError("times must be non-negative")
    swap = s > t
    if swap:
        s, t = t, s
    g_early = rng.normals(count)
    g_inc = rng.normals(count)
    early = math.sqrt(noise_variance(params, s)) * g_early
    if params.kernel == KERNEL_MEAN_REVERTING:
        carry = math.exp(-params.a0 * (t - s))
    else:
        carry = math.exp(params.a0 * (t - s))
    late = carry * early + math.sqrt(noise_variance(params, t - s)) * g_inc
    return (late, early) if swap else (early, late)
