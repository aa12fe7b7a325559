"""Truncated Fourier series on [-l, l): evaluation, quadrature, sup distance.

A signal is represented as c0/2 + sum_{k=1..K} c_k cos(k pi x / l) + d_k sin(k pi x / l).
The stored c0 is twice the constant term, so the same quadrature weight extracts
every coefficient. Grids are uniform and left-endpoint (x_G would alias x_0),
which makes the rectangle rule exact for trig polynomials once G >= 2K+1.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import AliasingError

DEFAULT_PROBE_POINTS = 4096


@lru_cache(maxsize=64)
def _grid(half_period: float, points: int) -> np.ndarray:
    x = half_period * (2.0 * np.arange(points) / points - 1.0)
    x.flags.writeable = False
    return x


@lru_cache(maxsize=64)
def _trig_basis(half_period: float, mode_count: int, points: int):
    """Cosine/sine tables on the uniform grid, shape (points, mode_count)."""
    x = _grid(half_period, points)
    k = np.arange(1, mode_count + 1)
    angles = np.outer(x, k * (np.pi / half_period))
    cos_tab = np.cos(angles)
    sin_tab = np.sin(angles)
    cos_tab.flags.writeable = False
    sin_tab.flags.writeable = False
    return cos_tab, sin_tab


def _as_coeff_array(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float, copy=True).reshape(-1)
    if arr.size and not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} coefficients must be finite")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class FourierSignal:
    """Immutable trig polynomial on [-half_period, half_period)."""

    half_period: float
    c0: float
    c: np.ndarray
    d: np.ndarray

    def __post_init__(self):
        if not (np.isfinite(self.half_period) and self.half_period > 0):
            raise ValueError("half_period must be a positive finite real")
        if not np.isfinite(self.c0):
            raise ValueError("c0 must be finite")
        object.__setattr__(self, "c", _as_coeff_array(self.c, "cosine"))
        object.__setattr__(self, "d", _as_coeff_array(self.d, "sine"))
        if self.c.shape != self.d.shape:
            raise ValueError("cosine and sine coefficient lists must have equal length")

    @classmethod
    def build(cls, half_period: float, c0: float = 0.0, cos: dict[int, float] | None = None,
              sin: dict[int, float] | None = None, mode_count: int | None = None) -> "FourierSignal":
        """Assemble a signal from sparse {mode index: coefficient} maps."""
        cos = cos or {}
        sin = sin or {}
        top = max([0, *cos.keys(), *sin.keys()])
        if mode_count is None:
            mode_count = top
        if top > mode_count:
            raise ValueError(f"coefficient index {top} exceeds mode_count {mode_count}")
        if any(k < 1 for k in (*cos, *sin)):
            raise ValueError("mode indices start at 1; use c0 for the constant mode")
        c = np.zeros(mode_count)
        d = np.zeros(mode_count)
        for k, v in cos.items():
            c[k - 1] = v
        for k, v in sin.items():
            d[k - 1] = v
        return cls(half_period, c0, c, d)

    @property
    def mode_count(self) -> int:
        return self.c.size

    def evaluate(self, x):
        """Value of the series at x (scalar or array); 2l-periodic in x."""
        x_arr = np.asarray(x, dtype=float)
        out = np.full(x_arr.shape, 0.5 * self.c0)
        if self.mode_count:
            k = np.arange(1, self.mode_count + 1)
            angles = np.multiply.outer(x_arr, k * (np.pi / self.half_period))
            out = out + np.cos(angles) @ self.c + np.sin(angles) @ self.d
        return float(out) if np.isscalar(x) or x_arr.ndim == 0 else out

    def evaluate_grid(self, grid_points: int) -> "GridSignal":
        """Sample onto the uniform left-endpoint grid of the given size."""
        if grid_points < 1:
            raise ValueError("grid_points must be >= 1")
        values = np.full(grid_points, 0.5 * self.c0)
        if self.mode_count:
            cos_tab, sin_tab = _trig_basis(self.half_period, self.mode_count, grid_points)
            values = values + cos_tab @ self.c + sin_tab @ self.d
        return GridSignal(self.half_period, values)

    def padded(self, mode_count: int) -> "FourierSignal":
        """Copy with zero-padded coefficients up to mode_count."""
        if mode_count < self.mode_count:
            raise ValueError("cannot pad to fewer modes than present")
        if mode_count == self.mode_count:
            return self
        extra = mode_count - self.mode_count
        return FourierSignal(self.half_period, self.c0,
                             np.concatenate([self.c, np.zeros(extra)]),
                             np.concatenate([self.d, np.zeros(extra)]))

    def plus_constant(self, w: float) -> "FourierSignal":
        """Add the constant function w (enters as c0 + 2w)."""
        return FourierSignal(self.half_period, self.c0 + 2.0 * w, self.c, self.d)

    def mode_radii(self) -> np.ndarray:
        """Per-mode amplitude sqrt(c_k^2 + d_k^2), k >= 1."""
        return np.hypot(self.c, self.d)

    def __add__(self, other):
        if not isinstance(other, FourierSignal):
            return NotImplemented
        if other.half_period != self.half_period:
            raise ValueError("cannot add signals with different half periods")
        k = max(self.mode_count, other.mode_count)
        a, b = self.padded(k), other.padded(k)
        return FourierSignal(self.half_period, a.c0 + b.c0, a.c + b.c, a.d + b.d)

    def __sub__(self, other):
        return self.__add__(-1.0 * other)

    def __mul__(self, scalar):
        if not np.isscalar(scalar):
            return NotImplemented
        s = float(scalar)
        return FourierSignal(self.half_period, s * self.c0, s * self.c, s * self.d)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class GridSignal:
    """Function values on the uniform left-endpoint grid over [-l, l)."""

    half_period: float
    values: np.ndarray

    def __post_init__(self):
        if not (np.isfinite(self.half_period) and self.half_period > 0):
            raise ValueError("half_period must be a positive finite real")
        values = np.array(self.values, dtype=float, copy=True).reshape(-1)
        if values.size < 1:
            raise ValueError("grid must hold at least one value")
        if not np.all(np.isfinite(values)):
            raise ValueError("grid values must be finite")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def grid_points(self) -> int:
        return self.values.size

    @property
    def grid(self) -> np.ndarray:
        return _grid(self.half_period, self.grid_points)

    def nearest_index(self, x: float) -> int:
        """Index of the grid point closest to x (periodic wrap)."""
        g = round((float(x) + self.half_period) * self.grid_points / (2.0 * self.half_period))
        return int(g % self.grid_points)

    def value_near(self, x: float) -> float:
        return float(self.values[self.nearest_index(x)])

    def __add__(self, other):
        if isinstance(other, GridSignal):
            if other.half_period != self.half_period or other.grid_points != self.grid_points:
                raise ValueError("grid mismatch")
            return GridSignal(self.half_period, self.values + other.values)
        if np.isscalar(other):
            return GridSignal(self.half_period, self.values + float(other))
        return NotImplemented

    __radd__ = __add__

    def __mul__(self, scalar):
        if not np.isscalar(scalar):
            return NotImplemented
        return GridSignal(self.half_period, float(scalar) * self.values)

    __rmul__ = __mul__


def extract_coefficients(grid: GridSignal, mode_count: int) -> FourierSignal:
    """Recover Fourier coefficients by the periodic rectangle rule.

    Exact (to roundoff) for signals band-limited to mode_count once the grid
    has at least 2*mode_count + 1 points; coarser grids alias mode energy and
    are rejected.
    """
    if mode_count < 1:
        raise ValueError("mode_count must be >= 1")
    points = grid.grid_points
    if points < 2 * mode_count + 1:
        raise AliasingError(
            f"{points} grid points cannot resolve {mode_count} modes without aliasing; "
            f"need at least {2 * mode_count + 1}"
        )
    weight = 2.0 / points
    c0 = weight * float(np.sum(grid.values))
    cos_tab, sin_tab = _trig_basis(grid.half_period, mode_count, points)
    c = weight * (grid.values @ cos_tab)
    d = weight * (grid.values @ sin_tab)
    return FourierSignal(grid.half_period, c0, c, d)


def _probe_values(signal: FourierSignal, points: int) -> np.ndarray:
    out = np.full(points, 0.5 * signal.c0)
    if signal.mode_count:
        cos_tab, sin_tab = _trig_basis(signal.half_period, signal.mode_count, points)
        out = out + cos_tab @ signal.c + sin_tab @ signal.d
    return out


def sup_distance(a, b, probe_points: int = DEFAULT_PROBE_POINTS) -> float:
    """Largest pointwise gap between two signals of the same kind.

    Fourier inputs are compared on a dense probe grid (the true sup of a trig
    polynomial has no closed form, so this is a tight lower bound); grid
    inputs are compared on their own points.
    """
    if isinstance(a, FourierSignal) and isinstance(b, FourierSignal):
        if a.half_period != b.half_period:
            raise ValueError("half_period mismatch")
        return float(np.max(np.abs(_probe_values(a, probe_points) - _probe_values(b, probe_points))))
    if isinstance(a, GridSignal) and isinstance(b, GridSignal):
        if a.half_period != b.half_period:
            raise ValueError("half_period mismatch")
        if a.grid_points != b.grid_points:
            raise ValueError("grid size mismatch")
        return float(np.max(np.abs(a.values - b.values)))
    raise TypeError("sup_distance needs two FourierSignal or two GridSignal inputs")
