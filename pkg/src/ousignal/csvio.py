"""CSV schemas for signals, spectra, samples, frames, and experiment tables."""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .fourier import FourierSignal, GridSignal
from .manifest import write_csv
from .model import OBSERVE_GRID, SampleSet, ScenarioConfig
from .spectral import ModeSpectrum


def write_fourier_csv(signal: FourierSignal, path) -> None:
    """Rows k,c,d; the k=0 row carries (c0, 0)."""
    rows = [(0, signal.c0, 0.0)]
    rows += [(k + 1, signal.c[k], signal.d[k]) for k in range(signal.mode_count)]
    write_csv(path, ["k", "c", "d"], rows)


def read_fourier_csv(path, half_period: float) -> FourierSignal:
    rows = _read_rows(path, ["k", "c", "d"])
    coeffs = {int(r["k"]): (float(r["c"]), float(r["d"])) for r in rows}
    if 0 not in coeffs:
        raise ConfigError("missing k=0 row", source=str(path))
    top = max(coeffs)
    c = np.zeros(top)
    d = np.zeros(top)
    for k, (ck, dk) in coeffs.items():
        if k > 0:
            c[k - 1], d[k - 1] = ck, dk
    return FourierSignal(half_period, coeffs[0][0], c, d)


def write_grid_csv(grid: GridSignal, path) -> None:
    write_csv(path, ["x", "value"], zip(grid.grid, grid.values))


def read_grid_csv(path, half_period: float) -> GridSignal:
    rows = _read_rows(path, ["x", "value"])
    return GridSignal(half_period, [float(r["value"]) for r in rows])


def write_spectrum_csv(spectrum: ModeSpectrum, path) -> None:
    """Rows k,sigma,omega; the k=0 row carries the constant-mode rate."""
    rows = [(0, spectrum.sigma0, 0.0)]
    rows += [(k + 1, spectrum.sigma[k], spectrum.omega[k]) for k in range(spectrum.mode_count)]
    write_csv(path, ["k", "sigma", "omega"], rows)


def write_samples_csv(samples: SampleSet, path) -> None:
    """Long format: sample_id,x,value for grids, sample_id,k,c,d for coefficients."""
    if samples.form == OBSERVE_GRID:
        x = samples.signal(0).grid
        rows = ((i, x[g], samples.grid_values[i, g])
                for i in range(samples.n) for g in range(x.size))
        write_csv(path, ["sample_id", "x", "value"], rows)
        return
    k_count = samples.config.mode_count

    def coef_rows():
        for i in range(samples.n):
            row = samples.fourier_coef[i]
            yield (i, 0, row[0], 0.0)
            for k in range(k_count):
                yield (i, k + 1, row[1 + k], row[1 + k_count + k])

    write_csv(path, ["sample_id", "k", "c", "d"], coef_rows())


def read_samples_csv(path, config: ScenarioConfig) -> SampleSet:
    """Rebuild a SampleSet written by write_samples_csv (noise draws unknown)."""
    with open(path, newline="") as handle:
        header = next(csv.reader(handle), None)
    try:
        if header == ["sample_id", "x", "value"]:
            rows = _read_rows(path, header)
            by_sample: dict[int, list[float]] = {}
            for r in rows:
                by_sample.setdefault(int(r["sample_id"]), []).append(float(r["value"]))
            sizes = {len(v) for v in by_sample.values()}
            if len(sizes) != 1:
                raise ConfigError("samples have inconsistent grid sizes", source=str(path))
            values = np.array([by_sample[i] for i in sorted(by_sample)])
            return SampleSet(config, etas=np.full(len(by_sample), np.nan),
                             grid_values=values)
        if header == ["sample_id", "k", "c", "d"]:
            rows = _read_rows(path, header)
            k_count = max(int(r["k"]) for r in rows)
            ids = sorted({int(r["sample_id"]) for r in rows})
            row_of = {sample_id: row for row, sample_id in enumerate(ids)}
            coef = np.zeros((len(ids), 2 * k_count + 1))
            for r in rows:
                i, k = row_of[int(r["sample_id"])], int(r["k"])
                if k == 0:
                    coef[i, 0] = float(r["c"])
                else:
                    coef[i, k] = float(r["c"])
                    coef[i, k_count + k] = float(r["d"])
            return SampleSet(config, etas=np.full(len(ids), np.nan), fourier_coef=coef)
    except ValueError as exc:
        raise ConfigError(f"bad cell value: {exc}", source=str(path)) from exc
    raise ConfigError(
        "unrecognized samples file: expected header sample_id,x,value or sample_id,k,c,d",
        source=str(path),
    )


def write_frames_csv(frames, path) -> None:
    """Long format t,x,value over all frames."""
    def rows():
        for t, grid in frames:
            x = grid.grid
            for g in range(x.size):
                yield (t, x[g], grid.values[g])

    write_csv(path, ["t", "x", "value"], rows())


def _read_rows(path, expected_header: list[str]) -> list[dict]:
    path = Path(path)
    if not path.exists():
        raise ConfigError("file not found", source=str(path))
    with open(path, newline="") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None or list(reader.fieldnames) != expected_header:
            raise ConfigError(
                f"expected columns {','.join(expected_header)}, "
                f"found {','.join(reader.fieldnames or ['<empty>'])}",
                source=str(path),
            )
        return [row for row in reader if any(v != "" for v in row.values())]
