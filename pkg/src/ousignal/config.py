"""Flat key = value scenario configs and the bundled presets.

Grammar: one `key = value` pair per line, `#` starts a comment. Signal
coefficients use sparse keys (`c0`, `c.3`, `d.5`), operator coefficients
`A.0`, `A.1`, ... Numeric values may be plain numbers or the tokens `pi`,
`-pi`, `pi/<int>` for common observation times. Unknown or duplicate keys are
rejected with their line number.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from importlib import resources

from .errors import ConfigError
from .fourier import FourierSignal
from .model import ScenarioConfig
from .noise import NoiseParams
from .spectral import OperatorSpec

PRESETS = ("ex41", "ex42", "ex43")

ESTIMATOR_MEAN = "mean"
ESTIMATOR_INFINITE = "infinite"

_KEY_RE = re.compile(r"^[A-Za-z][A-Za-z0-9_]*(\.[0-9]+)?$")

_ENUM_KEYS = {
    "kernel": ("mean_reverting", "growth"),
    "observation": ("grid", "fourier"),
    "sampler": ("exact", "series"),
    "series_variant": ("variance_matched", "paper_faithful"),
    "estimator": (ESTIMATOR_MEAN, ESTIMATOR_INFINITE),
}
_INT_KEYS = {"n", "K", "G", "seed", "quasi_base", "series_terms", "window", "n_max", "quasi"}
_FLOAT_KEYS = {"l", "c0", "sigma", "t0", "epsilon"}
_LIST_KEYS = {"sigma_grid"}


@dataclass(frozen=True)
class RunConfig:
    """A parsed scenario plus command-level run parameters."""

    scenario: ScenarioConfig
    sigma_grid: tuple[float, ...] = ()
    estimator: str = ESTIMATOR_MEAN
    epsilon: float = 1e-3
    window: int = 4
    n_max: int = 10000
    text: str = ""


def parse_number(token: str):
    token = token.strip()
    sign = 1.0
    body = token
    if body.startswith("-"):
        sign, body = -1.0, body[1:].strip()
    if body == "pi":
        return sign * math.pi
    m = re.fullmatch(r"pi\s*/\s*(\d+)", body)
    if m:
        return sign * math.pi / int(m.group(1))
    return float(token)


def _parse_lines(text: str, source: str) -> dict[str, tuple[str, int]]:
    entries: dict[str, tuple[str, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno, source)
        key, value = (part.strip() for part in line.split("=", 1))
        if not _KEY_RE.match(key):
            raise ConfigError(f"malformed key {key!r}", lineno, source)
        if key in entries:
            raise ConfigError(f"duplicate key {key!r} (first given on line {entries[key][1]})",
                              lineno, source)
        if not value:
            raise ConfigError(f"empty value for key {key!r}", lineno, source)
        entries[key] = (value, lineno)
    return entries


def parse_config_text(text: str, source: str = "<config>") -> RunConfig:
    entries = _parse_lines(text, source)
    values: dict = {}
    theta_cos: dict[int, float] = {}
    theta_sin: dict[int, float] = {}
    op_coeffs: dict[int, float] = {}

    for key, (raw, lineno) in entries.items():
        try:
            if key.startswith("c.") or key.startswith("d."):
                index = int(key[2:])
                if index < 1:
                    raise ConfigError("mode indices start at 1; use c0 for the constant term",
                                      lineno, source)
                target = theta_cos if key[0] == "c" else theta_sin
                target[index] = parse_number(raw)
            elif key.startswith("A."):
                op_coeffs[int(key[2:])] = parse_number(raw)
            elif key in _ENUM_KEYS:
                if raw not in _ENUM_KEYS[key]:
                    raise ConfigError(
                        f"{key} must be one of {', '.join(_ENUM_KEYS[key])}; got {raw!r}",
                        lineno, source)
                values[key] = raw
            elif key in _INT_KEYS:
                values[key] = int(raw)
            elif key in _FLOAT_KEYS:
                values[key] = float(parse_number(raw))
            elif key in _LIST_KEYS:
                values[key] = tuple(float(parse_number(tok)) for tok in raw.split(","))
            else:
                raise ConfigError(f"unknown key {key!r}", lineno, source)
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(f"bad value for {key!r}: {exc}", lineno, source) from exc

    if "A.0" not in entries:
        raise ConfigError("operator needs at least A.0", source=source)
    if "t0" not in entries:
        raise ConfigError("observation time t0 is required", source=source)

    top_order = max(op_coeffs)
    coeffs = [op_coeffs.get(i, 0.0) for i in range(top_order + 1)]
    try:
        op = OperatorSpec.of(*coeffs)
        half_period = values.get("l", math.pi)
        mode_count = values.get("K", 20)
        theta = FourierSignal.build(half_period, values.get("c0", 0.0), theta_cos, theta_sin,
                                    mode_count=mode_count)
        noise = NoiseParams(
            sigma=values.get("sigma", 0.0),
            a0=op.a0,
            kernel=values.get("kernel", "mean_reverting"),
            series_terms=values.get("series_terms", 999),
        )
        scenario = ScenarioConfig(
            theta=theta,
            op=op,
            noise=noise,
            t0=values["t0"],
            n=values.get("n", 1),
            mode_count=mode_count,
            grid_points=values.get("G", 200),
            seed=values.get("seed"),
            quasi=bool(values.get("quasi", 0)),
            quasi_base=values.get("quasi_base", 1),
            observation_form=values.get("observation", "grid"),
            sampler=values.get("sampler", "exact"),
            series_variant=values.get("series_variant", "variance_matched"),
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc), source=source) from exc

    return RunConfig(
        scenario=scenario,
        sigma_grid=values.get("sigma_grid", ()),
        estimator=values.get("estimator", ESTIMATOR_MEAN),
        epsilon=values.get("epsilon", 1e-3),
        window=values.get("window", 4),
        n_max=values.get("n_max", 10000),
        text=text,
    )


def preset_text(name: str) -> str:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(PRESETS)}")
    return resources.files(__package__).joinpath(f"presets/{name}.cfg").read_text()


def load_config(path_or_preset: str) -> RunConfig:
    """Load a config file, or one of the bundled presets by bare name."""
    if path_or_preset in PRESETS:
        return parse_config_text(preset_text(path_or_preset), source=f"preset:{path_or_preset}")
    try:
        with open(path_or_preset) as handle:
            text = handle.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}", source=str(path_or_preset)) from exc
    return parse_config_text(text, source=str(path_or_preset))
