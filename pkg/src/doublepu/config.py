"""Plain-text key = value experiment configuration.

One setting per line, '#' comments and blank lines allowed.  Values are
plain scalars, comma-separated lists, or semicolon-separated matrix rows:

    seed = 7
    y_label_frac = 0.7
    loss = logistic
    component.1.mean = 0, 2
    component.1.cov = 1, 0; 0, 1
    component.1.count = 500
    component.1.y = 1
    component.1.z = -1
"""

from __future__ import annotations

import re
from pathlib import Path

import numpy as np

from .data import MixtureComponent, MixtureConfig, default_mixture
from .exceptions import DataError

_COMPONENT_RE = re.compile(r"^component\.(\d+)\.(mean|cov|count|y|z)$")

_TRUE = {"true", "yes", "1", "on"}
_FALSE = {"false", "no", "0", "off"}


def parse_config(path) -> dict[str, str]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read config {path}: {exc}") from exc
    settings: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise DataError(f"{path}: line {lineno}: expected 'key = value', got {raw!r}")
        settings[key] = value
    return settings


def _convert(cfg: dict[str, str], key: str, default, converter, kind: str):
    if key not in cfg:
        return default
    try:
        return converter(cfg[key])
    except (ValueError, TypeError):
        raise DataError(f"config key {key!r}: expected {kind}, got {cfg[key]!r}") from None


def get_str(cfg, key, default=None):
    return cfg.get(key, default)


def get_float(cfg, key, default=None):
    return _convert(cfg, key, default, float, "a number")


def get_int(cfg, key, default=None):
    return _convert(cfg, key, default, lambda v: int(v, 0), "an integer")


def get_bool(cfg, key, default=None):
    def conv(value: str) -> bool:
        low = value.strip().lower()
        if low in _TRUE:
            return True
        if low in _FALSE:
            return False
        raise ValueError(value)

    return _convert(cfg, key, default, conv, "a boolean (true/false)")


def get_floats(cfg, key, default=None):
    return _convert(
        cfg, key, default, lambda v: tuple(float(tok) for tok in v.split(",")), "a comma-separated list"
    )


def get_matrix(cfg, key, default=None):
    def conv(value: str) -> np.ndarray:
        rows = [[float(tok) for tok in row.split(",")] for row in value.split(";")]
        return np.array(rows, dtype=np.float64)

    return _convert(cfg, key, default, conv, "semicolon-separated matrix rows")


def mixture_from_config(cfg: dict[str, str], seed: int) -> MixtureConfig:
    """Build the mixture named by component.<i>.* keys, or the default one."""
    indices = sorted({int(m.group(1)) for key in cfg if (m := _COMPONENT_RE.match(key))})
    stray = [key for key in cfg if key.startswith("component.") and not _COMPONENT_RE.match(key)]
    if stray:
        raise DataError(f"unrecognized component key {stray[0]!r}")
    if not indices:
        return default_mixture(seed)
    components = []
    for i in indices:
        prefix = f"component.{i}."
        missing = [f for f in ("mean", "cov", "count", "y", "z") if prefix + f not in cfg]
        if missing:
            raise DataError(f"component {i} is missing key(s): {', '.join(missing)}")
        components.append(
            MixtureComponent(
                mean=get_floats(cfg, prefix + "mean"),
                cov=get_matrix(cfg, prefix + "cov"),
                count=get_int(cfg, prefix + "count"),
                y=get_int(cfg, prefix + "y"),
                z=get_int(cfg, prefix + "z"),
            )
        )
    return MixtureConfig(tuple(components), seed=seed)
