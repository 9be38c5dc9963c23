"""Linear scoring model and its plain-text serialization."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .exceptions import DataError
from .losses import sigmoid

_HEADER_RE = re.compile(r"^dpu-linear v1 d=(\d+)$")


@dataclass(frozen=True)
class LinearScorer:
    """Immutable linear scorer g(x) = w . x + b."""

    weights: np.ndarray
    bias: float = 0.0

    def __post_init__(self):
        w = np.array(self.weights, dtype=np.float64).reshape(-1)
        b = float(self.bias)
        if w.size == 0:
            raise DataError("a linear scorer needs at least one weight")
        if not np.all(np.isfinite(w)) or not math.isfinite(b):
            raise DataError("model parameters must be finite")
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "bias", b)

    @property
    def dim(self) -> int:
        return self.weights.size

    def score(self, x):
        """Raw score for one feature vector (float) or a feature matrix (1-d array)."""
        arr = np.asarray(x, dtype=np.float64)
        if arr.ndim == 1:
            if arr.size != self.dim:
                raise DataError(f"feature dimension {arr.size} does not match model dimension {self.dim}")
            return float(arr @ self.weights + self.bias)
        if arr.ndim == 2:
            if arr.shape[1] != self.dim:
                raise DataError(f"feature dimension {arr.shape[1]} does not match model dimension {self.dim}")
            return arr @ self.weights + self.bias
        raise DataError("expected a feature vector or a feature matrix")

    def predict(self, x, threshold: float = 0.0):
        """Label +1 where score > threshold, else -1 (a tie predicts -1)."""
        s = self.score(x)
        if np.ndim(s) == 0:
            return 1 if s > threshold else -1
        return np.where(s > threshold, 1, -1)

    def posterior(self, x):
        """Logistic link sigma(score); calibrated only under logistic-loss training."""
        return sigmoid(self.score(x))


def save_model(path, model: LinearScorer, comment: str | None = None) -> None:
    """Write a model file: header line, bias line, one line per weight.

    Values use 17 significant digits so a save/load round trip is exact.
    Optional comment lines (prefixed '#') precede the header.
    """
    lines = []
    if comment:
        lines.extend("# " + part for part in comment.splitlines())
    lines.append(f"dpu-linear v1 d={model.dim}")
    lines.append(f"bias {model.bias:.17g}")
    lines.extend(f"w{i} {value:.17g}" for i, value in enumerate(model.weights))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_model(path) -> LinearScorer:
    """Read a model file written by :func:`save_model`; '#' lines are skipped."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read model file {path}: {exc}") from exc
    lines = [line.strip() for line in text.splitlines()]
    lines = [line for line in lines if line and not line.startswith("#")]
    if not lines:
        raise DataError(f"{path}: empty model file")
    match = _HEADER_RE.match(lines[0])
    if not match:
        raise DataError(f"{path}: expected header 'dpu-linear v1 d=<dim>', got {lines[0]!r}")
    dim = int(match.group(1))
    if len(lines) != 2 + dim:
        raise DataError(f"{path}: expected bias plus {dim} weight lines, got {len(lines) - 1}")

    def parse(line: str, name: str) -> float:
        key, _, value = line.partition(" ")
        if key != name or not value:
            raise DataError(f"{path}: expected line '{name} <value>', got {line!r}")
        try:
            return float(value)
        except ValueError:
            raise DataError(f"{path}: bad number {value!r} on line {line!r}") from None

    bias = parse(lines[1], "bias")
    weights = [parse(lines[2 + i], f"w{i}") for i in range(dim)]
    return LinearScorer(np.array(weights), bias)
