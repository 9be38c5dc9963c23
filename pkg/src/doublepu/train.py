"""Empirical risk minimization: gradient descent over a linear scorer."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .data import PuTriple
from .exceptions import DataError, NotTrainableError, TrainingDivergedError
from .losses import TRAINABLE_LOSSES
from .model import LinearScorer
from .risk import ClassPriors, Estimator, RiskSpec, double_pu_risk, risk_gradient
from .rng import make_rng, standard_normal

INIT_ZEROS = "zeros"
INIT_GAUSSIAN = "gaussian"


@dataclass(frozen=True)
class TrainConfig:
    """Optimizer settings.

    ``batch_size=None`` runs full-batch descent; otherwise every step draws
    independent minibatches from the three samples, sized proportionally to
    their counts (minimum one each).  The L2 penalty (default 0) applies to
    the weights only, never the bias, and is excluded from reported risks.
    """

    spec: RiskSpec
    learning_rate: float = 0.1
    epochs: int = 100
    batch_size: int | None = None
    l2_penalty: float = 0.0
    seed: int = 0
    init: str = INIT_ZEROS
    init_scale: float = 0.01

    def __post_init__(self):
        lr = float(self.learning_rate)
        if not math.isfinite(lr) or lr < 0.0:
            raise DataError(f"learning_rate must be finite and >= 0; got {self.learning_rate!r}")
        if int(self.epochs) < 1:
            raise DataError(f"epochs must be >= 1; got {self.epochs!r}")
        if self.batch_size is not None and int(self.batch_size) < 1:
            raise DataError(f"batch_size must be >= 1; got {self.batch_size!r}")
        l2 = float(self.l2_penalty)
        if not math.isfinite(l2) or l2 < 0.0:
            raise DataError(f"l2_penalty must be finite and >= 0; got {self.l2_penalty!r}")
        if self.init not in (INIT_ZEROS, INIT_GAUSSIAN):
            raise DataError(f"init must be {INIT_ZEROS!r} or {INIT_GAUSSIAN!r}; got {self.init!r}")
        scale = float(self.init_scale)
        if not math.isfinite(scale) or scale <= 0.0:
            raise DataError(f"init_scale must be finite and > 0; got {self.init_scale!r}")
        object.__setattr__(self, "learning_rate", lr)
        object.__setattr__(self, "epochs", int(self.epochs))
        object.__setattr__(self, "batch_size", None if self.batch_size is None else int(self.batch_size))
        object.__setattr__(self, "l2_penalty", l2)
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "init_scale", scale)


@dataclass(frozen=True)
class TraceEntry:
    """Per-epoch record, always evaluated full batch at the updated parameters.

    ``risk`` is the configured estimator's value; ``unbiased_risk`` the
    plain five-term value for cross-run comparability; ``bracket`` the
    unlabeled-minus-positive bracket as the estimator uses it (clamped at
    zero under the non-negative estimator, raw otherwise).
    """

    epoch: int
    risk: float
    grad_norm: float
    unbiased_risk: float
    bracket: float


def _draw_batch(data: PuTriple, batch_size: int | None, rng) -> PuTriple:
    if batch_size is None:
        return data
    j, k, l = data.counts
    total = j + k + l
    nj = max(1, batch_size * j // total)
    nk = max(1, batch_size * k // total)
    nl = max(1, batch_size * l // total)
    return PuTriple(
        data.positive_interest[rng.permutation(j)[:nj]],
        data.unlabeled[rng.permutation(k)[:nk]],
        data.positive_loyal[rng.permutation(l)[:nl]],
    )


def train(data: PuTriple, priors: ClassPriors, config: TrainConfig) -> tuple[LinearScorer, list[TraceEntry]]:
    """Minimize the configured risk by gradient descent.

    Deterministic given the seed.  Raises :class:`TrainingDivergedError`,
    naming the epoch, as soon as a parameter or recorded value goes
    non-finite.
    """
    spec = config.spec
    if spec.loss not in TRAINABLE_LOSSES:
        raise NotTrainableError(
            f"loss {spec.loss.value!r} is not trainable; choose one of: "
            + ", ".join(l.value for l in TRAINABLE_LOSSES)
        )
    rng = make_rng(config.seed)
    if config.init == INIT_GAUSSIAN:
        draw = config.init_scale * standard_normal(rng, data.dim + 1)
        weights, bias = draw[:-1], float(draw[-1])
    else:
        weights, bias = np.zeros(data.dim), 0.0
    model = LinearScorer(weights, bias)

    trace: list[TraceEntry] = []
    for epoch in range(1, config.epochs + 1):
        batch = _draw_batch(data, config.batch_size, rng)
        grad_w, grad_b = risk_gradient(model, batch, priors, spec)
        if config.l2_penalty:
            grad_w = grad_w + config.l2_penalty * model.weights
        grad_norm = float(np.sqrt(np.dot(grad_w, grad_w) + grad_b * grad_b))
        weights = model.weights - config.learning_rate * grad_w
        bias = model.bias - config.learning_rate * grad_b
        if not (np.all(np.isfinite(weights)) and math.isfinite(bias)):
            raise TrainingDivergedError(
                f"non-finite parameters at epoch {epoch}; reduce the learning rate"
            )
        model = LinearScorer(weights, bias)
        value, terms = double_pu_risk(model, data, priors, spec)
        bracket = terms.bracket
        if spec.estimator is Estimator.NON_NEGATIVE:
            bracket = max(0.0, bracket)
        if not (math.isfinite(value) and math.isfinite(terms.total) and math.isfinite(grad_norm)):
            raise TrainingDivergedError(f"non-finite risk at epoch {epoch}; reduce the learning rate")
        trace.append(TraceEntry(epoch, value, grad_norm, terms.total, bracket))
    return model, trace


def train_trace_final_risk(trace: list[TraceEntry]) -> float:
    """Last epoch's full-batch unbiased risk (comparable across estimators
    and batch modes)."""
    if not trace:
        raise DataError("empty training trace")
    return trace[-1].unbiased_risk


def save_trace(path, trace: list[TraceEntry], comment: str | None = None) -> None:
    """Write one 'epoch risk grad_norm' line per epoch."""
    lines = []
    if comment:
        lines.extend("# " + part for part in comment.splitlines())
    lines.append("# epoch risk grad_norm")
    lines.extend(f"{e.epoch} {e.risk:.17g} {e.grad_norm:.17g}" for e in trace)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
