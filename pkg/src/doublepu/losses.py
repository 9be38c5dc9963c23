"""Margin losses with hand-coded derivatives.

All losses act on a real margin ``z`` (a classifier score, or its negation
for the negative-class term) and return non-negative values.  The log loss
is the exception: it is defined only on the open interval (0, 1), so it
applies to probability outputs rather than raw scores and is therefore not
accepted by the trainer.
"""

from __future__ import annotations

import enum

import numpy as np

from .exceptions import LossDomainError, NotTrainableError


class Loss(enum.Enum):
    """Loss families, named in config files by their lowercase value."""

    SQUARED = "squared"
    LOG = "log"
    LOGISTIC = "logistic"
    HINGE = "hinge"
    ZERO_ONE = "zero_one"

    @classmethod
    def parse(cls, name: str) -> "Loss":
        try:
            return cls(str(name).strip().lower())
        except ValueError:
            known = ", ".join(member.value for member in cls)
            raise LossDomainError(f"unknown loss {name!r}; expected one of: {known}") from None


#: Losses the trainer accepts (defined on all reals, with a usable gradient).
TRAINABLE_LOSSES = (Loss.SQUARED, Loss.LOGISTIC, Loss.HINGE)


def sigmoid(z):
    """Numerically stable logistic function 1 / (1 + exp(-z))."""
    arr = np.asarray(z, dtype=np.float64)
    e = np.exp(-np.abs(arr))
    out = np.where(arr >= 0.0, 1.0 / (1.0 + e), e / (1.0 + e))
    return float(out) if out.ndim == 0 else out


def _check_log_domain(arr: np.ndarray) -> None:
    bad = (arr <= 0.0) | (arr >= 1.0)
    if np.any(bad):
        offender = np.asarray(arr)[bad].flat[0]
        raise LossDomainError(f"log loss is defined only on (0, 1); got {offender!r}")


def loss_value(loss: Loss, z):
    """Evaluate ``loss`` at margin ``z`` (scalar or array).

    squared:  (z - 1)^2       log:      -log(z), 0 < z < 1
    logistic: log(1 + e^-z)   hinge:    max(0, 1 - z)
    zero_one: 1 if z < 0, 0 if z > 0, 0.5 at z = 0
    """
    arr = np.asarray(z, dtype=np.float64)
    if loss is Loss.SQUARED:
        with np.errstate(over="ignore"):  # inf is the correct value for huge margins
            out = (arr - 1.0) ** 2
    elif loss is Loss.LOG:
        _check_log_domain(arr)
        out = -np.log(arr)
    elif loss is Loss.LOGISTIC:
        out = np.logaddexp(0.0, -arr)
    elif loss is Loss.HINGE:
        out = np.maximum(0.0, 1.0 - arr)
    elif loss is Loss.ZERO_ONE:
        out = np.where(arr < 0.0, 1.0, np.where(arr > 0.0, 0.0, 0.5))
    else:  # pragma: no cover - enum is closed
        raise LossDomainError(f"unknown loss {loss!r}")
    return float(out) if out.ndim == 0 else out


def loss_grad(loss: Loss, z):
    """Derivative of ``loss`` at margin ``z`` (scalar or array).

    The hinge subgradient at its kink z = 1 is taken as 0.  The zero-one
    loss is evaluation-only and raises.
    """
    arr = np.asarray(z, dtype=np.float64)
    if loss is Loss.SQUARED:
        out = 2.0 * (arr - 1.0)
    elif loss is Loss.LOG:
        _check_log_domain(arr)
        out = -1.0 / arr
    elif loss is Loss.LOGISTIC:
        out = -sigmoid(-arr)
        out = np.asarray(out, dtype=np.float64)
    elif loss is Loss.HINGE:
        out = np.where(arr < 1.0, -1.0, 0.0)
    elif loss is Loss.ZERO_ONE:
        raise NotTrainableError("zero-one loss is not differentiable; train with a surrogate")
    else:  # pragma: no cover - enum is closed
        raise LossDomainError(f"unknown loss {loss!r}")
    return float(out) if out.ndim == 0 else out
