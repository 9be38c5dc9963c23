"""Risk estimators over the three observable samples.

The target label is w = +1 for individuals with interest (y = +1) and no
loyalty (z = -1).  Its population classification risk

    R(g) = alpha E[l(g(X)) | w=+1] + (1 - alpha) E[l(-g(X)) | w=-1]

is not directly estimable because w is never observed.  Using the identity
alpha p(x | w=+1) = beta p(x | y=+1) - gamma p(x | y=+1, z=+1) it rewrites
into five terms, each a conditional mean over one of the three observable
samples (interest-positive, unlabeled, loyalty-positive):

    t1 = +beta  Ej[l(g)]      over the interest-positive sample
    t2 = -gamma El[l(g)]      over the loyalty-positive sample
    t3 =        Ek[l(-g)]     over the unlabeled sample
    t4 = -beta  Ej[l(-g)]
    t5 = +gamma El[l(-g)]

Replacing the conditional means by sample means makes the total an unbiased
estimate of R(g).  Two variants are provided: a non-negative correction
that clamps the difference-of-estimators bracket t3 + t4 at zero (it can go
negative on finite samples and lets training diverge), and a cost-sensitive
weighting of the false-negative part (t1 + t2) and false-positive part
(t3 + t4 + t5).

All sample means use compensated summation and every total uses the fixed
reduction order (t1 + t2) + ((t3 + t4) + t5), so results are deterministic,
invariant under dataset duplication, and the cost-sensitive estimator with
unit costs reproduces the unbiased value bit for bit.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DataError, NotTrainableError, PriorError
from .losses import TRAINABLE_LOSSES, Loss, loss_grad, loss_value


class Estimator(enum.Enum):
    """Risk estimator variants, named in config files by their lowercase value."""

    UNBIASED = "unbiased"
    NON_NEGATIVE = "non_negative"
    COST_SENSITIVE = "cost_sensitive"

    @classmethod
    def parse(cls, name: str) -> "Estimator":
        try:
            return cls(str(name).strip().lower())
        except ValueError:
            known = ", ".join(member.value for member in cls)
            raise DataError(f"unknown estimator {name!r}; expected one of: {known}") from None


@dataclass(frozen=True)
class ClassPriors:
    """Known label-event probabilities: beta = p(y=+1), gamma = p(y=+1, z=+1).

    Since the loyalty-positive event is contained in the interest-positive
    event, valid priors satisfy 0 < gamma <= beta < 1.  The target-class
    prior alpha = p(w=+1) = beta - gamma is derived.
    """

    beta: float
    gamma: float

    def __post_init__(self):
        b, g = float(self.beta), float(self.gamma)
        if not (math.isfinite(b) and math.isfinite(g)):
            raise PriorError(f"priors must be finite; got beta={self.beta!r}, gamma={self.gamma!r}")
        if not 0.0 < g <= b < 1.0:
            raise PriorError(f"priors must satisfy 0 < gamma <= beta < 1; got beta={b}, gamma={g}")
        object.__setattr__(self, "beta", b)
        object.__setattr__(self, "gamma", g)

    @property
    def alpha(self) -> float:
        return self.beta - self.gamma


@dataclass(frozen=True)
class RiskSpec:
    """Which estimator to evaluate and its parameters.

    Costs are fixed at 1 unless the estimator is cost-sensitive; the
    cost-sensitive estimator with c_fn = c_fp = 1 evaluates identically to
    the unbiased one.  ``clamp_positive_part`` additionally clamps t1 + t2
    at zero under the non-negative estimator (an extension, default off).
    """

    estimator: Estimator = Estimator.UNBIASED
    loss: Loss = Loss.LOGISTIC
    c_fn: float = 1.0
    c_fp: float = 1.0
    clamp_positive_part: bool = False

    def __post_init__(self):
        c_fn, c_fp = float(self.c_fn), float(self.c_fp)
        if not (math.isfinite(c_fn) and c_fn >= 0.0 and math.isfinite(c_fp) and c_fp >= 0.0):
            raise DataError(f"costs must be finite and >= 0; got c_fn={self.c_fn!r}, c_fp={self.c_fp!r}")
        if self.estimator is not Estimator.COST_SENSITIVE and (c_fn != 1.0 or c_fp != 1.0):
            raise DataError("c_fn and c_fp are fixed at 1 unless the estimator is cost_sensitive")
        if self.clamp_positive_part and self.estimator is not Estimator.NON_NEGATIVE:
            raise DataError("clamp_positive_part applies only to the non_negative estimator")
        object.__setattr__(self, "c_fn", c_fn)
        object.__setattr__(self, "c_fp", c_fp)


@dataclass(frozen=True)
class TermBreakdown:
    """The five sample-average terms of the unbiased risk."""

    t1: float
    t2: float
    t3: float
    t4: float
    t5: float

    @property
    def positive_part(self) -> float:
        """False-negative part t1 + t2."""
        return self.t1 + self.t2

    @property
    def negative_part(self) -> float:
        """False-positive part (t3 + t4) + t5."""
        return (self.t3 + self.t4) + self.t5

    @property
    def bracket(self) -> float:
        """The difference-of-estimators bracket t3 + t4 targeted by the clamp."""
        return self.t3 + self.t4

    @property
    def total(self) -> float:
        """Unbiased risk, reduced as (t1 + t2) + ((t3 + t4) + t5)."""
        return self.positive_part + self.negative_part


def as_feature_matrix(name: str, x) -> np.ndarray:
    """Validate a non-empty 2-d finite feature matrix."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DataError(f"{name} must be a non-empty 2-d feature matrix")
    if not np.all(np.isfinite(arr)):
        raise DataError(f"{name} contains non-finite entries")
    return arr


def empirical_term(values) -> float:
    """Arithmetic mean with compensated summation (order-independent, exact
    under duplication).  A sum beyond float range yields inf/nan rather than
    raising, so divergence detection upstream can name the offending step."""
    arr = np.asarray(values, dtype=np.float64).reshape(-1)
    if arr.size == 0:
        raise DataError("empirical mean of an empty sample")
    try:
        return math.fsum(arr.tolist()) / arr.size
    except OverflowError:
        return math.inf if math.fsum(np.sign(arr).tolist()) > 0 else -math.inf
    except ValueError:  # -inf + inf
        return math.nan


def risk_terms(model, data, beta: float, gamma: float, loss: Loss) -> TermBreakdown:
    """Five-term breakdown at raw prior weights.

    This low-level entry point accepts gamma = 0, under which t2 and t5
    vanish and the total reduces exactly to the two-sample risk of
    :func:`pu_risk`.  Use :func:`double_pu_risk` for the validated
    estimator interface.
    """
    b, g = float(beta), float(gamma)
    if not (math.isfinite(b) and math.isfinite(g)) or b < 0.0 or g < 0.0:
        raise PriorError(f"prior weights must be finite and >= 0; got beta={beta!r}, gamma={gamma!r}")
    sj = model.score(data.positive_interest)
    sk = model.score(data.unlabeled)
    sl = model.score(data.positive_loyal)
    t1 = b * empirical_term(loss_value(loss, sj))
    t2 = -(g * empirical_term(loss_value(loss, sl)))
    t3 = empirical_term(loss_value(loss, -sk))
    t4 = -(b * empirical_term(loss_value(loss, -sj)))
    t5 = g * empirical_term(loss_value(loss, -sl))
    return TermBreakdown(t1, t2, t3, t4, t5)


def double_pu_risk(model, data, priors: ClassPriors, spec: RiskSpec) -> tuple[float, TermBreakdown]:
    """Evaluate the selected risk estimator on the three observable samples.

    Returns the estimator value and the raw five-term breakdown (the
    breakdown is always unclamped and unweighted; ``breakdown.total`` is
    the unbiased value regardless of the estimator).
    """
    terms = risk_terms(model, data, priors.beta, priors.gamma, spec.loss)
    if spec.estimator is Estimator.UNBIASED:
        return terms.total, terms
    if spec.estimator is Estimator.NON_NEGATIVE:
        positive = terms.positive_part
        if spec.clamp_positive_part:
            positive = max(0.0, positive)
        return positive + (max(0.0, terms.bracket) + terms.t5), terms
    return spec.c_fn * terms.positive_part + spec.c_fp * terms.negative_part, terms


def pu_risk(model, positive_interest, unlabeled, beta: float, loss: Loss) -> float:
    """Standard two-sample unbiased risk for classifying the interest label:

        beta Ej[l(g)] + (Ek[l(-g)] - beta Ej[l(-g)])

    Accepts beta = 0 (degenerate prior) for testing; the value then reduces
    to the unlabeled term alone.
    """
    b = float(beta)
    if not math.isfinite(b) or not 0.0 <= b < 1.0:
        raise PriorError(f"beta must be in [0, 1); got {beta!r}")
    xj = as_feature_matrix("positive_interest", positive_interest)
    xk = as_feature_matrix("unlabeled", unlabeled)
    sj = model.score(xj)
    sk = model.score(xk)
    t1 = b * empirical_term(loss_value(loss, sj))
    t3 = empirical_term(loss_value(loss, -sk))
    t4 = -(b * empirical_term(loss_value(loss, -sj)))
    return t1 + (t3 + t4)


def oracle_risk(model, positive, negative, alpha: float, loss: Loss) -> float:
    """Risk computed directly from ground-truth-labeled samples of both
    target classes; used only to validate the estimators."""
    a = float(alpha)
    if not math.isfinite(a) or not 0.0 < a < 1.0:
        raise PriorError(f"alpha must be in (0, 1); got {alpha!r}")
    xp = as_feature_matrix("positive sample", positive)
    xn = as_feature_matrix("negative sample", negative)
    sp = model.score(xp)
    sn = model.score(xn)
    return a * empirical_term(loss_value(loss, sp)) + (1.0 - a) * empirical_term(loss_value(loss, -sn))


def _mean_grads(x: np.ndarray, scores: np.ndarray, loss: Loss):
    """Gradients of the two sample means over one dataset.

    Returns ((dw, db) of mean l(s), (dw, db) of mean l(-s)) for a linear
    scorer, where s = w . x + b.
    """
    n = x.shape[0]
    d_plus = np.asarray(loss_grad(loss, scores), dtype=np.float64)
    d_minus = np.asarray(loss_grad(loss, -scores), dtype=np.float64)
    plus = (x.T @ d_plus / n, float(np.mean(d_plus)))
    minus = (-(x.T @ d_minus) / n, -float(np.mean(d_minus)))
    return plus, minus


def risk_gradient(model, data, priors: ClassPriors, spec: RiskSpec) -> tuple[np.ndarray, float]:
    """Exact gradient of :func:`double_pu_risk` in (weights, bias).

    Under the non-negative estimator the max{0, .} gate zeroes the gradient
    of a clamped bracket while the bracket is negative; exactly at zero the
    unclamped branch is used.
    """
    if spec.loss not in TRAINABLE_LOSSES:
        raise NotTrainableError(
            f"loss {spec.loss.value!r} is not trainable; choose one of: "
            + ", ".join(l.value for l in TRAINABLE_LOSSES)
        )
    b, g = priors.beta, priors.gamma
    xj, xk, xl = data.positive_interest, data.unlabeled, data.positive_loyal
    sj, sk, sl = model.score(xj), model.score(xk), model.score(xl)
    (jp_w, jp_b), (jm_w, jm_b) = _mean_grads(xj, sj, spec.loss)
    (_, _), (km_w, km_b) = _mean_grads(xk, sk, spec.loss)
    (lp_w, lp_b), (lm_w, lm_b) = _mean_grads(xl, sl, spec.loss)

    # Gradients of the five terms; signs follow the term definitions.
    pos_w = b * jp_w - g * lp_w
    pos_b = b * jp_b - g * lp_b
    bracket_w = km_w - b * jm_w
    bracket_b = km_b - b * jm_b
    t5_w = g * lm_w
    t5_b = g * lm_b

    if spec.estimator is Estimator.NON_NEGATIVE:
        terms = risk_terms(model, data, b, g, spec.loss)
        if terms.bracket < 0.0:
            bracket_w = np.zeros_like(bracket_w)
            bracket_b = 0.0
        if spec.clamp_positive_part and terms.positive_part < 0.0:
            pos_w = np.zeros_like(pos_w)
            pos_b = 0.0
        return pos_w + bracket_w + t5_w, pos_b + bracket_b + t5_b

    if spec.estimator is Estimator.COST_SENSITIVE:
        grad_w = spec.c_fn * pos_w + spec.c_fp * (bracket_w + t5_w)
        grad_b = spec.c_fn * pos_b + spec.c_fp * (bracket_b + t5_b)
        return grad_w, grad_b

    return pos_w + bracket_w + t5_w, pos_b + bracket_b + t5_b
