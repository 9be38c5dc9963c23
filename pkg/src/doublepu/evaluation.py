"""Metrics against ground-truth target labels, and the resampling harness
that checks the risk estimators against an oracle."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .data import LabeledData, MixtureConfig, generate_mixture, split_to_pu
from .exceptions import DataError
from .losses import Loss, loss_value
from .risk import ClassPriors, RiskSpec, double_pu_risk, empirical_term, oracle_risk
from .rng import child_seeds


@dataclass(frozen=True)
class EvalReport:
    """Threshold metrics plus ranking quality on a labeled test sample.

    ``auc`` is None when the sample contains a single target class.
    """

    auc: float | None
    tp: int
    fp: int
    tn: int
    fn: int
    cost_weighted_error: float
    zero_one_risk: float

    @property
    def n(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @property
    def accuracy(self) -> float:
        return (self.tp + self.tn) / self.n


def _scores_and_labels(scores, labels):
    s = np.asarray(scores, dtype=np.float64).reshape(-1)
    y = np.asarray(labels).reshape(-1)
    if s.size != y.size:
        raise DataError(f"got {s.size} scores but {y.size} labels")
    if s.size == 0:
        raise DataError("empty score sequence")
    if not np.all(np.isin(y, (-1, 1))):
        raise DataError("labels must be -1 or +1")
    return s, y == 1


def roc_auc(scores, labels) -> float:
    """Probability that a random positive outranks a random negative, ties
    counting one half (computed via average ranks, O(n log n))."""
    s, pos = _scores_and_labels(scores, labels)
    n_pos = int(pos.sum())
    n_neg = s.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DataError("roc_auc needs both classes present")
    _, inverse, counts = np.unique(s, return_inverse=True, return_counts=True)
    cumulative = np.cumsum(counts)
    average_rank = cumulative - (counts - 1) / 2.0  # 1-based
    rank_sum = float(np.sum(average_rank[inverse][pos]))
    u = rank_sum - n_pos * (n_pos + 1) / 2.0
    return u / (n_pos * n_neg)


def roc_curve_points(scores, labels) -> np.ndarray:
    """Operating points (fpr, tpr, threshold) for the rule score > threshold.

    Thresholds run from the highest score (rates 0, 0) down to -inf
    (rates 1, 1), one row per distinct score plus the final catch-all row.
    """
    s, pos = _scores_and_labels(scores, labels)
    n_pos = int(pos.sum())
    n_neg = s.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DataError("an ROC curve needs both classes present")
    order = np.argsort(-s, kind="mergesort")
    s_desc = s[order]
    pos_desc = pos[order]
    boundaries = np.flatnonzero(np.diff(s_desc) != 0)  # last index of each tie group
    group_ends = np.concatenate([boundaries, [s.size - 1]])
    cum_tp = np.cumsum(pos_desc)
    cum_fp = np.cumsum(~pos_desc)
    thresholds = np.concatenate([[s_desc[0]], s_desc[group_ends[:-1] + 1], [-np.inf]])
    tp = np.concatenate([[0], cum_tp[group_ends]])
    fp = np.concatenate([[0], cum_fp[group_ends]])
    return np.column_stack([fp / n_neg, tp / n_pos, thresholds])


def evaluate(model, test: LabeledData, threshold: float = 0.0, c_fn: float = 1.0, c_fp: float = 1.0) -> EvalReport:
    """Confusion counts, cost-weighted error, zero-one risk, and ROC-AUC
    against the derived target labels.

    Predictions follow the documented tie rule (score equal to the
    threshold predicts -1).  A single-class test sample only suppresses the
    AUC; every other field is still computed.
    """
    if len(test) == 0:
        raise DataError("empty test sample")
    for name, c in (("c_fn", c_fn), ("c_fp", c_fp)):
        if not math.isfinite(float(c)) or float(c) < 0.0:
            raise DataError(f"{name} must be finite and >= 0; got {c!r}")
    w = test.w
    scores = model.score(test.x)
    predicted = np.where(scores > threshold, 1, -1)
    tp = int(np.sum((predicted == 1) & (w == 1)))
    fp = int(np.sum((predicted == 1) & (w == -1)))
    tn = int(np.sum((predicted == -1) & (w == -1)))
    fn = int(np.sum((predicted == -1) & (w == 1)))
    n = len(test)
    cost_weighted_error = (c_fn * fn + c_fp * fp) / n
    zero_one = empirical_term(loss_value(Loss.ZERO_ONE, w * (scores - threshold)))
    both_classes = 0 < int(np.sum(w == 1)) < n
    auc = roc_auc(scores, w) if both_classes else None
    return EvalReport(auc, tp, fp, tn, fn, cost_weighted_error, zero_one)


@dataclass(frozen=True)
class BiasCheckResult:
    """Monte-Carlo comparison of an estimator's mean against the oracle risk."""

    mean_risk: float
    std_error: float
    oracle_risk: float
    z_score: float
    resamples: int


def bias_check(
    config: MixtureConfig,
    model,
    resamples: int,
    spec: RiskSpec,
    *,
    y_label_frac: float = 0.7,
    z_label_frac: float = 0.5,
    oracle_size: int = 100_000,
    seed: int | None = None,
) -> BiasCheckResult:
    """Redraw the partially labeled samples ``resamples`` times for a fixed
    model and standardize the gap between the estimator's mean and the
    oracle risk on a large fully labeled sample.

    Every redraw runs on its own sub-seed derived from the master seed
    (``config.seed`` unless overridden), so results are reproducible and
    the aggregation order is fixed.
    """
    resamples = int(resamples)
    if resamples < 30:
        raise DataError(f"resamples must be at least 30; got {resamples}")
    total = config.total_count
    if total == 0:
        raise DataError("mixture generates no samples")
    n_interest = sum(c.count for c in config.components if c.y == 1)
    n_loyal = sum(c.count for c in config.components if c.y == 1 and c.z == 1)
    priors = ClassPriors(n_interest / total, n_loyal / total)

    master = config.seed if seed is None else int(seed)
    seeds = child_seeds(master, 2 * resamples + 1)
    values = []
    for r in range(resamples):
        sample = generate_mixture(replace(config, seed=seeds[2 * r]))
        triple, _ = split_to_pu(sample, y_label_frac, z_label_frac, seed=seeds[2 * r + 1])
        value, _ = double_pu_risk(model, triple, priors, spec)
        values.append(value)

    mean = math.fsum(values) / resamples
    sd = math.sqrt(math.fsum((v - mean) ** 2 for v in values) / (resamples - 1))
    std_error = sd / math.sqrt(resamples)

    factor = max(1, math.ceil(oracle_size / total))
    oracle_sample = generate_mixture(replace(config.scaled(factor), seed=seeds[-1]))
    w = oracle_sample.w
    oracle = oracle_risk(
        model, oracle_sample.x[w == 1], oracle_sample.x[w == -1], priors.alpha, spec.loss
    )
    gap = mean - oracle
    if std_error == 0.0:
        z = 0.0 if gap == 0.0 else math.copysign(math.inf, gap)
    else:
        z = gap / std_error
    return BiasCheckResult(mean, std_error, oracle, z, resamples)
