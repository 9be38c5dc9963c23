"""Classifiers for interested-but-not-loyal individuals, trained from
positive-interest, unlabeled, and positive-loyalty samples via an unbiased
empirical risk with non-negative and cost-sensitive variants."""

__version__ = "0.1.0"

from .data import (
    FEATURES_ONLY,
    FULLY_LABELED,
    LabeledData,
    MixtureComponent,
    MixtureConfig,
    PuTriple,
    default_mixture,
    empirical_priors,
    generate_mixture,
    load_csv,
    save_csv,
    split_to_pu,
    three_way_split,
    train_test_split,
)
from .evaluation import BiasCheckResult, EvalReport, bias_check, evaluate, roc_auc, roc_curve_points
from .exceptions import (
    DataError,
    LossDomainError,
    NotTrainableError,
    PriorError,
    TrainingDivergedError,
)
from .losses import TRAINABLE_LOSSES, Loss, loss_grad, loss_value, sigmoid
from .model import LinearScorer, load_model, save_model
from .risk import (
    ClassPriors,
    Estimator,
    RiskSpec,
    TermBreakdown,
    double_pu_risk,
    empirical_term,
    oracle_risk,
    pu_risk,
    risk_gradient,
    risk_terms,
)
from .train import TraceEntry, TrainConfig, save_trace, train, train_trace_final_risk

__all__ = [
    "BiasCheckResult",
    "ClassPriors",
    "DataError",
    "Estimator",
    "EvalReport",
    "FEATURES_ONLY",
    "FULLY_LABELED",
    "LabeledData",
    "LinearScorer",
    "Loss",
    "LossDomainError",
    "MixtureComponent",
    "MixtureConfig",
    "NotTrainableError",
    "PriorError",
    "PuTriple",
    "RiskSpec",
    "TermBreakdown",
    "TraceEntry",
    "TrainConfig",
    "TrainingDivergedError",
    "TRAINABLE_LOSSES",
    "bias_check",
    "default_mixture",
    "double_pu_risk",
    "empirical_priors",
    "empirical_term",
    "evaluate",
    "generate_mixture",
    "load_csv",
    "load_model",
    "loss_grad",
    "loss_value",
    "oracle_risk",
    "pu_risk",
    "risk_gradient",
    "risk_terms",
    "roc_auc",
    "roc_curve_points",
    "save_csv",
    "save_model",
    "save_trace",
    "sigmoid",
    "split_to_pu",
    "three_way_split",
    "train",
    "train_test_split",
    "train_trace_final_risk",
]
