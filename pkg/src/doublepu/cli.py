"""Command-line pipelines.

Subcommands: simulate, split, train, predict, evaluate, bias-check.  Each
accepts ``--config`` (key = value defaults) and ``--seed``; command-line
flags override config values.  Every artifact file starts with a comment
line recording the tool version, the command line, and the seed.

Exit status: 0 success, 1 usage error, 2 data or validation error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import (
    get_bool,
    get_float,
    get_floats,
    get_int,
    get_str,
    mixture_from_config,
    parse_config,
)
from .data import (
    FEATURES_ONLY,
    FULLY_LABELED,
    PuTriple,
    empirical_priors,
    generate_mixture,
    load_csv,
    save_csv,
    split_to_pu,
    three_way_split,
    train_test_split,
)
from .evaluation import bias_check, evaluate, roc_curve_points
from .exceptions import (
    DataError,
    LossDomainError,
    NotTrainableError,
    PriorError,
    TrainingDivergedError,
)
from .losses import Loss
from .model import LinearScorer, load_model, save_model
from .risk import ClassPriors, Estimator, RiskSpec, risk_terms
from .rng import child_seeds, make_rng, standard_normal
from .train import TrainConfig, save_trace, train


class UsageError(Exception):
    """Bad command line; maps to exit status 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="key = value config file supplying defaults")
    parser.add_argument("--seed", type=int, help="master seed (overrides the config)")


def _build_parser() -> _Parser:
    parser = _Parser(prog="dpu", description="Double-PU learning pipelines.")
    parser.add_argument("--version", action="version", version=f"dpu {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command")

    p = sub.add_parser("simulate", help="generate a labeled Gaussian-mixture sample as CSV")
    _add_common(p)
    p.add_argument("--out", required=True, help="output CSV path (fully labeled)")

    p = sub.add_parser("split", help="split a fully labeled CSV into the three training samples")
    _add_common(p)
    p.add_argument("--data", required=True, help="fully labeled input CSV")
    p.add_argument("--out-dir", required=True, help="directory for the split artifacts")
    p.add_argument("--mode", choices=["pu", "three-way"], help="splitting protocol (default pu)")
    p.add_argument("--y-label-frac", type=float, help="fraction of interest-positive rows labeled")
    p.add_argument("--z-label-frac", type=float, help="fraction of loyalty-positive rows labeled")
    p.add_argument("--test-frac", type=float, help="three-way mode: held-out test fraction")
    p.add_argument("--fracs", help="three-way mode: three comma-separated chunk fractions")
    p.add_argument("--filters", help="three-way mode: three semicolon-separated row filters")
    p.add_argument("--beta", type=float, help="record this beta instead of the empirical one")
    p.add_argument("--gamma", type=float, help="record this gamma instead of the empirical one")

    p = sub.add_parser("train", help="minimize the selected risk over a linear scorer")
    _add_common(p)
    p.add_argument("--positive", required=True, help="positive-interest features CSV")
    p.add_argument("--unlabeled", required=True, help="unlabeled features CSV")
    p.add_argument("--loyal", required=True, help="positive-loyalty features CSV")
    p.add_argument("--priors", help="config file carrying beta and gamma")
    p.add_argument("--beta", type=float, help="class prior p(y=+1)")
    p.add_argument("--gamma", type=float, help="class prior p(y=+1, z=+1)")
    p.add_argument("--loss", help="squared | logistic | hinge")
    p.add_argument("--estimator", help="unbiased | non_negative | cost_sensitive")
    p.add_argument("--c-fn", type=float, help="false-negative cost (cost_sensitive only)")
    p.add_argument("--c-fp", type=float, help="false-positive cost (cost_sensitive only)")
    p.add_argument("--clamp-positive-part", action="store_true", default=None,
                   help="also clamp the positive bracket (non_negative only)")
    p.add_argument("--learning-rate", type=float)
    p.add_argument("--epochs", type=int)
    p.add_argument("--batch-size", type=int, help="minibatch size (default: full batch)")
    p.add_argument("--l2-penalty", type=float)
    p.add_argument("--init", help="zeros | gaussian")
    p.add_argument("--init-scale", type=float)
    p.add_argument("--out", required=True, help="output model file")
    p.add_argument("--trace", help="optional 'epoch risk grad_norm' trace file")

    p = sub.add_parser("predict", help="score a features CSV with a trained model")
    _add_common(p)
    p.add_argument("--model", required=True, help="model file")
    p.add_argument("--data", required=True, help="features CSV")
    p.add_argument("--out", required=True, help="output CSV (score, posterior, label)")
    p.add_argument("--threshold", type=float, help="decision threshold (default 0)")

    p = sub.add_parser("evaluate", help="metrics on a fully labeled test CSV")
    _add_common(p)
    p.add_argument("--model", required=True, help="model file")
    p.add_argument("--test", required=True, help="fully labeled test CSV")
    p.add_argument("--threshold", type=float, help="decision threshold (default 0)")
    p.add_argument("--c-fn", type=float, help="false-negative cost for the error report")
    p.add_argument("--c-fp", type=float, help="false-positive cost for the error report")
    p.add_argument("--roc-out", help="write 'fpr tpr threshold' curve points here")
    p.add_argument("--positive", help="positive-interest features CSV (adds the risk breakdown)")
    p.add_argument("--unlabeled", help="unlabeled features CSV")
    p.add_argument("--loyal", help="positive-loyalty features CSV")
    p.add_argument("--priors", help="config file carrying beta and gamma")
    p.add_argument("--beta", type=float, help="class prior for the risk breakdown")
    p.add_argument("--gamma", type=float, help="class prior for the risk breakdown")
    p.add_argument("--loss", help="loss for the risk breakdown (default zero_one)")

    p = sub.add_parser("bias-check", help="resample the training sets to compare an estimator "
                                          "against the oracle risk")
    _add_common(p)
    p.add_argument("--resamples", type=int, help="number of redraws (default 200, minimum 30)")
    p.add_argument("--model", help="model file; omitted: a seeded random model")
    p.add_argument("--model-seed", type=int, help="seed for the random model")
    p.add_argument("--loss", help="loss to check (default zero_one)")
    p.add_argument("--estimator", help="estimator to check (default unbiased)")
    p.add_argument("--y-label-frac", type=float)
    p.add_argument("--z-label-frac", type=float)
    p.add_argument("--oracle-size", type=int, help="labeled oracle sample size (default 100000)")

    return parser


def _load_cfg(args) -> dict[str, str]:
    return parse_config(args.config) if args.config else {}


def _pick(flag, cfg, key, default, getter):
    if flag is not None:
        return flag
    return getter(cfg, key, default)


def _seed_of(args, cfg) -> int:
    return int(_pick(args.seed, cfg, "seed", 0, get_int))


def _header(argv: list[str], seed: int) -> str:
    return f"dpu {__version__} | cmd: dpu {' '.join(argv)} | seed: {seed}"


def _spec_from(args, cfg, default_loss: str, default_estimator: str) -> RiskSpec:
    loss = Loss.parse(_pick(getattr(args, "loss", None), cfg, "loss", default_loss, get_str))
    estimator = Estimator.parse(
        _pick(getattr(args, "estimator", None), cfg, "estimator", default_estimator, get_str)
    )
    return RiskSpec(
        estimator=estimator,
        loss=loss,
        c_fn=_pick(getattr(args, "c_fn", None), cfg, "c_fn", 1.0, get_float),
        c_fp=_pick(getattr(args, "c_fp", None), cfg, "c_fp", 1.0, get_float),
        clamp_positive_part=_pick(
            getattr(args, "clamp_positive_part", None), cfg, "clamp_positive_part", False, get_bool
        ),
    )


def _priors_from(args, cfg) -> ClassPriors:
    beta, gamma = args.beta, args.gamma
    if getattr(args, "priors", None):
        priors_cfg = parse_config(args.priors)
        beta = beta if beta is not None else get_float(priors_cfg, "beta")
        gamma = gamma if gamma is not None else get_float(priors_cfg, "gamma")
    beta = beta if beta is not None else get_float(cfg, "beta")
    gamma = gamma if gamma is not None else get_float(cfg, "gamma")
    if beta is None or gamma is None:
        raise UsageError("class priors are required: pass --beta and --gamma (or --priors/config)")
    return ClassPriors(beta, gamma)


def _cmd_simulate(args, argv) -> int:
    cfg = _load_cfg(args)
    seed = _seed_of(args, cfg)
    mixture = mixture_from_config(cfg, seed)
    sample = generate_mixture(mixture)
    save_csv(args.out, sample, comment=_header(argv, seed))
    print(f"wrote {len(sample)} samples (d={sample.dim}) to {args.out}")
    return 0


def _write_priors_file(path, priors: ClassPriors, source: str, header: str) -> None:
    text = (
        f"# {header}\n# priors: {source}\n"
        f"beta = {priors.beta:.17g}\ngamma = {priors.gamma:.17g}\n"
    )
    Path(path).write_text(text, encoding="utf-8")


def _cmd_split(args, argv) -> int:
    cfg = _load_cfg(args)
    seed = _seed_of(args, cfg)
    header = _header(argv, seed)
    mode = _pick(args.mode, cfg, "mode", "pu", get_str)
    if mode not in ("pu", "three-way"):
        raise UsageError(f"unknown split mode {mode!r}")
    if (args.beta is None) != (args.gamma is None):
        raise UsageError("pass --beta and --gamma together, or neither")
    data = load_csv(args.data, FULLY_LABELED)

    if mode == "pu":
        y_frac = _pick(args.y_label_frac, cfg, "y_label_frac", 0.7, get_float)
        z_frac = _pick(args.z_label_frac, cfg, "z_label_frac", 0.5, get_float)
        triple, held_out = split_to_pu(data, y_frac, z_frac, seed)
    else:
        test_frac = _pick(args.test_frac, cfg, "test_frac", 0.2, get_float)
        fracs = _pick(
            tuple(float(t) for t in args.fracs.split(",")) if args.fracs else None,
            cfg, "fracs", (0.1, 0.1, 0.8), get_floats,
        )
        filters_raw = _pick(args.filters, cfg, "filters", "y=+1;all;y=+1,z=+1", get_str)
        filters = tuple(f.strip() for f in filters_raw.split(";"))
        train_part, held_out = train_test_split(data, test_frac, seed)
        triple = three_way_split(train_part, fracs, filters, seed)

    if args.beta is not None:
        priors = ClassPriors(args.beta, args.gamma)
        source = "user-supplied"
    else:
        priors = empirical_priors(data)
        source = f"empirical frequencies over {len(data)} rows of {args.data}"

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_csv(out / "positive_interest.csv", triple.positive_interest, comment=header)
    save_csv(out / "unlabeled.csv", triple.unlabeled, comment=header)
    save_csv(out / "positive_loyal.csv", triple.positive_loyal, comment=header)
    save_csv(out / "heldout.csv", held_out, comment=header)
    _write_priors_file(out / "priors.cfg", priors, source, header)
    j, k, l = triple.counts
    print(f"wrote J={j} positive-interest, K={k} unlabeled, L={l} positive-loyal rows to {out}")
    print(f"recorded beta={priors.beta:.17g} gamma={priors.gamma:.17g} ({source})")
    return 0


def _cmd_train(args, argv) -> int:
    cfg = _load_cfg(args)
    seed = _seed_of(args, cfg)
    triple = PuTriple(
        load_csv(args.positive, FEATURES_ONLY),
        load_csv(args.unlabeled, FEATURES_ONLY),
        load_csv(args.loyal, FEATURES_ONLY),
    )
    priors = _priors_from(args, cfg)
    spec = _spec_from(args, cfg, default_loss="logistic", default_estimator="unbiased")
    config = TrainConfig(
        spec=spec,
        learning_rate=_pick(args.learning_rate, cfg, "learning_rate", 0.1, get_float),
        epochs=_pick(args.epochs, cfg, "epochs", 100, get_int),
        batch_size=_pick(args.batch_size, cfg, "batch_size", None, get_int),
        l2_penalty=_pick(args.l2_penalty, cfg, "l2_penalty", 0.0, get_float),
        seed=seed,
        init=_pick(args.init, cfg, "init", "zeros", get_str),
        init_scale=_pick(args.init_scale, cfg, "init_scale", 0.01, get_float),
    )
    model, trace = train(triple, priors, config)
    header = _header(argv, seed)
    save_model(args.out, model, comment=header)
    if args.trace:
        save_trace(args.trace, trace, comment=header)
    last = trace[-1]
    print(f"trained {config.epochs} epochs; final risk {last.risk:.6g}, "
          f"gradient norm {last.grad_norm:.6g}; model written to {args.out}")
    return 0


def _cmd_predict(args, argv) -> int:
    cfg = _load_cfg(args)
    seed = _seed_of(args, cfg)
    model = load_model(args.model)
    features = load_csv(args.data, FEATURES_ONLY)
    threshold = _pick(args.threshold, cfg, "threshold", 0.0, get_float)
    scores = model.score(features)
    posteriors = model.posterior(features)
    labels = np.where(scores > threshold, 1, -1)
    lines = ["# " + _header(argv, seed), "score,posterior,label"]
    lines.extend(
        f"{s:.17g},{p:.17g},{lab:d}" for s, p, lab in zip(scores, posteriors, labels)
    )
    Path(args.out).write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"scored {len(scores)} rows to {args.out}")
    return 0


def _cmd_evaluate(args, argv) -> int:
    cfg = _load_cfg(args)
    seed = _seed_of(args, cfg)
    model = load_model(args.model)
    test = load_csv(args.test, FULLY_LABELED)
    threshold = _pick(args.threshold, cfg, "threshold", 0.0, get_float)
    c_fn = _pick(args.c_fn, cfg, "c_fn", 1.0, get_float)
    c_fp = _pick(args.c_fp, cfg, "c_fp", 1.0, get_float)
    report = evaluate(model, test, threshold, c_fn, c_fp)
    print(f"auc {report.auc:.17g}" if report.auc is not None else "auc absent")
    print(f"tp {report.tp}")
    print(f"fp {report.fp}")
    print(f"tn {report.tn}")
    print(f"fn {report.fn}")
    print(f"accuracy {report.accuracy:.17g}")
    print(f"cost_weighted_error {report.cost_weighted_error:.17g}")
    print(f"zero_one_risk {report.zero_one_risk:.17g}")

    triple_flags = (args.positive, args.unlabeled, args.loyal)
    if any(flag is not None for flag in triple_flags):
        if any(flag is None for flag in triple_flags):
            raise UsageError("--positive, --unlabeled, and --loyal must be passed together")
        priors = _priors_from(args, cfg)
        loss = Loss.parse(_pick(args.loss, cfg, "loss", "zero_one", get_str))
        triple = PuTriple(
            load_csv(args.positive, FEATURES_ONLY),
            load_csv(args.unlabeled, FEATURES_ONLY),
            load_csv(args.loyal, FEATURES_ONLY),
        )
        terms = risk_terms(model, triple, priors.beta, priors.gamma, loss)
        for name in ("t1", "t2", "t3", "t4", "t5"):
            print(f"{name} {getattr(terms, name):.17g}")
        print(f"total {terms.total:.17g}")

    if args.roc_out:
        points = roc_curve_points(model.score(test.x), test.w)
        lines = ["# " + _header(argv, seed), "# fpr tpr threshold"]
        lines.extend(f"{fpr:.17g} {tpr:.17g} {thr:.17g}" for fpr, tpr, thr in points)
        Path(args.roc_out).write_text("\n".join(lines) + "\n", encoding="utf-8")
        print(f"wrote {len(points)} roc points to {args.roc_out}")
    return 0


def _cmd_bias_check(args, argv) -> int:
    cfg = _load_cfg(args)
    seed = _seed_of(args, cfg)
    mixture = mixture_from_config(cfg, seed)
    spec = _spec_from(args, cfg, default_loss="zero_one", default_estimator="unbiased")
    if args.model:
        model = load_model(args.model)
    else:
        model_seed = _pick(args.model_seed, cfg, "model_seed", child_seeds(seed, 3)[2], get_int)
        draw = standard_normal(make_rng(model_seed), mixture.dim + 1)
        model = LinearScorer(draw[:-1], float(draw[-1]))
        print(f"model random (seed {model_seed}): weights {np.array2string(model.weights, precision=4)}, "
              f"bias {model.bias:.4g}")
    result = bias_check(
        mixture,
        model,
        resamples=_pick(args.resamples, cfg, "resamples", 200, get_int),
        spec=spec,
        y_label_frac=_pick(args.y_label_frac, cfg, "y_label_frac", 0.7, get_float),
        z_label_frac=_pick(args.z_label_frac, cfg, "z_label_frac", 0.5, get_float),
        oracle_size=_pick(args.oracle_size, cfg, "oracle_size", 100_000, get_int),
        seed=seed,
    )
    print(f"mean_risk {result.mean_risk:.17g}")
    print(f"std_error {result.std_error:.17g}")
    print(f"oracle_risk {result.oracle_risk:.17g}")
    print(f"z_score {result.z_score:.17g}")
    print(f"resamples {result.resamples}")
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "split": _cmd_split,
    "train": _cmd_train,
    "predict": _cmd_predict,
    "evaluate": _cmd_evaluate,
    "bias-check": _cmd_bias_check,
}


def run(argv=None) -> int:
    """Entry point returning the exit status instead of raising SystemExit."""
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    try:
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:  # --help / --version print and exit 0
            return 0 if exc.code in (0, None) else int(exc.code)
        if args.command is None:
            raise UsageError("a command is required (simulate, split, train, predict, "
                             "evaluate, bias-check)")
        return _COMMANDS[args.command](args, argv)
    except UsageError as exc:
        print(f"dpu: usage error: {exc}", file=sys.stderr)
        return 1
    except (DataError, PriorError, LossDomainError, NotTrainableError) as exc:
        print(f"dpu: error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"dpu: error: {exc}", file=sys.stderr)
        return 2
    except (TrainingDivergedError, FloatingPointError) as exc:
        print(f"dpu: numerical failure: {exc}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(run())
