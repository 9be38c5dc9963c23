"""Acceptance suite: one test per release criterion, each printing a
PASS line with its measured numbers (run with -s to see them inline)."""

import math
import time
from pathlib import Path

import numpy as np
import pytest

from doublepu import (
    ClassPriors,
    Estimator,
    LinearScorer,
    Loss,
    PuTriple,
    RiskSpec,
    TrainConfig,
    bias_check,
    default_mixture,
    double_pu_risk,
    evaluate,
    generate_mixture,
    pu_risk,
    risk_gradient,
    split_to_pu,
    three_way_split,
    train,
    train_test_split,
)
from doublepu.cli import run
from doublepu.data import MixtureComponent, MixtureConfig
from doublepu.rng import make_rng, standard_normal

REPO = Path(__file__).resolve().parent.parent


def report(criterion: int, message: str) -> None:
    print(f"ACCEPTANCE {criterion}: PASS - {message}")


def random_triple(rng, d=3, j=6, k=9, l=4):
    return PuTriple(rng.normal(size=(j, d)), rng.normal(size=(k, d)), rng.normal(size=(l, d)))


def random_model(rng, d=3):
    return LinearScorer(rng.normal(size=d) * 0.7, float(rng.normal() * 0.7))


def random_priors(rng):
    gamma = float(rng.uniform(0.05, 0.4))
    return ClassPriors(float(rng.uniform(gamma + 0.01, 0.9)), gamma)


def test_criterion_1_unbiasedness():
    """Mean of the unbiased estimator over 200 redraws matches the oracle
    risk on a 100k-sample labeled set within 3 standard errors, for the
    zero-one, logistic, and squared losses, in under 60 seconds."""
    started = time.perf_counter()
    config = default_mixture(seed=2024)
    assert tuple(c.count for c in config.components) == (500, 1000, 1000)
    draw = standard_normal(make_rng(555), 3)
    model = LinearScorer(draw[:2], float(draw[2]))
    z_scores = {}
    for loss in (Loss.ZERO_ONE, Loss.LOGISTIC, Loss.SQUARED):
        result = bias_check(config, model, resamples=200, spec=RiskSpec(loss=loss))
        assert result.resamples == 200
        assert abs(result.z_score) < 3.0, f"{loss.value}: z = {result.z_score}"
        z_scores[loss.value] = result.z_score
    elapsed = time.perf_counter() - started
    assert elapsed < 60.0
    report(1, "z-scores " + ", ".join(f"{k} {v:+.2f}" for k, v in z_scores.items())
           + f"; {elapsed:.1f}s for 3 x 200 resamples")


def test_criterion_2_reduction_identities():
    """(a) unit-cost cost-sensitive == unbiased bit for bit on 100 random
    inputs; (b) unbiased minus the two-sample risk equals t2 + t5 within
    1e-12; (c) an always-positive scorer under zero-one loss scores exactly
    1 - beta + gamma."""
    rng = np.random.default_rng(12)
    losses = (Loss.SQUARED, Loss.LOGISTIC, Loss.HINGE, Loss.ZERO_ONE)
    max_gap_b = 0.0
    for i in range(100):
        triple, model, priors = random_triple(rng), random_model(rng), random_priors(rng)
        loss = losses[i % 4]
        v_cs, _ = double_pu_risk(
            model, triple, priors,
            RiskSpec(estimator=Estimator.COST_SENSITIVE, loss=loss, c_fn=1.0, c_fp=1.0),
        )
        v_ub, terms = double_pu_risk(model, triple, priors, RiskSpec(loss=loss))
        assert v_cs == v_ub  # (a) bit for bit
        two_sample = pu_risk(model, triple.positive_interest, triple.unlabeled, priors.beta, loss)
        gap = abs((v_ub - two_sample) - (terms.t2 + terms.t5))
        max_gap_b = max(max_gap_b, gap)
        assert gap <= 1e-12  # (b)
    max_gap_c = 0.0
    always_positive = LinearScorer(np.zeros(3), 1.0)
    for _ in range(20):
        triple, priors = random_triple(rng), random_priors(rng)
        value, _ = double_pu_risk(always_positive, triple, priors, RiskSpec(loss=Loss.ZERO_ONE))
        gap = abs(value - (1.0 - priors.beta + priors.gamma))
        max_gap_c = max(max_gap_c, gap)
        assert gap <= 1e-12  # (c)
    report(2, f"100/100 bit-identical; decomposition gap <= {max_gap_b:.2e}; "
              f"always-positive gap <= {max_gap_c:.2e}")


def _finite_difference(model, triple, priors, spec, h=1e-5):
    def value(weights, bias):
        return double_pu_risk(LinearScorer(weights, bias), triple, priors, spec)[0]

    grad_w = np.zeros(model.dim)
    for i in range(model.dim):
        wp, wm = model.weights.copy(), model.weights.copy()
        wp[i] += h
        wm[i] -= h
        grad_w[i] = (value(wp, model.bias) - value(wm, model.bias)) / (2 * h)
    grad_b = (value(model.weights, model.bias + h) - value(model.weights, model.bias - h)) / (2 * h)
    return grad_w, grad_b


def _fd_close(analytic, numeric):
    a = np.append(analytic[0], analytic[1])
    n = np.append(numeric[0], numeric[1])
    return np.all(np.abs(a - n) <= 1e-8 + 1e-5 * np.abs(n))


def _hinge_safe(model, triple, margin=1e-3):
    scores = np.concatenate([
        model.score(triple.positive_interest),
        model.score(triple.unlabeled),
        model.score(triple.positive_loyal),
    ])
    return bool(np.all(np.abs(np.abs(scores) - 1.0) > margin))


def test_criterion_3_gradient_correctness():
    """50 random (model, data, spec) cases per trainable loss pass central
    finite differences at 1e-5 relative / 1e-8 absolute, covering both
    sides of the non-negative clamp."""
    for loss in (Loss.SQUARED, Loss.LOGISTIC, Loss.HINGE):
        rng = np.random.default_rng(2000 + hash(loss.value) % 100)
        checked = {"plain": 0, "nn_pos": 0, "nn_neg": 0}
        want = {"plain": 20, "nn_pos": 15, "nn_neg": 15}
        guard = 0
        while sum(checked.values()) < 50:
            guard += 1
            assert guard < 10_000
            triple, model, priors = random_triple(rng), random_model(rng), random_priors(rng)
            if loss is Loss.HINGE and not _hinge_safe(model, triple):
                continue
            spec_nn = RiskSpec(estimator=Estimator.NON_NEGATIVE, loss=loss)
            _, terms = double_pu_risk(model, triple, priors, spec_nn)
            if checked["plain"] < want["plain"]:
                spec = (
                    RiskSpec(loss=loss)
                    if checked["plain"] % 2 == 0
                    else RiskSpec(estimator=Estimator.COST_SENSITIVE, loss=loss, c_fn=2.0, c_fp=50.0)
                )
                assert _fd_close(
                    risk_gradient(model, triple, priors, spec),
                    _finite_difference(model, triple, priors, spec),
                )
                checked["plain"] += 1
                continue
            side = "nn_pos" if terms.bracket > 1e-3 else ("nn_neg" if terms.bracket < -1e-3 else None)
            if side is None or checked[side] >= want[side]:
                continue
            assert _fd_close(
                risk_gradient(model, triple, priors, spec_nn),
                _finite_difference(model, triple, priors, spec_nn),
            )
            checked[side] += 1
        assert checked == want
    report(3, "3 losses x 50 cases (20 plain/cost, 15 clamped-off, 15 clamped-on) match FD")


def test_criterion_4_simulation_pipeline():
    """Full pipeline on the default mixture with logistic loss and the
    unbiased estimator: held-out accuracy > 0.9, AUC > 0.95, and more than
    90% of held-out target-positive points get posterior > 0.5."""
    config = default_mixture(seed=2024)
    data = generate_mixture(config)
    triple, held_out = split_to_pu(data, 0.7, 0.5, seed=2025)
    cfg = TrainConfig(spec=RiskSpec(loss=Loss.LOGISTIC), learning_rate=0.3, epochs=400, seed=0)
    model, trace = train(triple, ClassPriors(0.6, 0.4), cfg)
    fresh = generate_mixture(MixtureConfig(config.components, seed=3024))
    for name, sample in (("held-out", held_out), ("fresh", fresh)):
        rep = evaluate(model, sample)
        positives = sample.x[sample.w == 1]
        posterior_recall = float(np.mean(model.posterior(positives) > 0.5))
        assert rep.accuracy > 0.9, name
        assert rep.auc > 0.95, name
        assert posterior_recall > 0.9, name
    rep = evaluate(model, fresh)
    posterior_recall = float(np.mean(model.posterior(fresh.x[fresh.w == 1]) > 0.5))
    report(4, f"fresh sample: accuracy {rep.accuracy:.3f}, auc {rep.auc:.4f}, "
              f"posterior>0.5 recall {posterior_recall:.3f}")


def test_criterion_5_marketing_shaped_pipeline():
    """Three-way-split pipeline on an 11,162-row synthetic surrogate with
    the supplied priors beta=0.4738, gamma=0.0046 and a 100:1
    false-positive cost: completes and beats the all-ties baseline with
    AUC > 0.55 on every one of 5 seeds."""
    eye = np.eye(2)

    def surrogate(seed):
        return MixtureConfig(
            (
                MixtureComponent(mean=(0.8, 0.0), cov=eye, count=5238, y=1, z=-1),
                MixtureComponent(mean=(1.0, 0.3), cov=eye, count=51, y=1, z=1),
                MixtureComponent(mean=(-0.8, 0.0), cov=eye, count=5873, y=-1, z=-1),
            ),
            seed=seed,
        )

    supplied = ClassPriors(0.4738, 0.0046)
    spec = RiskSpec(estimator=Estimator.COST_SENSITIVE, loss=Loss.LOGISTIC, c_fn=1.0, c_fp=100.0)
    aucs = []
    for seed in range(5):
        data = generate_mixture(surrogate(seed * 31 + 7))
        assert len(data) == 11_162
        train_part, test_part = train_test_split(data, 0.2, seed=seed * 31 + 8)
        triple = three_way_split(
            train_part, (0.1, 0.1, 0.8), ("y=+1", "all", "y=+1,z=+1"), seed=seed * 31 + 9
        )
        cfg = TrainConfig(spec=spec, learning_rate=0.002, epochs=400, seed=seed)
        model, _ = train(triple, supplied, cfg)
        rep = evaluate(model, test_part, c_fn=1.0, c_fp=100.0)
        n_pos = int(np.sum(test_part.w == 1))
        n_neg = len(test_part) - n_pos
        pair_wins = rep.auc * n_pos * n_neg
        baseline = 0.5 * n_pos * n_neg
        assert rep.auc > 0.55, f"seed {seed}: auc {rep.auc}"
        assert pair_wins > baseline + 0.01 * n_pos * n_neg  # clear pair-count margin
        aucs.append(rep.auc)
    report(5, f"aucs over 5 seeds: {', '.join(f'{a:.3f}' for a in aucs)} (all > 0.55)")


def test_criterion_6_non_negative_stability():
    """With a shrunken unlabeled sample the unbiased risk trace over-trains
    below zero; the non-negative estimator's recorded bracket stays >= 0 at
    every epoch and its final risk dominates the unclamped one."""
    rng = np.random.default_rng(99)
    triple = PuTriple(
        rng.normal(size=(40, 1)) + 2.0,
        rng.normal(size=(3, 1)) - 2.0,  # the shrunken unlabeled sample
        rng.normal(size=(5, 1)),
    )
    priors = ClassPriors(0.6, 0.1)
    epochs, lr = 400, 0.05
    _, trace_ub = train(
        triple, priors, TrainConfig(spec=RiskSpec(loss=Loss.LOGISTIC), learning_rate=lr, epochs=epochs)
    )
    model_nn, trace_nn = train(
        triple, priors,
        TrainConfig(
            spec=RiskSpec(estimator=Estimator.NON_NEGATIVE, loss=Loss.LOGISTIC),
            learning_rate=lr, epochs=epochs,
        ),
    )
    crossing = next((e.epoch for e in trace_ub if e.risk < 0.0), None)
    assert crossing is not None, "unbiased trace never went below zero"
    assert trace_ub[0].risk > 0.0  # it over-trains into negative territory
    assert all(entry.bracket >= 0.0 for entry in trace_nn)
    assert trace_nn[-1].risk >= trace_ub[-1].risk
    # pointwise dominance at the final corrected parameters as well
    v_nn, _ = double_pu_risk(
        model_nn, triple, priors, RiskSpec(estimator=Estimator.NON_NEGATIVE, loss=Loss.LOGISTIC)
    )
    v_ub, _ = double_pu_risk(model_nn, triple, priors, RiskSpec(loss=Loss.LOGISTIC))
    assert v_nn >= v_ub
    report(6, f"unbiased risk crosses 0 at epoch {crossing} (final "
              f"{trace_ub[-1].risk:.1f}); corrected brackets all >= 0, final "
              f"{trace_nn[-1].risk:.3f}")


def test_criterion_7_cli_determinism(tmp_path, monkeypatch):
    """simulate/split/train with fixed seeds produce byte-identical artifacts
    across two runs (relative paths keep the recorded command lines equal)."""
    shipped = REPO / "configs" / "simulation.cfg"
    outputs = {}
    for attempt in ("first", "second"):
        workdir = tmp_path / attempt
        workdir.mkdir()
        monkeypatch.chdir(workdir)
        assert run(["simulate", "--config", str(shipped), "--out", "sim.csv", "--seed", "7"]) == 0
        assert run(["split", "--config", str(shipped), "--data", "sim.csv", "--out-dir", "splits"]) == 0
        assert run(
            [
                "train", "--config", str(shipped),
                "--positive", "splits/positive_interest.csv",
                "--unlabeled", "splits/unlabeled.csv",
                "--loyal", "splits/positive_loyal.csv",
                "--priors", "splits/priors.cfg",
                "--epochs", "60",
                "--out", "model.txt", "--trace", "trace.txt",
            ]
        ) == 0
        outputs[attempt] = {
            name: (workdir / name).read_bytes()
            for name in (
                "sim.csv",
                "splits/positive_interest.csv",
                "splits/unlabeled.csv",
                "splits/positive_loyal.csv",
                "splits/heldout.csv",
                "splits/priors.cfg",
                "model.txt",
                "trace.txt",
            )
        }
    assert outputs["first"] == outputs["second"]
    report(7, f"{len(outputs['first'])} artifacts byte-identical across two runs")
