"""End-to-end synthetic pipeline.

Generates three labeled Gaussian clusters, hides most labels the way a
marketing team would encounter them (a purchase list, the population, a
subscriber list), trains a logistic-loss linear scorer on the unbiased
risk, and evaluates against the withheld ground truth.

Run:  python3 demos/simulation_pipeline.py
"""

import numpy as np

import doublepu as dp


def main():
    config = dp.default_mixture(seed=7)
    data = dp.generate_mixture(config)
    print(f"generated {len(data)} points in {data.dim}-d; "
          f"{int(np.sum(data.w == 1))} are target-positive (interested, not loyal)")

    # 70% of the interest-positives become the labeled interest sample; half
    # of those that are also loyal become the loyalty sample; the unlabeled
    # sample is the full population.
    triple, held_out = dp.split_to_pu(data, y_label_frac=0.7, z_label_frac=0.5, seed=8)
    j, k, l = triple.counts
    print(f"observable samples: J={j} interest-positive, K={k} unlabeled, L={l} loyalty-positive")

    priors = dp.empirical_priors(data)
    print(f"priors: beta={priors.beta:.3f}, gamma={priors.gamma:.3f} -> alpha={priors.alpha:.3f}")

    spec = dp.RiskSpec(estimator=dp.Estimator.UNBIASED, loss=dp.Loss.LOGISTIC)
    cfg = dp.TrainConfig(spec=spec, learning_rate=0.3, epochs=400, seed=0)
    model, trace = dp.train(triple, priors, cfg)
    print(f"trained {cfg.epochs} epochs: risk {trace[0].risk:.4f} -> {trace[-1].risk:.4f}, "
          f"final gradient norm {trace[-1].grad_norm:.2e}")

    w1, w2 = model.weights
    print(f"decision boundary (posterior = 0.5): {w1:.3f} x1 + {w2:.3f} x2 + {model.bias:.3f} = 0")

    report = dp.evaluate(model, held_out)
    print(f"withheld-label evaluation: accuracy {report.accuracy:.3f}, auc {report.auc:.4f}, "
          f"confusion tp={report.tp} fp={report.fp} tn={report.tn} fn={report.fn}")

    fresh = dp.generate_mixture(dp.MixtureConfig(config.components, seed=1007))
    fresh_report = dp.evaluate(model, fresh)
    recall = float(np.mean(model.posterior(fresh.x[fresh.w == 1]) > 0.5))
    print(f"fresh sample: accuracy {fresh_report.accuracy:.3f}, auc {fresh_report.auc:.4f}, "
          f"{100 * recall:.1f}% of target-positives get posterior > 0.5")


if __name__ == "__main__":
    main()
