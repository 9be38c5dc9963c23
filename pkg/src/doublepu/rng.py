"""Seeded random streams.

All sampling in the package runs on PCG64 uniform streams, with normal
deviates produced by an explicit Box-Muller transform, so every experiment
is fully specified by its integer seed and reproduces across platforms.
"""

from __future__ import annotations

import numpy as np

from .exceptions import DataError


def make_rng(seed) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed)))


def child_seeds(seed, n: int) -> list[int]:
    """Derive ``n`` independent integer sub-seeds from a master seed."""
    state = np.random.SeedSequence(int(seed)).generate_state(int(n), dtype=np.uint64)
    return [int(s) for s in state]


def standard_normal(rng: np.random.Generator, shape):
    """Standard normal deviates via Box-Muller on the generator's uniforms."""
    if isinstance(shape, (int, np.integer)):
        shape = (int(shape),)
    n = int(np.prod(shape, dtype=np.int64)) if len(shape) else 1
    half = (n + 1) // 2
    u1 = 1.0 - rng.random(half)  # in (0, 1]; log is finite
    u2 = rng.random(half)
    radius = np.sqrt(-2.0 * np.log(u1))
    angle = 2.0 * np.pi * u2
    z = np.concatenate([radius * np.cos(angle), radius * np.sin(angle)])[:n]
    return z.reshape(shape)


def gaussian_sample(rng: np.random.Generator, mean, cov, count: int) -> np.ndarray:
    """Draw ``count`` points from N(mean, cov) using the shared stream.

    The covariance must be symmetric positive definite.
    """
    mu = np.asarray(mean, dtype=np.float64).reshape(-1)
    sigma = np.asarray(cov, dtype=np.float64)
    d = mu.size
    if sigma.shape != (d, d):
        raise DataError(f"covariance shape {sigma.shape} does not match mean dimension {d}")
    if not np.allclose(sigma, sigma.T, rtol=1e-12, atol=1e-12):
        raise DataError("covariance must be symmetric")
    try:
        chol = np.linalg.cholesky(sigma)
    except np.linalg.LinAlgError:
        raise DataError("covariance must be symmetric positive definite") from None
    z = standard_normal(rng, (int(count), d))
    return mu + z @ chol.T
