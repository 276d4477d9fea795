"""Seeded toy-data generators for the noise-sweep experiments and tests.

Each draw comes from its own PCG64 stream keyed by (seed, purpose), so the
regression targets stay byte-identical while feature noise is swept, and
noise at level t is exactly t times the level-1 draw for the same seed.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

_STREAMS = {
    "features": 1,
    "feature-noise": 2,
    "labels": 3,
    "label-noise": 4,
    "targets": 5,
}

# unit-separated equilateral triangle, one vertex per class
CLUSTER_CENTERS = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, np.sqrt(3.0) / 2.0]])
CLUSTER_STD = 0.1
REGRESSION_SLOPE = 2.0
REGRESSION_NOISE_STD = 0.1

KINDS = ("classification3", "regression1d", "random")


@dataclass(frozen=True)
class ToyConfig:
    seed: int
    n: int
    noise_level: float = 0.0
    kind: str = "random"

    def __post_init__(self):
        if self.seed < 0:
            raise InvalidInputError("seed must be nonnegative")
        if self.n < 2:
            raise InvalidInputError("n must be >= 2")
        if self.noise_level < 0:
            raise InvalidInputError("noise_level must be >= 0")
        if self.kind not in KINDS:
            raise InvalidInputError(f"unknown kind {self.kind!r}")


def _stream(seed: int, purpose: str) -> np.random.Generator:
    return np.random.default_rng([seed, _STREAMS[purpose]])


def gen_clusters(cfg: ToyConfig):
    """Three 2-D Gaussian clusters (labels 0..2) plus isotropic feature noise.

    Returns (F, labels) with F an n x 2 float64 matrix and labels int64.
    """
    if cfg.kind != "classification3":
        raise InvalidInputError(f"gen_clusters requires kind='classification3', got {cfg.kind!r}")
    labels = np.arange(cfg.n, dtype=np.int64) % 3
    base = CLUSTER_CENTERS[labels]
    base = base + CLUSTER_STD * _stream(cfg.seed, "features").standard_normal((cfg.n, 2))
    noise = _stream(cfg.seed, "feature-noise").standard_normal((cfg.n, 2))
    return base + cfg.noise_level * noise, labels


def gen_regression(cfg: ToyConfig):
    """1-D regression: y = 2x + eps observed through a noisy feature x' = x + t*eta.

    x is uniform on [0, 1], eps has std 0.1. The targets depend only on the
    seed, not on noise_level, so a noise sweep holds y fixed.
    Returns (F, Y), both n x 1 float64.
    """
    if cfg.kind != "regression1d":
        raise InvalidInputError(f"gen_regression requires kind='regression1d', got {cfg.kind!r}")
    x = _stream(cfg.seed, "features").uniform(0.0, 1.0, cfg.n)
    eps = REGRESSION_NOISE_STD * _stream(cfg.seed, "label-noise").standard_normal(cfg.n)
    y = REGRESSION_SLOPE * x + eps
    eta = _stream(cfg.seed, "feature-noise").standard_normal(cfg.n)
    return (x + cfg.noise_level * eta).reshape(-1, 1), y.reshape(-1, 1)


def gen_random(cfg: ToyConfig, D: int, K: int):
    """IID standard Gaussian features (n x D) and targets (n x K)."""
    if D < 1 or K < 1:
        raise InvalidInputError("D and K must be >= 1")
    F = _stream(cfg.seed, "features").standard_normal((cfg.n, D))
    Y = _stream(cfg.seed, "targets").standard_normal((cfg.n, K))
    return F, Y
