"""Discrete Gaussian noise via discrete-Laplace rejection sampling.

A candidate ``Y = G1 - G2`` (two i.i.d. geometric variables, i.e. a discrete
Laplace with scale ``t = floor(s) + 1``) is accepted with probability
``exp(-(|Y| - s^2/t)^2 / (2 s^2))``; accepted values follow ``N_Z(0, s^2)``
exactly, up to the double-precision evaluation of ``exp`` and of the
geometric and uniform draws.  The sampler is vectorized: candidates are
drawn in blocks and accepted ones are kept in draw order, so a fixed seed
gives a fixed stream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class NoiseSpec:
    scale: float  # s = sigma / gamma
    dimension: int = 1

    def __post_init__(self):
        if not self.scale >= 0.5:
            raise ValueError(f"discrete Gaussian scale must be >= 1/2, got {self.scale}")


def laplace_scale(s: float) -> int:
    return math.floor(s) + 1


def accept_probability(y: np.ndarray, s: float) -> np.ndarray:
    t = laplace_scale(s)
    return np.exp(-((np.abs(y) - s * s / t) ** 2) / (2 * s * s))


def from_draws(g1: np.ndarray, g2: np.ndarray, u: np.ndarray, s: float) -> np.ndarray:
    """Deterministic core: candidates ``g1 - g2`` filtered by uniforms ``u``.

    Swapping ``g1`` and ``g2`` negates every accepted value, which is the
    symmetry the mass function requires.
    """
    y = np.asarray(g1, dtype=np.int64) - np.asarray(g2, dtype=np.int64)
    return y[np.asarray(u) < accept_probability(y, s)]


def sample_array(spec: NoiseSpec | float, size: int, rng) -> np.ndarray:
    s = spec.scale if isinstance(spec, NoiseSpec) else float(spec)
    if not s >= 0.5:
        raise ValueError(f"discrete Gaussian scale must be >= 1/2, got {s}")
    p = -math.expm1(-1.0 / laplace_scale(s))  # success probability of each geometric
    out: list[np.ndarray] = []
    have = 0
    while have < size:
        block = max(64, int(1.6 * (size - have)) + 16)
        g1 = rng.geometric(p, block) - 1
        g2 = rng.geometric(p, block) - 1
        u = rng.random(block)
        acc = from_draws(g1, g2, u, s)
        out.append(acc)
        have += acc.size
    return np.concatenate(out)[:size]


def sample(spec: NoiseSpec | float, rng) -> int:
    return int(sample_array(spec, 1, rng)[0])


def pmf(x, s: float, terms: int | None = None) -> np.ndarray:
    """Reference mass function with a truncated-series normalizer."""
    terms = terms if terms is not None else int(12 * s) + 12
    ys = np.arange(1, terms + 1)
    norm = 1 + 2 * np.exp(-(ys**2) / (2 * s * s)).sum()
    x = np.asarray(x, dtype=np.float64)
    return np.exp(-(x**2) / (2 * s * s)) / norm
