"""Client-side gradient conditioning and the server-side inverse.

Clients clip to norm ``c``, scale by ``1/gamma``, rotate with a random-sign
Walsh-Hadamard transform and round to integers, retrying the rounding until
the result lies in the norm ball the privacy analysis assumes.  The server
maps field residues back to signed integers, undoes the rotation and
rescales by ``gamma``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from dmm.field import PrimeField


class RoundingFailure(RuntimeError):
    pass


@dataclass(frozen=True)
class DiscretizationParams:
    clip_norm: float
    granularity: float
    rounding_bias: float
    dimension: int
    flatten_seed: int = 0

    def __post_init__(self):
        if self.clip_norm <= 0 or self.granularity <= 0:
            raise ValueError("clip norm and granularity must be positive")
        if not 0 <= self.rounding_bias < 1:
            raise ValueError("rounding bias must lie in [0, 1)")
        if self.dimension < 1:
            raise ValueError("dimension must be positive")

    @property
    def padded_dimension(self) -> int:
        return 1 << (self.dimension - 1).bit_length()

    def norm_bound(self, dimension: int | None = None) -> float:
        return rounding_norm_bound(
            self.clip_norm / self.granularity,
            self.padded_dimension if dimension is None else dimension,
            self.rounding_bias,
        )


def rounding_norm_bound(scaled_clip: float, d: int, beta: float) -> float:
    """Norm ball radius accepted by conditional rounding.

    ``min(c/gamma + sqrt(d), sqrt(c^2/gamma^2 + d/4 + sqrt(2 ln(1/beta)) (c/gamma + sqrt(d)/2)))``;
    ``beta = 0`` leaves only the first branch.
    """
    loose = scaled_clip + math.sqrt(d)
    if beta <= 0:
        return loose
    tight = math.sqrt(
        scaled_clip**2 + d / 4 + math.sqrt(2 * math.log(1 / beta)) * (scaled_clip + math.sqrt(d) / 2)
    )
    return min(loose, tight)


@dataclass(frozen=True)
class FlattenSpec:
    """Random-sign diagonal followed by the normalized Walsh-Hadamard transform."""

    dimension: int
    seed: int = 0
    rho: float = 1.0
    signs: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        rng = np.random.default_rng(self.seed)
        object.__setattr__(self, "signs", rng.choice(np.array([-1.0, 1.0]), size=self.padded_dimension))

    @property
    def padded_dimension(self) -> int:
        return 1 << (self.dimension - 1).bit_length()

    @classmethod
    def from_params(cls, params: DiscretizationParams) -> "FlattenSpec":
        return cls(params.dimension, params.flatten_seed)


def fwht(x: np.ndarray) -> np.ndarray:
    """Orthonormal Walsh-Hadamard transform along the last axis (length a power of two)."""
    y = np.array(x, dtype=np.float64, copy=True)
    n = y.shape[-1]
    if n & (n - 1):
        raise ValueError("length must be a power of two")
    lead = y.shape[:-1]
    h = 1
    while h < n:
        y = y.reshape(lead + (n // (2 * h), 2, h))
        a = y[..., 0, :] + y[..., 1, :]
        b = y[..., 0, :] - y[..., 1, :]
        y = np.stack([a, b], axis=-2)
        h *= 2
    return y.reshape(lead + (n,)) / math.sqrt(n)


def clip_scale(g, params: DiscretizationParams) -> np.ndarray:
    g = np.asarray(g, dtype=np.float64)
    if g.shape[-1] != params.dimension:
        raise ValueError(f"expected dimension {params.dimension}, got {g.shape[-1]}")
    norm = float(np.linalg.norm(g))
    factor = 1.0 if norm <= params.clip_norm else params.clip_norm / norm
    return g * (factor / params.granularity)


def flatten(x, spec: FlattenSpec) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    padded = np.zeros(x.shape[:-1] + (spec.padded_dimension,))
    padded[..., : x.shape[-1]] = x
    return fwht(padded * spec.signs)


def unflatten(y, spec: FlattenSpec) -> np.ndarray:
    y = np.asarray(y, dtype=np.float64)
    return (fwht(y) * spec.signs)[..., : spec.dimension]


def randomized_round(x, rng) -> np.ndarray:
    """Unbiased coordinate-wise rounding to the integers."""
    x = np.asarray(x, dtype=np.float64)
    lo = np.floor(x)
    up = rng.random(x.shape) < (x - lo)
    return (lo + up).astype(np.int64)


def cond_round(x, params: DiscretizationParams, rng, max_attempts: int = 10_000) -> np.ndarray:
    """Randomized rounding conditioned on the result landing in the norm ball."""
    x = np.asarray(x, dtype=np.float64)
    bound = params.norm_bound(x.shape[-1])
    for _ in range(max_attempts):
        out = randomized_round(x, rng)
        if math.sqrt(float(np.dot(out, out))) <= bound:
            return out
    raise RoundingFailure(f"rounding acceptance failure after {max_attempts} attempts")


def discretize(g, params: DiscretizationParams, spec: FlattenSpec, rng) -> np.ndarray:
    """Full client pipeline: clip, scale, flatten, conditionally round."""
    return cond_round(flatten(clip_scale(g, params), spec), params, rng)


def server_postprocess(y, fld: PrimeField, params: DiscretizationParams, spec: FlattenSpec) -> np.ndarray:
    signed = fld.decode_signed_array(y).astype(np.float64)
    return params.granularity * unflatten(signed, spec)
