"""Analytic per-client communication of committee resharing.

Uses the real-valued packing ``k = 2 mu n``, so a resharing hop costs
``1 / (4 mu^2 n)`` field elements per secret per client, against ``n`` for
the naive protocol.  Sizes are decimal (1 MB = 1e6 bytes).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from dmm.factorization import SCENARIOS

# per-client bytes of the secure-aggregation baseline, quoted for comparison only
SECAGG_REFERENCE = {"so": 16.2e6, "femnist": 4.07e6}


@dataclass(frozen=True)
class CostScenario:
    dimension: int
    iterations: int
    n: int = 64
    mu: float = 1 / 6
    bits: int = 32
    mechanism: str = "honaker"  # or "optimal"
    target: str = "lrp"  # or "naive"
    dataset: str = ""

    def __post_init__(self):
        if self.mechanism not in ("honaker", "optimal"):
            raise ValueError(f"unknown mechanism {self.mechanism!r}")
        if self.target not in ("lrp", "naive"):
            raise ValueError(f"unknown target {self.target!r}")

    @classmethod
    def preset(cls, dataset: str, mechanism: str, target: str = "lrp") -> "CostScenario":
        s = SCENARIOS[(dataset, mechanism)]
        return cls(s.dimension, s.iterations, s.n, s.mu, s.bits, mechanism, target, dataset)

    @property
    def element_bytes(self) -> float:
        return self.bits / 8

    @property
    def reshared_vectors(self) -> int:
        """Noise vectors reshared at the worst iteration."""
        if self.mechanism == "honaker":
            return math.ceil(math.log2(self.iterations))
        return self.iterations - 1


def lrp_bytes_per_client(s: CostScenario) -> float:
    return s.dimension * s.reshared_vectors / (4 * s.mu**2 * s.n) * s.element_bytes


def naive_bytes_per_client(s: CostScenario) -> float:
    return s.dimension * s.reshared_vectors * s.n * s.element_bytes


def bytes_per_client(s: CostScenario) -> float:
    return lrp_bytes_per_client(s) if s.target == "lrp" else naive_bytes_per_client(s)


def all_inclusive_bytes(s: CostScenario) -> float:
    """Resharing plus round-1 sharings of gradient and noise and the output shares."""
    k = 2 * s.mu * s.n
    extra = (2 * s.dimension * s.n / k + s.dimension / k) * s.element_bytes
    return lrp_bytes_per_client(s) + extra


def per_secret_overhead(mu: float, n: int | None = None) -> float:
    """Field elements per reshared secret: total, or per client when ``n`` is given."""
    total = 1 / (4 * mu * mu)
    return total if n is None else total / n


def format_bytes(b: float) -> str:
    for unit, scale in (("TB", 1e12), ("GB", 1e9), ("MB", 1e6), ("KB", 1e3)):
        if b >= scale:
            return f"{b / scale:.3g} {unit}"
    return f"{b:.0f} B"


@dataclass(frozen=True)
class CostRow:
    dataset: str
    mechanism: str
    iterations: int
    reshared_vectors: int
    lrp_bytes: float
    naive_bytes: float
    all_inclusive_bytes: float
    secagg_reference: float


def cost_row(dataset: str, mechanism: str, **overrides) -> CostRow:
    s = replace(CostScenario.preset(dataset, mechanism), **overrides)
    return CostRow(
        dataset,
        mechanism,
        s.iterations,
        s.reshared_vectors,
        lrp_bytes_per_client(s),
        naive_bytes_per_client(s),
        all_inclusive_bytes(s),
        SECAGG_REFERENCE.get(dataset, float("nan")),
    )


def simulated_reshare_bytes(n: int, mu, padded_dimension: int, bits: int = 32) -> int:
    """Per-client bytes of one reshared vector with integer packing and padded tail batches."""
    from fractions import Fraction

    k = math.floor(2 * Fraction(mu).limit_denominator(10**6) * n)
    batches = -(-padded_dimension // (k * k))
    return n * math.ceil(bits / 8) * batches
