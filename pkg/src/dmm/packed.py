"""Packed Shamir secret sharing over a prime field.

A k-vector of secrets is stored at the points ``-1, ..., -k`` of a random
polynomial of degree ``t_c + k - 1``; party ``i`` holds the evaluation at
``i``.  Any ``t_c`` shares are uniformly distributed, any ``t_c + k`` shares
determine every secret through public Lagrange coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

from dmm.field import PrimeField


class InsufficientShares(ValueError):
    pass


@lru_cache(maxsize=4096)
def _lagrange(modulus: int, points: tuple[int, ...], target: int) -> tuple[int, ...]:
    coeffs = []
    for i, xi in enumerate(points):
        num, den = 1, 1
        for j, xj in enumerate(points):
            if j != i:
                num = num * (target - xj) % modulus
                den = den * (xi - xj) % modulus
        coeffs.append(num * pow(den, -1, modulus) % modulus)
    return tuple(coeffs)


def lagrange_coefficients(fld: PrimeField, points: Sequence[int], target: int) -> tuple[int, ...]:
    """Coefficients ``c_i`` with ``sum_i c_i f(points[i]) = f(target)`` for ``deg f < len(points)``."""
    pts = tuple(int(p) % fld.modulus for p in points)
    if len(set(pts)) != len(pts):
        raise ValueError("interpolation points must be distinct")
    return _lagrange(fld.modulus, pts, int(target) % fld.modulus)


@dataclass(frozen=True)
class SharingParams:
    field: PrimeField
    n: int
    t_c: int
    k: int
    share_points: tuple[int, ...] = ()
    secret_points: tuple[int, ...] = ()

    def __post_init__(self):
        q = self.field.modulus
        if not self.share_points:
            object.__setattr__(self, "share_points", tuple(range(1, self.n + 1)))
        if not self.secret_points:
            object.__setattr__(self, "secret_points", tuple((q - j) % q for j in range(1, self.k + 1)))
        if self.k < 1 or self.t_c < 0:
            raise ValueError("need k >= 1 and t_c >= 0")
        if len(self.share_points) != self.n or len(self.secret_points) != self.k:
            raise ValueError("point lists do not match n and k")
        pts = [p % q for p in self.share_points + self.secret_points]
        if len(set(pts)) != len(pts):
            raise ValueError("share and secret points must be pairwise distinct")
        if self.n + self.k >= q:
            raise ValueError("field too small for n + k distinct points")
        if self.degree >= self.n:
            raise ValueError(f"degree t_c + k - 1 = {self.degree} must be below n = {self.n}")

    @property
    def degree(self) -> int:
        return self.t_c + self.k - 1

    @property
    def threshold(self) -> int:
        """Minimum number of shares needed for reconstruction."""
        return self.t_c + self.k

    def point_of(self, party: int) -> int:
        """Evaluation point of 1-based party index ``party``."""
        return self.share_points[party - 1]

    def coefficients(self, parties: Sequence[int], j: int) -> tuple[int, ...]:
        """Lagrange coefficients of the given 1-based parties for secret slot ``j`` (1-based)."""
        if len(parties) < self.threshold:
            raise InsufficientShares(
                f"insufficient shares: {len(parties)} < t_c + k = {self.threshold}"
            )
        return lagrange_coefficients(
            self.field, [self.point_of(i) for i in parties], self.secret_points[j - 1]
        )

    def coefficient_matrix(self, parties: Sequence[int]) -> np.ndarray:
        """``(len(parties), k)`` array whose column ``m`` reconstructs slot ``m + 1``."""
        cols = [self.coefficients(tuple(parties), j) for j in range(1, self.k + 1)]
        return np.array(cols, dtype=np.uint64).T.copy()

    @property
    def _encoder(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return _encoder_matrices(self)


@lru_cache(maxsize=256)
def _encoder_matrices(params: SharingParams) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    # f(x) = L(x) + V(x) r(x): L interpolates the secrets, V vanishes on the
    # secret points, r carries the t_c uniform coefficients.
    q = params.field.modulus
    spts = params.secret_points
    basis = np.array(
        [lagrange_coefficients(params.field, spts, x) for x in params.share_points], dtype=np.uint64
    )  # (n, k)
    vanish = []
    for x in params.share_points:
        v = 1
        for s in spts:
            v = v * (x - s) % q
        vanish.append(v)
    powers = np.array(
        [[pow(x, e, q) for e in range(params.t_c)] for x in params.share_points], dtype=np.uint64
    ).reshape(params.n, params.t_c)
    return basis, np.array(vanish, dtype=np.uint64), powers


def share_array(secrets, params: SharingParams, rng) -> np.ndarray:
    """Vectorized sharing: ``(..., k)`` secrets to ``(..., n)`` shares.

    ``rng`` needs an ``integers(low, high, size, dtype)`` method (a
    ``numpy.random.Generator`` or a stand-in).
    """
    fld = params.field
    s = fld.array(secrets)
    if s.shape[-1] != params.k:
        raise ValueError(f"expected secret vectors of length k = {params.k}, got {s.shape[-1]}")
    basis, vanish, powers = params._encoder
    out = fld.matmul(s, basis.T)
    if params.t_c:
        r = np.asarray(
            rng.integers(0, fld.modulus, size=s.shape[:-1] + (params.t_c,), dtype=np.uint64),
            dtype=np.uint64,
        )
        masked = fld.matmul(r, powers.T)
        out = fld.vadd(out, fld.vmul(masked, vanish))
    return out


@dataclass(frozen=True)
class PackedSharing:
    shares: tuple[int, ...]
    params: SharingParams = field(repr=False)

    def subset(self, parties: Sequence[int]) -> dict[int, int]:
        return {i: self.shares[i - 1] for i in parties}

    def __add__(self, other: "PackedSharing") -> "PackedSharing":
        f = self.params.field
        return PackedSharing(tuple(f.add(a, b) for a, b in zip(self.shares, other.shares)), self.params)

    def scale(self, c: int) -> "PackedSharing":
        f = self.params.field
        return PackedSharing(tuple(f.mul(c, a) for a in self.shares), self.params)


def share(secrets: Sequence[int], params: SharingParams, rng) -> PackedSharing:
    if len(secrets) != params.k:
        raise ValueError(f"expected {params.k} secrets, got {len(secrets)}")
    out = share_array(np.array([int(s) for s in secrets], dtype=object), params, rng)
    return PackedSharing(tuple(int(v) for v in out), params)


def recons_coeff(params: SharingParams, gamma: Sequence[int], i: int, j: int) -> int:
    """Lagrange coefficient of party ``i`` within ``gamma`` for secret slot ``j``."""
    gamma = tuple(sorted(gamma))
    if i not in gamma:
        raise ValueError(f"party {i} not in the reconstruction set")
    return params.coefficients(gamma, j)[gamma.index(i)]


def reconstruct(shares: Mapping[int, int], j: int, params: SharingParams) -> int:
    parties = tuple(sorted(shares))
    lam = params.coefficients(parties, j)
    q = params.field.modulus
    return sum(c * (int(shares[i]) % q) for c, i in zip(lam, parties)) % q


def reconstruct_array(shares: np.ndarray, parties: Sequence[int], params: SharingParams) -> np.ndarray:
    """Reconstruct all k slots from ``(len(parties), ...)`` shares; returns ``(..., k)``."""
    lam = params.coefficient_matrix(tuple(parties))  # (|G|, k)
    sh = np.moveaxis(np.asarray(shares, dtype=np.uint64), 0, -1)
    return params.field.matmul(sh, lam)
