"""Exhaustive check of two chained resharing hops (three committees)."""

from __future__ import annotations

import itertools

import numpy as np

from dmm.field import PrimeField
from dmm.packed import SharingParams, lagrange_coefficients, share_array


def admissible_source_sets(p: SharingParams):
    parties = range(1, p.n + 1)
    for size in range(p.threshold, p.n + 1):
        yield from itertools.combinations(parties, size)


def _lambda_stack(p: SharingParams, sets) -> np.ndarray:
    """``(len(sets), n, k)`` recovery weights, zero for sources outside the set."""
    out = np.zeros((len(sets), p.n, p.k), dtype=np.uint64)
    for s, src in enumerate(sets):
        out[s, [i - 1 for i in src]] = p.coefficient_matrix(src)
    return out


def _recover_all_sets(R: np.ndarray, lam: np.ndarray, q: int) -> np.ndarray:
    """``R[i, j]`` reshare from source i to target j; returns ``(sets, targets, k)``."""
    qq = np.uint64(q)
    acc = np.zeros((lam.shape[0], R.shape[1], lam.shape[2]), dtype=np.uint64)
    for i in range(R.shape[0]):
        acc = (acc + (R[i][None, :, None] * lam[:, i, None, :]) % qq) % qq
    return acc


def chain_check(n: int, t_c: int, k: int, seed: int = 0, modulus: int | None = None) -> tuple[int, int]:
    """Run committee 1 -> 2 -> 3 under every pair of admissible source sets.

    Committee 3 must hold ``k`` consistent sharings of degree ``t_c + k - 1``
    whose secrets equal the originals (two transposes cancel).  Consistency
    of all ``n`` shares implies every reconstruction set of size ``t_c + k``
    recovers the same secrets.  Returns ``(paths checked, failures)``.
    """
    fld = PrimeField(modulus) if modulus else PrimeField()
    q = fld.modulus
    p = SharingParams(fld, n, t_c, k)
    rng = np.random.default_rng([seed, n, t_c, k])
    Z = rng.integers(0, q, size=(k, k), dtype=np.uint64)  # Z[l, m]: slot m of sharing l
    S1 = share_array(Z, p, rng)  # (k sharings, n parties)

    sets = list(admissible_source_sets(p))
    lam = _lambda_stack(p, sets)
    base = tuple(range(1, p.threshold + 1))
    ext = np.array([lagrange_coefficients(fld, base, x) for x in range(1, n + 1)], dtype=np.uint64)
    sec = p.coefficient_matrix(base)  # (t_c + k, k)

    R1 = share_array(S1.T, p, rng)  # (sources, targets)
    hop1 = _recover_all_sets(R1, lam, q)  # (sets, targets, k): party j's share of sharing m
    checked = failures = 0
    for s1 in range(len(sets)):
        H = hop1[s1]
        # after one hop, sharing m holds (Z[0, m], ..., Z[k-1, m])
        if not np.array_equal(fld.matmul(H[: p.threshold].T, sec), Z.T):
            failures += 1
        R2 = share_array(H, p, rng)
        hop2 = _recover_all_sets(R2, lam, q)  # (sets, n, k)
        top = hop2[:, : p.threshold, :]  # (sets, t_c + k, k)
        predicted = np.stack([fld.matmul(ext, top[s]) for s in range(len(sets))])
        consistent = np.all(predicted == hop2, axis=(1, 2))
        secrets = np.stack([fld.matmul(top[s].T, sec) for s in range(len(sets))])  # (sets, k, k)
        correct = np.all(secrets == Z[None], axis=(1, 2))
        checked += len(sets)
        failures += int(np.sum(~(consistent & correct)))
    return checked, failures


def all_parameter_triples(max_n: int = 8):
    for n in range(2, max_n + 1):
        for k in range(1, n + 1):
            for t_c in range(0, n - k + 1):
                yield n, t_c, k
