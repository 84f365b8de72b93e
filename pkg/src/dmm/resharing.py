"""Handing shared secrets from one committee to the next.

Two protocols live here.  ``naive_reshare`` is the classical one: every party
Shamir-shares its share, costing ``n**2`` field elements per secret.
``reshare``/``recover`` is the batched linear resharing protocol: a party
holding its shares of ``k`` packed sharings (``k**2`` secrets) re-packs those
``k`` shares into one fresh packed sharing, so a hop costs ``n**2`` elements
for ``k**2`` secrets.  Recovery returns sharings of the *transposed* secret
matrix: recovered sharing ``m`` holds slot ``m`` of every input sharing.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Collection, Mapping, Sequence

import numpy as np

from dmm.packed import InsufficientShares, SharingParams, share_array


class TooManyDropouts(InsufficientShares):
    pass


@dataclass(frozen=True)
class ReshareBatch:
    """Party ``party``'s shares of the ``k`` packed sharings of one batch."""

    shares: np.ndarray  # (..., k)
    party: int
    source_committee: int = 0
    target_committee: int = 1

    def __post_init__(self):
        object.__setattr__(self, "shares", np.asarray(self.shares, dtype=np.uint64))


@dataclass(frozen=True)
class RecoveredShares:
    """Party ``party``'s shares of the ``k`` recovered (transposed) sharings."""

    shares: np.ndarray  # (..., k), entry m is the share of recovered sharing m + 1
    party: int


@dataclass(frozen=True)
class NaiveReshareResult:
    shares: tuple[int, ...]
    elements_sent: int


def naive_reshare(
    shares: Mapping[int, int],
    params: SharingParams,
    rng,
    next_params: SharingParams | None = None,
) -> NaiveReshareResult:
    """Reshare a (t_c+1)-of-n sharing by sharing every surviving share.

    ``shares`` maps surviving 1-based party indices to their shares of a
    ``k = 1`` sharing.  Each survivor distributes a sharing of its share; the
    next committee combines them with the reconstruction coefficients of the
    survivors.  ``elements_sent`` counts every field element put on the wire.
    """
    if params.k != 1:
        raise ValueError("naive resharing operates on non-packed (k = 1) sharings")
    nxt = next_params or params
    survivors = tuple(sorted(shares))
    if len(survivors) < params.threshold:
        raise TooManyDropouts(
            f"abort: too many dropouts ({len(survivors)} survivors < t_c + 1 = {params.threshold})"
        )
    lam = params.coefficients(survivors, 1)
    secrets = np.array([[shares[i]] for i in survivors], dtype=object)
    sub = share_array(secrets, nxt, rng)  # (|survivors|, n')
    fld = params.field
    lam_arr = np.array(lam, dtype=np.uint64)
    combined = fld.matmul(lam_arr[None, :], sub)[0]
    # every party of the source committee sends n' elements per secret
    return NaiveReshareResult(tuple(int(v) for v in combined), params.n * nxt.n)


def reshare(batch: ReshareBatch | np.ndarray, params: SharingParams, rng) -> np.ndarray:
    """Fresh packed sharing of a party's k-vector of shares.

    Accepts a ``ReshareBatch`` or a bare ``(..., k)`` array; returns
    ``(..., n)``: entry ``j`` goes to party ``j`` of the next committee.
    """
    vec = batch.shares if isinstance(batch, ReshareBatch) else np.asarray(batch, dtype=np.uint64)
    if vec.shape[-1] != params.k:
        raise ValueError(f"reshare batch must hold exactly k = {params.k} shares")
    return share_array(vec, params, rng)


def surviving_sources(params: SharingParams, drop_set: Collection[int]) -> tuple[int, ...]:
    drop = set(drop_set)
    return tuple(i for i in range(1, params.n + 1) if i not in drop)


def recovery_matrix(params: SharingParams, sources: Sequence[int]) -> np.ndarray:
    sources = tuple(sorted(sources))
    if len(sources) < params.threshold:
        raise TooManyDropouts(
            f"abort: too many dropouts ({len(sources)} surviving resharers < t_c + k = {params.threshold})"
        )
    return params.coefficient_matrix(sources)


def recover(
    drop_set: Collection[int],
    received: Mapping[int, np.ndarray | int],
    params: SharingParams,
    party: int = 0,
) -> RecoveredShares:
    """Combine reshared values received by one party of the next committee.

    ``received[i]`` is the share this party got from source ``i`` (a scalar
    or an array of per-batch shares).  Sources in ``drop_set`` or absent from
    ``received`` are ignored; the recovery set is the remaining sources.
    """
    drop = set(drop_set)
    sources = tuple(sorted(i for i in received if i not in drop))
    lam = recovery_matrix(params, sources)  # (|sources|, k)
    stacked = np.stack([np.asarray(received[i], dtype=np.uint64) for i in sources])
    out = params.field.matmul(np.moveaxis(stacked, 0, -1), lam)
    return RecoveredShares(out, party)


def recover_all(
    reshared: np.ndarray, sources: Sequence[int], params: SharingParams
) -> np.ndarray:
    """Recovery for every target party at once.

    ``reshared`` has shape ``(len(sources), ..., n_targets)``: the outputs of
    ``reshare`` for each surviving source.  Returns ``(n_targets, ..., k)``.
    """
    lam = recovery_matrix(params, sources)
    x = np.moveaxis(np.asarray(reshared, dtype=np.uint64), -1, 0)  # (targets, sources, ...)
    x = np.moveaxis(x, 1, -1)  # (targets, ..., sources)
    return params.field.matmul(x, lam)
