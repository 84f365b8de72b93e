"""Adversary descriptions and an independent ledger of their effect.

Corrupted parties are limited to additive injections on the three message
classes they send: round-1 shares, reshared values and output shares.
Honest parties may drop in round 1 (nothing sent), in round 2 (round-1
sharings sent, nothing afterwards) or deliver reshares only partially.

``predict_chi`` recomputes the exact perturbation of every server output
from the adversary description alone, with its own interpolation code.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Mapping

import numpy as np

ROUND1, ROUND2, PARTIAL = 1, 2, "partial"
KINDS = ("share", "reshare", "output")


@dataclass(frozen=True)
class Injection:
    iteration: int
    party: int  # 1-based sender slot
    kind: str
    error: np.ndarray  # share/output: (batches, k); reshare: (batches,)
    target: int = 0  # receiving slot for share/reshare
    row: Hashable = None  # payload row for share/reshare

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown injection kind {self.kind!r}")
        object.__setattr__(self, "error", np.asarray(self.error, dtype=np.int64))


@dataclass(frozen=True)
class AdversarySpec:
    corrupted: Mapping[int, tuple[int, ...]] = field(default_factory=dict)
    dropouts: Mapping[int, Mapping[int, object]] = field(default_factory=dict)
    injections: tuple[Injection, ...] = ()

    def drops(self, T: int) -> dict[int, object]:
        return dict(self.dropouts.get(T, {}))

    def round1_senders(self, T: int, n: int) -> tuple[int, ...]:
        d = self.drops(T)
        return tuple(i for i in range(1, n + 1) if d.get(i) != ROUND1)

    def output_senders(self, T: int, n: int) -> tuple[int, ...]:
        d = self.drops(T)
        return tuple(i for i in range(1, n + 1) if d.get(i) not in (ROUND1, ROUND2))

    def full_resharers(self, T: int, n: int) -> tuple[int, ...]:
        d = self.drops(T)
        return tuple(i for i in range(1, n + 1) if i not in d)

    def at(self, T: int, kind: str) -> list[Injection]:
        return [e for e in self.injections if e.iteration == T and e.kind == kind]

    def validate(self, n: int, t_c: int, t_d: int, enforce_budget: bool = True) -> None:
        for T, corr in self.corrupted.items():
            if any(not 1 <= i <= n for i in corr):
                raise ValueError(f"corrupted slot out of range at iteration {T}")
            if enforce_budget and len(set(corr)) > t_c:
                raise ValueError(f"{len(set(corr))} corrupted parties exceed t_c = {t_c} at iteration {T}")
        for T, d in self.dropouts.items():
            bad = set(d) & set(self.corrupted.get(T, ()))
            if bad:
                raise ValueError(f"corrupted parties {sorted(bad)} listed as dropouts at iteration {T}")
            if any(r not in (ROUND1, ROUND2, PARTIAL) for r in d.values()):
                raise ValueError(f"dropout round must be 1, 2 or 'partial' at iteration {T}")
            if enforce_budget and len(d) > t_d:
                raise ValueError(f"{len(d)} dropouts exceed t_d = {t_d} at iteration {T}")
        for e in self.injections:
            if e.party not in self.corrupted.get(e.iteration, ()):
                raise ValueError(f"injection from honest party {e.party} at iteration {e.iteration}")

    def to_json(self) -> dict:
        return {
            "corrupted": {str(T): list(v) for T, v in self.corrupted.items()},
            "dropouts": {str(T): {str(i): r for i, r in d.items()} for T, d in self.dropouts.items()},
            "injections": [
                {
                    "iteration": e.iteration,
                    "party": e.party,
                    "kind": e.kind,
                    "target": e.target,
                    "row": list(e.row) if isinstance(e.row, tuple) else e.row,
                    "error": e.error.tolist(),
                }
                for e in self.injections
            ],
        }

    @classmethod
    def from_json(cls, obj: Mapping | None) -> "AdversarySpec":
        if not obj:
            return cls()

        def rnd(r):
            return r if r == PARTIAL else int(r)

        return cls(
            corrupted={int(T): tuple(int(i) for i in v) for T, v in obj.get("corrupted", {}).items()},
            dropouts={
                int(T): {int(i): rnd(r) for i, r in d.items()} for T, d in obj.get("dropouts", {}).items()
            },
            injections=tuple(
                Injection(
                    int(e["iteration"]),
                    int(e["party"]),
                    e["kind"],
                    np.asarray(e["error"]),
                    int(e.get("target", 0)),
                    tuple(e["row"]) if isinstance(e.get("row"), list) else e.get("row"),
                )
                for e in obj.get("injections", [])
            ),
        )


# -- independent ledger ----------------------------------------------------------


def _barycentric(q: int, xs: list[int], target: int) -> list[int]:
    """Lagrange weights at ``target`` via the barycentric form."""
    w = []
    for i, xi in enumerate(xs):
        p = 1
        for j, xj in enumerate(xs):
            if i != j:
                p = p * (xi - xj) % q
        w.append(pow(p, q - 2, q))
    terms = [wi * pow((target - xi) % q, q - 2, q) % q for wi, xi in zip(w, xs)]
    total = sum(terms) % q
    inv_total = pow(total, q - 2, q)
    return [t * inv_total % q for t in terms]


def _weights(q: int, parties: tuple[int, ...], k: int) -> np.ndarray:
    """``lam[i, m]`` over 1-based ``parties`` (evaluated at point ``i``), slot ``m`` at ``-(m+1)``."""
    xs = list(parties)
    cols = [_barycentric(q, xs, q - m - 1) for m in range(k)]
    return np.array(cols, dtype=object).T


def predict_chi(
    spec: AdversarySpec,
    *,
    modulus: int,
    n: int,
    k: int,
    batches: int,
    padded_dimension: int,
    iterations: int,
    coefficients,
    births,
    live,
    accumulate: bool,
) -> list[np.ndarray]:
    """Perturbation of every server output, as field residues of length ``d'``.

    ``coefficients[T-1]``, ``births[T-1]`` and ``live[T-1]`` describe the
    payload rows used, created and carried forward at iteration ``T`` (the
    same row keys the injections name).  With ``accumulate`` the server adds
    each reconstructed difference to a running total.
    """
    q = modulus
    E: dict = {}
    S: dict = {}
    total = np.zeros(padded_dimension, dtype=object)
    out = []
    for T in range(1, iterations + 1):
        # hop from the previous committee
        if T > 1:
            src = spec.full_resharers(T - 1, n)
            lam = _weights(q, src, k)  # (|src|, k)
            inj = spec.at(T - 1, "reshare")
            newE, newS = {}, {}
            for row in live[T - 2]:
                e_prev = E.get(row, np.zeros((batches, k, k), dtype=object))
                s_prev = S.get(row, np.zeros((n, batches, k), dtype=object))
                s_src = np.stack([s_prev[i - 1] for i in src])  # (|src|, b, l)
                # E_new[b, m, l] = E[b, l, m] + sum_i lam[i, m] S[i, b, l]
                carried = np.einsum("im,ibl->bml", lam, s_src)
                newE[row] = (np.transpose(e_prev, (0, 2, 1)) + carried) % q
                e_in = np.zeros((n, batches, n), dtype=object)  # (source, b, target)
                for e in inj:
                    if e.row == row and e.party in src:
                        e_in[e.party - 1, :, e.target - 1] += e.error.astype(object)
                e_src = np.stack([e_in[i - 1] for i in src])  # (|src|, b, j)
                newS[row] = np.einsum("im,ibj->jbm", lam, e_src) % q
            E, S = newE, newS
        # round 1 sharings
        for row in births[T - 1]:
            E[row] = np.zeros((batches, k, k), dtype=object)
            S[row] = np.zeros((n, batches, k), dtype=object)
        for e in spec.at(T, "share"):
            if e.row not in S:
                S[e.row] = np.zeros((n, batches, k), dtype=object)
                E[e.row] = np.zeros((batches, k, k), dtype=object)
            S[e.row][e.target - 1] = (S[e.row][e.target - 1] + e.error.astype(object)) % q
        # output
        gout = spec.output_senders(T, n)
        lam = _weights(q, gout, k)
        comb_E = np.zeros((batches, k, k), dtype=object)
        comb_S = np.zeros((n, batches, k), dtype=object)
        for row, c in coefficients[T - 1].items():
            c = int(c) % q
            comb_E = comb_E + c * E.get(row, 0)
            comb_S = comb_S + c * S.get(row, 0)
        for e in spec.at(T, "output"):
            comb_S[e.party - 1] = comb_S[e.party - 1] + e.error.astype(object)
        s_out = np.stack([comb_S[j - 1] for j in gout])  # (|gout|, b, l)
        chi = (comb_E + np.einsum("jm,jbl->blm", lam, s_out)) % q
        if T % 2:
            chi = np.transpose(chi, (0, 2, 1))
        flat = chi.reshape(-1)[:padded_dimension]
        total = (total + flat) % q if accumulate else flat
        out.append(np.array([int(v) for v in total], dtype=np.uint64))
        # rows not carried forward are dropped from the ledger
        keep = set(live[T - 1])
        E = {r: v for r, v in E.items() if r in keep}
        S = {r: v for r, v in S.items() if r in keep}
    return out
