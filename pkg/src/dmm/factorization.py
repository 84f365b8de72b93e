"""Workloads, factorizations ``A = B C`` and their sensitivity under min-separation.

Matrices are float64 and indexed from 0 in code; iteration ``T`` in the
docstrings is 1-based and lives in row ``T - 1``.
"""

from __future__ import annotations

import logging
import math
import os
from dataclasses import dataclass, field

import numpy as np

log = logging.getLogger(__name__)


class FactorizationError(ValueError):
    pass


def prefix_workload(T: int) -> np.ndarray:
    if T < 1:
        raise ValueError("need at least one iteration")
    return np.tril(np.ones((T, T)))


# -- binary tree -------------------------------------------------------------


def _tree_height(T: int) -> int:
    if T < 1 or T & (T - 1):
        raise FactorizationError(f"tree factorization needs a power-of-two horizon, got {T}")
    return T.bit_length() - 1


def tree_node_index(T: int, level: int, pos: int) -> int:
    """Row of node ``(level, pos)``; level 0 holds the leaves."""
    offset = sum(T >> lv for lv in range(level))
    return offset + pos


def tree_nodes(T: int) -> list[tuple[int, int]]:
    h = _tree_height(T)
    return [(lv, p) for lv in range(h + 1) for p in range(T >> lv)]


def canonical_nodes(T_star: int, T: int) -> list[int]:
    """Row indices of the dyadic nodes whose intervals tile ``[1, T]``."""
    h = _tree_height(T_star)
    if not 1 <= T <= T_star:
        raise ValueError(f"iteration {T} outside [1, {T_star}]")
    out, start = [], 0
    for lv in range(h, -1, -1):
        if T >> lv & 1:
            out.append(tree_node_index(T_star, lv, start >> lv))
            start += 1 << lv
    return out


def honaker_tree(T: int) -> tuple[np.ndarray, np.ndarray, "NoiseSchedule"]:
    """Tree factorization of the prefix workload.

    ``C`` has one row per node (``2T - 1`` rows) holding the indicator of its
    leaf interval; row ``T`` of ``B`` selects the canonical cover of ``[1, T]``.
    """
    nodes = tree_nodes(T)
    C = np.zeros((len(nodes), T))
    for r, (lv, p) in enumerate(nodes):
        C[r, p << lv : (p + 1) << lv] = 1.0
    B = np.zeros((T, len(nodes)))
    for t in range(1, T + 1):
        B[t - 1, canonical_nodes(T, t)] = 1.0
    return B, C, NoiseSchedule.from_factor(B)


def tree_gram(T: int) -> np.ndarray:
    """``C^T C`` of the full tree: number of nodes covering both leaves."""
    h = _tree_height(T)
    idx = np.arange(T)
    x = idx[:, None] ^ idx[None, :]
    bl = np.zeros_like(x)
    nz = x > 0
    bl[nz] = np.floor(np.log2(x[nz])).astype(x.dtype) + 1
    return (h + 1 - bl).astype(np.float64)


# -- noise schedules ---------------------------------------------------------


@dataclass(frozen=True)
class NoiseSchedule:
    """Which noise rows are sampled, used and carried forward at each iteration.

    ``coefficients[T-1]`` maps noise row to its coefficient at iteration ``T``
    (row ``T`` of ``B`` or, in difference form, of ``B_T - B_{T-1}``).  A row is
    born at its first nonzero coefficient and stays live while a later
    coefficient is nonzero.
    """

    coefficients: tuple[dict[int, float], ...]
    births: tuple[tuple[int, ...], ...]
    live: tuple[tuple[int, ...], ...]  # held after iteration T, to reshare into T + 1

    @classmethod
    def from_factor(cls, B: np.ndarray, differences: bool = False) -> "NoiseSchedule":
        B = np.asarray(B, dtype=np.float64)
        D = np.diff(B, axis=0, prepend=0.0) if differences else B
        first_use = np.argmax(B != 0, axis=0)
        used = (B != 0).any(axis=0)
        nz = D != 0
        last = np.where(nz.any(axis=0), D.shape[0] - 1 - np.argmax(nz[::-1], axis=0), -1)
        coeffs, births, live = [], [], []
        for t in range(B.shape[0]):
            cols = np.flatnonzero(D[t])
            coeffs.append({int(c): float(D[t, c]) for c in cols})
            births.append(tuple(int(c) for c in np.flatnonzero(used & (first_use == t))))
            live.append(tuple(int(c) for c in np.flatnonzero(used & (first_use <= t) & (last > t))))
        return cls(tuple(coeffs), tuple(births), tuple(live))

    @property
    def horizon(self) -> int:
        return len(self.coefficients)

    def max_live(self) -> int:
        return max((len(x) for x in self.live), default=0)


# alias kept for the tree-specific reading of the schedule
TreeSchedule = NoiseSchedule


# -- sensitivity ---------------------------------------------------------------


def _patterns(T: int, b: int):
    def rec(start: int, chosen: tuple[int, ...]):
        for j in range(start, T):
            nxt = chosen + (j,)
            yield nxt
            yield from rec(j + b, nxt)

    yield from rec(0, ())


def sensitivity_bruteforce(C: np.ndarray | None, b: int, T: int | None = None, gram=None) -> float:
    """Exhaustive maximum over min-separated participation patterns."""
    W = np.abs(_gram(C, gram))
    T = W.shape[0] if T is None else T
    best = 0.0
    for pat in _patterns(T, b):
        idx = np.array(pat)
        best = max(best, float(W[np.ix_(idx, idx)].sum()))
    return math.sqrt(best)


def _gram(C, gram):
    if gram is not None:
        return np.asarray(gram, dtype=np.float64)
    C = np.asarray(C, dtype=np.float64)
    return C.T @ C


@dataclass
class SensitivityResult:
    value: float
    exact: bool
    nodes: int
    pattern: tuple[int, ...] = ()


def _separated_suffix(vals: np.ndarray, b: int) -> np.ndarray:
    """``best[..., i]``: largest sum of ``vals[..., F]`` over b-separated ``F`` within ``[i, T)``.

    The recursion ``best[i] = max(best[i+1], vals[i] + best[i+b])`` is run a
    block of ``b`` indices at a time, since inside a block every ``best[i+b]``
    is already known.
    """
    T = vals.shape[-1]
    best = np.zeros(vals.shape[:-1] + (T + b + 1,))
    hi = T
    while hi > 0:
        lo = max(0, hi - b)
        cand = vals[..., lo:hi] + best[..., lo + b : hi + b]
        run = np.maximum.accumulate(cand[..., ::-1], axis=-1)[..., ::-1]
        best[..., lo:hi] = np.maximum(run, best[..., hi : hi + 1])
        hi = lo
    return best


def _row_separated_best(W: np.ndarray, b: int) -> np.ndarray:
    """``R[j]``: best b-separated sum of ``W[j, i]`` over ``i >= j + b``."""
    T = W.shape[0]
    best = _separated_suffix(W, b)
    rows = np.arange(T)
    return best[rows, np.minimum(rows + b, T)]


def _suffix_best(u: np.ndarray, start: int, b: int) -> float:
    if start >= u.size:
        return 0.0
    return float(_separated_suffix(u[start:], b)[0])


def sensitivity_search(
    C: np.ndarray | None, b: int, T: int | None = None, gram=None, node_budget: int = 200_000
) -> SensitivityResult:
    """Branch and bound over min-separated patterns.

    Patterns are built in increasing index order.  The bound on what a partial
    pattern can still gain is an additive suffix recursion in which each
    candidate ``j`` scores its diagonal, twice its weight to the chosen set and
    twice the best separated row sum beyond it.  Exceeding ``node_budget``
    returns the root bound, flagged as inexact.
    """
    if b < 1:
        raise ValueError("separation must be at least 1")
    W = np.abs(_gram(C, gram))
    T = W.shape[0] if T is None else T
    W = W[:T, :T]
    R = _row_separated_best(W, b)
    diag = np.diag(W).copy()
    base_u = diag + 2 * R

    root_bound = _suffix_best(base_u, 0, b)
    best_val, best_pat = 0.0, ()
    nodes = 0
    exhausted = False

    # greedy warm start
    s = np.zeros(T)
    cur, pat, start = 0.0, [], 0
    while start < T:
        gains = diag[start:] + 2 * s[start:]
        j = start + int(np.argmax(gains))
        cur += diag[j] + 2 * s[j]
        s = s + W[j]
        pat.append(j)
        start = j + b
    best_val, best_pat = cur, tuple(pat)

    stack = [(0, 0.0, np.zeros(T), ())]
    while stack:
        start, cur, s, pat = stack.pop()
        nodes += 1
        if nodes > node_budget:
            exhausted = True
            break
        if start >= T:
            continue
        u = base_u + 2 * s
        if cur + _suffix_best(u, start, b) <= best_val + 1e-12 * max(1.0, best_val):
            continue
        gains = diag[start:] + 2 * s[start:]
        order = start + np.argsort(gains, kind="stable")  # pushed ascending, popped best-first
        for j in order:
            j = int(j)
            val = cur + diag[j] + 2 * s[j]
            npat = pat + (j,)
            if val > best_val:
                best_val, best_pat = val, npat
            stack.append((j + b, val, s + W[j], npat))
    if exhausted:
        log.warning(
            "sensitivity search hit its node budget (%d); returning the upper bound", node_budget
        )
        return SensitivityResult(math.sqrt(max(root_bound, best_val)), False, nodes, best_pat)
    return SensitivityResult(math.sqrt(best_val), True, nodes, best_pat)


def sensitivity(C: np.ndarray | None, b: int, T: int | None = None, gram=None, **kw) -> float:
    """``max`` over b-min-separated patterns of ``sqrt(sum_{i,j in pattern} |G_ij|)``, ``G = C^T C``."""
    return sensitivity_search(C, b, T, gram, **kw).value


def loss(B: np.ndarray, C: np.ndarray, b: int, T: int | None = None, squared: bool = False, **kw) -> float:
    """Expected total squared error ``Delta * ||B||_F^2`` (``Delta**2`` with ``squared``)."""
    delta = sensitivity(C, b, T, **kw)
    return (delta**2 if squared else delta) * float(np.sum(np.asarray(B) ** 2))


# -- plans and files -----------------------------------------------------------


@dataclass(frozen=True)
class FactorizationPlan:
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    b: int
    mode: str = "dense"  # "dense" or "tree"
    name: str = ""
    sensitivity: float = field(default=float("nan"))

    @property
    def horizon(self) -> int:
        return self.A.shape[0]

    @property
    def rank(self) -> int:
        return self.B.shape[1]

    def residual(self) -> float:
        return float(np.max(np.abs(self.A - self.B @ self.C))) if self.A.size else 0.0

    def is_integral(self) -> bool:
        return all(np.array_equal(M, np.round(M)) for M in (self.A, self.B))

    def schedule(self, differences: bool = True) -> NoiseSchedule:
        return NoiseSchedule.from_factor(self.B, differences)

    def max_row_norms(self) -> tuple[float, float]:
        return (
            float(np.max(np.linalg.norm(self.A, axis=1))),
            float(np.max(np.linalg.norm(self.B, axis=1))),
        )

    def loss(self, squared: bool = False) -> float:
        d = self.sensitivity
        return (d * d if squared else d) * float(np.sum(self.B**2))


def tree_plan(T: int, b: int | None = None) -> FactorizationPlan:
    B, C, _ = honaker_tree(T)
    b = T if b is None else b
    delta = sensitivity(None, b, gram=tree_gram(T))
    return FactorizationPlan(prefix_workload(T), B, C, b, "tree", f"honaker-{T}", delta)


def dense_plan(B, C, b: int, A=None, tol: float = 1e-9, name: str = "") -> FactorizationPlan:
    B = np.asarray(B, dtype=np.float64)
    C = np.asarray(C, dtype=np.float64)
    if B.ndim != 2 or C.ndim != 2 or B.shape[1] != C.shape[0] or B.shape[0] != C.shape[1]:
        raise FactorizationError(f"dimension mismatch: B {B.shape}, C {C.shape}")
    A = prefix_workload(B.shape[0]) if A is None else np.asarray(A, dtype=np.float64)
    if not np.allclose(A, np.tril(A)):
        raise FactorizationError("workload must be lower triangular")
    res = float(np.max(np.abs(A - B @ C)))
    if res > tol:
        raise FactorizationError(f"reconstruction residual {res:.3e} exceeds {tol:.1e}")
    return FactorizationPlan(A, B, C, b, "dense", name, sensitivity(C, b))


def save_factorization(path: str | os.PathLike, plan: FactorizationPlan) -> None:
    T, r = plan.B.shape
    with open(path, "w") as fh:
        fh.write(f"DMMFAC v1 {T} {r} {plan.b}\n")
        np.savetxt(fh, plan.B, fmt="%.17g")
        np.savetxt(fh, plan.C, fmt="%.17g")


def load_factorization(path: str | os.PathLike, A=None, tol: float = 1e-9) -> FactorizationPlan:
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 5 or header[:2] != ["DMMFAC", "v1"]:
            raise FactorizationError(f"bad header in {path}: {' '.join(header)!r}")
        T, r, b = (int(x) for x in header[2:])
        vals = np.array(fh.read().split(), dtype=np.float64)
    if vals.size != 2 * T * r:
        raise FactorizationError(f"expected {2 * T * r} values for T={T}, r={r}, found {vals.size}")
    B = vals[: T * r].reshape(T, r)
    C = vals[T * r :].reshape(r, T)
    return dense_plan(B, C, b, A, tol, name=os.path.basename(str(path)))


@dataclass(frozen=True)
class Scenario:
    dataset: str
    mechanism: str
    dimension: int
    iterations: int
    b: int
    n: int = 64
    mu: float = 1 / 6
    bits: int = 32


SCENARIOS = {
    ("so", "honaker"): Scenario("so", "honaker", 4050748, 2048, 512),
    ("so", "optimal"): Scenario("so", "optimal", 4050748, 2052, 342),
    ("femnist", "honaker"): Scenario("femnist", "honaker", 1018174, 1024, 64),
    ("femnist", "optimal"): Scenario("femnist", "optimal", 1018174, 1445, 85),
}


def all_patterns(T: int, b: int):
    """Every nonempty b-separated subset of ``range(T)``, for tests and small checks."""
    return list(_patterns(T, b))


__all__ = [
    "FactorizationError",
    "FactorizationPlan",
    "NoiseSchedule",
    "SCENARIOS",
    "Scenario",
    "TreeSchedule",
    "all_patterns",
    "canonical_nodes",
    "dense_plan",
    "honaker_tree",
    "load_factorization",
    "loss",
    "prefix_workload",
    "save_factorization",
    "sensitivity",
    "sensitivity_bruteforce",
    "sensitivity_search",
    "tree_gram",
    "tree_node_index",
    "tree_plan",
]
