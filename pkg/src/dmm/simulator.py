"""Committee-based simulation of the distributed matrix mechanism.

Each iteration a fresh committee of ``n`` clients runs two rounds through a
routing server:

* round 1: clients discretize their gradient, sample discrete Gaussian
  noise for the noise rows born this iteration and send packed sharings of
  both to every committee member;
* round 2: clients recover the rows handed over by the previous committee,
  send the server their shares of the linear combination it is due, and
  reshare the rows still needed to the next committee.

A ``d'``-vector payload is cut into batches of ``k**2`` secrets laid out as a
``k x k`` matrix ``P[b, a, c] = payload[b k^2 + a k + c]``.  Sharing ``l``
of a batch holds row ``l`` of the matrix and every resharing hop transposes
it, so a row born at iteration ``T`` is packed as ``P`` when ``T`` is even
and as ``P^T`` when ``T`` is odd.  Every row held at iteration ``T`` then
shares one layout and linear combinations line up.

``optimized`` mode (the default) releases prefix sums by sending only the
difference ``X_T + sum_r (B[T, r] - B[T-1, r]) Z_r`` and accumulating on the
server; ``full`` mode reshares gradient rows too and releases
``sum A[T, t] X_t + sum B[T, r] Z_r`` directly.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Hashable, Iterator, Sequence

import numpy as np

from dmm import dgauss
from dmm.adversary import PARTIAL, ROUND1, ROUND2, AdversarySpec, Injection, predict_chi
from dmm.discretize import DiscretizationParams, FlattenSpec, discretize, server_postprocess
from dmm.factorization import FactorizationPlan, NoiseSchedule, prefix_workload
from dmm.field import DEFAULT_MODULUS, PrimeField
from dmm.packed import SharingParams, reconstruct_array, share_array
from dmm.resharing import recover_all

log = logging.getLogger(__name__)

RESHARE_RECORD = np.dtype([("src", "<u2"), ("batch", "<u4"), ("share", "<u4")])
RESIDUE = np.dtype("<u4")

ROUNDING, NOISE, SHARING, RESHARING = 0, 1, 2, 3


class ProtocolAbort(RuntimeError):
    pass


def _fraction(mu) -> Fraction:
    if isinstance(mu, Fraction):
        return mu
    if isinstance(mu, str):
        return Fraction(mu)
    return Fraction(mu).limit_denominator(10**6)


@dataclass(frozen=True)
class ProtocolConfig:
    n: int
    t_c: int
    t_d: int
    mu: Fraction | float | str
    iterations: int
    dimension: int
    modulus: int = DEFAULT_MODULUS
    clip_norm: float = 1.0
    granularity: float = 1e-3
    rounding_bias: float = 0.0
    flatten_seed: int = 0
    noise_scale: float = 0.0  # sigma; 0 disables noise
    mode: str = "optimized"
    seed: int = 0
    universe: int = 0  # client pool for round-robin committees; 0 means n * iterations

    def __post_init__(self):
        object.__setattr__(self, "mu", _fraction(self.mu))
        if self.mode not in ("optimized", "full"):
            raise ValueError(f"mode must be 'optimized' or 'full', got {self.mode!r}")
        if not 0 < self.mu < Fraction(1, 2):
            raise ValueError("mu must lie in (0, 1/2)")
        if self.n < 2 or self.t_c < 0 or self.t_d < 0 or self.iterations < 1:
            raise ValueError("invalid committee size, thresholds or horizon")
        if not self.t_c + self.t_d < (Fraction(1, 2) - self.mu) * self.n:
            raise ProtocolAbort(
                f"abort: t_c + t_d = {self.t_c + self.t_d} is not below (1/2 - mu) n = "
                f"{float((Fraction(1, 2) - self.mu) * self.n):.4g}"
            )
        if self.k < 1:
            raise ValueError("packing parameter floor(2 mu n) must be at least 1")
        if self.noise_scale and self.noise_scale / self.granularity < 0.5:
            raise ValueError("noise scale sigma / gamma must be at least 1/2")

    @property
    def k(self) -> int:
        return math.floor(2 * self.mu * self.n)

    @property
    def field(self) -> PrimeField:
        return PrimeField(self.modulus)

    @property
    def sharing(self) -> SharingParams:
        return SharingParams(self.field, self.n, self.t_c, self.k)

    @property
    def discretization(self) -> DiscretizationParams:
        return DiscretizationParams(
            self.clip_norm, self.granularity, self.rounding_bias, self.dimension, self.flatten_seed
        )

    @property
    def padded_dimension(self) -> int:
        return self.discretization.padded_dimension

    @property
    def batches(self) -> int:
        return -(-self.padded_dimension // self.k**2)

    def roster(self, T: int) -> tuple[int, ...]:
        u = self.universe or self.n * self.iterations
        return tuple(((T - 1) * self.n + i) % u for i in range(self.n))

    def to_json(self) -> dict:
        d = asdict(self)
        d["mu"] = str(self.mu)
        return d


# -- row bookkeeping ----------------------------------------------------------------


def noise_row(r: int) -> tuple[str, int]:
    return ("z", int(r))


def grad_row(t: int) -> tuple[str, int]:
    return ("x", int(t))


def _int_coeff(c: float) -> int:
    if c != round(c):
        raise ValueError(f"protocol runs need integer factor entries, found {c}")
    return int(round(c))


@dataclass(frozen=True)
class RowSchedule:
    """Rows used, born and carried at each iteration, keyed by payload row."""

    coefficients: tuple[dict[Hashable, int], ...]
    noise_births: tuple[tuple[int, ...], ...]
    births: tuple[tuple[Hashable, ...], ...]
    live: tuple[tuple[Hashable, ...], ...]

    @classmethod
    def build(cls, plan: FactorizationPlan, mode: str) -> "RowSchedule":
        T_star = plan.horizon
        if mode == "optimized":
            if not np.array_equal(plan.A, prefix_workload(T_star)):
                raise ValueError("optimized mode releases prefix sums and needs the prefix workload")
            ns = NoiseSchedule.from_factor(plan.B, differences=True)
            coeffs, births, live = [], [], []
            for t in range(T_star):
                c = {noise_row(r): _int_coeff(v) for r, v in ns.coefficients[t].items()}
                c[grad_row(t + 1)] = 1
                coeffs.append(c)
                births.append(tuple(noise_row(r) for r in ns.births[t]) + (grad_row(t + 1),))
                live.append(tuple(noise_row(r) for r in ns.live[t]))
            return cls(tuple(coeffs), ns.births, tuple(births), tuple(live))
        ns = NoiseSchedule.from_factor(plan.B, differences=False)
        A = plan.A
        nzA = A != 0
        last_use = np.where(nzA.any(axis=0), T_star - 1 - np.argmax(nzA[::-1], axis=0), -1)
        coeffs, births, live = [], [], []
        for t in range(T_star):
            c = {noise_row(r): _int_coeff(v) for r, v in ns.coefficients[t].items()}
            c.update({grad_row(s + 1): _int_coeff(A[t, s]) for s in np.flatnonzero(A[t])})
            coeffs.append(c)
            births.append(tuple(noise_row(r) for r in ns.births[t]) + (grad_row(t + 1),))
            held_x = tuple(grad_row(s + 1) for s in range(t + 1) if last_use[s] > t)
            live.append(tuple(noise_row(r) for r in ns.live[t]) + held_x)
        return cls(tuple(coeffs), ns.births, tuple(births), tuple(live))


# -- client computation --------------------------------------------------------------


def party_rng(seed: int, T: int, slot: int, purpose: int) -> np.random.Generator:
    return np.random.default_rng([seed, T, slot, purpose])


def client_payload(
    config: ProtocolConfig, T: int, slot: int, gradient, noise_rows: Sequence[int], flat: FlattenSpec
) -> dict[Hashable, np.ndarray]:
    """Integer payloads of one client: its discretized gradient and fresh noise rows."""
    x = discretize(gradient, config.discretization, flat, party_rng(config.seed, T, slot, ROUNDING))
    out: dict[Hashable, np.ndarray] = {grad_row(T): x}
    dp = config.padded_dimension
    if config.noise_scale > 0:
        rng = party_rng(config.seed, T, slot, NOISE)
        s = config.noise_scale / config.granularity
        for r in sorted(noise_rows):
            out[noise_row(r)] = dgauss.sample_array(s, dp, rng)
    else:
        for r in sorted(noise_rows):
            out[noise_row(r)] = np.zeros(dp, dtype=np.int64)
    return out


def pack(payload: np.ndarray, config: ProtocolConfig, T: int) -> np.ndarray:
    """Field payload ``(d',)`` to the ``(batches, k, k)`` sharing layout of iteration ``T``."""
    k, nb = config.k, config.batches
    P = np.zeros(nb * k * k, dtype=np.uint64)
    P[: payload.size] = payload
    P = P.reshape(nb, k, k)
    return np.ascontiguousarray(P.transpose(0, 2, 1)) if T % 2 else P


def unpack(M: np.ndarray, config: ProtocolConfig, T: int) -> np.ndarray:
    P = M.transpose(0, 2, 1) if T % 2 else M
    return np.ascontiguousarray(P).reshape(-1)[: config.padded_dimension]


# -- envelopes -----------------------------------------------------------------------


@dataclass(frozen=True)
class Envelope:
    src: int
    dst: int  # 0 addresses the server
    kind: str  # "share", "output", "reshare"
    row: Hashable
    body: bytes


class Router:
    """The server's message relay; envelopes are opaque apart from addressing."""

    def __init__(self):
        self.wire_bytes = {"share": 0, "output": 0, "reshare": 0}
        self.residue_bytes = {"share": 0, "output": 0, "reshare": 0}
        self.sent_by: dict[int, int] = {}
        self.reshare_residue_by: dict[int, int] = {}
        self.inbox: dict[tuple[int, str], list[Envelope]] = {}

    def send(self, env: Envelope) -> None:
        size = len(env.body)
        self.wire_bytes[env.kind] += size
        residues = size if env.kind != "reshare" else size // RESHARE_RECORD.itemsize * RESIDUE.itemsize
        self.residue_bytes[env.kind] += residues
        self.sent_by[env.src] = self.sent_by.get(env.src, 0) + size
        if env.kind == "reshare":
            self.reshare_residue_by[env.src] = self.reshare_residue_by.get(env.src, 0) + residues
        self.inbox.setdefault((env.dst, env.kind), []).append(env)

    def collect(self, dst: int, kind: str) -> list[Envelope]:
        return self.inbox.pop((dst, kind), [])


def _residues(arr: np.ndarray) -> bytes:
    return np.asarray(arr, dtype=RESIDUE).tobytes()


def _from_residues(body: bytes, shape) -> np.ndarray:
    return np.frombuffer(body, dtype=RESIDUE).astype(np.uint64).reshape(shape)


# -- state and transcripts -------------------------------------------------------------


@dataclass
class IterationState:
    iteration: int = 0  # last completed iteration
    pending: dict = field(default_factory=dict)  # row -> (sources, (|sources|, batches, n))
    accumulator: np.ndarray | None = None  # running field total (optimized mode)


@dataclass
class IterationTranscript:
    iteration: int
    roster: tuple[int, ...]
    dropouts: dict
    corrupted: tuple[int, ...]
    injections: int
    output_set: tuple[int, ...]
    resharers: tuple[int, ...]
    born_rows: tuple
    live_rows: tuple
    batches: int
    bytes_share: int
    bytes_output: int
    bytes_reshare_wire: int
    bytes_reshare_residues: int
    reshare_residues_per_client: dict
    bytes_per_client: dict
    output_field: np.ndarray = field(repr=False, default=None)
    digest: str = ""
    rounds: int = 2

    def to_json(self) -> dict:
        d = {k: v for k, v in asdict(self).items() if k != "output_field"}
        d["born_rows"] = [list(r) for r in self.born_rows]
        d["live_rows"] = [list(r) for r in self.live_rows]
        d["dropouts"] = {str(i): r for i, r in self.dropouts.items()}
        d["reshare_residues_per_client"] = {str(i): v for i, v in self.reshare_residues_per_client.items()}
        d["bytes_per_client"] = {str(i): v for i, v in self.bytes_per_client.items()}
        return d


@dataclass(frozen=True)
class Context:
    config: ProtocolConfig
    plan: FactorizationPlan
    rows: RowSchedule
    flat: FlattenSpec

    @classmethod
    def build(cls, config: ProtocolConfig, plan: FactorizationPlan) -> "Context":
        if plan.horizon != config.iterations:
            raise ValueError(f"plan horizon {plan.horizon} differs from {config.iterations} iterations")
        return cls(config, plan, RowSchedule.build(plan, config.mode), FlattenSpec.from_params(config.discretization))


def _digest(y: np.ndarray) -> str:
    return hashlib.sha256(np.asarray(y, dtype=RESIDUE).tobytes()).hexdigest()


def _injection_table(injections, key) -> dict:
    """Errors keyed by the message they modify; repeated injections add up."""
    table: dict = {}
    for e in injections:
        kk = key(e)
        table[kk] = table[kk] + e.error if kk in table else e.error
    return table


def _inject(arr: np.ndarray, e: np.ndarray, q: int) -> np.ndarray:
    return ((arr.astype(object) + e.astype(object)) % q).astype(np.uint64)


def run_iteration(
    state: IterationState,
    gradients,
    ctx: Context,
    adversary: AdversarySpec | None = None,
) -> tuple[np.ndarray, IterationState, IterationTranscript]:
    cfg, rows = ctx.config, ctx.rows
    adv = adversary or AdversarySpec()
    T = state.iteration + 1
    if T > cfg.iterations:
        raise ValueError("training horizon exhausted")
    n, k, nb, q = cfg.n, cfg.k, cfg.batches, cfg.modulus
    fld, params = cfg.field, cfg.sharing
    gradients = np.asarray(gradients, dtype=np.float64)
    if gradients.shape != (n, cfg.dimension):
        raise ValueError(f"expected gradients of shape {(n, cfg.dimension)}, got {gradients.shape}")
    drops = adv.drops(T)
    router = Router()

    # recover rows handed over by the previous committee
    held: dict[Hashable, np.ndarray] = {}  # row -> (n, batches, k)
    for row, (sources, arr) in state.pending.items():
        try:
            held[row] = recover_all(arr, sources, params)
        except ValueError as exc:
            raise ProtocolAbort(f"iteration {T}: {exc}") from exc

    # round 1
    senders = [i for i in range(1, n + 1) if drops.get(i) != ROUND1]
    born = rows.births[T - 1]
    for i in senders:
        payload = client_payload(cfg, T, i, gradients[i - 1], rows.noise_births[T - 1], ctx.flat)
        rng = party_rng(cfg.seed, T, i, SHARING)
        for row in born:
            M = pack(fld.encode_signed_array(payload[row]), cfg, T)
            sh = share_array(M, params, rng)  # (batches, k, n)
            for j in range(1, n + 1):
                router.send(Envelope(i, j, "share", row, _residues(sh[..., j - 1])))
    share_inj = _injection_table(adv.at(T, "share"), lambda e: (e.party, e.target, e.row))
    for j in range(1, n + 1):
        acc: dict[Hashable, np.ndarray] = {}
        for env in router.collect(j, "share"):
            v = _from_residues(env.body, (nb, k))
            e = share_inj.get((env.src, j, env.row))
            if e is not None:
                v = _inject(v, e, q)
            acc[env.row] = fld.vadd(acc[env.row], v) if env.row in acc else v
        for row in born:
            held.setdefault(row, np.zeros((n, nb, k), dtype=np.uint64))[j - 1] = acc.get(
                row, np.zeros((nb, k), dtype=np.uint64)
            )

    # round 2: outputs
    gout = tuple(i for i in range(1, n + 1) if drops.get(i) not in (ROUND1, ROUND2))
    out_inj = _injection_table(adv.at(T, "output"), lambda e: e.party)
    coeffs = rows.coefficients[T - 1]
    for j in gout:
        share = np.zeros((nb, k), dtype=np.uint64)
        for row, c in coeffs.items():
            share = fld.vadd(share, fld.vscale(c % q, held[row][j - 1]))
        if j in out_inj:
            share = _inject(share, out_inj[j], q)
        router.send(Envelope(j, 0, "output", None, _residues(share)))
    received = {env.src: _from_residues(env.body, (nb, k)) for env in router.collect(0, "output")}
    if len(received) < params.threshold:
        raise ProtocolAbort(
            f"abort: iteration {T}: {len(received)} output shares < t_c + k = {params.threshold}"
        )
    parties = tuple(sorted(received))
    M = reconstruct_array(np.stack([received[j] for j in parties]), parties, params)  # (b, l, m)
    diff = unpack(M, cfg, T)
    if cfg.mode == "optimized":
        prev = state.accumulator if state.accumulator is not None else np.zeros_like(diff)
        y = fld.vadd(prev, diff)
    else:
        y = diff

    # round 2: resharing
    live = rows.live[T - 1] if T < cfg.iterations else ()
    reshare_inj = _injection_table(adv.at(T, "reshare"), lambda e: (e.party, e.target, e.row))
    pending = {}
    rngs = {i: party_rng(cfg.seed, T, i, RESHARING) for i in gout}
    for ordinal, row in enumerate(live):
        delivered: dict[int, dict[int, np.ndarray]] = {}
        for i in gout:
            out = share_array(held[row][i - 1], params, rngs[i])  # (batches, n)
            targets = range(1, n + 1) if drops.get(i) != PARTIAL else range(1, n)
            for j in targets:
                rec = np.zeros(nb, dtype=RESHARE_RECORD)
                rec["src"] = i
                rec["batch"] = ordinal * nb + np.arange(nb)
                vals = out[:, j - 1]
                e = reshare_inj.get((i, j, row))
                if e is not None:
                    vals = _inject(vals, e, q)
                rec["share"] = vals
                router.send(Envelope(i, j, "reshare", row, rec.tobytes()))
        for j in range(1, n + 1):
            for env in router.collect(j, "reshare"):
                rec = np.frombuffer(env.body, dtype=RESHARE_RECORD)
                delivered.setdefault(int(rec["src"][0]), {})[j] = rec["share"].astype(np.uint64)
        sources = tuple(i for i in sorted(delivered) if len(delivered[i]) == n)
        arr = (
            np.stack([np.stack([delivered[i][j] for j in range(1, n + 1)], axis=-1) for i in sources])
            if sources
            else np.zeros((0, nb, n), dtype=np.uint64)
        )
        pending[row] = (sources, arr)
    resharers = pending[live[0]][0] if live else tuple(i for i in gout if drops.get(i) != PARTIAL)

    out_real = server_postprocess(y, fld, cfg.discretization, ctx.flat)
    transcript = IterationTranscript(
        iteration=T,
        roster=cfg.roster(T),
        dropouts=drops,
        corrupted=tuple(adv.corrupted.get(T, ())),
        injections=sum(len(adv.at(T, kd)) for kd in ("share", "reshare", "output")),
        output_set=parties,
        resharers=tuple(resharers),
        born_rows=tuple(born),
        live_rows=tuple(live),
        batches=nb,
        bytes_share=router.wire_bytes["share"],
        bytes_output=router.wire_bytes["output"],
        bytes_reshare_wire=router.wire_bytes["reshare"],
        bytes_reshare_residues=router.residue_bytes["reshare"],
        reshare_residues_per_client=dict(sorted(router.reshare_residue_by.items())),
        bytes_per_client=dict(sorted(router.sent_by.items())),
        output_field=y,
        digest=_digest(y),
    )
    new_state = IterationState(T, pending, y if cfg.mode == "optimized" else None)
    return out_real, new_state, transcript


# -- oracle and training loop ------------------------------------------------------------

GradientProvider = Callable[[int, tuple[int, ...]], np.ndarray]


def plaintext_oracle(
    ctx: Context, provider: GradientProvider, adversary: AdversarySpec | None = None
) -> list[np.ndarray]:
    """Field-valued releases computed without any sharing.

    Contributors at iteration ``T`` are the committee members that sent
    round-1 messages.  Returns one ``(d',)`` residue vector per iteration.
    """
    cfg, rows = ctx.config, ctx.rows
    adv = adversary or AdversarySpec()
    q = cfg.modulus
    sums: dict[Hashable, np.ndarray] = {}
    outs = []
    ns = NoiseSchedule.from_factor(ctx.plan.B)
    for T in range(1, cfg.iterations + 1):
        g = np.asarray(provider(T, cfg.roster(T)), dtype=np.float64)
        for i in adv.round1_senders(T, cfg.n):
            pay = client_payload(cfg, T, i, g[i - 1], rows.noise_births[T - 1], ctx.flat)
            for row, v in pay.items():
                sums[row] = sums.get(row, 0) + v.astype(object)
        if cfg.mode == "optimized":
            y = sum((sums[grad_row(t)] for t in range(1, T + 1)), np.zeros(cfg.padded_dimension, dtype=object))
            for r, c in ns.coefficients[T - 1].items():
                y = y + _int_coeff(c) * sums[noise_row(r)]
        else:
            y = np.zeros(cfg.padded_dimension, dtype=object)
            for row, c in rows.coefficients[T - 1].items():
                y = y + c * sums[row]
        outs.append(np.array([int(v) % q for v in y], dtype=np.uint64))
    return outs


@dataclass
class TrainingResult:
    outputs: list[np.ndarray]
    transcripts: list[IterationTranscript]

    @property
    def field_outputs(self) -> list[np.ndarray]:
        return [t.output_field for t in self.transcripts]

    def write_jsonl(self, path) -> None:
        with open(path, "w") as fh:
            for t in self.transcripts:
                fh.write(json.dumps(t.to_json()) + "\n")


def iterate_training(
    ctx: Context,
    provider: GradientProvider,
    adversary: AdversarySpec | None = None,
    enforce_budget: bool = True,
) -> Iterator[tuple[np.ndarray, IterationTranscript]]:
    cfg = ctx.config
    adv = adversary or AdversarySpec()
    adv.validate(cfg.n, cfg.t_c, cfg.t_d, enforce_budget)
    state = IterationState()
    for T in range(1, cfg.iterations + 1):
        out, state, tr = run_iteration(state, provider(T, cfg.roster(T)), ctx, adv)
        yield out, tr


def run_training(
    config: ProtocolConfig,
    plan: FactorizationPlan,
    provider: GradientProvider,
    adversary: AdversarySpec | None = None,
    enforce_budget: bool = True,
) -> TrainingResult:
    ctx = Context.build(config, plan)
    outs, trs = [], []
    for out, tr in iterate_training(ctx, provider, adversary, enforce_budget):
        outs.append(out)
        trs.append(tr)
    return TrainingResult(outs, trs)


def predicted_perturbation(ctx: Context, adversary: AdversarySpec) -> list[np.ndarray]:
    cfg, rows = ctx.config, ctx.rows
    live = list(rows.live)
    live[-1] = ()
    return predict_chi(
        adversary,
        modulus=cfg.modulus,
        n=cfg.n,
        k=cfg.k,
        batches=cfg.batches,
        padded_dimension=cfg.padded_dimension,
        iterations=cfg.iterations,
        coefficients=rows.coefficients,
        births=rows.births,
        live=live,
        accumulate=cfg.mode == "optimized",
    )


def random_adversary(
    ctx: Context, rng: np.random.Generator, injections: int = 6, dropout_rate: float = 0.5, magnitude: int = 50
) -> AdversarySpec:
    """Random budget-respecting adversary: corrupted sets, dropouts and additive errors."""
    cfg, rows = ctx.config, ctx.rows
    n, nb, k = cfg.n, cfg.batches, cfg.k
    corrupted, dropouts = {}, {}
    for T in range(1, cfg.iterations + 1):
        perm = [int(x) + 1 for x in rng.permutation(n)]
        corrupted[T] = tuple(sorted(perm[: cfg.t_c]))
        if rng.random() < dropout_rate:
            m = int(rng.integers(0, cfg.t_d + 1))
            dropouts[T] = {i: [ROUND1, ROUND2, PARTIAL][int(rng.integers(3))] for i in perm[cfg.t_c : cfg.t_c + m]}
    inj = []
    for _ in range(injections if cfg.t_c else 0):
        T = int(rng.integers(1, cfg.iterations + 1))
        party = int(rng.choice(corrupted[T]))
        kinds = ["share", "output"] + (["reshare"] if rows.live[T - 1] and T < cfg.iterations else [])
        kind = kinds[int(rng.integers(len(kinds)))]
        target = int(rng.integers(1, n + 1))
        if kind == "share":
            row = rows.births[T - 1][int(rng.integers(len(rows.births[T - 1])))]
            err = rng.integers(-magnitude, magnitude + 1, size=(nb, k))
        elif kind == "output":
            row, err = None, rng.integers(-magnitude, magnitude + 1, size=(nb, k))
        else:
            row = rows.live[T - 1][int(rng.integers(len(rows.live[T - 1])))]
            err = rng.integers(-magnitude, magnitude + 1, size=nb)
        inj.append(Injection(T, party, kind, err, target, row))
    return AdversarySpec(corrupted, dropouts, tuple(inj))
