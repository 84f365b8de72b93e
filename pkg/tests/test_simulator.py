import hashlib
import json

import numpy as np
import pytest

from dmm.adversary import AdversarySpec, Injection
from dmm.factorization import dense_plan, prefix_workload, tree_plan
from dmm.simulator import (
    RESHARE_RECORD,
    Context,
    ProtocolAbort,
    ProtocolConfig,
    plaintext_oracle,
    predicted_perturbation,
    random_adversary,
    run_training,
)
from dmm.tasks import LinearRegression, MeanEstimation, run_linear_regression, run_mean_estimation


def config(**kw):
    base = dict(n=16, t_c=3, t_d=2, mu="1/6", iterations=8, dimension=50, granularity=0.01,
                noise_scale=0.05, rounding_bias=1 / 16, seed=1)
    base.update(kw)
    return ProtocolConfig(**base)


def gaussian_provider(seed, n=16, d=50, scale=0.3):
    return lambda T, roster: np.random.default_rng([seed, T]).normal(size=(n, d)) * scale


def field_diff(a, b, q):
    return ((a.astype(object) - b.astype(object)) % q).astype(np.uint64)


def test_packing_parameters():
    cfg = config()
    assert cfg.k == 5 and cfg.padded_dimension == 64 and cfg.batches == 3


def test_budget_boundary_aborts():
    # (1/2 - 1/6) * 16 = 5.33: t_c + t_d = 6 is one over
    with pytest.raises(ProtocolAbort):
        config(t_c=3, t_d=3)
    with pytest.raises(ProtocolAbort):
        config(n=64, t_c=11, t_d=11)
    config(n=64, t_c=11, t_d=10)


def test_zero_gradients_no_noise():
    cfg = config(noise_scale=0.0)
    res = run_training(cfg, tree_plan(8), lambda T, r: np.zeros((16, 50)))
    for y, out in zip(res.field_outputs, res.outputs):
        assert not y.any() and not out.any()


@pytest.mark.parametrize("mode", ["optimized", "full"])
def test_oracle_equality(mode):
    cfg = config(mode=mode, seed=5)
    plan = tree_plan(8)
    prov = gaussian_provider(3)
    res = run_training(cfg, plan, prov)
    oracle = plaintext_oracle(Context.build(cfg, plan), prov)
    assert all(np.array_equal(a, b) for a, b in zip(res.field_outputs, oracle))


def test_modes_agree_on_prefix_workload():
    plan = tree_plan(8)
    prov = gaussian_provider(4)
    a = run_training(config(seed=2), plan, prov)
    b = run_training(config(seed=2, mode="full"), plan, prov)
    assert all(np.array_equal(x, y) for x, y in zip(a.field_outputs, b.field_outputs))


def test_round_two_dropouts_leave_outputs_unchanged():
    cfg = config(seed=8)
    plan = tree_plan(8)
    prov = gaussian_provider(9)
    base = run_training(cfg, plan, prov)
    drops = {T: {T: 2, T + 7: 2} for T in range(1, 9)}
    dropped = run_training(cfg, plan, prov, AdversarySpec(dropouts=drops))
    assert all(np.array_equal(x, y) for x, y in zip(base.field_outputs, dropped.field_outputs))
    partial = {T: {3: "partial", 9: 2} for T in range(1, 9)}
    res = run_training(cfg, plan, prov, AdversarySpec(dropouts=partial))
    assert all(np.array_equal(x, y) for x, y in zip(base.field_outputs, res.field_outputs))
    assert all(3 not in t.resharers for t in res.transcripts[:-1])


def test_round_one_dropouts_match_oracle():
    cfg = config(seed=8)
    plan = tree_plan(8)
    prov = gaussian_provider(9)
    adv = AdversarySpec(dropouts={2: {4: 1, 11: 1}, 5: {1: 1}, 7: {16: 1, 2: 2}})
    res = run_training(cfg, plan, prov, adv)
    oracle = plaintext_oracle(Context.build(cfg, plan), prov, adv)
    assert all(np.array_equal(a, b) for a, b in zip(res.field_outputs, oracle))
    base = run_training(cfg, plan, prov)
    assert not np.array_equal(base.field_outputs[1], res.field_outputs[1])


def test_over_budget_dropouts_abort():
    cfg = config()
    # n - t_c - k + 1 = 9 resharers missing leaves 7 < t_c + k = 8
    adv = AdversarySpec(dropouts={1: {i: 2 for i in range(1, 10)}})
    with pytest.raises(ValueError):
        run_training(cfg, tree_plan(8), gaussian_provider(0), adv)
    with pytest.raises(ProtocolAbort, match="abort"):
        run_training(cfg, tree_plan(8), gaussian_provider(0), adv, enforce_budget=False)


def test_non_integer_factorization_rejected():
    T = 4
    A = prefix_workload(T)
    plan = dense_plan(A @ np.diag([0.5, 1, 1, 1]), np.diag([2.0, 1, 1, 1]), 1)
    with pytest.raises(ValueError, match="integer"):
        Context.build(config(iterations=T), plan)


def test_impulse_gives_constant_prefix():
    cfg = config(noise_scale=0.0, seed=0)
    g = np.zeros((16, 50))
    g[0, :5] = 0.1
    res = run_training(cfg, tree_plan(8), lambda T, r: g if T == 1 else np.zeros((16, 50)))
    assert all(np.array_equal(y, res.field_outputs[0]) for y in res.field_outputs)
    assert np.linalg.norm(res.outputs[-1] - g[0]) <= 16 * 0.01 * np.sqrt(64)


def test_oracle_ignores_client_order():
    # one coordinate on the granularity grid: rounding is deterministic
    cfg = config(dimension=1, granularity=0.5, clip_norm=100.0, noise_scale=0.0)
    ctx = Context.build(cfg, tree_plan(8))
    vals = np.arange(16, dtype=float)[:, None] * 0.5 - 3.0
    a = plaintext_oracle(ctx, lambda T, r: vals * T)
    b = plaintext_oracle(ctx, lambda T, r: vals[::-1] * T)
    assert all(np.array_equal(x, y) for x, y in zip(a, b))


@pytest.mark.parametrize("mode", ["optimized", "full"])
def test_additive_attacks_match_ledger(mode):
    cfg = config(mode=mode, seed=13)
    plan = tree_plan(8)
    ctx = Context.build(cfg, plan)
    q = cfg.modulus
    for s in range(4):
        adv = random_adversary(ctx, np.random.default_rng(s), injections=10)
        pred = predicted_perturbation(ctx, adv)
        chis = []
        for data_seed in (1, 2):
            prov = gaussian_provider(data_seed)
            res = run_training(cfg, plan, prov, adv)
            oracle = plaintext_oracle(ctx, prov, adv)
            chis.append([field_diff(y, o, q) for y, o in zip(res.field_outputs, oracle)])
        assert all(np.array_equal(a, p) for a, p in zip(chis[0], pred))
        assert all(np.array_equal(a, b) for a, b in zip(*chis))


def test_single_output_injection_by_hand():
    cfg = config(seed=3, noise_scale=0.0)
    plan = tree_plan(8)
    nb, k, q = cfg.batches, cfg.k, cfg.modulus
    e = np.zeros((nb, k), dtype=np.int64)
    e[0, 1] = 5
    adv = AdversarySpec(corrupted={2: (7,)}, injections=(Injection(2, 7, "output", e),))
    prov = gaussian_provider(0)
    clean = run_training(cfg, plan, prov).field_outputs
    hit = run_training(cfg, plan, prov, adv).field_outputs
    lam = cfg.sharing.coefficient_matrix(tuple(range(1, 17)))[6]  # party 7, per slot m
    # iteration 2 is even: sharing 1 of batch 0 holds payload entries k .. 2k - 1
    want = np.zeros(cfg.padded_dimension, dtype=np.uint64)
    want[k : 2 * k] = (lam.astype(object) * 5) % q
    assert np.array_equal(field_diff(hit[0], clean[0], q), np.zeros_like(want))
    for T in range(2, 9):  # the server accumulates, so the shift persists
        assert np.array_equal(field_diff(hit[T - 1], clean[T - 1], q), want)


def test_byte_accounting():
    cfg = config()
    res = run_training(cfg, tree_plan(8), gaussian_provider(0), AdversarySpec(dropouts={3: {2: 2}}))
    for tr in res.transcripts:
        live = len(tr.live_rows)
        for i, b in tr.reshare_residues_per_client.items():
            assert b == cfg.n * 4 * cfg.batches * live
        assert tr.bytes_reshare_wire == tr.bytes_reshare_residues // 4 * RESHARE_RECORD.itemsize
        assert tr.rounds == 2
        senders = cfg.n - sum(1 for r in tr.dropouts.values() if r == 1)
        assert tr.bytes_share == senders * cfg.n * len(tr.born_rows) * cfg.batches * cfg.k * 4
        assert tr.bytes_output == len(tr.output_set) * cfg.batches * cfg.k * 4
    assert set(res.transcripts[2].reshare_residues_per_client) == set(range(1, 17)) - {2}


def test_transcript_json(tmp_path):
    res = run_training(config(), tree_plan(8), gaussian_provider(0))
    path = tmp_path / "t.jsonl"
    res.write_jsonl(path)
    lines = [json.loads(l) for l in open(path)]
    assert len(lines) == 8 and lines[0]["iteration"] == 1
    y = res.field_outputs[-1]
    assert lines[-1]["digest"] == hashlib.sha256(y.astype("<u4").tobytes()).hexdigest()


def test_mean_estimation_tracks_oracle():
    cfg = config(iterations=16, dimension=20, noise_scale=0.05, granularity=0.01, seed=4)
    plan = tree_plan(16)
    ctx = Context.build(cfg, plan)
    task = MeanEstimation(cfg.n * cfg.iterations, cfg.dimension, seed=1)
    outs, truth, err, trs = run_mean_estimation(ctx, task)
    oracle = plaintext_oracle(ctx, task)
    assert all(np.array_equal(t.output_field, o) for t, o in zip(trs, oracle))
    assert err.shape == (16,)


def test_linear_regression_improves():
    cfg = config(iterations=16, dimension=8, noise_scale=0.005, granularity=0.001, clip_norm=10.0, seed=2)
    ctx = Context.build(cfg, tree_plan(16))
    task = LinearRegression(cfg.n * cfg.iterations, cfg.dimension, learning_rate=0.5, seed=3)
    start = task.loss()
    losses, _ = run_linear_regression(ctx, task)
    assert losses[-1] < start
