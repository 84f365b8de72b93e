"""Command line: ``dmm costs``, ``dmm accountant`` and ``dmm run``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from dataclasses import asdict

import numpy as np

from dmm import accounting as acc
from dmm.adversary import AdversarySpec
from dmm.costs import CostScenario, cost_row, format_bytes
from dmm.factorization import SCENARIOS, load_factorization, tree_gram, tree_plan, sensitivity
from dmm.simulator import Context, ProtocolConfig, iterate_training
from dmm.tasks import LinearRegression, MeanEstimation


def _costs(args) -> int:
    mechanisms = [args.mechanism] if args.mechanism else ["honaker", "optimal"]
    rows = [cost_row(args.preset, m) for m in mechanisms]
    print(f"{'mechanism':<10} {'T*':>5} {'V':>5} {'LRP':>10} {'naive':>10} {'LRP+round1':>11} {'SecAgg (ref)':>12}")
    for r in rows:
        print(
            f"{r.mechanism:<10} {r.iterations:>5} {r.reshared_vectors:>5} {format_bytes(r.lrp_bytes):>10} "
            f"{format_bytes(r.naive_bytes):>10} {format_bytes(r.all_inclusive_bytes):>11} "
            f"{format_bytes(r.secagg_reference):>12}"
        )
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(asdict(rows[0])))
    w.writeheader()
    for r in rows:
        w.writerow(asdict(r))
    print()
    print(buf.getvalue().rstrip())
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(buf.getvalue())
    return 0


def _accountant(args) -> int:
    scen = SCENARIOS[(args.preset, args.mechanism)]
    n = args.n or scen.n
    d = args.dimension or scen.dimension
    T = args.iterations or scen.iterations
    b = args.b or scen.b
    if args.sensitivity:
        delta_c = args.sensitivity
        b_norm = args.b_norm
    elif args.mechanism == "honaker":
        if T & (T - 1):
            raise SystemExit("the tree factorization needs a power-of-two number of iterations")
        delta_c = sensitivity(None, b, gram=tree_gram(T))
        b_norm = math.sqrt(T.bit_length())
    else:
        plan = load_factorization(args.factorization) if args.factorization else None
        if plan is None:
            raise SystemExit("optimal factorizations are loaded from a file: pass --factorization or --sensitivity")
        delta_c = plan.sensitivity
        b_norm = plan.max_row_norms()[1]
    a_norm = math.sqrt(T)
    delta = args.delta or 1.0 / (n * T)
    rows = []
    for eps in args.epsilon:
        p = acc.plan_parameters(n, d, T, args.clip, eps, a_norm, b_norm, delta_c, args.modulus)
        rows.append(
            {
                "target": eps,
                "sigma": p.noise_scale,
                "gamma": p.granularity,
                "beta": p.rounding_bias,
                "eps_cdp": p.epsilon_cdp,
                "eps_adp": acc.cdp_to_adp(p.epsilon_cdp, delta),
                "delta": delta,
                "sensitivity": delta_c,
            }
        )
    if args.json:
        print(json.dumps(rows, indent=2))
    else:
        print(f"{'target':>7} {'sigma':>11} {'gamma':>11} {'beta':>8} {'eps_cdp':>9} {'eps_adp':>9}")
        for r in rows:
            print(
                f"{r['target']:>7.3g} {r['sigma']:>11.4e} {r['gamma']:>11.4e} {r['beta']:>8.4g} "
                f"{r['eps_cdp']:>9.4f} {r['eps_adp']:>9.4f}"
            )
        print(f"sensitivity {delta_c:.6g}, delta {delta:.3g}")
    return 0


CONFIG_KEYS = {
    "committee_size": "n",
    "t_c": "t_c",
    "t_d": "t_d",
    "mu": "mu",
    "iterations": "iterations",
    "dimension": "dimension",
    "clip_norm": "clip_norm",
    "granularity": "granularity",
    "rounding_bias": "rounding_bias",
    "flatten_seed": "flatten_seed",
    "noise_scale": "noise_scale",
    "mode": "mode",
    "seed": "seed",
    "universe": "universe",
}


def config_from_json(obj: dict) -> tuple[ProtocolConfig, object]:
    kw = {CONFIG_KEYS[k]: v for k, v in obj.items() if k in CONFIG_KEYS}
    if "field" in obj:
        kw["modulus"] = int(obj["field"]["modulus"])
    cfg = ProtocolConfig(**kw)
    fac = obj.get("factorization", {"preset": "honaker"})
    if "path" in fac:
        plan = load_factorization(fac["path"])
    elif fac.get("preset", "honaker") == "honaker":
        plan = tree_plan(cfg.iterations, fac.get("b"))
    else:
        raise ValueError(f"unknown factorization {fac!r}")
    return cfg, plan


def _run(args) -> int:
    with open(args.config) as fh:
        obj = json.load(fh)
    cfg, plan = config_from_json(obj)
    ctx = Context.build(cfg, plan)
    adversary = AdversarySpec.from_json(obj.get("adversary"))
    task_name = obj.get("task", "mean")
    universe = cfg.universe or cfg.n * cfg.iterations
    if task_name == "mean":
        task = MeanEstimation(universe, cfg.dimension, cfg.clip_norm, cfg.seed)
    elif task_name == "regression":
        task = LinearRegression(universe, cfg.dimension, seed=cfg.seed)
    else:
        raise SystemExit(f"unknown task {task_name!r}")
    out_path = args.transcript or obj.get("transcript", "transcript.jsonl")
    total = 0
    last = None
    with open(out_path, "w") as fh:
        for out, tr in iterate_training(ctx, task, adversary):
            if task_name == "regression":
                task.weights = -task.learning_rate * out / cfg.n
            rec = tr.to_json()
            rec["output_norm"] = float(np.linalg.norm(out))
            fh.write(json.dumps(rec) + "\n")
            total += sum(tr.bytes_per_client.values())
            last = out
    print(f"iterations {cfg.iterations}, n {cfg.n}, k {cfg.k}, d' {cfg.padded_dimension}, batches {cfg.batches}")
    print(f"total bytes sent by clients {total}")
    if task_name == "mean":
        rosters = [cfg.roster(T) for T in range(1, cfg.iterations + 1)]
        truth = task.true_prefix_sums(rosters)[-1]
        print(f"final prefix-sum error {np.linalg.norm(last - truth):.6g} (norm of truth {np.linalg.norm(truth):.6g})")
    else:
        print(f"final training loss {task.loss():.6g}")
    print(f"transcript written to {out_path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dmm", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("costs", help="per-client communication of resharing")
    c.add_argument("--preset", choices=["so", "femnist"], required=True)
    c.add_argument("--mechanism", choices=["honaker", "optimal"])
    c.add_argument("--csv", help="also write the CSV table to this path")
    c.set_defaults(func=_costs)

    a = sub.add_parser("accountant", help="planned noise parameters and privacy guarantees")
    a.add_argument("--preset", choices=["so", "femnist"], default="so")
    a.add_argument("--mechanism", choices=["honaker", "optimal"], default="honaker")
    a.add_argument("--epsilon", type=float, nargs="+", default=[1.0, 2.0, 4.0, 8.0])
    a.add_argument("--clip", type=float, default=1.0)
    a.add_argument("--n", type=int)
    a.add_argument("--dimension", type=int)
    a.add_argument("--iterations", type=int)
    a.add_argument("--b", type=int)
    a.add_argument("--sensitivity", type=float)
    a.add_argument("--b-norm", type=float, default=1.0)
    a.add_argument("--factorization")
    a.add_argument("--delta", type=float)
    a.add_argument("--modulus", type=int, default=4294967291)
    a.add_argument("--json", action="store_true")
    a.set_defaults(func=_accountant)

    r = sub.add_parser("run", help="simulate the protocol from a JSON config")
    r.add_argument("config")
    r.add_argument("--transcript")
    r.set_defaults(func=_run)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
