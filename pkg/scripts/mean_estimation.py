"""Toy private mean estimation: protocol error against the analytic noise prediction."""

import argparse

import numpy as np

from dmm.factorization import tree_plan
from dmm.simulator import Context, ProtocolConfig
from dmm.tasks import MeanEstimation, run_mean_estimation


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--iterations", type=int, default=64)
    ap.add_argument("--n", type=int, default=16)
    ap.add_argument("--dimension", type=int, default=16)
    ap.add_argument("--granularity", type=float, default=0.01)
    ap.add_argument("--sigma", type=float, default=0.3)
    ap.add_argument("--trials", type=int, default=20)
    args = ap.parse_args()

    plan = tree_plan(args.iterations)
    n, d = args.n, args.dimension
    t_c = max(1, n // 6)
    t_d = max(0, (n - 1) // 3 - t_c)
    predicted = (plan.B**2).sum(axis=1) * n * d * args.sigma**2
    total = np.zeros(args.iterations)
    for trial in range(args.trials):
        cfg = ProtocolConfig(n=n, t_c=t_c, t_d=t_d, mu="1/6", iterations=args.iterations, dimension=d,
                             granularity=args.granularity, noise_scale=args.sigma, seed=trial)
        _, _, sq_err, _ = run_mean_estimation(Context.build(cfg, plan), MeanEstimation(n * args.iterations, d, seed=trial))
        total += sq_err
    mean = total / args.trials
    print(f"{'T':>4} {'empirical':>11} {'predicted':>11} {'ratio':>7}")
    for T in range(args.iterations):
        print(f"{T + 1:>4} {mean[T]:>11.4f} {predicted[T]:>11.4f} {mean[T] / predicted[T]:>7.3f}")


if __name__ == "__main__":
    main()
