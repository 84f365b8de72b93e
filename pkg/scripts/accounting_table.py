"""Planned noise parameters and guarantees for the tree mechanism on both presets."""

import math

from dmm import accounting as acc
from dmm.factorization import SCENARIOS, sensitivity, tree_gram


def main() -> None:
    print(f"{'dataset':<8} {'eps':>5} {'sigma':>11} {'gamma':>11} {'eps_cdp':>8} {'eps_adp':>8}")
    for ds in ("so", "femnist"):
        s = SCENARIOS[(ds, "honaker")]
        delta_c = sensitivity(None, s.b, gram=tree_gram(s.iterations))
        b_norm = math.sqrt(s.iterations.bit_length())
        delta = 1 / (s.n * s.iterations)
        for eps in (1.0, 2.0, 4.0, 8.0):
            p = acc.plan_parameters(s.n, s.dimension, s.iterations, 1.0, eps, math.sqrt(s.iterations),
                                    b_norm, delta_c, 4294967291)
            print(f"{ds:<8} {eps:>5g} {p.noise_scale:>11.4e} {p.granularity:>11.4e} {p.epsilon_cdp:>8.4f} "
                  f"{acc.cdp_to_adp(p.epsilon_cdp, delta):>8.3f}")


if __name__ == "__main__":
    main()
