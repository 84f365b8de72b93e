"""Per-client communication for both presets, reshare-only and all-inclusive."""

import argparse

from dmm.costs import cost_row, format_bytes, simulated_reshare_bytes, CostScenario


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--csv", help="write all rows to this CSV path")
    args = ap.parse_args()
    rows = [cost_row(ds, m) for ds in ("so", "femnist") for m in ("honaker", "optimal")]
    print(f"{'dataset':<8} {'mechanism':<9} {'V':>5} {'LRP':>9} {'naive':>9} {'all-in':>9} {'SecAgg':>9}")
    for r in rows:
        print(
            f"{r.dataset:<8} {r.mechanism:<9} {r.reshared_vectors:>5} {format_bytes(r.lrp_bytes):>9} "
            f"{format_bytes(r.naive_bytes):>9} {format_bytes(r.all_inclusive_bytes):>9} "
            f"{format_bytes(r.secagg_reference):>9}"
        )
    print("\ninteger packing, one reshared vector (simulator accounting vs analytic):")
    for n, dp in ((16, 1024), (64, 16384), (64, 2**22)):
        analytic = dp / (4 * (1 / 6) ** 2 * n) * 4
        sim = simulated_reshare_bytes(n, 1 / 6, dp)
        print(f"  n={n:<3} d'={dp:<8} simulator {sim:>10} B  analytic {analytic:>12.0f} B  ratio {sim / analytic:.3f}")
    if args.csv:
        import csv
        from dataclasses import asdict

        with open(args.csv, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(asdict(rows[0])))
            w.writeheader()
            w.writerows(asdict(r) for r in rows)


if __name__ == "__main__":
    main()
