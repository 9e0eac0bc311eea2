"""How fast does Ulam's method approach the arcsine density?

Prints L1 error against bin count and samples per bin, and the fitted decay
exponent. Separates discretization error (depends on bins) from sampling
error (depends on samples per bin).
"""

import argparse

import numpy as np

from flowlab import ergodic


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--bins", type=int, nargs="+", default=[256, 512, 1024, 2048, 4096, 8192])
    ap.add_argument("--samples", type=int, nargs="+", default=[1000, 4000])
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    print("bins  " + "  ".join(f"L1@{s}/bin" for s in args.samples))
    errs = {s: [] for s in args.samples}
    for n in args.bins:
        row = []
        for s in args.samples:
            e = ergodic.ulam_invariant_density("logistic", ergodic.UlamPartition(n), s, args.seed).l1_distance()
            errs[s].append(e)
            row.append(f"{e:.5f}")
        print(f"{n:<5} " + "  ".join(f"{v:>12}" for v in row))
    for s, e in errs.items():
        slope = np.polyfit(np.log(args.bins), np.log(e), 1)[0]
        print(f"samples/bin {s}: L1 ~ N^{slope:.2f}")


if __name__ == "__main__":
    main()
