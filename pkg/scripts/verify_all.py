"""Acceptance suite without pytest: one PASS/FAIL line per criterion.

    python scripts/verify_all.py [--only 3,4] [--json results.json]
"""

import argparse
import json

from flowlab.acceptance import run_all


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--only", help="comma-separated criterion numbers")
    ap.add_argument("--json", help="write detailed results here")
    args = ap.parse_args()
    only = {int(x) for x in args.only.split(",")} if args.only else None
    results = run_all(only)
    for r in results:
        print(r.line())
    print(f"{sum(r.passed for r in results)}/{len(results)} criteria passed")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump([r.to_json() for r in results], fh, indent=2)
    return 0 if all(r.passed for r in results) else 1


if __name__ == "__main__":
    raise SystemExit(main())
