"""Run every config in scripts/configs and print one line per experiment.

    python scripts/run_all_experiments.py [--output DIR]
"""

import argparse
import json
from pathlib import Path

from flowlab.cli import run

CONFIGS = Path(__file__).parent / "configs"


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--output", default="flowlab_out")
    args = ap.parse_args()
    worst = 0
    for path in sorted(CONFIGS.glob("*.json")):
        doc = json.loads(path.read_text())
        if "experiment" not in doc:
            continue  # structure files for `flowlab logic eval`
        report, code = run(str(path), args.output)
        worst = max(worst, code)
        n_ok = sum(c["pass"] for c in report["checks"])
        print(f"{'PASS' if code == 0 else 'FAIL'} {doc['experiment']:<11} {n_ok}/{len(report['checks'])} checks"
              f"  {report['duration_seconds']:.2f}s")
    return worst


if __name__ == "__main__":
    raise SystemExit(main())
