#!/usr/bin/env python3
"""Reproduce the scenario/countermeasure matrix and print it as a table.

Usage: python scripts/run_matrix.py [--ticks N] [--out matrix.json]
"""

import argparse
import json
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from satsim import ScenarioConfig, run_matrix  # noqa: E402


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--ticks", type=int, default=500)
    parser.add_argument("--out", default=None)
    args = parser.parse_args()

    t0 = time.monotonic()
    matrix = run_matrix(ScenarioConfig(run_ticks=args.ticks))
    elapsed = time.monotonic() - t0

    header = f"{'sc':>2}  {'actor':<9} {'trigger':<8} {'coordination':<12} {'stealth':<7} {'no defense':<11} {'countermeasure':<38} verdict"
    print(header)
    print("-" * len(header))
    for row in matrix["rows"]:
        mark = "yes" if row["stealth"] else "no"
        print(
            f"{row['scenario']:>2}  {row['actor']:<9} {row['trigger']:<8} "
            f"{row['coordination']:<12} {mark:<7} "
            f"{row['verdicts']['none']:<11} {row['countermeasure']:<38} "
            f"{row['verdicts']['countermeasure']}"
        )
    print(f"\n{len(matrix['rows'])} scenarios x 2 defense sets in {elapsed:.1f}s")

    if args.out:
        Path(args.out).write_text(json.dumps(matrix, indent=2, sort_keys=True) + "\n")
        print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
