#!/usr/bin/env python3
"""Walk one covert-FIFO run end to end and print what each side saw.

Usage: python scripts/exfil_demo.py [--ticks N] [--defense rate|acl|syscall]
"""

import argparse
import sys
from collections import Counter
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from satsim import ScenarioConfig, run  # noqa: E402


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--ticks", type=int, default=500)
    parser.add_argument("--defense", choices=["rate", "acl", "syscall"], default=None)
    args = parser.parse_args()

    defenses = (args.defense,) if args.defense else ()
    result = run(ScenarioConfig(scenario=5, run_ticks=args.ticks, defenses=defenses))

    print("== omniscient highlights ==")
    for e in result.log:
        if e.kind in ("trigger_fired", "coordination_sent", "coordination_received",
                      "exfil_toggle", "kill_handled", "crash_record", "syscall_denied"):
            print(f"  tick {e.tick:>4}  {e.source:<14} {e.kind} {e.data}")

    print("\n== what the operator saw ==")
    kinds = Counter(entry["type"] for entry in result.report["operator_view"])
    print(f"  view entries by type: {dict(kinds)}")
    security = [e for e in result.report["operator_view"] if e["type"] == "security"]
    for entry in security[:5]:
        print(f"  security: {entry}")

    print("\n== adversary's take ==")
    by_stream = Counter(r.mid_name for r in result.ground.exfil_ledger)
    print(f"  exfiltrated packets: {sum(by_stream.values())} {dict(by_stream)}")
    print(f"\nverdict: {result.verdict.outcome.value}   stealth: {result.report['stealth']['stealth']}")


if __name__ == "__main__":
    main()
