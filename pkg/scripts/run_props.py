"""Run the randomized property suites and print one line per suite.

Usage: python scripts/run_props.py [--seed 0] [--trials 200] [--suite NAME ...]
"""

import argparse
import sys
from pathlib import Path

from wfactor import props


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--trials", type=int, default=200)
    parser.add_argument("--suite", nargs="*", choices=sorted(props.SUITES))
    parser.add_argument("--persist", type=Path, help="where to write shrunk counterexamples")
    args = parser.parse_args()

    reports = props.run_all(args.seed, args.trials, args.suite, args.persist)
    for r in reports:
        status = "PASS" if r.ok else "FAIL"
        print(f"{status}  {r.name:<13} {r.passed}/{r.trials} passed, {r.skipped} skipped, {r.seconds:.1f} s")
        if not r.ok:
            print(f"      {r.message}\n      counterexample: {r.counterexample}")
    return 0 if all(r.ok for r in reports) else 1


if __name__ == "__main__":
    sys.exit(main())
