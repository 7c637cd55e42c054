#!/usr/bin/env python3
"""Run the built-in scenario suite and write reports plus label renders."""
import argparse
import sys
import time

from voidcell.harness.config import builtin_suite, load_suite
from voidcell.harness.runner import run_suite


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results/suite")
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--only", nargs="*", help="scenario names to keep")
    args = ap.parse_args()
    cfgs = load_suite(builtin_suite())
    if args.only:
        cfgs = [c for c in cfgs if c.scenario in args.only]
    t0 = time.perf_counter()
    rep = run_suite(cfgs, args.out, args.jobs, render=True)
    for s in rep["scenarios"]:
        vals = ", ".join(f"{e['datum']} {e['estimate']:.4f}" for e in s["results"][:4])
        print(f"{'PASS' if s['passed'] else 'FAIL'} {s['scenario']:<22} {vals}")
    print(f"{len(rep['scenarios'])} scenarios in {time.perf_counter() - t0:.0f} s -> {args.out}")
    return 0 if rep["passed"] else 1


if __name__ == "__main__":
    sys.exit(main())
