#!/usr/bin/env python3
"""Regenerate the committed golden files by running the exhaustive oracles.

Slow (minutes): the tiny-grid suite enumerates up to 3^16 fields per
instance.  Run from the repository root; writes into src/gridmrf/golden/.
"""

import argparse
import time
from pathlib import Path

from gridmrf import verify

GOLDEN_DIR = Path(__file__).resolve().parent.parent / "src" / "gridmrf" / "golden"


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--suite", choices=("all", "tiny", "chain"), default="all")
    args = parser.parse_args()
    GOLDEN_DIR.mkdir(parents=True, exist_ok=True)
    if args.suite in ("all", "tiny"):
        t0 = time.time()
        records = verify.make_tiny_records()
        verify.write_golden("tiny", records, GOLDEN_DIR / "tiny.txt")
        worst = max(int(r["edp8"]) / int(r["oracle"]) for r in records)
        print(f"tiny: {len(records)} records, worst ratio {worst:.4f}, {time.time() - t0:.1f}s")
    if args.suite in ("all", "chain"):
        t0 = time.time()
        records = verify.make_chain_records()
        verify.write_golden("chain", records, GOLDEN_DIR / "chain.txt")
        unique = sum(int(r["unique"]) for r in records)
        print(f"chain: {len(records)} records, {unique} unique optima, {time.time() - t0:.1f}s")


if __name__ == "__main__":
    main()
