#!/usr/bin/env python3
"""Run every figure preset and write the series CSVs.

Usage:
    python scripts/reproduce_figures.py [--out DIR] [--format csv|json]

Equivalent to `centralspin preset <name>` for each preset; takes a
couple of seconds in total.  Plotting is out of scope: the emitted
columns (t, p_up, p_down, p_q, ...) feed any plotting tool directly.
"""

import argparse
import sys
import time

from centralspin.cli import PRESET_NAMES, emit_results, run_preset


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    args = parser.parse_args()
    for name in PRESET_NAMES:
        start = time.perf_counter()
        records = run_preset(name)
        paths = emit_results(records, args.out, args.format)
        print(f"{name}: {len(paths)} files in {time.perf_counter() - start:.2f}s", file=sys.stderr)
        for path in paths:
            print(path)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
