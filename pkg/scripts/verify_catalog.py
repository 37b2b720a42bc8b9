"""Verify every catalog identity and print a status table."""

import argparse
import json
import time

from tmprod.evaluator import EvalOptions
from tmprod.identities import catalog, verify
from tmprod.numeric import NumericContext


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--digits", type=int, default=30)
    ap.add_argument("--constants", help="JSON file with named constants, e.g. gamma_quarter")
    args = ap.parse_args()

    constants = {}
    if args.constants:
        with open(args.constants) as fh:
            constants = json.load(fh)
    ctx = NumericContext.for_digits(args.digits, constants=constants)

    print(f"{'id':<22} {'status':<13} {'gap':>10} {'secs':>7}  value")
    for entry in catalog():
        started = time.perf_counter()
        v = verify(ctx, entry, EvalOptions(args.digits))
        secs = time.perf_counter() - started
        gap = "-" if v.gap is None else f"{float(v.gap):.1e}"
        value = (v.value or "")[:24]
        note = f"  ({v.reason})" if v.reason else ""
        print(f"{entry.id:<22} {v.status:<13} {gap:>10} {secs:7.2f}  {value}{note}")


if __name__ == "__main__":
    main()
