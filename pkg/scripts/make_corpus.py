#!/usr/bin/env python3
"""Generate a seeded synthetic price corpus as a timestamp,price CSV."""

import argparse

from evcharge.harness.synthetic import MODELS, write_corpus


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("out", help="output CSV path")
    ap.add_argument("--model", choices=MODELS, default="descending")
    ap.add_argument("--days", type=int, default=10)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--lo", type=float, default=1.0)
    ap.add_argument("--hi", type=float, default=10.0)
    ap.add_argument("--start", default="2021-03-01", help="first calendar day")
    ap.add_argument("--slot-minutes", type=int, default=5)
    args = ap.parse_args()
    path = write_corpus(
        args.out, args.model, args.days, args.seed,
        lo=args.lo, hi=args.hi, start=args.start, slot_minutes=args.slot_minutes,
    )
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
