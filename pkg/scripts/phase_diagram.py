#!/usr/bin/env python3
"""Sweep the index over (p, a_left) for a fixed right limit.

Writes one CSV row per grid point; the index jumps exactly where |p|
crosses |a| on either side.  Output goes to stdout or --out.
"""

import argparse
import csv
import math
import sys

from ssqw.analytic import witten_index
from ssqw.model import CoinProfile, LimitCoin, validate_parameters


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--a-right", type=float, default=0.0)
    parser.add_argument("--n-p", type=int, default=79, help="p samples in (-1, 1)")
    parser.add_argument("--n-a", type=int, default=19, help="a_left samples in (-1, 1)")
    parser.add_argument("--out", default=None)
    args = parser.parse_args()

    right = LimitCoin.symmetric(args.a_right, math.sqrt(1.0 - args.a_right**2))
    sink = open(args.out, "w", newline="") if args.out else sys.stdout
    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(["p", "a_left", "fredholm", "index"])
    for i in range(1, args.n_p + 1):
        p = -1.0 + 2.0 * i / (args.n_p + 1)
        params = validate_parameters(p, math.sqrt(1.0 - p * p))
        for j in range(1, args.n_a + 1):
            a_l = -1.0 + 2.0 * j / (args.n_a + 1)
            left = LimitCoin.symmetric(a_l, math.sqrt(1.0 - a_l * a_l))
            report = witten_index(params, CoinProfile(left, right))
            writer.writerow([
                repr(p), repr(a_l),
                "true" if report.fredholm else "false",
                "" if report.index is None else report.index,
            ])
    if args.out:
        sink.close()
        print(f"wrote {args.out}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
