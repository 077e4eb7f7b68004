#!/usr/bin/env python3
"""Recompute the expected-utility lines of a `dstit eval --explain` trace.

Reads the trace on stdin. Each line of the form

    eu {h1} = 9/10 * 1 [m2/h1] + 1/10 * -1 [m3/h3] = 4/5

is summed term by term with exact fractions and compared with the printed
total. With an oracle file (see eu_oracle.py) the totals are also compared
against the oracle entry for AGENT at MOMENT.

Usage: dstit eval ... --explain | check_explain.py [ORACLE AGENT MOMENT]
Exit status 0 when every line agrees, 1 otherwise.
"""

import json
import re
import sys
from fractions import Fraction

LINE = re.compile(r"^\s*eu (\{[^}]*\}) = (.*) = (-?\d+(?:/\d+)?)\s*$")
TERM = re.compile(r"^(-?\d+(?:/\d+)?) \* (-?\d+(?:/\d+)?) \[[^\]]+\]$")


def main():
    expected = None
    if len(sys.argv) == 4:
        with open(sys.argv[1]) as f:
            expected = json.load(f)[sys.argv[2]][sys.argv[3]]
    seen, bad = 0, 0
    for line in sys.stdin:
        m = LINE.match(line)
        if not m:
            continue
        cell, terms, total = m.groups()
        s = Fraction(0)
        for term in terms.split(" + "):
            t = TERM.match(term.strip())
            if not t:
                print(f"unreadable term `{term}` in: {line.strip()}")
                bad += 1
                continue
            s += Fraction(t.group(1)) * Fraction(t.group(2))
        if s != Fraction(total):
            print(f"sum {s} != {total}: {line.strip()}")
            bad += 1
        if expected is not None and Fraction(expected[cell]) != s:
            print(f"oracle says {expected[cell]}: {line.strip()}")
            bad += 1
        seen += 1
    print(f"{seen} lines checked, {bad} disagreements")
    sys.exit(1 if bad or not seen else 0)


if __name__ == "__main__":
    main()
