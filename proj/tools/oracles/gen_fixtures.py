#!/usr/bin/env python3
"""Freeze reference correlator tables from the sympy evaluator into tests/fixtures."""
import json
import os
import sys

import sympy as sp

sys.path.insert(0, os.path.dirname(__file__))
from tr_oracle import Oracle  # noqa: E402

CASES = [
    ("airy_r2s3_chi2", 2, 3, 2, {}),
    ("r2s1_chi2", 2, 1, 2, {}),
    ("r2s1_shifted_chi2", 2, 1, 2, {(1, 1): sp.Rational(1, 2), (2, 1): sp.Rational(-1, 3), (2, 2): 2}),
    ("r3s2_chi2", 3, 2, 2, {}),
    ("r3s2_shifted_chi2", 3, 2, 2, {(1, 1): 1}),
    ("r3s1_shifted_chi1", 3, 1, 1, {(1, 1): sp.Rational(1, 3), (2, 1): 1, (3, 1): sp.Rational(-1, 2), (2, 2): 1, (3, 2): sp.Rational(1, 5)}),
]


def main():
    outdir = sys.argv[1]
    only = set(sys.argv[2:])
    for name, r, s, chi, shifts in CASES:
        if only and name not in only:
            continue
        o = Oracle(r, s, shifts)
        o.run(chi)
        entries = []
        for (g2, n) in sorted(o.table, key=lambda p: (p[0] - 2 + p[1], p[1])):
            for k, v in sorted(o.coefficients(g2, n).items()):
                entries.append({"two_g": g2, "n": n, "keys": list(k), "value": str(sp.Rational(v))})
        doc = {
            "r": r, "s": s, "chi": chi,
            "shifts": [{"i": i, "l": l, "value": str(sp.Rational(v))} for (i, l), v in sorted(shifts.items())],
            "entries": entries,
        }
        with open(os.path.join(outdir, f"oracle_{name}.json"), "w") as fh:
            json.dump(doc, fh, indent=1)
        print(name, len(entries), flush=True)


if __name__ == "__main__":
    main()
