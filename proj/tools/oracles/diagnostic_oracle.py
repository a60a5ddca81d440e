#!/usr/bin/env python3
"""Independent evaluator for the determinant diagnostic of the (r,s) connection.

Builds y Id - Phi/dx directly from the connection potential in terms of x and y
(x = z^r, y = z^(s-r)), takes the determinant with sympy, multiplies by
dx/P_y = z^((r-1)(r+1-s)) dz and reports

  * D(z,0)/dz with symbolic shifts S_j, and
  * the minimal z-exponent of (D(z,M) - D(z,0))/dz for a matrix M with
    random integer entries (a generic M; two draws must agree).

Usage:  diagnostic_oracle.py R S [j ...]      (j = indices of nonzero shifts)
"""
import json
import random
import sys

import sympy as sp

z = sp.Symbol("z")


def alpha_floor(r, s, i):
    return (i * (r - s)) // r


def connection_over_dx(r, s, S):
    x = z**r
    F = sp.zeros(r, r)
    for k in range(1, r):
        F[k - 1, k] = x ** (alpha_floor(r, s, r - k) - alpha_floor(r, s, r + 1 - k))
    F[r - 1, 0] += x ** (-alpha_floor(r, s, 1))
    for j, Sj in S.items():
        F[j - 1, 0] += (-1) ** (j - 1) * Sj / x**j * x ** (alpha_floor(r, s, r) - alpha_floor(r, s, r + 1 - j))
    return F


def diagnostic(r, s, shifted, seed=1):
    S = {j: sp.Symbol(f"S{j}") for j in shifted}
    y = z ** (s - r)
    pref = z ** ((r - 1) * (r + 1 - s))
    A = y * sp.eye(r) - connection_over_dx(r, s, S)
    d0 = sp.expand(sp.cancel(A.det(method="berkowitz") * pref))
    rng = random.Random(seed)
    exps = []
    for _ in range(2):
        M = sp.Matrix(r, r, lambda i, j: rng.randint(-5, 5))
        Sv = {S[j]: rng.randint(1, 7) for j in shifted}
        dm = sp.expand(sp.cancel(((A - M).det(method="berkowitz") * pref).subs(Sv)))
        diff = sp.expand(dm - d0.subs(Sv))
        lo = min((sp.Poly(t * z**200, z).degree() - 200 for t in sp.Add.make_args(diff) if t != 0), default=None)
        exps.append(lo)
    if exps[0] != exps[1]:
        raise SystemExit("non-generic draw")
    return {"r": r, "s": s, "shifts": shifted, "constant_term": str(d0), "min_exponent": exps[0]}


if __name__ == "__main__":
    r, s = int(sys.argv[1]), int(sys.argv[2])
    print(json.dumps(diagnostic(r, s, [int(a) for a in sys.argv[3:]])))
