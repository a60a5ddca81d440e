#!/usr/bin/env python3
"""Independent reference evaluator for shifted topological recursion.

Works with closed-form rational functions (sympy) instead of truncated
Laurent tensors: every correlator is an explicit rational function of its
variables, the kernel is the closed form z / (z0 (z0 - z)), and residues are
taken with sympy's own series machinery.  The primitive r-th root of unity is
kept as a symbol t and only reduced modulo the cyclotomic polynomial at the
very end, so no code is shared with the C++ engine.

Restricted to undeformed curves (x = z^r, omega_{0,1} = r z^{s-1} dz) with
arbitrary shifts S[i, l], which may be sympy symbols.

Usage:  tr_oracle.py R S CHI [i,l=value ...]      prints the F table as JSON
"""
import itertools
import json
import sys

import sympy as sp

t = sp.Symbol("t")
z = sp.Symbol("z")


def subsets(items):
    for k in range(len(items) + 1):
        for c in itertools.combinations(items, k):
            yield list(c)


def residue_at_zero(expr):
    """Coefficient of z^-1 of a rational function of z (other symbols generic)."""
    num, den = sp.fraction(sp.together(expr))
    dcoef = sp.Poly(sp.expand(den), z).all_coeffs()[::-1]
    ncoef = sp.Poly(sp.expand(num), z).all_coeffs()[::-1]
    m = 0
    while dcoef[m] == 0:
        m += 1
    dcoef = dcoef[m:]
    need = m - 1  # coefficient of z^(m-1) in num / (den / z^m)
    if need < 0:
        return sp.Integer(0)
    inv = [1 / dcoef[0]]
    for k in range(1, need + 1):
        acc = sum(dcoef[j] * inv[k - j] for j in range(1, min(k, len(dcoef) - 1) + 1))
        inv.append(sp.cancel(-acc / dcoef[0]))
    return sp.cancel(sum(ncoef[j] * inv[need - j] for j in range(0, min(need, len(ncoef) - 1) + 1)))


class Oracle:
    def __init__(self, r, s, shifts=None):
        self.r, self.s = r, s
        self.shifts = dict(shifts or {})
        self.phi = sp.cyclotomic_poly(r, t)
        self.table = {}  # (g2, n) -> expr in symbols w_0..w_{n-1}

    def S(self, i, l):
        return self.shifts.get((i, l), 0)

    # -- unstable data evaluated on sheet a (form coefficient incl. Jacobian)
    def w01(self, a):
        r, s = self.r, self.s
        return r * t ** (a * s) * z ** (s - 1)

    def w12(self, a):
        r, s = self.r, self.s
        w = t**a * z
        tot = sum((-1) ** (i - 1) * self.S(i, 1) * w ** (-(s * (i - 1)) - 1) for i in range(1, r + 1))
        return tot * t**a

    def factor(self, g2, pts, specs):
        if len(pts) == 1 and not specs:
            if g2 == 0:
                return None
            if g2 == 1:
                return self.w12(pts[0])
        if len(pts) == 2 and not specs and g2 == 0:
            a, b = pts
            return t ** (a + b) / ((t**a * z - t**b * z) ** 2)
        if len(pts) == 1 and len(specs) == 1 and g2 == 0:
            a = pts[0]
            return t**a / (t**a * z - specs[0]) ** 2
        n = len(pts) + len(specs)
        if g2 - 2 + n <= 0:
            return 0
        expr = self.table[(g2, n)]
        syms = sp.symbols(f"w0:{n}")
        sub = {}
        jac = 1
        for j, a in enumerate(pts):
            sub[syms[j]] = t**a * z
            jac *= t**a
        for j, u in enumerate(specs):
            sub[syms[len(pts) + j]] = u
        return expr.subs(sub, simultaneous=True) * jac

    def wprime(self, g2, pts, specs):
        if not pts:
            return sp.Integer(1) if (not specs and g2 == 0) else sp.Integer(0)
        p, rest = pts[0], pts[1:]
        total = sp.Integer(0)
        for A in subsets(rest):
            others = [q for q in rest if q not in A]
            for J in subsets(list(range(len(specs)))):
                sj = [specs[j] for j in J]
                sr = [specs[j] for j in range(len(specs)) if j not in J]
                for gb in range(0, g2 + 3):
                    g2r = g2 - gb + 2 - 2 * (1 + len(A))
                    if g2r < 0:
                        continue
                    if gb == 0 and not A and not sj:
                        continue  # omega_{0,1} factors are omitted
                    w = self.wprime(g2r, others, sr)
                    if w == 0:
                        continue
                    f = self.factor(gb, [p] + A, sj)
                    if f is None or f == 0:
                        continue
                    total += f * w
        return total

    def reduce_theta(self, expr):
        expr = sp.cancel(sp.together(expr))
        num, den = sp.fraction(expr)
        dz, dt = sp.factor(den).as_independent(t, as_Add=False)
        inv = sp.invert(sp.Poly(dt, t), sp.Poly(self.phi, t))
        num = sp.expand(num)
        res = sp.rem(sp.expand(num * inv.as_expr()), self.phi, t)
        res = sp.expand(res / dz)
        if res.has(t):
            raise ValueError("non-rational correlator coefficient")
        return res

    def step(self, g2, n):
        """omega_{g, n+1}(w0, w1..wn) with 2g = g2."""
        r, s = self.r, self.s
        syms = sp.symbols(f"w0:{n + 1}")
        z0, specs = syms[0], list(syms[1:])
        kern = z / (z0 * (z0 - z))
        br = sp.Integer(0)
        for k in range(1, r):
            for Z in itertools.combinations(range(1, r), k):
                den = sp.Integer(1)
                for a in Z:
                    den *= self.w01(a) - self.w01(0)
                br += self.wprime(g2, [0] + list(Z), specs) / den
        if n == 0:
            den = sp.Integer(1)
            for a in range(1, r):
                den *= self.w01(a) - self.w01(0)
            for i in range(1, r + 1):
                Sv = self.S(i, g2)
                if Sv != 0:
                    br -= Sv * (r / z) ** i * (-self.w01(0)) ** (r - i) / den
        res = -residue_at_zero(sp.together(kern * br))
        return self.reduce_theta(res)

    def run(self, chi_max):
        for chi in range(1, chi_max + 1):
            for n in range(1, chi + 3):
                g2 = chi + 2 - n
                if g2 < 0:
                    continue
                self.table[(g2, n)] = self.step(g2, n - 1)
        return self.table

    def coefficients(self, g2, n):
        """F[k1..kn] with k nondecreasing from omega = sum F prod w_j^{-k_j-1}."""
        syms = sp.symbols(f"w0:{n}")
        expr = sp.expand(self.table[(g2, n)])
        out = {}
        for term in sp.Add.make_args(expr):
            if term == 0:
                continue
            coeff, ks = term, []
            for w in syms:
                e = term.as_powers_dict().get(w, 0)
                ks.append(-int(e) - 1)
                coeff = coeff / w ** e
            if min(ks) < 1:
                raise ValueError("correlator term outside the xi-basis")
            key = tuple(sorted(ks))
            if key != tuple(ks):
                continue
            out[key] = out.get(key, 0) + coeff
        return {k: sp.simplify(v) for k, v in out.items() if sp.simplify(v) != 0}


def main():
    r, s, chi = map(int, sys.argv[1:4])
    shifts = {}
    for arg in sys.argv[4:]:
        key, val = arg.split("=")
        i, l = map(int, key.split(","))
        try:
            shifts[(i, l)] = sp.Rational(val)
        except TypeError:
            shifts[(i, l)] = sp.Symbol(val)
    o = Oracle(r, s, shifts)
    o.run(chi)
    doc = []
    for (g2, n) in sorted(o.table, key=lambda p: (p[0] - 2 + p[1], p[1])):
        for k, v in sorted(o.coefficients(g2, n).items()):
            doc.append({"two_g": g2, "n": n, "keys": list(k), "value": str(v)})
    print(json.dumps(doc, indent=1))


if __name__ == "__main__":
    main()
