/* -*- C++ -*- */
#pragma once

/*
 * W(gl_r) modes in the twisted Heisenberg representation, the shifted (r,s)
 * Airy structure, and the verifier H^i_k Z = 0 for the partition function
 * assembled from a correlator table.
 *
 * Normalisation.  The modes are
 *   J_p = hbar d/dx_p (p > 0),   J_{-p} = hbar p x_p (p > 0),   J_0 = 0,
 * plus constant charges that realise the conjugation by the unstable data:
 *   J_{-s} += r            (omega_{0,1} = r z^(s-1) dz)
 *   J_{s(i-1)} += hbar (-1)^(i-1) S_{i,1}   (omega_{1/2,1}).
 * With these, the generating field
 *   sum_{|Z|=i} sum_{matchings} prod_{pairs} hbar^2 omega02 :prod_{rest} J(theta^m z):
 * has modes
 *   W^i_k = r^-i sum_j i!/(2^j j! (i-2j)!) hbar^(2j) sum_{sum p = rk} Psi^(j)_r(p) :prod J_p:,
 * Psi^(j)_r(a) = (1/i!) sum_{distinct m} prod_pairs theta^(m+m')/(theta^m-theta^m')^2 prod theta^(-m a),
 * and Z = exp(sum hbar^(2g-2+n)/n! F_{g,n}[k] x_k) is annihilated by
 * W^i_k - delta_{k,0} sum_l hbar^l S_{i,l} for k >= -floor(s(i-1)/r).
 * This is the conjugated representation rho up to rescaling x and hbar; its
 * leading term is (-1)^(i-1) hbar J_{rk+s(i-1)}.
 */

#include "report.hpp"
#include "tr.hpp"

#include <mutex>

namespace shtr {

/* ---------------------------------------------------------------------- */
/* Psi coefficients and partitions                                          */

/// Psi^(j)_r(a_{2j+1}, ..., a_i) with i = 2j + |a|; rational, memoised on residues mod r.
inline Rat psi_coefficient(int r, int j, const std::vector<long> &a)
{
        const int i = 2 * j + static_cast<int>(a.size());
        if (j < 0 || i > r)
                throw Error("invalid-parameter", "Psi needs 0 <= 2j <= i <= r");
        std::vector<long> key;
        for (long v : a)
                key.push_back(mod_floor(v, r));
        std::sort(key.begin(), key.end());
        static std::mutex mu;
        static std::map<std::tuple<int, int, std::vector<long>>, Rat> memo;
        {
                std::lock_guard<std::mutex> lock(mu);
                auto it = memo.find({r, j, key});
                if (it != memo.end())
                        return it->second;
        }
        const CycContext &C = cyclotomic_context(r);
        CycNum total(C, 0);
        std::vector<int> m(i, 0);
        std::vector<bool> used(r, false);
        std::vector<CycNum> pair(r * r, CycNum(C, 0));
        for (int u = 0; u < r; ++u)
                for (int v = 0; v < r; ++v)
                        if (u != v) {
                                CycNum d = CycNum::theta(C, u) - CycNum::theta(C, v);
                                pair[u * r + v] = CycNum::theta(C, u + v) / (d * d);
                        }
        std::function<void(int)> rec = [&](int pos) {
                if (pos == i) {
                        CycNum t(C, 1);
                        for (int q = 0; q < j; ++q)
                                t = t * pair[m[2 * q] * r + m[2 * q + 1]];
                        long ph = 0;
                        for (int l = 2 * j; l < i; ++l)
                                ph -= m[l] * key[l - 2 * j];
                        total += t * CycNum::theta(C, ph);
                        return;
                }
                for (int v = 0; v < r; ++v)
                        if (!used[v]) {
                                used[v] = true;
                                m[pos] = v;
                                rec(pos + 1);
                                used[v] = false;
                        }
        };
        rec(0);
        Int fact = 1;
        for (int q = 2; q <= i; ++q)
                fact *= q;
        Rat val = rational_of(total) / Rat(fact);
        std::lock_guard<std::mutex> lock(mu);
        memo[{r, j, key}] = val;
        return val;
}

/// Mode floors -floor(s(i-1)/r), i = 1..r.
inline std::vector<int> mode_floors(int r, int s)
{
        std::vector<int> f;
        for (int i = 1; i <= r; ++i)
                f.push_back(-static_cast<int>(floor_div(static_cast<long>(s) * (i - 1), r)));
        return f;
}

/// Checks 1 - lambda(i) = -floor(s(i-1)/r) for all i.
inline bool lambda_identity_holds(int r, int s)
{
        auto lam = Curve::lambda_partition(r, s);
        auto fl = mode_floors(r, s);
        for (int i = 1; i <= r; ++i)
                if (1 - Curve::lambda_of(lam, i) != fl[i - 1])
                        return false;
        return true;
}

/* ---------------------------------------------------------------------- */
/* Weyl-algebra polynomials                                                 */

/// hbar-graded rational coefficient.
using HPoly = std::map<int, Rat>;

inline void hp_add(HPoly &a, int e, const Rat &v)
{
        if (v == 0)
                return;
        Rat &t = a[e];
        t += v;
        if (t == 0)
                a.erase(e);
}

inline HPoly hp_mul(const HPoly &a, const HPoly &b)
{
        HPoly o;
        for (auto &[ea, va] : a)
                for (auto &[eb, vb] : b)
                        hp_add(o, ea + eb, va * vb);
        return o;
}

/// Normal-ordered monomial x_{a1} ... x_{am} d_{b1} ... d_{bl} (sorted index lists).
struct WeylMono {
        Key x, d;
        friend bool operator<(const WeylMono &a, const WeylMono &b) { return std::tie(a.x, a.d) < std::tie(b.x, b.d); }
        friend bool operator==(const WeylMono &a, const WeylMono &b) { return a.x == b.x && a.d == b.d; }
};

struct WeylPoly {
        std::map<WeylMono, HPoly> terms;

        void add(const WeylMono &m, const HPoly &c)
        {
                for (auto &[e, v] : c)
                        add(m, e, v);
        }
        void add(const WeylMono &m, int hpow, const Rat &v)
        {
                if (v == 0)
                        return;
                auto &h = terms[m];
                hp_add(h, hpow, v);
                if (h.empty())
                        terms.erase(m);
        }
        WeylPoly &operator+=(const WeylPoly &o)
        {
                for (auto &[m, c] : o.terms)
                        add(m, c);
                return *this;
        }
        WeylPoly operator-(const WeylPoly &o) const
        {
                WeylPoly r = *this;
                for (auto &[m, c] : o.terms)
                        for (auto &[e, v] : c)
                                r.add(m, e, -v);
                return r;
        }
        bool is_zero() const { return terms.empty(); }

        int min_hpow() const
        {
                int m = INT_MAX;
                for (auto &[mono, c] : terms)
                        if (!c.empty())
                                m = std::min(m, c.begin()->first);
                return m;
        }

        /// Product with normal ordering: d_q x_q = x_q d_q + 1.
        friend WeylPoly operator*(const WeylPoly &a, const WeylPoly &b)
        {
                WeylPoly out;
                for (auto &[ma, ca] : a.terms)
                        for (auto &[mb, cb] : b.terms) {
                                HPoly c = hp_mul(ca, cb);
                                // move the derivatives of ma through the multiplications of mb
                                std::map<WeylMono, Rat> cur{{{ma.x, ma.d}, Rat(1)}};
                                for (int q : mb.x) {
                                        std::map<WeylMono, Rat> nxt;
                                        for (auto &[m, v] : cur) {
                                                WeylMono t = m;
                                                t.x.insert(std::upper_bound(t.x.begin(), t.x.end(), q), q);
                                                nxt[t] += v;
                                                long cnt = std::count(m.d.begin(), m.d.end(), q);
                                                if (cnt) {
                                                        WeylMono u = m;
                                                        u.d.erase(std::find(u.d.begin(), u.d.end(), q));
                                                        nxt[u] += v * Rat(cnt);
                                                }
                                        }
                                        cur = std::move(nxt);
                                }
                                for (auto &[m, v] : cur) {
                                        WeylMono t = m;
                                        for (int q : mb.d)
                                                t.d.insert(std::upper_bound(t.d.begin(), t.d.end(), q), q);
                                        for (auto &[e, cv] : c)
                                                out.add(t, e, cv * v);
                                }
                        }
                return out;
        }

        std::string str() const
        {
                std::ostringstream os;
                bool first = true;
                for (auto &[m, c] : terms) {
                        if (!first)
                                os << " + ";
                        first = false;
                        os << "(";
                        bool f2 = true;
                        for (auto &[e, v] : c) {
                                os << (f2 ? "" : " + ") << v.get_str() << " h^" << e;
                                f2 = false;
                        }
                        os << ")";
                        for (int q : m.x)
                                os << " x" << q;
                        for (int q : m.d)
                                os << " d" << q;
                }
                return first ? "0" : os.str();
        }
};

/* ---------------------------------------------------------------------- */
/* The shifted (r,s) Airy structure                                         */

class AiryStructure {
public:
        explicit AiryStructure(const Curve &curve) : C_(curve)
        {
                if (curve.deformed())
                        throw Error("unsupported-case", "the W-constraint verifier handles undeformed curves only");
        }

        const Curve &curve() const { return C_; }

        /// Constant charge carried by J_p, as an hbar-graded value.
        HPoly charge(int p) const
        {
                HPoly h;
                const int r = C_.r(), s = C_.s();
                if (p == -s)
                        hp_add(h, 0, Rat(r));
                for (int i = 1; i <= r; ++i)
                        if (p == s * (i - 1)) {
                                Rat S = C_.shift(i, 1);
                                hp_add(h, 1, i % 2 ? S : -S);
                        }
                return h;
        }

        /// J_p as a Weyl polynomial (operator part plus charge).
        WeylPoly J(int p) const
        {
                WeylPoly w;
                if (p > 0)
                        w.add({{}, {p}}, 1, Rat(1));
                else if (p < 0)
                        w.add({{-p}, {}}, 1, Rat(-p));
                for (auto &[e, v] : charge(p))
                        w.add({{}, {}}, e, v);
                return w;
        }

        /// The twist: conjugation by T = exp(r/(s hbar^2) J_s) with the bare J_s = hbar d_s.
        /// Checks T J_m T^-1 = J_m + [log T, J_m] = J_m + r delta_{m,-s} on the bare generator and
        /// that the series terminates ([log T, [log T, J_m]] = 0).
        bool twist_conjugation_holds(int m) const
        {
                const int r = C_.r(), s = C_.s();
                WeylPoly A;
                A.add({{}, {s}}, -1, frac(r, s));
                WeylPoly bare;
                if (m > 0)
                        bare.add({{}, {m}}, 1, Rat(1));
                else if (m < 0)
                        bare.add({{-m}, {}}, 1, Rat(-m));
                WeylPoly c1 = A * bare - bare * A;
                WeylPoly c2 = A * c1 - c1 * A;
                WeylPoly expect;
                if (m == -s)
                        expect.add({{}, {}}, 0, Rat(r));
                return (c1 - expect).is_zero() && c2.is_zero();
        }

        /// rho(W^{hbar,i}_k(S)) restricted to mode indices |p| <= M.
        WeylPoly mode(int i, int k, int M) const
        {
                const int r = C_.r(), s = C_.s();
                if (M < r * k + s * (i - 1))
                        throw Error("window-too-small", "need M >= rk + s(i-1) = " + std::to_string(r * k + s * (i - 1)));
                return mode_impl(i, k, [M](int p) { return p >= -M && p <= M; }, M);
        }

        /// Mode with derivative indices restricted to p <= dmax (exact when acting on Z with keys <= dmax).
        WeylPoly mode_for_action(int i, int k, int dmax) const
        {
                const int r = C_.r(), s = C_.s();
                const int top = std::max(dmax, s * (r - 1));
                const int M = std::max(top, (i - 1) * top + std::max(0, -r * k) + s) + r * std::abs(k) + s * r;
                return mode_impl(i, k, [top](int p) { return p <= top; }, M);
        }

        /// Leading form check: the hbar^1 part equals (-1)^(i-1) J_{rk+s(i-1)}.
        bool leading_form_holds(int i, int k, int M) const
        {
                WeylPoly w = mode(i, k, M);
                if (w.min_hpow() < 1)
                        return false;
                WeylPoly lead;
                for (auto &[m, c] : w.terms)
                        if (auto it = c.find(1); it != c.end())
                                lead.add(m, 1, it->second);
                WeylPoly expect;
                const int p = C_.r() * k + C_.s() * (i - 1);
                for (auto &[m, c] : J(p).terms)
                        for (auto &[e, v] : c)
                                if (e == 1)
                                        expect.add(m, 1, i % 2 ? v : -v);
                return (lead - expect).is_zero();
        }

        /* -------------------------------------------------------------- */

        /// Result of Z^-1 W Z: x-monomial -> hbar-graded coefficient.
        using XPoly = std::map<Key, HPoly>;

        /// Verify W^i_k Z = 0 mod hbar^(N+1) for i in [r], -floor(s(i-1)/r) <= k <= K.
        Report verify(const CorrelatorTable &table, int N, int K) const
        {
                Report rep;
                const int r = C_.r(), s = C_.s();
                if (table.chi_max < N - 1)
                        throw Error("incomplete-table", "W-constraints to hbar^" + std::to_string(N) +
                                                                " need the table to chi = " + std::to_string(N - 1));
                PartitionFunction Z(table, N);
                const int dmax = std::max(table.max_key(), s * (r - 1));
                for (int i = 1; i <= r; ++i) {
                        const int kmin = -static_cast<int>(floor_div(static_cast<long>(s) * (i - 1), r));
                        for (int k = kmin; k <= K; ++k) {
                                WeylPoly w = mode_for_action(i, k, dmax);
                                if (k == 0)
                                        for (int l = 1; l <= N; ++l)
                                                w.add({{}, {}}, l, -C_.shift(i, l));
                                XPoly res = Z.conjugate(w);
                                std::string loc = "H^" + std::to_string(i) + "_" + std::to_string(k);
                                std::string wit;
                                for (auto &[x, h] : res) {
                                        for (auto &[e, v] : h)
                                                if (e <= N && v != 0) {
                                                        wit = "hbar^" + std::to_string(e) + " x" + Recursion::key_str(x) +
                                                              " coefficient " + v.get_str();
                                                        break;
                                                }
                                        if (!wit.empty())
                                                break;
                                }
                                rep.add("w-constraint", wit.empty(), loc, wit);
                        }
                }
                return rep;
        }

        /// Z = exp(Phi), Phi = sum hbar^(2g-2+n)/n! F x^n, truncated at hbar^N.
        class PartitionFunction {
        public:
                PartitionFunction(const CorrelatorTable &t, int N) : N_(N)
                {
                        for (auto &[gn, T] : t.F) {
                                const int chi = gn.first - 2 + gn.second;
                                for (auto &[k, v] : T)
                                        if (v != 0)
                                                entries_.push_back({k, chi, v});
                        }
                }

                /// d_B Phi for a sorted multiset B: sum hbar^chi F[B u R] x^R / prod mult_R!.
                const XPoly &dphi(const Key &B) const
                {
                        if (auto it = dmemo_.find(B); it != dmemo_.end())
                                return it->second;
                        XPoly out;
                        for (auto &e : entries_) {
                                if (e.chi > N_)
                                        continue;
                                Key R;
                                size_t j = 0;
                                for (size_t i = 0; i < e.key.size(); ++i) {
                                        if (j < B.size() && e.key[i] == B[j])
                                                ++j;
                                        else
                                                R.push_back(e.key[i]);
                                }
                                if (j != B.size())
                                        continue;
                                Rat c = e.value;
                                for (size_t a = 0; a < R.size();) {
                                        size_t b = a;
                                        while (b < R.size() && R[b] == R[a])
                                                ++b;
                                        for (size_t m = 2; m <= b - a; ++m)
                                                c /= m;
                                        a = b;
                                }
                                hp_add(out[R], e.chi, c);
                        }
                        return dmemo_.emplace(B, out).first->second;
                }

                /// Z^-1 d_D Z = sum over set partitions of D of prod_blocks d_B Phi.
                const XPoly &dz(const Key &D) const
                {
                        if (auto it = zmemo_.find(D); it != zmemo_.end())
                                return it->second;
                        XPoly out;
                        if (D.empty()) {
                                out[{}][0] = 1;
                        } else {
                                // the block containing D[0]: choose a subset of the remaining positions
                                const int n = static_cast<int>(D.size()) - 1;
                                std::set<std::pair<Key, Key>> seen;
                                for (unsigned A = 0; A < (1u << n); ++A) {
                                        Key blk{D[0]}, rest;
                                        for (int j = 0; j < n; ++j)
                                                (A >> j & 1u ? blk : rest).push_back(D[j + 1]);
                                        std::sort(blk.begin(), blk.end());
                                        const XPoly &a = dphi(blk);
                                        if (a.empty())
                                                continue;
                                        const XPoly &b = dz(rest);
                                        for (auto &[xa, ha] : a)
                                                for (auto &[xb, hb] : b) {
                                                        Key x = xa;
                                                        x.insert(x.end(), xb.begin(), xb.end());
                                                        std::sort(x.begin(), x.end());
                                                        for (auto &[e, v] : hp_mul(ha, hb))
                                                                if (e <= N_)
                                                                        hp_add(out[x], e, v);
                                                }
                                }
                                for (auto it = out.begin(); it != out.end();)
                                        it = it->second.empty() ? out.erase(it) : std::next(it);
                        }
                        return zmemo_.emplace(D, out).first->second;
                }

                /// Z^-1 W Z for a normal-ordered W, truncated at hbar^N.
                XPoly conjugate(const WeylPoly &w) const
                {
                        XPoly out;
                        for (auto &[m, c] : w.terms) {
                                const XPoly &p = dz(m.d);
                                for (auto &[x, h] : p) {
                                        Key xx = x;
                                        xx.insert(xx.end(), m.x.begin(), m.x.end());
                                        std::sort(xx.begin(), xx.end());
                                        for (auto &[e, v] : hp_mul(c, h))
                                                if (e <= N_)
                                                        hp_add(out[xx], e, v);
                                }
                        }
                        for (auto it = out.begin(); it != out.end();)
                                it = it->second.empty() ? out.erase(it) : std::next(it);
                        return out;
                }

        private:
                struct Entry {
                        Key key;
                        int chi;
                        Rat value;
                };
                int N_;
                std::vector<Entry> entries_;
                mutable std::map<Key, XPoly> dmemo_, zmemo_;
        };

private:
        Curve C_;

        template <class Allowed>
        WeylPoly mode_impl(int i, int k, Allowed allowed, int M) const
        {
                const int r = C_.r();
                WeylPoly out;
                Rat ri = rat_pow(Rat(1, r), i);
                for (int j = 0; 2 * j <= i; ++j) {
                        const int len = i - 2 * j;
                        // i!/(2^j j! (i-2j)!) * hbar^(2j) / r^i
                        Int num = 1, den = 1;
                        for (int q = 2; q <= i; ++q)
                                num *= q;
                        for (int q = 0; q < j; ++q)
                                den *= 2;
                        for (int q = 2; q <= j; ++q)
                                den *= q;
                        for (int q = 2; q <= len; ++q)
                                den *= q;
                        const Rat pref = ri * frac(num, den);
                        if (len == 0) {
                                if (k != 0)
                                        continue;
                                out.add({{}, {}}, 2 * j, pref * psi_coefficient(r, j, {}));
                                continue;
                        }
                        // tuples p_1..p_len with sum rk; each J_p must be non-trivial. Normal products
                        // commute and Psi is symmetric, so sorted tuples are enumerated once and
                        // weighted by their number of distinct orderings.
                        std::vector<int> cand;
                        for (int p = -M; p <= M; ++p)
                                if (allowed(p) && !(p == 0 && charge(0).empty()))
                                        cand.push_back(p);
                        if (cand.empty())
                                continue;
                        const long target = static_cast<long>(r) * k, hi = cand.back();
                        Int lenf = 1;
                        for (int q = 2; q <= len; ++q)
                                lenf *= q;
                        std::vector<long> tup(len);
                        std::function<void(int, size_t, long)> rec = [&](int pos, size_t from, long sum) {
                                if (pos == len) {
                                        if (sum != target)
                                                return;
                                        Rat psi = psi_coefficient(r, j, tup);
                                        if (psi == 0)
                                                return;
                                        Int orderings = lenf;
                                        for (int a = 0, b; a < len; a = b) {
                                                for (b = a; b < len && tup[b] == tup[a]; ++b)
                                                        ;
                                                for (int q = 2; q <= b - a; ++q)
                                                        orderings /= q;
                                        }
                                        WeylPoly prod;
                                        prod.add({{}, {}}, 2 * j, pref * psi * Rat(orderings));
                                        for (long p : tup)
                                                prod = normal_product(prod, J(static_cast<int>(p)));
                                        out += prod;
                                        return;
                                }
                                const long left = len - pos;
                                for (size_t c = from; c < cand.size(); ++c) {
                                        const long p = cand[c];
                                        // the remaining entries are >= p and <= hi
                                        if (sum + p * left > target)
                                                break;
                                        if (sum + p + hi * (left - 1) < target)
                                                continue;
                                        tup[pos] = p;
                                        rec(pos + 1, c, sum + p);
                                }
                        };
                        rec(0, 0, 0);
                }
                return out;
        }

        /// Normal-ordered product :a b: (derivatives moved right without commutator terms).
        static WeylPoly normal_product(const WeylPoly &a, const WeylPoly &b)
        {
                WeylPoly out;
                for (auto &[ma, ca] : a.terms)
                        for (auto &[mb, cb] : b.terms) {
                                WeylMono m = ma;
                                m.x.insert(m.x.end(), mb.x.begin(), mb.x.end());
                                m.d.insert(m.d.end(), mb.d.begin(), mb.d.end());
                                std::sort(m.x.begin(), m.x.end());
                                std::sort(m.d.begin(), m.d.end());
                                out.add(m, hp_mul(ca, cb));
                        }
                return out;
        }
};

} // namespace shtr
