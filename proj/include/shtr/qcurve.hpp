/* -*- C++ -*- */
#pragma once

/*
 * Quantum curves for undeformed shifted (r,s) curves with 1 <= s <= r-1.
 *
 * The wave function psi = exp(sum hbar^(2g-2+n)/n! int...int omega_{g,n}) is never
 * materialised.  Instead the resolvent F = hbar d/dx log psi is assembled from
 * the correlator table, and an operator P = sum c(hbar) x^a (hbar d/dx)^b is
 * checked through Q = psi^-1 P psi = sum c x^a P_b with P_0 = 1,
 * P_{b+1} = hbar dP_b/dx + P_b F.  Everything stays inside Laurent polynomials in z.
 *
 * The operator is D_1...D_r + sum_{i,l} (-1)^i hbar^l S_{i,l} D_1...D_{r-i} x^(r-s-floor(alpha_{r-i})-i) - 1
 * with D_i = hbar x^(floor(alpha_i) - floor(alpha_{i-1})) d/dx and alpha_i = i(r-s)/r.
 */

#include "table.hpp"

#include <climits>
#include <functional>
#include <optional>

namespace shtr {

/* ---------------------------------------------------------------------- */
/* Differential operators                                                   */

/// Normal-ordered operator sum c_{a,b}(hbar) x^a (hbar d/dx)^b, a rational.
class DiffOp {
public:
        using Coef = std::map<int, Rat>; // hbar power -> coefficient
        using Term = std::pair<Rat, int>; // (a, b)

        std::map<Term, Coef> terms;

        static DiffOp constant(const Rat &c, int hpow = 0)
        {
                DiffOp d;
                d.add({Rat(0), 0}, hpow, c);
                return d;
        }
        static DiffOp x_power(const Rat &a)
        {
                DiffOp d;
                d.add({a, 0}, 0, Rat(1));
                return d;
        }
        /// hbar d/dx
        static DiffOp D()
        {
                DiffOp d;
                d.add({Rat(0), 1}, 0, Rat(1));
                return d;
        }
        /// plain d/dx, carried as hbar^-1 (hbar d/dx)
        static DiffOp d()
        {
                DiffOp o;
                o.add({Rat(0), 1}, -1, Rat(1));
                return o;
        }

        void add(const Term &t, int hpow, const Rat &v)
        {
                if (v == 0)
                        return;
                auto &c = terms[t];
                Rat &e = c[hpow];
                e += v;
                if (e == 0)
                        c.erase(hpow);
                if (c.empty())
                        terms.erase(t);
        }

        bool is_zero() const { return terms.empty(); }
        int order() const
        {
                int b = 0;
                for (auto &[t, c] : terms)
                        b = std::max(b, t.second);
                return b;
        }

        DiffOp operator+(const DiffOp &o) const
        {
                DiffOp r = *this;
                for (auto &[t, c] : o.terms)
                        for (auto &[h, v] : c)
                                r.add(t, h, v);
                return r;
        }
        DiffOp operator-(const DiffOp &o) const { return *this + o.scaled(Rat(-1)); }
        DiffOp scaled(const Rat &s, int hpow = 0) const
        {
                DiffOp r;
                for (auto &[t, c] : terms)
                        for (auto &[h, v] : c)
                                r.add(t, h + hpow, v * s);
                return r;
        }

        /// Composition, normal ordered with (hbar d) x^c = x^c (hbar d) + hbar c x^(c-1).
        friend DiffOp operator*(const DiffOp &A, const DiffOp &B)
        {
                DiffOp out;
                for (auto &[ta, ca] : A.terms)
                        for (auto &[tb, cb] : B.terms) {
                                const Rat &a = ta.first, &c = tb.first;
                                const int b = ta.second, e = tb.second;
                                // (hbar d)^b x^c = sum_k C(b,k) hbar^k c(c-1)...(c-k+1) x^(c-k) (hbar d)^(b-k)
                                Rat binom = 1, fall = 1;
                                for (int k = 0; k <= b; ++k) {
                                        if (k > 0) {
                                                binom = binom * Rat(b - k + 1) / Rat(k);
                                                fall *= c - Rat(k - 1);
                                        }
                                        if (fall == 0)
                                                break;
                                        Term t{a + c - Rat(k), b - k + e};
                                        for (auto &[ha, va] : ca)
                                                for (auto &[hb, vb] : cb)
                                                        out.add(t, ha + hb + k, va * vb * binom * fall);
                                }
                        }
                return out;
        }
        friend bool operator==(const DiffOp &a, const DiffOp &b) { return a.terms == b.terms; }

        /// [{a_num, a_den, b, c: [{hpow, value}]}]
        nlohmann::ordered_json to_json() const
        {
                auto arr = nlohmann::ordered_json::array();
                for (auto &[t, c] : terms) {
                        nlohmann::ordered_json e;
                        e["a_num"] = t.first.get_num().get_si();
                        e["a_den"] = t.first.get_den().get_si();
                        e["b"] = t.second;
                        auto cs = nlohmann::ordered_json::array();
                        for (auto &[h, v] : c)
                                cs.push_back({{"hpow", h}, {"value", rat_str(v)}});
                        e["c"] = cs;
                        arr.push_back(e);
                }
                return arr;
        }

        static DiffOp from_json(const nlohmann::json &j)
        {
                DiffOp d;
                try {
                        for (auto &e : j)
                                for (auto &c : e.at("c"))
                                        d.add({frac(e.at("a_num").get<long>(), e.at("a_den").get<long>()), e.at("b").get<int>()},
                                              c.at("hpow").get<int>(), json_rat(c.at("value")));
                } catch (const nlohmann::json::exception &ex) {
                        throw Error("parse-error", std::string("operator document: ") + ex.what());
                }
                return d;
        }

        /// Normal-ordered rendering, e.g. "ℏ³ x d³/dx³ + 2 ℏ³ d²/dx² − 1".
        std::string normal_str() const
        {
                std::vector<std::string> parts;
                for (auto it = terms.rbegin(); it != terms.rend(); ++it) {
                        auto &[t, c] = *it;
                        for (auto &[h, v] : c) {
                                std::string w = word_str(t, h + t.second);
                                parts.push_back(signed_part(v, w));
                        }
                }
                return join_parts(parts);
        }

        /// Preferred rendering: if the operator is hbar^n w - 1 for a single word w in d/dx and
        /// x, print that word (the closed forms read that way); otherwise the normal-ordered form.
        std::string pretty() const
        {
                if (auto w = single_word())
                        return *w;
                return normal_str();
        }

        /// The word d^(b_0) x d^(b_1) x ... d^(b_m) as an operator (plain d/dx).
        static DiffOp word(const std::vector<int> &blocks)
        {
                DiffOp w = constant(Rat(1));
                for (size_t i = 0; i < blocks.size(); ++i) {
                        if (i > 0)
                                w = w * x_power(Rat(1));
                        for (int k = 0; k < blocks[i]; ++k)
                                w = w * d();
                }
                return w;
        }

        static std::string word_text(const std::vector<int> &blocks)
        {
                std::string s;
                auto app = [&](const std::string &w) { s += (s.empty() ? "" : " ") + w; };
                for (size_t i = 0; i < blocks.size(); ++i) {
                        if (i > 0)
                                app("x");
                        if (blocks[i] == 1)
                                app("d/dx");
                        else if (blocks[i] > 1)
                                app("d" + superscript(blocks[i]) + "/dx" + superscript(blocks[i]));
                }
                return s;
        }

        /// Unicode superscript digits, e.g. 12 -> "¹²".
        static std::string superscript(int n)
        {
                static const char *digits[] = {"⁰", "¹", "²", "³", "⁴", "⁵", "⁶", "⁷", "⁸", "⁹"};
                std::string s = n < 0 ? "⁻" : "";
                for (char c : std::to_string(n < 0 ? -n : n))
                        s += digits[c - '0'];
                return s;
        }

private:
        static std::string hbar_str(int h)
        {
                if (h == 0)
                        return "";
                if (h == 1)
                        return "ℏ";
                return "ℏ" + superscript(h);
        }

        static std::string word_str(const Term &t, int h)
        {
                std::string s = hbar_str(h);
                auto app = [&](const std::string &w) { s += (s.empty() ? "" : " ") + w; };
                if (t.first != 0)
                        app(t.first == 1 ? std::string("x") : "x^" + rat_str(t.first));
                if (t.second == 1)
                        app("d/dx");
                else if (t.second > 1)
                        app("d" + superscript(t.second) + "/dx" + superscript(t.second));
                return s;
        }

        static std::string signed_part(const Rat &v, const std::string &w)
        {
                Rat a = abs(v);
                std::string mag = w.empty() ? rat_str(a) : (a == 1 ? w : rat_str(a) + " " + w);
                return (v < 0 ? "− " : "+ ") + mag;
        }

        static std::string join_parts(const std::vector<std::string> &parts)
        {
                if (parts.empty())
                        return "0";
                std::string s;
                for (size_t i = 0; i < parts.size(); ++i) {
                        const std::string &p = parts[i];
                        if (i == 0)
                                s = p.rfind("+ ", 0) == 0 ? p.substr(2) : "−" + p.substr(std::string("− ").size());
                        else
                                s += " " + p;
                }
                return s;
        }

        std::optional<std::string> single_word() const
        {
                // split off the constant -1
                DiffOp rest = *this + constant(Rat(1));
                int h = INT_MIN, nd = 0;
                for (auto &[t, c] : rest.terms)
                        for (auto &[hp, v] : c) {
                                int tot = hp + t.second;
                                if (h == INT_MIN)
                                        h = tot;
                                if (tot != h)
                                        return std::nullopt;
                        }
                if (h == INT_MIN)
                        return std::nullopt;
                nd = rest.order();
                if (nd == 0)
                        return std::nullopt;
                // candidate words: nd derivatives, up to nd x's, blocks in between
                for (int nx = 0; nx <= nd; ++nx) {
                        std::vector<int> blocks(nx + 1, 0);
                        std::optional<std::string> found;
                        std::function<bool(int, int)> rec = [&](int i, int left) {
                                if (i == nx) {
                                        blocks[i] = left;
                                        if ((word(blocks).scaled(Rat(1), h)) == rest) {
                                                found = hbar_str(h) + " " + word_text(blocks) + " − 1";
                                                return true;
                                        }
                                        return false;
                                }
                                for (int b = 0; b <= left; ++b) {
                                        blocks[i] = b;
                                        if (rec(i + 1, left - b))
                                                return true;
                                }
                                return false;
                        };
                        if (rec(0, nd))
                                return found;
                }
                return std::nullopt;
        }
};

/* ---------------------------------------------------------------------- */
/* Resolvent and operator construction                                      */

using Resolvent = HSeries<LaurentForm>;

inline void require_quantizable(const Curve &c)
{
        if (c.deformed())
                throw Error("unsupported-case", "quantum curves are built for undeformed curves only");
        if (c.s() < 1 || c.s() > c.r() - 1)
                throw Error("unsupported-case", "quantum curves need 1 <= s <= r-1 (got s = " + std::to_string(c.s()) + ")");
}

/// F = hbar d/dx log psi through hbar^N, as functions of z.
inline Resolvent resolvent(const Curve &curve, const CorrelatorTable &table, int N)
{
        require_quantizable(curve);
        if (table.chi_max < N - 1)
                throw Error("incomplete-table", "the resolvent to hbar^" + std::to_string(N) + " needs chi = " +
                                                        std::to_string(N - 1));
        const int r = curve.r(), s = curve.s();
        const CycContext *ctx = curve.ctx();
        // 1/(dx/dz) = z^(1-r)/r
        auto per_dx = [&](const LaurentForm &f) { return f.with_formdeg(0).shifted(1 - r).scaled(CycNum(Rat(1, r))); };
        Resolvent F(N);
        F.add(0, LaurentForm::monomial(ctx, s - r, CycNum(Rat(1)), 0));
        if (N >= 1)
                F.add(1, per_dx(curve.omega12() + b_subtracted_limit(ctx, r)));
        for (auto &[gn, T] : table.F) {
                const auto [g2, n] = gn;
                const int m = g2 + n - 1; // hbar^(2g + #spectators)
                if (m > N || m < 1 || g2 - 2 + n <= 0)
                        continue;
                Int nf = 1;
                for (int q = 2; q <= n - 1; ++q)
                        nf *= q;
                LaurentForm acc(ctx, 0);
                for (auto &[sorted, v] : T) {
                        Key k = sorted;
                        do {
                                LaurentForm term = LaurentForm::monomial(ctx, -k[0] - 1, CycNum(v / Rat(nf)), 1);
                                for (size_t j = 1; j < k.size(); ++j)
                                        term = term * integrate_xi_from_infinity(ctx, k[j]);
                                acc += term;
                        } while (std::next_permutation(k.begin(), k.end()));
                }
                if (!acc.is_zero())
                        F.add(m, per_dx(acc));
        }
        return F;
}

/// floor(alpha_i) with alpha_i = i(r-s)/r.
inline long alpha_floor(int r, int s, int i) { return floor_div(static_cast<long>(i) * (r - s), r); }

/// D_1 ... D_m with D_i = hbar x^(floor alpha_i - floor alpha_{i-1}) d/dx.
inline DiffOp d_chain(int r, int s, int m)
{
        DiffOp out = DiffOp::constant(Rat(1));
        for (int i = 1; i <= m; ++i)
                out = out * DiffOp::x_power(Rat(alpha_floor(r, s, i) - alpha_floor(r, s, i - 1))) * DiffOp::D();
        return out;
}

/// The shifted quantum-curve operator, shifts truncated at hbar^N.
inline DiffOp build_quantum_operator(const Curve &curve, int N)
{
        require_quantizable(curve);
        const int r = curve.r(), s = curve.s();
        DiffOp op = d_chain(r, s, r) - DiffOp::constant(Rat(1));
        for (auto &[il, S] : curve.spec().shifts) {
                auto [i, l] = il;
                if (S == 0 || l > N)
                        continue;
                DiffOp t = d_chain(r, s, r - i) * DiffOp::x_power(Rat(r - s - alpha_floor(r, s, r - i) - i));
                op = op + t.scaled(i % 2 ? -S : S, l);
        }
        return op;
}

/// Closed forms: s = 1 gives hbar^r (d/dx x)^(r-1) d/dx - 1; s = r-1 with only S_{1,1} = m
/// gives hbar^r d^(r-m-1) x d^(m+1) - 1.
inline DiffOp closed_form_s1(int r)
{
        std::vector<int> blocks(r, 1);
        return DiffOp::word(blocks).scaled(Rat(1), r) - DiffOp::constant(Rat(1));
}
inline DiffOp closed_form_s_r_minus_1(int r, int m)
{
        if (m < -1 || m > r - 1)
                throw Error("invalid-parameter", "closed form needs -1 <= m <= r-1");
        return DiffOp::word({r - m - 1, m + 1}).scaled(Rat(1), r) - DiffOp::constant(Rat(1));
}

/* ---------------------------------------------------------------------- */
/* Verification                                                             */

struct QCResult {
        static constexpr int NEG_INF = INT_MIN; ///< the hbar^0 coefficient already fails
        int order = NEG_INF;                    ///< largest N' <= N with Q = 0 mod hbar^(N'+1)
        int requested = 0;
        std::string witness;                    ///< first nonvanishing coefficient, if any
        bool pass() const { return order == requested; }
        std::string order_str() const { return order == NEG_INF ? "-inf" : std::to_string(order); }
};

/// Q = psi^-1 op psi through hbar^N; returns the vanishing order.
inline QCResult verify_quantum_curve(const Curve &curve, const DiffOp &op, const Resolvent &F, int N)
{
        const int r = curve.r();
        const CycContext *ctx = curve.ctx();
        using HL = std::map<int, LaurentForm>;
        auto mul = [&](const HL &a, const HL &b) {
                HL o;
                for (auto &[ea, va] : a)
                        for (auto &[eb, vb] : b)
                                if (ea + eb <= N) {
                                        auto it = o.find(ea + eb);
                                        if (it == o.end())
                                                o.emplace(ea + eb, va * vb);
                                        else
                                                it->second += va * vb;
                                }
                return o;
        };
        HL Fm(F.c.begin(), F.c.end());
        std::vector<HL> P{{{0, LaurentForm::monomial(ctx, 0, CycNum(Rat(1)), 0)}}};
        const int B = op.order();
        for (int b = 0; b < B; ++b) {
                // hbar d/dx P_b + P_b F, d/dx = z^(1-r)/r d/dz
                HL nxt = mul(P[b], Fm);
                for (auto &[e, v] : P[b])
                        if (e + 1 <= N) {
                                LaurentForm dv = v.derivative().shifted(1 - r).scaled(CycNum(Rat(1, r)));
                                auto it = nxt.find(e + 1);
                                if (it == nxt.end())
                                        nxt.emplace(e + 1, dv);
                                else
                                        it->second += dv;
                        }
                P.push_back(std::move(nxt));
        }
        HL Q;
        for (auto &[t, c] : op.terms) {
                const Rat ar = t.first * Rat(r);
                if (ar.get_den() != 1)
                        throw Error("invalid-parameter", "x-power " + rat_str(t.first) + " is not in (1/r)Z");
                const int zexp = static_cast<int>(ar.get_num().get_si());
                for (auto &[h, v] : c)
                        for (auto &[e, pv] : P[t.second])
                                if (h + e <= N && h + e >= 0) {
                                        LaurentForm term = pv.shifted(zexp).scaled(CycNum(v));
                                        auto it = Q.find(h + e);
                                        if (it == Q.end())
                                                Q.emplace(h + e, term);
                                        else
                                                it->second += term;
                                }
        }
        QCResult res;
        res.requested = N;
        for (int k = 0; k <= N; ++k) {
                auto it = Q.find(k);
                if (it != Q.end() && !it->second.is_zero()) {
                        res.order = k == 0 ? QCResult::NEG_INF : k - 1;
                        const int m = it->second.valuation();
                        res.witness = "hbar^" + std::to_string(k) + " z^" + std::to_string(m) + " coefficient " +
                                      it->second.coeff(m).str();
                        return res;
                }
        }
        res.order = N;
        return res;
}

} // namespace shtr
