/* -*- C++ -*- */
#pragma once

/*
 * Brute-force reference evaluator for shifted topological recursion on
 * undeformed (r,s) curves.
 *
 * Every term of the recursion residue is expanded as a raw multivariate
 * Laurent polynomial in (z0, z, z_1..z_n): the kernel as
 * z / (z0 (z0 - z)) = sum_{m>=1} z^m z0^(-m-1), the spectator bidifferentials
 * omega02(theta^a z, z_j) as their power series in z, and stable correlators
 * as explicit sums of monomials.  W' is built by plain recursive enumeration
 * of set partitions with no memoisation and no xi-basis shortcut; coefficients
 * are read off at the end as F[k0, k] = coefficient of z0^(-k0-1) prod z_j^(-k_j-1).
 *
 * It shares only exact arithmetic and the table type with the production
 * engine, and is meant for cross-checking at small chi.
 */

#include "table.hpp"

#include <functional>

namespace shtr::oracle {

/// Multivariate Laurent polynomial: exponent vector -> coefficient.
using MPoly = std::map<std::vector<int>, CycNum>;

inline void add_term(MPoly &p, const std::vector<int> &e, const CycNum &c)
{
        if (c.is_zero())
                return;
        auto it = p.find(e);
        if (it == p.end()) {
                p.emplace(e, c);
                return;
        }
        it->second += c;
        if (it->second.is_zero())
                p.erase(it);
}

inline MPoly mul(const MPoly &a, const MPoly &b)
{
        MPoly out;
        for (auto &[ea, ca] : a)
                for (auto &[eb, cb] : b) {
                        std::vector<int> e(ea.size());
                        for (size_t i = 0; i < e.size(); ++i)
                                e[i] = ea[i] + eb[i];
                        add_term(out, e, ca * cb);
                }
        return out;
}

class BruteForce {
public:
        explicit BruteForce(CurveSpec spec) : spec_(std::move(spec)), ctx_(cyclotomic_context(spec_.r))
        {
                if (spec_.deformed())
                        throw Error("unsupported-case", "the brute-force oracle handles undeformed curves only");
                table_.curve = spec_;
                if (table_.curve.f01.empty())
                        table_.curve.f01[spec_.s] = spec_.r;
        }

        const CorrelatorTable &table() const { return table_; }

        void run(int chi_max)
        {
                for (int chi = 1; chi <= chi_max; ++chi)
                        for (int n = 1; n <= chi + 2; ++n)
                                if (chi + 2 - n >= 0)
                                        step(chi + 2 - n, n);
                table_.chi_max = chi_max;
        }

private:
        CurveSpec spec_;
        const CycContext &ctx_;
        CorrelatorTable table_;
        int nvar_ = 0;    // variables: index 0 = z, 1..nspec = spectators
        int mcut_ = 0;    // truncation of the spectator power series in z

        CycNum th(long k) const { return CycNum::theta(ctx_, k); }

        std::vector<int> zero_exp() const { return std::vector<int>(nvar_, 0); }

        /// omega_{gb, |sheets|+|specs|} with internal points theta^a z and spectator variables.
        MPoly block(int gb, const std::vector<int> &sheets, const std::vector<int> &specs) const
        {
                const int np = static_cast<int>(sheets.size()), nj = static_cast<int>(specs.size());
                const int r = spec_.r, s = spec_.s;
                MPoly out;
                if (np == 1 && nj == 0 && gb == 1) {
                        const int a = sheets[0];
                        for (int i = 1; i <= r; ++i) {
                                Rat S = spec_.shift(i, 1);
                                if (S == 0)
                                        continue;
                                // (-1)^(i-1) S_{i,1} w^(-s(i-1)-1) dw at w = theta^a z
                                auto e = zero_exp();
                                e[0] = -s * (i - 1) - 1;
                                add_term(out, e, th(a * (-s * (i - 1))).scaled(i % 2 ? S : -S));
                        }
                        return out;
                }
                if (gb == 0 && np == 2 && nj == 0) {
                        const int a = sheets[0], b = sheets[1];
                        CycNum d = th(a) - th(b);
                        auto e = zero_exp();
                        e[0] = -2;
                        add_term(out, e, th(a + b) / (d * d));
                        return out;
                }
                if (gb == 0 && np == 1 && nj == 1) {
                        // dw dz_j / (w - z_j)^2 = sum_{m>=0} (m+1) w^m z_j^(-m-2), w = theta^a z
                        const int a = sheets[0];
                        for (int m = 0; m <= mcut_; ++m) {
                                auto e = zero_exp();
                                e[0] = m;
                                e[specs[0]] = -m - 2;
                                add_term(out, e, th(a * (m + 1)).scaled(Rat(m + 1)));
                        }
                        return out;
                }
                if (gb - 2 + np + nj <= 0)
                        return out;
                // stable: sum over ordered key tuples of F prod (theta^a z)^(-k-1) theta^a prod z_j^(-k-1)
                const Tensor &T = table_.at(gb, np + nj);
                for (auto &[sorted, v] : T) {
                        Key k = sorted;
                        do {
                                auto e = zero_exp();
                                long ph = 0;
                                for (int j = 0; j < np; ++j) {
                                        e[0] += -k[j] - 1;
                                        ph += static_cast<long>(sheets[j]) * (-k[j]);
                                }
                                for (int j = 0; j < nj; ++j)
                                        e[specs[j]] += -k[np + j] - 1;
                                add_term(out, e, th(ph).scaled(v));
                        } while (std::next_permutation(k.begin(), k.end()));
                }
                return out;
        }

        /// W'_{g, |sheets|, |specs|} by recursive set-partition enumeration.
        MPoly wprime(int g2, const std::vector<int> &sheets, const std::vector<int> &specs) const
        {
                MPoly out;
                if (sheets.empty()) {
                        if (specs.empty() && g2 == 0)
                                out.emplace(zero_exp(), CycNum(ctx_, 1));
                        return out;
                }
                if (g2 < 0)
                        return out;
                const int p = sheets[0];
                std::vector<int> rest(sheets.begin() + 1, sheets.end());
                const int m = static_cast<int>(rest.size()), n = static_cast<int>(specs.size());
                for (unsigned A = 0; A < (1u << m); ++A) {
                        std::vector<int> blk{p}, others;
                        for (int i = 0; i < m; ++i)
                                (A >> i & 1u ? blk : others).push_back(rest[i]);
                        const int na = static_cast<int>(blk.size()) - 1;
                        for (unsigned J = 0; J < (1u << n); ++J) {
                                std::vector<int> sj, sr;
                                for (int j = 0; j < n; ++j)
                                        (J >> j & 1u ? sj : sr).push_back(specs[j]);
                                for (int gb = 0; gb <= g2 - 2 * na; ++gb) {
                                        if (gb == 0 && na == 0 && sj.empty())
                                                continue;
                                        MPoly w = wprime(g2 - 2 * na - gb, others, sr);
                                        if (w.empty())
                                                continue;
                                        MPoly f = block(gb, blk, sj);
                                        if (f.empty())
                                                continue;
                                        for (auto &[e, c] : mul(f, w))
                                                add_term(out, e, c);
                                }
                        }
                }
                return out;
        }

        void step(int g2, int n)
        {
                const int r = spec_.r, s = spec_.s;
                const int nspec = n - 1;
                nvar_ = 1 + nspec;
                int kmax = std::max(1, table_.max_key());
                const int pole = r * std::max(kmax + 1, s * (r - 1) + 1) + (r - 1) * (s - 1) + 2;
                mcut_ = pole;
                std::vector<int> specs;
                for (int j = 1; j <= nspec; ++j)
                        specs.push_back(j);

                // bracket(z, z_j): exponent vector over (z, z_1..z_n)
                MPoly br;
                for (unsigned Z = 1; Z < (1u << (r - 1)); ++Z) {
                        std::vector<int> sheets{0};
                        for (int a = 1; a < r; ++a)
                                if (Z >> (a - 1) & 1u)
                                        sheets.push_back(a);
                        MPoly w = wprime(g2, sheets, specs);
                        if (w.empty())
                                continue;
                        // prod_{a in Z} (r theta^(as) z^(s-1) - r z^(s-1)) = c z^(|Z|(s-1))
                        CycNum c(ctx_, 1);
                        for (size_t i = 1; i < sheets.size(); ++i)
                                c = c * (th(sheets[i] * s) - CycNum(ctx_, 1)).scaled(Rat(r));
                        const int dz = static_cast<int>(sheets.size() - 1) * (s - 1);
                        CycNum ci = c.inv();
                        for (auto &[e, v] : w) {
                                auto e2 = e;
                                e2[0] -= dz;
                                add_term(br, e2, v * ci);
                        }
                }
                if (nspec == 0) {
                        CycNum c(ctx_, 1);
                        for (int a = 1; a < r; ++a)
                                c = c * (th(a * s) - CycNum(ctx_, 1)).scaled(Rat(r));
                        for (int i = 1; i <= r; ++i) {
                                Rat S = spec_.shift(i, g2);
                                if (S == 0)
                                        continue;
                                // S (r/z)^i (-r z^(s-1))^(r-i) / (c z^((r-1)(s-1)))
                                Rat coef = S * rat_pow(r, i) * rat_pow(-r, r - i);
                                auto e = zero_exp();
                                e[0] = -i + (r - i) * (s - 1) - (r - 1) * (s - 1);
                                add_term(br, e, c.inv().scaled(-coef));
                        }
                }
                // kernel sum_{m>=1} z^m z0^(-m-1): residue in z picks m = -1 - e_z
                Tensor &T = table_.F[{g2, n}];
                std::map<Key, Rat> out;
                for (auto &[e, v] : br) {
                        const int m = -1 - e[0];
                        if (m < 1)
                                continue;
                        Key full{m};
                        for (int j = 1; j <= nspec; ++j)
                                full.push_back(-e[j] - 1);
                        if (*std::min_element(full.begin(), full.end()) < 1)
                                throw Error("internal", "brute-force correlator outside the xi-basis");
                        Key sorted = full;
                        std::sort(sorted.begin(), sorted.end());
                        if (sorted != full)
                                continue; // one ordered representative per orbit
                        out[sorted] = -rational_of(v);
                }
                for (auto &[k, v] : out)
                        if (v != 0)
                                T[k] = v;
        }
};

} // namespace shtr::oracle
