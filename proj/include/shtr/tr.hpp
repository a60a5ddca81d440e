/* -*- C++ -*- */
#pragma once

/*
 * Shifted topological recursion.
 *
 * For 2g-2+(n+1) > 0,
 *   omega_{g,n+1}(z0, z_[n]) = -Res_{z=0} sum_{Z subset f'(z), Z != {}} K^{1+|Z|}(z0; z, Z) W'_{g,1+|Z|,n}(z, Z; z_[n])
 *                              + delta_{n,0} Res_{z=0} K^r(z0; f(z)) sum_i S_{i,2g} (r dz/z)^i (-omega01(z))^{r-i}
 * with K^{1+|Z|} = int_0^z omega02(., z0) / prod_{z' in Z}(omega01(z') - omega01(z)).
 * Since int_0^z omega02(., z0) = sum_{k>=1} z^k xi_{-k}(z0), the coefficient of
 * xi_{-k0}(z0) is minus the coefficient of z^(-k0-1) in the "bracket"
 *   B(z) = sum_Z W'(z, Z) / prod_Z(...) - delta_{n,0} sum_i S_{i,2g} (r/z)^i (-omega01)^{r-i} / prod_{f'(z)}(...).
 *
 * Spectators are handled in the xi-basis: W' is evaluated as the coefficient
 * of prod_j xi_{-k_j}(z_j) for a sorted key tuple k, which is an exact finite
 * Laurent polynomial in z.  Only 1/prod(...) needs truncation, and only for
 * deformed curves.
 */

#include "report.hpp"
#include "table.hpp"

#include <bit>
#include <functional>
#include <set>

namespace shtr {

/// All nondecreasing tuples of length n with entries in [1, kmax].
inline void for_each_sorted_tuple(int n, int kmax, const std::function<void(const Key &)> &fn)
{
        Key k(n, 1);
        if (n == 0) {
                fn(k);
                return;
        }
        if (kmax < 1)
                return;
        for (;;) {
                fn(k);
                int j = n - 1;
                while (j >= 0 && k[j] == kmax)
                        --j;
                if (j < 0)
                        return;
                int v = k[j] + 1;
                for (int t = j; t < n; ++t)
                        k[t] = v;
        }
}

class Recursion {
public:
        explicit Recursion(const Curve &curve) : C_(curve) { table_.curve = curve.spec(); }

        const Curve &curve() const { return C_; }
        const CorrelatorTable &table() const { return table_; }
        CorrelatorTable &mutable_table() { return table_; }

        /// Fill every (2g, n) with 0 < 2g-2+n <= chi_max, by increasing chi then increasing n.
        void run(int chi_max)
        {
                for (int chi = 1; chi <= chi_max; ++chi)
                        for (int n = 1; n <= chi + 2; ++n)
                                if (chi + 2 - n >= 0 && !table_.has(chi + 2 - n, n))
                                        step(chi + 2 - n, n);
                table_.chi_max = std::max(table_.chi_max, chi_max);
        }

        /// Compute omega_{g,n} (n = number of points, n >= 1) from lower data.
        void step(int g2, int n)
        {
                if (g2 - 2 + n <= 0)
                        throw Error("invalid-parameter", "tr_step needs 2g-2+n > 0");
                const int nspec = n - 1;
                const int P = bracket_pole_bound(g2, nspec);
                const int kmax = P - 1;
                std::map<Key, std::map<int, Rat>> raw; // sorted full key -> k0 -> value
                for_each_sorted_tuple(nspec, kmax, [&](const Key &ks) {
                        LaurentForm br = bracket(g2, ks, P);
                        br.for_each([&](int m, const CycNum &c) {
                                if (m > -2)
                                        return;
                                int k0 = -m - 1;
                                Rat v;
                                try {
                                        v = -rational_of(c);
                                } catch (const Error &) {
                                        asymmetries_.push_back(location(g2, n, ks, k0) + " is not rational: " + c.str());
                                        return;
                                }
                                Key full = ks;
                                full.insert(std::upper_bound(full.begin(), full.end(), k0), k0);
                                raw[full][k0] = v;
                        });
                });
                Tensor &T = table_.F[{g2, n}];
                for (auto &[full, byk0] : raw) {
                        // canonical representative: the smallest key in slot 0
                        auto it = byk0.find(full.front());
                        Rat canon = it == byk0.end() ? Rat(0) : it->second;
                        if (canon != 0)
                                T[full] = canon;
                        std::set<int> distinct(full.begin(), full.end());
                        for (int k0 : distinct) {
                                auto jt = byk0.find(k0);
                                Rat v = jt == byk0.end() ? Rat(0) : jt->second;
                                if (v != canon) {
                                        Key rest = full;
                                        rest.erase(std::find(rest.begin(), rest.end(), k0));
                                        asymmetries_.push_back(location(g2, n, rest, k0) + " = " + rat_str(v) +
                                                               " but canonical value is " + rat_str(canon));
                                }
                        }
                }
        }

        /// Coefficient of prod_j xi_{-ks_j}(z_j) in W'_{g,|mask|,n}(theta^a z for a in mask; z_[n]).
        const LaurentForm &wprime(int g2, unsigned mask, const Key &ks)
        {
                auto key = std::make_tuple(g2, mask, ks);
                if (auto it = wmemo_.find(key); it != wmemo_.end())
                        return it->second;
                LaurentForm total(C_.ctx(), std::popcount(mask));
                if (mask == 0) {
                        if (ks.empty() && g2 == 0)
                                total = LaurentForm::monomial(C_.ctx(), 0, CycNum(C_.context(), 1), 0);
                        return wmemo_.emplace(key, total).first->second;
                }
                if (g2 < 0)
                        return wmemo_.emplace(key, total).first->second;
                const int p = std::countr_zero(mask);
                const unsigned rest = mask & ~(1u << p);
                const int n = static_cast<int>(ks.size());
                // subsets A of rest (including empty)
                for (unsigned A = rest;; A = (A - 1) & rest) {
                        const int na = std::popcount(A);
                        std::vector<int> sheets{p};
                        for (int b = 0; b < 32; ++b)
                                if (A >> b & 1u)
                                        sheets.push_back(b);
                        for (unsigned J = 0; J < (1u << n); ++J) {
                                // spectators with equal keys in the same position pattern give equal terms;
                                // enumerate only J that pick the first occurrences within runs of equal keys
                                if (!leading_in_runs(ks, J))
                                        continue;
                                const Rat mult = run_multiplicity(ks, J);
                                Key kj, kr;
                                for (int j = 0; j < n; ++j)
                                        (J >> j & 1u ? kj : kr).push_back(ks[j]);
                                for (int gb = 0; gb <= g2 - 2 * na; ++gb) {
                                        if (gb == 0 && na == 0 && kj.empty())
                                                continue; // omega_{0,1} factors are omitted
                                        const int g2r = g2 - 2 * na - gb;
                                        const LaurentForm &w = wprime(g2r, rest & ~A, kr);
                                        if (w.is_zero())
                                                continue;
                                        const LaurentForm &f = factor(gb, sheets, kj);
                                        if (f.is_zero())
                                                continue;
                                        LaurentForm t = f * w;
                                        total += mult == 1 ? t : t.scaled(CycNum(mult));
                                }
                        }
                        if (A == 0)
                                break;
                }
                return wmemo_.emplace(key, total).first->second;
        }

        /// A single W' block: omega_{gb/2, |sheets|+|kj|} on the given sheets, coefficient of prod xi_{-kj}.
        const LaurentForm &factor(int gb, const std::vector<int> &sheets, const Key &kj)
        {
                auto key = std::make_tuple(gb, sheets, kj);
                if (auto it = fmemo_.find(key); it != fmemo_.end())
                        return it->second;
                const int np = static_cast<int>(sheets.size()), nj = static_cast<int>(kj.size());
                const int N = np + nj;
                LaurentForm f(C_.ctx(), np);
                if (np == 1 && nj == 0 && gb == 1) {
                        f = C_.omega12(sheets[0]);
                } else if (np == 1 && nj == 0 && gb == 0) {
                        throw Error("internal", "omega_{0,1} requested as a W' block");
                } else if (gb == 0 && N == 2 && np == 2) {
                        f = C_.omega02_sheets(sheets[0], sheets[1]);
                } else if (gb == 0 && N == 2 && np == 1) {
                        f = C_.omega02_slot(sheets[0], kj[0]);
                } else if (gb - 2 + N > 0) {
                        const Tensor &T = table_.at(gb, N);
                        for (auto &[e, v] : T) {
                                Key R;
                                if (!multiset_minus(e, kj, R))
                                        continue;
                                do {
                                        LaurentForm prod = LaurentForm::monomial(C_.ctx(), 0, CycNum(C_.context(), v), 0);
                                        for (int j = 0; j < np; ++j)
                                                prod = prod * xi(R[j], sheets[j]);
                                        f += prod;
                                } while (std::next_permutation(R.begin(), R.end()));
                        }
                }
                return fmemo_.emplace(key, f).first->second;
        }

        /// The bracket B(z) whose z^(-k0-1) coefficient is -F[k0; ks]; exact at exponents <= -2.
        LaurentForm bracket(int g2, const Key &ks, int pole_bound)
        {
                const int r = C_.r();
                LaurentForm br(C_.ctx(), 1);
                const int prec = pole_bound - 1; // inverse precision making exponents <= -2 exact
                for (unsigned Z = 1; Z < (1u << (r - 1)); ++Z) {
                        const unsigned mask = 1u | (Z << 1);
                        const LaurentForm &w = wprime(g2, mask, ks);
                        if (w.is_zero())
                                continue;
                        br += (w * kernel_inverse(mask, prec)).truncated(-1);
                }
                if (ks.empty()) {
                        const LaurentForm w0 = C_.omega01();
                        for (int i = 1; i <= r; ++i) {
                                Rat S = C_.shift(i, g2);
                                if (S == 0)
                                        continue;
                                LaurentForm t = LaurentForm::monomial(C_.ctx(), -i, CycNum(C_.context(), S * rat_pow(r, i)), i);
                                t = t * (-w0).pow(r - i);
                                br -= (t * kernel_inverse((1u << r) - 1, prec)).truncated(-1);
                        }
                }
                return br;
        }

        /// Upper bound on the pole order (in z) of the bracket for omega_{g, nspec+1}.
        int bracket_pole_bound(int g2, int nspec)
        {
                const int r = C_.r(), s = C_.s();
                int P = 1;
                for (int z = 1; z <= r - 1; ++z) {
                        int pw = wprime_pole_bound(g2, z + 1, nspec);
                        if (pw != NONE)
                                P = std::max(P, pw + z * (s - 1));
                }
                if (nspec == 0)
                        for (int i = 1; i <= r; ++i)
                                if (C_.shift(i, g2) != 0)
                                        P = std::max(P, s * (i - 1) + 1);
                return P;
        }

        /// Upper bound on the pole order of W'_{g, m points, nspec spectators} (NONE if it vanishes).
        int wprime_pole_bound(int g2, int m, int nspec)
        {
                if (m == 0)
                        return (g2 == 0 && nspec == 0) ? 0 : NONE;
                if (g2 < 0)
                        return NONE;
                auto key = std::make_tuple(g2, m, nspec);
                if (auto it = pmemo_.find(key); it != pmemo_.end())
                        return it->second;
                int best = NONE;
                for (int na = 0; na <= m - 1; ++na)
                        for (int nj = 0; nj <= nspec; ++nj)
                                for (int gb = 0; gb <= g2 - 2 * na; ++gb) {
                                        if (gb == 0 && na == 0 && nj == 0)
                                                continue;
                                        int fb = block_pole_bound(gb, 1 + na, nj);
                                        if (fb == NONE)
                                                continue;
                                        int rb = wprime_pole_bound(g2 - 2 * na - gb, m - 1 - na, nspec - nj);
                                        if (rb == NONE)
                                                continue;
                                        best = std::max(best, fb + rb);
                                }
                pmemo_[key] = best;
                return best;
        }

        /// Asymmetries / non-rational values found while running.
        const std::vector<std::string> &asymmetries() const { return asymmetries_; }

        /* -------------------------------------------------------------- */
        /* Verifiers.                                                      */

        /// E^i_{g,n}(z; ks) = sum_{|Z| = i} sum_{Y subset Z} prod_{Z\Y} omega01 W'_{g,|Y|,n}(Y; ks), an i-form.
        LaurentForm E(int i, int g2, const Key &ks)
        {
                const int r = C_.r();
                LaurentForm tot(C_.ctx(), i);
                if (i == 0)
                        return (g2 == 0 && ks.empty()) ? LaurentForm::monomial(C_.ctx(), 0, CycNum(C_.context(), 1), 0)
                                                       : LaurentForm(C_.ctx(), 0);
                for (unsigned Z = 0; Z < (1u << r); ++Z) {
                        if (std::popcount(Z) != i)
                                continue;
                        for (unsigned Y = Z;; Y = (Y - 1) & Z) {
                                const LaurentForm &w = wprime(g2, Y, ks);
                                if (!w.is_zero()) {
                                        LaurentForm t = w;
                                        for (int a = 0; a < r; ++a)
                                                if ((Z & ~Y) >> a & 1u)
                                                        t = t * C_.omega01(a);
                                        tot += t;
                                }
                                if (Y == 0)
                                        break;
                        }
                }
                return tot;
        }

        /// Shifted loop equations for every (g, n) with -1 <= 2g-2+(n+1) <= chi_max.
        Report verify_loop_equations(int chi_max, bool exact_e1 = true)
        {
                Report rep;
                const int r = C_.r(), s = C_.s();
                for (int chi = -1; chi <= chi_max; ++chi)
                        for (int n = 0; n <= chi + 1; ++n) {
                                const int g2 = chi + 1 - n;
                                if (g2 < 0)
                                        continue;
                                bool ok = true;
                                std::string where, witness;
                                for (int i = 1; i <= r && ok; ++i) {
                                        const int bound = r * (static_cast<int>(floor_div(s * (i - 1), r)) + 1) - i;
                                        const int kmax = loop_spectator_bound(g2, i, n, bound);
                                        const Rat S = n == 0 ? C_.shift(i, g2) : Rat(0);
                                        for_each_sorted_tuple(n, kmax, [&](const Key &ks) {
                                                if (!ok)
                                                        return;
                                                LaurentForm e = E(i, g2, ks);
                                                if (S != 0)
                                                        e -= LaurentForm::monomial(C_.ctx(), -i, CycNum(C_.context(), S * rat_pow(r, i)), i);
                                                if (!e.is_zero() && e.valuation() < bound) {
                                                        ok = false;
                                                        where = "i=" + std::to_string(i) + " " + gn_str(g2, n) + " keys " + key_str(ks);
                                                        witness = "coefficient of z^" + std::to_string(e.valuation()) + " is " +
                                                                  e.coeff(e.valuation()).str() + " (need exponent >= " +
                                                                  std::to_string(bound) + ")";
                                                }
                                                if (ok && exact_e1 && i == 1 && g2 - 2 + n >= 0 && !e.is_zero()) {
                                                        ok = false;
                                                        where = "E1 " + gn_str(g2, n) + " keys " + key_str(ks);
                                                        witness = "E^1 - shift = " + e.str();
                                                }
                                        });
                                }
                                rep.add("loop-equations", ok, ok ? gn_str(g2, n) : where, witness);
                        }
                return rep;
        }

        /// (a) symmetry of every computed tensor; (b) the combinatorial identity for every (g, n) in range.
        Report verify_symmetry_and_identity(int chi_max)
        {
                Report rep;
                if (asymmetries_.empty())
                        rep.add("symmetry", true, "all tensors");
                for (auto &a : asymmetries_)
                        rep.add("symmetry", false, a, "");
                const int r = C_.r();
                const LaurentForm w0 = C_.omega01();
                for (int chi = -1; chi <= chi_max; ++chi)
                        for (int n = 0; n <= chi + 1; ++n) {
                                const int g2 = chi + 1 - n;
                                if (g2 < 0)
                                        continue;
                                bool ok = true;
                                std::string where;
                                const int kmax = loop_spectator_bound(g2, r, n, 0);
                                for_each_sorted_tuple(n, std::min(kmax, table_.max_key() + 1), [&](const Key &ks) {
                                        if (!ok)
                                                return;
                                        LaurentForm lhs(C_.ctx(), r);
                                        for (unsigned Z = 1; Z < (1u << r); Z += 2) {
                                                const LaurentForm &w = wprime(g2, Z, ks);
                                                if (w.is_zero())
                                                        continue;
                                                LaurentForm t = w;
                                                for (int a = 1; a < r; ++a)
                                                        if (!(Z >> a & 1u))
                                                                t = t * (C_.omega01(a) - w0);
                                                lhs += t;
                                        }
                                        LaurentForm rhs(C_.ctx(), r);
                                        for (int i = 0; i <= r; ++i) {
                                                LaurentForm e = E(i, g2, ks);
                                                if (!e.is_zero())
                                                        rhs += e * (-w0).pow(r - i);
                                        }
                                        LaurentForm d = lhs - rhs;
                                        if (!d.is_zero()) {
                                                ok = false;
                                                where = gn_str(g2, n) + " keys " + key_str(ks) + ": difference " + d.str();
                                        }
                                });
                                rep.add("combinatorial-identity", ok, ok ? gn_str(g2, n) : where);
                        }
                return rep;
        }

        /// Drop every table-dependent cache (after editing the table through mutable_table()).
        void invalidate_caches()
        {
                wmemo_.clear();
                fmemo_.clear();
                pmemo_.clear();
        }

        static constexpr int NONE = -1000000;

        static std::string gn_str(int g2, int n) { return "(2g,n)=(" + std::to_string(g2) + "," + std::to_string(n) + ")"; }
        static std::string key_str(const Key &k)
        {
                std::string s = "[";
                for (size_t i = 0; i < k.size(); ++i)
                        s += (i ? "," : "") + std::to_string(k[i]);
                return s + "]";
        }

private:
        Curve C_;
        CorrelatorTable table_;
        std::map<std::tuple<int, unsigned, Key>, LaurentForm> wmemo_;
        std::map<std::tuple<int, std::vector<int>, Key>, LaurentForm> fmemo_;
        std::map<std::tuple<int, int, int>, int> pmemo_;
        std::map<std::pair<unsigned, int>, LaurentForm> kmemo_;
        std::map<std::pair<int, int>, LaurentForm> ximemo_;
        std::vector<std::string> asymmetries_;

        static std::string location(int g2, int n, const Key &ks, int k0)
        {
                return "F" + gn_str(g2, n) + "[" + std::to_string(k0) + ";" + key_str(ks).substr(1);
        }

        const LaurentForm &xi(int k, int a)
        {
                auto key = std::make_pair(k, a);
                if (auto it = ximemo_.find(key); it != ximemo_.end())
                        return it->second;
                return ximemo_.emplace(key, C_.xi_minus(k, a)).first->second;
        }

        /// 1 / prod_{a in mask, a != 0}(omega01(theta^a z) - omega01(z)), precise enough for exponent <= prec - 1 + v.
        const LaurentForm &kernel_inverse(unsigned mask, int prec)
        {
                auto key = std::make_pair(mask, C_.deformed() ? prec : 0);
                if (auto it = kmemo_.find(key); it != kmemo_.end())
                        return it->second;
                std::vector<int> sheets;
                for (int a = 1; a < C_.r(); ++a)
                        if (mask >> a & 1u)
                                sheets.push_back(a);
                LaurentForm d = C_.kernel_denominator(sheets);
                // w has pole at most pole_bound = prec + 1, so w * d^-1 is exact below -1 if d^-1 is known below prec
                LaurentForm inv = d.inverse(prec + d.valuation());
                return kmemo_.emplace(key, inv).first->second;
        }

        /// Pole bound of a single block with np sheets and nj spectators at genus gb/2.
        int block_pole_bound(int gb, int np, int nj)
        {
                const int N = np + nj;
                if (np == 1 && nj == 0 && gb == 1) {
                        LaurentForm w = C_.omega12();
                        return w.is_zero() ? NONE : std::max(0, -w.valuation());
                }
                if (gb == 0 && N == 2)
                        return np == 2 ? 2 : 0;
                if (gb - 2 + N <= 0)
                        return NONE;
                if (!table_.has(gb, N))
                        return NONE; // not yet computed: cannot contribute to anything computed from it
                const Tensor &T = table_.at(gb, N);
                if (T.empty())
                        return NONE;
                return np * (table_.max_key(gb, N) + 1);
        }

        /// Spectator keys beyond this bound cannot spoil the vanishing order `bound` of E^i_{g,n}.
        int loop_spectator_bound(int g2, int i, int n, int bound)
        {
                if (n == 0)
                        return 0;
                int P = std::max(0, wprime_pole_bound(g2, i, n));
                for (int j = 1; j < i; ++j)
                        P = std::max(P, wprime_pole_bound(g2, j, n));
                return std::max(table_.max_key(), bound + 2 + P);
        }

        /// R = e \ sub as multisets (both sorted); false if sub is not contained in e.
        static bool multiset_minus(const Key &e, const Key &sub, Key &R)
        {
                R.clear();
                size_t j = 0;
                for (size_t i = 0; i < e.size(); ++i) {
                        if (j < sub.size() && e[i] == sub[j])
                                ++j;
                        else
                                R.push_back(e[i]);
                }
                return j == sub.size();
        }

        /// J picks, inside every run of equal keys, a prefix of that run.
        static bool leading_in_runs(const Key &ks, unsigned J)
        {
                for (size_t j = 1; j < ks.size(); ++j)
                        if (ks[j] == ks[j - 1] && (J >> j & 1u) && !(J >> (j - 1) & 1u))
                                return false;
                return true;
        }

        /// Number of subsets equivalent to J under permutations within runs: prod binom(run, picked).
        static Rat run_multiplicity(const Key &ks, unsigned J)
        {
                Rat m = 1;
                size_t j = 0;
                while (j < ks.size()) {
                        size_t e = j;
                        int picked = 0;
                        while (e < ks.size() && ks[e] == ks[j])
                                picked += (J >> e++ & 1u);
                        int len = static_cast<int>(e - j);
                        Int b;
                        mpz_bin_uiui(b.get_mpz_t(), len, picked);
                        m *= b;
                        j = e;
                }
                return m;
        }
};

} // namespace shtr
