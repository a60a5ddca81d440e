/* -*- C++ -*- */
#pragma once

/*
 * Spectral-curve data for the (r,s) family: x = z^r, omega_{0,1} = sum F01[k] z^(k-1) dz
 * (undeformed: r z^(s-1) dz), omega_{1/2,1} with shift charges, omega_{0,2} with a
 * holomorphic deformation, and the xi-basis.  Validation enforces admissibility
 * (r = +-1 mod s) and s-consistency of the shifts.
 */

#include "series.hpp"

#include <map>
#include <utility>

namespace shtr {

struct CurveSpec {
        int r = 2;
        int s = 3;
        std::map<int, Rat> f01;                 ///< k -> F01[k]; empty means undeformed {s: r}
        std::map<int, Rat> f12;                 ///< k -> coefficient of z^(k-1) dz
        std::map<std::pair<int, int>, Rat> f02; ///< (k,l) -> holomorphic part of omega_{0,2}
        std::map<std::pair<int, int>, Rat> shifts; ///< (i, l) -> S_{i,l}
        int max_index = 24;

        Rat shift(int i, int l) const
        {
                auto it = shifts.find({i, l});
                return it == shifts.end() ? Rat(0) : it->second;
        }

        bool deformed() const
        {
                if (!f12.empty() || !f02.empty())
                        return true;
                for (auto &[k, v] : f01)
                        if (!(k == s && v == r) && v != 0)
                                return true;
                return false;
        }
};

/// Conjugacy class of the curve with respect to the admissibility rule.
inline bool admissible(int r, int s)
{
        if (r < 2 || s < 1 || s > r + 1)
                return false;
        long m = mod_floor(r, s);
        return s == 1 || m == 1 || m == s - 1;
}

/// Validated, immutable curve.  Holds the cyclotomic context and the unstable correlators.
class Curve {
public:
        explicit Curve(CurveSpec spec) : Curve(std::move(spec), false) {}

#ifdef SHTR_TEST_HOOKS
        /// Test-only: accept shifts that violate s-consistency (so that violating the consistency condition can be observed).
        static Curve without_shift_check(CurveSpec spec) { return Curve(std::move(spec), true); }
#endif

private:
        Curve(CurveSpec spec, bool bypass_shift_check) : spec_(std::move(spec))
        {
                validate_admissible();
                if (!bypass_shift_check)
                        validate_shifts();
                validate_deformations();
                ctx_ = &cyclotomic_context(spec_.r);
                if (spec_.f01.empty())
                        spec_.f01[spec_.s] = spec_.r;
                for (auto it = spec_.f01.begin(); it != spec_.f01.end();)
                        it = it->second == 0 ? spec_.f01.erase(it) : std::next(it);
        }

public:
        const CurveSpec &spec() const { return spec_; }
        int r() const { return spec_.r; }
        int s() const { return spec_.s; }
        const CycContext &context() const { return *ctx_; }
        const CycContext *ctx() const { return ctx_; }
        bool deformed() const { return spec_.deformed(); }
        Rat shift(int i, int l) const { return spec_.shift(i, l); }
        bool has_shifts() const
        {
                for (auto &[k, v] : spec_.shifts)
                        if (v != 0)
                                return true;
                return false;
        }
        int max_shift_order() const
        {
                int m = 0;
                for (auto &[k, v] : spec_.shifts)
                        if (v != 0)
                                m = std::max(m, k.second);
                return m;
        }

        /// omega_{0,1}(theta^a z) as a one-form.
        LaurentForm omega01(long a = 0) const
        {
                LaurentForm f(ctx_, 1);
                for (auto &[k, v] : spec_.f01)
                        f.add_to(k - 1, CycNum(*ctx_, v));
                return a ? f.sheet_substitute(a) : f;
        }

        /// omega_{1/2,1}(theta^a z): deformation plus shift charges.
        LaurentForm omega12(long a = 0) const
        {
                LaurentForm f(ctx_, 1);
                for (auto &[k, v] : spec_.f12)
                        f.add_to(k - 1, CycNum(*ctx_, v));
                for (int i = 1; i <= spec_.r; ++i) {
                        Rat S = shift(i, 1);
                        if (S != 0)
                                f.add_to(-spec_.s * (i - 1) - 1, CycNum(*ctx_, (i % 2 ? S : -S)));
                }
                return a ? f.sheet_substitute(a) : f;
        }

        /// omega_{0,2}(theta^a z, theta^b z) for a != b mod r, as a two-form in z (dz^2).
        LaurentForm omega02_sheets(long a, long b) const
        {
                const auto &C = *ctx_;
                CycNum ta = CycNum::theta(C, a), tb = CycNum::theta(C, b);
                CycNum d = ta - tb;
                LaurentForm f = LaurentForm::monomial(ctx_, -2, CycNum::theta(C, a + b) / (d * d), 2);
                for (auto &[kl, v] : spec_.f02) {
                        auto [k, l] = kl;
                        f.add_to(k + l - 2, CycNum::theta(C, a * k + b * l).scaled(v));
                }
                return f;
        }

        /// Coefficient of xi_{-k}(spectator) in omega_{0,2}(theta^a z, spectator): k theta^(ak) z^(k-1) dz.
        LaurentForm omega02_slot(long a, int k) const
        {
                return LaurentForm::monomial(ctx_, k - 1, CycNum::theta(*ctx_, a * k).scaled(Rat(k)), 1);
        }

        /// xi_{-k}(z) = z^(-k-1) dz + (1/k) sum_l F02[k,l] z^(l-1) dz.
        LaurentForm xi_minus(int k, long a = 0) const
        {
                if (k < 1)
                        throw Error("invalid-parameter", "xi_{-k} needs k >= 1");
                LaurentForm f = LaurentForm::monomial(ctx_, -k - 1, CycNum(*ctx_, 1), 1);
                for (auto &[kl, v] : spec_.f02)
                        if (kl.first == k)
                                f.add_to(kl.second - 1, CycNum(*ctx_, v / Rat(k)));
                return a ? f.sheet_substitute(a) : f;
        }

        /// Holomorphic tail of xi_{-k}: l -> F02[k,l] / k.
        std::map<int, Rat> xi_tail(int k) const
        {
                std::map<int, Rat> t;
                for (auto &[kl, v] : spec_.f02)
                        if (kl.first == k)
                                t[kl.second] = v / Rat(k);
                return t;
        }

        /// xi_k(z) = z^(k-1) dz.
        LaurentForm xi_plus(int k) const { return LaurentForm::monomial(ctx_, k - 1, CycNum(*ctx_, 1), 1); }

        /// prod_{a in sheets} (omega01(theta^a z) - omega01(z)), a form of degree |sheets|.
        LaurentForm kernel_denominator(const std::vector<int> &sheets) const
        {
                if (sheets.empty())
                        throw Error("invalid-parameter", "recursion kernel needs a non-empty sheet set");
                LaurentForm w0 = omega01();
                LaurentForm d = LaurentForm::monomial(ctx_, 0, CycNum(*ctx_, 1), 0);
                for (int a : sheets)
                        d = d * (omega01(a) - w0);
                return d;
        }

        /// Inverse of the kernel denominator, exact for undeformed curves, else known below `prec`.
        LaurentForm kernel_inverse(const std::vector<int> &sheets, int prec) const
        {
                LaurentForm d = kernel_denominator(sheets);
                return d.inverse(prec + d.valuation());
        }

        /// Partition lambda of r with 1 - lambda(i) = -floor(s(i-1)/r).
        std::vector<int> lambda() const { return lambda_partition(spec_.r, spec_.s); }

        static std::vector<int> lambda_partition(int r, int s)
        {
                if (!admissible(r, s))
                        throw Error("inadmissible-(r,s)", "r = " + std::to_string(r) + ", s = " + std::to_string(s));
                if (s == 1)
                        return {r};
                if (s == r + 1)
                        return std::vector<int>(r, 1);
                int rp = r / s, rpp = r % s;
                std::vector<int> lam;
                for (int j = 0; j < rpp; ++j)
                        lam.push_back(rp + 1);
                for (int j = rpp; j < s; ++j)
                        lam.push_back(rp);
                return lam;
        }

        /// lambda(j) = min { p : lambda_1 + ... + lambda_p >= j }.
        static int lambda_of(const std::vector<int> &lam, int j)
        {
                int acc = 0;
                for (size_t p = 0; p < lam.size(); ++p)
                        if ((acc += lam[p]) >= j)
                                return static_cast<int>(p) + 1;
                throw Error("invalid-parameter", "lambda(j) with j beyond the partition size");
        }

private:
        CurveSpec spec_;
        const CycContext *ctx_ = nullptr;

        void validate_admissible() const
        {
                const int r = spec_.r, s = spec_.s;
                if (r < 2 || s < 1 || s > r + 1)
                        throw Error("inadmissible-(r,s)", "need r >= 2 and 1 <= s <= r+1, got r = " + std::to_string(r) +
                                                                  ", s = " + std::to_string(s));
                if (!admissible(r, s))
                        throw Error("inadmissible-(r,s)", std::to_string(r) + " mod " + std::to_string(s) + " = " +
                                                                  std::to_string(r % s) + " is not +-1");
        }

        void validate_shifts() const
        {
                const int r = spec_.r, s = spec_.s;
                for (auto &[il, v] : spec_.shifts) {
                        auto [i, l] = il;
                        if (i < 1 || i > r || l < 1)
                                throw Error("inconsistent-shifts", "shift index (" + std::to_string(i) + "," +
                                                                           std::to_string(l) + ") out of range");
                        if (v == 0 || s == 1)
                                continue;
                        bool plus = mod_floor(r, s) == 1;
                        if (plus && i >= 2)
                                throw Error("inconsistent-shifts",
                                            "S_{" + std::to_string(i) + "," + std::to_string(l) +
                                                    "} != 0 but r = 1 mod s with s >= 2 allows only S_{1,l}");
                        if (!plus && s >= 3)
                                throw Error("inconsistent-shifts",
                                            "S_{" + std::to_string(i) + "," + std::to_string(l) +
                                                    "} != 0 but r = -1 mod s with s >= 3 allows no shifts");
                }
        }

        void validate_deformations() const
        {
                const int r = spec_.r, s = spec_.s, M = spec_.max_index;
                auto bound = [&](int k, const char *what) {
                        if (k > M)
                                throw Error("invalid-parameter", std::string(what) + " index " + std::to_string(k) +
                                                                         " exceeds the configured maximum " + std::to_string(M));
                };
                if (!spec_.f01.empty()) {
                        auto it = spec_.f01.find(s);
                        if (it == spec_.f01.end() || it->second == 0)
                                throw Error("invalid-parameter", "F01[s] must be non-zero");
                        for (auto &[k, v] : spec_.f01) {
                                if (k < std::min(s, r) && v != 0)
                                        throw Error("invalid-parameter", "F01[k] needs k >= min(s, r)");
                                bound(k, "F01");
                        }
                }
                for (auto &[k, v] : spec_.f12) {
                        if (k < 1)
                                throw Error("invalid-parameter", "F12[k] needs k >= 1");
                        bound(k, "F12");
                }
                for (auto &[kl, v] : spec_.f02) {
                        if (kl.first < 1 || kl.second < 1)
                                throw Error("invalid-parameter", "F02[k,l] needs k, l >= 1");
                        bound(std::max(kl.first, kl.second), "F02");
                        auto it = spec_.f02.find({kl.second, kl.first});
                        if (it == spec_.f02.end() || it->second != v)
                                throw Error("invalid-parameter", "F02 is not symmetric at (" + std::to_string(kl.first) +
                                                                         "," + std::to_string(kl.second) + ")");
                }
        }
};

} // namespace shtr
