/* -*- C++ -*- */
#pragma once

/*
 * Exact arithmetic: arbitrary-precision rationals and the cyclotomic field
 * Q(zeta_r) = Q[t] / Phi_r(t).
 *
 * A CycNum is a residue class of polynomials of degree < phi(r), kept in
 * canonical (fully reduced) form after every operation, so equality is a
 * coefficient-wise comparison.  A CycNum without a context is a plain
 * rational; it mixes freely with elements of any field Q(zeta_r).
 */

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace shtr {

using Rat = mpq_class;
using Int = mpz_class;

/// Error categories shared by every module.
struct Error : std::runtime_error {
        std::string kind;
        Error(std::string k, const std::string &msg) : std::runtime_error(k + ": " + msg), kind(std::move(k)) {}
};

inline Rat parse_rat(const std::string &s)
{
        Rat q;
        if (q.set_str(s, 10) != 0)
                throw Error("parse-error", "not a rational: '" + s + "'");
        q.canonicalize();
        return q;
}

/// The canonical fraction a/b (mpq_class(a, b) alone leaves common factors in place).
inline Rat frac(const Int &a, const Int &b)
{
        if (b == 0)
                throw Error("invalid-parameter", "zero denominator");
        Rat q(a, b);
        q.canonicalize();
        return q;
}

/// "p/q", with q omitted when it equals 1.
inline std::string rat_str(const Rat &q) { return q.get_str(); }

inline Rat rat_pow(const Rat &q, long e)
{
        Rat base = q, acc = 1;
        if (e < 0) {
                if (base == 0)
                        throw Error("division-by-zero", "0 to a negative power");
                base = 1 / base;
                e = -e;
        }
        for (; e > 0; e >>= 1, base *= base)
                if (e & 1)
                        acc *= base;
        return acc;
}

inline long mod_floor(long a, long m) { long q = a % m; return q < 0 ? q + m : q; }
inline long floor_div(long a, long b) { long q = a / b; if ((a % b != 0) && ((a < 0) != (b < 0))) --q; return q; }

/* ---------------------------------------------------------------------- */
/* Dense polynomials over Q (coefficient i is the coefficient of t^i).    */

namespace poly {

using Poly = std::vector<Rat>;

inline void trim(Poly &p) { while (!p.empty() && p.back() == 0) p.pop_back(); }

inline Poly mul(const Poly &a, const Poly &b)
{
        if (a.empty() || b.empty())
                return {};
        Poly c(a.size() + b.size() - 1);
        for (size_t i = 0; i < a.size(); ++i)
                if (a[i] != 0)
                        for (size_t j = 0; j < b.size(); ++j)
                                c[i + j] += a[i] * b[j];
        trim(c);
        return c;
}

inline Poly sub(Poly a, const Poly &b)
{
        if (a.size() < b.size())
                a.resize(b.size());
        for (size_t i = 0; i < b.size(); ++i)
                a[i] -= b[i];
        trim(a);
        return a;
}

/// Quotient and remainder of a / b (b nonzero).
inline std::pair<Poly, Poly> divmod(Poly a, const Poly &b)
{
        trim(a);
        if (b.empty())
                throw Error("division-by-zero", "polynomial division by zero");
        if (a.size() < b.size())
                return {{}, a};
        Poly q(a.size() - b.size() + 1);
        for (size_t k = q.size(); k-- > 0;) {
                Rat c = a[k + b.size() - 1] / b.back();
                q[k] = c;
                if (c != 0)
                        for (size_t j = 0; j < b.size(); ++j)
                                a[k + j] -= c * b[j];
        }
        trim(a);
        trim(q);
        return {q, a};
}

} // namespace poly

/* ---------------------------------------------------------------------- */

/// The field Q(zeta_r) realised as Q[t]/Phi_r.  Read-only after construction.
struct CycContext {
        int r = 1;
        int deg = 1;                          ///< Euler phi(r)
        poly::Poly phi;                       ///< monic, length deg + 1
        std::vector<std::vector<Int>> reduce; ///< t^(deg + j) mod Phi_r, j = 0 .. deg - 2
        std::vector<std::vector<Int>> theta;  ///< t^j mod Phi_r, j = 0 .. r - 1
};

namespace detail {

inline std::unique_ptr<CycContext> build_context(int r)
{
        if (r < 1)
                throw Error("invalid-parameter", "cyclotomic order must be positive");
        // Phi_r = (t^r - 1) / prod_{d | r, d < r} Phi_d, by exact division.
        std::map<int, poly::Poly> phis;
        for (int d = 1; d <= r; ++d) {
                if (r % d != 0)
                        continue;
                poly::Poly p(d + 1);
                p[0] = -1;
                p[d] = 1;
                for (auto &[e, q] : phis)
                        if (d % e == 0) {
                                auto [quo, rem] = poly::divmod(p, q);
                                if (!rem.empty())
                                        throw Error("internal", "cyclotomic division not exact");
                                p = quo;
                        }
                phis[d] = p;
        }
        auto ctx = std::make_unique<CycContext>();
        ctx->r = r;
        ctx->phi = phis[r];
        ctx->deg = static_cast<int>(ctx->phi.size()) - 1;
        const int n = ctx->deg;
        // powers t^k mod Phi for k up to max(2n - 2, r - 1)
        const int kmax = std::max(2 * n - 2, r - 1);
        std::vector<std::vector<Int>> pw(kmax + 1, std::vector<Int>(n));
        for (int k = 0; k <= kmax; ++k) {
                if (k < n) {
                        pw[k][k] = 1;
                        continue;
                }
                // t^k = t * t^(k-1); t^n = -sum_{i<n} phi_i t^i
                const auto &prev = pw[k - 1];
                Int top = prev[n - 1];
                for (int i = n - 1; i > 0; --i)
                        pw[k][i] = prev[i - 1];
                pw[k][0] = 0;
                for (int i = 0; i < n; ++i)
                        pw[k][i] -= top * Int(ctx->phi[i].get_num());
        }
        for (int j = 0; j + n <= 2 * n - 2; ++j)
                ctx->reduce.push_back(pw[n + j]);
        for (int j = 0; j < r; ++j)
                ctx->theta.push_back(pw[j]);
        return ctx;
}

} // namespace detail

/// Shared, immutable context for Q(zeta_r).
inline const CycContext &cyclotomic_context(int r)
{
        static std::mutex mu;
        static std::map<int, std::unique_ptr<CycContext>> cache;
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(r);
        if (it == cache.end())
                it = cache.emplace(r, detail::build_context(r)).first;
        return *it->second;
}

/// Element of Q(zeta_r).  Without a context it is a plain rational number.
class CycNum {
public:
        CycNum() = default;
        CycNum(const Rat &q) : c_{q} { norm(); }
        CycNum(long q) : CycNum(Rat(q)) {}
        CycNum(const CycContext &ctx, const Rat &q) : ctx_(&ctx), c_(ctx.deg) { c_[0] = q; norm(); }

        /// zeta_r^k.
        static CycNum theta(const CycContext &ctx, long k)
        {
                CycNum x;
                x.ctx_ = &ctx;
                const auto &p = ctx.theta[mod_floor(k, ctx.r)];
                x.c_.resize(ctx.deg);
                for (int i = 0; i < ctx.deg; ++i)
                        x.c_[i] = p[i];
                x.norm();
                return x;
        }

        /// Build from explicit coefficients of 1, t, ..., t^(deg-1).
        static CycNum from_coeffs(const CycContext &ctx, std::vector<Rat> cs)
        {
                if (static_cast<int>(cs.size()) > ctx.deg)
                        throw Error("invalid-parameter", "too many cyclotomic coefficients");
                CycNum x;
                x.ctx_ = &ctx;
                x.c_ = std::move(cs);
                x.norm();
                return x;
        }

        const CycContext *context() const { return ctx_; }
        bool is_zero() const { return c_.empty(); }
        /// Coefficient of t^i (i < deg).
        Rat coeff(int i) const { return i < static_cast<int>(c_.size()) ? c_[i] : Rat(0); }
        const std::vector<Rat> &coeffs() const { return c_; }

        bool is_rational() const { return c_.size() <= 1; }

        /// The rational value, or an error if a non-constant coefficient survives.
        Rat rational() const
        {
                if (!is_rational())
                        throw Error("not-rational", "cyclotomic number " + str() + " is not rational");
                return c_.empty() ? Rat(0) : c_[0];
        }

        CycNum &operator+=(const CycNum &o)
        {
                adopt(o);
                if (c_.size() < o.c_.size())
                        c_.resize(o.c_.size());
                for (size_t i = 0; i < o.c_.size(); ++i)
                        c_[i] += o.c_[i];
                norm();
                return *this;
        }
        CycNum &operator-=(const CycNum &o)
        {
                adopt(o);
                if (c_.size() < o.c_.size())
                        c_.resize(o.c_.size());
                for (size_t i = 0; i < o.c_.size(); ++i)
                        c_[i] -= o.c_[i];
                norm();
                return *this;
        }
        CycNum operator-() const
        {
                CycNum x = *this;
                for (auto &q : x.c_)
                        q = -q;
                return x;
        }
        CycNum &operator*=(const CycNum &o) { *this = mul(*this, o); return *this; }

        friend CycNum operator+(CycNum a, const CycNum &b) { a += b; return a; }
        friend CycNum operator-(CycNum a, const CycNum &b) { a -= b; return a; }
        friend CycNum operator*(const CycNum &a, const CycNum &b) { return mul(a, b); }
        friend CycNum operator/(const CycNum &a, const CycNum &b) { return mul(a, b.inv()); }
        friend bool operator==(const CycNum &a, const CycNum &b)
        {
                if (a.ctx_ && b.ctx_ && a.ctx_ != b.ctx_)
                        throw Error("context-mismatch", "comparing numbers from different cyclotomic fields");
                return a.c_ == b.c_;
        }
        friend bool operator!=(const CycNum &a, const CycNum &b) { return !(a == b); }

        CycNum scaled(const Rat &q) const
        {
                if (q == 0)
                        return CycNum(ctx_ ? CycNum(*ctx_, 0) : CycNum());
                CycNum x = *this;
                for (auto &v : x.c_)
                        v *= q;
                return x;
        }

        /// Multiplicative inverse via the extended Euclidean algorithm over Q[t].
        CycNum inv() const
        {
                if (is_zero())
                        throw Error("division-by-zero", "inverse of zero in Q(zeta_r)");
                if (is_rational()) {
                        CycNum x = *this;
                        x.c_[0] = 1 / x.c_[0];
                        return x;
                }
                // s*a + u*phi = g with g constant
                poly::Poly a = c_, b = ctx_->phi;
                poly::Poly s0{Rat(1)}, s1{};
                while (!b.empty()) {
                        auto [q, rem] = poly::divmod(a, b);
                        poly::Poly s2 = poly::sub(s0, poly::mul(q, s1));
                        a = b;
                        b = rem;
                        s0 = s1;
                        s1 = s2;
                }
                if (a.size() != 1)
                        throw Error("internal", "cyclotomic polynomial not irreducible?");
                Rat g = a[0];
                CycNum x;
                x.ctx_ = ctx_;
                x.c_ = s0;
                for (auto &v : x.c_)
                        v /= g;
                x.reduce_full();
                return x;
        }

        CycNum pow(long e) const
        {
                CycNum base = e < 0 ? inv() : *this, acc = one_like();
                unsigned long n = e < 0 ? -static_cast<unsigned long>(e) : static_cast<unsigned long>(e);
                for (; n; n >>= 1, base = base * base)
                        if (n & 1)
                                acc = acc * base;
                return acc;
        }

        CycNum one_like() const { return ctx_ ? CycNum(*ctx_, 1) : CycNum(1); }

        std::string str() const
        {
                if (c_.empty())
                        return "0";
                std::ostringstream os;
                bool first = true;
                for (size_t i = 0; i < c_.size(); ++i) {
                        if (c_[i] == 0)
                                continue;
                        if (!first)
                                os << " + ";
                        first = false;
                        os << "(" << c_[i].get_str() << ")";
                        if (i > 0)
                                os << "*t^" << i;
                }
                return os.str();
        }

        friend std::ostream &operator<<(std::ostream &os, const CycNum &x) { return os << x.str(); }

private:
        const CycContext *ctx_ = nullptr;
        std::vector<Rat> c_; // trailing zeros stripped

        void norm() { while (!c_.empty() && c_.back() == 0) c_.pop_back(); }

        void adopt(const CycNum &o)
        {
                if (!o.ctx_)
                        return;
                if (!ctx_)
                        ctx_ = o.ctx_;
                else if (ctx_ != o.ctx_)
                        throw Error("context-mismatch", "mixing numbers from different cyclotomic fields");
        }

        /// Reduce an arbitrary-length coefficient vector modulo Phi_r.
        void reduce_full()
        {
                const int n = ctx_->deg;
                if (static_cast<int>(c_.size()) > 2 * n - 1) {
                        auto [q, rem] = poly::divmod(c_, ctx_->phi);
                        c_ = rem;
                } else if (static_cast<int>(c_.size()) > n) {
                        for (int k = static_cast<int>(c_.size()) - 1; k >= n; --k) {
                                if (c_[k] != 0) {
                                        const auto &red = ctx_->reduce[k - n];
                                        for (int i = 0; i < n; ++i)
                                                if (red[i] != 0)
                                                        c_[i] += c_[k] * Rat(red[i]);
                                }
                        }
                        c_.resize(n);
                }
                norm();
        }

        static CycNum mul(const CycNum &a, const CycNum &b)
        {
                CycNum x;
                if (a.ctx_ && b.ctx_ && a.ctx_ != b.ctx_)
                        throw Error("context-mismatch", "mixing numbers from different cyclotomic fields");
                x.ctx_ = a.ctx_ ? a.ctx_ : b.ctx_;
                if (a.c_.empty() || b.c_.empty())
                        return x;
                if (a.c_.size() == 1 || b.c_.size() == 1) {
                        const auto &s = a.c_.size() == 1 ? a.c_[0] : b.c_[0];
                        const auto &v = a.c_.size() == 1 ? b.c_ : a.c_;
                        x.c_.resize(v.size());
                        for (size_t i = 0; i < v.size(); ++i)
                                x.c_[i] = s * v[i];
                        x.norm();
                        return x;
                }
                x.c_.assign(a.c_.size() + b.c_.size() - 1, Rat(0));
                for (size_t i = 0; i < a.c_.size(); ++i)
                        if (a.c_[i] != 0)
                                for (size_t j = 0; j < b.c_.size(); ++j)
                                        if (b.c_[j] != 0)
                                                x.c_[i + j] += a.c_[i] * b.c_[j];
                x.reduce_full();
                return x;
        }
};

/// The value of a if it is rational; otherwise signals not-rational.
inline Rat rational_of(const CycNum &a) { return a.rational(); }

} // namespace shtr
