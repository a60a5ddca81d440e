/* -*- C++ -*- */
#pragma once

/*
 * Formal Laurent forms f(z) dz^d in a local coordinate z, with exact
 * truncation tracking, and truncated power series in hbar.
 *
 * A LaurentForm stores finitely many coefficients together with a precision
 * p: every coefficient of an exponent < p is exact, nothing is known about
 * exponents >= p.  Exact (finite) forms have p = EXACT.  Products propagate
 * precision as min(v(a) + p(b), v(b) + p(a)), so a residue taken from a
 * product is guaranteed exact whenever -1 < p.
 */

#include "exact.hpp"

#include <algorithm>
#include <climits>
#include <functional>
#include <map>

namespace shtr {

class LaurentForm {
public:
        static constexpr int EXACT = INT_MAX;

        LaurentForm() = default;
        explicit LaurentForm(const CycContext *ctx, int formdeg = 0) : ctx_(ctx), deg_(formdeg) {}

        /// c z^m dz^formdeg
        static LaurentForm monomial(const CycContext *ctx, int m, const CycNum &c, int formdeg = 0)
        {
                LaurentForm f(ctx, formdeg);
                f.set(m, c);
                return f;
        }

        const CycContext *context() const { return ctx_; }
        int formdeg() const { return deg_; }
        int prec() const { return prec_; }
        bool exact() const { return prec_ == EXACT; }
        bool is_zero() const { return c_.empty(); }

        /// Lowest exponent with a nonzero coefficient (prec() if none is known).
        int valuation() const { return c_.empty() ? prec_ : lo_; }
        /// Highest stored exponent (valuation() - 1 if empty).
        int top() const { return c_.empty() ? valuation() - 1 : lo_ + static_cast<int>(c_.size()) - 1; }

        CycNum coeff(int m) const
        {
                if (m >= prec_)
                        throw Error("insufficient-precision", "coefficient of z^" + std::to_string(m) +
                                                                      " beyond precision " + std::to_string(prec_));
                if (c_.empty() || m < lo_ || m > top())
                        return zero();
                return c_[m - lo_];
        }

        void set(int m, const CycNum &v)
        {
                if (m >= prec_)
                        return;
                if (v.is_zero()) {
                        if (!c_.empty() && m >= lo_ && m <= top()) {
                                c_[m - lo_] = v;
                                trim();
                        }
                        return;
                }
                if (c_.empty()) {
                        lo_ = m;
                        c_.assign(1, v);
                        return;
                }
                if (m < lo_) {
                        c_.insert(c_.begin(), lo_ - m, zero());
                        lo_ = m;
                } else if (m > top()) {
                        c_.resize(m - lo_ + 1, zero());
                }
                c_[m - lo_] = v;
        }

        void add_to(int m, const CycNum &v)
        {
                if (m >= prec_ || v.is_zero())
                        return;
                if (!c_.empty() && m >= lo_ && m <= top()) {
                        c_[m - lo_] += v;
                        if (m == lo_ || m == top())
                                trim();
                        return;
                }
                set(m, v);
        }

        /// Forget everything at exponents >= p.
        LaurentForm truncated(int p) const
        {
                LaurentForm f = *this;
                f.prec_ = std::min(prec_, p);
                if (!f.c_.empty() && f.top() >= f.prec_) {
                        if (f.prec_ <= f.lo_)
                                f.c_.clear();
                        else
                                f.c_.resize(f.prec_ - f.lo_);
                        f.trim();
                }
                return f;
        }

        /// Visit nonzero coefficients in increasing exponent order.
        void for_each(const std::function<void(int, const CycNum &)> &fn) const
        {
                for (size_t i = 0; i < c_.size(); ++i)
                        if (!c_[i].is_zero())
                                fn(lo_ + static_cast<int>(i), c_[i]);
        }

        LaurentForm &operator+=(const LaurentForm &o) { return accumulate(o, false); }
        LaurentForm &operator-=(const LaurentForm &o) { return accumulate(o, true); }
        friend LaurentForm operator+(LaurentForm a, const LaurentForm &b) { a += b; return a; }
        friend LaurentForm operator-(LaurentForm a, const LaurentForm &b) { a -= b; return a; }
        LaurentForm operator-() const { return scaled(CycNum(-1)); }

        friend LaurentForm operator*(const LaurentForm &a, const LaurentForm &b)
        {
                LaurentForm f(a.ctx_ ? a.ctx_ : b.ctx_, a.deg_ + b.deg_);
                long pa = a.prec_ == EXACT ? LONG_MAX / 4 : static_cast<long>(b.valuation()) + a.prec_;
                long pb = b.prec_ == EXACT ? LONG_MAX / 4 : static_cast<long>(a.valuation()) + b.prec_;
                long p = std::min(pa, pb);
                f.prec_ = p >= LONG_MAX / 4 ? EXACT : static_cast<int>(std::clamp<long>(p, INT_MIN / 2, INT_MAX / 2));
                if (a.c_.empty() || b.c_.empty())
                        return f;
                int lo = a.lo_ + b.lo_;
                int hi = a.top() + b.top();
                if (f.prec_ != EXACT)
                        hi = std::min(hi, f.prec_ - 1);
                if (hi < lo)
                        return f;
                std::vector<CycNum> out(hi - lo + 1, f.zero());
                for (size_t i = 0; i < a.c_.size(); ++i) {
                        if (a.c_[i].is_zero())
                                continue;
                        int ei = a.lo_ + static_cast<int>(i);
                        for (size_t j = 0; j < b.c_.size(); ++j) {
                                int e = ei + b.lo_ + static_cast<int>(j);
                                if (e > hi)
                                        break;
                                if (!b.c_[j].is_zero())
                                        out[e - lo] += a.c_[i] * b.c_[j];
                        }
                }
                f.lo_ = lo;
                f.c_ = std::move(out);
                f.trim();
                return f;
        }
        LaurentForm &operator*=(const LaurentForm &o) { *this = *this * o; return *this; }

        LaurentForm scaled(const CycNum &s) const
        {
                LaurentForm f = *this;
                if (s.is_zero()) {
                        f.c_.clear();
                        return f;
                }
                for (auto &v : f.c_)
                        v = v * s;
                f.trim();
                return f;
        }

        /// Multiply by z^k (form degree unchanged).
        LaurentForm shifted(int k) const
        {
                LaurentForm f = *this;
                f.lo_ += k;
                if (f.prec_ != EXACT)
                        f.prec_ += k;
                return f;
        }

        LaurentForm with_formdeg(int d) const { LaurentForm f = *this; f.deg_ = d; return f; }

        LaurentForm pow(int e) const
        {
                if (e < 0)
                        throw Error("invalid-parameter", "use invert() for negative powers");
                LaurentForm acc = monomial(ctx_, 0, one(), 0), base = *this;
                for (; e; e >>= 1, base = base * base)
                        if (e & 1)
                                acc = acc * base;
                return acc;
        }

        /// Substitution z -> theta^a z including the Jacobian theta^(a*formdeg).
        LaurentForm sheet_substitute(long a) const
        {
                if (!ctx_)
                        throw Error("invalid-parameter", "sheet substitution needs a cyclotomic context");
                LaurentForm f = *this;
                for (size_t i = 0; i < f.c_.size(); ++i)
                        if (!f.c_[i].is_zero())
                                f.c_[i] = f.c_[i] * CycNum::theta(*ctx_, a * (f.lo_ + static_cast<long>(i) + deg_));
                return f;
        }

        /// Coefficient of z^-1 dz.
        CycNum residue() const
        {
                if (deg_ != 1)
                        throw Error("degree-mismatch", "residue of a form of degree " + std::to_string(deg_));
                return coeff(-1);
        }

        /// Multiplicative inverse; exact for monomials, otherwise f * g = 1 + O(z^order) relative.
        LaurentForm inverse(int order) const
        {
                if (c_.empty())
                        throw Error("not-invertible", "inverse of a zero series");
                const int v = lo_;
                CycNum c0inv = c_[0].inv();
                LaurentForm g(ctx_, -deg_);
                int rel = order;
                if (prec_ != EXACT)
                        rel = std::min(rel, prec_ - v);
                bool mono = c_.size() == 1 && prec_ == EXACT;
                if (mono) {
                        g.set(-v, c0inv);
                        return g;
                }
                // g = c0^-1 z^-v sum_k b_k z^k with b_0 = 1, b_k = -sum_{j=1..k} a_j b_{k-j} / a_0... (normalised)
                std::vector<CycNum> b(std::max(rel, 0));
                for (int k = 0; k < rel; ++k) {
                        if (k == 0) {
                                b[0] = c0inv;
                                continue;
                        }
                        CycNum acc = zero();
                        for (int j = 1; j <= k && j < static_cast<int>(c_.size()); ++j)
                                if (!c_[j].is_zero())
                                        acc += c_[j] * b[k - j];
                        b[k] = -(acc * c0inv);
                }
                for (int k = 0; k < rel; ++k)
                        g.set(-v + k, b[k]);
                g.prec_ = -v + rel;
                return g;
        }

        /// d/dz of a function (formdeg 0).
        LaurentForm derivative() const
        {
                LaurentForm f(ctx_, deg_);
                for_each([&](int m, const CycNum &c) { if (m != 0) f.set(m - 1, c.scaled(Rat(m))); });
                f.prec_ = prec_ == EXACT ? EXACT : prec_ - 1;
                return f;
        }

        friend bool operator==(const LaurentForm &a, const LaurentForm &b)
        {
                // an exact zero carries no meaningful form degree
                if (a.c_.empty() && b.c_.empty() && a.prec_ == b.prec_)
                        return true;
                if (a.deg_ != b.deg_ || a.prec_ != b.prec_)
                        return false;
                if (a.c_.size() != b.c_.size())
                        return false;
                if (a.c_.empty())
                        return true;
                return a.lo_ == b.lo_ && a.c_ == b.c_;
        }
        friend bool operator!=(const LaurentForm &a, const LaurentForm &b) { return !(a == b); }

        /// Equality of the known coefficients below min(prec) of both.
        bool agrees_with(const LaurentForm &o) const
        {
                int p = std::min(prec_, o.prec_);
                LaurentForm d = truncated(p) - o.truncated(p);
                return d.is_zero();
        }

        std::string str() const
        {
                std::ostringstream os;
                bool first = true;
                for_each([&](int m, const CycNum &c) {
                        if (!first)
                                os << " + ";
                        first = false;
                        os << "[" << c.str() << "] z^" << m;
                });
                if (first)
                        os << "0";
                if (deg_)
                        os << " dz^" << deg_;
                if (prec_ != EXACT)
                        os << " + O(z^" << prec_ << ")";
                return os.str();
        }

        CycNum zero() const { return ctx_ ? CycNum(*ctx_, 0) : CycNum(); }
        CycNum one() const { return ctx_ ? CycNum(*ctx_, 1) : CycNum(1); }

private:
        const CycContext *ctx_ = nullptr;
        int deg_ = 0;
        int lo_ = 0;
        int prec_ = EXACT;
        std::vector<CycNum> c_;

        void trim()
        {
                size_t a = 0;
                while (a < c_.size() && c_[a].is_zero())
                        ++a;
                if (a == c_.size()) {
                        c_.clear();
                        lo_ = 0;
                        return;
                }
                size_t b = c_.size();
                while (c_[b - 1].is_zero())
                        --b;
                c_.erase(c_.begin() + b, c_.end());
                c_.erase(c_.begin(), c_.begin() + a);
                lo_ += static_cast<int>(a);
        }

        LaurentForm &accumulate(const LaurentForm &o, bool negate)
        {
                if (!ctx_)
                        ctx_ = o.ctx_;
                if (deg_ != o.deg_ && !(is_zero() && exact()) && !(o.is_zero() && o.exact()))
                        throw Error("degree-mismatch", "adding forms of degree " + std::to_string(deg_) + " and " +
                                                               std::to_string(o.deg_));
                if (is_zero() && exact())
                        deg_ = o.deg_;
                int p = std::min(prec_, o.prec_);
                if (p < prec_)
                        *this = truncated(p);
                o.for_each([&](int m, const CycNum &c) {
                        if (m < p)
                                add_to(m, negate ? -c : c);
                });
                trim();
                return *this;
        }
};

/* ---------------------------------------------------------------------- */

/// Truncated series sum_{k <= N} hbar^k a_k with payload T (needs +, *, and a zero).
template <class T>
struct HSeries {
        int N = 0;
        std::map<int, T> c;

        HSeries() = default;
        explicit HSeries(int order) : N(order) {}

        bool has(int k) const { return c.count(k) != 0; }
        const T *find(int k) const { auto it = c.find(k); return it == c.end() ? nullptr : &it->second; }

        void add(int k, const T &v)
        {
                if (k > N)
                        return;
                auto it = c.find(k);
                if (it == c.end())
                        c.emplace(k, v);
                else
                        it->second = it->second + v;
        }
};

/* ---------------------------------------------------------------------- */
/* Primitives used by the wave-function resolvent.                         */

/// int_infinity^z of the undeformed xi_{-k} (k >= 1), plus the holomorphic deformation
/// tail (1/k) sum_l F02[k,l] z^l / l integrated term by term (from 0; the tail is regular).
inline LaurentForm integrate_xi_from_infinity(const CycContext *ctx, int k, const std::map<int, Rat> &tail = {})
{
        if (k < 1)
                throw Error("invalid-parameter", "xi integral needs k >= 1");
        LaurentForm f = LaurentForm::monomial(ctx, -k, CycNum(frac(-1, k)), 0);
        for (auto &[l, v] : tail)
                f.add_to(l, CycNum(v / Rat(k) / Rat(l)));
        return f;
}

/// Coinciding-point limit of int_infinity^{z'} [omega_{0,2}(z, .) - dx(z) dx(.)/(x(z) - x(.))^2]
/// at z' = z, normalised by dz: equals -(r-1)/(2z).
inline LaurentForm b_subtracted_limit(const CycContext *ctx, int r)
{
        return LaurentForm::monomial(ctx, -1, CycNum(frac(-(r - 1), 2)), 1);
}

} // namespace shtr
