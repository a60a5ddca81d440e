// Unit tests for truncated Laurent forms: residues, sheet substitution, inversion, primitives.

#include <shtr/series.hpp>

#include <catch_amalgamated.hpp>

#include <random>

using namespace shtr;

static LaurentForm mono(const CycContext *ctx, int m, const Rat &c, int deg = 1)
{
        return LaurentForm::monomial(ctx, m, CycNum(*ctx, c), deg);
}

TEST_CASE("series: residue at zero", "[series]")
{
        const CycContext *C = &cyclotomic_context(3);
        CHECK(mono(C, -1, 1).residue() == CycNum(*C, 1));
        for (int k : {-5, -2, 0, 3})
                CHECK(mono(C, k, 7).residue().is_zero());
        CHECK((mono(C, -1, Rat(3, 2)) + mono(C, 3, 7)).residue() == CycNum(*C, Rat(3, 2)));
        CHECK_THROWS_AS(mono(C, -1, 1, 0).residue(), Error);
}

TEST_CASE("series: sheet substitution", "[series]")
{
        for (int r = 2; r <= 6; ++r) {
                const CycContext *C = &cyclotomic_context(r);
                for (int a = 0; a < r; ++a) {
                        INFO("r = " << r << ", a = " << a);
                        // dz/z is invariant
                        CHECK(mono(C, -1, 1).sheet_substitute(a) == mono(C, -1, 1));
                        // r z^(s-1) dz -> r theta^(as) z^(s-1) dz
                        for (int s = 1; s <= r + 1; ++s)
                                CHECK(mono(C, s - 1, r).sheet_substitute(a) ==
                                      LaurentForm::monomial(C, s - 1, CycNum::theta(*C, a * s).scaled(Rat(r)), 1));
                }
        }
        const CycContext *C2 = &cyclotomic_context(2);
        CHECK(mono(C2, -2, 1).sheet_substitute(1) == mono(C2, -2, -1));
}

TEST_CASE("series: inversion", "[series]")
{
        const CycContext *C = &cyclotomic_context(5);
        // 1 - z -> sum z^k
        LaurentForm f = mono(C, 0, 1, 0) - mono(C, 1, 1, 0);
        LaurentForm g = f.inverse(8);
        for (int k = 0; k < 8; ++k)
                CHECK(g.coeff(k) == CycNum(*C, 1));
        CHECK(g.prec() == 8);
        // monomials invert exactly
        LaurentForm m = LaurentForm::monomial(C, 3, CycNum::theta(*C, 2).scaled(Rat(4)), 1);
        LaurentForm mi = m.inverse(0);
        CHECK(mi.exact());
        CHECK((m * mi) == mono(C, 0, 1, 0));
        // kernel denominator factor r (theta^(as) - 1) z^(s-1) dz is an exact monomial
        for (int a = 1; a < 5; ++a) {
                LaurentForm w = mono(C, 1, 5), d = w.sheet_substitute(a) - w;
                CHECK((d * d.inverse(0)) == mono(C, 0, 1, 0));
        }
}

TEST_CASE("series: inversion of randomized series", "[series]")
{
        std::mt19937_64 rng(7);
        std::uniform_int_distribution<int> coef(-6, 6);
        for (int r : {2, 3, 4, 6}) {
                const CycContext *C = &cyclotomic_context(r);
                for (int trial = 0; trial < 25; ++trial) {
                        LaurentForm f(C, 0);
                        const int v = coef(rng) % 3;
                        f.set(v, CycNum::theta(*C, trial).scaled(Rat(1 + trial % 4)));
                        for (int k = 1; k < 6; ++k)
                                f.add_to(v + k, CycNum::theta(*C, k * trial).scaled(Rat(coef(rng))));
                        const int order = 10;
                        LaurentForm prod = f * f.inverse(order);
                        INFO("f = " << f.str());
                        CHECK(prod.truncated(order).agrees_with(mono(C, 0, 1, 0).truncated(order)));
                        CHECK(prod.prec() >= order);
                }
        }
}

TEST_CASE("series: primitives from infinity", "[series]")
{
        const CycContext *C = &cyclotomic_context(2);
        CHECK(integrate_xi_from_infinity(C, 1) == mono(C, -1, -1, 0));
        CHECK(integrate_xi_from_infinity(C, 3) == mono(C, -3, Rat(-1, 3), 0));
        for (int k = 1; k <= 6; ++k)
                CHECK(integrate_xi_from_infinity(C, k).derivative() == mono(C, -k - 1, 1, 0));
        // coinciding-point limit of the b-subtracted primitive
        for (int r = 2; r <= 6; ++r)
                CHECK(b_subtracted_limit(&cyclotomic_context(r), r) == mono(&cyclotomic_context(r), -1, frac(-(r - 1), 2)));
}

TEST_CASE("series: forms and precision bookkeeping", "[series]")
{
        const CycContext *C = &cyclotomic_context(3);
        LaurentForm a = mono(C, -2, 1) + mono(C, 1, 2);
        LaurentForm b = a.truncated(0);
        CHECK(b.prec() == 0);
        CHECK_THROWS_AS(b.coeff(0), Error);
        CHECK(b.coeff(-2) == CycNum(*C, 1));
        CHECK_THROWS_AS(mono(C, 0, 1, 1) + mono(C, 0, 1, 2), Error);
        // an exact zero compares equal regardless of its nominal degree
        CHECK(LaurentForm(C, 0) == LaurentForm(C, 1));
        CHECK((a - a).is_zero());
        CHECK(a.shifted(2) == mono(C, 0, 1) + mono(C, 3, 2));
}
