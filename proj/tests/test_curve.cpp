// Unit tests for curve validation, unstable correlators and the xi-basis.

#include "fixture_util.hpp"

#include <catch_amalgamated.hpp>

using namespace shtr;
using fixtures::spec;

static std::string error_kind(const CurveSpec &c)
{
        try {
                Curve cv(c);
        } catch (const Error &e) {
                return e.kind;
        }
        return "";
}

TEST_CASE("curve: admissibility", "[curve]")
{
        CHECK(error_kind(spec(7, 5)) == "inadmissible-(r,s)");
        CHECK(error_kind(spec(1, 1)) == "inadmissible-(r,s)");
        CHECK(error_kind(spec(3, 5)) == "inadmissible-(r,s)");
        for (auto [r, s] : std::vector<std::pair<int, int>>{{2, 1}, {2, 3}, {3, 1}, {3, 2}, {3, 4}, {4, 3}, {5, 2}, {5, 3}, {7, 4}})
                CHECK(error_kind(spec(r, s)) == "");
}

TEST_CASE("curve: shift consistency", "[curve]")
{
        // r = 1 mod s, s >= 2: only S_{1,l}
        CHECK(error_kind(spec(4, 3, {{{1, 1}, 5}, {{1, 2}, Rat(1, 2)}})) == "");
        CHECK(error_kind(spec(4, 3, {{{2, 1}, 1}})) == "inconsistent-shifts");
        // r = -1 mod s, s >= 3: none
        CHECK(error_kind(spec(5, 3, {{{1, 1}, 1}})) == "inconsistent-shifts");
        CHECK(error_kind(spec(5, 3, {{{3, 2}, -1}})) == "inconsistent-shifts");
        CHECK(error_kind(spec(2, 3, {{{1, 1}, 1}})) == "inconsistent-shifts");
        // s = 1: anything in range
        CHECK(error_kind(spec(3, 1, {{{1, 1}, 1}, {{2, 2}, 3}, {{3, 3}, -2}})) == "");
        // s = 2 with r odd = 1 mod 2: only S_{1,l}
        CHECK(error_kind(spec(3, 2, {{{1, 1}, -1}})) == "");
        CHECK(error_kind(spec(3, 2, {{{2, 1}, 1}})) == "inconsistent-shifts");
        // index range
        CHECK(error_kind(spec(3, 1, {{{4, 1}, 1}})) == "inconsistent-shifts");
        CHECK(error_kind(spec(3, 1, {{{1, 0}, 1}})) == "inconsistent-shifts");
        // zero entries never violate consistency
        CHECK(error_kind(spec(5, 3, {{{1, 1}, 0}})) == "");
}

TEST_CASE("curve: validation is total and idempotent", "[curve]")
{
        for (int r = 1; r <= 6; ++r)
                for (int s = 0; s <= r + 2; ++s)
                        for (int i = 1; i <= 3; ++i) {
                                CurveSpec c = spec(r, s, {{{i, 1}, 1}});
                                std::string first = error_kind(c);
                                CHECK(first == error_kind(c));
                                if (first.empty()) {
                                        Curve cv(c);
                                        CHECK(error_kind(cv.spec()) == "");
                                }
                        }
}

#ifdef SHTR_TEST_HOOKS
TEST_CASE("curve: test hook bypasses shift validation only", "[curve][hook]")
{
        Curve c = Curve::without_shift_check(spec(5, 3, {{{1, 1}, 1}}));
        CHECK(c.shift(1, 1) == 1);
        CHECK_THROWS_AS(Curve::without_shift_check(spec(7, 5)), Error);
}
#endif

TEST_CASE("curve: lambda partitions", "[curve]")
{
        CHECK(Curve::lambda_partition(5, 2) == std::vector<int>{3, 2});
        CHECK(Curve::lambda_partition(4, 1) == std::vector<int>{4});
        CHECK(Curve::lambda_partition(3, 4) == std::vector<int>{1, 1, 1});
        CHECK(Curve::lambda_partition(7, 4) == std::vector<int>{2, 2, 2, 1});
        CHECK(Curve::lambda_of({3, 2}, 1) == 1);
        CHECK(Curve::lambda_of({3, 2}, 4) == 2);
        CHECK_THROWS_AS(Curve::lambda_partition(7, 5), Error);
}

TEST_CASE("curve: unstable correlators", "[curve]")
{
        Curve c(spec(3, 1, {{{1, 1}, Rat(1, 3)}, {{2, 1}, 1}, {{3, 1}, Rat(-1, 2)}}));
        const CycContext *C = c.ctx();
        CHECK(c.omega01() == LaurentForm::monomial(C, 0, CycNum(*C, 3), 1));
        // omega_{1/2,1} = sum_i (-1)^(i-1) S_{i,1} z^(-s(i-1)-1) dz
        LaurentForm w12 = LaurentForm::monomial(C, -1, CycNum(*C, Rat(1, 3)), 1) +
                          LaurentForm::monomial(C, -2, CycNum(*C, -1), 1) +
                          LaurentForm::monomial(C, -3, CycNum(*C, Rat(-1, 2)), 1);
        CHECK(c.omega12() == w12);
        CHECK(c.omega12(1) == w12.sheet_substitute(1));
        // omega_{0,2}(theta^a z, theta^b z) = theta^(a+b) / (theta^a - theta^b)^2 dz^2 / z^2
        for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                        if (a != b) {
                                CycNum d = CycNum::theta(*C, a) - CycNum::theta(*C, b);
                                CHECK(c.omega02_sheets(a, b) == LaurentForm::monomial(C, -2, CycNum::theta(*C, a + b) / (d * d), 2));
                        }
}

TEST_CASE("curve: xi basis", "[curve]")
{
        Curve plain(spec(2, 3));
        const CycContext *C = plain.ctx();
        CHECK(plain.xi_minus(2) == LaurentForm::monomial(C, -3, CycNum(*C, 1), 1));
        for (int k = 1; k <= 20; ++k)
                CHECK(plain.xi_minus(k) == LaurentForm::monomial(C, -k - 1, CycNum(*C, 1), 1));
        CHECK_THROWS_AS(plain.xi_minus(0), Error);

        CurveSpec d = spec(2, 3);
        d.f02[{1, 1}] = Rat(5, 7);
        Curve def(d);
        CHECK(def.deformed());
        CHECK(def.xi_minus(1) == LaurentForm::monomial(C, -2, CycNum(*C, 1), 1) + LaurentForm::monomial(C, 0, CycNum(*C, Rat(5, 7)), 1));
        // xi_{-k} is the coefficient of the spectator pole in omega_{0,2}: the residue pairing
        // Res_{w=0} (int_0^w omega_{0,2}(., z)) dw / w^(k+1) picks k z^(k-1) dz from the undeformed part
        for (int k = 1; k <= 20; ++k)
                CHECK(plain.omega02_slot(0, k) == LaurentForm::monomial(C, k - 1, CycNum(*C, k), 1));
}

TEST_CASE("curve: recursion kernel denominators", "[curve]")
{
        Curve airy(spec(2, 3));
        const CycContext *C = airy.ctx();
        CHECK(airy.kernel_denominator({1}) == LaurentForm::monomial(C, 2, CycNum(*C, -4), 1));
        for (auto [r, s] : std::vector<std::pair<int, int>>{{3, 1}, {3, 2}, {4, 3}, {5, 2}, {5, 3}}) {
                Curve c(spec(r, s));
                for (int a = 1; a < r; ++a) {
                        LaurentForm d = c.kernel_denominator({a});
                        INFO("(r,s) = (" << r << "," << s << "), a = " << a);
                        CHECK(d.valuation() == s - 1);
                        CHECK(d.coeff(s - 1) == (CycNum::theta(c.context(), a * s) - CycNum(c.context(), 1)).scaled(Rat(r)));
                        CHECK(!d.coeff(s - 1).is_zero());
                }
        }
        CHECK_THROWS_AS(airy.kernel_denominator({}), Error);
        // a subleading omega01 deformation makes the inverse a genuine series
        CurveSpec d = spec(2, 3);
        d.f01[3] = 2;
        d.f01[5] = 1;
        Curve def(d);
        LaurentForm den = def.kernel_denominator({1}), inv = def.kernel_inverse({1}, 6);
        CHECK(!inv.exact());
        CHECK((den * inv).truncated(6).agrees_with(LaurentForm::monomial(def.ctx(), 0, CycNum(def.context(), 1), 0).truncated(6)));
}
