// Unit tests for the W(gl_r) modes, the shifted Airy structure and the W-constraint verifier.

#include "fixture_util.hpp"

#include <shtr/airy.hpp>

#include <catch_amalgamated.hpp>

using namespace shtr;
using fixtures::spec;

static CorrelatorTable table_for(const CurveSpec &c, int chi)
{
        Recursion rec{Curve(c)};
        rec.run(chi);
        return rec.table();
}

TEST_CASE("airy: Psi coefficients", "[airy]")
{
        CHECK(psi_coefficient(2, 1, {}) == Rat(-1, 4));
        for (int r = 2; r <= 6; ++r)
                for (long a = -2 * r; a <= 2 * r; ++a)
                        CHECK(psi_coefficient(r, 0, {a}) == (a % r == 0 ? Rat(r) : Rat(0)));
        // residues mod r and ordering of the arguments do not matter
        CHECK(psi_coefficient(4, 1, {1, 3}) == psi_coefficient(4, 1, {-3, 7}));
        CHECK(psi_coefficient(5, 0, {1, 2, 3}) == psi_coefficient(5, 0, {3, 1, 2}));
        CHECK_THROWS_AS(psi_coefficient(3, 2, {}), Error);
}

TEST_CASE("airy: lambda partitions and mode floors", "[airy]")
{
        CHECK(Curve::lambda_partition(5, 2) == std::vector<int>{3, 2});
        CHECK(mode_floors(5, 2) == std::vector<int>{0, 0, 0, -1, -1});
        for (int r = 2; r <= 12; ++r)
                for (int s = 1; s <= r + 1; ++s)
                        if (admissible(r, s)) {
                                INFO("(r,s) = (" << r << "," << s << ")");
                                CHECK(lambda_identity_holds(r, s));
                        }
}

TEST_CASE("airy: twist conjugation shifts only J_{-s}", "[airy]")
{
        for (auto [r, s] : std::vector<std::pair<int, int>>{{2, 3}, {3, 1}, {3, 2}, {5, 2}}) {
                AiryStructure A{Curve(spec(r, s))};
                for (int m = -2 * s - 1; m <= 2 * s + 1; ++m)
                        CHECK(A.twist_conjugation_holds(m));
        }
}

TEST_CASE("airy: Weyl algebra normal ordering", "[airy]")
{
        WeylPoly x, d;
        x.add({{1}, {}}, 0, Rat(1));
        d.add({{}, {1}}, 0, Rat(1));
        // d x = x d + 1
        WeylPoly expect;
        expect.add({{1}, {1}}, 0, Rat(1));
        expect.add({{}, {}}, 0, Rat(1));
        CHECK(((d * x) - expect).is_zero());
        CHECK(((x * d) - expect).terms.size() == 1);
        // different indices commute
        WeylPoly y;
        y.add({{2}, {}}, 0, Rat(1));
        CHECK(((d * y) - (y * d)).is_zero());
}

TEST_CASE("airy: modes have the expected leading form", "[airy]")
{
        for (auto [r, s, shifts] : std::vector<std::tuple<int, int, std::map<std::pair<int, int>, Rat>>>{
                     {2, 3, {}}, {3, 1, {{{1, 1}, 1}, {{2, 1}, 2}}}, {3, 2, {{{1, 1}, -1}}}, {5, 2, {}}}) {
                AiryStructure A{Curve(spec(r, s, shifts))};
                auto fl = mode_floors(r, s);
                for (int i = 1; i <= r; ++i)
                        for (int k = fl[i - 1]; k <= 1; ++k) {
                                INFO("(r,s) = (" << r << "," << s << "), W^" << i << "_" << k);
                                CHECK(A.leading_form_holds(i, k, std::max(r * k + s * (i - 1), s) + 1));
                        }
        }
}

TEST_CASE("airy: mode windows", "[airy]")
{
        AiryStructure A{Curve(spec(3, 2))};
        CHECK_THROWS_AS(A.mode(3, 1, 4), Error);
        // enlarging the window leaves the terms inside the old window unchanged
        for (int i = 1; i <= 3; ++i)
                for (int k = 0; k <= 2; ++k) {
                        const int M = 3 * k + 2 * (i - 1) + 2;
                        WeylPoly small = A.mode(i, k, M), big = A.mode(i, k, M + 6), inside;
                        for (auto &[m, c] : big.terms) {
                                bool in = true;
                                for (int p : m.x)
                                        in = in && p <= M;
                                for (int p : m.d)
                                        in = in && p <= M;
                                if (in)
                                        inside.add(m, c);
                        }
                        INFO("W^" << i << "_" << k);
                        CHECK((inside - small).is_zero());
                }
}

TEST_CASE("airy: Airy curve satisfies the W-constraints and every perturbation is caught", "[airy][verify]")
{
        CorrelatorTable T = table_for(spec(2, 3), 3);
        AiryStructure A{Curve(spec(2, 3))};
        Report rep = A.verify(T, 4, 3);
        INFO(rep.summary());
        REQUIRE(rep.pass());
        int entries = 0, caught = 0;
        for (auto &[gn, tensor] : T.F)
                for (auto &[k, v] : tensor) {
                        CorrelatorTable bad = T;
                        bad.F[gn][k] += 1;
                        ++entries;
                        caught += A.verify(bad, 4, 3).pass() ? 0 : 1;
                }
        CHECK(entries > 0);
        CHECK(caught == entries);
        CHECK_THROWS_AS(A.verify(table_for(spec(2, 3), 2), 4, 3), Error);
}

TEST_CASE("airy: shifted (3,1) satisfies the W-constraints; a sign flip breaks them", "[airy][verify]")
{
        const std::map<std::pair<int, int>, Rat> shifts{{{1, 1}, Rat(1, 3)}, {{2, 2}, 1}};
        CorrelatorTable T = table_for(spec(3, 1, shifts), 3);
        Report ok = AiryStructure{Curve(spec(3, 1, shifts))}.verify(T, 4, 3);
        INFO(ok.summary());
        CHECK(ok.pass());
        auto flipped = shifts;
        flipped[{2, 2}] = -1;
        Report bad = AiryStructure{Curve(spec(3, 1, flipped))}.verify(T, 4, 3);
        REQUIRE(!bad.pass());
        // S_{2,2} enters first at hbar^2
        CHECK(bad.first_failure()->witness.rfind("hbar^2 ", 0) == 0);
}

TEST_CASE("airy: S_{1,2} leaves the zero mode unbalanced", "[airy][verify]")
{
        const std::map<std::pair<int, int>, Rat> shifts{{{1, 2}, 1}};
        CorrelatorTable T = table_for(spec(2, 1, shifts), 3);
        Report rep = AiryStructure{Curve(spec(2, 1, shifts))}.verify(T, 4, 2);
        REQUIRE(!rep.pass());
        CHECK(rep.first_failure()->location == "H^1_0");
        CHECK(rep.first_failure()->witness == "hbar^2 x[] coefficient -1");
}

TEST_CASE("airy: deformed curves are refused", "[airy]")
{
        CurveSpec d = spec(2, 3);
        d.f02[{1, 1}] = 1;
        CHECK_THROWS_AS(AiryStructure{Curve(d)}, Error);
}
