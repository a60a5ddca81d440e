// Unit tests for the connection, the formal gauge, the WKB amplitudes and the determinant diagnostic.

#include "fixture_util.hpp"

#include <shtr/wkb.hpp>

#include <catch_amalgamated.hpp>

using namespace shtr;
using fixtures::spec;
using Shifts = std::map<std::pair<int, int>, Rat>;

static Report wkb_report(const CurveSpec &cs, int L)
{
        Curve c(cs);
        Recursion rec{c};
        rec.run(std::max(std::min(3, L - 1), std::min(2, L)));
        ConnectionData d = build_connection_data(c, L);
        FormalGauge g = solve_formal_gauge(d);
        Report rep;
        rep.merge(d.checks);
        rep.merge(g.checks);
        rep.merge(cross_check(c, rec.table(), Amplitudes(d, g), std::min(3, L - 1), std::min(2, L)));
        return rep;
}

TEST_CASE("wkb: connection data across admissible curves", "[wkb]")
{
        for (auto [r, s] : std::vector<std::pair<int, int>>{{2, 1}, {2, 3}, {3, 1}, {3, 2}, {3, 4}, {4, 1}, {4, 3}, {5, 2}, {5, 3}, {5, 4}, {7, 4}}) {
                ConnectionData d = build_connection_data(Curve(spec(r, s)), 2);
                INFO("(r,s) = (" << r << "," << s << "): " << d.checks.summary());
                CHECK(d.checks.pass());
                CHECK(d.prefactor_power == frac((r - s) * (r + 1), 2));
        }
        CurveSpec def = spec(2, 3);
        def.f02[{1, 1}] = 1;
        CHECK_THROWS_AS(build_connection_data(Curve(def), 2), Error);
}

TEST_CASE("wkb: amplitudes reproduce the correlators", "[wkb]")
{
        const std::vector<std::tuple<int, int, Shifts>> samples{
                {2, 3, {}},
                {2, 1, {{{1, 1}, Rat(1, 2)}, {{2, 2}, -1}}},
                {3, 1, {}},
                {3, 1, {{{2, 1}, 1}, {{3, 2}, Rat(1, 5)}}},
                {3, 2, {{{1, 1}, -1}}},
        };
        for (auto &[r, s, sh] : samples) {
                Report rep = wkb_report(spec(r, s, sh), 4);
                INFO("(r,s) = (" << r << "," << s << "): " << rep.summary());
                CHECK(rep.pass());
                // the hbar^0 part of W_2 is the Bergman kernel
                bool bergman = false;
                for (auto &f : rep.findings)
                        bergman = bergman || (f.check == "wkb:bergman" && f.pass);
                CHECK(bergman);
        }
}

TEST_CASE("wkb: a connection built without the shifts disagrees with the shifted correlators", "[wkb]")
{
        const Shifts sh{{{2, 1}, 1}, {{3, 2}, Rat(1, 5)}};
        Curve shifted(spec(3, 1, sh)), bare(spec(3, 1));
        Recursion rec{shifted};
        rec.run(3);
        ConnectionData d = build_connection_data(bare, 4);
        FormalGauge g = solve_formal_gauge(d);
        Report rep = cross_check(shifted, rec.table(), Amplitudes(d, g), 3, 2);
        REQUIRE(!rep.pass());
        CHECK(rep.first_failure()->check == "wkb:W1");
        CHECK(rep.first_failure()->location == "hbar^0");
}

TEST_CASE("wkb: M(z, e_a) does not depend on the diagonal freedom of the gauge", "[wkb]")
{
        Curve c(spec(3, 1, {{{1, 1}, Rat(1, 3)}, {{2, 2}, 1}}));
        const int L = 3;
        ConnectionData d = build_connection_data(c, L);
        FormalGauge g = solve_formal_gauge(d);
        // U -> U diag(1 + hbar q_i + hbar^2 q_i^2) with constant q_i
        MatSeries D;
        for (int k = 0; k <= L; ++k) {
                Mat m(c.ctx(), 3, 0);
                for (int i = 0; i < 3; ++i)
                        m(i, i) = LaurentForm::monomial(c.ctx(), 0, CycNum(c.context(), k > 2 ? Rat(0) : rat_pow(Rat(i + 2), k)), 0);
                D.c.push_back(m);
        }
        FormalGauge g2 = g;
        g2.U = g.U * D;
        Amplitudes A(d, g), B(d, g2);
        for (int a = 0; a < 3; ++a) {
                MatSeries ma = A.M(a), mb = B.M(a);
                for (int k = 0; k <= L; ++k)
                        CHECK(ma[k] == mb[k]);
        }
}

TEST_CASE("wkb: projectors sum to the identity and W_1 sums to the trace", "[wkb]")
{
        Curve c(spec(3, 2, {{{1, 1}, 1}}));
        const int L = 3;
        ConnectionData d = build_connection_data(c, L);
        Amplitudes A(d, solve_formal_gauge(d));
        MatSeries sum = A.M(0);
        for (int a = 1; a < 3; ++a)
                sum = sum + A.M(a);
        CHECK(sum[0] == Mat::identity(c.ctx(), 3));
        for (int k = 1; k <= L; ++k)
                CHECK(sum[k].is_zero());
        // sum_a W_1(z.e_a) = Tr Phi
        for (int k = 0; k <= L; ++k) {
                LaurentForm w = A.W1(0)[k] + A.W1(1)[k] + A.W1(2)[k];
                CHECK(w == d.Phi[k].trace());
        }
}

TEST_CASE("wkb: characteristic polynomial equals the Casimir expansion", "[wkb]")
{
        for (auto [r, s] : std::vector<std::pair<int, int>>{{2, 1}, {2, 3}, {3, 1}, {3, 2}, {4, 1}, {4, 3}}) {
                Shifts sh;
                if (s == 1)
                        sh = {{{1, 1}, 2}, {{2, 1}, Rat(-1, 3)}};
                Curve c(spec(r, s, sh));
                Mat E = connection_coefficient(c, 0) + connection_coefficient(c, 1);
                INFO("(r,s) = (" << r << "," << s << ")");
                CHECK(characteristic_identity_holds(E));
        }
}

TEST_CASE("wkb: determinant diagnostic agrees with the symbolic evaluator", "[wkb][diagnostic]")
{
        // minimal z-exponents from tools/oracles/diagnostic_oracle.py
        const std::vector<std::tuple<int, int, std::vector<int>, int>> frozen{
                {3, 2, {}, 0},      {3, 2, {1}, 0},     {3, 2, {2}, -2}, {3, 2, {1, 3}, -5}, {4, 3, {2}, -3},
                {4, 3, {1, 4}, -11}, {5, 3, {}, 0},      {5, 3, {1}, -2}, {5, 3, {2}, -5},    {5, 2, {}, 0},
                {5, 2, {1}, 0},     {7, 5, {}, -2},     {7, 5, {1}, -4}, {7, 4, {}, 0},      {7, 3, {}, 0},
        };
        for (auto &[r, s, sh, lo] : frozen) {
                DiagnosticRecord rec = determinant_diagnostic(r, s, sh);
                INFO(rec.to_json().dump());
                CHECK(rec.min_exponent == lo);
                CHECK(rec.holomorphic == (lo >= 0));
        }
        // (7,5) is rejected even without shifts: 7 = 2 mod 5
        DiagnosticRecord r75 = determinant_diagnostic(7, 5, {});
        CHECK(!r75.holomorphic);
        CHECK(r75.condition_hit == 0);
        CHECK_THROWS_AS(determinant_diagnostic(4, 2, {}), Error);
        CHECK_THROWS_AS(determinant_diagnostic(3, 3, {}), Error);
}

TEST_CASE("wkb: constant term of the diagnostic", "[wkb][diagnostic]")
{
        for (int r = 2; r <= 7; ++r)
                for (int s = 1; s <= r - 1; ++s)
                        if (std::gcd(r, s) == 1)
                                for (auto sh : std::vector<std::vector<int>>{{}, {1}, {2}, {1, r}}) {
                                        if (sh.size() == 1 && sh[0] > r)
                                                continue;
                                        DiagnosticRecord rec = determinant_diagnostic(r, s, sh);
                                        INFO(rec.to_json().dump());
                                        CHECK(rec.constant_term == expected_constant_term(r, s, rec.shifted));
                                }
        // -S_1 z^-1 for (3,2) with S_1
        SPoly p;
        sp_add(p, {1, 0, 0, -1}, Rat(-1));
        CHECK(determinant_diagnostic(3, 2, {1}).constant_term == p);
}

TEST_CASE("wkb: classification grid", "[wkb][diagnostic]")
{
        int holo = 0, total = 0;
        for (int r = 2; r <= 8; ++r)
                for (int s = 1; s <= r - 1; ++s)
                        if (std::gcd(r, s) == 1)
                                for (auto sh : std::vector<std::vector<int>>{{}, {1}, {2}, {1, r}}) {
                                        DiagnosticRecord rec = determinant_diagnostic(r, s, sh);
                                        INFO(rec.to_json().dump());
                                        CHECK(rec.holomorphic == rec.predicted);
                                        holo += rec.holomorphic;
                                        ++total;
                                }
        CHECK(total == 84);
        CHECK(holo == 49);
        // r = -1 mod s with s >= 3 admits no shifts
        for (auto [r, s] : std::vector<std::pair<int, int>>{{5, 3}, {7, 4}, {8, 3}, {7, 3}}) {
                if (mod_floor(r + 1, s) != 0)
                        continue;
                INFO("(r,s) = (" << r << "," << s << ")");
                CHECK(determinant_diagnostic(r, s, {}).holomorphic);
                CHECK(!determinant_diagnostic(r, s, {1}).holomorphic);
        }
}
