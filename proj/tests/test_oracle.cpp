// The brute-force raw-Laurent evaluator against the production engine, and both against the sympy fixtures.

#include "fixture_util.hpp"

#include <shtr/oracle.hpp>

#include <catch_amalgamated.hpp>

using namespace shtr;
using fixtures::spec;

static std::string production(const CurveSpec &c, int chi)
{
        Curve curve(c);
        Recursion rec(curve);
        rec.run(chi);
        return serialize_table(rec.table());
}

static std::string brute(const CurveSpec &c, int chi)
{
        oracle::BruteForce bf(c);
        bf.run(chi);
        return serialize_table(bf.table());
}

TEST_CASE("oracle: brute force agrees byte-for-byte on the unshifted curves", "[oracle]")
{
        for (auto [r, s] : {std::pair{2, 3}, {2, 1}, {3, 2}}) {
                INFO("r = " << r << ", s = " << s);
                CHECK(brute(spec(r, s), 2) == production(spec(r, s), 2));
        }
}

TEST_CASE("oracle: brute force agrees on shifted curves", "[oracle]")
{
        CHECK(brute(spec(2, 1, {{{1, 1}, Rat(1, 2)}, {{2, 1}, Rat(-1, 3)}, {{2, 2}, 2}}), 2) ==
              production(spec(2, 1, {{{1, 1}, Rat(1, 2)}, {{2, 1}, Rat(-1, 3)}, {{2, 2}, 2}}), 2));
        CHECK(brute(spec(3, 2, {{{1, 1}, 1}}), 2) == production(spec(3, 2, {{{1, 1}, 1}}), 2));
        CHECK(brute(spec(3, 1, {{{2, 1}, 1}, {{3, 2}, Rat(1, 5)}}), 2) ==
              production(spec(3, 1, {{{2, 1}, 1}, {{3, 2}, Rat(1, 5)}}), 2));
}

TEST_CASE("oracle: brute force matches the sympy fixtures", "[oracle]")
{
        for (auto name : {"airy_r2s3_chi2", "r2s1_chi2", "r3s2_chi2", "r2s1_shifted_chi2"}) {
                auto oc = fixtures::load_oracle(name);
                oracle::BruteForce bf(oc.curve);
                bf.run(oc.chi);
                for (auto &[gn, T] : oc.F) {
                        INFO(name << " (2g,n) = (" << gn.first << "," << gn.second << ")");
                        CHECK(bf.table().at(gn.first, gn.second) == T);
                }
        }
}

TEST_CASE("oracle: serialisation is deterministic and round-trips", "[oracle][serialize]")
{
        std::string a = production(spec(3, 2, {{{1, 1}, 1}}), 2);
        std::string b = production(spec(3, 2, {{{1, 1}, 1}}), 2);
        CHECK(a == b);
        CorrelatorTable t = parse_table(a);
        CHECK(serialize_table(t) == a);
        CorrelatorTable u = t;
        u.F[{0, 3}][{1, 1, 1}] += 1;
        CHECK(table_diff(t, t).empty());
        CHECK(table_diff(t, u).find("(2g,n) = (0,3)") != std::string::npos);
}
