// Unit tests for the differential-operator algebra, the wave-function resolvent and the quantum curve.

#include "fixture_util.hpp"

#include <shtr/qcurve.hpp>

#include <catch_amalgamated.hpp>

#include <random>

using namespace shtr;
using fixtures::spec;
using Shifts = std::map<std::pair<int, int>, Rat>;

static QCResult check_curve(const CurveSpec &cs, int N)
{
        Curve c(cs);
        Recursion rec{c};
        rec.run(std::max(N - 1, 1));
        Resolvent F = resolvent(c, rec.table(), N);
        return verify_quantum_curve(c, build_quantum_operator(c, N), F, N);
}

TEST_CASE("qcurve: composition is associative and obeys the commutator", "[qcurve]")
{
        const DiffOp x = DiffOp::x_power(Rat(1)), D = DiffOp::D();
        // [hbar d, x] = hbar
        CHECK(D * x - x * D == DiffOp::constant(Rat(1), 1));
        // x^a for rational a
        const DiffOp xa = DiffOp::x_power(Rat(2, 3));
        CHECK(D * xa - xa * D == DiffOp::x_power(Rat(-1, 3)).scaled(Rat(2, 3), 1));

        std::mt19937_64 rng(11);
        std::uniform_int_distribution<int> pick(0, 3), coef(-3, 3);
        auto random_op = [&] {
                DiffOp o;
                for (int k = 0; k < 3; ++k)
                        o.add({frac(coef(rng), 1 + pick(rng)), pick(rng)}, pick(rng) - 1, Rat(coef(rng)));
                return o;
        };
        for (int trial = 0; trial < 30; ++trial) {
                DiffOp a = random_op(), b = random_op(), c = random_op();
                CHECK((a * b) * c == a * (b * c));
                CHECK(a * (b + c) == a * b + a * c);
                CHECK(DiffOp::from_json(a.to_json()) == a);
        }
}

TEST_CASE("qcurve: words and rendering", "[qcurve]")
{
        // d x d = x d^2 + d
        DiffOp w = DiffOp::word({1, 1});
        DiffOp expect = DiffOp::x_power(Rat(1)) * DiffOp::d() * DiffOp::d() + DiffOp::d();
        CHECK(w == expect);
        CHECK(DiffOp::word_text({2, 1}) == "d²/dx² x d/dx");
        CHECK(DiffOp::word_text({0, 3}) == "x d³/dx³");
        CHECK(DiffOp::superscript(12) == "¹²");
        CHECK(DiffOp::superscript(-3) == "⁻³");
        CHECK(closed_form_s1(2).pretty() == "ℏ² d/dx x d/dx − 1");
        CHECK(closed_form_s_r_minus_1(3, 1).pretty() == "ℏ³ d/dx x d²/dx² − 1");
        // not a single word: falls back to the normal-ordered form
        DiffOp odd = DiffOp::D() + DiffOp::x_power(Rat(1)).scaled(Rat(-2));
        CHECK(odd.pretty() == "−2 x + ℏ d/dx");
        CHECK(DiffOp().pretty() == "0");
}

TEST_CASE("qcurve: unshifted (3,2) renders as the documented operator", "[qcurve]")
{
        Curve c(spec(3, 2));
        DiffOp op = build_quantum_operator(c, 4);
        CHECK(op.pretty() == "ℏ³ d²/dx² x d/dx − 1");
        CHECK(op == closed_form_s_r_minus_1(3, 0));
}

TEST_CASE("qcurve: s = 1 closed form", "[qcurve]")
{
        for (int r = 2; r <= 6; ++r) {
                INFO("r = " << r);
                CHECK(build_quantum_operator(Curve(spec(r, 1)), 4) == closed_form_s1(r));
        }
}

TEST_CASE("qcurve: s = r-1 closed form with S_{1,1} = m", "[qcurve]")
{
        for (int r : {3, 4, 5})
                for (int m = -1; m <= r - 1; ++m) {
                        INFO("r = " << r << ", m = " << m);
                        Shifts sh;
                        if (m != 0)
                                sh[{1, 1}] = m;
                        CHECK(build_quantum_operator(Curve(spec(r, r - 1, sh)), 4) == closed_form_s_r_minus_1(r, m));
                }
        CHECK_THROWS_AS(closed_form_s_r_minus_1(3, 3), Error);
        CHECK_THROWS_AS(closed_form_s_r_minus_1(3, -2), Error);
}

TEST_CASE("qcurve: resolvent leading terms", "[qcurve]")
{
        for (auto [r, s] : std::vector<std::pair<int, int>>{{2, 1}, {3, 1}, {3, 2}, {4, 3}, {5, 2}}) {
                Curve c(spec(r, s));
                Recursion rec{c};
                rec.run(2);
                Resolvent F = resolvent(c, rec.table(), 3);
                INFO("(r,s) = (" << r << "," << s << ")");
                REQUIRE(F.find(0));
                CHECK(*F.find(0) == LaurentForm::monomial(c.ctx(), s - r, CycNum(c.context(), 1), 0));
        }
        // (r,1) with S_{1,1} = sigma: hbar^1 term (sigma - (r-1)/2)/r z^(-r)
        for (int r = 2; r <= 5; ++r)
                for (Rat sigma : {Rat(0), Rat(1), Rat(-2, 3)}) {
                        Shifts sh;
                        if (sigma != 0)
                                sh[{1, 1}] = sigma;
                        Curve c(spec(r, 1, sh));
                        Recursion rec{c};
                        rec.run(1);
                        Resolvent F = resolvent(c, rec.table(), 1);
                        INFO("r = " << r << ", sigma = " << sigma);
                        const Rat want = (sigma - frac(r - 1, 2)) / Rat(r);
                        if (want == 0)
                                CHECK((!F.find(1) || F.find(1)->is_zero()));
                        else
                                CHECK(*F.find(1) == LaurentForm::monomial(c.ctx(), -r, CycNum(c.context(), want), 0));
                }
        Curve c(spec(2, 1));
        Recursion rec{c};
        rec.run(1);
        CHECK_THROWS_AS(resolvent(c, rec.table(), 4), Error);
}

TEST_CASE("qcurve: operators annihilate the wave function", "[qcurve]")
{
        const std::vector<std::tuple<int, int, Shifts>> samples{
                {2, 1, {}},
                {2, 1, {{{1, 1}, Rat(1, 2)}, {{2, 2}, -1}}},
                {3, 1, {{{1, 1}, Rat(1, 3)}, {{2, 1}, 1}, {{3, 2}, Rat(1, 5)}}},
                {3, 2, {{{1, 1}, -1}}},
                {4, 3, {{{1, 1}, 2}}},
                {5, 2, {}},
                {5, 3, {}},
        };
        for (auto &[r, s, sh] : samples) {
                INFO("(r,s) = (" << r << "," << s << ")");
                QCResult q = check_curve(spec(r, s, sh), 4);
                INFO(q.witness);
                CHECK(q.pass());
                CHECK(q.order_str() == "4");
        }
}

TEST_CASE("qcurve: mismatched operators are detected", "[qcurve]")
{
        // the identity operator fails already at hbar^0
        Curve c(spec(3, 2));
        Recursion rec{c};
        rec.run(3);
        Resolvent F = resolvent(c, rec.table(), 4);
        QCResult id = verify_quantum_curve(c, DiffOp::constant(Rat(1)), F, 4);
        CHECK(id.order == QCResult::NEG_INF);
        CHECK(id.order_str() == "-inf");
        CHECK(!id.pass());

        // operator built with S_{1,1} = 1 against the resolvent of the unshifted curve
        Curve shifted(spec(3, 2, {{{1, 1}, 1}}));
        QCResult swapped = verify_quantum_curve(c, build_quantum_operator(shifted, 4), F, 4);
        CHECK(swapped.order == 0);
        CHECK(swapped.witness.rfind("hbar^1 ", 0) == 0);
}

TEST_CASE("qcurve: unsupported curves are refused", "[qcurve]")
{
        CHECK_THROWS_AS(build_quantum_operator(Curve(spec(2, 3)), 4), Error);
        CurveSpec d = spec(2, 1);
        d.f02[{1, 1}] = 1;
        CHECK_THROWS_AS(build_quantum_operator(Curve(d), 4), Error);
        CHECK_THROWS_AS(DiffOp::from_json(nlohmann::json::parse(R"([{"a_num": 1}])")), Error);
}
