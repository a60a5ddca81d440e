/*
 * shtr: batch front-end for the shifted topological recursion engines.
 *
 *   shtr compute --curve C.json [--chi 3] [--out table.json]
 *   shtr verify  --curve C.json [--chi 3] [--out report.json]
 *   shtr qc      --curve C.json [--order 4] [--out qc.json] [--pretty]
 *   shtr wkb     --curve C.json [--order 4] [--out wkb.json]
 *   shtr all     --curve C.json [--chi 3] [--order 4] [--out DIR]
 *
 * Exit status: 0 all checks pass, 1 a verifier failed, 2 invalid input.
 * With --fixtures HOOK (test builds only) a failure path can be forced:
 *   bypass-shift-check  accept shifts that violate s-consistency
 *   perturb-table       add 1 to the last correlator of the highest chi before verifying
 *   drop-shifts         build the quantum operator / connection without the shifts
 */

#include <shtr/airy.hpp>
#include <shtr/qcurve.hpp>
#include <shtr/tr.hpp>
#include <shtr/wkb.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>

using namespace shtr;
using ojson = nlohmann::ordered_json;

namespace {

struct Options {
        std::string command;
        std::string curve_path;
        int chi = 3;
        int order = 4;
        int modes = 3;
        std::string out;
        bool pretty = false;
        std::string fixtures;
};

/// Error raised by one of the engines, tagged with the stage that raised it.
struct StageError : std::runtime_error {
        std::string stage, kind;
        StageError(std::string st, const Error &e)
                : std::runtime_error(e.what()), stage(std::move(st)), kind(e.kind) {}
};

template <class F>
auto stage(const std::string &name, F &&fn) -> decltype(fn())
{
        try {
                return fn();
        } catch (const Error &e) {
                throw StageError(name, e);
        }
}

bool hook(const Options &o, const std::string &name)
{
        if (o.fixtures.empty())
                return false;
#ifndef SHTR_TEST_HOOKS
        throw Error("invalid-parameter", "--fixtures needs a build with test hooks");
#endif
        return o.fixtures == name;
}

Curve load_curve(const Options &o)
{
        CurveSpec spec = stage("config", [&] { return curve_from_json(nlohmann::json::parse(read_file(o.curve_path))); });
        return stage("curve", [&] {
#ifdef SHTR_TEST_HOOKS
                if (hook(o, "bypass-shift-check"))
                        return Curve::without_shift_check(spec);
#endif
                return Curve(spec);
        });
}

void emit(const Options &o, const std::string &path, const std::string &text)
{
        if (path.empty())
                std::cout << text;
        else
                stage("io", [&] { write_file(path, text); return 0; });
}

std::string dump(const ojson &j) { return j.dump(1) + "\n"; }

void perturb_last(Recursion &R)
{
        auto &T = R.mutable_table();
        for (auto it = T.F.rbegin(); it != T.F.rend(); ++it) {
                const int chi = it->first.first - 2 + it->first.second;
                if (chi != T.chi_max || it->second.empty())
                        continue;
                it->second.rbegin()->second += 1;
                R.invalidate_caches();
                return;
        }
}

/* ---------------------------------------------------------------------- */

struct Outcome {
        bool pass = true;
        ojson doc;
        std::string summary;
};

Outcome run_compute(const Options &o, Recursion &R)
{
        stage("tr", [&] { R.run(o.chi); return 0; });
        Outcome out;
        out.doc = table_to_json(R.table());
        size_t n = 0;
        for (auto &[gn, T] : R.table().F)
                n += T.size();
        out.summary = "compute: " + std::to_string(n) + " correlators through chi = " + std::to_string(o.chi);
        return out;
}

Outcome run_verify(const Options &o, const Curve &curve, Recursion &R)
{
        if (hook(o, "perturb-table"))
                perturb_last(R);
        Report rep;
        stage("tr", [&] {
                rep.merge(R.verify_symmetry_and_identity(o.chi));
                rep.merge(R.verify_loop_equations(o.chi));
                return 0;
        });
        if (!curve.deformed())
                stage("airy", [&] {
                        AiryStructure A(curve);
                        rep.merge(A.verify(R.table(), o.chi + 1, o.modes));
                        return 0;
                });
        Outcome out;
        out.pass = rep.pass();
        out.doc = ojson{{"command", "verify"}, {"chi_max", o.chi}, {"status", out.pass ? "pass" : "fail"}, {"findings", rep.to_json()}};
        out.summary = "verify: " + rep.summary();
        return out;
}

Outcome run_qc(const Options &o, const Curve &curve, Recursion &R)
{
        const int N = o.order;
        if (R.table().chi_max < N - 1)
                stage("tr", [&] { R.run(N - 1); return 0; });
        Outcome out;
        stage("qcurve", [&] {
                Resolvent F = resolvent(curve, R.table(), N);
                DiffOp op;
                if (hook(o, "drop-shifts")) {
                        CurveSpec bare = curve.spec();
                        bare.shifts.clear();
                        op = build_quantum_operator(Curve(bare), N);
                } else {
                        op = build_quantum_operator(curve, N);
                }
                QCResult res = verify_quantum_curve(curve, op, F, N);
                out.pass = res.pass();
                out.doc = ojson{{"command", "qc"},
                                {"order", N},
                                {"operator", op.to_json()},
                                {"pretty", op.pretty()},
                                {"vanishing_order", res.order == QCResult::NEG_INF ? ojson("-inf") : ojson(res.order)},
                                {"status", out.pass ? "pass" : "fail"},
                                {"witness", res.witness}};
                out.summary = "qc: " + op.pretty() + "\nqc: " + (out.pass ? "PASS" : "FAIL") + " vanishing through hbar^" +
                              res.order_str() + (res.witness.empty() ? "" : " (" + res.witness + ")");
                return 0;
        });
        return out;
}

Outcome run_wkb(const Options &o, const Curve &curve, Recursion &R)
{
        const int L = o.order;
        const int l1 = std::min(3, L - 1), l2 = std::min(2, L);
        if (L < 1)
                throw StageError("wkb", Error("invalid-parameter", "wkb needs --order >= 1"));
        const int chi = std::max(l1, l2);
        if (R.table().chi_max < chi)
                stage("tr", [&] { R.run(chi); return 0; });
        Outcome out;
        Report rep;
        ojson diag = nullptr;
        stage("wkb", [&] {
                std::optional<Curve> bare;
                if (hook(o, "drop-shifts")) {
                        CurveSpec b = curve.spec();
                        b.shifts.clear();
                        bare.emplace(b);
                }
                const Curve &conn = bare ? *bare : curve;
                ConnectionData d = build_connection_data(conn, L);
                rep.merge(d.checks);
                FormalGauge g = solve_formal_gauge(d);
                rep.merge(g.checks);
                Amplitudes amp(d, g);
                rep.merge(cross_check(curve, R.table(), amp, l1, l2));
                const int r = curve.r(), s = curve.s();
                if (s <= r - 1 && std::gcd(r, s) == 1) {
                        std::vector<int> shifted;
                        for (auto &[il, v] : curve.spec().shifts)
                                if (v != 0)
                                        shifted.push_back(il.first);
                        DiagnosticRecord rec = determinant_diagnostic(r, s, shifted);
                        diag = rec.to_json();
                        rep.add("diagnostic:constant-term", rec.constant_term == expected_constant_term(r, s, rec.shifted),
                                "D(z,0)", "");
                        rep.add("diagnostic:classification", rec.holomorphic == rec.predicted, "D(z,M) - D(z,0)",
                                "min exponent " + std::to_string(rec.min_exponent));
                }
                return 0;
        });
        out.pass = rep.pass();
        out.doc = ojson{{"command", "wkb"}, {"order", L}, {"status", out.pass ? "pass" : "fail"}, {"diagnostic", diag},
                        {"findings", rep.to_json()}};
        out.summary = "wkb: " + rep.summary();
        return out;
}

int run(const Options &o)
{
        Curve curve = load_curve(o);
        Recursion R(curve);
        const bool quantizable = !curve.deformed() && curve.s() <= curve.r() - 1;
        if (o.command == "compute") {
                Outcome c = run_compute(o, R);
                emit(o, o.out, serialize_table(R.table()));
                std::cerr << c.summary << "\n";
                return 0;
        }
        if (o.command == "verify") {
                run_compute(o, R);
                Outcome v = run_verify(o, curve, R);
                emit(o, o.out, dump(v.doc));
                std::cerr << v.summary << "\n";
                return v.pass ? 0 : 1;
        }
        if (o.command == "qc") {
                Outcome q = run_qc(o, curve, R);
                if (o.pretty)
                        std::cout << q.summary << "\n";
                if (!o.pretty || !o.out.empty())
                        emit(o, o.out, dump(q.doc));
                if (!o.pretty)
                        std::cerr << q.summary << "\n";
                return q.pass ? 0 : 1;
        }
        if (o.command == "wkb") {
                Outcome w = run_wkb(o, curve, R);
                emit(o, o.out, dump(w.doc));
                std::cerr << w.summary << "\n";
                return w.pass ? 0 : 1;
        }
        // all: compute, verify, qc (when defined), wkb (undeformed curves)
        Options oo = o;
        oo.chi = std::max(o.chi, o.order - 1);
        Outcome c = run_compute(oo, R);
        std::vector<std::pair<std::string, Outcome>> docs{{"table.json", c}};
        Outcome v = run_verify(oo, curve, R);
        docs.push_back({"verify.json", v});
        if (quantizable)
                docs.push_back({"qc.json", run_qc(oo, curve, R)});
        if (!curve.deformed())
                docs.push_back({"wkb.json", run_wkb(oo, curve, R)});
        bool pass = true;
        for (auto &[name, out] : docs) {
                pass = pass && out.pass;
                std::cerr << out.summary << "\n";
        }
        if (!o.out.empty()) {
                std::error_code ec;
                std::filesystem::create_directories(o.out, ec);
                if (ec)
                        throw StageError("io", Error("io-error", "cannot create " + o.out));
                for (auto &[name, out] : docs)
                        emit(o, (std::filesystem::path(o.out) / name).string(),
                             name == "table.json" ? serialize_table(R.table()) : dump(out.doc));
        }
        std::cout << (pass ? "PASS" : "FAIL") << "\n";
        return pass ? 0 : 1;
}

} // namespace

int main(int argc, char **argv)
{
        CLI::App app{"Exact shifted topological recursion: correlators, constraints, quantum curves, WKB"};
        app.require_subcommand(1, 1);
        Options o;
        auto common = [&](CLI::App *sc) {
                sc->add_option("--curve", o.curve_path, "curve configuration (JSON)")->required();
                sc->add_option("--chi", o.chi, "maximal 2g-2+n")->check(CLI::Range(0, 12));
                sc->add_option("--order", o.order, "hbar order")->check(CLI::Range(0, 12));
                sc->add_option("--modes", o.modes, "W-constraint mode cutoff K")->check(CLI::Range(0, 12));
                sc->add_option("--out", o.out, "output path (directory for 'all')");
                sc->add_flag("--pretty", o.pretty, "human-readable operator output");
                sc->add_option("--fixtures", o.fixtures, "test hook: bypass-shift-check | perturb-table | drop-shifts")
                        ->check(CLI::IsMember({"bypass-shift-check", "perturb-table", "drop-shifts"}));
        };
        for (auto [name, help] : std::vector<std::pair<const char *, const char *>>{
                     {"compute", "correlator table to chi"},
                     {"verify", "symmetry, loop equations and W-constraints"},
                     {"qc", "quantum curve operator and its verification"},
                     {"wkb", "connection, formal gauge, amplitudes, determinant diagnostic"},
                     {"all", "compute + verify + qc + wkb"}}) {
                CLI::App *sc = app.add_subcommand(name, help);
                common(sc);
                sc->callback([&o, sc] { o.command = sc->get_name(); });
        }
        try {
                app.parse(argc, argv);
        } catch (const CLI::ParseError &e) {
                int rc = app.exit(e);
                return rc == 0 ? 0 : 2;
        }
        try {
                return run(o);
        } catch (const StageError &e) {
                std::cerr << "error [" << e.stage << "] " << e.what() << "\n";
                return 2;
        } catch (const Error &e) {
                std::cerr << "error " << e.what() << "\n";
                return 2;
        } catch (const nlohmann::json::exception &e) {
                std::cerr << "error [config] parse-error: " << e.what() << "\n";
                return 2;
        }
}
