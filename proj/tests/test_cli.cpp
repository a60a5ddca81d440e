// End-to-end tests of the command-line front-end: exit codes, output and determinism.

#include <json.hpp>

#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;

struct RunResult {
        int code = -1;
        std::string out, err;
};

static std::string slurp(const fs::path &p)
{
        std::ifstream in(p, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
}

static fs::path scratch_dir()
{
        static fs::path dir = [] {
                fs::path d = fs::temp_directory_path() / ("shtr_cli_test_" + std::to_string(::getpid()));
                fs::create_directories(d);
                return d;
        }();
        return dir;
}

static RunResult run(const std::string &args)
{
        const fs::path out = scratch_dir() / "stdout.txt", err = scratch_dir() / "stderr.txt";
        const std::string cmd = std::string("'") + SHTR_CLI_PATH + "' " + args + " >'" + out.string() + "' 2>'" + err.string() + "'";
        const int st = std::system(cmd.c_str());
        RunResult r;
        r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
        r.out = slurp(out);
        r.err = slurp(err);
        return r;
}

static std::string curve(const std::string &name) { return std::string("'") + SHTR_CURVE_DIR + "/" + name + "'"; }

static bool contains(const std::string &hay, const std::string &needle) { return hay.find(needle) != std::string::npos; }

TEST_CASE("cli: quantum curve of the documented sample", "[cli]")
{
        RunResult r = run("qc --curve " + curve("r3s2_m1.cfg") + " --order 4 --pretty");
        INFO(r.out << r.err);
        CHECK(r.code == 0);
        CHECK(contains(r.out, "ℏ³ d²/dx² x d/dx − 1"));
        CHECK(contains(r.out, "PASS"));
}

TEST_CASE("cli: commands succeed on valid curves", "[cli]")
{
        for (const std::string cmd : {"compute", "verify", "wkb"}) {
                RunResult r = run(cmd + " --curve " + curve("airy23.cfg") + " --chi 2 --order 3");
                INFO(cmd << ": " << r.err);
                CHECK(r.code == 0);
        }
        RunResult q = run("qc --curve " + curve("r3s1_shifted.cfg") + " --order 3");
        CHECK(q.code == 0);
        auto doc = nlohmann::json::parse(q.out);
        CHECK(doc["status"] == "pass");
        CHECK(doc["vanishing_order"] == 3);
}

TEST_CASE("cli: invalid input exits with 2 and names the failing module", "[cli]")
{
        RunResult forced = run("verify --curve " + curve("r53_forced.cfg"));
        CHECK(forced.code == 2);
        CHECK(contains(forced.err, "[curve] inconsistent-shifts"));

        RunResult inad = run("compute --curve " + curve("r75_inadmissible.cfg"));
        CHECK(inad.code == 2);
        CHECK(contains(inad.err, "[curve] inadmissible-(r,s)"));

        RunResult missing = run("compute --curve /nonexistent/curve.cfg");
        CHECK(missing.code == 2);
        CHECK(contains(missing.err, "[config] io-error"));

        const fs::path bad = scratch_dir() / "bad.cfg";
        std::ofstream(bad) << "{\"r\": 3,";
        RunResult parse = run("compute --curve '" + bad.string() + "'");
        CHECK(parse.code == 2);
        CHECK(contains(parse.err, "parse-error"));

        CHECK(run("compute").code == 2);
        CHECK(run("compute --curve " + curve("airy23.cfg") + " --chi 99").code == 2);
        CHECK(run("frobnicate --curve " + curve("airy23.cfg")).code == 2);
        CHECK(run("qc --curve " + curve("airy23.cfg")).code == 2);
}

TEST_CASE("cli: verification failures exit with 1", "[cli]")
{
        RunResult bypass = run("verify --curve " + curve("r53_forced.cfg") + " --fixtures bypass-shift-check --chi 1");
        CHECK(bypass.code == 1);
        CHECK(contains(bypass.err + bypass.out, "FAIL symmetry"));

        RunResult perturbed = run("verify --curve " + curve("airy23.cfg") + " --fixtures perturb-table --chi 2");
        CHECK(perturbed.code == 1);

        RunResult dropped = run("qc --curve " + curve("r3s2_shifted.cfg") + " --fixtures drop-shifts --order 3");
        CHECK(dropped.code == 1);
        RunResult wkb = run("wkb --curve " + curve("r3s1_shifted.cfg") + " --fixtures drop-shifts --order 3");
        CHECK(wkb.code == 1);
}

TEST_CASE("cli: the all command is deterministic", "[cli]")
{
        const fs::path a = scratch_dir() / "all_a", b = scratch_dir() / "all_b";
        for (const fs::path &d : {a, b}) {
                fs::remove_all(d);
                RunResult r = run("all --curve " + curve("r3s1_shifted.cfg") + " --chi 2 --order 3 --out '" + d.string() + "'");
                INFO(r.err);
                REQUIRE(r.code == 0);
        }
        int files = 0;
        for (auto &e : fs::directory_iterator(a)) {
                ++files;
                const fs::path other = b / e.path().filename();
                REQUIRE(fs::exists(other));
                CHECK(slurp(e.path()) == slurp(other));
        }
        CHECK(files == 4);
}
