#pragma once

// Helpers shared by the unit suites: loading oracle fixtures and building sample curves.

#include <shtr/tr.hpp>

#include <string>

namespace fixtures {

struct OracleCase {
        shtr::CurveSpec curve;
        int chi = 0;
        std::map<std::pair<int, int>, shtr::Tensor> F;
};

inline OracleCase load_oracle(const std::string &name)
{
        auto j = nlohmann::json::parse(shtr::read_file(std::string(SHTR_FIXTURE_DIR) + "/oracle_" + name + ".json"));
        OracleCase c;
        c.curve.r = j["r"].get<int>();
        c.curve.s = j["s"].get<int>();
        for (auto &e : j["shifts"])
                c.curve.shifts[{e["i"].get<int>(), e["l"].get<int>()}] = shtr::json_rat(e["value"]);
        c.chi = j["chi"].get<int>();
        for (int chi = 1; chi <= c.chi; ++chi)
                for (int n = 1; n <= chi + 2; ++n)
                        if (chi + 2 - n >= 0)
                                c.F[{chi + 2 - n, n}];
        for (auto &e : j["entries"])
                c.F[{e["two_g"].get<int>(), e["n"].get<int>()}][e["keys"].get<shtr::Key>()] = shtr::json_rat(e["value"]);
        return c;
}

inline shtr::CurveSpec spec(int r, int s, std::map<std::pair<int, int>, shtr::Rat> shifts = {})
{
        shtr::CurveSpec c;
        c.r = r;
        c.s = s;
        c.shifts = std::move(shifts);
        return c;
}

} // namespace fixtures
