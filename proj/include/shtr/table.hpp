/* -*- C++ -*- */
#pragma once

/*
 * CorrelatorTable: the coefficients F_{g,n}[k_1..k_n] of the stable correlators
 *     omega_{g,n}(z_1..z_n) = sum_{k in N^n} F_{g,n}[k] prod_j xi_{-k_j}(z_j)
 * (sum over ordered tuples), keyed by (2g, n) and stored once per symmetric
 * orbit under the nondecreasing representative of the key.  Serialises to a
 * canonical, byte-stable JSON document.
 */

#include "curve.hpp"

#include <json.hpp>

#include <fstream>
#include <set>

namespace shtr {

using Key = std::vector<int>;
using Tensor = std::map<Key, Rat>;

struct CorrelatorTable {
        CurveSpec curve;
        int chi_max = 0;
        std::map<std::pair<int, int>, Tensor> F; ///< (2g, n) -> sorted key -> value

        bool has(int g2, int n) const { return F.count({g2, n}) != 0; }

        const Tensor &at(int g2, int n) const
        {
                auto it = F.find({g2, n});
                if (it == F.end())
                        throw Error("missing-dependency", "omega_{" + half_str(g2) + "," + std::to_string(n) +
                                                                  "} is not in the table");
                return it->second;
        }

        /// F_{g,n}[keys] for keys in any order.
        Rat get(int g2, int n, Key keys) const
        {
                std::sort(keys.begin(), keys.end());
                const auto &t = at(g2, n);
                auto it = t.find(keys);
                return it == t.end() ? Rat(0) : it->second;
        }

        int max_key(int g2, int n) const
        {
                int m = 0;
                for (auto &[k, v] : at(g2, n))
                        m = std::max(m, k.back());
                return m;
        }

        int max_key() const
        {
                int m = 0;
                for (auto &[gn, t] : F)
                        for (auto &[k, v] : t)
                                m = std::max(m, k.back());
                return m;
        }

        static std::string half_str(int g2) { return g2 % 2 ? std::to_string(g2) + "/2" : std::to_string(g2 / 2); }

        friend bool operator==(const CorrelatorTable &a, const CorrelatorTable &b)
        {
                return a.chi_max == b.chi_max && a.F == b.F;
        }
};

/* ---------------------------------------------------------------------- */
/* Serialisation.                                                          */

inline nlohmann::ordered_json curve_to_json(const CurveSpec &c)
{
        nlohmann::ordered_json j;
        j["r"] = c.r;
        j["s"] = c.s;
        auto map1 = [](const std::map<int, Rat> &m) {
                nlohmann::ordered_json a = nlohmann::ordered_json::array();
                for (auto &[k, v] : m)
                        a.push_back({{"k", k}, {"value", rat_str(v)}});
                return a;
        };
        j["f01"] = map1(c.f01);
        j["f12"] = map1(c.f12);
        nlohmann::ordered_json f02 = nlohmann::ordered_json::array();
        for (auto &[kl, v] : c.f02)
                f02.push_back({{"k", kl.first}, {"l", kl.second}, {"value", rat_str(v)}});
        j["f02"] = f02;
        nlohmann::ordered_json sh = nlohmann::ordered_json::array();
        for (auto &[il, v] : c.shifts)
                if (v != 0)
                        sh.push_back({{"i", il.first}, {"l", il.second}, {"value", rat_str(v)}});
        j["shifts"] = sh;
        return j;
}

inline Rat json_rat(const nlohmann::json &v)
{
        if (v.is_number_integer())
                return Rat(v.get<long>());
        if (v.is_string())
                return parse_rat(v.get<std::string>());
        throw Error("parse-error", "expected a rational given as an integer or a \"p/q\" string");
}

/// Curve document: {r, s, f01, f12, f02, shifts}; maps are arrays of {k[, l], value} / {i, l, value}.
inline CurveSpec curve_from_json(const nlohmann::json &j)
{
        CurveSpec c;
        try {
                c.r = j.at("r").get<int>();
                c.s = j.at("s").get<int>();
                if (j.contains("max_index"))
                        c.max_index = j["max_index"].get<int>();
                if (j.contains("f01"))
                        for (auto &e : j["f01"])
                                c.f01[e.at("k").get<int>()] = json_rat(e.at("value"));
                if (j.contains("f12"))
                        for (auto &e : j["f12"])
                                c.f12[e.at("k").get<int>()] = json_rat(e.at("value"));
                if (j.contains("f02"))
                        for (auto &e : j["f02"])
                                c.f02[{e.at("k").get<int>(), e.at("l").get<int>()}] = json_rat(e.at("value"));
                if (j.contains("shifts"))
                        for (auto &e : j["shifts"])
                                c.shifts[{e.at("i").get<int>(), e.at("l").get<int>()}] = json_rat(e.at("value"));
        } catch (const nlohmann::json::exception &e) {
                throw Error("parse-error", e.what());
        }
        return c;
}

inline nlohmann::ordered_json table_to_json(const CorrelatorTable &t)
{
        nlohmann::ordered_json j;
        nlohmann::ordered_json h = curve_to_json(t.curve);
        h["truncation"] = {{"chi_max", t.chi_max}};
        j["header"] = h;
        // entries ordered by increasing chi, then n, then key
        std::vector<std::pair<int, int>> order;
        for (auto &[gn, _] : t.F)
                order.push_back(gn);
        std::sort(order.begin(), order.end(), [](auto a, auto b) {
                int ca = a.first - 2 + a.second, cb = b.first - 2 + b.second;
                return ca != cb ? ca < cb : a.second < b.second;
        });
        nlohmann::ordered_json es = nlohmann::ordered_json::array();
        for (auto gn : order)
                for (auto &[k, v] : t.F.at(gn))
                        es.push_back({{"two_g", gn.first}, {"n", gn.second}, {"keys", k}, {"value", rat_str(v)}});
        j["entries"] = es;
        return j;
}

inline std::string serialize_table(const CorrelatorTable &t) { return table_to_json(t).dump(1) + "\n"; }

inline CorrelatorTable table_from_json(const nlohmann::json &j)
{
        CorrelatorTable t;
        try {
                t.curve = curve_from_json(j.at("header"));
                t.chi_max = j["header"]["truncation"].at("chi_max").get<int>();
                for (auto &e : j.at("entries")) {
                        Key k = e.at("keys").get<Key>();
                        std::sort(k.begin(), k.end());
                        t.F[{e.at("two_g").get<int>(), e.at("n").get<int>()}][k] = json_rat(e.at("value"));
                }
        } catch (const nlohmann::json::exception &e) {
                throw Error("parse-error", e.what());
        }
        // every (2g, n) in range is present, even if all of its entries vanish
        for (int chi = 1; chi <= t.chi_max; ++chi)
                for (int n = 1; n <= chi + 2; ++n)
                        if (chi + 2 - n >= 0)
                                t.F[{chi + 2 - n, n}];
        return t;
}

inline CorrelatorTable parse_table(const std::string &text) { return table_from_json(nlohmann::json::parse(text)); }

/// First (2g, n, keys) where two tables differ, or empty if identical.
inline std::string table_diff(const CorrelatorTable &a, const CorrelatorTable &b)
{
        std::set<std::pair<int, int>> gns;
        for (auto &[gn, _] : a.F)
                gns.insert(gn);
        for (auto &[gn, _] : b.F)
                gns.insert(gn);
        for (auto gn : gns) {
                std::set<Key> keys;
                if (a.has(gn.first, gn.second))
                        for (auto &[k, _] : a.F.at(gn))
                                keys.insert(k);
                if (b.has(gn.first, gn.second))
                        for (auto &[k, _] : b.F.at(gn))
                                keys.insert(k);
                if (a.has(gn.first, gn.second) != b.has(gn.first, gn.second))
                        return "(2g,n) = (" + std::to_string(gn.first) + "," + std::to_string(gn.second) +
                               ") present in only one table";
                for (auto &k : keys) {
                        Rat va = a.get(gn.first, gn.second, k), vb = b.get(gn.first, gn.second, k);
                        if (va != vb) {
                                std::string ks;
                                for (int x : k)
                                        ks += (ks.empty() ? "" : ",") + std::to_string(x);
                                return "(2g,n) = (" + std::to_string(gn.first) + "," + std::to_string(gn.second) +
                                       ") keys [" + ks + "]: " + rat_str(va) + " vs " + rat_str(vb);
                        }
                }
        }
        return "";
}

inline std::string read_file(const std::string &path)
{
        std::ifstream in(path);
        if (!in)
                throw Error("io-error", "cannot read " + path);
        std::ostringstream os;
        os << in.rdbuf();
        return os.str();
}

inline void write_file(const std::string &path, const std::string &text)
{
        std::ofstream out(path);
        if (!out)
                throw Error("io-error", "cannot write " + path);
        out << text;
}

} // namespace shtr
