/* -*- C++ -*- */
#pragma once

/*
 * Structured verifier reports: a list of {check, status, location, witness}
 * records, rendered as JSON documents and one-line summaries.
 */

#include <json.hpp>

#include <string>
#include <vector>

namespace shtr {

struct Finding {
        std::string check;
        bool pass = true;
        std::string location;
        std::string witness;
};

struct Report {
        std::vector<Finding> findings;

        void add(std::string check, bool pass, std::string location = "", std::string witness = "")
        {
                findings.push_back({std::move(check), pass, std::move(location), std::move(witness)});
        }

        void merge(const Report &o) { findings.insert(findings.end(), o.findings.begin(), o.findings.end()); }

        bool pass() const
        {
                for (auto &f : findings)
                        if (!f.pass)
                                return false;
                return true;
        }

        size_t failures() const
        {
                size_t n = 0;
                for (auto &f : findings)
                        n += !f.pass;
                return n;
        }

        const Finding *first_failure() const
        {
                for (auto &f : findings)
                        if (!f.pass)
                                return &f;
                return nullptr;
        }

        std::string summary() const
        {
                if (const Finding *f = first_failure())
                        return "FAIL " + f->check + " at " + f->location + (f->witness.empty() ? "" : " (" + f->witness + ")");
                return "PASS (" + std::to_string(findings.size()) + " checks)";
        }

        nlohmann::ordered_json to_json() const
        {
                nlohmann::ordered_json a = nlohmann::ordered_json::array();
                for (auto &f : findings)
                        a.push_back({{"check", f.check},
                                     {"status", f.pass ? "pass" : "fail"},
                                     {"location", f.location},
                                     {"witness", f.witness}});
                return a;
        }
};

} // namespace shtr
