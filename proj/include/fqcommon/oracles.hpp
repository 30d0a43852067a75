#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fqcommon/numeric.hpp"

namespace fqcommon::oracles {

struct CheckLine {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct SuiteResult {
    std::string suite;
    bool pass = true;
    std::vector<CheckLine> lines;

    void add(std::string name, bool ok, std::string detail = "") {
        pass = pass && ok;
        lines.push_back({std::move(name), ok, std::move(detail)});
    }
};

std::vector<std::string> suite_names();

/// Runs one of the brute-force equivalence suites: "counting",
/// "phi-decomposition", "psi-closed-form", "fourier-bounds", "gowers".
SuiteResult run_suite(const std::string& name, std::uint64_t seed = 1);

}  // namespace fqcommon::oracles
