#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fqcommon/linsys.hpp"
#include "fqcommon/numeric.hpp"

namespace fqcommon::analysis {

/// Structural report: canonical form, rank, redundancy, s/c, critical sets,
/// and the cheap classification facts. Deterministic (no timings in JSON).
struct AnalysisReport {
    linsys::LinearSystem system;
    int rank = 0;
    bool irredundant = false;
    std::optional<std::pair<int, int>> redundancy_witness;  // 0-based
    int s = 0;
    int c = 0;
    std::vector<linsys::CriticalSetRecord> critical;
    bool critical_computed = false;  // false when m < 2
    std::string classification;
    Int budget_limit;
    Int row_space_evals;   // q^m - 1
    Int subset_candidates; // binomial(k, c)
    double wall_ms = 0;    // human summary only

    nlohmann::json to_json() const;
    std::string human() const;
};

AnalysisReport analyze(const linsys::LinearSystem& L, const Budget& budget = {});

}  // namespace fqcommon::analysis
