#include "fqcommon/analysis.hpp"

#include <chrono>
#include <sstream>

#include "fqcommon/certify.hpp"

namespace fqcommon::analysis {

AnalysisReport analyze(const linsys::LinearSystem& L, const Budget& budget) {
    auto start = std::chrono::steady_clock::now();
    AnalysisReport rep{L};
    rep.rank = L.m();
    auto rw = linsys::redundancy(L, budget);
    rep.irredundant = !rw.redundant;
    if (rw.redundant) rep.redundancy_witness = {rw.i, rw.j};
    rep.s = linsys::s_of(L, budget);
    rep.c = rep.s % 2 == 0 ? rep.s : rep.s + 1;
    if (L.m() >= 2) {
        rep.critical = linsys::critical_sets(L, budget);
        rep.critical_computed = true;
    }
    rep.budget_limit = budget.max_evals;
    rep.row_space_evals = pow_int(Int(L.field().q()), L.m()) - 1;
    rep.subset_candidates = binomial(L.k(), rep.c);

    if (L.m() == L.k()) {
        rep.classification = "common (m = k: only the zero solution)";
    } else if (rw.redundant) {
        rep.classification = "redundant (reduce before classification)";
    } else if (L.m() == 1) {
        const auto& row = L.rows()[0];
        bool has_zero = false;
        for (auto a : row) has_zero |= (a == 0);
        if (has_zero) {
            rep.classification = "undetermined (single equation with unused variables)";
        } else {
            rep.classification = certify::classify_single_equation_common(L.field(), row)
                                     ? "common (single-equation classifier)"
                                     : "uncommon (single-equation classifier)";
        }
    } else {
        rep.classification = "undetermined (run certify)";
    }
    rep.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                      .count();
    return rep;
}

nlohmann::json AnalysisReport::to_json() const {
    nlohmann::json j;
    j["field"] = system.field().config_string();
    j["m"] = system.m();
    j["k"] = system.k();
    j["rows"] = system.rows();
    j["rank"] = rank;
    j["irredundant"] = irredundant;
    if (redundancy_witness) {
        j["redundancy_witness"] = {redundancy_witness->first + 1, redundancy_witness->second + 1};
    } else {
        j["redundancy_witness"] = nullptr;
    }
    j["s"] = s;
    j["c"] = c;
    if (critical_computed) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& rec : critical) {
            nlohmann::json r;
            std::vector<int> b1;
            for (int b : rec.B) b1.push_back(b + 1);
            r["B"] = b1;
            r["m_B"] = rec.m_B;
            r["rows"] = rec.L_B.rows();
            arr.push_back(std::move(r));
        }
        j["critical_sets"] = std::move(arr);
    } else {
        j["critical_sets"] = nullptr;
        j["critical_sets_note"] = "not computed: requires m >= 2";
    }
    j["classification"] = classification;
    j["budget"] = {{"max_evals", budget_limit.str()},
                   {"row_space_evals", row_space_evals.str()},
                   {"subset_candidates", subset_candidates.str()}};
    return j;
}

std::string AnalysisReport::human() const {
    std::ostringstream out;
    out << "system: " << system.field().config_string() << ", m=" << system.m()
        << ", k=" << system.k() << "\n";
    out << "canonical rows:\n";
    for (const auto& row : system.rows()) {
        out << " ";
        for (auto a : row) out << " " << a;
        out << "\n";
    }
    out << "rank: " << rank << "\n";
    out << "irredundant: " << (irredundant ? "yes" : "no");
    if (redundancy_witness) {
        out << "  (x" << redundancy_witness->first + 1 << " - x" << redundancy_witness->second + 1
            << " = 0 induced)";
    }
    out << "\n";
    out << "s(L) = " << s << ", c(L) = " << c << "\n";
    if (critical_computed) {
        out << "critical sets (" << critical.size() << "):\n";
        for (const auto& rec : critical) {
            out << "  B = {";
            for (size_t i = 0; i < rec.B.size(); ++i) out << (i ? "," : "") << rec.B[i] + 1;
            out << "}, m_B = " << rec.m_B << "\n";
        }
    } else {
        out << "critical sets: not computed (m < 2)\n";
    }
    out << "classification: " << classification << "\n";
    out << "elapsed: " << wall_ms << " ms\n";
    return out.str();
}

}  // namespace fqcommon::analysis
