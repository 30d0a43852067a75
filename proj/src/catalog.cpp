#include "fqcommon/catalog.hpp"

#include "fqcommon/errors.hpp"

namespace fqcommon::catalog {

using linsys::LinearSystem;

namespace {

std::vector<Entry> build() {
    gf::Field f3 = gf::Field::prime(3);
    gf::Field f5 = gf::Field::prime(5);
    gf::Field f7 = gf::Field::prime(7);
    std::vector<Entry> out;
    auto add = [&](std::string name, std::string desc, const gf::Field& F, linsys::Matrix rows) {
        out.push_back({std::move(name), std::move(desc), LinearSystem::from_rows(F, rows)});
    };
    add("ap4_f5", "arithmetic progression of length four over F_5", f5,
        {{1, 3, 1, 0}, {0, 1, 3, 1}});
    add("ap4_f7", "arithmetic progression of length four over F_7", f7,
        {{1, 5, 1, 0}, {0, 1, 5, 1}});
    add("schur_f5", "Schur triple x + y - z = 0 over F_5", f5, {{1, 1, 4}});
    add("schur_f3", "Schur triple x + y - z = 0 over F_3", f3, {{1, 1, 2}});
    add("ones3_f3", "x1 + x2 + x3 = 0 over F_3 (odd length, common)", f3, {{1, 1, 1}});
    add("paired_f5", "x1 - x2 + x3 - x4 = 0 over F_5 (paired coefficients, common)", f5,
        {{1, 4, 1, 4}});
    add("pairs22_f5", "x1 + x2 - x3 - x4 = 0 over F_5 (paired coefficients, common)", f5,
        {{1, 1, 4, 4}});
    add("allones4_f5", "x1 + x2 + x3 + x4 = 0 over F_5 (uncommon equation)", f5, {{1, 1, 1, 1}});
    add("twopar_f3", "two disjoint short equations over F_3, s = 2", f3,
        {{1, 1, 0, 0}, {0, 0, 1, 1}});
    add("twopar_f5", "two disjoint short equations over F_5, s = 2", f5,
        {{1, 1, 0, 0}, {0, 0, 1, 2}});
    add("sys2x5_s2_f5", "(2x5)-system with s = 2 via x1 - x2 (redundant)", f5,
        {{1, 4, 0, 0, 0}, {0, 1, 1, 1, 1}});
    add("irr2x5_f5", "irredundant (2x5)-system with s = 2", f5,
        {{1, 1, 0, 0, 0}, {0, 0, 1, 1, 1}});
    add("x1zero_3x5_f5", "(3x5)-system inducing x1 = 0, s = 1", f5,
        {{1, 0, 0, 0, 0}, {0, 1, 1, 1, 0}, {0, 1, 2, 0, 1}});
    add("x1zero_3x5_f3", "(3x5)-system inducing x1 = 0 over F_3", f3,
        {{1, 0, 0, 0, 0}, {0, 1, 1, 1, 0}, {0, 1, 2, 0, 1}});
    add("identity3_f3", "(3x3) identity system (only the zero solution)", f3,
        {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
    add("single12_f3", "x1 + 2 x2 = 0 padded to four variables", f3, {{1, 2, 0, 0}});
    add("x1x2_f3", "x1 + x2 = 0 over F_3", f3, {{1, 1}});
    add("ap5_f5", "arithmetic progression of length five over F_5 (induces the 4-AP), s = 3", f5,
        {{1, 3, 1, 0, 0}, {0, 1, 3, 1, 0}, {0, 0, 1, 3, 1}});
    return out;
}

}  // namespace

const std::vector<Entry>& systems() {
    static const std::vector<Entry> entries = build();
    return entries;
}

const linsys::LinearSystem& get(std::string_view name) {
    for (const auto& e : systems()) {
        if (e.name == name) return e.system;
    }
    throw usage_error("unknown catalog system: '" + std::string(name) + "'");
}

std::vector<std::string> names() {
    std::vector<std::string> out;
    for (const auto& e : systems()) out.push_back(e.name);
    return out;
}

}  // namespace fqcommon::catalog
