#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "fqcommon/gf.hpp"
#include "fqcommon/linsys.hpp"
#include "fqcommon/numeric.hpp"

namespace fqcommon::density {

/// Exact-rational-valued function f: F_q^d -> Q, stored over the
/// lexicographic domain order (first coordinate most significant).
class FunctionTable {
public:
    FunctionTable(gf::Field field, int d, std::vector<Rat> values);
    static FunctionTable constant(const gf::Field& field, int d, const Rat& c);
    static FunctionTable zero(const gf::Field& field, int d) { return constant(field, d, Rat(0)); }

    const gf::Field& field() const { return field_; }
    int d() const { return d_; }
    std::size_t size() const { return values_.size(); }
    const std::vector<Rat>& values() const { return values_; }
    const Rat& operator[](std::size_t i) const { return values_[i]; }

    std::size_t index_of(std::span<const gf::elem> point) const;
    const Rat& at(std::span<const gf::elem> point) const { return values_[index_of(point)]; }

    Rat sum() const;
    Rat mean() const;
    bool balanced() const { return balanced_; }
    const Rat& max_abs() const { return max_abs_; }

    FunctionTable scaled(const Rat& c) const;
    FunctionTable shifted(const Rat& c) const;  // f + c
    FunctionTable negated() const;

    /// JSON: {"q": <p^kappa>, "modulus": [c0..ck]?, "d": d, "values": ["num/den", ...]}
    nlohmann::json to_json() const;
    static FunctionTable from_json(const nlohmann::json& j);

private:
    gf::Field field_;
    int d_;
    std::vector<Rat> values_;
    Rat max_abs_;
    bool balanced_;
};

FunctionTable load_function_file(const std::string& path);

/// 2^{1-k}: the commonness benchmark for an irredundant k-variable system.
Rat benchmark(int k);

/// Exact average of prod_i f(x_i) over sol(L; F_q^d), d = f.d().
Rat lambda(const linsys::LinearSystem& L, const FunctionTable& f, const Budget& budget = {});

/// Exact average of prod_{i in B} f(x_i) over sol(L; F_q^d). B is 0-based.
Rat phi(const linsys::LinearSystem& L, const std::vector<int>& B, const FunctionTable& f,
        const Budget& budget = {});

/// Phi_L(B, f) for every B subset of [k] in one solution-space pass; entry
/// `mask` holds the subset with bit j <-> variable j. Requires k <= 20.
std::vector<Rat> phi_all_subsets(const linsys::LinearSystem& L, const FunctionTable& f,
                                 const Budget& budget = {});

/// Lambda_L(1/2 + f) + Lambda_L(1/2 - f).
Rat delta(const linsys::LinearSystem& L, const FunctionTable& f, const Budget& budget = {});

struct WitnessVerdict {
    bool certified = false;
    Rat delta_value;
    Rat benchmark_value;
};

/// Certified-uncommon iff Delta_L(f) < 2^{1-k} as exact rationals. Requires
/// an irredundant system and max|f| <= 1/2.
WitnessVerdict commonness_witness_check(const linsys::LinearSystem& L, const FunctionTable& f,
                                        const Budget& budget = {});

}  // namespace fqcommon::density
