#include "fqcommon/density.hpp"

#include <algorithm>
#include <bit>
#include <fstream>

namespace fqcommon::density {

using gf::elem;
using linsys::LinearSystem;

FunctionTable::FunctionTable(gf::Field field, int d, std::vector<Rat> values)
    : field_(std::move(field)), d_(d), values_(std::move(values)) {
    if (d_ < 1) throw usage_error("function table needs domain dimension >= 1");
    Int expect = pow_int(Int(field_.q()), d_);
    if (expect > Int(1) << 28) throw usage_error("function table too large");
    if (Int(values_.size()) != expect) {
        throw usage_error("function table needs q^d = " + expect.str() + " values, got " +
                          std::to_string(values_.size()));
    }
    Rat s = 0, m = 0;
    for (const Rat& v : values_) {
        s += v;
        Rat a = rat_abs(v);
        if (a > m) m = a;
    }
    balanced_ = (s == 0);
    max_abs_ = m;
}

FunctionTable FunctionTable::constant(const gf::Field& field, int d, const Rat& c) {
    Int n = pow_int(Int(field.q()), d);
    return FunctionTable(field, d, std::vector<Rat>(n.convert_to<std::size_t>(), c));
}

std::size_t FunctionTable::index_of(std::span<const elem> point) const {
    if (static_cast<int>(point.size()) != d_) throw usage_error("point dimension mismatch");
    std::size_t idx = 0;
    for (int t = 0; t < d_; ++t) {
        idx = idx * static_cast<std::size_t>(field_.q()) + static_cast<std::size_t>(point[t]);
    }
    return idx;
}

Rat FunctionTable::sum() const {
    Rat s = 0;
    for (const Rat& v : values_) s += v;
    return s;
}

Rat FunctionTable::mean() const { return sum() / Rat(values_.size()); }

FunctionTable FunctionTable::scaled(const Rat& c) const {
    std::vector<Rat> v = values_;
    for (Rat& x : v) x *= c;
    return FunctionTable(field_, d_, std::move(v));
}

FunctionTable FunctionTable::shifted(const Rat& c) const {
    std::vector<Rat> v = values_;
    for (Rat& x : v) x += c;
    return FunctionTable(field_, d_, std::move(v));
}

FunctionTable FunctionTable::negated() const {
    std::vector<Rat> v = values_;
    for (Rat& x : v) x = -x;
    return FunctionTable(field_, d_, std::move(v));
}

nlohmann::json FunctionTable::to_json() const {
    nlohmann::json j;
    j["q"] = field_.q();
    if (field_.kappa() > 1) j["modulus"] = field_.modulus();
    j["d"] = d_;
    std::vector<std::string> vals;
    vals.reserve(values_.size());
    for (const Rat& v : values_) vals.push_back(rat_str(v));
    j["values"] = vals;
    return j;
}

namespace {
gf::Field field_from_q(std::int64_t q, const std::vector<elem>* modulus) {
    std::int64_t p = 0;
    for (std::int64_t d = 2; d * d <= q; ++d) {
        if (q % d == 0) {
            p = d;
            break;
        }
    }
    if (p == 0) p = q;  // q prime
    int kappa = 0;
    std::int64_t t = q;
    while (t > 1) {
        if (t % p != 0) throw usage_error("q = " + std::to_string(q) + " is not a prime power");
        t /= p;
        ++kappa;
    }
    if (modulus != nullptr && !modulus->empty()) return gf::Field::make(p, kappa, *modulus);
    return gf::Field::make(p, kappa);
}
}  // namespace

FunctionTable FunctionTable::from_json(const nlohmann::json& j) {
    try {
        std::int64_t q = j.at("q").get<std::int64_t>();
        std::vector<elem> modulus;
        if (j.contains("modulus")) modulus = j.at("modulus").get<std::vector<elem>>();
        gf::Field field = field_from_q(q, &modulus);
        int d = j.at("d").get<int>();
        std::vector<Rat> values;
        for (const auto& v : j.at("values")) values.push_back(parse_rat(v.get<std::string>()));
        return FunctionTable(std::move(field), d, std::move(values));
    } catch (const nlohmann::json::exception& e) {
        throw usage_error(std::string("malformed function table JSON: ") + e.what());
    }
}

FunctionTable load_function_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw usage_error("cannot open function file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(e.what(), 0);
    }
    return FunctionTable::from_json(j);
}

Rat benchmark(int k) { return pow_rat(Rat(1, 2), k - 1); }

namespace {

void check_compatible(const LinearSystem& L, const FunctionTable& f) {
    if (L.field() != f.field()) throw usage_error("system and function table use different fields");
}

// Shared enumeration core: runs fn once per solution with the table index
// of every variable's value.
void for_each_solution_indices(const LinearSystem& L, const FunctionTable& f, const Budget& budget,
                               const std::function<void(std::span<const std::size_t>)>& fn) {
    const int d = f.d();
    const auto& F = L.field();
    budget.require(L.solution_count(d), "density enumeration");
    std::vector<std::size_t> idx(L.k());
    std::vector<std::size_t> qpow(d);
    qpow[d - 1] = 1;
    for (int t = d - 2; t >= 0; --t) qpow[t] = qpow[t + 1] * static_cast<std::size_t>(F.q());
    L.for_each_solution(d, budget, [&](const std::vector<std::vector<elem>>& x) {
        for (int i = 0; i < L.k(); ++i) {
            std::size_t v = 0;
            for (int t = 0; t < d; ++t) v += qpow[t] * static_cast<std::size_t>(x[i][t]);
            idx[i] = v;
        }
        fn(idx);
    });
}

}  // namespace

Rat lambda(const LinearSystem& L, const FunctionTable& f, const Budget& budget) {
    check_compatible(L, f);
    Rat total = 0;
    for_each_solution_indices(L, f, budget, [&](std::span<const std::size_t> idx) {
        Rat prod = f[idx[0]];
        for (int i = 1; i < L.k() && prod != 0; ++i) prod *= f[idx[i]];
        total += prod;
    });
    return total / Rat(L.solution_count(f.d()));
}

Rat phi(const LinearSystem& L, const std::vector<int>& B, const FunctionTable& f,
        const Budget& budget) {
    check_compatible(L, f);
    for (int b : B) {
        if (b < 0 || b >= L.k()) throw usage_error("phi: variable index out of range");
    }
    Rat total = 0;
    for_each_solution_indices(L, f, budget, [&](std::span<const std::size_t> idx) {
        Rat prod = 1;
        for (int b : B) {
            prod *= f[idx[b]];
            if (prod == 0) break;
        }
        total += prod;
    });
    return total / Rat(L.solution_count(f.d()));
}

std::vector<Rat> phi_all_subsets(const LinearSystem& L, const FunctionTable& f,
                                 const Budget& budget) {
    check_compatible(L, f);
    if (L.k() > 20) throw usage_error("phi_all_subsets: k too large");
    const std::size_t nsub = std::size_t(1) << L.k();
    std::vector<Rat> sums(nsub, Rat(0));
    std::vector<Rat> prod(nsub);
    prod[0] = 1;
    for_each_solution_indices(L, f, budget, [&](std::span<const std::size_t> idx) {
        for (std::size_t mask = 1; mask < nsub; ++mask) {
            const int low = std::countr_zero(mask);
            prod[mask] = prod[mask & (mask - 1)] * f[idx[low]];
        }
        for (std::size_t mask = 1; mask < nsub; ++mask) sums[mask] += prod[mask];
    });
    Rat total = Rat(L.solution_count(f.d()));
    for (std::size_t mask = 1; mask < nsub; ++mask) sums[mask] /= total;
    sums[0] = 1;
    return sums;
}

Rat delta(const LinearSystem& L, const FunctionTable& f, const Budget& budget) {
    Rat half(1, 2);
    return lambda(L, f.shifted(half), budget) + lambda(L, f.negated().shifted(half), budget);
}

WitnessVerdict commonness_witness_check(const LinearSystem& L, const FunctionTable& f,
                                        const Budget& budget) {
    check_compatible(L, f);
    auto rw = linsys::redundancy(L, budget);
    if (rw.redundant) {
        throw usage_error("redundant system: the 2^{1-k} benchmark does not apply (induces x" +
                          std::to_string(rw.i + 1) + " - x" + std::to_string(rw.j + 1) + " = 0)");
    }
    if (f.max_abs() > Rat(1, 2)) {
        throw usage_error("witness function must map into [-1/2, 1/2]");
    }
    WitnessVerdict v;
    v.delta_value = delta(L, f, budget);
    v.benchmark_value = benchmark(L.k());
    v.certified = v.delta_value < v.benchmark_value;
    return v;
}

}  // namespace fqcommon::density
