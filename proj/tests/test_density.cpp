#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "fqcommon/catalog.hpp"
#include "fqcommon/certify.hpp"
#include "fqcommon/density.hpp"

using namespace fqcommon;
using density::FunctionTable;
using gf::elem;
using gf::Field;
using linsys::LinearSystem;

namespace {

// Independent oracle for the 4-AP over F_5: walk (a, b) directly, no
// row-reduction machinery involved.
Rat ap4_lambda_oracle(const FunctionTable& f) {
    const int d = f.d();
    const std::size_t size = f.size();
    REQUIRE(f.field().q() == 5);
    std::vector<elem> a(d), b(d), x(d);
    Rat total = 0;
    for (std::size_t ai = 0; ai < size; ++ai) {
        for (std::size_t bi = 0; bi < size; ++bi) {
            std::size_t tmp = ai;
            for (int t = d - 1; t >= 0; --t) {
                a[t] = tmp % 5;
                tmp /= 5;
            }
            tmp = bi;
            for (int t = d - 1; t >= 0; --t) {
                b[t] = tmp % 5;
                tmp /= 5;
            }
            Rat prod = 1;
            for (int i = 0; i < 4 && prod != 0; ++i) {
                std::size_t idx = 0;
                for (int t = 0; t < d; ++t) {
                    x[t] = (a[t] + i * b[t]) % 5;
                    idx = idx * 5 + x[t];
                }
                prod *= f[idx];
            }
            total += prod;
        }
    }
    return total / Rat(size * size);
}

FunctionTable random_balanced(const Field& F, int d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const std::size_t n = pow_int(Int(F.q()), d).convert_to<std::size_t>();
    std::vector<Rat> vals(n);
    for (auto& v : vals) v = Rat(Int(rng() % 65) - 32, 64);
    Rat mean = 0;
    for (const auto& v : vals) mean += v;
    mean /= Rat(n);
    Rat maxabs = 0;
    for (auto& v : vals) {
        v -= mean;
        if (rat_abs(v) > maxabs) maxabs = rat_abs(v);
    }
    if (maxabs > Rat(1, 2)) {
        for (auto& v : vals) v *= Rat(1, 2) / maxabs;
    }
    return FunctionTable(F, d, std::move(vals));
}

}  // namespace

TEST_CASE("function table basics") {
    Field f5 = Field::prime(5);
    FunctionTable f(f5, 1, {Rat(-1), Rat(1, 4), Rat(1, 4), Rat(1, 4), Rat(1, 4)});
    CHECK(f.balanced());
    CHECK(f.max_abs() == 1);
    CHECK(f.sum() == 0);
    std::vector<elem> pt{3};
    CHECK(f.at(pt) == Rat(1, 4));

    FunctionTable g(f5, 2, std::vector<Rat>(25, Rat(1, 3)));
    std::vector<elem> p2{1, 2};
    CHECK(g.index_of(p2) == 7);  // first coordinate most significant

    CHECK_THROWS_AS(FunctionTable(f5, 1, std::vector<Rat>(4, Rat(0))), usage_error);
}

TEST_CASE("function table json round-trip") {
    Field f9 = Field::make(3, 2);
    FunctionTable f(f9, 1, std::vector<Rat>(9, Rat(1, 7)));
    auto j = f.to_json();
    auto g = FunctionTable::from_json(j);
    CHECK(g.field() == f9);
    CHECK(g.values() == f.values());
    CHECK(j.contains("modulus"));

    Field f5 = Field::prime(5);
    auto j2 = FunctionTable(f5, 1, std::vector<Rat>(5, Rat(0))).to_json();
    CHECK_FALSE(j2.contains("modulus"));
    CHECK_THROWS_AS(FunctionTable::from_json(nlohmann::json{{"q", 6}, {"d", 1}}), usage_error);
}

TEST_CASE("lambda on constants, zero, and psi") {
    auto L = catalog::get("ap4_f5");
    Field f5 = Field::prime(5);
    CHECK(density::lambda(L, FunctionTable::constant(f5, 1, Rat(1, 3))) == pow_rat(Rat(1, 3), 4));
    CHECK(density::lambda(L, FunctionTable::zero(f5, 1)) == 0);

    // the psi table at q=5, d=1, alpha=1/4 against the independent AP oracle
    auto psi = certify::psi_table(certify::PsiSpec(f5, 1, Rat(1, 4)));
    CHECK(psi.values() ==
          std::vector<Rat>{Rat(-1), Rat(1, 4), Rat(1, 4), Rat(1, 4), Rat(1, 4)});
    CHECK(ap4_lambda_oracle(psi) == Rat(1, 32));
    CHECK(density::lambda(L, psi) == Rat(1, 32));

    // frozen d=2 witness: independent oracle agrees with the library
    auto wit = density::load_function_file(FQCOMMON_DATA_DIR "/witness_ap4_f5_d2.json");
    CHECK(wit.balanced());
    CHECK(ap4_lambda_oracle(wit) == Rat(-7, 5000));
    CHECK(density::lambda(L, wit) == Rat(-7, 5000));
}

TEST_CASE("phi on the empty set, full set, and critical sets") {
    auto L = catalog::get("ap4_f5");
    Field f5 = Field::prime(5);
    auto f = random_balanced(f5, 1, 11);
    CHECK(density::phi(L, {}, f) == 1);
    CHECK(density::phi(L, {0, 1, 2, 3}, f) == density::lambda(L, f));
    // non-rank-reducing B vanishes for balanced f
    CHECK_FALSE(linsys::is_rank_reducing(L, {0}));
    CHECK(density::phi(L, {0}, f) == 0);
    CHECK(density::phi(L, {0, 1}, f) == 0);
    // critical B agrees with the induced system
    auto records = linsys::critical_sets(L);
    for (const auto& rec : records) {
        CHECK(density::phi(L, rec.B, f) == density::lambda(rec.L_B, f));
    }
}

TEST_CASE("delta identities") {
    auto L = catalog::get("ap4_f5");
    Field f5 = Field::prime(5);
    CHECK(density::delta(L, FunctionTable::zero(f5, 1)) == density::benchmark(4));

    // the even-subset decomposition of Delta, both sides computed independently
    Field f3 = Field::prime(3);
    auto L3 = catalog::get("twopar_f3");
    for (std::uint64_t seed : {1, 2, 3}) {
        auto f = random_balanced(f3, 1, seed);
        Rat lhs = density::delta(L3, f);
        auto phis = density::phi_all_subsets(L3, f);
        Rat rhs = 0;
        for (std::size_t mask = 0; mask < phis.size(); ++mask) {
            int bits = 0;
            for (std::size_t m = mask; m; m >>= 1) bits += m & 1;
            if (bits % 2 == 0) rhs += pow_rat(Rat(1, 2), L3.k() - bits) * phis[mask];
        }
        CHECK(lhs == 2 * rhs);
    }

    // critical system: Delta = 2^{1-k} + 2 Lambda for balanced f
    auto wit = density::load_function_file(FQCOMMON_DATA_DIR "/witness_ap4_f5_d2.json");
    Rat dv = density::delta(L, wit);
    CHECK(dv == density::benchmark(4) + 2 * Rat(-7, 5000));
    CHECK(dv == Rat(611, 5000));
}

TEST_CASE("lambda scaling and permutation invariance") {
    auto L = catalog::get("ap4_f5");
    Field f5 = Field::prime(5);
    auto f = random_balanced(f5, 1, 5);
    Rat base = density::lambda(L, f);
    CHECK(density::lambda(L, f.scaled(Rat(2, 7))) == pow_rat(Rat(2, 7), 4) * base);
    auto P = linsys::permuted(L, {2, 0, 3, 1});
    CHECK(density::lambda(P, f) == base);
}

TEST_CASE("commonness witness check") {
    auto L = catalog::get("ap4_f5");
    Field f5 = Field::prime(5);
    auto v0 = density::commonness_witness_check(L, FunctionTable::zero(f5, 1));
    CHECK_FALSE(v0.certified);
    CHECK(v0.delta_value == v0.benchmark_value);

    auto wit = density::load_function_file(FQCOMMON_DATA_DIR "/witness_ap4_f5_d2.json");
    auto v1 = density::commonness_witness_check(L, wit);
    CHECK(v1.certified);
    CHECK(v1.delta_value == Rat(611, 5000));

    // the s=1 set witness at n=1 on a system inducing x1 = 0
    auto Ls1 = catalog::get("x1zero_3x5_f5");
    std::vector<Rat> ind(5, Rat(-1, 2));
    ind[0] = Rat(1, 2);
    auto v2 = density::commonness_witness_check(Ls1, FunctionTable(f5, 1, std::move(ind)));
    CHECK(v2.certified);
    CHECK(v2.delta_value == Rat(1, 25));

    // redundant systems reject the benchmark
    CHECK_THROWS_AS(
        density::commonness_witness_check(catalog::get("sys2x5_s2_f5"),
                                          FunctionTable::zero(f5, 1)),
        usage_error);
    // out-of-range witnesses are rejected
    auto psi = certify::psi_table(certify::PsiSpec(f5, 1, Rat(1, 4)));  // max |psi| = 1
    CHECK_THROWS_AS(density::commonness_witness_check(L, psi), usage_error);
}

TEST_CASE("field mismatch and budget errors") {
    auto L = catalog::get("ap4_f5");
    Field f3 = Field::prime(3);
    CHECK_THROWS_AS(density::lambda(L, FunctionTable::zero(f3, 1)), usage_error);
    Budget tiny;
    tiny.max_evals = 3;
    Field f5 = Field::prime(5);
    CHECK_THROWS_AS(density::lambda(L, FunctionTable::zero(f5, 1), tiny), budget_error);
}
