#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fqcommon/catalog.hpp"
#include "fqcommon/certify.hpp"
#include "fqcommon/density.hpp"

using namespace fqcommon;
using density::FunctionTable;
using gf::elem;
using gf::Field;
using linsys::LinearSystem;

TEST_CASE("psi spec and table") {
    Field f5 = Field::prime(5);
    certify::PsiSpec spec(f5, 1, Rat(1, 4));
    CHECK(spec.beta() == Rat(-1));
    CHECK_FALSE(spec.range_ok());  // |beta| = 1 > 1/4 at d = 1

    auto psi = certify::psi_table(spec);
    CHECK(psi.values() == std::vector<Rat>{Rat(-1), Rat(1, 4), Rat(1, 4), Rat(1, 4), Rat(1, 4)});

    certify::PsiSpec spec2(f5, 2, Rat(1, 4));
    auto psi2 = certify::psi_table(spec2);
    CHECK(psi2[0] == 0);  // psi(0,0) has two zero coordinates
    CHECK(psi2.balanced());
    std::vector<elem> pt{0, 1};
    CHECK(psi2.at(pt) == spec2.beta());
    std::vector<elem> pt2{2, 3};
    CHECK(psi2.at(pt2) == Rat(1, 4));

    certify::PsiSpec spec3(f5, 3, Rat(1, 4));
    CHECK(certify::psi_table(spec3).sum() == 0);
    CHECK(spec3.beta() == Rat(-1, 3));
    CHECK_FALSE(spec3.range_ok());
    CHECK(certify::PsiSpec(f5, 4, Rat(1, 4)).range_ok());  // beta = -1/4

    Field f4 = Field::make(2, 2);
    CHECK_THROWS_AS(certify::PsiSpec(f4, 1, Rat(1, 4)), fqcommon::domain_error);
    CHECK_THROWS_AS(certify::PsiSpec(f5, 1, Rat(0)), usage_error);
    CHECK_THROWS_AS(certify::PsiSpec(f5, 1, Rat(1, 3)), usage_error);
}

TEST_CASE("psi zero-sum identity holds symbolically") {
    // (q-1)^d alpha + d (q-1)^{d-1} beta = 0 with beta = -alpha (q-1)/d
    for (std::int64_t q : {5, 7, 9, 41}) {
        for (int d : {1, 2, 5, 1444}) {
            Rat alpha(1, 4);
            Rat beta = -alpha * Rat(q - 1, d);
            Rat total = pow_rat(Rat(q - 1), d) * alpha + Rat(d) * pow_rat(Rat(q - 1), d - 1) * beta;
            CHECK(total == 0);
        }
    }
}

TEST_CASE("vanishing trace composition forces the zero form") {
    // for Q(x,y) = A x^2 + B xy + C y^2 over F_q with (A,B,C) != 0 there is
    // a point where Tr(Q) != 0 (checked exhaustively at n = 1, q <= 9)
    for (auto [p, kappa] : {std::pair<std::int64_t, int>{3, 1}, {5, 1}, {7, 1}, {3, 2}}) {
        gf::Field F = gf::Field::make(p, kappa);
        for (elem A = 0; A < F.q(); ++A) {
            for (elem B = 0; B < F.q(); ++B) {
                for (elem C = 0; C < F.q(); ++C) {
                    if (A == 0 && B == 0 && C == 0) continue;
                    bool hit = false;
                    for (elem x = 0; x < F.q() && !hit; ++x) {
                        for (elem y = 0; y < F.q() && !hit; ++y) {
                            elem val = F.add(F.add(F.mul(A, F.mul(x, x)), F.mul(B, F.mul(x, y))),
                                             F.mul(C, F.mul(y, y)));
                            hit = F.trace(val) != 0;
                        }
                    }
                    CHECK(hit);
                }
            }
        }
    }
}

TEST_CASE("psi closed form matches brute force") {
    CHECK(certify::psi_lambda_closed_form(5, 1, Rat(1, 4)) == Rat(1, 32));
    Field f5 = Field::prime(5);
    auto L = catalog::get("ap4_f5");
    for (int d = 1; d <= 2; ++d) {
        auto psi = certify::psi_table(certify::PsiSpec(f5, d, Rat(1, 4)));
        CHECK(density::lambda(L, psi) == certify::psi_lambda_closed_form(5, d, Rat(1, 4)));
    }
    Field f7 = Field::prime(7);
    auto L7 = catalog::get("ap4_f7");
    auto psi7 = certify::psi_table(certify::PsiSpec(f7, 1, Rat(1, 4)));
    CHECK(density::lambda(L7, psi7) == certify::psi_lambda_closed_form(7, 1, Rat(1, 4)));

    CHECK_THROWS_AS(certify::psi_lambda_closed_form(3, 1, Rat(1, 4)), fqcommon::domain_error);
    CHECK_THROWS_AS(certify::psi_lambda_closed_form(4, 1, Rat(1, 4)), fqcommon::domain_error);
}

TEST_CASE("psi negativity certificates") {
    auto rep41 = certify::psi_negativity_certificate(41);
    CHECK(rep41.route == "direct");
    CHECK(rep41.certified);
    REQUIRE(rep41.lambda_value);
    REQUIRE(rep41.nu_value);
    CHECK(*rep41.lambda_value < 0);
    CHECK(*rep41.lambda_value < -*rep41.nu_value);
    CHECK(rep41.d == 1444);
    // factored form agrees
    CHECK((rep41.bracket_value < rep41.threshold_value) == rep41.certified);

    auto rep5 = certify::psi_negativity_certificate(5);
    CHECK(rep5.route == "lift");
    CHECK(rep5.ext_q == 15625);
    CHECK(rep5.certified);
    CHECK(rep5.embedding_materialized);
    REQUIRE(rep5.ext_field);
    CHECK(Field::parse_config(*rep5.ext_field).q() == 15625);

    auto rep9 = certify::psi_negativity_certificate(9);
    CHECK(rep9.route == "lift");
    CHECK(rep9.ext_q == 531441);
    CHECK(rep9.certified);
    CHECK_FALSE(rep9.embedding_materialized);  // base field is not prime
    REQUIRE(rep9.ext_field);
    CHECK(Field::parse_config(*rep9.ext_field).q() == 531441);

    auto rep25 = certify::psi_negativity_certificate(25);
    CHECK(rep25.route == "lift");
    CHECK(rep25.certified);
    REQUIRE(rep25.ext_field);
    CHECK(Field::parse_config(*rep25.ext_field).kappa() == 12);

    auto rep49 = certify::psi_negativity_certificate(49);  // first prime power >= 40 branch
    CHECK(rep49.route == "direct");
    CHECK(rep49.certified);
    CHECK(rep49.d == 2116);

    CHECK_THROWS_AS(certify::psi_negativity_certificate(4), fqcommon::domain_error);
}

TEST_CASE("table extension") {
    Field f3 = Field::prime(3);
    FunctionTable f(f3, 1, {Rat(0), Rat(1, 2), Rat(-1, 2)});
    auto ext = certify::extend_table(f, 3);
    CHECK(ext.size() == 27);
    std::vector<elem> p1{1, 0, 2};
    CHECK(ext.at(p1) == Rat(1, 2));  // depends only on the first coordinate
    std::vector<elem> p2{2, 1, 1};
    CHECK(ext.at(p2) == Rat(-1, 2));
    CHECK_THROWS_AS(certify::extend_table(ext, 1), usage_error);
}

TEST_CASE("gowers twist basics") {
    Field f3 = Field::prime(3);
    FunctionTable zero = FunctionTable::zero(f3, 1);
    certify::GowersSpec zspec{f3, {1, 1, 1, 1}, zero, 2};
    auto G0 = certify::gowers_twist(zspec);
    for (std::size_t i = 0; i < G0.size(); ++i) CHECK(G0[i] == 0);

    // t = 1 and Tr(alpha x.x) = 0 reproduces f exactly (dyadic values snap
    // losslessly): at x = 0 the phase sum is cos(0).
    FunctionTable f(f3, 1, {Rat(1, 4), Rat(1, 2), Rat(-1, 2)});
    certify::GowersSpec ospec{f3, {1}, f, 1};
    auto G1 = certify::gowers_twist(ospec);
    CHECK(G1[0] == Rat(1, 4));  // x = 0: x.x = 0

    // pointwise bound |G| <= max|f| holds exactly
    certify::GowersSpec spec{f3, {1, 2, 1, 2}, f, 3};
    auto G = certify::gowers_twist(spec);
    for (std::size_t i = 0; i < G.size(); ++i) CHECK(rat_abs(G[i]) <= f.max_abs());

    // against a direct double evaluation of the defining formula
    gf::PhaseTable phases(3);
    const std::size_t size = 27;
    for (std::size_t i = 0; i < size; ++i) {
        std::vector<elem> x(3);
        std::size_t tmp = i;
        for (int t = 2; t >= 0; --t) {
            x[t] = tmp % 3;
            tmp /= 3;
        }
        elem xx = f3.dot(x, x);
        double sum = 0;
        for (elem a : spec.alphas) sum += phases.cos2(f3.trace(f3.mul(a, xx)));
        double expect = f[x[0]].convert_to<double>() * sum / 8.0;
        CHECK(std::abs(G[i].convert_to<double>() - expect) <= std::ldexp(1.0, -39));
    }

    CHECK_THROWS_AS(certify::gowers_twist(certify::GowersSpec{f3, {0, 1}, f, 2}), usage_error);
    Field f4 = Field::make(2, 2);
    CHECK_THROWS_AS(
        certify::gowers_twist(certify::GowersSpec{f4, {1}, FunctionTable::zero(f4, 1), 2}),
        fqcommon::domain_error);
}

TEST_CASE("psi star balances exactly") {
    Field f3 = Field::prime(3);
    auto c = FunctionTable::constant(f3, 2, Rat(1, 3));
    auto star0 = certify::psi_star(c);
    for (std::size_t i = 0; i < star0.size(); ++i) CHECK(star0[i] == 0);

    FunctionTable f(f3, 1, {Rat(1, 4), Rat(1, 2), Rat(-1, 2)});
    certify::GowersSpec spec{f3, {1, 2, 1, 2}, f, 3};
    auto G = certify::gowers_twist(spec);
    auto star = certify::psi_star(G);
    CHECK(star.balanced());
    CHECK(star.mean() == 0);
    Rat mu = rat_abs(G.mean());
    for (std::size_t i = 0; i < star.size(); ++i) {
        CHECK(rat_abs(star[i]) <= f.max_abs() + mu);
    }
}

TEST_CASE("derive_alpha on the 4-AP") {
    auto L = catalog::get("ap4_f5");
    auto da = certify::derive_alpha(L);
    CHECK(da.a == std::array<elem, 2>{4, 2});
    CHECK(da.b == std::array<elem, 2>{3, 3});
    CHECK(da.alpha == std::array<elem, 4>{4, 3, 2, 1});
    auto qc = certify::qstar_coefficients(L.field(), da);
    CHECK(qc == std::array<elem, 3>{0, 0, 0});

    Field f5 = Field::prime(5);
    CHECK_THROWS_AS(certify::derive_alpha(catalog::get("twopar_f5")), usage_error);  // s = 2
    CHECK_THROWS_AS(certify::derive_alpha(catalog::get("schur_f5")), usage_error);   // not 2x4
}

TEST_CASE("derive_alpha annihilates Q* across all s=3 systems over F_5") {
    Field f5 = Field::prime(5);
    const elem minus1 = 4;
    int checked = 0;
    for (elem a1 = 1; a1 < 5; ++a1) {
        for (elem a2 = 1; a2 < 5; ++a2) {
            for (elem b1 = 1; b1 < 5; ++b1) {
                for (elem b2 = 1; b2 < 5; ++b2) {
                    if (f5.sub(f5.mul(a1, b2), f5.mul(a2, b1)) == 0) continue;
                    auto L = LinearSystem::from_rows(
                        f5, {{a1, a2, minus1, 0}, {b1, b2, 0, minus1}});
                    if (linsys::s_of(L) != 3) continue;
                    auto da = certify::derive_alpha(L);
                    for (elem a : da.alpha) CHECK(a != 0);
                    CHECK(da.alpha[3] == 1);
                    CHECK(certify::qstar_coefficients(f5, da) == std::array<elem, 3>{0, 0, 0});
                    ++checked;
                }
            }
        }
    }
    CHECK(checked == 192);
}

TEST_CASE("quadratic term census") {
    auto L = catalog::get("ap4_f5");
    auto da = certify::derive_alpha(L);
    auto census = certify::quadratic_terms(L, da.alpha, 4);
    CHECK(census.total == 4096);
    CHECK(census.vanishing >= 2);

    std::vector<elem> flipped;
    for (elem a : da.alpha) flipped.push_back(L.field().neg(a));
    CHECK(certify::quadratic_terms(L, flipped, 4).vanishing == census.vanishing);
}

TEST_CASE("twist identity check") {
    Field f3 = Field::prime(3);
    auto L = LinearSystem::from_rows(f3, {{1, 1, 2, 0}, {1, 2, 0, 2}});
    REQUIRE(linsys::s_of(L) == 3);
    auto da = certify::derive_alpha(L);

    // f = 0: both sides vanish
    auto rep0 = certify::twist_identity_check(L, FunctionTable::zero(f3, 1), da.alpha, 3);
    CHECK(rep0.pass);
    CHECK(rep0.lambda_G == 0);
    CHECK(rep0.lambda_f == 0);

    FunctionTable f(f3, 1, {Rat(1, 4), Rat(1, 2), Rat(-1, 2)});
    auto rep = certify::twist_identity_check(L, f, da.alpha, 4);
    CHECK(rep.pass);
    CHECK(rep.total_terms == 4096);
}

TEST_CASE("single equation classifier") {
    Field f5 = Field::prime(5);
    std::vector<elem> odd{1, 1, 1};
    CHECK(certify::classify_single_equation_common(f5, odd));
    std::vector<elem> paired{1, 4, 1, 4};
    CHECK(certify::classify_single_equation_common(f5, paired));
    std::vector<elem> allones{1, 1, 1, 1};
    CHECK_FALSE(certify::classify_single_equation_common(f5, allones));
    std::vector<elem> pairs22{1, 1, 4, 4};
    CHECK(certify::classify_single_equation_common(f5, pairs22));
    std::vector<elem> bad{1, 0, 1};
    CHECK_THROWS_AS(certify::classify_single_equation_common(f5, bad), usage_error);

    // characteristic 2: v = -v, so equal values pair among themselves
    Field f2 = Field::prime(2);
    std::vector<elem> c2{1, 1};
    CHECK(certify::classify_single_equation_common(f2, c2));
}

TEST_CASE("critical-sum route certification") {
    auto L = catalog::get("ap4_f5");
    Field f5 = Field::prime(5);

    auto zero = FunctionTable::zero(f5, 1);
    auto rep0 = certify::critical_sum_certify(L, zero);
    CHECK(rep0.verdict == certify::Verdict::inconclusive);
    CHECK(*rep0.sum_critical == 0);

    auto wit = density::load_function_file(FQCOMMON_DATA_DIR "/witness_ap4_f5_d2.json");
    auto rep = certify::critical_sum_certify(L, wit);
    CHECK(rep.verdict == certify::Verdict::certified);
    CHECK(*rep.sum_critical == Rat(-7, 5000));
    CHECK(rep.alpha_scale == Rat(7, 5000) / 64);
    REQUIRE(rep.delta_value);
    CHECK(*rep.delta_value < density::benchmark(4));

    auto vr = certify::verify_certificate(rep);
    CHECK(vr.pass);

    // the same verdict falls out of the generic witness check on g = alpha f
    auto wc = density::commonness_witness_check(L, rep.witness.scaled(rep.alpha_scale));
    CHECK(wc.certified);
    CHECK(wc.delta_value == *rep.delta_value);

    // JSON round-trip preserves everything
    auto back = certify::CertificateReport::from_json(rep.to_json());
    CHECK(back.system == rep.system);
    CHECK(back.witness.values() == rep.witness.values());
    CHECK(back.alpha_scale == rep.alpha_scale);
    CHECK(*back.delta_value == *rep.delta_value);
    auto vr2 = certify::verify_certificate(back);
    CHECK(vr2.pass);

    // preconditions
    auto unbalanced = FunctionTable::constant(f5, 1, Rat(1, 4));
    CHECK_THROWS_AS(certify::critical_sum_certify(L, unbalanced), usage_error);
    auto single = catalog::get("allones4_f5");
    CHECK_THROWS_AS(certify::critical_sum_certify(single, zero), usage_error);
}

TEST_CASE("tampered certificates fail verification") {
    auto L = catalog::get("ap4_f5");
    auto wit = density::load_function_file(FQCOMMON_DATA_DIR "/witness_ap4_f5_d2.json");
    auto rep = certify::critical_sum_certify(L, wit);

    auto j = rep.to_json();
    j["delta"] = "1/9";
    auto bad1 = certify::CertificateReport::from_json(j);
    CHECK_FALSE(certify::verify_certificate(bad1).pass);

    auto j2 = rep.to_json();
    j2["f"]["values"][0] = "1/3";
    auto bad2 = certify::CertificateReport::from_json(j2);
    auto vr2 = certify::verify_certificate(bad2);
    CHECK_FALSE(vr2.pass);
    bool balance_flagged = false;
    for (const auto& s : vr2.failures) balance_flagged |= s.find("balanced") != std::string::npos;
    CHECK(balance_flagged);
}

TEST_CASE("random search is reproducible and certifies s=2 systems") {
    auto L = catalog::get("twopar_f3");
    certify::SearchConfig cfg;
    cfg.seed = 11;
    cfg.samples = 500;
    auto r1 = certify::random_balanced_search(L, 1, cfg);
    auto r2 = certify::random_balanced_search(L, 1, cfg);
    CHECK(r1.best_value == r2.best_value);
    CHECK(r1.best_index == r2.best_index);
    REQUIRE(r1.report);
    REQUIRE(r2.report);
    CHECK(r1.report->to_json() == r2.report->to_json());
    CHECK(r1.report->verdict == certify::Verdict::certified);
    CHECK(certify::verify_certificate(*r1.report).pass);

    certify::SearchConfig bad = cfg;
    bad.sampler = "nonsense";
    CHECK_THROWS_AS(certify::random_balanced_search(L, 1, bad), usage_error);
}

TEST_CASE("pipeline: s=1 route") {
    auto result = certify::uncommonness_pipeline(catalog::get("x1zero_3x5_f5"));
    REQUIRE(result.report);
    CHECK(result.report->verdict == certify::Verdict::certified);
    CHECK(result.report->route == "s1");
    CHECK(*result.report->delta_value == Rat(1, 25));
    CHECK(certify::verify_certificate(*result.report).pass);

    // over F_3 the n=1 count argument fails (9 < 16): n = 2 is chosen
    auto r3 = certify::uncommonness_pipeline(catalog::get("x1zero_3x5_f3"));
    REQUIRE(r3.report);
    CHECK(r3.report->verdict == certify::Verdict::certified);
    CHECK(r3.report->witness.d() == 2);
    CHECK(certify::verify_certificate(*r3.report).pass);
}

TEST_CASE("pipeline: s=2 route and m=k and classifier") {
    certify::PipelineOptions opts;
    opts.samples = 500;
    auto result = certify::uncommonness_pipeline(catalog::get("twopar_f5"), opts);
    REQUIRE(result.report);
    CHECK(result.report->verdict == certify::Verdict::certified);
    CHECK(certify::verify_certificate(*result.report).pass);

    auto common = certify::uncommonness_pipeline(catalog::get("identity3_f3"));
    CHECK_FALSE(common.report);
    CHECK(common.classification.find("common (m = k") == 0);

    auto eq = certify::uncommonness_pipeline(catalog::get("ones3_f3"));
    CHECK_FALSE(eq.report);
    CHECK(eq.classification == "common (single-equation classifier)");

    auto uneq = certify::uncommonness_pipeline(catalog::get("allones4_f5"));
    CHECK_FALSE(uneq.report);
    CHECK(uneq.classification.find("uncommon (single-equation classifier") == 0);
}

TEST_CASE("pipeline: redundant systems reduce before classification") {
    // x1 - x2 = 0 plus x2 + x3 + x4 + x5 = 0 reduces to (1,1,1,1) over F_5
    auto result = certify::uncommonness_pipeline(catalog::get("sys2x5_s2_f5"));
    CHECK_FALSE(result.report);
    CHECK(result.classification.find("uncommon (single-equation classifier") == 0);
    bool noted = false;
    for (const auto& dline : result.diagnostics) {
        noted |= dline.find("identified x1 = x2") != std::string::npos;
    }
    CHECK(noted);
}

TEST_CASE("pipeline: the 4-AP over F_5 certifies via search at d=2") {
    certify::PipelineOptions opts;
    opts.seed = 7;
    opts.samples = 3000;
    auto result = certify::uncommonness_pipeline(catalog::get("ap4_f5"), opts);
    REQUIRE(result.report);
    CHECK(result.report->verdict == certify::Verdict::certified);
    CHECK(result.report->route == "search:grid");
    CHECK(result.report->witness.d() == 2);
    CHECK(*result.report->delta_value < Rat(1, 8));
    CHECK(certify::verify_certificate(*result.report).pass);
    // the gowers assembly ran first and was reported
    bool gowers_diag = false;
    for (const auto& dline : result.diagnostics) {
        gowers_diag |= dline.find("gowers assembly") != std::string::npos;
    }
    CHECK(gowers_diag);
}

TEST_CASE("pipeline: forced routes validate the structure") {
    CHECK_THROWS_AS(
        certify::uncommonness_pipeline(catalog::get("ap4_f5"),
                                       certify::PipelineOptions{.route = "s1"}),
        usage_error);
    certify::PipelineOptions g;
    g.route = "gowers";
    CHECK_THROWS_AS(certify::uncommonness_pipeline(catalog::get("twopar_f5"), g), usage_error);
}
