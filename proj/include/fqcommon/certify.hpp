#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "fqcommon/density.hpp"
#include "fqcommon/gf.hpp"
#include "fqcommon/linsys.hpp"
#include "fqcommon/numeric.hpp"

namespace fqcommon::certify {

// --- the psi witness family (three-valued by zero-coordinate count) ------

struct PsiSpec {
    gf::Field field;  // odd characteristic
    int d = 1;
    Rat alpha{1, 4};

    PsiSpec(gf::Field f, int d_, Rat a);
    Rat beta() const;  // -alpha (q-1) / d, so the table is balanced
    /// |psi| <= 1/4 can fail for small d (|beta| grows); flagged, not fatal.
    bool range_ok() const;
};

density::FunctionTable psi_table(const PsiSpec& spec, const Budget& budget = {});

/// Exact Lambda_L(psi) for any (2x4)-system with s(L) = 3; depends only on
/// (q, d, alpha). Requires odd q >= 5.
Rat psi_lambda_closed_form(std::int64_t q, std::int64_t d, const Rat& alpha);

/// Lambda_L(psi) = (m4/q^2)^d alpha^4 * bracket(q, d) with m4 = (q-1)(q-3);
/// the bracket stays small even when the full rational is astronomically
/// large, and Lambda < -nu iff bracket < -(q-3)^{-4}.
Rat psi_negativity_bracket(const Int& q, const Int& d);
Rat psi_negativity_threshold(const Int& q);

struct PsiNegativityReport {
    std::int64_t q = 0;
    std::string route;  // "direct" (q >= 40) or "lift" (via F_{q^6})
    Int ext_q;          // q^6 on the lift route, else q
    Int d;              // (ext_q - 3)^2
    Rat alpha;
    Rat bracket_value;
    Rat threshold_value;
    bool certified = false;
    std::optional<Rat> lambda_value;           // direct route only
    std::optional<Rat> nu_value;               // direct route only
    std::optional<std::string> ext_field;      // lift route: constructed field config
    bool embedding_materialized = false;       // lift route: h available (prime base)
};

PsiNegativityReport psi_negativity_certificate(std::int64_t q, const Rat& alpha = Rat(1, 4));

// --- the Gowers twist ------------------------------------------------------

struct GowersSpec {
    gf::Field field;                // odd characteristic
    std::vector<gf::elem> alphas;   // all nonzero; the pipelines use t = 4
    density::FunctionTable base;    // f on F_q^d
    int n = 0;                      // target dimension >= d
    int snap_denom_log2 = 40;       // cosine values are snapped to this grid
};

/// f extended to F_q^n by ignoring the last n-d coordinates.
density::FunctionTable extend_table(const density::FunctionTable& f, int n,
                                    const Budget& budget = {});

/// G(x) = (1/2t) f_dag(x) sum_j 2 cos(2 pi Tr(alpha_j x.x) / p), snapped to
/// exact rationals and clamped so |G| <= max|f| holds exactly.
density::FunctionTable gowers_twist(const GowersSpec& spec, const Budget& budget = {});

/// G - mean(G): exactly balanced.
density::FunctionTable psi_star(const density::FunctionTable& G);

// --- the alpha derivation and quadratic-form census ------------------------

struct DerivedAlpha {
    std::array<gf::elem, 4> alpha;
    std::array<gf::elem, 2> a;  // x3 = a1 x1 + a2 x2 on the solution space
    std::array<gf::elem, 2> b;  // x4 = b1 x1 + b2 x2
};

/// For a (2x4)-system with s = 3 over odd q: a 4-tuple of nonzero field
/// elements whose combined quadratic form Q* vanishes identically.
DerivedAlpha derive_alpha(const linsys::LinearSystem& Lstar, const Budget& budget = {});

/// Coefficients of |x|^2, x.y, |y|^2 in Q*; all zero for a valid derivation.
std::array<gf::elem, 3> qstar_coefficients(const gf::Field& F, const DerivedAlpha& da);

struct QuadraticTermSummary {
    long vanishing = 0;  // K_L
    long total = 0;      // (2t)^4
};

/// Census of the (2t)^4 sign/index phase products in the expansion of
/// Lambda_L(G): K_L counts the identically-vanishing quadratic forms.
QuadraticTermSummary quadratic_terms(const linsys::LinearSystem& L,
                                     std::span<const gf::elem> alphas, int t = 4,
                                     const Budget& budget = {});

struct TwistIdentityReport {
    Rat lambda_G;       // Lambda_L(G)
    Rat lambda_f;       // Lambda_L(f)
    long K = 0;
    long total_terms = 0;
    double lhs_minus_rhs = 0;  // |Lambda_L(G) - K/(2t)^4 * Lambda_L(f)|
    double bound = 0;          // 16 q^{2d - n/2}
    double slack = 0;
    bool pass = false;
};

TwistIdentityReport twist_identity_check(const linsys::LinearSystem& L,
                                     const density::FunctionTable& f,
                                     std::span<const gf::elem> alphas, int n,
                                     const Budget& budget = {});

// --- classification and certificates ---------------------------------------

/// Single equation a_1 x_1 + ... + a_k x_k = 0, all a_i nonzero: common iff
/// k is odd or the coefficients split into pairs summing to zero.
bool classify_single_equation_common(const gf::Field& F, std::span<const gf::elem> coeffs);

enum class Verdict { certified, inconclusive };

struct CertificateReport {
    linsys::LinearSystem system;
    density::FunctionTable witness;  // f; the certificate function is g = alpha_scale * f
    Rat alpha_scale{1};
    std::optional<Rat> sum_critical;
    std::optional<Rat> delta_value;  // Delta_L(g); present iff certified
    Rat benchmark_value;
    Verdict verdict = Verdict::inconclusive;
    std::string route;
    std::uint64_t seed = 0;

    nlohmann::json to_json() const;
    static CertificateReport from_json(const nlohmann::json& j);
};

/// Critical-sum route: S = sum over critical B of Lambda_{L_B}(f); if S < 0,
/// alpha = -S 2^{-(k+2)}, g = alpha f, and Delta_L(g) < 2^{1-k} exactly.
CertificateReport critical_sum_certify(const linsys::LinearSystem& L,
                                       const density::FunctionTable& f,
                                       const Budget& budget = {});

struct SearchConfig {
    std::string sampler = "grid";  // grid | fourier | product
    long grid_denom = 64;
    int fourier_terms = 4;
    std::uint64_t seed = 1;
    long samples = 10000;
};

struct SearchResult {
    std::optional<CertificateReport> report;
    Rat best_value;      // minimal S seen
    long best_index = -1;
    long samples_run = 0;
    std::string sampler;
};

/// Samples balanced f: F_q^d -> [-1/2, 1/2], keeps the minimizer of the
/// critical sum, and certifies when it is negative. Deterministic per seed.
SearchResult random_balanced_search(const linsys::LinearSystem& L, int d,
                                    const SearchConfig& config, const Budget& budget = {});

struct PipelineOptions {
    std::uint64_t seed = 1;
    long samples = 20000;
    int d_max = 2;
    int gowers_n = 0;  // 0 = choose automatically within budget
    std::string route = "auto";  // auto | s1 | s2 | gowers | search
    Budget budget;
};

struct PipelineResult {
    std::optional<CertificateReport> report;
    std::string classification;  // "uncommon (certified)", "common (...)", "inconclusive (...)"
    std::vector<std::string> diagnostics;
};

PipelineResult uncommonness_pipeline(const linsys::LinearSystem& L,
                                     const PipelineOptions& opts = {});

struct VerifyResult {
    bool pass = false;
    std::vector<std::string> failures;
    Rat recomputed_delta;
};

/// Re-checks a report from scratch: benchmark, range/balance per route,
/// Delta recomputation, and the strict inequality for certified verdicts.
VerifyResult verify_certificate(const CertificateReport& report, const Budget& budget = {});

}  // namespace fqcommon::certify
