#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "fqcommon/analysis.hpp"
#include "fqcommon/catalog.hpp"
#include "fqcommon/certify.hpp"
#include "fqcommon/density.hpp"
#include "fqcommon/fourier.hpp"
#include "fqcommon/linsys.hpp"
#include "fqcommon/oracles.hpp"

namespace {

using namespace fqcommon;

// Exit-code contract: 0 ok/certified, 1 verification failure, 2 parse/usage,
// 3 budget, 4 inconclusive, 5 domain.
enum ExitCode {
    kOk = 0,
    kVerifyFail = 1,
    kParse = 2,
    kBudget = 3,
    kInconclusive = 4,
    kDomain = 5,
};

Budget budget_from(long long value) {
    Budget b;
    if (value > 0) {
        b.max_evals = Int(value);
    } else if (const char* env = std::getenv("FQCOMMON_BUDGET")) {
        b.max_evals = Int(std::string(env));
    }
    return b;
}

linsys::LinearSystem load_system(const std::string& path) {
    if (path.rfind("catalog:", 0) == 0) return catalog::get(path.substr(8));
    return linsys::load_system_file(path);
}

void emit(const nlohmann::json& j) { std::cout << j.dump(2) << "\n"; }

int cmd_analyze(const std::string& path, long long budget, bool json_out) {
    auto L = load_system(path);
    auto rep = analysis::analyze(L, budget_from(budget));
    if (json_out) {
        emit(rep.to_json());
    } else {
        std::cout << rep.human();
    }
    return kOk;
}

int cmd_certify(const std::string& path, const std::string& route, std::uint64_t seed,
                long long budget, long samples, int d_max, int gowers_n,
                const std::string& out_path) {
    auto L = load_system(path);
    certify::PipelineOptions opts;
    opts.route = route;
    opts.seed = seed;
    opts.budget = budget_from(budget);
    if (samples > 0) opts.samples = samples;
    if (d_max > 0) opts.d_max = d_max;
    if (gowers_n > 0) opts.gowers_n = gowers_n;
    auto result = certify::uncommonness_pipeline(L, opts);

    nlohmann::json j;
    if (result.report) {
        j = result.report->to_json();
    } else {
        j["format"] = "fqcommon-certificate-v1";
        j["verdict"] = "inconclusive";
        j["system"] = {{"field", L.field().config_string()},
                       {"m", L.m()},
                       {"k", L.k()},
                       {"rows", L.rows()}};
        j["seed"] = seed;
    }
    j["classification"] = result.classification;
    j["diagnostics"] = result.diagnostics;
    emit(j);
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        out << j.dump(2) << "\n";
    }
    bool certified = result.report &&
                     result.report->verdict == certify::Verdict::certified;
    return certified ? kOk : kInconclusive;
}

int cmd_verify(const std::string& path, long long budget) {
    std::ifstream in(path);
    if (!in) throw usage_error("cannot open report: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(e.what(), 0);
    }
    auto rep = certify::CertificateReport::from_json(j);
    auto vr = certify::verify_certificate(rep, budget_from(budget));
    nlohmann::json out;
    out["pass"] = vr.pass;
    out["recomputed_delta"] = rat_str(vr.recomputed_delta);
    out["failures"] = vr.failures;
    emit(out);
    return vr.pass ? kOk : kVerifyFail;
}

int cmd_classify(const std::string& path) {
    auto L = load_system(path);
    if (L.m() != 1) throw usage_error("classify-eq expects a single-equation system");
    bool common = certify::classify_single_equation_common(L.field(), L.rows()[0]);
    nlohmann::json j;
    j["equation"] = L.rows()[0];
    j["field"] = L.field().config_string();
    j["classification"] = common ? "common" : "uncommon";
    emit(j);
    return kOk;
}

int cmd_density(const std::string& which, const std::string& sys_path,
                const std::string& fn_path, long long budget) {
    auto L = load_system(sys_path);
    auto f = density::load_function_file(fn_path);
    Budget b = budget_from(budget);
    nlohmann::json j;
    if (which == "lambda") {
        j["lambda"] = rat_str(density::lambda(L, f, b));
    } else {
        j["delta"] = rat_str(density::delta(L, f, b));
        j["benchmark"] = rat_str(density::benchmark(L.k()));
    }
    emit(j);
    return kOk;
}

int cmd_fourier(const std::string& fn_path, int d, double tolerance, long long budget) {
    auto g = density::load_function_file(fn_path);
    if (d <= 0) throw usage_error("--d (base dimension) is required and must be positive");
    auto rep = fourier::verify_fourier_bound(g, d, tolerance, budget_from(budget));
    nlohmann::json j;
    j["max_coeff"] = rep.max_coeff;
    j["bound"] = rep.bound;
    j["slack"] = rep.slack;
    j["tolerance"] = tolerance;
    j["pass"] = rep.pass;
    emit(j);
    return rep.pass ? kOk : kVerifyFail;
}

int cmd_oracle(const std::string& suite, std::uint64_t seed) {
    auto res = oracles::run_suite(suite, seed);
    for (const auto& line : res.lines) {
        std::cout << (line.pass ? "PASS" : "FAIL") << "  " << line.name;
        if (!line.detail.empty()) std::cout << "  [" << line.detail << "]";
        std::cout << "\n";
    }
    std::cout << (res.pass ? "suite PASS" : "suite FAIL") << " (" << res.suite << ")\n";
    return res.pass ? kOk : kVerifyFail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact analysis of commonness for linear systems over F_q"};
    app.require_subcommand(1);

    std::string path, fn_path, route = "auto", out_path, suite;
    long long budget = 0;
    std::uint64_t seed = 1;
    long samples = 0;
    int d_max = 0, gowers_n = 0, fdim = 0;
    double tolerance = 1e-9;
    bool json_out = false;

    auto* analyze = app.add_subcommand("analyze", "structural report for a system file");
    analyze->add_option("path", path, "system file (or catalog:<name>)")->required();
    analyze->add_option("--budget", budget, "enumeration budget");
    analyze->add_flag("--json", json_out, "emit JSON instead of a summary");

    auto* cert = app.add_subcommand("certify", "search for an uncommonness certificate");
    cert->add_option("path", path)->required();
    cert->add_option("--route", route, "auto|s1|s2|gowers|search");
    cert->add_option("--seed", seed, "RNG seed");
    cert->add_option("--budget", budget);
    cert->add_option("--samples", samples, "samples per search stage");
    cert->add_option("--d", d_max, "max witness domain dimension");
    cert->add_option("--n", gowers_n, "dimension for the gowers construction");
    cert->add_option("-o,--out", out_path, "also write the report to a file");

    auto* verify = app.add_subcommand("verify", "re-check a certificate report from scratch");
    verify->add_option("path", path)->required();
    verify->add_option("--budget", budget);

    auto* classify = app.add_subcommand("classify-eq", "single-equation commonness classifier");
    classify->add_option("path", path)->required();

    auto* lam = app.add_subcommand("lambda", "exact solution density of f over a system");
    lam->add_option("system", path)->required();
    lam->add_option("function", fn_path)->required();
    lam->add_option("--budget", budget);

    auto* del = app.add_subcommand("delta", "exact Delta_L(f) and benchmark");
    del->add_option("system", path)->required();
    del->add_option("function", fn_path)->required();
    del->add_option("--budget", budget);

    auto* four = app.add_subcommand("fourier", "Fourier-coefficient bound report for a table");
    four->add_option("function", fn_path)->required();
    four->add_option("--d", fdim, "base dimension the table was built from")->required();
    four->add_option("--tolerance", tolerance);
    four->add_option("--budget", budget);

    auto* oracle = app.add_subcommand("oracle", "run a brute-force equivalence suite");
    oracle->add_option("suite", suite)->required();
    oracle->add_option("--seed", seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kParse;
    }

    try {
        if (*analyze) return cmd_analyze(path, budget, json_out);
        if (*cert) return cmd_certify(path, route, seed, budget, samples, d_max, gowers_n, out_path);
        if (*verify) return cmd_verify(path, budget);
        if (*classify) return cmd_classify(path);
        if (*lam) return cmd_density("lambda", path, fn_path, budget);
        if (*del) return cmd_density("delta", path, fn_path, budget);
        if (*four) return cmd_fourier(fn_path, fdim, tolerance, budget);
        if (*oracle) return cmd_oracle(suite, seed);
    } catch (const parse_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kParse;
    } catch (const budget_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kBudget;
    } catch (const fqcommon::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDomain;
    } catch (const usage_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kParse;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 10;
    }
    return kParse;
}
