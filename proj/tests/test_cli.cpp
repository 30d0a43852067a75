#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <string>

#include <json.hpp>

#include "fqcommon/catalog.hpp"
#include "fqcommon/linsys.hpp"

using namespace fqcommon;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run(const std::string& args) {
    std::string cmd = std::string(FQCOMMON_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult r;
    std::array<char, 4096> buf;
    size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
    int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string data(const std::string& name) { return std::string(FQCOMMON_DATA_DIR "/") + name; }

}  // namespace

TEST_CASE("analyze: human and json") {
    auto r = run("analyze " + data("ap4_f5.system"));
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("s(L) = 3") != std::string::npos);

    auto j = run("analyze --json " + data("ap4_f5.system"));
    CHECK(j.exit_code == 0);
    auto parsed = nlohmann::json::parse(j.out);
    CHECK(parsed["rank"] == 2);
    CHECK(parsed["irredundant"] == true);
    CHECK(parsed["s"] == 3);
    CHECK(parsed["c"] == 4);
    CHECK(parsed["critical_sets"].size() == 1);
    CHECK(parsed["critical_sets"][0]["B"] == nlohmann::json({1, 2, 3, 4}));
    CHECK(parsed["critical_sets"][0]["m_B"] == 2);
}

TEST_CASE("exit codes: parse, budget, inconclusive, domain") {
    std::string bad = "/tmp/fqc_bad.system";
    std::ofstream(bad) << "q=6\n1 2\n1 1\n";
    CHECK(run("analyze " + bad).exit_code == 2);

    std::string ragged = "/tmp/fqc_ragged.system";
    std::ofstream(ragged) << "q=5\n2 4\n1 3 1\n0 1 3 1\n";
    CHECK(run("analyze " + ragged).exit_code == 2);

    CHECK(run("analyze --budget 1 " + data("ap4_f5.system")).exit_code == 3);
    CHECK(run("certify catalog:ones3_f3").exit_code == 4);

    // even q on the gowers route: a (2x4)-system with s = 3 over F_4
    gf::Field f4 = gf::Field::make(2, 2);
    linsys::LinearSystem even = [&] {
        for (gf::elem a1 = 1; a1 < 4; ++a1) {
            for (gf::elem a2 = 1; a2 < 4; ++a2) {
                for (gf::elem b1 = 1; b1 < 4; ++b1) {
                    for (gf::elem b2 = 1; b2 < 4; ++b2) {
                        if (f4.sub(f4.mul(a1, b2), f4.mul(a2, b1)) == 0) continue;
                        auto L = linsys::LinearSystem::from_rows(
                            f4, {{a1, a2, 1, 0}, {b1, b2, 0, 1}});
                        if (linsys::s_of(L) == 3) return L;
                    }
                }
            }
        }
        FAIL("no s=3 system over F_4 found");
        return catalog::get("ap4_f5");
    }();
    std::string evenpath = "/tmp/fqc_even.system";
    std::ofstream(evenpath) << linsys::system_file_text(even);
    CHECK(run("certify --route gowers " + evenpath).exit_code == 5);

    CHECK(run("oracle no-such-suite").exit_code == 2);
    CHECK(run("frobnicate").exit_code == 2);
}

TEST_CASE("classify-eq") {
    auto r = run("classify-eq " + data("allones4_f5.system"));
    CHECK(r.exit_code == 0);
    CHECK(nlohmann::json::parse(r.out)["classification"] == "uncommon");
    auto r2 = run("classify-eq " + data("paired_f5.system"));
    CHECK(nlohmann::json::parse(r2.out)["classification"] == "common");
    CHECK(run("classify-eq " + data("ap4_f5.system")).exit_code == 2);  // not single-equation
}

TEST_CASE("lambda and delta commands") {
    auto r = run("lambda " + data("ap4_f5.system") + " " + data("psi_f5_d1.json"));
    CHECK(r.exit_code == 0);
    CHECK(nlohmann::json::parse(r.out)["lambda"] == "1/32");

    auto r2 = run("delta " + data("ap4_f5.system") + " " + data("witness_ap4_f5_d2.json"));
    auto j2 = nlohmann::json::parse(r2.out);
    CHECK(j2["delta"] == "611/5000");
    CHECK(j2["benchmark"] == "1/8");
}

TEST_CASE("fourier command emits the bound report") {
    auto r = run("fourier --d 1 " + data("psi_f5_d1.json"));
    auto j = nlohmann::json::parse(r.out);
    CHECK(j.contains("max_coeff"));
    CHECK(j.contains("bound"));
    CHECK(j.contains("slack"));
    CHECK(j.contains("pass"));
    // d = n = 1 makes the bound q^{1/2} > 1: trivially satisfiable
    CHECK(j["pass"] == true);
}

TEST_CASE("certify + verify round trip through files") {
    std::string rep = "/tmp/fqc_cert.json";
    auto r = run("certify --seed 5 --samples 400 -o " + rep + " catalog:twopar_f3");
    CHECK(r.exit_code == 0);
    auto v = run("verify " + rep);
    CHECK(v.exit_code == 0);
    CHECK(nlohmann::json::parse(v.out)["pass"] == true);

    // tamper: edit delta
    auto j = nlohmann::json::parse(std::ifstream(rep));
    j["delta"] = "1/1000000";
    std::ofstream("/tmp/fqc_cert_bad.json") << j.dump(2);
    auto vb = run("verify /tmp/fqc_cert_bad.json");
    CHECK(vb.exit_code == 1);
    CHECK(nlohmann::json::parse(vb.out)["pass"] == false);
}

TEST_CASE("determinism: identical inputs and seed give byte-identical output") {
    auto a = run("certify --seed 3 --samples 300 catalog:twopar_f5");
    auto b = run("certify --seed 3 --samples 300 catalog:twopar_f5");
    CHECK(a.exit_code == b.exit_code);
    CHECK(a.out == b.out);

    auto c = run("analyze --json " + data("ap5_f5.system"));
    auto d = run("analyze --json " + data("ap5_f5.system"));
    CHECK(c.out == d.out);
}
