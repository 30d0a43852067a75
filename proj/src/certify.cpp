#include "fqcommon/certify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

namespace fqcommon::certify {

using density::FunctionTable;
using gf::elem;
using linsys::LinearSystem;

namespace {

void require_odd(const gf::Field& F, const char* what) {
    if (F.p() == 2) throw domain_error(std::string(what) + " requires odd characteristic");
}

std::int64_t count_zero_coords(std::size_t idx, std::int64_t q, int d) {
    std::int64_t zeros = 0;
    for (int t = 0; t < d; ++t) {
        if (idx % q == 0) ++zeros;
        idx /= q;
    }
    return zeros;
}

}  // namespace

// --- psi ---------------------------------------------------------------

PsiSpec::PsiSpec(gf::Field f, int d_, Rat a) : field(std::move(f)), d(d_), alpha(std::move(a)) {
    require_odd(field, "psi");
    if (d < 1) throw usage_error("psi: d must be >= 1");
    if (alpha == 0) throw usage_error("psi: alpha must be nonzero");
    if (rat_abs(alpha) > Rat(1, 4)) throw usage_error("psi: |alpha| must be <= 1/4");
}

Rat PsiSpec::beta() const { return -alpha * Rat(field.q() - 1, d); }

bool PsiSpec::range_ok() const { return rat_abs(beta()) <= Rat(1, 4); }

FunctionTable psi_table(const PsiSpec& spec, const Budget& budget) {
    const std::int64_t q = spec.field.q();
    Int size = pow_int(Int(q), spec.d);
    budget.require(size, "psi table");
    const Rat beta = spec.beta();
    std::vector<Rat> values(size.convert_to<std::size_t>());
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::int64_t zeros = count_zero_coords(i, q, spec.d);
        values[i] = zeros >= 2 ? Rat(0) : (zeros == 0 ? spec.alpha : beta);
    }
    return FunctionTable(spec.field, spec.d, std::move(values));
}

Rat psi_lambda_closed_form(std::int64_t q, std::int64_t d, const Rat& alpha) {
    if (q % 2 == 0) throw domain_error("psi closed form requires odd q");
    if (q <= 3) throw domain_error("psi closed form requires q >= 5 (m_4 > 0)");
    if (d < 1) throw usage_error("psi closed form: d must be >= 1");
    if (d > 50000) {
        throw budget_error("psi closed form", "about " + std::to_string(d) + "-digit-scale powers",
                           "d <= 50000; use the bracket form beyond that");
    }
    const Rat beta = -alpha * Rat(q - 1, d);
    const Int m4 = Int(q - 1) * (q - 3);
    Rat total = Rat(d) * Rat(pow_int(m4, d - 1)) * pow_rat(beta, 4);
    const int lmax = static_cast<int>(std::min<std::int64_t>(4, d));
    for (int l = 0; l <= lmax; ++l) {
        total += Rat(binomial(4, l)) * Rat(falling_factorial(Int(d), l)) *
                 Rat(pow_int(Int(q - 1), l)) * Rat(pow_int(m4, d - l)) * pow_rat(alpha, 4 - l) *
                 pow_rat(beta, l);
    }
    return total / Rat(pow_int(Int(q), 2 * static_cast<std::uint64_t>(d)));
}

Rat psi_negativity_bracket(const Int& q, const Int& d) {
    if (q <= 3) throw domain_error("psi bracket requires q >= 5");
    if (d < 1) throw usage_error("psi bracket: d must be >= 1");
    const Rat ratio = Rat(q - 1) / Rat(q - 3);
    Rat total = pow_rat(Rat(q - 1), 3) / (Rat(q - 3) * Rat(d * d * d));
    const unsigned lmax = d >= 4 ? 4u : d.convert_to<unsigned>();
    for (unsigned l = 0; l <= lmax; ++l) {
        Rat term = Rat(binomial(4, l)) * Rat(falling_factorial(d, l)) / Rat(pow_int(d, l)) *
                   pow_rat(ratio, l);
        total += (l % 2 == 0) ? term : -term;
    }
    return total;
}

Rat psi_negativity_threshold(const Int& q) { return Rat(-1) / Rat(pow_int(q - 3, 4)); }

PsiNegativityReport psi_negativity_certificate(std::int64_t q, const Rat& alpha) {
    if (q % 2 == 0) throw domain_error("psi negativity certificate requires odd q");
    if (q < 3) throw usage_error("q must be an odd prime power >= 3");
    // Factor q = p^kappa (also validates prime-power-ness).
    std::int64_t p = q;
    for (std::int64_t t = 2; t * t <= q; ++t) {
        if (q % t == 0) {
            p = t;
            break;
        }
    }
    int kappa = 0;
    for (std::int64_t t = q; t > 1; t /= p) {
        if (t % p != 0) throw usage_error("q = " + std::to_string(q) + " is not a prime power");
        ++kappa;
    }

    PsiNegativityReport rep;
    rep.q = q;
    rep.alpha = alpha;
    if (q >= 40) {
        rep.route = "direct";
        rep.ext_q = q;
        rep.d = Int(q - 3) * (q - 3);
        const std::int64_t d = ((q - 3) * (q - 3));
        rep.lambda_value = psi_lambda_closed_form(q, d, alpha);
        const Rat nu = pow_rat(Rat(Int(q - 1) * (q - 3), Int(q) * q), d) *
                       pow_rat(alpha / Rat(q - 3), 4);
        rep.nu_value = nu;
        rep.bracket_value = psi_negativity_bracket(Int(q), rep.d);
        rep.threshold_value = psi_negativity_threshold(Int(q));
        rep.certified = *rep.lambda_value < -nu;
        // The factored form must agree with the direct comparison.
        if ((rep.bracket_value < rep.threshold_value) != rep.certified) {
            throw std::logic_error("psi negativity: bracket and direct routes disagree");
        }
    } else {
        rep.route = "lift";
        rep.ext_q = pow_int(Int(q), 6);
        if (rep.ext_q <= 40) throw std::logic_error("q^6 <= 40 cannot happen for q >= 3");
        rep.d = (rep.ext_q - 3) * (rep.ext_q - 3);
        rep.bracket_value = psi_negativity_bracket(rep.ext_q, rep.d);
        rep.threshold_value = psi_negativity_threshold(rep.ext_q);
        rep.certified = rep.bracket_value < rep.threshold_value;
        // Construct F_{q^6} (as F_{p^{6 kappa}}) to witness constructibility.
        gf::Field ext = gf::Field::make(p, 6 * kappa);
        rep.ext_field = ext.config_string();
        rep.embedding_materialized = (kappa == 1);
    }
    return rep;
}

// --- Gowers twist --------------------------------------------------------

FunctionTable extend_table(const FunctionTable& f, int n, const Budget& budget) {
    if (n < f.d()) throw usage_error("extend_table: n must be >= d");
    if (n == f.d()) return f;
    const std::int64_t q = f.field().q();
    Int size = pow_int(Int(q), n);
    budget.require(size, "table extension");
    const std::size_t tail = pow_int(Int(q), n - f.d()).convert_to<std::size_t>();
    std::vector<Rat> values(size.convert_to<std::size_t>());
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = f[i / tail];
    return FunctionTable(f.field(), n, std::move(values));
}

FunctionTable gowers_twist(const GowersSpec& spec, const Budget& budget) {
    const gf::Field& F = spec.field;
    require_odd(F, "gowers twist");
    if (spec.base.field() != F) throw usage_error("gowers twist: field mismatch");
    if (spec.alphas.empty()) throw usage_error("gowers twist: empty alpha tuple");
    for (elem a : spec.alphas) {
        if (a == 0) throw usage_error("gowers twist: alpha entries must be nonzero");
        if (!F.valid(a)) throw usage_error("gowers twist: alpha outside [0, q)");
    }
    if (spec.n < spec.base.d()) throw usage_error("gowers twist: n must be >= d");
    if (spec.snap_denom_log2 < 8 || spec.snap_denom_log2 > 62) {
        throw usage_error("gowers twist: snap denominator out of range");
    }

    const int n = spec.n;
    const std::int64_t q = F.q();
    Int size = pow_int(Int(q), n);
    budget.require(size, "gowers twist");
    const std::size_t sz = size.convert_to<std::size_t>();
    const std::size_t tail = pow_int(Int(q), n - spec.base.d()).convert_to<std::size_t>();
    const int t = static_cast<int>(spec.alphas.size());

    gf::PhaseTable phases(F.p());
    // cosine weights per value of x.x
    std::vector<double> weight(q);
    for (elem v = 0; v < q; ++v) {
        double s = 0;
        for (elem a : spec.alphas) s += phases.cos2(F.trace(F.mul(a, v)));
        weight[v] = s / (2.0 * t);
    }

    std::vector<double> base_vals(spec.base.size());
    for (std::size_t i = 0; i < base_vals.size(); ++i) base_vals[i] = spec.base[i].convert_to<double>();

    const Rat M = spec.base.max_abs();
    const Int denom = Int(1) << spec.snap_denom_log2;
    const double scale = std::ldexp(1.0, spec.snap_denom_log2);

    std::vector<Rat> values(sz);
    std::vector<elem> x(n, 0);
    elem xx = 0;  // x.x maintained incrementally
    std::size_t i = 0;
    while (true) {
        double g = base_vals[i / tail] * weight[xx];
        Rat r(Int(std::llround(g * scale)), denom);
        if (r > M) r = M;
        if (r < -M) r = -M;
        values[i] = std::move(r);

        int pos = n - 1;
        for (; pos >= 0; --pos) {
            elem old = x[pos];
            elem next = old + 1 < q ? old + 1 : 0;
            x[pos] = next;
            // x.x changes by next^2 - old^2
            xx = F.add(xx, F.sub(F.mul(next, next), F.mul(old, old)));
            if (next != 0) break;
        }
        if (pos < 0) break;
        ++i;
    }
    return FunctionTable(F, n, std::move(values));
}

FunctionTable psi_star(const FunctionTable& G) {
    Rat mu = G.mean();
    return G.shifted(-mu);
}

// --- alpha derivation -----------------------------------------------------

namespace {

// Parametrization (x_i, x_j) -> (x_{o1}, x_{o2}) of a (2x4) solution space:
// x_{o1} = a1 x_i + a2 x_j, x_{o2} = b1 x_i + b2 x_j.
struct Param24 {
    int i, j, o1, o2;
    elem a1, a2, b1, b2;
};

std::optional<Param24> parametrize_2x4(const LinearSystem& L, int i, int j) {
    const auto& F = L.field();
    int others[2];
    int t = 0;
    for (int c = 0; c < 4; ++c) {
        if (c != i && c != j) others[t++] = c;
    }
    // Solve the two rows for (x_{o1}, x_{o2}) in terms of (x_i, x_j): the
    // block on the other columns must be invertible.
    const auto& R = L.rows();
    elem c11 = R[0][others[0]], c12 = R[0][others[1]];
    elem c21 = R[1][others[0]], c22 = R[1][others[1]];
    elem det = F.sub(F.mul(c11, c22), F.mul(c12, c21));
    if (det == 0) return std::nullopt;
    elem idet = F.inv(det);
    // [x_{o1}; x_{o2}] = -Cinv * [R[:,i], R[:,j]] * [x_i; x_j]
    elem di1 = R[0][i], di2 = R[1][i], dj1 = R[0][j], dj2 = R[1][j];
    elem inv11 = F.mul(idet, c22), inv12 = F.neg(F.mul(idet, c12));
    elem inv21 = F.neg(F.mul(idet, c21)), inv22 = F.mul(idet, c11);
    Param24 out;
    out.i = i;
    out.j = j;
    out.o1 = others[0];
    out.o2 = others[1];
    out.a1 = F.neg(F.add(F.mul(inv11, di1), F.mul(inv12, di2)));
    out.a2 = F.neg(F.add(F.mul(inv11, dj1), F.mul(inv12, dj2)));
    out.b1 = F.neg(F.add(F.mul(inv21, di1), F.mul(inv22, di2)));
    out.b2 = F.neg(F.add(F.mul(inv21, dj1), F.mul(inv22, dj2)));
    return out;
}

Param24 parametrize_2x4_any(const LinearSystem& L) {
    if (L.m() != 2 || L.k() != 4) throw usage_error("expected a (2x4)-system");
    for (int i = 0; i < 4; ++i) {
        for (int j = i + 1; j < 4; ++j) {
            if (auto p = parametrize_2x4(L, i, j)) return *p;
        }
    }
    throw usage_error("(2x4)-system admits no two-variable parametrization");
}

}  // namespace

DerivedAlpha derive_alpha(const LinearSystem& Lstar, const Budget& budget) {
    const auto& F = Lstar.field();
    require_odd(F, "derive_alpha");
    if (Lstar.m() != 2 || Lstar.k() != 4) throw usage_error("derive_alpha expects a (2x4)-system");
    if (s_of(Lstar, budget) != 3) {
        throw usage_error("derive_alpha requires s(L) = 3");
    }
    // s = 3 makes every pair of columns independent, so (x1, x2) always works.
    auto p = parametrize_2x4(Lstar, 0, 1);
    if (!p || p->o1 != 2 || p->o2 != 3) {
        throw std::logic_error("s(L)=3 system failed to parametrize by (x1, x2)");
    }
    const elem a1 = p->a1, a2 = p->a2, b1 = p->b1, b2 = p->b2;
    const elem D = F.sub(F.mul(a1, b2), F.mul(a2, b1));
    if (a1 == 0 || a2 == 0 || b1 == 0 || b2 == 0 || D == 0) {
        throw std::logic_error("s(L)=3 coefficient conditions violated");
    }
    DerivedAlpha out;
    out.a = {a1, a2};
    out.b = {b1, b2};
    out.alpha[0] = F.mul(F.mul(F.inv(a2), b1), D);
    out.alpha[1] = F.neg(F.mul(F.mul(F.inv(a1), b2), D));
    out.alpha[2] = F.neg(F.mul(F.mul(b1, b2), F.inv(F.mul(a1, a2))));
    out.alpha[3] = 1;
    for (elem a : out.alpha) {
        if (a == 0) throw std::logic_error("derived alpha entry vanished");
    }
    auto coeffs = qstar_coefficients(F, out);
    if (coeffs[0] != 0 || coeffs[1] != 0 || coeffs[2] != 0) {
        throw std::logic_error("derived alpha does not annihilate Q*");
    }
    return out;
}

std::array<elem, 3> qstar_coefficients(const gf::Field& F, const DerivedAlpha& da) {
    const elem a1 = da.a[0], a2 = da.a[1], b1 = da.b[0], b2 = da.b[1];
    const auto& al = da.alpha;
    elem cxx = F.add(al[0], F.add(F.mul(al[2], F.mul(a1, a1)), F.mul(al[3], F.mul(b1, b1))));
    elem cxy = F.add(F.mul(F.from_int(2), F.mul(al[2], F.mul(a1, a2))),
                     F.mul(F.from_int(2), F.mul(al[3], F.mul(b1, b2))));
    elem cyy = F.add(al[1], F.add(F.mul(al[2], F.mul(a2, a2)), F.mul(al[3], F.mul(b2, b2))));
    return {cxx, cxy, cyy};
}

QuadraticTermSummary quadratic_terms(const LinearSystem& L, std::span<const elem> alphas, int t,
                                     const Budget& budget) {
    const auto& F = L.field();
    require_odd(F, "quadratic term census");
    if (static_cast<int>(alphas.size()) < t) throw usage_error("need t alpha values");
    Param24 p = parametrize_2x4_any(L);
    std::vector<elem> choices;
    for (int j = 0; j < t; ++j) {
        choices.push_back(alphas[j]);
        choices.push_back(F.neg(alphas[j]));
    }
    const elem a1 = p.a1, a2 = p.a2, b1 = p.b1, b2 = p.b2;
    const elem two = F.from_int(2);
    QuadraticTermSummary out;
    out.total = 1;
    for (int i = 0; i < 4; ++i) out.total *= static_cast<long>(choices.size());
    budget.require(Int(out.total), "quadratic term census");
    for (elem be1 : choices) {
        for (elem be2 : choices) {
            for (elem be3 : choices) {
                for (elem be4 : choices) {
                    elem A = F.add(be1, F.add(F.mul(be3, F.mul(a1, a1)), F.mul(be4, F.mul(b1, b1))));
                    if (A != 0) continue;
                    elem B = F.mul(two, F.add(F.mul(be3, F.mul(a1, a2)), F.mul(be4, F.mul(b1, b2))));
                    if (B != 0) continue;
                    elem C = F.add(be2, F.add(F.mul(be3, F.mul(a2, a2)), F.mul(be4, F.mul(b2, b2))));
                    if (C == 0) ++out.vanishing;
                }
            }
        }
    }
    return out;
}

TwistIdentityReport twist_identity_check(const LinearSystem& L, const FunctionTable& f,
                                     std::span<const elem> alphas, int n, const Budget& budget) {
    if (L.m() != 2 || L.k() != 4) throw usage_error("twist identity check expects a (2x4)-system");
    const int t = static_cast<int>(alphas.size());
    GowersSpec spec{L.field(), std::vector<elem>(alphas.begin(), alphas.end()), f, n};
    FunctionTable G = gowers_twist(spec, budget);
    TwistIdentityReport rep;
    rep.lambda_G = density::lambda(L, G, budget);
    rep.lambda_f = density::lambda(L, f, budget);
    auto census = quadratic_terms(L, alphas, t, budget);
    rep.K = census.vanishing;
    rep.total_terms = census.total;
    Rat rhs = Rat(rep.K, census.total) * rep.lambda_f;
    rep.lhs_minus_rhs = rat_abs(rep.lambda_G - rhs).convert_to<double>();
    rep.bound = 16.0 * std::pow(static_cast<double>(L.field().q()),
                                2.0 * f.d() - static_cast<double>(n) / 2.0);
    rep.slack = rep.bound + 1e-9 - rep.lhs_minus_rhs;
    rep.pass = rep.lhs_minus_rhs <= rep.bound + 1e-9;
    return rep;
}

// --- classifier -------------------------------------------------------------

bool classify_single_equation_common(const gf::Field& F, std::span<const elem> coeffs) {
    if (coeffs.empty()) throw usage_error("empty equation");
    for (elem a : coeffs) {
        if (a == 0) throw usage_error("classifier requires nonzero coefficients");
        if (!F.valid(a)) throw usage_error("coefficient outside [0, q)");
    }
    if (coeffs.size() % 2 == 1) return true;
    std::map<elem, long> count;
    for (elem a : coeffs) ++count[a];
    for (const auto& [v, c] : count) {
        elem nv = F.neg(v);
        if (nv == v) {
            if (c % 2 != 0) return false;
        } else {
            auto it = count.find(nv);
            if (it == count.end() || it->second != c) return false;
        }
    }
    return true;
}

// --- certificates ------------------------------------------------------------

nlohmann::json CertificateReport::to_json() const {
    nlohmann::json j;
    j["format"] = "fqcommon-certificate-v1";
    nlohmann::json sys;
    sys["field"] = system.field().config_string();
    sys["m"] = system.m();
    sys["k"] = system.k();
    sys["rows"] = system.rows();
    j["system"] = sys;
    j["q"] = system.field().q();
    j["d"] = witness.d();
    j["f"] = {{"values", [&] {
                   std::vector<std::string> v;
                   v.reserve(witness.size());
                   for (std::size_t i = 0; i < witness.size(); ++i) v.push_back(rat_str(witness[i]));
                   return v;
               }()}};
    j["alpha_scale"] = rat_str(alpha_scale);
    j["sum_critical"] = sum_critical ? nlohmann::json(rat_str(*sum_critical)) : nlohmann::json();
    j["delta"] = delta_value ? nlohmann::json(rat_str(*delta_value)) : nlohmann::json();
    j["benchmark"] = rat_str(benchmark_value);
    j["verdict"] = verdict == Verdict::certified ? "certified" : "inconclusive";
    j["route"] = route;
    j["seed"] = seed;
    return j;
}

CertificateReport CertificateReport::from_json(const nlohmann::json& j) {
    try {
        const auto& sys = j.at("system");
        gf::Field field = gf::Field::parse_config(sys.at("field").get<std::string>());
        linsys::Matrix rows = sys.at("rows").get<linsys::Matrix>();
        LinearSystem L = LinearSystem::from_rows(field, rows);
        int d = j.at("d").get<int>();
        std::vector<Rat> values;
        for (const auto& v : j.at("f").at("values")) values.push_back(parse_rat(v.get<std::string>()));
        FunctionTable f(field, d, std::move(values));
        CertificateReport rep{std::move(L), std::move(f)};
        rep.alpha_scale = parse_rat(j.at("alpha_scale").get<std::string>());
        if (j.contains("sum_critical") && !j.at("sum_critical").is_null()) {
            rep.sum_critical = parse_rat(j.at("sum_critical").get<std::string>());
        }
        if (j.contains("delta") && !j.at("delta").is_null()) {
            rep.delta_value = parse_rat(j.at("delta").get<std::string>());
        }
        rep.benchmark_value = parse_rat(j.at("benchmark").get<std::string>());
        rep.verdict = j.at("verdict").get<std::string>() == "certified" ? Verdict::certified
                                                                        : Verdict::inconclusive;
        rep.route = j.at("route").get<std::string>();
        rep.seed = j.at("seed").get<std::uint64_t>();
        return rep;
    } catch (const nlohmann::json::exception& e) {
        throw usage_error(std::string("malformed certificate JSON: ") + e.what());
    }
}

CertificateReport critical_sum_certify(const LinearSystem& L, const FunctionTable& f,
                                       const Budget& budget) {
    if (L.field() != f.field()) throw usage_error("system and witness use different fields");
    if (L.m() < 2 || L.m() >= L.k()) {
        throw usage_error("critical-sum route requires 2 <= m < k");
    }
    if (!f.balanced()) throw usage_error("critical-sum route requires a balanced witness");
    if (f.max_abs() > Rat(1, 2)) throw usage_error("witness must map into [-1/2, 1/2]");

    auto records = linsys::critical_sets(L, budget);
    Rat S = 0;
    for (const auto& rec : records) S += density::lambda(rec.L_B, f, budget);

    CertificateReport rep{L, f};
    rep.sum_critical = S;
    rep.benchmark_value = density::benchmark(L.k());
    if (S >= 0) {
        rep.verdict = Verdict::inconclusive;
        rep.alpha_scale = 0;
        rep.route = "critical-sum";
        return rep;
    }
    Rat alpha = -S / Rat(pow_int(Int(2), L.k() + 2));
    if (!(alpha > 0 && alpha <= Rat(1, 4))) {
        throw std::logic_error("alpha scale outside (0, 1/4]");
    }
    rep.alpha_scale = alpha;
    FunctionTable g = f.scaled(alpha);
    Rat dv = density::delta(L, g, budget);
    if (!(dv < rep.benchmark_value)) {
        throw std::logic_error("certified inequality failed; implementation bug");
    }
    rep.delta_value = dv;
    rep.verdict = Verdict::certified;
    rep.route = "critical-sum";
    return rep;
}

// --- samplers ----------------------------------------------------------------

namespace {

std::uint64_t next_below(std::mt19937_64& rng, std::uint64_t bound) {
    return bound == 0 ? 0 : rng() % bound;
}

FunctionTable normalize_balanced(const gf::Field& F, int d, std::vector<Rat> raw) {
    Rat mean = 0;
    for (const Rat& v : raw) mean += v;
    mean /= Rat(raw.size());
    Rat maxabs = 0;
    for (Rat& v : raw) {
        v -= mean;
        Rat a = rat_abs(v);
        if (a > maxabs) maxabs = a;
    }
    if (maxabs > Rat(1, 2)) {
        Rat scale = Rat(1, 2) / maxabs;
        for (Rat& v : raw) v *= scale;
    }
    return FunctionTable(F, d, std::move(raw));
}

FunctionTable sample_grid(const gf::Field& F, int d, std::mt19937_64& rng, const SearchConfig& cfg) {
    const std::size_t n = pow_int(Int(F.q()), d).convert_to<std::size_t>();
    const std::uint64_t D = static_cast<std::uint64_t>(cfg.grid_denom);
    std::vector<Rat> raw(n);
    for (auto& v : raw) v = Rat(Int(next_below(rng, D + 1)), Int(D)) - Rat(1, 2);
    return normalize_balanced(F, d, std::move(raw));
}

FunctionTable sample_fourier(const gf::Field& F, int d, std::mt19937_64& rng,
                             const SearchConfig& cfg) {
    const std::size_t n = pow_int(Int(F.q()), d).convert_to<std::size_t>();
    gf::PhaseTable phases(F.p());
    const int terms = std::max(1, cfg.fourier_terms);
    std::vector<std::size_t> rs(terms);
    std::vector<double> mags(terms), thetas(terms);
    for (int s = 0; s < terms; ++s) {
        rs[s] = 1 + next_below(rng, n - 1);
        mags[s] = (1.0 + static_cast<double>(next_below(rng, 8))) / 8.0;
        thetas[s] = 2.0 * 3.14159265358979323846 * static_cast<double>(next_below(rng, 64)) / 64.0;
    }
    std::vector<elem> r(d), x(d);
    std::vector<std::vector<elem>> rvecs(terms, std::vector<elem>(d));
    for (int s = 0; s < terms; ++s) {
        std::size_t idx = rs[s];
        for (int t = d - 1; t >= 0; --t) {
            rvecs[s][t] = static_cast<elem>(idx % F.q());
            idx /= F.q();
        }
    }
    std::vector<Rat> raw(n);
    const Int denom = Int(1) << 20;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t idx = i;
        for (int t = d - 1; t >= 0; --t) {
            x[t] = static_cast<elem>(idx % F.q());
            idx /= F.q();
        }
        double val = 0;
        for (int s = 0; s < terms; ++s) {
            elem tr = F.trace(F.dot(rvecs[s], x));
            double angle = 2.0 * 3.14159265358979323846 * static_cast<double>(tr) /
                               static_cast<double>(F.p()) +
                           thetas[s];
            val += mags[s] * std::cos(angle);
        }
        raw[i] = Rat(Int(std::llround(val * std::ldexp(1.0, 20))), denom);
    }
    return normalize_balanced(F, d, std::move(raw));
}

FunctionTable sample_product(const gf::Field& F, int d, std::mt19937_64& rng,
                             const SearchConfig& cfg) {
    if (d < 2) return sample_grid(F, d, rng, cfg);
    const std::int64_t q = F.q();
    // Balanced sign factor on the first coordinate.
    std::vector<int> sigma(q, 0);
    const long pairs = 1 + static_cast<long>(next_below(rng, static_cast<std::uint64_t>(q / 2)));
    std::vector<int> pos(q);
    for (std::int64_t i = 0; i < q; ++i) pos[i] = static_cast<int>(i);
    for (std::int64_t i = q - 1; i > 0; --i) {
        std::swap(pos[i], pos[next_below(rng, static_cast<std::uint64_t>(i + 1))]);
    }
    for (long s = 0; s < pairs; ++s) {
        sigma[pos[2 * s]] = 1;
        sigma[pos[2 * s + 1]] = -1;
    }
    // Grid factor on the remaining coordinates.
    const std::size_t tail = pow_int(Int(q), d - 1).convert_to<std::size_t>();
    const std::uint64_t D = static_cast<std::uint64_t>(cfg.grid_denom);
    std::vector<Rat> u(tail);
    for (auto& v : u) v = Rat(Int(next_below(rng, D + 1)), Int(D)) - Rat(1, 2);
    std::vector<Rat> raw(static_cast<std::size_t>(q) * tail);
    for (std::size_t i = 0; i < raw.size(); ++i) {
        int s = sigma[i / tail];
        raw[i] = s == 0 ? Rat(0) : (s > 0 ? u[i % tail] : -u[i % tail]);
    }
    return FunctionTable(F, d, std::move(raw));  // exactly balanced by construction
}

FunctionTable draw_sample(const gf::Field& F, int d, std::mt19937_64& rng,
                          const SearchConfig& cfg) {
    if (cfg.sampler == "grid") return sample_grid(F, d, rng, cfg);
    if (cfg.sampler == "fourier") return sample_fourier(F, d, rng, cfg);
    if (cfg.sampler == "product") return sample_product(F, d, rng, cfg);
    throw usage_error("unknown sampler: '" + cfg.sampler + "'");
}

}  // namespace

SearchResult random_balanced_search(const LinearSystem& L, int d, const SearchConfig& config,
                                    const Budget& budget) {
    if (d < 1) throw usage_error("search: d must be >= 1");
    auto records = linsys::critical_sets(L, budget);  // usage_error when m < 2
    std::mt19937_64 rng(config.seed);
    SearchResult out;
    out.sampler = config.sampler;
    out.best_value = Rat(1);  // any S is <= |C(L)|, start above 0

    std::optional<FunctionTable> best_f;
    bool have_best = false;
    for (long i = 0; i < config.samples; ++i) {
        FunctionTable f = draw_sample(L.field(), d, rng, config);
        ++out.samples_run;
        if (f.max_abs() == 0) continue;
        Rat S = 0;
        for (const auto& rec : records) S += density::lambda(rec.L_B, f, budget);
        if (!have_best || S < out.best_value) {
            have_best = true;
            out.best_value = S;
            out.best_index = i;
            best_f = std::move(f);
        }
    }
    if (have_best && out.best_value < 0) {
        CertificateReport rep = critical_sum_certify(L, *best_f, budget);
        rep.route = "search:" + config.sampler;
        rep.seed = config.seed;
        out.report = std::move(rep);
    }
    return out;
}

// --- pipeline ----------------------------------------------------------------

namespace {

// Variable identification for a redundant system: merge x_j into x_i.
LinearSystem strip_pair(const LinearSystem& L, int i, int j) {
    const auto& F = L.field();
    linsys::Matrix rows;
    for (const auto& row : L.rows()) {
        std::vector<elem> r;
        r.reserve(L.k() - 1);
        for (int c = 0; c < L.k(); ++c) {
            if (c == j) continue;
            r.push_back(c == i ? F.add(row[i], row[j]) : row[c]);
        }
        rows.push_back(std::move(r));
    }
    return LinearSystem::row_space_of(F, rows);
}

int find_weight_one_column(const LinearSystem& L, const Budget& budget) {
    int col = -1;
    L.for_each_row_space_vector(budget, [&](std::span<const elem> v) {
        if (col >= 0) return;
        int w = 0, pos = -1;
        for (int idx = 0; idx < static_cast<int>(v.size()); ++idx) {
            if (v[idx] != 0) {
                ++w;
                pos = idx;
            }
        }
        if (w == 1) col = pos;
    });
    return col;
}

}  // namespace

PipelineResult uncommonness_pipeline(const LinearSystem& input, const PipelineOptions& opts) {
    PipelineResult result;
    const Budget& budget = opts.budget;

    // Full-rank square systems are common regardless of redundancy.
    if (input.m() == input.k()) {
        result.classification = "common (m = k: only the zero solution)";
        return result;
    }

    LinearSystem L = input;
    // Redundant systems reduce to an irredundant core on fewer variables.
    while (true) {
        auto rw = linsys::redundancy(L, budget);
        if (!rw.redundant) break;
        result.diagnostics.push_back("identified x" + std::to_string(rw.i + 1) + " = x" +
                                     std::to_string(rw.j + 1) + "; reduced to " +
                                     std::to_string(L.k() - 1) + " variables");
        if (L.k() <= 2) {
            // x1 = x2 alone: solutions are the diagonal.
            result.classification = "common (reduces to a trivial identification)";
            return result;
        }
        try {
            L = strip_pair(L, rw.i, rw.j);
        } catch (const usage_error&) {
            result.classification = "common (reduces to a trivial system)";
            return result;
        }
    }

    if (L.m() == L.k()) {
        result.classification = "common (m = k: only the zero solution)";
        return result;
    }
    if (L.m() == 1) {
        const auto& row = L.rows()[0];
        bool has_zero = std::any_of(row.begin(), row.end(), [](elem a) { return a == 0; });
        if (has_zero) {
            result.classification =
                "inconclusive (single equation with unused variables; classifier needs all "
                "coefficients nonzero)";
            return result;
        }
        bool common = classify_single_equation_common(L.field(), row);
        result.classification = common
                                    ? "common (single-equation classifier)"
                                    : "uncommon (single-equation classifier; no certificate emitted)";
        return result;
    }

    const int s = linsys::s_of(L, budget);
    result.diagnostics.push_back("s(L) = " + std::to_string(s) +
                                 ", c(L) = " + std::to_string(linsys::c_of(L, budget)));
    const std::string& route = opts.route;

    auto run_search_ladder = [&]() -> std::optional<CertificateReport> {
        const char* samplers[] = {"grid", "fourier", "product"};
        for (int d = 1; d <= opts.d_max; ++d) {
            for (const char* sampler : samplers) {
                SearchConfig cfg;
                cfg.sampler = sampler;
                cfg.seed = opts.seed;
                cfg.samples = opts.samples;
                SearchResult sr = random_balanced_search(L, d, cfg, budget);
                result.diagnostics.push_back("search d=" + std::to_string(d) + " sampler=" +
                                             sampler + ": best critical sum " +
                                             rat_str(sr.best_value) + " at sample " +
                                             std::to_string(sr.best_index));
                if (sr.report) return sr.report;
            }
        }
        return std::nullopt;
    };

    if (s == 1 && (route == "auto" || route == "s1")) {
        // A = {0}: pick the smallest n with 2^{1-k} q^{n(k-m)} > 1.
        int n = 1;
        while (Rat(L.solution_count(n)) * density::benchmark(L.k()) <= 1) ++n;
        const std::size_t size = pow_int(Int(L.field().q()), n).convert_to<std::size_t>();
        std::vector<Rat> values(size, Rat(-1, 2));
        values[0] = Rat(1, 2);
        FunctionTable f(L.field(), n, std::move(values));
        auto verdict = density::commonness_witness_check(L, f, budget);
        CertificateReport rep{L, f};
        rep.alpha_scale = 1;
        rep.delta_value = verdict.delta_value;
        rep.benchmark_value = verdict.benchmark_value;
        rep.verdict = verdict.certified ? Verdict::certified : Verdict::inconclusive;
        rep.route = "s1";
        rep.seed = opts.seed;
        int col = find_weight_one_column(L, budget);
        result.diagnostics.push_back("induced equation x" + std::to_string(col + 1) +
                                     " = 0; A = {0} witness at n = " + std::to_string(n));
        if (rep.verdict == Verdict::certified) {
            result.classification = "uncommon (certified, s=1 route)";
            result.report = std::move(rep);
        } else {
            result.classification = "inconclusive (s=1 witness failed; raise n budget)";
        }
        return result;
    }

    if (route == "s1") throw usage_error("route s1 requires s(L) = 1");

    if (s == 3 && (route == "auto" || route == "gowers")) {
        require_odd(L.field(), "the s=3 construction");
        auto records = linsys::critical_sets(L, budget);
        std::vector<const linsys::CriticalSetRecord*> rank2;
        for (const auto& rec : records) {
            if (rec.m_B == 2) rank2.push_back(&rec);
        }
        if (rank2.empty()) {
            result.diagnostics.push_back("no rank-2 critical subsystem; skipping the construction");
        } else {
            const LinearSystem& Lstar = rank2.front()->L_B;
            DerivedAlpha da = derive_alpha(Lstar, budget);
            PsiSpec psi_spec(L.field(), 1, Rat(1, 4));
            FunctionTable psi = psi_table(psi_spec, budget);
            // Largest n whose critical-sum evaluation stays within budget.
            bool has_rank1 = rank2.size() < records.size();
            int n = opts.gowers_n;
            if (n <= 0) {
                n = 2;
                const double logq = std::log(static_cast<double>(L.field().q()));
                const double cap = std::log(budget.max_evals.convert_to<double>());
                const int worst = has_rank1 ? 3 : 2;
                while (n + 1 <= 8 && (n + 1) * worst * logq <= cap) ++n;
            }
            GowersSpec gspec{L.field(), {da.alpha.begin(), da.alpha.end()}, psi, n};
            FunctionTable G = gowers_twist(gspec, budget);
            FunctionTable star = psi_star(G);
            Rat S = 0;
            for (const auto& rec : records) S += density::lambda(rec.L_B, star, budget);
            auto census = quadratic_terms(Lstar, da.alpha, 4, budget);
            result.diagnostics.push_back(
                "gowers assembly at n=" + std::to_string(n) + ": critical sum " + rat_str(S) +
                ", K_L* = " + std::to_string(census.vanishing) + "/" +
                std::to_string(census.total));
            if (S < 0) {
                CertificateReport rep = critical_sum_certify(L, star, budget);
                rep.route = "gowers";
                rep.seed = opts.seed;
                result.classification = "uncommon (certified, gowers route)";
                result.report = std::move(rep);
                return result;
            }
            result.diagnostics.push_back(
                "construction non-negative at this n (the asymptotic margin needs larger n); "
                "falling back to search");
        }
        if (route == "gowers") {
            result.classification = "inconclusive (gowers construction did not certify)";
            return result;
        }
    }

    if (route == "gowers" && s != 3) throw usage_error("route gowers requires s(L) = 3");
    if (route == "s2" && s != 2) throw usage_error("route s2 requires s(L) = 2");

    // Even s (including s=2) and fallbacks: randomized witness search.
    if (auto rep = run_search_ladder()) {
        result.classification = "uncommon (certified, search route)";
        result.report = std::move(rep);
        return result;
    }
    result.classification = "inconclusive (no negative critical sum found within budget)";
    return result;
}

VerifyResult verify_certificate(const CertificateReport& report, const Budget& budget) {
    VerifyResult out;
    auto fail = [&](const std::string& msg) { out.failures.push_back(msg); };

    if (report.benchmark_value != density::benchmark(report.system.k())) {
        fail("benchmark mismatch: expected " + rat_str(density::benchmark(report.system.k())));
    }
    if (report.witness.max_abs() > Rat(1, 2)) fail("witness exceeds [-1/2, 1/2]");
    const bool balanced_route = report.route != "s1";
    if (balanced_route) {
        if (!report.witness.balanced()) fail("witness is not balanced");
        if (report.verdict == Verdict::certified &&
            !(report.alpha_scale > 0 && report.alpha_scale <= Rat(1, 4))) {
            fail("alpha scale outside (0, 1/4]");
        }
        if (report.sum_critical) {
            try {
                auto records = linsys::critical_sets(report.system, budget);
                Rat S = 0;
                for (const auto& rec : records) S += density::lambda(rec.L_B, report.witness, budget);
                if (S != *report.sum_critical) {
                    fail("critical sum mismatch: recomputed " + rat_str(S));
                } else if (report.verdict == Verdict::certified) {
                    Rat expect = -S / Rat(pow_int(Int(2), report.system.k() + 2));
                    if (expect != report.alpha_scale) {
                        fail("alpha scale mismatch: expected " + rat_str(expect));
                    }
                }
            } catch (const usage_error& e) {
                fail(std::string("cannot recompute critical sum: ") + e.what());
            }
        }
    } else {
        if (report.alpha_scale != 1) fail("s1 route must have alpha_scale = 1");
    }

    FunctionTable g = report.witness.scaled(report.alpha_scale);
    out.recomputed_delta = density::delta(report.system, g, budget);
    if (report.delta_value && *report.delta_value != out.recomputed_delta) {
        fail("delta mismatch: recomputed " + rat_str(out.recomputed_delta));
    }
    if (report.verdict == Verdict::certified) {
        if (!report.delta_value) fail("certified report missing delta");
        if (!(out.recomputed_delta < report.benchmark_value)) {
            fail("certified inequality does not hold: delta = " + rat_str(out.recomputed_delta));
        }
    }
    out.pass = out.failures.empty();
    return out;
}

}  // namespace fqcommon::certify
