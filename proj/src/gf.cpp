#include "fqcommon/gf.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

namespace fqcommon::gf {

namespace {

constexpr int kMaxKappa = 24;

bool is_prime(std::int64_t n) {
    if (n < 2) return false;
    for (std::int64_t d = 2; d * d <= n; ++d) {
        if (n % d == 0) return false;
    }
    return true;
}

std::int64_t checked_pow(std::int64_t p, int kappa) {
    std::int64_t q = 1;
    for (int i = 0; i < kappa; ++i) {
        if (q > (std::int64_t(1) << 62) / p) {
            throw usage_error("field size p^kappa exceeds the configured integer width");
        }
        q *= p;
    }
    return q;
}

using Poly = std::vector<elem>;  // ascending degree, may carry leading zeros

int degree_of(const Poly& f) {
    for (int i = static_cast<int>(f.size()) - 1; i >= 0; --i) {
        if (f[i] != 0) return i;
    }
    return -1;
}

// Remainder of a by b over F_p; b monic of degree db.
Poly poly_mod(Poly a, const Poly& b, int db, std::int64_t p) {
    int da = degree_of(a);
    while (da >= db) {
        elem c = a[da];
        if (c != 0) {
            for (int j = 0; j <= db; ++j) {
                a[da - db + j] = ((a[da - db + j] - c * b[j]) % p + p * p) % p;
            }
        }
        --da;
        while (da >= 0 && a[da] == 0) --da;
    }
    a.resize(std::max(da + 1, 0));
    return a;
}

}  // namespace

bool is_irreducible(std::int64_t p, std::span<const elem> poly) {
    int deg = static_cast<int>(poly.size()) - 1;
    if (deg < 1) return false;
    if (poly[deg] != 1) return false;
    if (deg == 1) return true;
    if (poly[0] == 0) return false;  // divisible by t
    Poly f(poly.begin(), poly.end());
    // Trial division by every monic polynomial of degree 1..deg/2.
    for (int dd = 1; 2 * dd <= deg; ++dd) {
        std::int64_t count = 1;
        for (int i = 0; i < dd; ++i) count *= p;
        Poly g(dd + 1, 0);
        g[dd] = 1;
        for (std::int64_t code = 0; code < count; ++code) {
            std::int64_t c = code;
            for (int i = 0; i < dd; ++i) {
                g[i] = c % p;
                c /= p;
            }
            if (degree_of(poly_mod(f, g, dd, p)) < 0) return false;
        }
    }
    return true;
}

std::vector<elem> find_irreducible(std::int64_t p, int degree) {
    if (degree < 1) throw usage_error("find_irreducible: degree must be >= 1");
    if (degree == 1) return {0, 1};
    std::int64_t count = 1;
    for (int i = 0; i < degree; ++i) {
        if (count > (std::int64_t(1) << 56) / p) {
            throw usage_error("find_irreducible: search space too large");
        }
        count *= p;
    }
    Poly f(degree + 1, 0);
    f[degree] = 1;
    // code = c_{deg-1} p^{deg-1} + ... + c_0, so ascending code enumerates
    // candidates in lexicographic order of (c_{deg-1}, ..., c_0).
    for (std::int64_t code = 0; code < count; ++code) {
        std::int64_t c = code;
        for (int i = 0; i < degree; ++i) {
            f[i] = c % p;
            c /= p;
        }
        if (is_irreducible(p, f)) return f;
    }
    throw usage_error("find_irreducible: no irreducible polynomial found within search budget");
}

namespace {

// Built-in moduli for the spec'd prime powers (descending-degree
// lexicographically least monic irreducible), ascending-degree storage.
const std::vector<elem>* builtin_modulus(std::int64_t p, int kappa) {
    static const std::vector<std::pair<std::pair<std::int64_t, int>, std::vector<elem>>> table = {
        {{2, 2}, {1, 1, 1}},        // t^2+t+1
        {{2, 3}, {1, 1, 0, 1}},     // t^3+t+1
        {{3, 2}, {1, 0, 1}},        // t^2+1
        {{2, 4}, {1, 1, 0, 0, 1}},  // t^4+t+1
        {{5, 2}, {2, 0, 1}},        // t^2+2
        {{3, 3}, {1, 2, 0, 1}},     // t^3+2t+1
        {{7, 2}, {1, 0, 1}},        // t^2+1
    };
    for (const auto& [key, mod] : table) {
        if (key.first == p && key.second == kappa) return &mod;
    }
    return nullptr;
}

}  // namespace

Field::Field(std::int64_t p, int kappa, std::vector<elem> modulus)
    : p_(p), kappa_(kappa), modulus_(std::move(modulus)) {
    if (!is_prime(p_)) throw usage_error("field characteristic must be prime, got " + std::to_string(p_));
    if (kappa_ < 1 || kappa_ > kMaxKappa) {
        throw usage_error("field degree kappa must be in [1, " + std::to_string(kMaxKappa) + "]");
    }
    q_ = checked_pow(p_, kappa_);
    if (kappa_ == 1) {
        modulus_.clear();
        return;
    }
    // the multiply kernel accumulates up to 2*kappa*p^2 in an int64
    if (p_ > (std::int64_t(1) << 20)) {
        throw usage_error("extension fields support characteristic up to 2^20");
    }
    if (modulus_.size() != static_cast<size_t>(kappa_) + 1) {
        throw usage_error("modulus must have kappa+1 coefficients");
    }
    for (elem c : modulus_) {
        if (c < 0 || c >= p_) throw usage_error("modulus coefficients must lie in [0, p)");
    }
    if (modulus_.back() != 1) throw usage_error("modulus must be monic");
    if (!is_irreducible(p_, modulus_)) {
        throw usage_error("modulus is not irreducible over F_" + std::to_string(p_));
    }
}

Field Field::prime(std::int64_t p) { return Field(p, 1, {}); }

Field Field::make(std::int64_t p, int kappa) {
    if (kappa == 1) return prime(p);
    if (const auto* mod = builtin_modulus(p, kappa)) return Field(p, kappa, *mod);
    return Field(p, kappa, find_irreducible(p, kappa));
}

Field Field::make(std::int64_t p, int kappa, std::vector<elem> modulus) {
    return Field(p, kappa, std::move(modulus));
}

elem Field::add(elem a, elem b) const {
    if (kappa_ == 1) return (a + b) % p_;
    elem r = 0, scale = 1;
    for (int i = 0; i < kappa_; ++i) {
        elem da = a % p_, db = b % p_;
        a /= p_;
        b /= p_;
        r += ((da + db) % p_) * scale;
        scale *= p_;
    }
    return r;
}

elem Field::neg(elem a) const {
    if (kappa_ == 1) return a == 0 ? 0 : p_ - a;
    elem r = 0, scale = 1;
    for (int i = 0; i < kappa_; ++i) {
        elem d = a % p_;
        a /= p_;
        r += (d == 0 ? 0 : p_ - d) * scale;
        scale *= p_;
    }
    return r;
}

elem Field::sub(elem a, elem b) const { return add(a, neg(b)); }

elem Field::mul(elem a, elem b) const {
    if (kappa_ == 1) {
        return static_cast<elem>((static_cast<__int128>(a) * b) % p_);
    }
    std::array<elem, kMaxKappa> da{}, db{};
    for (int i = 0; i < kappa_; ++i) {
        da[i] = a % p_;
        a /= p_;
        db[i] = b % p_;
        b /= p_;
    }
    std::array<elem, 2 * kMaxKappa> prod{};
    for (int i = 0; i < kappa_; ++i) {
        if (da[i] == 0) continue;
        for (int j = 0; j < kappa_; ++j) prod[i + j] += da[i] * db[j];
    }
    // Reduce modulo the monic modulus.
    for (int i = 2 * kappa_ - 2; i >= kappa_; --i) {
        elem c = prod[i] % p_;
        if (c == 0) continue;
        for (int j = 0; j < kappa_; ++j) {
            prod[i - kappa_ + j] -= c * modulus_[j];
        }
    }
    elem r = 0, scale = 1;
    for (int i = 0; i < kappa_; ++i) {
        elem d = prod[i] % p_;
        if (d < 0) d += p_;
        r += d * scale;
        scale *= p_;
    }
    return r;
}

elem Field::pow(elem a, std::int64_t e) const {
    if (e < 0) throw usage_error("pow: negative exponent");
    elem result = 1;
    elem b = a;
    while (e > 0) {
        if (e & 1) result = mul(result, b);
        e >>= 1;
        if (e > 0) b = mul(b, b);
    }
    return result;
}

elem Field::pow(elem a, const Int& e) const {
    if (e < 0) throw usage_error("pow: negative exponent");
    if (a == 0) return e == 0 ? 1 : 0;
    // a^(q-1) = 1 for a != 0.
    Int reduced = e % (q_ - 1);
    return pow(a, reduced.convert_to<std::int64_t>());
}

elem Field::inv(elem a) const {
    if (a == 0) throw domain_error("inversion of zero in F_" + std::to_string(q_));
    if (q_ == 2) return 1;
    return pow(a, q_ - 2);
}

elem Field::trace(elem a) const {
    elem acc = a;
    elem frob = a;
    for (int i = 1; i < kappa_; ++i) {
        frob = pow(frob, p_);
        acc = add(acc, frob);
    }
    return acc;
}

elem Field::dot(std::span<const elem> u, std::span<const elem> v) const {
    if (u.size() != v.size()) throw usage_error("dot: length mismatch");
    elem acc = 0;
    for (size_t i = 0; i < u.size(); ++i) acc = add(acc, mul(u[i], v[i]));
    return acc;
}

elem Field::from_int(std::int64_t v) const {
    std::int64_t r = v % p_;
    if (r < 0) r += p_;
    return r;
}

Field Field::parse_config(std::string_view text) {
    std::string s(text);
    std::istringstream in(s);
    std::string tok;
    std::int64_t p = 0;
    int kappa = 1;
    std::vector<elem> modulus;
    bool saw_q = false;
    while (in >> tok) {
        if (tok.rfind("q=", 0) == 0) {
            std::string body = tok.substr(2);
            auto caret = body.find('^');
            try {
                if (caret == std::string::npos) {
                    p = std::stoll(body);
                    kappa = 1;
                } else {
                    p = std::stoll(body.substr(0, caret));
                    kappa = std::stoi(body.substr(caret + 1));
                }
            } catch (const std::exception&) {
                throw usage_error("invalid field config: '" + std::string(text) + "'");
            }
            saw_q = true;
        } else if (tok.rfind("modulus=", 0) == 0) {
            std::string body = tok.substr(8);
            std::string cur;
            for (char ch : body + ",") {
                if (ch == ',') {
                    if (cur.empty()) throw usage_error("invalid modulus list");
                    modulus.push_back(std::stoll(cur));
                    cur.clear();
                } else {
                    cur += ch;
                }
            }
        } else {
            throw usage_error("unexpected token in field config: '" + tok + "'");
        }
    }
    if (!saw_q) throw usage_error("field config missing q=...");
    if (modulus.empty()) return make(p, kappa);
    return make(p, kappa, std::move(modulus));
}

std::string Field::config_string() const {
    std::string s = "q=" + std::to_string(p_);
    if (kappa_ > 1) {
        s += "^" + std::to_string(kappa_) + " modulus=";
        for (size_t i = 0; i < modulus_.size(); ++i) {
            if (i > 0) s += ",";
            s += std::to_string(modulus_[i]);
        }
    }
    return s;
}

namespace {
void require_same_field(const FieldElement& a, const FieldElement& b) {
    if (a.field == nullptr || b.field == nullptr || *a.field != *b.field) {
        throw usage_error("field elements from different specs");
    }
}
}  // namespace

FieldElement FieldElement::operator+(const FieldElement& o) const {
    require_same_field(*this, o);
    return {*field, field->add(code, o.code)};
}
FieldElement FieldElement::operator-(const FieldElement& o) const {
    require_same_field(*this, o);
    return {*field, field->sub(code, o.code)};
}
FieldElement FieldElement::operator*(const FieldElement& o) const {
    require_same_field(*this, o);
    return {*field, field->mul(code, o.code)};
}
FieldElement FieldElement::operator-() const { return {*field, field->neg(code)}; }
FieldElement FieldElement::inverse() const { return {*field, field->inv(code)}; }
bool FieldElement::operator==(const FieldElement& o) const {
    require_same_field(*this, o);
    return code == o.code;
}

PhaseTable::PhaseTable(std::int64_t p) : p_(p) {
    table_.reserve(p);
    for (std::int64_t e = 0; e < p; ++e) {
        double angle = 2.0 * std::numbers::pi * static_cast<double>(e) / static_cast<double>(p);
        table_.emplace_back(std::cos(angle), std::sin(angle));
    }
}

std::complex<double> PhaseTable::omega(std::int64_t e) const {
    std::int64_t r = e % p_;
    if (r < 0) r += p_;
    return table_[r];
}

double PhaseTable::cos2(std::int64_t e) const { return 2.0 * omega(e).real(); }

PhaseExponent PhaseExponent::operator+(const PhaseExponent& o) const {
    if (p != o.p) throw usage_error("phase exponents with different characteristic");
    return {p, (value + o.value) % p};
}
PhaseExponent PhaseExponent::operator-() const { return {p, value == 0 ? 0 : p - value}; }

std::vector<elem> ExtensionEmbedding::lift(std::span<const elem> xs) const {
    if (xs.size() % degree != 0) throw usage_error("lift: length not a multiple of the degree");
    std::vector<elem> ys(xs.size() / degree);
    for (size_t i = 0; i < ys.size(); ++i) {
        elem code = 0, scale = 1;
        for (int j = 0; j < degree; ++j) {
            code += xs[i * degree + j] * scale;
            scale *= base.q();
        }
        ys[i] = code;
    }
    return ys;
}

std::vector<elem> ExtensionEmbedding::lower(std::span<const elem> ys) const {
    std::vector<elem> xs(ys.size() * degree);
    for (size_t i = 0; i < ys.size(); ++i) {
        elem code = ys[i];
        for (int j = 0; j < degree; ++j) {
            xs[i * degree + j] = code % base.q();
            code /= base.q();
        }
    }
    return xs;
}

ExtensionEmbedding extension_embed(const Field& base, int degree) {
    if (degree < 2) throw usage_error("extension_embed: target degree must be >= 2");
    if (base.kappa() != 1) {
        throw usage_error(
            "extension_embed: only prime base fields are supported; "
            "F_{p^kappa} bases would need an embedded subfield map");
    }
    Field ext = Field::make(base.p(), degree);
    return ExtensionEmbedding{base, ext, degree};
}

}  // namespace fqcommon::gf
