#include "fqcommon/numeric.hpp"

#include <charconv>

namespace fqcommon {

Int pow_int(const Int& base, std::uint64_t exp) {
    Int result = 1;
    Int b = base;
    while (exp > 0) {
        if (exp & 1) result *= b;
        exp >>= 1;
        if (exp > 0) b *= b;
    }
    return result;
}

Rat pow_rat(const Rat& base, std::int64_t exp) {
    if (exp < 0) {
        if (base == 0) throw domain_error("pow_rat: zero base with negative exponent");
        return pow_rat(Rat(1) / base, -exp);
    }
    Rat result = 1;
    Rat b = base;
    auto e = static_cast<std::uint64_t>(exp);
    while (e > 0) {
        if (e & 1) result *= b;
        e >>= 1;
        if (e > 0) b *= b;
    }
    return result;
}

Int binomial(unsigned n, unsigned k) {
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    Int result = 1;
    for (unsigned i = 0; i < k; ++i) {
        result *= n - i;
        result /= i + 1;
    }
    return result;
}

Int falling_factorial(const Int& d, unsigned l) {
    Int result = 1;
    for (unsigned i = 0; i < l; ++i) result *= d - i;
    return result;
}

std::string rat_str(const Rat& r) {
    return numerator(r).str() + "/" + denominator(r).str();
}

Rat parse_rat(std::string_view s) {
    auto bad = [&] { throw usage_error("invalid rational: '" + std::string(s) + "'"); };
    if (s.empty()) bad();
    auto slash = s.find('/');
    try {
        if (slash == std::string_view::npos) {
            return Rat(Int(std::string(s)));
        }
        Int num(std::string(s.substr(0, slash)));
        Int den(std::string(s.substr(slash + 1)));
        if (den == 0) bad();
        return Rat(num, den);
    } catch (const std::exception&) {
        bad();
    }
    return Rat(0);  // unreachable
}

}  // namespace fqcommon
