#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/multiprecision/gmp.hpp>

#include "fqcommon/errors.hpp"

namespace fqcommon {

using Int = boost::multiprecision::mpz_int;
using Rat = boost::multiprecision::mpq_rational;

Int pow_int(const Int& base, std::uint64_t exp);
Rat pow_rat(const Rat& base, std::int64_t exp);  // negative exponents allowed for nonzero base
Int binomial(unsigned n, unsigned k);
Int falling_factorial(const Int& d, unsigned l);

/// Serialized form is always "numerator/denominator" with positive denominator.
std::string rat_str(const Rat& r);
/// Accepts "a/b" or a bare integer.
Rat parse_rat(std::string_view s);

inline Rat rat_abs(const Rat& r) { return r < 0 ? Rat(-r) : r; }

/// Enumeration guard. All solution-space and table walks check against this.
struct Budget {
    Int max_evals{10'000'000};

    void require(const Int& needed, const std::string& context) const {
        if (needed > max_evals) {
            throw budget_error(context, needed.str(), max_evals.str());
        }
    }
};

}  // namespace fqcommon
