#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fqcommon/numeric.hpp"

namespace fqcommon::gf {

/// Canonical element code: the base-p integer of the polynomial coefficients,
/// constant term least significant. For kappa = 1 this is the residue.
using elem = std::int64_t;

/// Immutable description of F_{p^kappa}. Safe to copy and share; all
/// arithmetic goes through const member functions.
class Field {
public:
    static Field prime(std::int64_t p);
    /// Extension with the built-in modulus (lexicographically least monic
    /// irreducible, highest-degree coefficients compared first).
    static Field make(std::int64_t p, int kappa);
    /// Extension with a caller-supplied modulus, ascending-degree
    /// coefficients c0..c_kappa. Must be monic and irreducible over F_p.
    static Field make(std::int64_t p, int kappa, std::vector<elem> modulus);

    /// Parses a field config line: `q=<p>^<kappa> [modulus=<c0,...,ck>]`.
    /// `q=<prime>` is accepted for kappa = 1.
    static Field parse_config(std::string_view text);
    std::string config_string() const;

    std::int64_t p() const { return p_; }
    int kappa() const { return kappa_; }
    std::int64_t q() const { return q_; }
    /// Ascending-degree modulus (size kappa+1); empty when kappa == 1.
    const std::vector<elem>& modulus() const { return modulus_; }

    bool operator==(const Field& o) const {
        return p_ == o.p_ && kappa_ == o.kappa_ && modulus_ == o.modulus_;
    }
    bool operator!=(const Field& o) const { return !(*this == o); }

    bool valid(elem a) const { return a >= 0 && a < q_; }

    elem add(elem a, elem b) const;
    elem sub(elem a, elem b) const;
    elem neg(elem a) const;
    elem mul(elem a, elem b) const;
    elem inv(elem a) const;  // domain_error on zero
    elem pow(elem a, std::int64_t e) const;
    elem pow(elem a, const Int& e) const;

    /// Tr(x) = sum_{i<kappa} x^{p^i}; result code lies in [0, p).
    elem trace(elem a) const;

    elem dot(std::span<const elem> u, std::span<const elem> v) const;

    /// Embeds an integer residue into the prime subfield.
    elem from_int(std::int64_t v) const;

    /// Convenience when scanning elements of the prime subfield.
    bool in_prime_subfield(elem a) const { return a >= 0 && a < p_; }

private:
    Field(std::int64_t p, int kappa, std::vector<elem> modulus);

    std::int64_t p_ = 0;
    int kappa_ = 1;
    std::int64_t q_ = 0;
    std::vector<elem> modulus_;  // ascending degree; empty for kappa == 1
};

/// Element bound to its field; arithmetic checks that operands share a spec.
struct FieldElement {
    const Field* field = nullptr;
    elem code = 0;

    FieldElement() = default;
    FieldElement(const Field& f, elem c) : field(&f), code(c) {}

    FieldElement operator+(const FieldElement& o) const;
    FieldElement operator-(const FieldElement& o) const;
    FieldElement operator*(const FieldElement& o) const;
    FieldElement operator-() const;
    FieldElement inverse() const;
    bool operator==(const FieldElement& o) const;
};

/// Exponent e of omega^e with omega = exp(2*pi*i/p). Addition is mod p;
/// materialization to a complex number happens only here, from a cached
/// table so equal phases are bit-identical.
class PhaseTable {
public:
    explicit PhaseTable(std::int64_t p);

    std::int64_t p() const { return p_; }
    std::complex<double> omega(std::int64_t e) const;  // e reduced mod p
    /// 2*cos(2*pi*e/p)
    double cos2(std::int64_t e) const;

private:
    std::int64_t p_;
    std::vector<std::complex<double>> table_;
};

struct PhaseExponent {
    std::int64_t p = 0;
    std::int64_t value = 0;  // in [0, p)

    PhaseExponent operator+(const PhaseExponent& o) const;
    PhaseExponent operator-() const;
};

/// Lexicographically least monic irreducible of the given degree over F_p
/// (highest-degree coefficients compared first). Ascending-degree output.
std::vector<elem> find_irreducible(std::int64_t p, int degree);

bool is_irreducible(std::int64_t p, std::span<const elem> poly_ascending);

/// F_q-linear identification of F_q^{r*d} with (F_{q^r})^d for a prime base
/// field F_q. lift groups r consecutive base coordinates into one extension
/// element; lower inverts it.
struct ExtensionEmbedding {
    Field base;
    Field ext;
    int degree;

    std::vector<elem> lift(std::span<const elem> xs) const;
    std::vector<elem> lower(std::span<const elem> ys) const;
};

/// Requires degree >= 2 and a prime base field.
ExtensionEmbedding extension_embed(const Field& base, int degree);

}  // namespace fqcommon::gf
