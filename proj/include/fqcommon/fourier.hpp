#pragma once

#include <complex>
#include <span>
#include <vector>

#include "fqcommon/density.hpp"
#include "fqcommon/gf.hpp"
#include "fqcommon/numeric.hpp"

namespace fqcommon::fourier {

using cplx = std::complex<double>;

/// Fourier coefficients of a function on F_q^n over the characters
/// chi_r(x) = omega^{Tr(r.x)}, omega = exp(2*pi*i/p), indexed like the
/// function table (lexicographic r, first coordinate most significant).
struct FourierTable {
    gf::Field field;
    int n = 0;
    std::vector<cplx> coeffs;
    double tolerance = 1e-9;
};

/// f_hat(r) = E_x f(x) omega^{-Tr(r.x)} by direct summation.
FourierTable transform(const density::FunctionTable& f, const Budget& budget = {});

/// Pointwise reconstruction f(x) = sum_r f_hat(r) omega^{Tr(r.x)}.
std::vector<cplx> inverse(const FourierTable& t, const Budget& budget = {});

/// |sum_r |f_hat(r)|^2 - E_x f(x)^2|
double parseval_gap(const density::FunctionTable& f, const FourierTable& t);

/// Lambda_L(f) = sum_r f_hat(a_1 r) ... f_hat(a_k r) for the single
/// equation a_1 x_1 + ... + a_k x_k = 0, all a_i nonzero.
cplx single_equation_lambda(const density::FunctionTable& f, std::span<const gf::elem> coeffs,
                            const Budget& budget = {});

/// Q(x, y) = alpha (x.x) + beta (x.y) + gamma (y.y)
struct QuadraticForm {
    gf::elem alpha = 0, beta = 0, gamma = 0;
    bool is_zero_form() const { return alpha == 0 && beta == 0 && gamma == 0; }
};

/// W = (base, 0^{n-d}) + 0^d x F_q^{n-d}
struct AffineSubspace {
    int n = 0;
    int d = 0;
    std::vector<gf::elem> base;  // length d
};

/// E_{x in F_q^n} 1_{W1}(x) omega^{Tr(Q(x, z))}
cplx affine_quadratic_sum(const gf::Field& F, const AffineSubspace& W1, const QuadraticForm& Q,
                          std::span<const gf::elem> z, const Budget& budget = {});

/// E_{x,y in F_q^n} 1_{W1}(x) 1_{W2}(y) omega^{Tr(Q(x, y))}
cplx affine_quadratic_sum_pair(const gf::Field& F, const AffineSubspace& W1,
                               const AffineSubspace& W2, const QuadraticForm& Q,
                               const Budget& budget = {});

struct BoundReport {
    double max_coeff = 0;
    double bound = 0;
    double slack = 0;  // bound + tolerance - max_coeff
    bool pass = false;
};

/// Checks max_r |g_hat(r)| against q^{d - n/2} + tolerance for a table g on
/// F_q^n built from a base function on F_q^d.
BoundReport verify_fourier_bound(const density::FunctionTable& g, int d, double tolerance = 1e-9,
                                 const Budget& budget = {});

}  // namespace fqcommon::fourier
