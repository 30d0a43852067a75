#include "fqcommon/fourier.hpp"

#include <cmath>

namespace fqcommon::fourier {

using gf::elem;

namespace {

// Dense op tables for the small fields the Fourier paths run over; keeps the
// inner loops free of polynomial arithmetic.
struct SmallField {
    std::int64_t q, p;
    std::vector<elem> mul;    // q*q
    std::vector<elem> add;    // q*q
    std::vector<elem> trace;  // q

    explicit SmallField(const gf::Field& F) : q(F.q()), p(F.p()) {
        if (q > 4096) throw usage_error("field too large for dense Fourier tables (q > 4096)");
        mul.resize(q * q);
        add.resize(q * q);
        trace.resize(q);
        for (elem a = 0; a < q; ++a) {
            trace[a] = F.trace(a);
            for (elem b = 0; b < q; ++b) {
                mul[a * q + b] = F.mul(a, b);
                add[a * q + b] = F.add(a, b);
            }
        }
    }
    elem mu(elem a, elem b) const { return mul[a * q + b]; }
    elem ad(elem a, elem b) const { return add[a * q + b]; }
};

std::size_t table_size(const gf::Field& F, int n, const Budget& budget, const char* what) {
    Int size = pow_int(Int(F.q()), n);
    budget.require(size * size, what);
    return size.convert_to<std::size_t>();
}

void decompose(std::size_t idx, std::int64_t q, std::span<elem> out) {
    for (int t = static_cast<int>(out.size()) - 1; t >= 0; --t) {
        out[t] = static_cast<elem>(idx % q);
        idx /= q;
    }
}

}  // namespace

FourierTable transform(const density::FunctionTable& f, const Budget& budget) {
    const gf::Field& F = f.field();
    const int n = f.d();
    const std::size_t size = table_size(F, n, budget, "Fourier transform");
    SmallField sf(F);
    gf::PhaseTable phases(F.p());

    std::vector<double> fv(size);
    for (std::size_t i = 0; i < size; ++i) fv[i] = f[i].convert_to<double>();

    FourierTable out{F, n, std::vector<cplx>(size), 1e-9};
    std::vector<elem> r(n), x(n);
    for (std::size_t ri = 0; ri < size; ++ri) {
        decompose(ri, F.q(), r);
        cplx acc = 0;
        // Odometer over x with the dot product maintained incrementally.
        std::fill(x.begin(), x.end(), 0);
        elem dot = 0;
        for (std::size_t xi = 0;; ++xi) {
            if (fv[xi] != 0.0) acc += fv[xi] * phases.omega(-sf.trace[dot]);
            // increment x (last coordinate fastest to match index order)
            int t = n - 1;
            for (; t >= 0; --t) {
                elem old = x[t];
                if (old + 1 < F.q()) {
                    x[t] = old + 1;
                    dot = sf.ad(dot, sf.mu(r[t], sf.ad(x[t], F.neg(old))));
                    break;
                }
                x[t] = 0;
                dot = sf.ad(dot, sf.mu(r[t], sf.ad(0, F.neg(old))));
            }
            if (t < 0) break;
        }
        out.coeffs[ri] = acc / static_cast<double>(size);
    }
    return out;
}

std::vector<cplx> inverse(const FourierTable& t, const Budget& budget) {
    const gf::Field& F = t.field;
    const int n = t.n;
    const std::size_t size = table_size(F, n, budget, "inverse Fourier transform");
    if (t.coeffs.size() != size) throw usage_error("inverse: malformed table");
    SmallField sf(F);
    gf::PhaseTable phases(F.p());

    std::vector<cplx> out(size);
    std::vector<elem> r(n), x(n);
    for (std::size_t xi = 0; xi < size; ++xi) {
        decompose(xi, F.q(), x);
        cplx acc = 0;
        for (std::size_t ri = 0; ri < size; ++ri) {
            decompose(ri, F.q(), r);
            elem dot = 0;
            for (int i = 0; i < n; ++i) dot = sf.ad(dot, sf.mu(r[i], x[i]));
            acc += t.coeffs[ri] * phases.omega(sf.trace[dot]);
        }
        out[xi] = acc;
    }
    return out;
}

double parseval_gap(const density::FunctionTable& f, const FourierTable& t) {
    double lhs = 0;
    for (const cplx& c : t.coeffs) lhs += std::norm(c);
    double rhs = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        double v = f[i].convert_to<double>();
        rhs += v * v;
    }
    rhs /= static_cast<double>(f.size());
    return std::abs(lhs - rhs);
}

cplx single_equation_lambda(const density::FunctionTable& f, std::span<const elem> coeffs,
                            const Budget& budget) {
    const gf::Field& F = f.field();
    for (elem a : coeffs) {
        if (a == 0) throw usage_error("single-equation identity requires nonzero coefficients");
        if (!F.valid(a)) throw usage_error("coefficient outside [0, q)");
    }
    FourierTable t = transform(f, budget);
    const int n = f.d();
    const std::size_t size = t.coeffs.size();
    SmallField sf(F);

    cplx total = 0;
    std::vector<elem> r(n), s(n);
    for (std::size_t ri = 0; ri < size; ++ri) {
        decompose(ri, F.q(), r);
        cplx prod = 1.0;
        for (elem a : coeffs) {
            std::size_t idx = 0;
            for (int t2 = 0; t2 < n; ++t2) {
                idx = idx * static_cast<std::size_t>(F.q()) +
                      static_cast<std::size_t>(sf.mu(a, r[t2]));
            }
            prod *= t.coeffs[idx];
        }
        total += prod;
    }
    return total;
}

namespace {

void check_subspace(const gf::Field& F, const AffineSubspace& W) {
    if (W.d < 0 || W.d > W.n || static_cast<int>(W.base.size()) != W.d) {
        throw usage_error("malformed affine subspace handle");
    }
    for (elem a : W.base) {
        if (!F.valid(a)) throw usage_error("subspace base point outside [0, q)");
    }
}

}  // namespace

cplx affine_quadratic_sum(const gf::Field& F, const AffineSubspace& W1, const QuadraticForm& Q,
                          std::span<const elem> z, const Budget& budget) {
    check_subspace(F, W1);
    if (static_cast<int>(z.size()) != W1.n) throw usage_error("z dimension mismatch");
    const int n = W1.n, d = W1.d;
    Int wsize = pow_int(Int(F.q()), n - d);
    budget.require(wsize, "affine quadratic sum");
    gf::PhaseTable phases(F.p());

    std::vector<elem> x(n, 0);
    for (int i = 0; i < d; ++i) x[i] = W1.base[i];
    const elem zz = F.dot(z, z);

    cplx acc = 0;
    std::vector<elem> w(n - d, 0);
    while (true) {
        for (int t = 0; t < n - d; ++t) x[d + t] = w[t];
        elem qval = F.add(F.add(F.mul(Q.alpha, F.dot(x, x)), F.mul(Q.beta, F.dot(x, z))),
                          F.mul(Q.gamma, zz));
        acc += phases.omega(F.trace(qval));
        int t = n - d - 1;
        for (; t >= 0; --t) {
            if (++w[t] < F.q()) break;
            w[t] = 0;
        }
        if (t < 0) break;
    }
    Int total = pow_int(Int(F.q()), n);
    return acc / total.convert_to<double>();
}

cplx affine_quadratic_sum_pair(const gf::Field& F, const AffineSubspace& W1,
                               const AffineSubspace& W2, const QuadraticForm& Q,
                               const Budget& budget) {
    check_subspace(F, W1);
    check_subspace(F, W2);
    if (W1.n != W2.n || W1.d != W2.d) throw usage_error("subspace shape mismatch");
    const int n = W1.n, d = W1.d;
    Int wsize = pow_int(Int(F.q()), 2 * (n - d));
    budget.require(wsize, "affine quadratic double sum");
    gf::PhaseTable phases(F.p());

    std::vector<elem> x(n, 0), y(n, 0);
    for (int i = 0; i < d; ++i) {
        x[i] = W1.base[i];
        y[i] = W2.base[i];
    }
    cplx acc = 0;
    std::vector<elem> w(2 * (n - d), 0);
    while (true) {
        for (int t = 0; t < n - d; ++t) {
            x[d + t] = w[t];
            y[d + t] = w[n - d + t];
        }
        elem qval = F.add(F.add(F.mul(Q.alpha, F.dot(x, x)), F.mul(Q.beta, F.dot(x, y))),
                          F.mul(Q.gamma, F.dot(y, y)));
        acc += phases.omega(F.trace(qval));
        int t = static_cast<int>(w.size()) - 1;
        for (; t >= 0; --t) {
            if (++w[t] < F.q()) break;
            w[t] = 0;
        }
        if (t < 0) break;
    }
    Int total = pow_int(Int(F.q()), 2 * n);
    return acc / total.convert_to<double>();
}

BoundReport verify_fourier_bound(const density::FunctionTable& g, int d, double tolerance,
                                 const Budget& budget) {
    if (d < 0 || d > g.d()) throw usage_error("verify_fourier_bound: invalid base dimension");
    FourierTable t = transform(g, budget);
    BoundReport rep;
    for (const cplx& c : t.coeffs) rep.max_coeff = std::max(rep.max_coeff, std::abs(c));
    rep.bound = std::pow(static_cast<double>(g.field().q()),
                         static_cast<double>(d) - static_cast<double>(g.d()) / 2.0);
    rep.slack = rep.bound + tolerance - rep.max_coeff;
    rep.pass = rep.max_coeff <= rep.bound + tolerance;
    return rep;
}

}  // namespace fqcommon::fourier
