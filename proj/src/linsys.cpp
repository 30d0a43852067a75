#include "fqcommon/linsys.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace fqcommon::linsys {

namespace {

// In-place row reduction to canonical RREF. Returns pivot columns.
std::vector<int> rref(const gf::Field& F, Matrix& rows) {
    const int nrows = static_cast<int>(rows.size());
    const int ncols = nrows == 0 ? 0 : static_cast<int>(rows[0].size());
    std::vector<int> pivots;
    int r = 0;
    for (int c = 0; c < ncols && r < nrows; ++c) {
        int sel = -1;
        for (int i = r; i < nrows; ++i) {
            if (rows[i][c] != 0) {
                sel = i;
                break;
            }
        }
        if (sel < 0) continue;
        std::swap(rows[r], rows[sel]);
        elem lead = rows[r][c];
        if (lead != 1) {
            elem il = F.inv(lead);
            for (int j = 0; j < ncols; ++j) rows[r][j] = F.mul(rows[r][j], il);
        }
        for (int i = 0; i < nrows; ++i) {
            if (i == r || rows[i][c] == 0) continue;
            elem factor = rows[i][c];
            for (int j = 0; j < ncols; ++j) {
                rows[i][j] = F.sub(rows[i][j], F.mul(factor, rows[r][j]));
            }
        }
        pivots.push_back(c);
        ++r;
    }
    rows.resize(r);
    return pivots;
}

void validate_entries(const gf::Field& F, const Matrix& rows) {
    if (rows.empty()) throw usage_error("system must have at least one row");
    const size_t k = rows[0].size();
    if (k == 0) throw usage_error("system must have at least one variable");
    for (const auto& row : rows) {
        if (row.size() != k) throw usage_error("ragged coefficient matrix");
        for (elem a : row) {
            if (!F.valid(a)) {
                throw usage_error("coefficient " + std::to_string(a) + " outside [0, q)");
            }
        }
    }
}

int rank_of(const gf::Field& F, Matrix rows) {
    return static_cast<int>(rref(F, rows).size());
}

}  // namespace

LinearSystem LinearSystem::from_rows(const gf::Field& field, const Matrix& input) {
    validate_entries(field, input);
    Matrix rows = input;
    std::vector<int> pivots = rref(field, rows);
    const int rank = static_cast<int>(rows.size());
    if (rank < static_cast<int>(input.size())) {
        throw usage_error("rows are linearly dependent: got " + std::to_string(input.size()) +
                          " rows of rank " + std::to_string(rank));
    }
    if (rank == 0) throw usage_error("zero matrix is not a valid system");
    return LinearSystem(field, rank, static_cast<int>(input[0].size()), std::move(rows),
                        std::move(pivots));
}

LinearSystem LinearSystem::row_space_of(const gf::Field& field, const Matrix& input) {
    validate_entries(field, input);
    Matrix rows = input;
    std::vector<int> pivots = rref(field, rows);
    if (rows.empty()) throw usage_error("zero row space");
    const int m = static_cast<int>(rows.size());
    const int k = static_cast<int>(input[0].size());
    return LinearSystem(field, m, k, std::move(rows), std::move(pivots));
}

std::vector<int> LinearSystem::free_columns() const {
    std::vector<int> free;
    size_t pi = 0;
    for (int c = 0; c < k_; ++c) {
        if (pi < pivots_.size() && pivots_[pi] == c) {
            ++pi;
        } else {
            free.push_back(c);
        }
    }
    return free;
}

Int LinearSystem::solution_count(int n) const {
    if (n < 1) throw usage_error("solution_count: n must be >= 1");
    return pow_int(Int(field_.q()), static_cast<std::uint64_t>(n) * (k_ - m_));
}

void LinearSystem::for_each_solution(
    int n, const Budget& budget,
    const std::function<void(const std::vector<std::vector<elem>>&)>& fn) const {
    if (n < 1) throw usage_error("for_each_solution: n must be >= 1");
    const Int total = solution_count(n);
    budget.require(total, "solution enumeration");
    const auto& F = field_;
    const std::vector<int> free = free_columns();
    const int nfree = static_cast<int>(free.size());

    std::vector<std::vector<elem>> x(k_, std::vector<elem>(n, 0));
    // Odometer over the free assignment, position 0 fastest.
    std::vector<elem> digits(static_cast<size_t>(nfree) * n, 0);

    auto fill_pivots = [&] {
        for (int i = 0; i < m_; ++i) {
            auto& xp = x[pivots_[i]];
            for (int t = 0; t < n; ++t) {
                elem acc = 0;
                for (int j = 0; j < nfree; ++j) {
                    acc = F.add(acc, F.mul(rows_[i][free[j]], x[free[j]][t]));
                }
                xp[t] = F.neg(acc);
            }
        }
    };

    while (true) {
        for (int j = 0; j < nfree; ++j) {
            for (int t = 0; t < n; ++t) x[free[j]][t] = digits[static_cast<size_t>(j) * n + t];
        }
        fill_pivots();
        fn(x);
        size_t pos = 0;
        while (pos < digits.size()) {
            if (++digits[pos] < F.q()) break;
            digits[pos] = 0;
            ++pos;
        }
        if (pos == digits.size()) break;
    }
}

void LinearSystem::for_each_row_space_vector(
    const Budget& budget, const std::function<void(std::span<const elem>)>& fn) const {
    const auto& F = field_;
    budget.require(pow_int(Int(F.q()), m_) - 1, "row-space enumeration");
    std::vector<elem> coeff(m_, 0);
    std::vector<elem> v(k_, 0);
    while (true) {
        size_t pos = 0;
        while (pos < coeff.size()) {
            if (++coeff[pos] < F.q()) break;
            coeff[pos] = 0;
            ++pos;
        }
        if (pos == coeff.size()) break;
        for (int j = 0; j < k_; ++j) {
            elem acc = 0;
            for (int i = 0; i < m_; ++i) {
                if (coeff[i] != 0) acc = F.add(acc, F.mul(coeff[i], rows_[i][j]));
            }
            v[j] = acc;
        }
        fn(v);
    }
}

std::vector<RowSpaceVector> LinearSystem::row_space_vectors(const Budget& budget) const {
    std::vector<RowSpaceVector> out;
    for_each_row_space_vector(budget, [&](std::span<const elem> v) {
        RowSpaceVector rv;
        rv.coeffs.assign(v.begin(), v.end());
        for (int j = 0; j < static_cast<int>(v.size()); ++j) {
            if (v[j] != 0) rv.support.push_back(j);
        }
        rv.weight = static_cast<int>(rv.support.size());
        out.push_back(std::move(rv));
    });
    return out;
}

bool LinearSystem::in_row_space(std::span<const elem> v) const {
    if (static_cast<int>(v.size()) != k_) throw usage_error("in_row_space: length mismatch");
    std::vector<elem> w(v.begin(), v.end());
    for (int i = 0; i < m_; ++i) {
        elem c = w[pivots_[i]];
        if (c == 0) continue;
        for (int j = 0; j < k_; ++j) w[j] = field_.sub(w[j], field_.mul(c, rows_[i][j]));
    }
    return std::all_of(w.begin(), w.end(), [](elem a) { return a == 0; });
}

int s_of(const LinearSystem& L, const Budget& budget) {
    int best = L.k() + 1;
    L.for_each_row_space_vector(budget, [&](std::span<const elem> v) {
        int w = 0;
        for (elem a : v) w += (a != 0);
        if (w < best) best = w;
    });
    return best;
}

int c_of(const LinearSystem& L, const Budget& budget) {
    int s = s_of(L, budget);
    return s % 2 == 0 ? s : s + 1;
}

RedundancyWitness redundancy(const LinearSystem& L, const Budget& budget) {
    RedundancyWitness out;
    L.for_each_row_space_vector(budget, [&](std::span<const elem> v) {
        if (out.redundant) return;
        int i = -1, j = -1, w = 0;
        for (int idx = 0; idx < static_cast<int>(v.size()); ++idx) {
            if (v[idx] != 0) {
                ++w;
                if (i < 0) {
                    i = idx;
                } else {
                    j = idx;
                }
            }
        }
        if (w == 2 && L.field().add(v[i], v[j]) == 0) {
            out = {true, i, j};
        }
    });
    return out;
}

bool is_rank_reducing(const LinearSystem& L, const std::vector<int>& B) {
    std::vector<bool> drop(L.k(), false);
    for (int b : B) {
        if (b < 0 || b >= L.k()) throw usage_error("column index out of range");
        drop[b] = true;
    }
    Matrix rest;
    rest.reserve(L.m());
    for (const auto& row : L.rows()) {
        std::vector<elem> r;
        for (int j = 0; j < L.k(); ++j) {
            if (!drop[j]) r.push_back(row[j]);
        }
        rest.push_back(std::move(r));
    }
    if (rest[0].empty()) return true;  // all columns removed
    return rank_of(L.field(), rest) < L.m();
}

namespace {

// Basis of the row-space vectors supported inside B, restricted to the B
// columns: reduce with the complement columns ordered first; rows whose
// pivot falls in the B block vanish outside B.
Matrix supported_basis(const LinearSystem& L, const std::vector<int>& B) {
    const auto& F = L.field();
    std::vector<bool> inB(L.k(), false);
    for (int b : B) inB[b] = true;
    std::vector<int> order;
    for (int j = 0; j < L.k(); ++j) {
        if (!inB[j]) order.push_back(j);
    }
    const int split = static_cast<int>(order.size());
    for (int b : B) order.push_back(b);

    Matrix perm(L.m(), std::vector<elem>(L.k()));
    for (int i = 0; i < L.m(); ++i) {
        for (int j = 0; j < L.k(); ++j) perm[i][j] = L.rows()[i][order[j]];
    }
    std::vector<int> pivots = rref(F, perm);
    Matrix basis;
    for (size_t i = 0; i < perm.size(); ++i) {
        if (pivots[i] >= split) {
            // Restricted to the B block (already in ascending B order).
            basis.emplace_back(perm[i].begin() + split, perm[i].end());
        }
    }
    return basis;
}

}  // namespace

std::vector<CriticalSetRecord> critical_sets(const LinearSystem& L, const Budget& budget) {
    if (L.m() < 2) {
        throw usage_error("critical sets require a system of rank at least 2");
    }
    const int c = c_of(L, budget);
    const int k = L.k();
    budget.require(binomial(k, c), "critical-set search");

    std::vector<CriticalSetRecord> records;
    std::vector<int> B(c);
    for (int i = 0; i < c; ++i) B[i] = i;
    while (true) {
        Matrix basis = supported_basis(L, B);
        if (!basis.empty()) {
            LinearSystem LB = LinearSystem::from_rows(L.field(), basis);
            records.push_back({B, static_cast<int>(basis.size()), std::move(LB)});
        }
        // next combination
        int i = c - 1;
        while (i >= 0 && B[i] == k - c + i) --i;
        if (i < 0) break;
        ++B[i];
        for (int j = i + 1; j < c; ++j) B[j] = B[j - 1] + 1;
    }
    return records;
}

Int extension_count(const LinearSystem& L, const CriticalSetRecord& rec, int n) {
    const int e = L.k() - static_cast<int>(rec.B.size()) - L.m() + rec.m_B;
    if (e < 0) throw usage_error("extension_count: negative exponent (record inconsistent)");
    return pow_int(Int(L.field().q()), static_cast<std::uint64_t>(n) * e);
}

bool induces(const LinearSystem& L, const LinearSystem& Lp, const std::vector<int>& B) {
    if (static_cast<int>(B.size()) != Lp.k()) {
        throw usage_error("induces: B size must match the induced system's variable count");
    }
    if (L.field() != Lp.field()) throw usage_error("induces: field mismatch");
    for (const auto& row : Lp.rows()) {
        std::vector<elem> padded(L.k(), 0);
        for (size_t t = 0; t < B.size(); ++t) {
            if (B[t] < 0 || B[t] >= L.k()) throw usage_error("induces: column index out of range");
            padded[B[t]] = row[t];
        }
        if (!L.in_row_space(padded)) return false;
    }
    return true;
}

bool equivalent(const LinearSystem& a, const LinearSystem& b) {
    return a.field() == b.field() && a.k() == b.k() && a.rows() == b.rows();
}

LinearSystem permuted(const LinearSystem& L, const std::vector<int>& perm) {
    if (static_cast<int>(perm.size()) != L.k()) throw usage_error("permuted: wrong permutation size");
    Matrix rows(L.m(), std::vector<elem>(L.k()));
    for (int i = 0; i < L.m(); ++i) {
        for (int j = 0; j < L.k(); ++j) rows[i][j] = L.rows()[i][perm[j]];
    }
    return LinearSystem::from_rows(L.field(), rows);
}

LinearSystem parse_system(std::istream& in) {
    std::string line;
    int lineno = 0;
    auto next_content = [&]() -> std::string {
        while (std::getline(in, line)) {
            ++lineno;
            auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            // trim
            auto b = line.find_first_not_of(" \t\r\n");
            if (b == std::string::npos) continue;
            auto e = line.find_last_not_of(" \t\r\n");
            return line.substr(b, e - b + 1);
        }
        throw parse_error("unexpected end of file", lineno + 1);
    };

    gf::Field field = [&] {
        std::string cfg = next_content();
        try {
            return gf::Field::parse_config(cfg);
        } catch (const usage_error& e) {
            throw parse_error(e.what(), lineno);
        }
    }();

    int m = 0, k = 0;
    {
        std::istringstream hs(next_content());
        if (!(hs >> m >> k) || m < 1 || k < 1) {
            throw parse_error("expected 'm k' with positive integers", lineno);
        }
        std::string extra;
        if (hs >> extra) throw parse_error("trailing tokens after 'm k'", lineno);
    }

    Matrix rows;
    for (int i = 0; i < m; ++i) {
        std::istringstream rs(next_content());
        std::vector<elem> row;
        elem v;
        while (rs >> v) row.push_back(v);
        if (static_cast<int>(row.size()) != k) {
            throw parse_error("expected " + std::to_string(k) + " entries, got " +
                                  std::to_string(row.size()),
                              lineno);
        }
        for (elem a : row) {
            if (!field.valid(a)) {
                throw parse_error("element code " + std::to_string(a) + " outside [0, q)", lineno);
            }
        }
        rows.push_back(std::move(row));
    }
    try {
        return LinearSystem::from_rows(field, rows);
    } catch (const usage_error& e) {
        throw parse_error(e.what(), lineno);
    }
}

LinearSystem parse_system_text(const std::string& text) {
    std::istringstream in(text);
    return parse_system(in);
}

LinearSystem load_system_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw usage_error("cannot open system file: " + path);
    return parse_system(in);
}

std::string system_file_text(const LinearSystem& L) {
    std::ostringstream out;
    out << L.field().config_string() << "\n";
    out << L.m() << " " << L.k() << "\n";
    for (const auto& row : L.rows()) {
        for (int j = 0; j < L.k(); ++j) {
            if (j > 0) out << " ";
            out << row[j];
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace fqcommon::linsys
