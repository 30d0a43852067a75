#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fqcommon/gf.hpp"
#include "fqcommon/numeric.hpp"

namespace fqcommon::linsys {

using gf::elem;
using Matrix = std::vector<std::vector<elem>>;

/// A nonzero vector of the row space: an induced equation with its support.
struct RowSpaceVector {
    std::vector<elem> coeffs;
    std::vector<int> support;  // indices of nonzero entries
    int weight = 0;            // |support|
};

/// An (m x k)-system over F_q with linearly independent rows, stored in
/// canonical form: row-reduced echelon, leftmost pivots, pivots normalized
/// to 1, rows ordered by pivot column. Equality and equivalence checks go
/// through this form.
class LinearSystem {
public:
    /// Rejects rank-deficient input, reporting the computed rank.
    static LinearSystem from_rows(const gf::Field& field, const Matrix& rows);
    /// Row-reduces and silently drops dependent rows (used when a reduction
    /// step may legitimately lower the rank). Throws only on a zero row space.
    static LinearSystem row_space_of(const gf::Field& field, const Matrix& rows);

    const gf::Field& field() const { return field_; }
    int m() const { return m_; }
    int k() const { return k_; }
    const Matrix& rows() const { return rows_; }
    const std::vector<int>& pivot_columns() const { return pivots_; }
    std::vector<int> free_columns() const;

    bool operator==(const LinearSystem& o) const {
        return field_ == o.field_ && rows_ == o.rows_;
    }

    /// q^{n(k-m)}
    Int solution_count(int n) const;

    /// Streams every solution over F_q^n exactly once, as k vectors of
    /// length n (buffer owned by the enumerator; do not retain). Order is
    /// a fixed odometer over the free columns.
    void for_each_solution(int n, const Budget& budget,
                           const std::function<void(const std::vector<std::vector<elem>>&)>& fn) const;

    /// Streams all q^m - 1 nonzero row-space vectors exactly once.
    void for_each_row_space_vector(const Budget& budget,
                                   const std::function<void(std::span<const elem>)>& fn) const;

    /// Materialized row-space stream with support sets and weights.
    std::vector<RowSpaceVector> row_space_vectors(const Budget& budget = {}) const;

    /// True iff v lies in the row space.
    bool in_row_space(std::span<const elem> v) const;

private:
    LinearSystem(gf::Field field, int m, int k, Matrix rows, std::vector<int> pivots)
        : field_(std::move(field)), m_(m), k_(k), rows_(std::move(rows)), pivots_(std::move(pivots)) {}

    gf::Field field_;
    int m_ = 0;
    int k_ = 0;
    Matrix rows_;
    std::vector<int> pivots_;
};

/// Minimal number of nonzero coefficients among induced equations
/// (minimum Hamming weight of the row space).
int s_of(const LinearSystem& L, const Budget& budget = {});
/// s(L) rounded up to even parity.
int c_of(const LinearSystem& L, const Budget& budget = {});

struct RedundancyWitness {
    bool redundant = false;
    int i = -1, j = -1;  // 0-based variable indices with x_i - x_j = 0 induced
};
RedundancyWitness redundancy(const LinearSystem& L, const Budget& budget = {});

struct CriticalSetRecord {
    std::vector<int> B;  // 0-based, ascending, |B| = c(L)
    int m_B = 0;
    LinearSystem L_B;  // (m_B x |B|)-system on the B variables
};

/// Every B with |B| = c(L) supporting a nonzero row-space vector, with the
/// maximal-rank induced system on B. Requires m >= 2.
std::vector<CriticalSetRecord> critical_sets(const LinearSystem& L, const Budget& budget = {});

/// q^{n(k - c(L) - m + m_B)}
Int extension_count(const LinearSystem& L, const CriticalSetRecord& rec, int n);

/// True iff deleting the columns in B lowers the rank of L.
bool is_rank_reducing(const LinearSystem& L, const std::vector<int>& B);

/// True iff every row of Lp, zero-padded onto the B positions, lies in L's
/// row space.
bool induces(const LinearSystem& L, const LinearSystem& Lp, const std::vector<int>& B);

/// Identical row spaces.
bool equivalent(const LinearSystem& a, const LinearSystem& b);

/// Explicit variable reorder: column j of the result is column perm[j] of L.
LinearSystem permuted(const LinearSystem& L, const std::vector<int>& perm);

// --- system file I/O ----------------------------------------------------
// Line 1: field config (`q=<p>^<kappa> [modulus=<c0,...,ck>]`);
// line 2: `m k`; then m rows of k decimal element codes. `#` starts a comment.

LinearSystem parse_system(std::istream& in);
LinearSystem parse_system_text(const std::string& text);
LinearSystem load_system_file(const std::string& path);
std::string system_file_text(const LinearSystem& L);

}  // namespace fqcommon::linsys
