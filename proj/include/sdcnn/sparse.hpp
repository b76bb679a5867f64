#pragma once

#include <cstdint>
#include <vector>

namespace sdcnn {

using index_t = std::int64_t;

struct Triplet {
    index_t row = 0;
    index_t col = 0;
    double value = 0.0;
};

// Row-major compressed sparse matrix in canonical form: column indices
// strictly increasing within each row, no stored zeros.
struct SparseMatrix {
    index_t n_rows = 0;
    index_t n_cols = 0;
    std::vector<index_t> row_offsets;  // length n_rows + 1
    std::vector<index_t> col_indices;  // length nnz
    std::vector<double> values;        // length nnz

    SparseMatrix() : row_offsets(1, 0) {}
    SparseMatrix(index_t rows, index_t cols)
        : n_rows(rows), n_cols(cols), row_offsets(static_cast<std::size_t>(rows) + 1, 0) {}

    index_t nnz() const { return static_cast<index_t>(values.size()); }
    index_t row_nnz(index_t i) const { return row_offsets[i + 1] - row_offsets[i]; }

    static SparseMatrix identity(index_t n);

    bool operator==(const SparseMatrix&) const = default;
};

// Row-major dense matrix.
struct DenseMatrix {
    index_t n_rows = 0;
    index_t n_cols = 0;
    std::vector<double> values;  // length n_rows * n_cols

    DenseMatrix() = default;
    DenseMatrix(index_t rows, index_t cols, double fill = 0.0)
        : n_rows(rows),
          n_cols(cols),
          values(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), fill) {}

    double& at(index_t i, index_t j) { return values[static_cast<std::size_t>(i) * n_cols + j]; }
    double at(index_t i, index_t j) const {
        return values[static_cast<std::size_t>(i) * n_cols + j];
    }
    double* row(index_t i) { return values.data() + static_cast<std::size_t>(i) * n_cols; }
    const double* row(index_t i) const {
        return values.data() + static_cast<std::size_t>(i) * n_cols;
    }

    static DenseMatrix identity(index_t n);

    bool operator==(const DenseMatrix&) const = default;
};

// Builds a canonical matrix from coordinate triplets. Zero-valued triplets
// are dropped; duplicate coordinates and out-of-range indices are rejected.
SparseMatrix from_triplets(const std::vector<Triplet>& triplets, index_t n_rows, index_t n_cols);

// Throws InputError if `a` violates the canonical-form invariants.
void validate_canonical(const SparseMatrix& a);

// C = A * B with row-wise accumulation. Entries whose accumulated value is
// exactly 0.0 are dropped; near-zero values are kept.
SparseMatrix spmm_sparse(const SparseMatrix& a, const SparseMatrix& b);

// Y = A * X.
DenseMatrix spmm_dense(const SparseMatrix& a, const DenseMatrix& x);

// C = A * B.
DenseMatrix dense_matmul(const DenseMatrix& a, const DenseMatrix& b);

// Keeps entries with value >= t verbatim; smaller entries are removed.
SparseMatrix threshold(const SparseMatrix& a, double t);

// Zeroes dense entries with value < t.
DenseMatrix threshold_dense(const DenseMatrix& a, double t);

DenseMatrix to_dense(const SparseMatrix& a);

index_t count_nonzero(const DenseMatrix& a);

}  // namespace sdcnn
