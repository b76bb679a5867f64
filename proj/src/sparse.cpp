#include "sdcnn/sparse.hpp"

#include <algorithm>
#include <string>

#include "sdcnn/errors.hpp"

namespace sdcnn {

SparseMatrix SparseMatrix::identity(index_t n) {
    SparseMatrix m(n, n);
    m.col_indices.resize(n);
    m.values.assign(n, 1.0);
    for (index_t i = 0; i < n; ++i) {
        m.row_offsets[i + 1] = i + 1;
        m.col_indices[i] = i;
    }
    return m;
}

DenseMatrix DenseMatrix::identity(index_t n) {
    DenseMatrix m(n, n, 0.0);
    for (index_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
}

SparseMatrix from_triplets(const std::vector<Triplet>& triplets, index_t n_rows,
                           index_t n_cols) {
    if (n_rows < 0 || n_cols < 0) throw InputError("from_triplets: negative dimensions");
    std::vector<Triplet> sorted = triplets;
    for (const Triplet& t : sorted) {
        if (t.row < 0 || t.row >= n_rows || t.col < 0 || t.col >= n_cols) {
            throw InputError("from_triplets: index (" + std::to_string(t.row) + ", " +
                             std::to_string(t.col) + ") out of range for " +
                             std::to_string(n_rows) + "x" + std::to_string(n_cols));
        }
    }
    std::sort(sorted.begin(), sorted.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i].row == sorted[i - 1].row && sorted[i].col == sorted[i - 1].col) {
            throw InputError("from_triplets: duplicate coordinate (" +
                             std::to_string(sorted[i].row) + ", " +
                             std::to_string(sorted[i].col) + ")");
        }
    }

    SparseMatrix m(n_rows, n_cols);
    for (const Triplet& t : sorted) {
        if (t.value == 0.0) continue;
        m.row_offsets[t.row + 1]++;
        m.col_indices.push_back(t.col);
        m.values.push_back(t.value);
    }
    for (index_t i = 0; i < n_rows; ++i) m.row_offsets[i + 1] += m.row_offsets[i];
    return m;
}

void validate_canonical(const SparseMatrix& a) {
    if (a.n_rows < 0 || a.n_cols < 0) throw InputError("sparse: negative dimensions");
    if (a.row_offsets.size() != static_cast<std::size_t>(a.n_rows) + 1)
        throw InputError("sparse: row_offsets length must be n_rows + 1");
    if (a.row_offsets.front() != 0) throw InputError("sparse: row_offsets[0] must be 0");
    if (a.col_indices.size() != a.values.size())
        throw InputError("sparse: col_indices and values length mismatch");
    if (a.row_offsets.back() != a.nnz())
        throw InputError("sparse: row_offsets[n_rows] must equal nnz");
    for (index_t i = 0; i < a.n_rows; ++i) {
        if (a.row_offsets[i + 1] < a.row_offsets[i])
            throw InputError("sparse: row_offsets must be non-decreasing");
        for (index_t p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p) {
            if (a.col_indices[p] < 0 || a.col_indices[p] >= a.n_cols)
                throw InputError("sparse: column index out of range in row " +
                                 std::to_string(i));
            if (p > a.row_offsets[i] && a.col_indices[p] <= a.col_indices[p - 1])
                throw InputError("sparse: column indices must strictly increase in row " +
                                 std::to_string(i));
            if (a.values[p] == 0.0)
                throw InputError("sparse: stored zero in row " + std::to_string(i));
        }
    }
}

SparseMatrix spmm_sparse(const SparseMatrix& a, const SparseMatrix& b) {
    if (a.n_cols != b.n_rows) {
        throw InputError("spmm_sparse: dimension mismatch (" + std::to_string(a.n_cols) +
                         " vs " + std::to_string(b.n_rows) + ")");
    }
    const index_t n = a.n_rows;
    const index_t m = b.n_cols;

    // Row-wise accumulation: each output row is produced independently by a
    // serial scan, so the result does not depend on the thread count.
    std::vector<std::vector<index_t>> row_cols(n);
    std::vector<std::vector<double>> row_vals(n);

#pragma omp parallel
    {
        std::vector<double> acc(m, 0.0);
        std::vector<index_t> mark(m, -1);
        std::vector<index_t> touched;
#pragma omp for schedule(dynamic, 64)
        for (index_t i = 0; i < n; ++i) {
            touched.clear();
            for (index_t p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p) {
                const index_t k = a.col_indices[p];
                const double av = a.values[p];
                for (index_t q = b.row_offsets[k]; q < b.row_offsets[k + 1]; ++q) {
                    const index_t j = b.col_indices[q];
                    if (mark[j] != i) {
                        mark[j] = i;
                        acc[j] = 0.0;
                        touched.push_back(j);
                    }
                    acc[j] += av * b.values[q];
                }
            }
            std::sort(touched.begin(), touched.end());
            row_cols[i].reserve(touched.size());
            row_vals[i].reserve(touched.size());
            for (const index_t j : touched) {
                if (acc[j] != 0.0) {
                    row_cols[i].push_back(j);
                    row_vals[i].push_back(acc[j]);
                }
            }
        }
    }

    SparseMatrix c(n, m);
    for (index_t i = 0; i < n; ++i)
        c.row_offsets[i + 1] = c.row_offsets[i] + static_cast<index_t>(row_cols[i].size());
    c.col_indices.resize(c.row_offsets[n]);
    c.values.resize(c.row_offsets[n]);
#pragma omp parallel for schedule(static)
    for (index_t i = 0; i < n; ++i) {
        std::copy(row_cols[i].begin(), row_cols[i].end(),
                  c.col_indices.begin() + c.row_offsets[i]);
        std::copy(row_vals[i].begin(), row_vals[i].end(), c.values.begin() + c.row_offsets[i]);
    }
    return c;
}

DenseMatrix spmm_dense(const SparseMatrix& a, const DenseMatrix& x) {
    if (a.n_cols != x.n_rows) {
        throw InputError("spmm_dense: dimension mismatch (" + std::to_string(a.n_cols) +
                         " vs " + std::to_string(x.n_rows) + ")");
    }
    DenseMatrix y(a.n_rows, x.n_cols, 0.0);
    const index_t f = x.n_cols;
#pragma omp parallel for schedule(dynamic, 64)
    for (index_t i = 0; i < a.n_rows; ++i) {
        double* out = y.row(i);
        for (index_t p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p) {
            const double av = a.values[p];
            const double* xr = x.row(a.col_indices[p]);
            for (index_t j = 0; j < f; ++j) out[j] += av * xr[j];
        }
    }
    return y;
}

DenseMatrix dense_matmul(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.n_cols != b.n_rows) {
        throw InputError("dense_matmul: dimension mismatch (" + std::to_string(a.n_cols) +
                         " vs " + std::to_string(b.n_rows) + ")");
    }
    DenseMatrix c(a.n_rows, b.n_cols, 0.0);
    const index_t m = b.n_cols;
#pragma omp parallel for schedule(static)
    for (index_t i = 0; i < a.n_rows; ++i) {
        double* out = c.row(i);
        const double* ar = a.row(i);
        for (index_t k = 0; k < a.n_cols; ++k) {
            const double av = ar[k];
            const double* br = b.row(k);
            for (index_t j = 0; j < m; ++j) out[j] += av * br[j];
        }
    }
    return c;
}

SparseMatrix threshold(const SparseMatrix& a, double t) {
    if (t < 0.0) throw InputError("threshold: t must be >= 0");
    SparseMatrix out(a.n_rows, a.n_cols);
    std::vector<index_t> counts(a.n_rows, 0);
#pragma omp parallel for schedule(static)
    for (index_t i = 0; i < a.n_rows; ++i) {
        index_t c = 0;
        for (index_t p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p)
            if (a.values[p] >= t) ++c;
        counts[i] = c;
    }
    for (index_t i = 0; i < a.n_rows; ++i) out.row_offsets[i + 1] = out.row_offsets[i] + counts[i];
    out.col_indices.resize(out.row_offsets[a.n_rows]);
    out.values.resize(out.row_offsets[a.n_rows]);
#pragma omp parallel for schedule(static)
    for (index_t i = 0; i < a.n_rows; ++i) {
        index_t w = out.row_offsets[i];
        for (index_t p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p) {
            if (a.values[p] >= t) {
                out.col_indices[w] = a.col_indices[p];
                out.values[w] = a.values[p];
                ++w;
            }
        }
    }
    return out;
}

DenseMatrix threshold_dense(const DenseMatrix& a, double t) {
    if (t < 0.0) throw InputError("threshold_dense: t must be >= 0");
    DenseMatrix out = a;
#pragma omp parallel for schedule(static)
    for (index_t i = 0; i < a.n_rows; ++i) {
        double* r = out.row(i);
        for (index_t j = 0; j < a.n_cols; ++j)
            if (r[j] < t) r[j] = 0.0;
    }
    return out;
}

DenseMatrix to_dense(const SparseMatrix& a) {
    DenseMatrix d(a.n_rows, a.n_cols, 0.0);
    for (index_t i = 0; i < a.n_rows; ++i)
        for (index_t p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p)
            d.at(i, a.col_indices[p]) = a.values[p];
    return d;
}

index_t count_nonzero(const DenseMatrix& a) {
    index_t n = 0;
    for (const double v : a.values)
        if (v != 0.0) ++n;
    return n;
}

}  // namespace sdcnn
