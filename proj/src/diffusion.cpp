#include "sdcnn/diffusion.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>

#include "sdcnn/errors.hpp"

namespace sdcnn {

namespace {

std::atomic<std::uint64_t> g_kernel_builds{0};

void validate_build_args(const SparseMatrix& p, double t, index_t n_hops, const char* what) {
    if (p.n_rows != p.n_cols)
        throw InputError(std::string(what) + ": transition matrix must be square");
    if (t < 0.0 || t > 1.0)
        throw InputError(std::string(what) + ": threshold must be in [0, 1]");
    if (n_hops < 0) throw InputError(std::string(what) + ": hop count must be >= 0");
    for (index_t i = 0; i < p.n_rows; ++i) {
        double s = 0.0;
        for (index_t q = p.row_offsets[i]; q < p.row_offsets[i + 1]; ++q) {
            if (p.values[q] < 0.0)
                throw InputError(std::string(what) + ": negative transition probability");
            s += p.values[q];
        }
        if (s > 1.0 + 1e-9)
            throw InputError(std::string(what) + ": row " + std::to_string(i) +
                             " sums to " + std::to_string(s) + " > 1");
    }
}

// Per-row entry bound for slice j: rows of the thresholded matrix hold at
// most floor(1/t) entries because each kept entry is >= t and rows sum to at
// most 1; hop-j neighborhoods then grow by at most that factor per hop.
index_t slice_entry_bound(index_t n, double t, index_t j) {
    if (j == 0) return n;
    if (t <= 0.0) return n * n;
    const auto per_row = static_cast<index_t>(std::floor(1.0 / t + 1e-9));
    index_t rows = 1;
    for (index_t h = 0; h < j; ++h) {
        rows *= per_row;
        if (rows >= n) return n * n;
    }
    return std::min(n * rows, n * n);
}

// Tracks live stored entries during a build and records the high-water mark.
struct PeakCounter {
    index_t live = 0;
    index_t peak = 0;
    void alloc(index_t n) {
        live += n;
        peak = std::max(peak, live);
    }
    void release(index_t n) { live -= n; }
};

DiffusionKernel build_sparse_series(const SparseMatrix& p, double sigma, index_t n_hops,
                                    KernelMode mode) {
    validate_build_args(p, sigma, n_hops, "build_pre");
    const index_t n = p.n_rows;

    DiffusionKernel kernel;
    kernel.n_nodes = n;
    kernel.n_hops = n_hops;
    kernel.mode = mode;
    kernel.threshold_value = sigma;

    PeakCounter counter;
    kernel.sparse_slices.reserve(n_hops + 1);
    kernel.sparse_slices.push_back(SparseMatrix::identity(n));
    counter.alloc(n);
    if (n_hops >= 1) {
        SparseMatrix pbar = threshold(p, sigma);
        counter.alloc(pbar.nnz());
        kernel.sparse_slices.push_back(std::move(pbar));
        for (index_t j = 2; j <= n_hops; ++j) {
            SparseMatrix next = spmm_sparse(kernel.sparse_slices[j - 1], kernel.sparse_slices[1]);
            counter.alloc(next.nnz());
            kernel.sparse_slices.push_back(std::move(next));
        }
    }

    kernel.ledger.per_slice_nnz.resize(n_hops + 1);
    kernel.ledger.per_slice_bound.resize(n_hops + 1);
    for (index_t j = 0; j <= n_hops; ++j) {
        kernel.ledger.per_slice_nnz[j] = kernel.sparse_slices[j].nnz();
        kernel.ledger.per_slice_bound[j] = slice_entry_bound(n, sigma, j);
    }
    kernel.ledger.peak_stored_entries = counter.peak;
    kernel.ledger.dense_equivalent_entries = n * n * (n_hops + 1);

    g_kernel_builds.fetch_add(1, std::memory_order_relaxed);
    return kernel;
}

}  // namespace

const char* kernel_mode_name(KernelMode m) {
    switch (m) {
        case KernelMode::None: return "none";
        case KernelMode::Pre: return "pre";
        case KernelMode::Post: return "post";
    }
    return "none";
}

KernelMode parse_kernel_mode(const std::string& s) {
    if (s == "none") return KernelMode::None;
    if (s == "pre") return KernelMode::Pre;
    if (s == "post") return KernelMode::Post;
    throw ConfigError("unknown kernel mode '" + s + "' (expected none|pre|post)");
}

DenseMatrix DiffusionKernel::slice_as_dense(index_t j) const {
    return sparse_path() ? to_dense(sparse_slices[j]) : dense_slices[j];
}

DiffusionKernel build_pre(const SparseMatrix& p, double sigma, index_t n_hops) {
    return build_sparse_series(p, sigma, n_hops, KernelMode::Pre);
}

DiffusionKernel build_none(const SparseMatrix& p, index_t n_hops) {
    return build_sparse_series(p, 0.0, n_hops, KernelMode::None);
}

DiffusionKernel build_post(const SparseMatrix& p, double rho, index_t n_hops) {
    validate_build_args(p, rho, n_hops, "build_post");
    const index_t n = p.n_rows;

    DiffusionKernel kernel;
    kernel.n_nodes = n;
    kernel.n_hops = n_hops;
    kernel.mode = KernelMode::Post;
    kernel.threshold_value = rho;

    PeakCounter counter;
    kernel.dense_slices.reserve(n_hops + 1);
    kernel.dense_slices.push_back(DenseMatrix::identity(n));
    counter.alloc(n * n);
    if (n_hops >= 1) {
        DenseMatrix power = to_dense(p);  // exact P^1
        counter.alloc(n * n);
        for (index_t j = 1; j <= n_hops; ++j) {
            if (j > 1) {
                DenseMatrix next = spmm_dense(p, power);  // P^j = P * P^(j-1)
                counter.alloc(n * n);
                power = std::move(next);
                counter.release(n * n);
            }
            kernel.dense_slices.push_back(threshold_dense(power, rho));
            counter.alloc(n * n);
        }
        counter.release(n * n);  // final power dropped
    }

    kernel.ledger.per_slice_nnz.resize(n_hops + 1);
    kernel.ledger.per_slice_bound.resize(n_hops + 1);
    for (index_t j = 0; j <= n_hops; ++j) {
        kernel.ledger.per_slice_nnz[j] = count_nonzero(kernel.dense_slices[j]);
        // Post-thresholded slices obey the same per-row pigeonhole as one
        // thresholding pass: entries >= rho in a row summing to <= 1.
        kernel.ledger.per_slice_bound[j] =
            (j == 0) ? n : slice_entry_bound(n, rho, 1);
    }
    kernel.ledger.peak_stored_entries = counter.peak;
    kernel.ledger.dense_equivalent_entries = n * n * (n_hops + 1);

    g_kernel_builds.fetch_add(1, std::memory_order_relaxed);
    return kernel;
}

double density(const DiffusionKernel& kernel) {
    index_t total = 0;
    for (const index_t c : kernel.ledger.per_slice_nnz) total += c;
    const double denom = static_cast<double>(kernel.n_nodes) * kernel.n_nodes *
                         (kernel.n_hops + 1);
    return denom == 0.0 ? 0.0 : static_cast<double>(total) / denom;
}

DiffusedFeatures diffuse_features(const DiffusionKernel& kernel, const DenseMatrix& x) {
    if (x.n_rows != kernel.n_nodes)
        throw InputError("diffuse_features: features have " + std::to_string(x.n_rows) +
                         " rows, kernel has " + std::to_string(kernel.n_nodes) + " nodes");
    const index_t f = x.n_cols;
    HopTensor out(kernel.n_nodes, kernel.n_hops, f);
    if (x.values.empty()) return out;
    std::memcpy(out.hop_block(0), x.values.data(), sizeof(double) * x.values.size());
    for (index_t j = 1; j <= kernel.n_hops; ++j) {
        const DenseMatrix block = kernel.sparse_path()
                                      ? spmm_dense(kernel.sparse_slices[j], x)
                                      : dense_matmul(kernel.dense_slices[j], x);
        std::memcpy(out.hop_block(j), block.values.data(),
                    sizeof(double) * block.values.size());
    }
    return out;
}

MemoryLedger memory_report(const DiffusionKernel& kernel) { return kernel.ledger; }

std::uint64_t kernel_build_count() { return g_kernel_builds.load(std::memory_order_relaxed); }

}  // namespace sdcnn
