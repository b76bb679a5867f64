#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sdcnn/sparse.hpp"

namespace sdcnn {

enum class KernelMode { None, Pre, Post };

const char* kernel_mode_name(KernelMode m);
KernelMode parse_kernel_mode(const std::string& s);

// Stored-entry accounting for a kernel build. Entries are index+value pairs
// for sparse matrices and n_rows*n_cols for dense ones, so the counts are
// machine independent.
struct MemoryLedger {
    std::vector<index_t> per_slice_nnz;    // j = 0..H
    std::vector<index_t> per_slice_bound;  // analytic per-slice entry bound
    index_t peak_stored_entries = 0;       // max simultaneous entries during build
    index_t dense_equivalent_entries = 0;  // N^2 * (H+1)
};

// The (H+1)-slice transient diffusion kernel {P^0 .. P^H}. The pre path (and
// the unthresholded mode) keeps sparse slices; the post path computes dense
// powers and stores each slice densely after thresholding.
struct DiffusionKernel {
    index_t n_nodes = 0;
    index_t n_hops = 0;  // H; slices are j = 0..H
    KernelMode mode = KernelMode::None;
    double threshold_value = 0.0;
    std::vector<SparseMatrix> sparse_slices;
    std::vector<DenseMatrix> dense_slices;
    MemoryLedger ledger;

    bool sparse_path() const { return mode != KernelMode::Post; }
    index_t n_slices() const { return n_hops + 1; }
    index_t slice_nnz(index_t j) const { return ledger.per_slice_nnz[j]; }
    DenseMatrix slice_as_dense(index_t j) const;
};

// N x (H+1) x F tensor of per-hop node features; hop 0 equals the input
// features exactly.
struct HopTensor {
    index_t n_nodes = 0;
    index_t n_hops = 0;
    index_t n_features = 0;
    std::vector<double> values;  // [hop][node][feature]

    HopTensor() = default;
    HopTensor(index_t nodes, index_t hops, index_t features)
        : n_nodes(nodes),
          n_hops(hops),
          n_features(features),
          values(static_cast<std::size_t>(nodes) * (hops + 1) * features, 0.0) {}

    double& at(index_t i, index_t j, index_t k) {
        return values[(static_cast<std::size_t>(j) * n_nodes + i) * n_features + k];
    }
    double at(index_t i, index_t j, index_t k) const {
        return values[(static_cast<std::size_t>(j) * n_nodes + i) * n_features + k];
    }
    // Start of the N x F block for hop j.
    double* hop_block(index_t j) {
        return values.data() + static_cast<std::size_t>(j) * n_nodes * n_features;
    }
    const double* hop_block(index_t j) const {
        return values.data() + static_cast<std::size_t>(j) * n_nodes * n_features;
    }
};

using DiffusedFeatures = HopTensor;

// Thresholds P first, then computes the power series of the thresholded
// matrix by repeated sparse multiplication. Only sparse slices are ever
// materialized.
DiffusionKernel build_pre(const SparseMatrix& p, double sigma, index_t n_hops);

// Computes exact dense powers of P and thresholds each one for storage; the
// dense intermediates dominate the ledger.
DiffusionKernel build_post(const SparseMatrix& p, double rho, index_t n_hops);

// Unthresholded kernel; numerically identical to build_pre(p, 0, H).
DiffusionKernel build_none(const SparseMatrix& p, index_t n_hops);

// Stored nonzeros across slices divided by N^2 * (H+1).
double density(const DiffusionKernel& kernel);

// Stacks slice[j] * X over hops; hop 0 is X itself.
DiffusedFeatures diffuse_features(const DiffusionKernel& kernel, const DenseMatrix& x);

MemoryLedger memory_report(const DiffusionKernel& kernel);

// Process-wide count of kernel builds; lets callers assert a kernel is built
// once per configuration and reused.
std::uint64_t kernel_build_count();

}  // namespace sdcnn
