#pragma once

#include <cstdint>
#include <vector>

#include "sdcnn/model.hpp"
#include "sdcnn/sparse.hpp"

// Serial reference implementations used by the tests and the benchmark.
// Everything here is written as plain scalar loops over dense storage and
// never calls into the parallel kernels, so it can serve as an independent
// check of their results.
namespace sdcnn::ref {

DenseMatrix to_dense(const SparseMatrix& a);

// Naive triple-loop product.
DenseMatrix dense_matmul(const DenseMatrix& a, const DenseMatrix& b);

// {I, P, P^2, ..., P^H} as dense matrices.
std::vector<DenseMatrix> dense_power_series(const DenseMatrix& p, index_t n_hops);

// Class probabilities computed scalar-by-scalar from the model definition:
// z[i,j,k] = act(w_c[j,k] * sum_l pstar[j](i,l) * x(l,k)), logits from the
// flattened z through w_d plus bias, then a plain softmax.
DenseMatrix forward_probs(const DcnnModel& model, const std::vector<DenseMatrix>& pstar,
                          const DenseMatrix& x);

// Mean negative log-probability of the true class over masked nodes.
double loss(const DenseMatrix& probs, const std::vector<int>& labels,
            const std::vector<std::uint8_t>& mask);

// Per-row argmax with ties toward the lowest index.
std::vector<index_t> argmax_rows(const DenseMatrix& probs);

double accuracy(const std::vector<index_t>& predicted, const std::vector<int>& labels,
                const std::vector<std::uint8_t>& mask);

// Macro F1 over all classes; a class with no predictions and no members
// contributes 0.
double macro_f1(const std::vector<index_t>& predicted, const std::vector<int>& labels,
                const std::vector<std::uint8_t>& mask, index_t n_classes);

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b);

}  // namespace sdcnn::ref
