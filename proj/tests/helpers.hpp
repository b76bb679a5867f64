#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "sdcnn/graph_io.hpp"
#include "sdcnn/rng.hpp"
#include "sdcnn/sparse.hpp"

namespace sdcnn::testing {

// Path graph 0-1-2: the module-wide hand fixture.
inline SparseMatrix path_adjacency() {
    return from_triplets({{0, 1, 1.0}, {1, 0, 1.0}, {1, 2, 1.0}, {2, 1, 1.0}}, 3, 3);
}

inline SparseMatrix path_transition() {
    return from_triplets({{0, 1, 1.0}, {1, 0, 0.5}, {1, 2, 0.5}, {2, 1, 1.0}}, 3, 3);
}

// Random row-stochastic matrix: every row gets 1..max_row_nnz entries with
// positive weights normalized to sum 1.
inline SparseMatrix random_row_stochastic(Rng& rng, index_t n, index_t max_row_nnz) {
    std::vector<Triplet> triplets;
    for (index_t i = 0; i < n; ++i) {
        const index_t k =
            1 + static_cast<index_t>(rng.below(static_cast<std::uint64_t>(
                    std::min(max_row_nnz, n))));
        std::vector<index_t> cols(n);
        for (index_t c = 0; c < n; ++c) cols[c] = c;
        rng.shuffle(cols);
        std::vector<double> weights(k);
        double sum = 0.0;
        for (index_t j = 0; j < k; ++j) {
            weights[j] = rng.uniform(0.05, 1.0);
            sum += weights[j];
        }
        for (index_t j = 0; j < k; ++j) triplets.push_back({i, cols[j], weights[j] / sum});
    }
    return from_triplets(triplets, n, n);
}

// Random sparse matrix with roughly `fill` fraction of entries set.
inline SparseMatrix random_sparse(Rng& rng, index_t rows, index_t cols, double fill) {
    std::vector<Triplet> triplets;
    for (index_t i = 0; i < rows; ++i)
        for (index_t j = 0; j < cols; ++j)
            if (rng.uniform01() < fill) triplets.push_back({i, j, rng.uniform(-1.0, 1.0)});
    return from_triplets(triplets, rows, cols);
}

inline DenseMatrix random_dense(Rng& rng, index_t rows, index_t cols) {
    DenseMatrix m(rows, cols);
    for (double& v : m.values) v = rng.uniform(-1.0, 1.0);
    return m;
}

// Fresh scratch directory under the system temp root.
inline std::filesystem::path scratch_dir(const std::string& tag) {
    static int counter = 0;
    const auto dir = std::filesystem::temp_directory_path() /
                     ("sdcnn_test_" + tag + "_" + std::to_string(counter++));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline void write_text(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

}  // namespace sdcnn::testing
