#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sdcnn/sparse.hpp"

namespace sdcnn {

// A node-classification dataset: graph, features, labels, and split masks.
// Labels use -1 for unlabeled nodes; labeled nodes carry [0, n_classes).
struct GraphDataset {
    index_t n_nodes = 0;
    index_t n_features = 0;
    index_t n_classes = 0;
    SparseMatrix adjacency;  // N x N, nonnegative weights
    DenseMatrix features;    // N x F
    std::vector<int> labels;
    std::vector<std::uint8_t> train_mask;
    std::vector<std::uint8_t> valid_mask;
    std::vector<std::uint8_t> test_mask;
};

struct SplitConfig {
    double train_fraction = 0.6;
    double valid_fraction = 0.2;
    double test_fraction = 0.2;
    std::uint64_t seed = 7;

    bool operator==(const SplitConfig&) const = default;
};

// Loads a whitespace-separated edge list ("src dst [weight]", '#' comments),
// a feature file ("node_id f1 .. fF") and a label file ("node_id class_id";
// absent nodes are unlabeled). Node count comes from the feature file, which
// must cover ids 0..N-1. Undirected edges are symmetrized; duplicate
// coordinates accumulate.
GraphDataset load_dataset(const std::string& edge_path, const std::string& feature_path,
                          const std::string& label_path, bool directed,
                          bool normalize_features = false);

// Degree-normalized transition matrix: each nonzero row of the adjacency is
// divided by its (weighted) row sum. Rows of isolated nodes stay all-zero.
SparseMatrix transition_matrix(const SparseMatrix& adjacency);

// Deterministic stratified splits over labeled nodes; every class present in
// the labels contributes at least one training node.
GraphDataset make_splits(const GraphDataset& dataset, const SplitConfig& config);

}  // namespace sdcnn
