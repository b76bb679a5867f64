#include <map>
#include <set>
#include <string>
#include <vector>

#include "sdcnn/errors.hpp"
#include "sdcnn/rng.hpp"
#include "sdcnn/trainer.hpp"

namespace sdcnn {

namespace {

GraphDataset dataset_shell(index_t n, index_t f) {
    GraphDataset ds;
    ds.n_nodes = n;
    ds.n_features = f;
    ds.features = DenseMatrix(n, f, 0.0);
    ds.labels.assign(n, -1);
    ds.train_mask.assign(n, 0);
    ds.valid_mask.assign(n, 0);
    ds.test_mask.assign(n, 0);
    return ds;
}

SparseMatrix adjacency_from_pairs(const std::vector<std::pair<index_t, index_t>>& edges,
                                  index_t n) {
    std::map<std::pair<index_t, index_t>, double> coords;
    for (const auto& [u, v] : edges) {
        coords[{u, v}] += 1.0;
        if (u != v) coords[{v, u}] += 1.0;
    }
    std::vector<Triplet> triplets;
    triplets.reserve(coords.size());
    for (const auto& [key, w] : coords) triplets.push_back({key.first, key.second, w});
    return from_triplets(triplets, n, n);
}

void half_labels(GraphDataset& ds) {
    const index_t cut = (ds.n_nodes + 1) / 2;
    for (index_t i = 0; i < ds.n_nodes; ++i) ds.labels[i] = i < cut ? 0 : 1;
    ds.n_classes = ds.n_nodes > cut ? 2 : 1;
}

void index_features(GraphDataset& ds) {
    for (index_t i = 0; i < ds.n_nodes; ++i) ds.features.at(i, 0) = static_cast<double>(i + 1);
}

// Class-correlated Gaussian features: per-class +/-1 sign pattern scaled by
// `signal`, plus unit noise. Two classes get complementary patterns.
void gaussian_features(GraphDataset& ds, const std::vector<int>& block_of, index_t n_blocks,
                       double signal, Rng& rng) {
    DenseMatrix pattern(n_blocks, ds.n_features, 0.0);
    for (index_t k = 0; k < ds.n_features; ++k) pattern.at(0, k) = rng.rademacher();
    for (index_t b = 1; b < n_blocks; ++b)
        for (index_t k = 0; k < ds.n_features; ++k)
            pattern.at(b, k) = n_blocks == 2 ? -pattern.at(0, k) : rng.rademacher();
    for (index_t i = 0; i < ds.n_nodes; ++i)
        for (index_t k = 0; k < ds.n_features; ++k)
            ds.features.at(i, k) = signal * pattern.at(block_of[i], k) + rng.normal();
}

GraphDataset make_path(const SynthParams& p) {
    GraphDataset ds = dataset_shell(p.n_nodes, p.n_features);
    std::vector<std::pair<index_t, index_t>> edges;
    for (index_t i = 0; i + 1 < p.n_nodes; ++i) edges.emplace_back(i, i + 1);
    ds.adjacency = adjacency_from_pairs(edges, p.n_nodes);
    index_features(ds);
    half_labels(ds);
    return ds;
}

GraphDataset make_complete(const SynthParams& p) {
    GraphDataset ds = dataset_shell(p.n_nodes, p.n_features);
    std::vector<std::pair<index_t, index_t>> edges;
    for (index_t i = 0; i < p.n_nodes; ++i)
        for (index_t j = i + 1; j < p.n_nodes; ++j) edges.emplace_back(i, j);
    ds.adjacency = adjacency_from_pairs(edges, p.n_nodes);
    index_features(ds);
    half_labels(ds);
    return ds;
}

GraphDataset make_sbm(const SynthParams& p) {
    if (p.blocks < 1 || p.blocks > p.n_nodes)
        throw InputError("generate_synthetic: blocks must be in [1, n_nodes]");
    if (p.p_in < 0.0 || p.p_in > 1.0 || p.p_out < 0.0 || p.p_out > 1.0)
        throw InputError("generate_synthetic: edge probabilities must be in [0, 1]");

    GraphDataset ds = dataset_shell(p.n_nodes, p.n_features);
    std::vector<int> block_of(p.n_nodes);
    for (index_t i = 0; i < p.n_nodes; ++i)
        block_of[i] = static_cast<int>(i * p.blocks / p.n_nodes);

    Rng rng(p.seed);
    std::vector<std::pair<index_t, index_t>> edges;
    for (index_t i = 0; i < p.n_nodes; ++i) {
        for (index_t j = i + 1; j < p.n_nodes; ++j) {
            const double prob = block_of[i] == block_of[j] ? p.p_in : p.p_out;
            if (rng.uniform01() < prob) edges.emplace_back(i, j);
        }
    }
    ds.adjacency = adjacency_from_pairs(edges, p.n_nodes);
    for (index_t i = 0; i < p.n_nodes; ++i) ds.labels[i] = block_of[i];
    ds.n_classes = p.blocks;
    gaussian_features(ds, block_of, p.blocks, p.feature_signal, rng);
    return ds;
}

// Preferential attachment: an (m+1)-clique seed, then each new node attaches
// to m distinct existing nodes sampled proportionally to degree.
GraphDataset make_scale_free(const SynthParams& p) {
    const index_t m = p.attach_edges;
    if (m < 1 || m + 1 > p.n_nodes)
        throw InputError("generate_synthetic: attach_edges must be in [1, n_nodes - 1]");

    GraphDataset ds = dataset_shell(p.n_nodes, p.n_features);
    Rng rng(p.seed);
    std::vector<std::pair<index_t, index_t>> edges;
    std::vector<index_t> endpoint_bag;
    for (index_t i = 0; i <= m; ++i) {
        for (index_t j = i + 1; j <= m; ++j) {
            edges.emplace_back(i, j);
            endpoint_bag.push_back(i);
            endpoint_bag.push_back(j);
        }
    }
    for (index_t t = m + 1; t < p.n_nodes; ++t) {
        std::set<index_t> targets;
        while (static_cast<index_t>(targets.size()) < m)
            targets.insert(endpoint_bag[rng.below(endpoint_bag.size())]);
        for (const index_t target : targets) {
            edges.emplace_back(t, target);
            endpoint_bag.push_back(t);
            endpoint_bag.push_back(target);
        }
    }
    ds.adjacency = adjacency_from_pairs(edges, p.n_nodes);
    half_labels(ds);
    std::vector<int> block_of(p.n_nodes);
    for (index_t i = 0; i < p.n_nodes; ++i) block_of[i] = ds.labels[i];
    gaussian_features(ds, block_of, ds.n_classes, p.feature_signal, rng);
    return ds;
}

}  // namespace

const char* synth_kind_name(SynthKind k) {
    switch (k) {
        case SynthKind::Path: return "path";
        case SynthKind::Complete: return "complete";
        case SynthKind::Sbm: return "sbm";
        case SynthKind::ScaleFree: return "scale_free";
    }
    return "sbm";
}

SynthKind parse_synth_kind(const std::string& s) {
    if (s == "path") return SynthKind::Path;
    if (s == "complete") return SynthKind::Complete;
    if (s == "sbm") return SynthKind::Sbm;
    if (s == "scale_free") return SynthKind::ScaleFree;
    throw ConfigError("unknown synthetic kind '" + s +
                      "' (expected path|complete|sbm|scale_free)");
}

GraphDataset generate_synthetic(const SynthParams& params) {
    if (params.n_nodes < 1) throw InputError("generate_synthetic: n_nodes must be >= 1");
    if (params.n_features < 1) throw InputError("generate_synthetic: n_features must be >= 1");
    switch (params.kind) {
        case SynthKind::Path: return make_path(params);
        case SynthKind::Complete: return make_complete(params);
        case SynthKind::Sbm: return make_sbm(params);
        case SynthKind::ScaleFree: return make_scale_free(params);
    }
    throw InputError("generate_synthetic: unknown kind");
}

}  // namespace sdcnn
