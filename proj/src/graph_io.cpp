#include "sdcnn/graph_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "sdcnn/errors.hpp"
#include "sdcnn/rng.hpp"

namespace sdcnn {

namespace {

// Strips '#' comments and returns false for blank lines.
bool payload_line(std::string& line) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    return line.find_first_not_of(" \t\r\n") != std::string::npos;
}

index_t parse_node_id(const std::string& tok, const std::string& file, std::size_t line_no) {
    std::size_t pos = 0;
    index_t id = 0;
    try {
        id = std::stoll(tok, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != tok.size() || id < 0)
        throw DataError(file + ":" + std::to_string(line_no) + ": bad node id '" + tok + "'");
    return id;
}

}  // namespace

GraphDataset load_dataset(const std::string& edge_path, const std::string& feature_path,
                          const std::string& label_path, bool directed,
                          bool normalize_features) {
    GraphDataset ds;

    // Features define the node set.
    std::ifstream feat_in(feature_path);
    if (!feat_in) throw DataError("cannot open feature file '" + feature_path + "'");
    std::map<index_t, std::vector<double>> feature_rows;
    index_t n_features = -1;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(feat_in, line)) {
        ++line_no;
        if (!payload_line(line)) continue;
        std::istringstream ss(line);
        std::string tok;
        ss >> tok;
        const index_t id = parse_node_id(tok, feature_path, line_no);
        std::vector<double> row;
        double v = 0.0;
        while (ss >> v) row.push_back(v);
        if (!ss.eof())
            throw DataError(feature_path + ":" + std::to_string(line_no) +
                            ": malformed feature value");
        if (n_features < 0) n_features = static_cast<index_t>(row.size());
        if (static_cast<index_t>(row.size()) != n_features)
            throw DataError(feature_path + ":" + std::to_string(line_no) +
                            ": expected " + std::to_string(n_features) + " features, got " +
                            std::to_string(row.size()));
        if (!feature_rows.emplace(id, std::move(row)).second)
            throw DataError(feature_path + ":" + std::to_string(line_no) +
                            ": duplicate feature row for node " + std::to_string(id));
    }
    if (feature_rows.empty()) throw DataError("feature file '" + feature_path + "' is empty");

    const index_t n = feature_rows.rbegin()->first + 1;
    for (index_t i = 0; i < n; ++i)
        if (!feature_rows.count(i))
            throw DataError(feature_path + ": missing feature row for node " +
                            std::to_string(i));

    ds.n_nodes = n;
    ds.n_features = std::max<index_t>(n_features, 0);
    ds.features = DenseMatrix(n, ds.n_features);
    for (auto& [id, row] : feature_rows)
        std::copy(row.begin(), row.end(), ds.features.row(id));
    if (normalize_features) {
        for (index_t i = 0; i < n; ++i) {
            double* r = ds.features.row(i);
            double sum = 0.0;
            for (index_t k = 0; k < ds.n_features; ++k) sum += std::abs(r[k]);
            if (sum > 0.0)
                for (index_t k = 0; k < ds.n_features; ++k) r[k] /= sum;
        }
    }

    // Labels; nodes absent from the file stay unlabeled (-1).
    ds.labels.assign(n, -1);
    std::ifstream label_in(label_path);
    if (!label_in) throw DataError("cannot open label file '" + label_path + "'");
    line_no = 0;
    while (std::getline(label_in, line)) {
        ++line_no;
        if (!payload_line(line)) continue;
        std::istringstream ss(line);
        std::string id_tok, class_tok, extra;
        if (!(ss >> id_tok >> class_tok) || (ss >> extra))
            throw DataError(label_path + ":" + std::to_string(line_no) +
                            ": expected 'node_id class_id'");
        const index_t id = parse_node_id(id_tok, label_path, line_no);
        if (id >= n)
            throw DataError(label_path + ":" + std::to_string(line_no) + ": unknown node id " +
                            std::to_string(id));
        std::size_t pos = 0;
        long cls = -1;
        try {
            cls = std::stol(class_tok, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != class_tok.size() || cls < 0)
            throw DataError(label_path + ":" + std::to_string(line_no) +
                            ": non-integer class id '" + class_tok + "'");
        if (ds.labels[id] != -1)
            throw DataError(label_path + ":" + std::to_string(line_no) +
                            ": duplicate label for node " + std::to_string(id));
        ds.labels[id] = static_cast<int>(cls);
        ds.n_classes = std::max<index_t>(ds.n_classes, cls + 1);
    }

    // Edges; duplicate coordinates accumulate.
    std::ifstream edge_in(edge_path);
    if (!edge_in) throw DataError("cannot open edge file '" + edge_path + "'");
    std::map<std::pair<index_t, index_t>, double> coords;
    line_no = 0;
    while (std::getline(edge_in, line)) {
        ++line_no;
        if (!payload_line(line)) continue;
        std::istringstream ss(line);
        std::string src_tok, dst_tok;
        if (!(ss >> src_tok >> dst_tok))
            throw DataError(edge_path + ":" + std::to_string(line_no) +
                            ": expected 'src dst [weight]'");
        const index_t src = parse_node_id(src_tok, edge_path, line_no);
        const index_t dst = parse_node_id(dst_tok, edge_path, line_no);
        if (src >= n || dst >= n)
            throw DataError(edge_path + ":" + std::to_string(line_no) + ": unknown node id " +
                            std::to_string(std::max(src, dst)));
        double weight = 1.0;
        if (ss >> weight) {
            std::string extra;
            if (ss >> extra)
                throw DataError(edge_path + ":" + std::to_string(line_no) +
                                ": trailing tokens after weight");
        } else if (!ss.eof()) {
            throw DataError(edge_path + ":" + std::to_string(line_no) + ": malformed weight");
        }
        if (weight < 0.0)
            throw DataError(edge_path + ":" + std::to_string(line_no) +
                            ": negative edge weight");
        coords[{src, dst}] += weight;
        if (!directed && src != dst) coords[{dst, src}] += weight;
    }

    std::vector<Triplet> triplets;
    triplets.reserve(coords.size());
    for (const auto& [key, w] : coords) triplets.push_back({key.first, key.second, w});
    ds.adjacency = from_triplets(triplets, n, n);

    ds.train_mask.assign(n, 0);
    ds.valid_mask.assign(n, 0);
    ds.test_mask.assign(n, 0);
    return ds;
}

SparseMatrix transition_matrix(const SparseMatrix& adjacency) {
    if (adjacency.n_rows != adjacency.n_cols)
        throw InputError("transition_matrix: adjacency must be square");
    for (const double w : adjacency.values)
        if (w < 0.0) throw InputError("transition_matrix: negative weight");

    SparseMatrix p = adjacency;
#pragma omp parallel for schedule(static)
    for (index_t i = 0; i < p.n_rows; ++i) {
        double sum = 0.0;
        for (index_t q = p.row_offsets[i]; q < p.row_offsets[i + 1]; ++q) sum += p.values[q];
        if (sum == 0.0) continue;  // isolated node keeps an all-zero row
        for (index_t q = p.row_offsets[i]; q < p.row_offsets[i + 1]; ++q) p.values[q] /= sum;
    }
    return p;
}

GraphDataset make_splits(const GraphDataset& dataset, const SplitConfig& config) {
    const auto check_fraction = [](double f, const char* name) {
        if (!(f > 0.0 && f < 1.0))
            throw ConfigError(std::string("make_splits: ") + name + " must be in (0, 1)");
    };
    check_fraction(config.train_fraction, "train_fraction");
    check_fraction(config.valid_fraction, "valid_fraction");
    check_fraction(config.test_fraction, "test_fraction");
    const double sum = config.train_fraction + config.valid_fraction + config.test_fraction;
    if (std::abs(sum - 1.0) > 1e-9)
        throw ConfigError("make_splits: fractions sum to " + std::to_string(sum) + ", not 1");

    GraphDataset out = dataset;
    const index_t n = dataset.n_nodes;
    out.train_mask.assign(n, 0);
    out.valid_mask.assign(n, 0);
    out.test_mask.assign(n, 0);

    std::vector<std::vector<index_t>> by_class(dataset.n_classes);
    for (index_t i = 0; i < n; ++i)
        if (dataset.labels[i] >= 0) by_class[dataset.labels[i]].push_back(i);

    Rng rng(config.seed);
    for (index_t c = 0; c < dataset.n_classes; ++c) {
        auto& nodes = by_class[c];
        if (nodes.empty())
            throw ConfigError("make_splits: class " + std::to_string(c) +
                              " has no labeled nodes, so its training split is empty");
        rng.shuffle(nodes);
        const auto n_c = static_cast<double>(nodes.size());
        index_t n_train = static_cast<index_t>(std::floor(n_c * config.train_fraction + 1e-9));
        n_train = std::max<index_t>(n_train, 1);
        index_t n_valid = static_cast<index_t>(std::floor(n_c * config.valid_fraction + 1e-9));
        n_valid = std::min<index_t>(n_valid, static_cast<index_t>(nodes.size()) - n_train);
        for (std::size_t k = 0; k < nodes.size(); ++k) {
            if (static_cast<index_t>(k) < n_train)
                out.train_mask[nodes[k]] = 1;
            else if (static_cast<index_t>(k) < n_train + n_valid)
                out.valid_mask[nodes[k]] = 1;
            else
                out.test_mask[nodes[k]] = 1;
        }
    }
    return out;
}

}  // namespace sdcnn
