#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sdcnn/errors.hpp"
#include "sdcnn/graph_io.hpp"
#include "sdcnn/reference.hpp"
#include "sdcnn/rng.hpp"

#include "helpers.hpp"

using namespace sdcnn;
namespace st = sdcnn::testing;

namespace {

SparseMatrix transpose(const SparseMatrix& a) {
    std::vector<Triplet> triplets;
    for (index_t i = 0; i < a.n_rows; ++i)
        for (index_t q = a.row_offsets[i]; q < a.row_offsets[i + 1]; ++q)
            triplets.push_back({a.col_indices[q], i, a.values[q]});
    return from_triplets(triplets, a.n_cols, a.n_rows);
}

std::filesystem::path write_path_fixture(const std::filesystem::path& dir) {
    st::write_text(dir / "edges.txt", "# path graph\n0 1\n1 2\n");
    st::write_text(dir / "features.txt", "0 1.0\n1 2.0\n2 3.0\n");
    st::write_text(dir / "labels.txt", "0 0\n1 0\n2 1\n");
    return dir;
}

GraphDataset ten_node_dataset() {
    GraphDataset ds;
    ds.n_nodes = 10;
    ds.n_features = 1;
    ds.n_classes = 2;
    ds.adjacency = from_triplets({}, 10, 10);
    ds.features = DenseMatrix(10, 1, 1.0);
    ds.labels = {0, 0, 0, 0, 0, 1, 1, 1, 1, 1};
    ds.train_mask.assign(10, 0);
    ds.valid_mask.assign(10, 0);
    ds.test_mask.assign(10, 0);
    return ds;
}

index_t mask_count(const std::vector<std::uint8_t>& mask) {
    index_t c = 0;
    for (const std::uint8_t m : mask) c += m;
    return c;
}

}  // namespace

TEST_CASE("load_dataset reads the path fixture") {
    const auto dir = st::scratch_dir("load_path");
    write_path_fixture(dir);
    const GraphDataset ds = load_dataset((dir / "edges.txt").string(),
                                         (dir / "features.txt").string(),
                                         (dir / "labels.txt").string(), /*directed=*/false);
    CHECK(ds.n_nodes == 3);
    CHECK(ds.n_features == 1);
    CHECK(ds.n_classes == 2);
    CHECK(ds.adjacency.nnz() == 4);
    CHECK(ds.adjacency == st::path_adjacency());
    CHECK(ds.features.at(1, 0) == 2.0);
    CHECK(ds.labels == std::vector<int>{0, 0, 1});
}

TEST_CASE("load_dataset handles isolated nodes and weights") {
    const auto dir = st::scratch_dir("load_misc");
    st::write_text(dir / "edges.txt", "# no edges\n");
    st::write_text(dir / "features.txt", "0 1.0 0.5\n1 0.0 2.0\n");
    st::write_text(dir / "labels.txt", "0 0\n");
    const GraphDataset isolated =
        load_dataset((dir / "edges.txt").string(), (dir / "features.txt").string(),
                     (dir / "labels.txt").string(), false);
    CHECK(isolated.n_nodes == 2);
    CHECK(isolated.adjacency.nnz() == 0);
    CHECK(isolated.labels[1] == -1);  // unlabeled

    st::write_text(dir / "weighted.txt", "0 1 2.5\n");
    const GraphDataset weighted =
        load_dataset((dir / "weighted.txt").string(), (dir / "features.txt").string(),
                     (dir / "labels.txt").string(), false);
    const DenseMatrix d = ref::to_dense(weighted.adjacency);
    CHECK(d.at(0, 1) == 2.5);
    CHECK(d.at(1, 0) == 2.5);

    const GraphDataset directed =
        load_dataset((dir / "weighted.txt").string(), (dir / "features.txt").string(),
                     (dir / "labels.txt").string(), true);
    CHECK(directed.adjacency.nnz() == 1);
}

TEST_CASE("load_dataset rejects malformed input") {
    const auto dir = st::scratch_dir("load_errors");
    write_path_fixture(dir);

    st::write_text(dir / "bad_edges.txt", "0 7\n");
    CHECK_THROWS_AS(load_dataset((dir / "bad_edges.txt").string(),
                                 (dir / "features.txt").string(),
                                 (dir / "labels.txt").string(), false),
                    DataError);

    st::write_text(dir / "gap_features.txt", "0 1.0\n2 3.0\n");
    CHECK_THROWS_AS(load_dataset((dir / "edges.txt").string(),
                                 (dir / "gap_features.txt").string(),
                                 (dir / "labels.txt").string(), false),
                    DataError);

    st::write_text(dir / "bad_labels.txt", "0 zero\n");
    CHECK_THROWS_AS(load_dataset((dir / "edges.txt").string(),
                                 (dir / "features.txt").string(),
                                 (dir / "bad_labels.txt").string(), false),
                    DataError);

    CHECK_THROWS_AS(load_dataset((dir / "missing.txt").string(),
                                 (dir / "features.txt").string(),
                                 (dir / "labels.txt").string(), false),
                    DataError);
}

TEST_CASE("undirected load yields a symmetric adjacency") {
    Rng rng(31);
    const auto dir = st::scratch_dir("load_sym");
    std::string edges;
    std::string features;
    const index_t n = 12;
    for (index_t i = 0; i < n; ++i) {
        features += std::to_string(i) + " 1.0\n";
        for (index_t j = i + 1; j < n; ++j)
            if (rng.uniform01() < 0.3)
                edges += std::to_string(i) + " " + std::to_string(j) + " " +
                         std::to_string(rng.uniform(0.1, 2.0)) + "\n";
    }
    st::write_text(dir / "edges.txt", edges);
    st::write_text(dir / "features.txt", features);
    st::write_text(dir / "labels.txt", "0 0\n");
    const GraphDataset ds =
        load_dataset((dir / "edges.txt").string(), (dir / "features.txt").string(),
                     (dir / "labels.txt").string(), false);
    CHECK(ds.adjacency == transpose(ds.adjacency));
}

TEST_CASE("normalize_features divides rows by their L1 norm") {
    const auto dir = st::scratch_dir("load_norm");
    st::write_text(dir / "edges.txt", "");
    st::write_text(dir / "features.txt", "0 3.0 1.0\n1 0.0 0.0\n");
    st::write_text(dir / "labels.txt", "0 0\n");
    const GraphDataset ds =
        load_dataset((dir / "edges.txt").string(), (dir / "features.txt").string(),
                     (dir / "labels.txt").string(), false, /*normalize_features=*/true);
    CHECK(ds.features.at(0, 0) == doctest::Approx(0.75));
    CHECK(ds.features.at(0, 1) == doctest::Approx(0.25));
    CHECK(ds.features.at(1, 0) == 0.0);  // zero row left alone
}

TEST_CASE("transition_matrix normalizes rows by weighted degree") {
    const SparseMatrix p = transition_matrix(st::path_adjacency());
    CHECK(p == st::path_transition());

    const SparseMatrix single = transition_matrix(from_triplets({}, 1, 1));
    CHECK(single.nnz() == 0);

    // K3: every off-diagonal entry 0.5.
    const SparseMatrix k3 = transition_matrix(from_triplets(
        {{0, 1, 1.0}, {0, 2, 1.0}, {1, 0, 1.0}, {1, 2, 1.0}, {2, 0, 1.0}, {2, 1, 1.0}}, 3, 3));
    for (const double v : k3.values) CHECK(v == 0.5);

    CHECK_THROWS_AS(transition_matrix(from_triplets({{0, 1, -1.0}}, 2, 2)), InputError);
    CHECK_THROWS_AS(transition_matrix(from_triplets({}, 2, 3)), InputError);
}

TEST_CASE("transition rows sum to one or zero and nnz is preserved") {
    Rng rng(88);
    for (int trial = 0; trial < 20; ++trial) {
        const index_t n = 3 + static_cast<index_t>(rng.below(20));
        std::vector<Triplet> triplets;
        for (index_t i = 0; i < n; ++i)
            for (index_t j = 0; j < n; ++j)
                if (i != j && rng.uniform01() < 0.2)
                    triplets.push_back({i, j, rng.uniform(0.1, 3.0)});
        const SparseMatrix adj = from_triplets(triplets, n, n);
        const SparseMatrix p = transition_matrix(adj);
        CHECK(p.nnz() == adj.nnz());
        for (index_t i = 0; i < n; ++i) {
            double sum = 0.0;
            for (index_t q = p.row_offsets[i]; q < p.row_offsets[i + 1]; ++q)
                sum += p.values[q];
            if (p.row_nnz(i) == 0)
                CHECK(sum == 0.0);
            else
                CHECK(std::abs(sum - 1.0) <= 1e-12);
        }
    }
}

TEST_CASE("make_splits is stratified, disjoint, and deterministic") {
    const GraphDataset ds = ten_node_dataset();
    SplitConfig cfg;
    cfg.train_fraction = 0.6;
    cfg.valid_fraction = 0.2;
    cfg.test_fraction = 0.2;
    cfg.seed = 7;

    const GraphDataset split = make_splits(ds, cfg);
    CHECK(mask_count(split.train_mask) == 6);
    CHECK(mask_count(split.valid_mask) == 2);
    CHECK(mask_count(split.test_mask) == 2);
    for (index_t i = 0; i < 10; ++i) {
        const int memberships = split.train_mask[i] + split.valid_mask[i] + split.test_mask[i];
        CHECK(memberships == 1);  // every labeled node in exactly one split
    }

    // Each class contributes floor(5 * 0.6) = 3 training nodes.
    for (int cls = 0; cls < 2; ++cls) {
        index_t in_train = 0;
        for (index_t i = 0; i < 10; ++i)
            if (split.labels[i] == cls && split.train_mask[i]) ++in_train;
        CHECK(in_train == 3);
    }

    const GraphDataset again = make_splits(ds, cfg);
    CHECK(again.train_mask == split.train_mask);
    CHECK(again.valid_mask == split.valid_mask);
    CHECK(again.test_mask == split.test_mask);
}

TEST_CASE("make_splits leaves unlabeled nodes out and validates config") {
    GraphDataset ds = ten_node_dataset();
    ds.labels[9] = -1;
    SplitConfig cfg;
    const GraphDataset split = make_splits(ds, cfg);
    CHECK(split.train_mask[9] == 0);
    CHECK(split.valid_mask[9] == 0);
    CHECK(split.test_mask[9] == 0);

    GraphDataset sparse_classes = ten_node_dataset();
    sparse_classes.n_classes = 3;  // class 2 has no members
    CHECK_THROWS_AS(make_splits(sparse_classes, cfg), ConfigError);

    SplitConfig bad = cfg;
    bad.train_fraction = 0.9;
    CHECK_THROWS_AS(make_splits(ds, bad), ConfigError);
    bad = cfg;
    bad.valid_fraction = 0.0;
    CHECK_THROWS_AS(make_splits(ds, bad), ConfigError);
}
