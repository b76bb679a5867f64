#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sdcnn/diffusion.hpp"
#include "sdcnn/graph_io.hpp"
#include "sdcnn/model.hpp"

namespace sdcnn {

struct TrainConfig {
    index_t n_hops = 2;
    KernelMode threshold_mode = KernelMode::None;
    double threshold = 0.0;
    double learning_rate = 0.05;
    double momentum = 0.0;  // 0 = plain gradient descent
    index_t max_epochs = 2000;
    index_t patience = 50;  // epochs without validation improvement; 0 disables
    std::uint64_t seed = 1;
    Activation activation = Activation::Tanh;

    bool operator==(const TrainConfig&) const = default;
};

struct Metrics {
    double accuracy = 0.0;
    double macro_f1 = 0.0;
    double loss = 0.0;

    bool operator==(const Metrics&) const = default;
};

struct TrainHistory {
    std::vector<double> train_loss;
    std::vector<double> valid_loss;
    index_t best_epoch = 0;
    index_t epochs_run = 0;

    bool operator==(const TrainHistory&) const = default;
};

struct TrainOutcome {
    DcnnModel model;  // best-validation-loss weights
    TrainHistory history;
    DiffusionKernel kernel;  // built once and reused across epochs
};

// Full-batch gradient descent on the train mask with early stopping on
// validation loss. Deterministic given (dataset, config, seed).
TrainOutcome train(const GraphDataset& dataset, const TrainConfig& config);

enum class Split { Train, Valid, Test };

Metrics evaluate(const DcnnModel& model, const GraphDataset& dataset,
                 const DiffusionKernel& kernel, Split split);

struct SweepRow {
    double threshold = 0.0;
    KernelMode mode = KernelMode::Pre;
    index_t hops = 0;
    double kernel_density = 0.0;
    index_t peak_stored_entries = 0;
    Metrics train;
    Metrics valid;
    Metrics test;
    index_t epochs_run = 0;
    double seconds = 0.0;  // wall time; reported in the run log, not the CSV
    bool ok = true;
    std::string error;
};

struct SweepReport {
    std::vector<SweepRow> rows;
};

// One row per threshold: build the kernel once, record density and ledger,
// train from the same seed, evaluate all splits. A failing threshold is
// recorded on its row and the remaining thresholds still run. Rows may be
// computed concurrently (parallelism > 1); output order always follows the
// input threshold order.
SweepReport sweep(const GraphDataset& dataset, const std::vector<double>& thresholds,
                  KernelMode mode, const TrainConfig& config, int parallelism = 1);

// Fixed-header CSV of the successful rows. Byte-identical across repeat runs
// of the same configuration; wall times are excluded.
std::string sweep_report_csv(const SweepReport& report);

enum class SynthKind { Path, Complete, Sbm, ScaleFree };

const char* synth_kind_name(SynthKind k);
SynthKind parse_synth_kind(const std::string& s);

struct SynthParams {
    SynthKind kind = SynthKind::Sbm;
    index_t n_nodes = 100;
    index_t blocks = 2;       // sbm
    double p_in = 0.3;        // sbm intra-block edge probability
    double p_out = 0.01;      // sbm inter-block edge probability
    index_t n_features = 4;
    double feature_signal = 1.0;  // 0 = pure-noise features
    index_t attach_edges = 2;     // scale_free attachments per node
    std::uint64_t seed = 1;

    bool operator==(const SynthParams&) const = default;
};

// Deterministic synthetic datasets: path and complete graphs with index
// features, stochastic block models and preferential-attachment graphs with
// class-correlated Gaussian features. Split masks are left empty.
GraphDataset generate_synthetic(const SynthParams& params);

}  // namespace sdcnn
