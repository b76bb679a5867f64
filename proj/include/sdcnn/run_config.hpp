#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sdcnn/graph_io.hpp"
#include "sdcnn/trainer.hpp"

namespace sdcnn {

// A run is driven by a sectioned key=value config file so experiment setups
// are diffable artifacts. Exactly one of [data] / [synth] selects the input.
struct DataPaths {
    std::string edges;
    std::string features;
    std::string labels;
    bool directed = false;
    bool normalize_features = false;

    bool operator==(const DataPaths&) const = default;
};

struct RunConfig {
    std::optional<DataPaths> data;
    std::optional<SynthParams> synth;
    SplitConfig split;
    TrainConfig train;
    std::vector<double> sweep_thresholds;
    std::vector<index_t> density_hops;
    std::string out_dir = "out";

    bool operator==(const RunConfig&) const = default;
};

RunConfig parse_run_config_text(const std::string& text, const std::string& origin);
RunConfig parse_run_config(const std::string& path);

// Canonical text form; parsing it back yields an equal RunConfig.
std::string serialize_run_config(const RunConfig& config);

// FNV-1a over the canonical form, as a 16-digit hex string.
std::string config_hash(const RunConfig& config);

}  // namespace sdcnn
