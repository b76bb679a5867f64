#include "sdcnn/cli.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "sdcnn/errors.hpp"
#include "sdcnn/format.hpp"
#include "sdcnn/graph_io.hpp"
#include "sdcnn/run_config.hpp"
#include "sdcnn/trainer.hpp"

namespace sdcnn::cli {

namespace {

namespace fs = std::filesystem;

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << content;
}

std::string timestamp_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

GraphDataset build_dataset(const RunConfig& config, bool with_splits) {
    GraphDataset ds = config.data
                          ? load_dataset(config.data->edges, config.data->features,
                                         config.data->labels, config.data->directed,
                                         config.data->normalize_features)
                          : generate_synthetic(*config.synth);
    if (with_splits) ds = make_splits(ds, config.split);
    return ds;
}

void validate_thresholds(const std::vector<double>& thresholds) {
    if (thresholds.empty()) throw ConfigError("[sweep] thresholds must be non-empty");
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
        if (thresholds[i] < 0.0 || thresholds[i] > 1.0)
            throw ConfigError("[sweep] threshold " + format_double(thresholds[i]) +
                              " outside [0, 1]");
        if (i > 0 && thresholds[i] <= thresholds[i - 1])
            throw ConfigError("[sweep] thresholds must be sorted ascending");
    }
}

std::string metrics_csv(const RunConfig& config, const Metrics& train, const Metrics& valid,
                        const Metrics& test) {
    std::ostringstream out;
    out << "# config_hash=" << config_hash(config) << "\n";
    out << "split,accuracy,macro_f1,loss\n";
    const auto row = [&](const char* name, const Metrics& m) {
        out << name << ',' << format_double(m.accuracy) << ',' << format_double(m.macro_f1)
            << ',' << format_double(m.loss) << '\n';
    };
    row("train", train);
    row("valid", valid);
    row("test", test);
    return out.str();
}

int cmd_train(const RunConfig& config) {
    const GraphDataset ds = build_dataset(config, true);
    const TrainOutcome outcome = train(ds, config.train);
    const Metrics train_m = evaluate(outcome.model, ds, outcome.kernel, Split::Train);
    const Metrics valid_m = evaluate(outcome.model, ds, outcome.kernel, Split::Valid);
    const Metrics test_m = evaluate(outcome.model, ds, outcome.kernel, Split::Test);

    const fs::path out_dir(config.out_dir);
    fs::create_directories(out_dir);
    save_checkpoint({outcome.model, config.train.threshold_mode, config.train.threshold},
                    (out_dir / "checkpoint.json").string());
    write_file(out_dir / "metrics.csv", metrics_csv(config, train_m, valid_m, test_m));

    std::ostringstream history;
    history << "# config_hash=" << config_hash(config) << "\n";
    history << "epoch,train_loss,valid_loss\n";
    for (std::size_t e = 0; e < outcome.history.train_loss.size(); ++e)
        history << (e + 1) << ',' << format_double(outcome.history.train_loss[e]) << ','
                << format_double(outcome.history.valid_loss[e]) << '\n';
    write_file(out_dir / "history.csv", history.str());

    std::cout << "trained " << outcome.history.epochs_run << " epochs (best epoch "
              << outcome.history.best_epoch << "), kernel density "
              << format_double(density(outcome.kernel)) << "\n"
              << "test accuracy " << format_double(test_m.accuracy) << ", macro F1 "
              << format_double(test_m.macro_f1) << "\n"
              << "wrote " << (out_dir / "checkpoint.json").string() << ", metrics.csv, "
              << "history.csv\n";
    return 0;
}

int cmd_sweep(const RunConfig& config, int parallelism) {
    validate_thresholds(config.sweep_thresholds);
    const GraphDataset ds = build_dataset(config, true);
    const SweepReport report = sweep(ds, config.sweep_thresholds,
                                     config.train.threshold_mode, config.train, parallelism);

    const fs::path out_dir(config.out_dir);
    fs::create_directories(out_dir);
    write_file(out_dir / "sweep.csv",
               "# config_hash=" + config_hash(config) + "\n" + sweep_report_csv(report));

    // Timings and timestamps go to the log, keeping the CSV byte-stable.
    std::ostringstream log;
    bool any_failed = false;
    for (const SweepRow& row : report.rows) {
        nlohmann::json entry;
        entry["threshold"] = row.threshold;
        entry["mode"] = kernel_mode_name(row.mode);
        entry["hops"] = row.hops;
        entry["ok"] = row.ok;
        entry["error"] = row.error;
        entry["epochs"] = row.epochs_run;
        entry["seconds"] = row.seconds;
        entry["timestamp"] = timestamp_utc();
        log << entry.dump() << "\n";
        if (!row.ok) {
            any_failed = true;
            std::cerr << "sweep row failed: " << row.error << "\n";
        }
    }
    write_file(out_dir / "sweep_log.jsonl", log.str());

    std::cout << "swept " << report.rows.size() << " thresholds, wrote "
              << (out_dir / "sweep.csv").string() << "\n";
    return any_failed ? 4 : 0;
}

int cmd_density(const RunConfig& config) {
    validate_thresholds(config.sweep_thresholds);
    if (config.density_hops.empty())
        throw ConfigError("[density] hops_list must be non-empty");
    for (const index_t h : config.density_hops)
        if (h < 0) throw ConfigError("[density] hop counts must be >= 0");
    const KernelMode mode = config.train.threshold_mode;
    if (mode == KernelMode::None)
        throw ConfigError("density sweep needs mode pre or post in [train]");

    const GraphDataset ds = build_dataset(config, false);
    const SparseMatrix p = transition_matrix(ds.adjacency);
    double cutoff = 0.0;
    for (const double v : p.values) cutoff = std::max(cutoff, v);

    std::ostringstream curves;
    std::ostringstream slices;
    const std::string hash = config_hash(config);
    curves << "# config_hash=" << hash << "\n";
    curves << "# edge_elimination_cutoff=" << format_double(cutoff) << "\n";
    curves << "mode,hops,threshold,density,log10_density\n";
    slices << "# config_hash=" << hash << "\n";
    slices << "threshold,mode,hop,nnz,bound,density\n";

    const double n2 = static_cast<double>(ds.n_nodes) * static_cast<double>(ds.n_nodes);
    for (const index_t hops : config.density_hops) {
        for (const double t : config.sweep_thresholds) {
            const DiffusionKernel kernel = mode == KernelMode::Pre
                                               ? build_pre(p, t, hops)
                                               : build_post(p, t, hops);
            const double d = density(kernel);
            curves << kernel_mode_name(mode) << ',' << hops << ',' << format_double(t) << ','
                   << format_double(d) << ',' << format_double(std::log10(d)) << '\n';
            const MemoryLedger ledger = memory_report(kernel);
            for (index_t j = 0; j <= hops; ++j)
                slices << format_double(t) << ',' << kernel_mode_name(mode) << ',' << j << ','
                       << ledger.per_slice_nnz[j] << ',' << ledger.per_slice_bound[j] << ','
                       << format_double(static_cast<double>(ledger.per_slice_nnz[j]) / n2)
                       << '\n';
        }
    }

    const fs::path out_dir(config.out_dir);
    fs::create_directories(out_dir);
    write_file(out_dir / "density.csv", curves.str());
    write_file(out_dir / "slices.csv", slices.str());
    std::cout << "wrote " << (out_dir / "density.csv").string() << " and slices.csv"
              << " (edge elimination cutoff " << format_double(cutoff) << ")\n";
    return 0;
}

int cmd_synth(const RunConfig& config) {
    if (!config.synth) throw ConfigError("synth command needs a [synth] section");
    const GraphDataset ds = generate_synthetic(*config.synth);

    const fs::path out_dir(config.out_dir);
    fs::create_directories(out_dir);

    std::ostringstream edges;
    edges << "# " << synth_kind_name(config.synth->kind) << " graph, " << ds.n_nodes
          << " nodes\n";
    const SparseMatrix& a = ds.adjacency;
    for (index_t i = 0; i < a.n_rows; ++i)
        for (index_t q = a.row_offsets[i]; q < a.row_offsets[i + 1]; ++q)
            if (a.col_indices[q] >= i)  // emit each undirected edge once
                edges << i << ' ' << a.col_indices[q] << ' ' << format_double(a.values[q])
                      << '\n';
    write_file(out_dir / "edges.txt", edges.str());

    std::ostringstream features;
    for (index_t i = 0; i < ds.n_nodes; ++i) {
        features << i;
        for (index_t k = 0; k < ds.n_features; ++k)
            features << ' ' << format_double(ds.features.at(i, k));
        features << '\n';
    }
    write_file(out_dir / "features.txt", features.str());

    std::ostringstream labels;
    for (index_t i = 0; i < ds.n_nodes; ++i)
        if (ds.labels[i] >= 0) labels << i << ' ' << ds.labels[i] << '\n';
    write_file(out_dir / "labels.txt", labels.str());

    std::cout << "wrote " << ds.n_nodes << "-node dataset (" << ds.adjacency.nnz() / 2
              << " undirected edges, " << ds.n_features << " features, " << ds.n_classes
              << " classes) to " << out_dir.string() << "\n";
    return 0;
}

}  // namespace

int run(int argc, char** argv) {
    CLI::App app{"sparse diffusion-convolutional networks for node classification"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_override;
    std::int64_t seed_override = 0;
    bool has_seed_override = false;
    int parallelism = 1;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "run configuration file")->required();
        sub->add_option("--out", out_override, "output directory (overrides [output] dir)");
        sub->add_option("--seed", seed_override, "training seed (overrides [train] seed)")
            ->each([&](const std::string&) { has_seed_override = true; });
        sub->add_option("--parallel", parallelism, "concurrent sweep rows")
            ->check(CLI::PositiveNumber);
    };

    CLI::App* train_cmd = app.add_subcommand("train", "train one model and write a checkpoint");
    CLI::App* sweep_cmd =
        app.add_subcommand("sweep", "train across a threshold list and write sweep.csv");
    CLI::App* density_cmd = app.add_subcommand(
        "density", "build kernels only and write density-vs-threshold curves");
    CLI::App* synth_cmd =
        app.add_subcommand("synth", "generate a synthetic dataset as text files");
    for (CLI::App* sub : {train_cmd, sweep_cmd, density_cmd, synth_cmd}) add_common(sub);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }

    try {
        RunConfig config = parse_run_config(config_path);
        if (!out_override.empty()) config.out_dir = out_override;
        if (has_seed_override)
            config.train.seed = static_cast<std::uint64_t>(seed_override);

        if (train_cmd->parsed()) return cmd_train(config);
        if (sweep_cmd->parsed()) return cmd_sweep(config, parallelism);
        if (density_cmd->parsed()) return cmd_density(config);
        if (synth_cmd->parsed()) return cmd_synth(config);
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const InputError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace sdcnn::cli
