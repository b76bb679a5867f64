#include "sdcnn/trainer.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "sdcnn/errors.hpp"
#include "sdcnn/format.hpp"

namespace sdcnn {

namespace {

void validate_config(const TrainConfig& config) {
    if (config.n_hops < 0) throw ConfigError("train: hops must be >= 0");
    if (!(config.learning_rate > 0.0)) throw ConfigError("train: learning_rate must be > 0");
    if (config.momentum < 0.0 || config.momentum >= 1.0)
        throw ConfigError("train: momentum must be in [0, 1)");
    if (config.max_epochs < 1) throw ConfigError("train: max_epochs must be >= 1");
    if (config.patience < 0) throw ConfigError("train: patience must be >= 0");
    if (config.threshold < 0.0 || config.threshold > 1.0)
        throw ConfigError("train: threshold must be in [0, 1]");
}

DiffusionKernel build_kernel(const SparseMatrix& p, const TrainConfig& config) {
    switch (config.threshold_mode) {
        case KernelMode::None: return build_none(p, config.n_hops);
        case KernelMode::Pre: return build_pre(p, config.threshold, config.n_hops);
        case KernelMode::Post: return build_post(p, config.threshold, config.n_hops);
    }
    return build_none(p, config.n_hops);
}

const std::vector<std::uint8_t>& split_mask(const GraphDataset& dataset, Split split) {
    switch (split) {
        case Split::Train: return dataset.train_mask;
        case Split::Valid: return dataset.valid_mask;
        case Split::Test: return dataset.test_mask;
    }
    return dataset.train_mask;
}

Metrics compute_metrics(const ForwardTrace& trace, const std::vector<int>& labels,
                        const std::vector<std::uint8_t>& mask, index_t n_classes) {
    Metrics m;
    m.loss = loss(trace, labels, mask);
    const std::vector<index_t> predicted = predict(trace);

    index_t hit = 0;
    index_t count = 0;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (!mask[i]) continue;
        ++count;
        if (predicted[i] == labels[i]) ++hit;
    }
    m.accuracy = static_cast<double>(hit) / static_cast<double>(count);

    double f1_total = 0.0;
    for (index_t c = 0; c < n_classes; ++c) {
        index_t tp = 0, fp = 0, fn = 0;
        for (std::size_t i = 0; i < mask.size(); ++i) {
            if (!mask[i]) continue;
            const bool truth = labels[i] == c;
            const bool pred = predicted[i] == c;
            if (truth && pred) ++tp;
            if (!truth && pred) ++fp;
            if (truth && !pred) ++fn;
        }
        const double denom = static_cast<double>(2 * tp + fp + fn);
        f1_total += denom == 0.0 ? 0.0 : 2.0 * static_cast<double>(tp) / denom;
    }
    m.macro_f1 = n_classes == 0 ? 0.0 : f1_total / static_cast<double>(n_classes);
    return m;
}

}  // namespace

TrainOutcome train(const GraphDataset& dataset, const TrainConfig& config) {
    validate_config(config);
    const auto has_any = [](const std::vector<std::uint8_t>& mask) {
        for (const std::uint8_t m : mask)
            if (m) return true;
        return false;
    };
    if (!has_any(dataset.train_mask) || !has_any(dataset.valid_mask))
        throw InputError("train: dataset needs non-empty train and valid masks");
    if (dataset.n_classes < 1) throw InputError("train: dataset has no classes");

    TrainOutcome out;
    const SparseMatrix p = transition_matrix(dataset.adjacency);
    out.kernel = build_kernel(p, config);
    const DiffusedFeatures diffused = diffuse_features(out.kernel, dataset.features);

    DcnnModel model = init_model(config.n_hops, dataset.n_features, dataset.n_classes,
                                 config.seed, config.activation);
    DcnnModel best = model;
    double best_valid = std::numeric_limits<double>::infinity();
    index_t stall = 0;

    Gradients velocity;
    velocity.w_c = DenseMatrix(model.w_c.n_rows, model.w_c.n_cols, 0.0);
    velocity.w_d = DenseMatrix(model.w_d.n_rows, model.w_d.n_cols, 0.0);
    velocity.bias.assign(model.bias.size(), 0.0);

    for (index_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
        out.history.epochs_run = epoch;
        try {
            const ForwardTrace trace = forward(model, diffused);
            const double train_loss = loss(trace, dataset.labels, dataset.train_mask);
            const double valid_loss = loss(trace, dataset.labels, dataset.valid_mask);
            if (!std::isfinite(train_loss) || !std::isfinite(valid_loss))
                throw NumericError("non-finite loss");
            out.history.train_loss.push_back(train_loss);
            out.history.valid_loss.push_back(valid_loss);

            if (valid_loss < best_valid) {
                best_valid = valid_loss;
                best = model;
                out.history.best_epoch = epoch;
                stall = 0;
            } else {
                ++stall;
            }
            if (config.patience > 0 && stall >= config.patience) break;

            const Gradients grads =
                backward(model, diffused, trace, dataset.labels, dataset.train_mask);
            const double lr = config.learning_rate;
            const double mu = config.momentum;
            for (std::size_t i = 0; i < model.w_c.values.size(); ++i) {
                velocity.w_c.values[i] = mu * velocity.w_c.values[i] - lr * grads.w_c.values[i];
                model.w_c.values[i] += velocity.w_c.values[i];
            }
            for (std::size_t i = 0; i < model.w_d.values.size(); ++i) {
                velocity.w_d.values[i] = mu * velocity.w_d.values[i] - lr * grads.w_d.values[i];
                model.w_d.values[i] += velocity.w_d.values[i];
            }
            for (std::size_t i = 0; i < model.bias.size(); ++i) {
                velocity.bias[i] = mu * velocity.bias[i] - lr * grads.bias[i];
                model.bias[i] += velocity.bias[i];
            }
        } catch (const NumericError& e) {
            throw NumericError("training diverged at epoch " + std::to_string(epoch) + ": " +
                               e.what());
        }
    }

    out.model = std::move(best);
    return out;
}

Metrics evaluate(const DcnnModel& model, const GraphDataset& dataset,
                 const DiffusionKernel& kernel, Split split) {
    const std::vector<std::uint8_t>& mask = split_mask(dataset, split);
    bool any = false;
    for (const std::uint8_t m : mask) any = any || m;
    if (!any) throw InputError("evaluate: empty split");
    const DiffusedFeatures diffused = diffuse_features(kernel, dataset.features);
    const ForwardTrace trace = forward(model, diffused);
    return compute_metrics(trace, dataset.labels, mask, dataset.n_classes);
}

SweepReport sweep(const GraphDataset& dataset, const std::vector<double>& thresholds,
                  KernelMode mode, const TrainConfig& config, int parallelism) {
    if (thresholds.empty()) throw ConfigError("sweep: threshold list is empty");
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
        if (thresholds[i] < 0.0 || thresholds[i] > 1.0)
            throw ConfigError("sweep: threshold " + format_double(thresholds[i]) +
                              " outside [0, 1]");
        if (i > 0 && thresholds[i] <= thresholds[i - 1])
            throw ConfigError("sweep: thresholds must be sorted ascending");
    }

    SweepReport report;
    report.rows.resize(thresholds.size());
    const auto n = static_cast<index_t>(thresholds.size());

#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(parallelism, 1)) \
    if (parallelism > 1)
    for (index_t idx = 0; idx < n; ++idx) {
        SweepRow& row = report.rows[idx];
        row.threshold = thresholds[idx];
        row.mode = mode;
        row.hops = config.n_hops;
        const auto started = std::chrono::steady_clock::now();
        try {
            TrainConfig run = config;
            run.threshold_mode = mode;
            run.threshold = thresholds[idx];
            const TrainOutcome outcome = train(dataset, run);
            row.kernel_density = density(outcome.kernel);
            row.peak_stored_entries = outcome.kernel.ledger.peak_stored_entries;
            row.train = evaluate(outcome.model, dataset, outcome.kernel, Split::Train);
            row.valid = evaluate(outcome.model, dataset, outcome.kernel, Split::Valid);
            row.test = evaluate(outcome.model, dataset, outcome.kernel, Split::Test);
            row.epochs_run = outcome.history.epochs_run;
        } catch (const std::exception& e) {
            row.ok = false;
            row.error = "threshold " + format_double(thresholds[idx]) + ": " + e.what();
        }
        row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
                          .count();
    }
    return report;
}

std::string sweep_report_csv(const SweepReport& report) {
    std::ostringstream out;
    out << "threshold,mode,hops,density,peak_entries"
        << ",train_accuracy,train_macro_f1,train_loss"
        << ",valid_accuracy,valid_macro_f1,valid_loss"
        << ",test_accuracy,test_macro_f1,test_loss,epochs\n";
    for (const SweepRow& row : report.rows) {
        if (!row.ok) continue;
        out << format_double(row.threshold) << ',' << kernel_mode_name(row.mode) << ','
            << row.hops << ',' << format_double(row.kernel_density) << ','
            << row.peak_stored_entries;
        for (const Metrics* m : {&row.train, &row.valid, &row.test})
            out << ',' << format_double(m->accuracy) << ',' << format_double(m->macro_f1)
                << ',' << format_double(m->loss);
        out << ',' << row.epochs_run << '\n';
    }
    return out.str();
}

}  // namespace sdcnn
