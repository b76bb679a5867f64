#include "sdcnn/model.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "sdcnn/errors.hpp"
#include "sdcnn/rng.hpp"

namespace sdcnn {

namespace {

double apply_activation(Activation a, double x) {
    switch (a) {
        case Activation::Tanh: return std::tanh(x);
        case Activation::Relu: return x > 0.0 ? x : 0.0;
        case Activation::Identity: return x;
    }
    return x;
}

// Derivative expressed through the activation value itself.
double activation_slope(Activation a, double z) {
    switch (a) {
        case Activation::Tanh: return 1.0 - z * z;
        case Activation::Relu: return z > 0.0 ? 1.0 : 0.0;
        case Activation::Identity: return 1.0;
    }
    return 1.0;
}

void check_shapes(const DcnnModel& model, const DiffusedFeatures& diffused) {
    if (diffused.n_hops != model.n_hops || diffused.n_features != model.n_features)
        throw InputError("forward: diffused features are " + std::to_string(diffused.n_hops) +
                         " hops x " + std::to_string(diffused.n_features) +
                         " features, model expects " + std::to_string(model.n_hops) + " x " +
                         std::to_string(model.n_features));
    const index_t rows = (model.n_hops + 1) * model.n_features;
    if (model.w_c.n_rows != model.n_hops + 1 || model.w_c.n_cols != model.n_features ||
        model.w_d.n_rows != rows || model.w_d.n_cols != model.n_classes ||
        static_cast<index_t>(model.bias.size()) != model.n_classes)
        throw InputError("forward: model weight shapes are inconsistent");
}

index_t masked_count(const std::vector<std::uint8_t>& mask) {
    index_t c = 0;
    for (const std::uint8_t m : mask)
        if (m) ++c;
    return c;
}

std::string hex_double(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}

double parse_hex_double(const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw DataError("checkpoint: malformed float literal '" + s + "'");
    return v;
}

}  // namespace

const char* activation_name(Activation a) {
    switch (a) {
        case Activation::Tanh: return "tanh";
        case Activation::Relu: return "relu";
        case Activation::Identity: return "identity";
    }
    return "tanh";
}

Activation parse_activation(const std::string& s) {
    if (s == "tanh") return Activation::Tanh;
    if (s == "relu") return Activation::Relu;
    if (s == "identity") return Activation::Identity;
    throw ConfigError("unknown activation '" + s + "' (expected tanh|relu|identity)");
}

DcnnModel init_model(index_t n_hops, index_t n_features, index_t n_classes,
                     std::uint64_t seed, Activation activation) {
    if (n_hops < 0 || n_features < 1 || n_classes < 1)
        throw InputError("init_model: need n_hops >= 0, n_features >= 1, n_classes >= 1");
    DcnnModel model;
    model.n_hops = n_hops;
    model.n_features = n_features;
    model.n_classes = n_classes;
    model.activation = activation;
    model.w_c = DenseMatrix(n_hops + 1, n_features);
    model.w_d = DenseMatrix((n_hops + 1) * n_features, n_classes);
    model.bias.assign(n_classes, 0.0);

    Rng rng(seed);
    const double s_c = std::sqrt(6.0 / static_cast<double>(n_hops + 1 + n_features));
    for (double& w : model.w_c.values) w = rng.uniform(-s_c, s_c);
    const double s_d =
        std::sqrt(6.0 / static_cast<double>((n_hops + 1) * n_features + n_classes));
    for (double& w : model.w_d.values) w = rng.uniform(-s_d, s_d);
    return model;
}

ForwardTrace forward(const DcnnModel& model, const DiffusedFeatures& diffused) {
    check_shapes(model, diffused);
    for (const double v : diffused.values)
        if (!std::isfinite(v)) throw NumericError("forward: non-finite diffused feature");

    const index_t n = diffused.n_nodes;
    const index_t h1 = model.n_hops + 1;
    const index_t f = model.n_features;
    const index_t c = model.n_classes;

    ForwardTrace trace;
    trace.z = HopTensor(n, model.n_hops, f);
    trace.logits = DenseMatrix(n, c, 0.0);
    trace.probs = DenseMatrix(n, c, 0.0);

#pragma omp parallel for schedule(static) collapse(2)
    for (index_t j = 0; j < h1; ++j)
        for (index_t i = 0; i < n; ++i)
            for (index_t k = 0; k < f; ++k)
                trace.z.at(i, j, k) =
                    apply_activation(model.activation, model.w_c.at(j, k) * diffused.at(i, j, k));

#pragma omp parallel for schedule(static)
    for (index_t i = 0; i < n; ++i) {
        double* logit = trace.logits.row(i);
        for (index_t cc = 0; cc < c; ++cc) logit[cc] = model.bias[cc];
        for (index_t j = 0; j < h1; ++j) {
            for (index_t k = 0; k < f; ++k) {
                const double z = trace.z.at(i, j, k);
                const double* wd = model.w_d.row(j * f + k);
                for (index_t cc = 0; cc < c; ++cc) logit[cc] += z * wd[cc];
            }
        }
        double mx = logit[0];
        for (index_t cc = 1; cc < c; ++cc) mx = std::max(mx, logit[cc]);
        double sum = 0.0;
        double* prob = trace.probs.row(i);
        for (index_t cc = 0; cc < c; ++cc) {
            prob[cc] = std::exp(logit[cc] - mx);
            sum += prob[cc];
        }
        for (index_t cc = 0; cc < c; ++cc) prob[cc] /= sum;
    }

    for (const double v : trace.logits.values)
        if (!std::isfinite(v)) throw NumericError("forward: non-finite logits");
    return trace;
}

std::vector<index_t> predict(const ForwardTrace& trace) {
    std::vector<index_t> labels(trace.probs.n_rows, 0);
#pragma omp parallel for schedule(static)
    for (index_t i = 0; i < trace.probs.n_rows; ++i) {
        const double* prob = trace.probs.row(i);
        index_t best = 0;
        for (index_t cc = 1; cc < trace.probs.n_cols; ++cc)
            if (prob[cc] > prob[best]) best = cc;
        labels[i] = best;
    }
    return labels;
}

double loss(const ForwardTrace& trace, const std::vector<int>& labels,
            const std::vector<std::uint8_t>& mask) {
    const index_t n = trace.logits.n_rows;
    const index_t c = trace.logits.n_cols;
    if (static_cast<index_t>(labels.size()) != n || static_cast<index_t>(mask.size()) != n)
        throw InputError("loss: labels/mask length must equal node count");
    const index_t count = masked_count(mask);
    if (count == 0) throw InputError("loss: empty mask");

    double total = 0.0;
    for (index_t i = 0; i < n; ++i) {
        if (!mask[i]) continue;
        if (labels[i] < 0 || labels[i] >= c)
            throw InputError("loss: node " + std::to_string(i) + " has no valid label");
        const double* logit = trace.logits.row(i);
        double mx = logit[0];
        for (index_t cc = 1; cc < c; ++cc) mx = std::max(mx, logit[cc]);
        double sum = 0.0;
        for (index_t cc = 0; cc < c; ++cc) sum += std::exp(logit[cc] - mx);
        total += mx + std::log(sum) - logit[labels[i]];
    }
    return total / static_cast<double>(count);
}

Gradients backward(const DcnnModel& model, const DiffusedFeatures& diffused,
                   const ForwardTrace& trace, const std::vector<int>& labels,
                   const std::vector<std::uint8_t>& mask) {
    check_shapes(model, diffused);
    const index_t n = diffused.n_nodes;
    const index_t h1 = model.n_hops + 1;
    const index_t f = model.n_features;
    const index_t c = model.n_classes;
    if (static_cast<index_t>(labels.size()) != n || static_cast<index_t>(mask.size()) != n)
        throw InputError("backward: labels/mask length must equal node count");

    Gradients grads;
    grads.w_c = DenseMatrix(h1, f, 0.0);
    grads.w_d = DenseMatrix(h1 * f, c, 0.0);
    grads.bias.assign(c, 0.0);

    const index_t count = masked_count(mask);
    if (count == 0) return grads;

    // d loss / d logits = (probs - onehot) / |mask| on masked rows.
    DenseMatrix dlogits(n, c, 0.0);
    const double inv = 1.0 / static_cast<double>(count);
#pragma omp parallel for schedule(static)
    for (index_t i = 0; i < n; ++i) {
        if (!mask[i]) continue;
        const double* prob = trace.probs.row(i);
        double* d = dlogits.row(i);
        for (index_t cc = 0; cc < c; ++cc) d[cc] = prob[cc] * inv;
        d[labels[i]] -= inv;
    }

    // Each gradient entry is reduced over nodes by one serial loop, so the
    // result is independent of the thread count.
#pragma omp parallel for schedule(static)
    for (index_t r = 0; r < h1 * f; ++r) {
        const index_t j = r / f;
        const index_t k = r % f;
        double* grow = grads.w_d.row(r);
        for (index_t i = 0; i < n; ++i) {
            if (!mask[i]) continue;
            const double z = trace.z.at(i, j, k);
            const double* d = dlogits.row(i);
            for (index_t cc = 0; cc < c; ++cc) grow[cc] += z * d[cc];
        }
    }

    for (index_t i = 0; i < n; ++i) {
        if (!mask[i]) continue;
        const double* d = dlogits.row(i);
        for (index_t cc = 0; cc < c; ++cc) grads.bias[cc] += d[cc];
    }

#pragma omp parallel for schedule(static)
    for (index_t r = 0; r < h1 * f; ++r) {
        const index_t j = r / f;
        const index_t k = r % f;
        const double* wd = model.w_d.row(r);
        double g = 0.0;
        for (index_t i = 0; i < n; ++i) {
            if (!mask[i]) continue;
            const double* d = dlogits.row(i);
            double dz = 0.0;
            for (index_t cc = 0; cc < c; ++cc) dz += d[cc] * wd[cc];
            const double z = trace.z.at(i, j, k);
            g += dz * activation_slope(model.activation, z) * diffused.at(i, j, k);
        }
        grads.w_c.at(j, k) = g;
    }

    return grads;
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
    nlohmann::json doc;
    doc["format"] = "sdcnn-checkpoint";
    doc["version"] = 1;
    doc["hops"] = ckpt.model.n_hops;
    doc["features"] = ckpt.model.n_features;
    doc["classes"] = ckpt.model.n_classes;
    doc["activation"] = activation_name(ckpt.model.activation);
    doc["threshold_mode"] = kernel_mode_name(ckpt.threshold_mode);
    doc["threshold"] = hex_double(ckpt.threshold);
    auto encode = [](const std::vector<double>& v) {
        std::vector<std::string> out;
        out.reserve(v.size());
        for (const double x : v) out.push_back(hex_double(x));
        return out;
    };
    doc["w_c"] = encode(ckpt.model.w_c.values);
    doc["w_d"] = encode(ckpt.model.w_d.values);
    doc["bias"] = encode(ckpt.model.bias);

    std::ofstream out(path);
    if (!out) throw DataError("checkpoint: cannot write '" + path + "'");
    out << doc.dump(2) << "\n";
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("checkpoint: cannot read '" + path + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("checkpoint: malformed JSON in '" + path + "': " + e.what());
    }
    try {
        if (doc.at("format") != "sdcnn-checkpoint" || doc.at("version") != 1)
            throw DataError("checkpoint: unsupported format/version in '" + path + "'");
        Checkpoint ckpt;
        const index_t h = doc.at("hops").get<index_t>();
        const index_t f = doc.at("features").get<index_t>();
        const index_t c = doc.at("classes").get<index_t>();
        ckpt.model.n_hops = h;
        ckpt.model.n_features = f;
        ckpt.model.n_classes = c;
        ckpt.model.activation = parse_activation(doc.at("activation").get<std::string>());
        ckpt.threshold_mode = parse_kernel_mode(doc.at("threshold_mode").get<std::string>());
        ckpt.threshold = parse_hex_double(doc.at("threshold").get<std::string>());
        auto decode = [&](const char* key, std::size_t expect) {
            const auto& arr = doc.at(key);
            if (arr.size() != expect)
                throw DataError(std::string("checkpoint: '") + key + "' has wrong length");
            std::vector<double> out;
            out.reserve(arr.size());
            for (const auto& s : arr) out.push_back(parse_hex_double(s.get<std::string>()));
            return out;
        };
        ckpt.model.w_c = DenseMatrix(h + 1, f);
        ckpt.model.w_c.values = decode("w_c", static_cast<std::size_t>((h + 1) * f));
        ckpt.model.w_d = DenseMatrix((h + 1) * f, c);
        ckpt.model.w_d.values = decode("w_d", static_cast<std::size_t>((h + 1) * f * c));
        ckpt.model.bias = decode("bias", static_cast<std::size_t>(c));
        return ckpt;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("checkpoint: missing or mistyped field in '" + path + "': " + e.what());
    }
}

}  // namespace sdcnn
