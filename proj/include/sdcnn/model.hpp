#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sdcnn/diffusion.hpp"
#include "sdcnn/sparse.hpp"

namespace sdcnn {

enum class Activation { Tanh, Relu, Identity };

const char* activation_name(Activation a);
Activation parse_activation(const std::string& s);

// Two-layer diffusion-convolutional model: an elementwise hop/feature weight
// matrix followed by a fully connected softmax output. Parameter shapes
// depend only on (H, F, C), never on the graph size.
struct DcnnModel {
    index_t n_hops = 0;      // H; the model has H+1 hop rows
    index_t n_features = 0;  // F
    index_t n_classes = 0;   // C
    Activation activation = Activation::Tanh;
    DenseMatrix w_c;           // (H+1) x F
    DenseMatrix w_d;           // ((H+1)*F) x C
    std::vector<double> bias;  // C

    bool operator==(const DcnnModel&) const = default;
};

// Uniform [-s, s] weights with s = sqrt(6 / (fan_in + fan_out)); zero bias.
DcnnModel init_model(index_t n_hops, index_t n_features, index_t n_classes,
                     std::uint64_t seed, Activation activation = Activation::Tanh);

struct ForwardTrace {
    HopTensor z;         // N x (H+1) x F post-activation
    DenseMatrix logits;  // N x C
    DenseMatrix probs;   // N x C, rows sum to 1
};

struct Gradients {
    DenseMatrix w_c;
    DenseMatrix w_d;
    std::vector<double> bias;
};

// z[i,j,k] = act(w_c[j,k] * diffused[i,j,k]); logits = flatten(z) * w_d + bias;
// probs = row softmax of the logits.
ForwardTrace forward(const DcnnModel& model, const DiffusedFeatures& diffused);

// Per-node argmax over classes; ties break toward the lowest class index.
std::vector<index_t> predict(const ForwardTrace& trace);

// Mean negative log-probability of the true class over masked nodes,
// computed from the logits with log-sum-exp stabilization.
double loss(const ForwardTrace& trace, const std::vector<int>& labels,
            const std::vector<std::uint8_t>& mask);

// Exact analytic gradients of loss() with respect to all parameters.
Gradients backward(const DcnnModel& model, const DiffusedFeatures& diffused,
                   const ForwardTrace& trace, const std::vector<int>& labels,
                   const std::vector<std::uint8_t>& mask);

// Model checkpoint; weights round-trip bit-exactly via hexadecimal float
// encoding. Records the threshold mode used at train time.
struct Checkpoint {
    DcnnModel model;
    KernelMode threshold_mode = KernelMode::None;
    double threshold = 0.0;
};

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace sdcnn
