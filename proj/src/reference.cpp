#include "sdcnn/reference.hpp"

#include <cmath>
#include <stdexcept>

namespace sdcnn::ref {

namespace {

double act(Activation a, double x) {
    switch (a) {
        case Activation::Tanh: return std::tanh(x);
        case Activation::Relu: return x > 0.0 ? x : 0.0;
        case Activation::Identity: return x;
    }
    return x;
}

}  // namespace

DenseMatrix to_dense(const SparseMatrix& a) {
    DenseMatrix d(a.n_rows, a.n_cols, 0.0);
    for (index_t i = 0; i < a.n_rows; ++i)
        for (index_t p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p)
            d.at(i, a.col_indices[p]) = a.values[p];
    return d;
}

DenseMatrix dense_matmul(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.n_cols != b.n_rows) throw std::invalid_argument("ref::dense_matmul: shape mismatch");
    DenseMatrix c(a.n_rows, b.n_cols, 0.0);
    for (index_t i = 0; i < a.n_rows; ++i)
        for (index_t j = 0; j < b.n_cols; ++j) {
            double s = 0.0;
            for (index_t k = 0; k < a.n_cols; ++k) s += a.at(i, k) * b.at(k, j);
            c.at(i, j) = s;
        }
    return c;
}

std::vector<DenseMatrix> dense_power_series(const DenseMatrix& p, index_t n_hops) {
    std::vector<DenseMatrix> series;
    series.reserve(n_hops + 1);
    series.push_back(DenseMatrix::identity(p.n_rows));
    for (index_t j = 1; j <= n_hops; ++j)
        series.push_back(ref::dense_matmul(series[j - 1], p));
    return series;
}

DenseMatrix forward_probs(const DcnnModel& model, const std::vector<DenseMatrix>& pstar,
                          const DenseMatrix& x) {
    const index_t n = x.n_rows;
    const index_t h1 = model.n_hops + 1;
    const index_t f = model.n_features;
    const index_t c = model.n_classes;

    DenseMatrix probs(n, c, 0.0);
    std::vector<double> z(static_cast<std::size_t>(h1) * f, 0.0);
    for (index_t i = 0; i < n; ++i) {
        for (index_t j = 0; j < h1; ++j) {
            for (index_t k = 0; k < f; ++k) {
                double diffused = 0.0;
                for (index_t l = 0; l < n; ++l) diffused += pstar[j].at(i, l) * x.at(l, k);
                z[j * f + k] = act(model.activation, model.w_c.at(j, k) * diffused);
            }
        }
        std::vector<double> logits(c, 0.0);
        for (index_t cc = 0; cc < c; ++cc) {
            double s = model.bias[cc];
            for (index_t r = 0; r < h1 * f; ++r) s += z[r] * model.w_d.at(r, cc);
            logits[cc] = s;
        }
        double sum = 0.0;
        for (index_t cc = 0; cc < c; ++cc) sum += std::exp(logits[cc]);
        for (index_t cc = 0; cc < c; ++cc) probs.at(i, cc) = std::exp(logits[cc]) / sum;
    }
    return probs;
}

double loss(const DenseMatrix& probs, const std::vector<int>& labels,
            const std::vector<std::uint8_t>& mask) {
    double total = 0.0;
    index_t count = 0;
    for (index_t i = 0; i < probs.n_rows; ++i) {
        if (!mask[i]) continue;
        total += -std::log(probs.at(i, labels[i]));
        ++count;
    }
    return total / static_cast<double>(count);
}

std::vector<index_t> argmax_rows(const DenseMatrix& probs) {
    std::vector<index_t> out(probs.n_rows, 0);
    for (index_t i = 0; i < probs.n_rows; ++i) {
        index_t best = 0;
        for (index_t cc = 1; cc < probs.n_cols; ++cc)
            if (probs.at(i, cc) > probs.at(i, best)) best = cc;
        out[i] = best;
    }
    return out;
}

double accuracy(const std::vector<index_t>& predicted, const std::vector<int>& labels,
                const std::vector<std::uint8_t>& mask) {
    index_t hit = 0;
    index_t count = 0;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (!mask[i]) continue;
        ++count;
        if (predicted[i] == labels[i]) ++hit;
    }
    return count == 0 ? 0.0 : static_cast<double>(hit) / static_cast<double>(count);
}

double macro_f1(const std::vector<index_t>& predicted, const std::vector<int>& labels,
                const std::vector<std::uint8_t>& mask, index_t n_classes) {
    double total = 0.0;
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
        total += denom == 0.0 ? 0.0 : 2.0 * static_cast<double>(tp) / denom;
    }
    return n_classes == 0 ? 0.0 : total / static_cast<double>(n_classes);
}

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.n_rows != b.n_rows || a.n_cols != b.n_cols)
        throw std::invalid_argument("ref::max_abs_diff: shape mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        m = std::max(m, std::abs(a.values[i] - b.values[i]));
    return m;
}

}  // namespace sdcnn::ref
