// Times the parallel kernels against the serial reference on the same
// inputs and reports agreement, so kernel changes can be checked for both
// speed and correctness in one run.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>

#include "sdcnn/diffusion.hpp"
#include "sdcnn/graph_io.hpp"
#include "sdcnn/model.hpp"
#include "sdcnn/reference.hpp"
#include "sdcnn/trainer.hpp"

using namespace sdcnn;

namespace {

template <typename F>
double best_ms(int repeats, F&& fn) {
    double best = 1e300;
    for (int r = 0; r < repeats; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        const auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return best;
}

void report(const std::string& name, double serial_ms, double parallel_ms, double diff) {
    std::printf("%-34s %10.2f %10.2f %8.2fx   %.3e\n", name.c_str(), serial_ms, parallel_ms,
                serial_ms / parallel_ms, diff);
}

}  // namespace

int main(int argc, char** argv) {
    index_t n = 800;
    index_t hops = 3;
    index_t features = 16;
    double sigma = 0.0;
    int repeats = 3;

    CLI::App app{"sdcnn kernel benchmark: serial reference vs parallel kernels"};
    app.add_option("--nodes", n, "graph size");
    app.add_option("--hops", hops, "diffusion hops");
    app.add_option("--features", features, "feature count");
    app.add_option("--sigma", sigma, "pre-threshold for the kernel build row");
    app.add_option("--repeats", repeats, "timing repeats (best of)");
    CLI11_PARSE(app, argc, argv);

    SynthParams params;
    params.kind = SynthKind::ScaleFree;
    params.n_nodes = n;
    params.attach_edges = 3;
    params.n_features = features;
    params.feature_signal = 1.0;
    params.seed = 42;
    const GraphDataset ds = generate_synthetic(params);
    const SparseMatrix p = transition_matrix(ds.adjacency);
    const DenseMatrix p_dense = ref::to_dense(p);

#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (OpenMP disabled)\n");
#endif
    std::printf("graph: %lld nodes, %lld stored edges, %lld hops, %lld features\n\n",
                static_cast<long long>(n), static_cast<long long>(p.nnz()),
                static_cast<long long>(hops), static_cast<long long>(features));
    std::printf("%-34s %10s %10s %9s   %s\n", "operation", "serial ms", "kernel ms", "speedup",
                "max |diff|");

    {
        std::vector<DenseMatrix> serial_series;
        const double s_ms =
            best_ms(repeats, [&] { serial_series = ref::dense_power_series(p_dense, hops); });
        DiffusionKernel kernel;
        const double k_ms = best_ms(repeats, [&] { kernel = build_pre(p, sigma, hops); });
        double diff = 0.0;
        if (sigma == 0.0)
            for (index_t j = 0; j <= hops; ++j)
                diff = std::max(diff,
                                ref::max_abs_diff(kernel.slice_as_dense(j), serial_series[j]));
        report("diffusion kernel build", s_ms, k_ms, diff);
    }

    DiffusionKernel kernel = build_pre(p, sigma, hops);
    {
        DiffusedFeatures diffused;
        const double k_ms =
            best_ms(repeats, [&] { diffused = diffuse_features(kernel, ds.features); });
        std::vector<DenseMatrix> serial_blocks(hops + 1);
        const std::vector<DenseMatrix> series = ref::dense_power_series(p_dense, hops);
        const double s_ms = best_ms(repeats, [&] {
            for (index_t j = 0; j <= hops; ++j)
                serial_blocks[j] = ref::dense_matmul(series[j], ds.features);
        });
        double diff = 0.0;
        if (sigma == 0.0) {
            for (index_t j = 0; j <= hops; ++j) {
                DenseMatrix block(n, features);
                for (index_t i = 0; i < n; ++i)
                    for (index_t k = 0; k < features; ++k) block.at(i, k) = diffused.at(i, j, k);
                diff = std::max(diff, ref::max_abs_diff(block, serial_blocks[j]));
            }
        }
        report("feature diffusion (all hops)", s_ms, k_ms, diff);
    }

    {
        const DcnnModel model = init_model(hops, features, 4, 7);
        const DiffusedFeatures diffused = diffuse_features(kernel, ds.features);
        ForwardTrace trace;
        const double k_ms = best_ms(repeats, [&] { trace = forward(model, diffused); });
        const std::vector<DenseMatrix> series = ref::dense_power_series(p_dense, hops);
        DenseMatrix serial_probs;
        const double s_ms =
            best_ms(repeats, [&] { serial_probs = ref::forward_probs(model, series, ds.features); });
        const double diff =
            sigma == 0.0 ? ref::max_abs_diff(trace.probs, serial_probs) : 0.0;
        report("model forward pass", s_ms, k_ms, diff);
    }

    {
        SparseMatrix square;
        const double k_ms = best_ms(repeats, [&] { square = spmm_sparse(p, p); });
        DenseMatrix serial_square;
        const double s_ms =
            best_ms(repeats, [&] { serial_square = ref::dense_matmul(p_dense, p_dense); });
        const double diff = ref::max_abs_diff(ref::to_dense(square), serial_square);
        report("transition matrix square", s_ms, k_ms, diff);
    }

    return 0;
}
