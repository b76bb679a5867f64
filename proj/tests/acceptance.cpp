// Acceptance suite: one pass/fail line per criterion. Each criterion pins
// its tolerances and runtime budget in code; the binary exits nonzero if any
// line fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sdcnn/diffusion.hpp"
#include "sdcnn/graph_io.hpp"
#include "sdcnn/model.hpp"
#include "sdcnn/reference.hpp"
#include "sdcnn/rng.hpp"
#include "sdcnn/trainer.hpp"

using namespace sdcnn;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

void report(int number, const std::string& name, bool pass, double seconds, double budget,
            const std::string& note) {
    const bool in_budget = seconds < budget;
    const bool ok = pass && in_budget;
    if (!ok) ++g_failures;
    std::printf("[%s] %d. %s (%.1fs / %.0fs budget)%s%s\n", ok ? "PASS" : "FAIL", number,
                name.c_str(), seconds, budget, note.empty() ? "" : " -- ", note.c_str());
}

SparseMatrix random_row_stochastic(Rng& rng, index_t n, index_t max_row_nnz) {
    std::vector<Triplet> triplets;
    for (index_t i = 0; i < n; ++i) {
        const index_t k =
            1 + static_cast<index_t>(rng.below(
                    static_cast<std::uint64_t>(std::min(max_row_nnz, n))));
        std::vector<index_t> cols(n);
        for (index_t c = 0; c < n; ++c) cols[c] = c;
        rng.shuffle(cols);
        std::vector<double> weights(k);
        double sum = 0.0;
        for (index_t j = 0; j < k; ++j) {
            weights[j] = rng.uniform(0.05, 1.0);
            sum += weights[j];
        }
        for (index_t j = 0; j < k; ++j) triplets.push_back({i, cols[j], weights[j] / sum});
    }
    return from_triplets(triplets, n, n);
}

// --- 1. Dense-oracle equivalence -------------------------------------------

void criterion_equivalence() {
    Timer timer;
    double worst_kernel = 0.0;
    double worst_probs = 0.0;
    Rng rng(80401);
    for (int trial = 0; trial < 50; ++trial) {
        const index_t n = 2 + static_cast<index_t>(rng.below(49));    // N <= 50
        const index_t hops = 1 + static_cast<index_t>(rng.below(4));  // H <= 4
        const SparseMatrix p = random_row_stochastic(rng, n, 6);
        const std::vector<DenseMatrix> series =
            ref::dense_power_series(ref::to_dense(p), hops);

        const DiffusionKernel pre = build_pre(p, 0.0, hops);
        const DiffusionKernel post = build_post(p, 0.0, hops);
        for (index_t j = 0; j <= hops; ++j) {
            worst_kernel =
                std::max(worst_kernel, ref::max_abs_diff(pre.slice_as_dense(j), series[j]));
            worst_kernel =
                std::max(worst_kernel, ref::max_abs_diff(post.slice_as_dense(j), series[j]));
        }

        const index_t features = 1 + static_cast<index_t>(rng.below(4));
        const index_t classes = 2 + static_cast<index_t>(rng.below(2));
        DenseMatrix x(n, features);
        for (double& v : x.values) v = rng.uniform(-1.0, 1.0);
        const DcnnModel model = init_model(hops, features, classes, 9000 + trial);
        const ForwardTrace trace = forward(model, diffuse_features(pre, x));
        const DenseMatrix expect = ref::forward_probs(model, series, x);
        worst_probs = std::max(worst_probs, ref::max_abs_diff(trace.probs, expect));
    }
    const bool pass = worst_kernel <= 1e-12 && worst_probs <= 1e-12;
    std::ostringstream note;
    note << "max slice diff " << worst_kernel << ", max prob diff " << worst_probs;
    report(1, "dense-oracle equivalence at zero threshold", pass, timer.seconds(), 10.0,
           note.str());
}

// --- 2. Per-row sparsity bound ----------------------------------------------

void criterion_row_bound() {
    Timer timer;
    long long violations = 0;
    long long rows_checked = 0;
    Rng rng(80402);
    for (int trial = 0; trial < 200; ++trial) {
        const index_t n = 2 + static_cast<index_t>(rng.below(39));
        const index_t hops = 1 + static_cast<index_t>(rng.below(5));  // H <= 5
        const double sigma = rng.uniform(0.05, 0.9);
        const SparseMatrix p = random_row_stochastic(rng, n, 10);
        const DiffusionKernel kernel = build_pre(p, sigma, hops);
        const auto per_row = static_cast<index_t>(std::floor(1.0 / sigma + 1e-9));
        for (index_t j = 0; j <= hops; ++j) {
            index_t bound = 1;
            for (index_t h = 0; h < j && bound < n; ++h) bound *= per_row;
            bound = std::min(bound, n);
            for (index_t i = 0; i < n; ++i) {
                ++rows_checked;
                if (kernel.sparse_slices[j].row_nnz(i) > bound) ++violations;
            }
        }
    }
    std::ostringstream note;
    note << rows_checked << " rows checked, " << violations << " violations";
    report(2, "pre-threshold rows within min(floor(1/sigma)^j, N)", violations == 0,
           timer.seconds(), 30.0, note.str());
}

// --- 3. Peak-memory scaling --------------------------------------------------

void criterion_memory_scaling() {
    Timer timer;
    std::vector<double> pre_peaks;
    std::vector<double> post_peaks;
    for (const index_t n : {200, 400, 800, 1600}) {
        SynthParams params;
        params.kind = SynthKind::ScaleFree;
        params.n_nodes = n;
        params.attach_edges = 2;
        params.n_features = 2;
        params.seed = 1234;
        const GraphDataset ds = generate_synthetic(params);
        const SparseMatrix p = transition_matrix(ds.adjacency);
        pre_peaks.push_back(
            static_cast<double>(build_pre(p, 0.2, 3).ledger.peak_stored_entries));
        post_peaks.push_back(
            static_cast<double>(build_post(p, 0.2, 3).ledger.peak_stored_entries));
    }
    bool pass = true;
    std::ostringstream note;
    note << "pre ratios";
    for (std::size_t i = 1; i < pre_peaks.size(); ++i) {
        const double ratio = pre_peaks[i] / pre_peaks[i - 1];
        note << ' ' << ratio;
        pass = pass && ratio >= 1.7 && ratio <= 2.3;
    }
    note << ", post ratios";
    for (std::size_t i = 1; i < post_peaks.size(); ++i) {
        const double ratio = post_peaks[i] / post_peaks[i - 1];
        note << ' ' << ratio;
        pass = pass && ratio >= 3.5 && ratio <= 4.5;
    }
    report(3, "linear pre-threshold vs quadratic post-threshold peak memory", pass,
           timer.seconds(), 60.0, note.str());
}

// --- 4. Gradient check --------------------------------------------------------

void criterion_gradients() {
    Timer timer;
    double worst_rel = 0.0;
    Rng rng(80404);
    for (int trial = 0; trial < 100; ++trial) {
        const index_t n = 2 + static_cast<index_t>(rng.below(7));  // N <= 8
        const index_t hops = static_cast<index_t>(rng.below(4));   // H <= 3
        const index_t features = 1 + static_cast<index_t>(rng.below(4));
        const index_t classes = 2 + static_cast<index_t>(rng.below(2));

        const SparseMatrix p = random_row_stochastic(rng, n, 4);
        const DiffusionKernel kernel = build_pre(p, rng.uniform01() * 0.3, hops);
        DenseMatrix x(n, features);
        for (double& v : x.values) v = rng.uniform(-1.0, 1.0);
        const DiffusedFeatures diffused = diffuse_features(kernel, x);

        DcnnModel model = init_model(hops, features, classes, 7100 + trial);
        std::vector<int> labels(n);
        for (index_t i = 0; i < n; ++i) labels[i] = static_cast<int>(rng.below(classes));
        std::vector<std::uint8_t> mask(n, 0);
        for (index_t i = 0; i < n; ++i) mask[i] = rng.uniform01() < 0.8 ? 1 : 0;
        mask[0] = 1;

        const ForwardTrace trace = forward(model, diffused);
        const Gradients grads = backward(model, diffused, trace, labels, mask);
        const double h = 1e-5;
        const auto loss_at = [&] { return loss(forward(model, diffused), labels, mask); };
        const auto check = [&](double* slot, double analytic) {
            const double saved = *slot;
            *slot = saved + h;
            const double up = loss_at();
            *slot = saved - h;
            const double down = loss_at();
            *slot = saved;
            const double fd = (up - down) / (2.0 * h);
            const double rel = std::abs(analytic - fd) /
                               std::max({std::abs(analytic), std::abs(fd), 1e-3});
            worst_rel = std::max(worst_rel, rel);
        };
        for (std::size_t i = 0; i < model.w_c.values.size(); ++i)
            check(&model.w_c.values[i], grads.w_c.values[i]);
        for (std::size_t i = 0; i < model.w_d.values.size(); ++i)
            check(&model.w_d.values[i], grads.w_d.values[i]);
        for (std::size_t i = 0; i < model.bias.size(); ++i)
            check(&model.bias[i], grads.bias[i]);
    }
    std::ostringstream note;
    note << "worst relative error " << worst_rel;
    report(4, "analytic gradients vs central finite differences", worst_rel < 1e-4,
           timer.seconds(), 30.0, note.str());
}

// --- 5/6. The SBM fixture ------------------------------------------------------

GraphDataset sbm_fixture(std::uint64_t seed) {
    SynthParams params;
    params.kind = SynthKind::Sbm;
    params.n_nodes = 300;
    params.blocks = 2;
    params.p_in = 0.05;
    params.p_out = 1.0 / 300.0;
    params.n_features = 8;
    params.feature_signal = 0.4;
    params.seed = seed;
    SplitConfig split;
    split.seed = 7;
    return make_splits(generate_synthetic(params), split);
}

void criterion_accuracy_shape() {
    Timer timer;
    const std::vector<double> sigmas{0.0, 0.02, 0.05, 0.1, 0.3, 0.7};
    std::vector<double> mean_acc(sigmas.size(), 0.0);
    double mean_baseline = 0.0;
    bool all_rows_ok = true;
    for (int s = 0; s < 5; ++s) {
        const GraphDataset ds = sbm_fixture(1101 + s);
        TrainConfig cfg;
        cfg.n_hops = 2;
        cfg.threshold_mode = KernelMode::Pre;
        cfg.seed = 1101 + s;
        const SweepReport rep =
            sweep(ds, sigmas, KernelMode::Pre, cfg, static_cast<int>(sigmas.size()));
        for (std::size_t k = 0; k < sigmas.size(); ++k) {
            all_rows_ok = all_rows_ok && rep.rows[k].ok;
            if (rep.rows[k].ok) mean_acc[k] += rep.rows[k].test.accuracy / 5.0;
        }
        TrainConfig base = cfg;
        base.n_hops = 0;
        base.threshold = 0.0;
        const TrainOutcome outcome = train(ds, base);
        mean_baseline +=
            evaluate(outcome.model, ds, outcome.kernel, Split::Test).accuracy / 5.0;
    }
    const double plateau_002 = std::abs(mean_acc[1] - mean_acc[0]);
    const double plateau_005 = std::abs(mean_acc[2] - mean_acc[0]);
    const double floor_gap = std::abs(mean_acc[5] - mean_baseline);
    const bool pass =
        all_rows_ok && plateau_002 <= 0.03 && plateau_005 <= 0.03 && floor_gap <= 0.03;
    std::ostringstream note;
    note << "plateau diffs " << plateau_002 << " / " << plateau_005 << ", floor gap "
         << floor_gap << " (acc(0) " << mean_acc[0] << ", baseline " << mean_baseline << ")";
    report(5, "accuracy plateau at small sigma and feature-only floor", pass, timer.seconds(),
           300.0, note.str());
}

void criterion_density_shape() {
    Timer timer;
    const GraphDataset ds = sbm_fixture(1103);  // frozen seed with min degree 2
    const SparseMatrix p = transition_matrix(ds.adjacency);
    double cutoff = 0.0;
    for (const double v : p.values) cutoff = std::max(cutoff, v);

    const std::vector<double> sigmas{0.0, 0.02, 0.05, 0.1, 0.3, 0.7};
    bool pass = cutoff < 0.7;
    std::vector<double> floors;
    for (const index_t hops : {2, 5}) {
        double last = 2.0;
        double floor_density = -1.0;
        for (const double sigma : sigmas) {
            const double d = density(build_pre(p, sigma, hops));
            pass = pass && d <= last;
            last = d;
            if (sigma > cutoff) {
                const double expected = 1.0 / (static_cast<double>(ds.n_nodes) * (hops + 1));
                pass = pass && d == expected;
                floor_density = d;
            }
        }
        floors.push_back(floor_density);
    }
    pass = pass && floors.size() == 2 && floors[1] < floors[0];
    std::ostringstream note;
    note << "cutoff " << cutoff << ", H=2 floor " << floors[0] << ", H=5 floor " << floors[1];
    report(6, "density curves fall monotonically to the identity floor", pass, timer.seconds(),
           30.0, note.str());
}

// --- 7. Byte-identical sweeps ---------------------------------------------------

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void criterion_determinism() {
    Timer timer;
    const fs::path dir = fs::temp_directory_path() / "sdcnn_acceptance_determinism";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const fs::path out = dir / "out";
    {
        std::ofstream cfg(dir / "run.cfg");
        cfg << "[synth]\nkind = sbm\nnodes = 80\nblocks = 2\np_in = 0.2\np_out = 0.02\n"
               "features = 4\nfeature_signal = 1.0\nseed = 3\n"
               "[split]\ntrain = 0.6\nvalid = 0.2\ntest = 0.2\nseed = 7\n"
               "[train]\nhops = 2\nmode = pre\nlearning_rate = 0.05\nmax_epochs = 300\n"
               "patience = 30\nseed = 3\n"
               "[sweep]\nthresholds = 0,0.1,0.3\n"
               "[output]\ndir = " << out.string() << "\n";
    }
    const std::string cmd = std::string(SDCNN_CLI_PATH) + " sweep --config " +
                            (dir / "run.cfg").string() + " > " + (dir / "log.txt").string() +
                            " 2>&1";
    const int first = std::system(cmd.c_str());
    const std::string first_csv = slurp(out / "sweep.csv");
    const int second = std::system(cmd.c_str());
    const std::string second_csv = slurp(out / "sweep.csv");

    const bool ran = WIFEXITED(first) && WEXITSTATUS(first) == 0 && WIFEXITED(second) &&
                     WEXITSTATUS(second) == 0;
    const bool pass = ran && !first_csv.empty() && first_csv == second_csv;
    std::ostringstream note;
    note << first_csv.size() << " bytes" << (pass ? ", identical" : ", MISMATCH");
    report(7, "repeat sweeps produce byte-identical CSVs", pass, timer.seconds(), 60.0,
           note.str());
}

}  // namespace

int main() {
    criterion_equivalence();
    criterion_row_bound();
    criterion_memory_scaling();
    criterion_gradients();
    criterion_accuracy_shape();
    criterion_density_shape();
    criterion_determinism();
    if (g_failures == 0) {
        std::printf("acceptance: all 7 criteria passed\n");
        return 0;
    }
    std::printf("acceptance: %d criteria FAILED\n", g_failures);
    return 1;
}
