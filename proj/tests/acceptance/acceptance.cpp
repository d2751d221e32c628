// Release gate: every shipped claim measured end to end, one line per
// criterion. Run with no arguments for all criteria or pass criterion
// numbers to run a subset. Exits nonzero if any selected criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gravelet/embedding.hpp"
#include "gravelet/roles_eval.hpp"
#include "gravelet/synthgen.hpp"
#include "testlib/oracles.hpp"

using namespace gravelet;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

RoleBenchmark house_bench(std::uint64_t seed) {
    return make_cycle_with_shapes(30, {{ShapeKind::House, 10}}, Placement::Regular, seed);
}

RoleBenchmark varied_bench(std::uint64_t seed) {
    return make_cycle_with_shapes(40,
                                  {{ShapeKind::House, 8}, {ShapeKind::Fan, 8},
                                   {ShapeKind::Star, 8}},
                                  Placement::Random, seed);
}

RoleBenchmark varied_perturbed_bench(std::uint64_t seed) {
    return perturb_edges(varied_bench(derive_seed(seed, 0)), 0.10, PerturbMode::Add,
                         derive_seed(seed, 1));
}

// Shared corpus for the approximation and conservation criteria. Every entry
// stays small enough for the dense reference path.
std::vector<std::pair<std::string, Graph>> benchmark_graphs() {
    std::vector<std::pair<std::string, Graph>> out;
    out.emplace_back("house", house_bench(0).graph);
    out.emplace_back("varied", varied_bench(0).graph);
    out.emplace_back("varied-perturbed", varied_perturbed_bench(0).graph);
    out.emplace_back("barbell", make_barbell().graph);
    out.emplace_back("mirrored-karate", make_mirrored_karate(7, 0).graph);
    const auto corpus = make_crossgraph_corpus(3, 0);
    for (std::size_t i = 0; i < corpus.size(); ++i)
        out.emplace_back("crossgraph-" + std::to_string(i), corpus[i].graph);
    return out;
}

std::string fmt(double v) { return format_double(v); }

Outcome house_benchmark() {
    const BenchmarkReport report =
        run_benchmark("house", house_bench, EmbeddingConfig{}, EvalOptions{}, 25, 0);
    const double hom = report_mean(report, &TrialResult::homogeneity);
    const double comp = report_mean(report, &TrialResult::completeness);
    const double sil = report_mean(report, &TrialResult::silhouette);
    const double acc = report_mean(report, &TrialResult::knn_accuracy);
    const double f1 = report_mean(report, &TrialResult::knn_f1);
    Outcome o;
    o.pass = hom >= 0.99 && comp >= 0.99 && acc >= 0.99 && f1 >= 0.99 && sil >= 0.95;
    std::ostringstream d;
    d << "homogeneity " << fmt(hom) << ", completeness " << fmt(comp) << ", accuracy "
      << fmt(acc) << ", f1 " << fmt(f1) << " (each >= 0.99), silhouette " << fmt(sil)
      << " (>= 0.95), failed trials " << report.failures();
    o.detail = d.str();
    return o;
}

Outcome varied_perturbed_benchmark() {
    const BenchmarkReport report = run_benchmark("varied-perturbed", varied_perturbed_bench,
                                                 EmbeddingConfig{}, EvalOptions{}, 25, 0);
    const double hom = report_mean(report, &TrialResult::homogeneity);
    const double acc = report_mean(report, &TrialResult::knn_accuracy);
    Outcome o;
    o.pass = hom >= 0.55 && acc >= 0.60;
    std::ostringstream d;
    d << "homogeneity " << fmt(hom) << " (>= 0.55), accuracy " << fmt(acc)
      << " (>= 0.60), failed trials " << report.failures();
    o.detail = d.str();
    return o;
}

Outcome barbell_twins() {
    const RoleBenchmark bench = make_barbell();
    EmbeddingConfig cfg;
    cfg.wavelet.mode = WaveletMode::Dense;
    const EmbeddingSet set = embed_all(bench.graph, cfg);
    double worst_within = 0.0;
    double best_across = std::numeric_limits<double>::infinity();
    for (int a = 0; a < set.n(); ++a)
        for (int b = a + 1; b < set.n(); ++b) {
            const double dist = structural_distance(set, a, b);
            if (bench.roles[static_cast<std::size_t>(a)] ==
                bench.roles[static_cast<std::size_t>(b)])
                worst_within = std::max(worst_within, dist);
            else
                best_across = std::min(best_across, dist);
        }
    Outcome o;
    o.pass = worst_within <= 1e-6 && best_across > 1e-3;
    std::ostringstream d;
    d << "max within-orbit distance " << fmt(worst_within)
      << " (<= 1e-6), min cross-orbit distance " << fmt(best_across) << " (> 1e-3)";
    o.detail = d.str();
    return o;
}

// 50 seeded connected graphs up to n = 100, reused by the two theory checks.
std::vector<Graph> random_corpus() {
    std::vector<Graph> out;
    for (int i = 0; i < 50; ++i) {
        const int n = 20 + (i * 13) % 81;
        out.push_back(oracle::random_connected_graph(n, n / 2, 9000 + i));
    }
    return out;
}

Outcome variance_identity() {
    double worst = 0.0;
    for (const Graph& g : random_corpus()) {
        WaveletOptions wopts;
        wopts.mode = WaveletMode::Dense;
        WaveletEngine engine(g, wopts);
        const ScaleRange range = select_scales(engine.spectrum());
        std::vector<double> needed;
        for (double s : range.scales) {
            needed.push_back(s);
            needed.push_back(2.0 * s);
        }
        engine.prepare_scales(needed);
        const int n = g.n();
        const double delta0 = 1.0 - 1.0 / n;
        for (double s : range.scales) {
            const Eigen::MatrixXd m_s = engine.matrix(s);
            const Eigen::MatrixXd m_2s = engine.matrix(2.0 * s);
            for (int a = 0; a < n; ++a) {
                const double empirical = offdiag_variance(m_s.col(a), a);
                const double closed = offdiag_variance_identity(
                    delta0, delta_a(m_s.col(a), a), delta_a(m_2s.col(a), a), n);
                worst = std::max(worst, std::abs(empirical - closed));
            }
        }
    }
    Outcome o;
    o.pass = worst <= 1e-10;
    o.detail = "max |empirical - closed-form| variance gap " + fmt(worst) + " (<= 1e-10)";
    return o;
}

Outcome decay_envelope() {
    double worst = 0.0;
    for (const Graph& g : random_corpus()) {
        WaveletOptions wopts;
        wopts.mode = WaveletMode::Dense;
        WaveletEngine engine(g, wopts);
        const std::vector<double> scales{1.0, 2.0, 3.0, 4.0, 5.0};
        engine.prepare_scales(scales);
        const int n = g.n();
        const double delta0 = 1.0 - 1.0 / n;
        for (double s : scales) {
            const Eigen::MatrixXd m = engine.matrix(s);
            for (int a = 0; a < n; ++a) {
                const BoundsCheck c =
                    convergence_bounds_check(delta0, delta_a(m.col(a), a),
                                             engine.spectrum().lambda2,
                                             engine.spectrum().lambda_max, s);
                worst = std::max(worst, std::max(c.lower - c.value, c.value - c.upper));
            }
        }
    }
    Outcome o;
    o.pass = worst <= 1e-12;
    o.detail = "max envelope violation " + fmt(worst) + " (<= 1e-12 slack)";
    return o;
}

Outcome chebyshev_against_dense() {
    double worst_wavelet = 0.0, worst_coord = 0.0;
    for (const auto& [name, g] : benchmark_graphs()) {
        if (g.n() > 200) continue;
        WaveletOptions dense_opts, cheb_opts;
        dense_opts.mode = WaveletMode::Dense;
        cheb_opts.mode = WaveletMode::Chebyshev;
        WaveletEngine dense(g, dense_opts), cheb(g, cheb_opts);
        const ScaleRange range = select_scales(dense.spectrum());
        dense.prepare_scales(range.scales);
        cheb.prepare_scales(range.scales);
        for (double s : range.scales)
            worst_wavelet = std::max(
                worst_wavelet, (dense.matrix(s) - cheb.matrix(s)).cwiseAbs().maxCoeff());

        EmbeddingConfig dc, cc;
        dc.wavelet.mode = WaveletMode::Dense;
        cc.wavelet.mode = WaveletMode::Chebyshev;
        const EmbeddingSet ed = embed_all(g, dc);
        const EmbeddingSet ec = embed_all(g, cc);
        worst_coord =
            std::max(worst_coord, (ed.coords - ec.coords).cwiseAbs().maxCoeff());
    }
    Outcome o;
    o.pass = worst_wavelet <= 1e-6 && worst_coord <= 1e-6;
    std::ostringstream d;
    d << "max wavelet-entry error " << fmt(worst_wavelet) << ", max coordinate error "
      << fmt(worst_coord) << " (each <= 1e-6)";
    o.detail = d.str();
    return o;
}

Outcome mass_and_phi_bounds() {
    double worst_mass = 0.0, worst_phi = 0.0;
    auto graphs = benchmark_graphs();
    for (int i = 0; i < 10; ++i) {
        const int n = 20 + 7 * i;
        graphs.emplace_back("random-" + std::to_string(i),
                            oracle::random_connected_graph(n, 15, 100 + i));
    }
    for (const auto& [name, g] : graphs) {
        for (WaveletMode mode : {WaveletMode::Dense, WaveletMode::Chebyshev}) {
            WaveletOptions wopts;
            wopts.mode = mode;
            WaveletEngine engine(g, wopts);
            const ScaleRange range = select_scales(engine.spectrum());
            engine.prepare_scales(range.scales);
            for (double s : range.scales) {
                const Eigen::VectorXd sums = engine.matrix(s).colwise().sum();
                worst_mass = std::max(worst_mass, (sums.array() - 1.0).abs().maxCoeff());
            }
        }
        const EmbeddingSet set = embed_all(g);
        for (int a = 0; a < set.n(); ++a)
            for (int c = 0; c + 1 < set.dim(); c += 2)
                worst_phi = std::max(worst_phi, std::hypot(set.coords(a, c),
                                                           set.coords(a, c + 1)));
    }
    Outcome o;
    o.pass = worst_mass <= 1e-8 && worst_phi <= 1.0 + 1e-12;
    std::ostringstream d;
    d << "max |column sum - 1| " << fmt(worst_mass) << " (<= 1e-8), max |phi| "
      << fmt(worst_phi) << " (<= 1 + 1e-12)";
    o.detail = d.str();
    return o;
}

Outcome mirrored_karate_recovery() {
    const EmbeddingConfig cfg;
    std::vector<double> means;
    for (int k = 1; k <= 25; ++k) {
        std::vector<double> acc;
        for (int t = 0; t < 25; ++t) {
            const std::uint64_t s = derive_seed(0, static_cast<std::uint64_t>(k) * 1000003ULL +
                                                       static_cast<std::uint64_t>(t));
            const RoleBenchmark bench = make_mirrored_karate(k, s);
            const EmbeddingSet set = embed_all(bench.graph, cfg);
            acc.push_back(mirror_accuracy(set.coords, bench.mirror_map));
        }
        double mean = 0.0;
        for (double a : acc) mean += a;
        means.push_back(mean / static_cast<double>(acc.size()));
    }
    double overall = 0.0;
    for (double m : means) overall += m;
    overall /= static_cast<double>(means.size());
    Outcome o;
    o.pass = overall >= 0.75;
    o.detail = "mean mirror accuracy over 1..25 cross edges " + fmt(overall) + " (>= 0.75)";
    return o;
}

Outcome crossgraph_transfer() {
    const auto corpus = make_crossgraph_corpus(200, 0);
    const EmbeddingConfig cfg;
    RowMatrixXd pooled;
    std::vector<std::string> labels;
    std::vector<int> truth;
    std::vector<RowMatrixXd> blocks(corpus.size());
    Eigen::Index total = 0, dim = 0;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const EmbeddingSet set = embed_all(corpus[i].graph, cfg);
        blocks[i] = set.coords;
        dim = set.coords.cols();
        total += set.coords.rows();
        for (int a = 0; a < corpus[i].graph.n(); ++a) {
            labels.push_back("g" + std::to_string(i) + ":" + corpus[i].graph.label(a));
            truth.push_back(corpus[i].roles[static_cast<std::size_t>(a)]);
        }
    }
    pooled.resize(total, dim);
    Eigen::Index row = 0;
    for (const RowMatrixXd& b : blocks) {
        pooled.middleRows(row, b.rows()) = b;
        row += b.rows();
    }
    const ClassificationScore score =
        knn_cv_classify(pooled, labels, truth, 4, 10, derive_seed(0, 1), false, 0);
    Outcome o;
    o.pass = score.accuracy >= 0.85 && score.f1 >= 0.85;
    std::ostringstream d;
    d << "200-graph pooled 4-NN accuracy " << fmt(score.accuracy) << ", f1 " << fmt(score.f1)
      << " (each >= 0.85)";
    o.detail = d.str();
    return o;
}

Outcome near_linear_scaling() {
    const auto family = make_scaling_family({1000, 2000, 4000, 8000, 16000}, 0);
    EmbeddingConfig cfg;
    cfg.wavelet.mode = WaveletMode::Chebyshev;
    // one pipeline at every size; the smallest graphs must not take the dense
    // spectral-bounds shortcut
    cfg.wavelet.spectral.dense_threshold = 0;
    std::vector<double> log_edges, log_secs;
    for (const Graph& g : family) {
        const auto start = std::chrono::steady_clock::now();
        const EmbeddingSet set = embed_all(g, cfg);
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        (void)set;
        log_edges.push_back(std::log(static_cast<double>(g.edge_count())));
        log_secs.push_back(std::log(secs));
    }
    const double slope = least_squares_slope(log_edges, log_secs);
    Outcome o;
    o.pass = slope >= 0.8 && slope <= 1.3;
    o.detail = "log-log slope of wall time vs edge count " + fmt(slope) + " (in [0.8, 1.3])";
    return o;
}

struct Criterion {
    int id;
    const char* name;
    Outcome (*fn)();
};

const Criterion kCriteria[] = {
    {1, "house benchmark", house_benchmark},
    {2, "noisy varied benchmark", varied_perturbed_benchmark},
    {3, "barbell structural twins", barbell_twins},
    {4, "off-diagonal variance identity", variance_identity},
    {5, "diagonal decay envelope", decay_envelope},
    {6, "chebyshev against dense", chebyshev_against_dense},
    {7, "mass conservation and phi bound", mass_and_phi_bounds},
    {8, "mirrored karate recovery", mirrored_karate_recovery},
    {9, "cross-graph role transfer", crossgraph_transfer},
    {10, "near-linear scaling", near_linear_scaling},
};

} // namespace

int main(int argc, char** argv) {
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) {
        const int id = std::atoi(argv[i]);
        if (id < 1 || id > 10) {
            std::fprintf(stderr, "usage: %s [criterion numbers 1..10]\n", argv[0]);
            return 2;
        }
        selected.insert(id);
    }

    int failures = 0;
    for (const Criterion& c : kCriteria) {
        if (!selected.empty() && !selected.count(c.id)) continue;
        Outcome o;
        try {
            o = c.fn();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("threw: ") + e.what();
        }
        std::printf("criterion %2d %s  %s: %s\n", c.id, o.pass ? "PASS" : "FAIL", c.name,
                    o.detail.c_str());
        std::fflush(stdout);
        if (!o.pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
