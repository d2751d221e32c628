#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "gravelet/common.hpp"
#include "gravelet/embedding.hpp"
#include "gravelet/parallel.hpp"
#include "gravelet/rng.hpp"
#include "gravelet/synthgen.hpp"

namespace gravelet {

struct ClusteringResult {
    std::vector<int> assignment; // node -> cluster id, ids contiguous from 0
    int k = 0;
};

// Single-linkage agglomerative clustering down to k clusters. Merge order is
// deterministic: smallest linkage distance first, ties by the smallest node
// index of each candidate pair. Final ids follow each cluster's smallest
// member. Quadratic memory, cubic time; benchmark graphs are small.
inline ClusteringResult agglomerative_cluster(const RowMatrixXd& coords, int k) {
    const int n = static_cast<int>(coords.rows());
    if (n == 0) throw Error(ErrorClass::InvalidInput, "cannot cluster an empty embedding");
    if (k < 1 || k > n)
        throw Error(ErrorClass::InvalidInput, "cluster count must be in [1, points]");

    std::vector<std::vector<double>> dist(static_cast<std::size_t>(n),
                                          std::vector<double>(static_cast<std::size_t>(n), 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double d = (coords.row(i) - coords.row(j)).norm();
            dist[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = d;
            dist[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = d;
        }

    std::vector<int> rep(static_cast<std::size_t>(n)); // cluster -> smallest member
    std::vector<char> active(static_cast<std::size_t>(n), 1);
    std::vector<int> owner(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        rep[static_cast<std::size_t>(i)] = i;
        owner[static_cast<std::size_t>(i)] = i;
    }

    for (int clusters = n; clusters > k; --clusters) {
        double best = std::numeric_limits<double>::infinity();
        int bi = -1, bj = -1; // bi holds the smaller representative
        for (int i = 0; i < n; ++i) {
            if (!active[static_cast<std::size_t>(i)]) continue;
            for (int j = i + 1; j < n; ++j) {
                if (!active[static_cast<std::size_t>(j)]) continue;
                const double d = dist[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                if (d < best) {
                    best = d;
                    bi = i;
                    bj = j;
                }
            }
        }
        // representatives equal row ids here: row i represents the cluster
        // whose smallest member is i, so (bi, bj) ordering is the tie-break
        for (int x = 0; x < n; ++x) {
            if (!active[static_cast<std::size_t>(x)] || x == bi || x == bj) continue;
            dist[static_cast<std::size_t>(bi)][static_cast<std::size_t>(x)] =
                dist[static_cast<std::size_t>(x)][static_cast<std::size_t>(bi)] =
                    std::min(dist[static_cast<std::size_t>(bi)][static_cast<std::size_t>(x)],
                             dist[static_cast<std::size_t>(bj)][static_cast<std::size_t>(x)]);
        }
        active[static_cast<std::size_t>(bj)] = 0;
        for (int x = 0; x < n; ++x)
            if (owner[static_cast<std::size_t>(x)] == bj) owner[static_cast<std::size_t>(x)] = bi;
    }

    ClusteringResult out;
    out.k = k;
    out.assignment.assign(static_cast<std::size_t>(n), -1);
    std::map<int, int> relabel; // smallest-member rep -> contiguous id
    for (int i = 0; i < n; ++i) {
        const int r = owner[static_cast<std::size_t>(i)];
        if (!relabel.count(r)) {
            const int id = static_cast<int>(relabel.size());
            relabel[r] = id;
        }
        out.assignment[static_cast<std::size_t>(i)] = relabel[r];
    }
    return out;
}

struct HomogeneityCompleteness {
    double homogeneity = 0.0;
    double completeness = 0.0;
};

namespace detail {

inline double entropy(const std::map<int, int>& counts, int total) {
    double h = 0.0;
    for (const auto& [label, c] : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / total;
        h -= p * std::log(p);
    }
    return h;
}

} // namespace detail

// Entropy-based clustering agreement. Degenerate entropies (single true
// class, single predicted cluster) score 1 by convention, so homogeneity of
// a perfect singleton clustering and completeness of the all-in-one
// clustering are both 1.
inline HomogeneityCompleteness homogeneity_completeness(const std::vector<int>& truth,
                                                        const std::vector<int>& pred) {
    if (truth.size() != pred.size() || truth.empty())
        throw Error(ErrorClass::DimensionMismatch, "label vectors must match and be non-empty");
    const int n = static_cast<int>(truth.size());
    std::map<int, int> tc, pc;
    std::map<std::pair<int, int>, int> joint;
    for (int i = 0; i < n; ++i) {
        tc[truth[static_cast<std::size_t>(i)]]++;
        pc[pred[static_cast<std::size_t>(i)]]++;
        joint[{truth[static_cast<std::size_t>(i)], pred[static_cast<std::size_t>(i)]}]++;
    }
    const double ht = detail::entropy(tc, n);
    const double hp = detail::entropy(pc, n);
    // H(T|P) = sum_p p(p) H(T | P=p)
    double ht_given_p = 0.0, hp_given_t = 0.0;
    for (const auto& [tp, c] : joint) {
        const double pj = static_cast<double>(c) / n;
        ht_given_p -= pj * std::log(static_cast<double>(c) / pc[tp.second]);
        hp_given_t -= pj * std::log(static_cast<double>(c) / tc[tp.first]);
    }
    HomogeneityCompleteness out;
    out.homogeneity = ht == 0.0 ? 1.0 : 1.0 - ht_given_p / ht;
    out.completeness = hp == 0.0 ? 1.0 : 1.0 - hp_given_t / hp;
    return out;
}

// Mean silhouette over all points. Singleton clusters contribute 0, as does
// any point whose intra and inter distances are both zero. Needs at least
// two clusters to be defined at all.
inline double silhouette_mean(const RowMatrixXd& coords, const std::vector<int>& assignment) {
    const int n = static_cast<int>(coords.rows());
    if (static_cast<std::size_t>(n) != assignment.size() || n == 0)
        throw Error(ErrorClass::DimensionMismatch, "assignment must cover every embedding row");
    std::map<int, int> sizes;
    for (int a : assignment) sizes[a]++;
    if (sizes.size() < 2)
        throw Error(ErrorClass::InvalidInput, "silhouette needs at least two clusters");

    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        const int own = assignment[static_cast<std::size_t>(i)];
        if (sizes[own] == 1) continue; // contributes 0
        std::map<int, double> sum;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            sum[assignment[static_cast<std::size_t>(j)]] += (coords.row(i) - coords.row(j)).norm();
        }
        const double a = sum[own] / (sizes[own] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (const auto& [c, s] : sum) {
            if (c == own) continue;
            b = std::min(b, s / sizes[c]);
        }
        const double denom = std::max(a, b);
        if (denom > 0.0) total += (b - a) / denom;
    }
    return total / n;
}

struct ClassificationScore {
    double accuracy = 0.0;
    double f1 = 0.0; // weighted by class support unless macro requested
};

// k-nearest-neighbor classification under stratified cross-validation. Fold
// assignment is a function of (node label, seed), never of row order, so
// permuting the input rows cannot move a node between folds; within a
// class, members are ranked by a seeded hash of their label and dealt
// round-robin. Vote ties break by smaller total distance, then smaller
// class id. k is clamped to the training rows available.
inline ClassificationScore knn_cv_classify(const RowMatrixXd& coords,
                                           const std::vector<std::string>& node_labels,
                                           const std::vector<int>& truth, int k = 4,
                                           int folds = 10, std::uint64_t seed = 0,
                                           bool macro_f1 = false, unsigned threads = 0) {
    const int n = static_cast<int>(coords.rows());
    if (static_cast<std::size_t>(n) != truth.size() ||
        static_cast<std::size_t>(n) != node_labels.size())
        throw Error(ErrorClass::DimensionMismatch, "labels and truth must cover every row");
    if (k < 1) throw Error(ErrorClass::InvalidInput, "k must be >= 1");
    if (folds < 2 || n < folds)
        throw Error(ErrorClass::InvalidInput, "need at least two folds and one row per fold");
    std::map<int, std::vector<int>> by_class;
    for (int i = 0; i < n; ++i) by_class[truth[static_cast<std::size_t>(i)]].push_back(i);
    for (const auto& [cls, members] : by_class)
        if (members.size() < 2)
            throw Error(ErrorClass::InvalidInput,
                        "class " + std::to_string(cls) + " has fewer than two members");

    std::vector<int> fold(static_cast<std::size_t>(n), 0);
    for (const auto& [cls, members] : by_class) {
        std::vector<std::pair<std::uint64_t, int>> ranked;
        for (int i : members) {
            const std::string& lbl = node_labels[static_cast<std::size_t>(i)];
            ranked.emplace_back(fnv1a(lbl.data(), lbl.size(), seed ^ 0xcbf29ce484222325ULL), i);
        }
        std::sort(ranked.begin(), ranked.end(),
                  [&](const auto& a, const auto& b) {
                      if (a.first != b.first) return a.first < b.first;
                      return node_labels[static_cast<std::size_t>(a.second)] <
                             node_labels[static_cast<std::size_t>(b.second)];
                  });
        for (std::size_t pos = 0; pos < ranked.size(); ++pos)
            fold[static_cast<std::size_t>(ranked[pos].second)] =
                static_cast<int>(pos % static_cast<std::size_t>(folds));
    }

    std::vector<int> predicted(static_cast<std::size_t>(n), -1);
    parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t ui) {
        const int i = static_cast<int>(ui);
        const int f = fold[ui];
        std::vector<std::pair<double, int>> cands; // (distance, row)
        for (int j = 0; j < n; ++j) {
            if (fold[static_cast<std::size_t>(j)] == f) continue;
            cands.emplace_back((coords.row(i) - coords.row(j)).norm(), j);
        }
        const int kk = std::min<int>(k, static_cast<int>(cands.size()));
        if (kk == 0) return; // fold layout guarantees training rows; defensive
        std::partial_sort(cands.begin(), cands.begin() + kk, cands.end(),
                          [](const auto& a, const auto& b) {
                              if (a.first != b.first) return a.first < b.first;
                              return a.second < b.second;
                          });
        std::map<int, std::pair<int, double>> votes; // class -> (count, dist sum)
        for (int t = 0; t < kk; ++t) {
            auto& v = votes[truth[static_cast<std::size_t>(cands[static_cast<std::size_t>(t)].second)]];
            v.first++;
            v.second += cands[static_cast<std::size_t>(t)].first;
        }
        int best = -1;
        for (const auto& [cls, v] : votes) {
            if (best < 0) {
                best = cls;
                continue;
            }
            const auto& bv = votes[best];
            if (v.first > bv.first ||
                (v.first == bv.first && v.second < bv.second))
                best = cls; // equal count and sum keeps the smaller id
        }
        predicted[ui] = best;
    });

    int correct = 0;
    std::map<int, int> tp, fp, fn;
    for (int i = 0; i < n; ++i) {
        const int t = truth[static_cast<std::size_t>(i)];
        const int p = predicted[static_cast<std::size_t>(i)];
        if (t == p) {
            ++correct;
            tp[t]++;
        } else {
            fp[p]++;
            fn[t]++;
        }
    }
    ClassificationScore out;
    out.accuracy = static_cast<double>(correct) / n;
    double f1_sum = 0.0, weight_sum = 0.0;
    for (const auto& [cls, members] : by_class) {
        const double tpd = tp[cls], fpd = fp[cls], fnd = fn[cls];
        const double prec = tpd + fpd > 0 ? tpd / (tpd + fpd) : 0.0;
        const double rec = tpd + fnd > 0 ? tpd / (tpd + fnd) : 0.0;
        const double f1 = prec + rec > 0 ? 2 * prec * rec / (prec + rec) : 0.0;
        const double w = macro_f1 ? 1.0 : static_cast<double>(members.size());
        f1_sum += w * f1;
        weight_sum += w;
    }
    out.f1 = weight_sum > 0 ? f1_sum / weight_sum : 0.0;
    return out;
}

// Fraction of nodes whose nearest other embedding is their designated
// partner. An exact distance tie counts for the partner: structurally
// identical twins tie at zero and the pairing is the intended answer.
inline double mirror_accuracy(const RowMatrixXd& coords, const std::vector<int>& mirror_map) {
    const int n = static_cast<int>(coords.rows());
    if (static_cast<std::size_t>(n) != mirror_map.size() || n < 2)
        throw Error(ErrorClass::DimensionMismatch, "mirror map must cover every embedding row");
    int correct = 0;
    for (int i = 0; i < n; ++i) {
        const int partner = mirror_map[static_cast<std::size_t>(i)];
        double best = std::numeric_limits<double>::infinity();
        int best_j = -1;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const double d = (coords.row(i) - coords.row(j)).norm();
            if (d < best || (d == best && j == partner)) {
                best = d;
                best_j = j;
            }
        }
        if (best_j == partner) ++correct;
    }
    return static_cast<double>(correct) / n;
}

struct EvalOptions {
    bool clustering = true; // agglomerative with k = number of roles
    bool knn = true;
    bool mirror = false;
    int knn_k = 4;
    int knn_folds = 10;
    bool macro_f1 = false;
};

struct TrialResult {
    bool ok = false;
    std::string error;
    double homogeneity = std::numeric_limits<double>::quiet_NaN();
    double completeness = std::numeric_limits<double>::quiet_NaN();
    double silhouette = std::numeric_limits<double>::quiet_NaN();
    double knn_accuracy = std::numeric_limits<double>::quiet_NaN();
    double knn_f1 = std::numeric_limits<double>::quiet_NaN();
    double mirror = std::numeric_limits<double>::quiet_NaN();
    double seconds = 0.0;
};

struct BenchmarkReport {
    std::string name;
    std::uint64_t seed = 0;
    std::vector<TrialResult> trials;

    int failures() const {
        int c = 0;
        for (const TrialResult& t : trials)
            if (!t.ok) ++c;
        return c;
    }
};

namespace detail {

inline double mean_of(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return xs.empty() ? std::numeric_limits<double>::quiet_NaN() : s / xs.size();
}

inline double sample_std(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    const double m = mean_of(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return std::sqrt(s / (xs.size() - 1));
}

inline std::vector<double> collect(const BenchmarkReport& r, double TrialResult::*field) {
    std::vector<double> xs;
    for (const TrialResult& t : r.trials)
        if (t.ok && std::isfinite(t.*field)) xs.push_back(t.*field);
    return xs;
}

} // namespace detail

inline double report_mean(const BenchmarkReport& r, double TrialResult::*field) {
    return detail::mean_of(detail::collect(r, field));
}

inline double report_std(const BenchmarkReport& r, double TrialResult::*field) {
    return detail::sample_std(detail::collect(r, field));
}

// Repeated evaluation of one benchmark recipe. Each trial regenerates the
// benchmark from a seed derived off the master, embeds it, and scores the
// requested metrics. A failing trial is kept in the report with its error
// message; it never silently vanishes from the averages' denominator.
inline BenchmarkReport run_benchmark(const std::string& name,
                                     const std::function<RoleBenchmark(std::uint64_t)>& generate,
                                     const EmbeddingConfig& config, const EvalOptions& eval,
                                     int trials, std::uint64_t seed) {
    if (trials < 1) throw Error(ErrorClass::InvalidInput, "need at least one trial");
    BenchmarkReport report;
    report.name = name;
    report.seed = seed;
    for (int t = 0; t < trials; ++t) {
        TrialResult res;
        const std::uint64_t trial_seed = derive_seed(seed, static_cast<std::uint64_t>(t));
        const auto start = std::chrono::steady_clock::now();
        try {
            const RoleBenchmark bench = generate(trial_seed);
            const EmbeddingSet set = embed_all(bench.graph, config);
            if (eval.clustering) {
                const ClusteringResult clusters =
                    agglomerative_cluster(set.coords, bench.num_roles());
                const auto hc = homogeneity_completeness(bench.roles, clusters.assignment);
                res.homogeneity = hc.homogeneity;
                res.completeness = hc.completeness;
                if (clusters.k >= 2) res.silhouette = silhouette_mean(set.coords, clusters.assignment);
            }
            if (eval.knn) {
                const ClassificationScore score =
                    knn_cv_classify(set.coords, set.labels, bench.roles, eval.knn_k,
                                    eval.knn_folds, trial_seed, eval.macro_f1, config.threads);
                res.knn_accuracy = score.accuracy;
                res.knn_f1 = score.f1;
            }
            if (eval.mirror && !bench.mirror_map.empty())
                res.mirror = mirror_accuracy(set.coords, bench.mirror_map);
            res.ok = true;
        } catch (const Error& e) {
            res.error = std::string(e.tag()) + ": " + e.what();
        }
        res.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        report.trials.push_back(std::move(res));
    }
    bool any_ok = false;
    for (const TrialResult& t : report.trials) any_ok = any_ok || t.ok;
    if (!any_ok)
        throw Error(ErrorClass::EigensolverFailure,
                    "every trial of " + name + " failed; first error: " +
                        report.trials.front().error);
    return report;
}

namespace detail {

inline std::string metric_cell(double v) {
    return std::isfinite(v) ? format_double(v) : std::string();
}

} // namespace detail

// Per-trial CSV. The seconds column is wall-clock and exempt from
// byte-identity guarantees; everything else is deterministic.
inline void write_benchmark_csv(std::ostream& out, const BenchmarkReport& r) {
    out << "trial,status,homogeneity,completeness,silhouette,knn_accuracy,knn_f1,"
           "mirror_accuracy,seconds\n";
    auto row = [&](const std::string& head, const TrialResult& t, bool timing) {
        out << head << ',' << (t.ok ? "ok" : "failed") << ',' << detail::metric_cell(t.homogeneity)
            << ',' << detail::metric_cell(t.completeness) << ',' << detail::metric_cell(t.silhouette)
            << ',' << detail::metric_cell(t.knn_accuracy) << ',' << detail::metric_cell(t.knn_f1)
            << ',' << detail::metric_cell(t.mirror) << ','
            << (timing ? format_double(t.seconds) : std::string()) << '\n';
    };
    for (std::size_t i = 0; i < r.trials.size(); ++i)
        row(std::to_string(i), r.trials[static_cast<std::size_t>(i)], true);
    TrialResult mean, sd;
    mean.ok = sd.ok = true;
    mean.homogeneity = report_mean(r, &TrialResult::homogeneity);
    mean.completeness = report_mean(r, &TrialResult::completeness);
    mean.silhouette = report_mean(r, &TrialResult::silhouette);
    mean.knn_accuracy = report_mean(r, &TrialResult::knn_accuracy);
    mean.knn_f1 = report_mean(r, &TrialResult::knn_f1);
    mean.mirror = report_mean(r, &TrialResult::mirror);
    sd.homogeneity = report_std(r, &TrialResult::homogeneity);
    sd.completeness = report_std(r, &TrialResult::completeness);
    sd.silhouette = report_std(r, &TrialResult::silhouette);
    sd.knn_accuracy = report_std(r, &TrialResult::knn_accuracy);
    sd.knn_f1 = report_std(r, &TrialResult::knn_f1);
    sd.mirror = report_std(r, &TrialResult::mirror);
    row("mean", mean, false);
    row("std", sd, false);
}

// Human-readable counterpart of the CSV, aligned into columns.
inline void write_benchmark_table(std::ostream& out, const BenchmarkReport& r) {
    const std::vector<std::string> heads = {"trial",  "status", "homog", "compl", "silh",
                                            "knn_acc", "knn_f1", "mirror", "seconds"};
    std::vector<std::vector<std::string>> rows;
    auto fmt = [](double v) {
        if (!std::isfinite(v)) return std::string("-");
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.4f", v);
        return std::string(buf);
    };
    for (std::size_t i = 0; i < r.trials.size(); ++i) {
        const TrialResult& t = r.trials[i];
        rows.push_back({std::to_string(i), t.ok ? "ok" : "failed", fmt(t.homogeneity),
                        fmt(t.completeness), fmt(t.silhouette), fmt(t.knn_accuracy), fmt(t.knn_f1),
                        fmt(t.mirror), fmt(t.seconds)});
    }
    rows.push_back({"mean", "", fmt(report_mean(r, &TrialResult::homogeneity)),
                    fmt(report_mean(r, &TrialResult::completeness)),
                    fmt(report_mean(r, &TrialResult::silhouette)),
                    fmt(report_mean(r, &TrialResult::knn_accuracy)),
                    fmt(report_mean(r, &TrialResult::knn_f1)),
                    fmt(report_mean(r, &TrialResult::mirror)), "-"});
    rows.push_back({"std", "", fmt(report_std(r, &TrialResult::homogeneity)),
                    fmt(report_std(r, &TrialResult::completeness)),
                    fmt(report_std(r, &TrialResult::silhouette)),
                    fmt(report_std(r, &TrialResult::knn_accuracy)),
                    fmt(report_std(r, &TrialResult::knn_f1)),
                    fmt(report_std(r, &TrialResult::mirror)), "-"});
    std::vector<std::size_t> width(heads.size());
    for (std::size_t c = 0; c < heads.size(); ++c) {
        width[c] = heads[c].size();
        for (const auto& row : rows) width[c] = std::max(width[c], row[c].size());
    }
    auto emit = [&](const std::vector<std::string>& row) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            out << row[c];
            if (c + 1 < row.size()) out << std::string(width[c] - row[c].size() + 2, ' ');
        }
        out << '\n';
    };
    emit(heads);
    for (const auto& row : rows) emit(row);
}

// Least-squares slope of y against x; used for log-log runtime scaling.
inline double least_squares_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw Error(ErrorClass::InvalidInput, "slope needs at least two points");
    const double mx = detail::mean_of(xs), my = detail::mean_of(ys);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        num += (xs[i] - mx) * (ys[i] - my);
        den += (xs[i] - mx) * (xs[i] - mx);
    }
    if (den == 0.0) throw Error(ErrorClass::InvalidInput, "slope undefined for constant x");
    return num / den;
}

} // namespace gravelet
