#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "gravelet/common.hpp"
#include "gravelet/graph.hpp"
#include "gravelet/parallel.hpp"
#include "gravelet/wavelet.hpp"

namespace gravelet {

struct EmbeddingConfig {
    int d = 50;           // characteristic-function sample points per scale
    double t_max = 100.0; // samples at t_i = i * t_max / d
    ScaleParams scales;
    WaveletOptions wavelet;
    int threads = 0; // 0 = hardware default
};

inline std::vector<double> sample_points(const EmbeddingConfig& cfg) {
    if (cfg.d < 1) throw Error(ErrorClass::InvalidInput, "need at least one sample point");
    if (!(cfg.t_max > 0.0)) throw Error(ErrorClass::InvalidInput, "t_max must be > 0");
    std::vector<double> ts(static_cast<std::size_t>(cfg.d));
    for (int i = 1; i <= cfg.d; ++i)
        ts[static_cast<std::size_t>(i) - 1] = cfg.t_max * i / cfg.d;
    return ts;
}

// Empirical characteristic function of the coefficient distribution:
//   phi(t) = (1/n) sum_m exp(i t psi_m)
// Exact zeros contribute exp(0) = 1, so they collapse to a single term and
// truncated columns cost only their support.
inline void char_function_into(const Eigen::VectorXd& column, const std::vector<double>& ts,
                               double* out) {
    const int n = static_cast<int>(column.size());
    if (n == 0) throw Error(ErrorClass::InvalidInput, "empty column");
    const std::size_t d = ts.size();
    std::vector<double> re(d, 0.0), im(d, 0.0);
    int zeros = 0;
    for (int m = 0; m < n; ++m) {
        const double v = column[m];
        if (v == 0.0) {
            ++zeros;
            continue;
        }
        for (std::size_t i = 0; i < d; ++i) {
            re[i] += std::cos(ts[i] * v);
            im[i] += std::sin(ts[i] * v);
        }
    }
    for (std::size_t i = 0; i < d; ++i) {
        out[2 * i] = (re[i] + zeros) / n;
        out[2 * i + 1] = im[i] / n;
    }
}

inline std::vector<std::complex<double>> char_function(const Eigen::VectorXd& column,
                                                       const std::vector<double>& ts) {
    std::vector<double> flat(2 * ts.size());
    char_function_into(column, ts, flat.data());
    std::vector<std::complex<double>> out(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) out[i] = {flat[2 * i], flat[2 * i + 1]};
    return out;
}

// Workspace variant: entries off ws.support are exact zeros of an n-vector.
// ws.support is sorted, so sums run in the same order as the dense form and
// the two produce identical bytes.
inline void char_function_into(const FilterWorkspace& ws, int n, const std::vector<double>& ts,
                               double* out) {
    if (n == 0) throw Error(ErrorClass::InvalidInput, "empty column");
    const std::size_t d = ts.size();
    std::vector<double> re(d, 0.0), im(d, 0.0);
    int zeros = n - static_cast<int>(ws.support.size());
    for (int u : ws.support) {
        const double v = ws.acc[static_cast<std::size_t>(u)];
        if (v == 0.0) {
            ++zeros;
            continue;
        }
        for (std::size_t i = 0; i < d; ++i) {
            re[i] += std::cos(ts[i] * v);
            im[i] += std::sin(ts[i] * v);
        }
    }
    for (std::size_t i = 0; i < d; ++i) {
        out[2 * i] = (re[i] + zeros) / n;
        out[2 * i + 1] = im[i] / n;
    }
}

// Row-major so each node's coordinates are contiguous.
using RowMatrixXd = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct EmbeddingSet {
    std::vector<std::string> labels;
    RowMatrixXd coords; // row per node: per scale, (re, im) pairs per sample point
    std::vector<double> scales;
    std::vector<double> sample_points;
    SpectrumInfo spectrum;
    bool chebyshev = false;
    std::vector<double> filter_tols; // per scale, empty in dense mode
    std::uint64_t graph_hash = 0;
    EmbeddingConfig config;

    int dim() const { return static_cast<int>(coords.cols()); }
    int n() const { return static_cast<int>(coords.rows()); }
};

inline EmbeddingSet embed_all(const Graph& g, const EmbeddingConfig& cfg = {}) {
    if (cfg.threads < 0) throw Error(ErrorClass::InvalidInput, "thread count must be >= 0");
    const std::vector<double> ts = sample_points(cfg);
    WaveletEngine engine(g, cfg.wavelet);
    const ScaleRange range = select_scales(engine.spectrum(), cfg.scales);
    engine.prepare_scales(range.scales);

    const int n = g.n();
    const int j = static_cast<int>(range.scales.size());
    EmbeddingSet set;
    set.labels = g.node_labels();
    set.scales = range.scales;
    set.sample_points = ts;
    set.spectrum = engine.spectrum();
    set.chebyshev = !engine.dense_mode();
    if (set.chebyshev)
        for (double s : range.scales) set.filter_tols.push_back(engine.filter(s).tol);
    set.graph_hash = g.content_hash();
    set.config = cfg;
    set.coords.resize(n, 2 * cfg.d * j);

    if (engine.dense_mode()) {
        // One heat matrix per scale, then per-node characteristic functions.
        for (int sj = 0; sj < j; ++sj) {
            const Eigen::MatrixXd psi = engine.matrix(range.scales[static_cast<std::size_t>(sj)]);
            const int off = 2 * cfg.d * sj;
            parallel_for(static_cast<std::size_t>(n), cfg.threads, [&](std::size_t a) {
                char_function_into(psi.col(static_cast<int>(a)), ts,
                                   set.coords.row(static_cast<int>(a)).data() + off);
            });
        }
    } else {
        const unsigned workers = resolved_thread_count(static_cast<std::size_t>(n),
                                                       static_cast<unsigned>(cfg.threads));
        std::vector<FilterWorkspace> scratch(workers);
        parallel_for_workers(static_cast<std::size_t>(n), static_cast<unsigned>(cfg.threads),
                             [&](unsigned w, std::size_t a) {
                                 for (int sj = 0; sj < j; ++sj) {
                                     engine.column_into(
                                         static_cast<int>(a),
                                         range.scales[static_cast<std::size_t>(sj)], scratch[w]);
                                     char_function_into(scratch[w], n, ts,
                                                        set.coords.row(static_cast<int>(a)).data() +
                                                            2 * cfg.d * sj);
                                 }
                             });
    }
    return set;
}

inline double structural_distance(const EmbeddingSet& set, int a, int b) {
    if (a < 0 || a >= set.n() || b < 0 || b >= set.n())
        throw Error(ErrorClass::InvalidInput, "node index out of range");
    return (set.coords.row(a) - set.coords.row(b)).norm();
}

// k nearest rows to `node`, excluding itself. Ties broken by lower index.
inline std::vector<std::pair<int, double>> nearest_neighbors(const EmbeddingSet& set, int node,
                                                             int k) {
    if (node < 0 || node >= set.n())
        throw Error(ErrorClass::InvalidInput, "node index out of range");
    if (k < 1) throw Error(ErrorClass::InvalidInput, "k must be >= 1");
    std::vector<std::pair<double, int>> all;
    all.reserve(static_cast<std::size_t>(set.n()) - 1);
    for (int b = 0; b < set.n(); ++b)
        if (b != node) all.emplace_back(structural_distance(set, node, b), b);
    std::sort(all.begin(), all.end());
    std::vector<std::pair<int, double>> out;
    const int take = std::min<int>(k, static_cast<int>(all.size()));
    out.reserve(static_cast<std::size_t>(take));
    for (int i = 0; i < take; ++i) out.emplace_back(all[static_cast<std::size_t>(i)].second,
                                                    all[static_cast<std::size_t>(i)].first);
    return out;
}

// CSV layout: node label, then per scale j and sample i the pair
// s{j}_t{i}_re, s{j}_t{i}_im (1-based j and i, scales outermost).
inline void write_embedding_csv(std::ostream& out, const EmbeddingSet& set) {
    out << "node";
    for (std::size_t sj = 1; sj <= set.scales.size(); ++sj)
        for (std::size_t i = 1; i <= set.sample_points.size(); ++i)
            out << ",s" << sj << "_t" << i << "_re,s" << sj << "_t" << i << "_im";
    out << '\n';
    for (int a = 0; a < set.n(); ++a) {
        out << set.labels[static_cast<std::size_t>(a)];
        for (int c = 0; c < set.dim(); ++c) out << ',' << format_double(set.coords(a, c));
        out << '\n';
    }
}

inline EmbeddingSet read_embedding_csv(std::istream& in) {
    std::string header;
    // leading '#' lines hold run metadata and are not part of the table
    while (std::getline(in, header) && !header.empty() && header[0] == '#') {
    }
    if (!in && header.empty())
        throw Error(ErrorClass::ParseError, "empty embedding file");
    std::vector<std::string> cols;
    {
        std::istringstream hs(header);
        std::string tok;
        while (std::getline(hs, tok, ',')) cols.push_back(tok);
    }
    if (cols.empty() || cols[0] != "node")
        throw Error(ErrorClass::ParseError, "embedding header must start with 'node'");
    const std::size_t dim = cols.size() - 1;
    if (dim == 0 || dim % 2 != 0)
        throw Error(ErrorClass::ParseError, "embedding header has no re/im pairs");

    EmbeddingSet set;
    std::size_t num_scales = 0, num_ts = 0;
    for (std::size_t c = 1; c < cols.size(); c += 2) {
        std::size_t sj = 0, ti = 0;
        if (std::sscanf(cols[c].c_str(), "s%zu_t%zu_re", &sj, &ti) == 2) {
            num_scales = std::max(num_scales, sj);
            num_ts = std::max(num_ts, ti);
        } else {
            throw Error(ErrorClass::ParseError, "bad embedding column name '" + cols[c] + "'");
        }
    }
    if (num_scales * num_ts * 2 != dim)
        throw Error(ErrorClass::ParseError, "embedding header pairs do not tile the row");

    std::vector<std::string> labels;
    std::vector<double> values;
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tok;
        std::getline(ls, tok, ',');
        labels.push_back(tok);
        std::size_t got = 0;
        while (std::getline(ls, tok, ',')) {
            try {
                std::size_t pos = 0;
                values.push_back(std::stod(tok, &pos));
                if (pos != tok.size()) throw std::invalid_argument(tok);
            } catch (const std::exception&) {
                throw Error(ErrorClass::ParseError,
                            "line " + std::to_string(lineno) + ": bad value '" + tok + "'");
            }
            ++got;
        }
        if (got != dim)
            throw Error(ErrorClass::ParseError,
                        "line " + std::to_string(lineno) + ": expected " + std::to_string(dim) +
                            " coordinates, got " + std::to_string(got));
    }
    set.labels = std::move(labels);
    set.coords.resize(static_cast<int>(set.labels.size()), static_cast<int>(dim));
    for (std::size_t a = 0; a < set.labels.size(); ++a)
        for (std::size_t c = 0; c < dim; ++c)
            set.coords(static_cast<int>(a), static_cast<int>(c)) = values[a * dim + c];
    set.scales.assign(num_scales, 0.0); // placeholder count, true values live in metadata
    set.sample_points.assign(num_ts, 0.0);
    return set;
}

inline std::string hash_hex(std::uint64_t h) {
    char buf[17] = {};
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// Sidecar describing how the embedding was produced, enough to reproduce it.
inline void write_embedding_metadata(std::ostream& out, const EmbeddingSet& set) {
    nlohmann::ordered_json j;
    j["nodes"] = set.n();
    j["graph_hash"] = hash_hex(set.graph_hash);
    j["mode"] = set.chebyshev ? "chebyshev" : "dense";
    j["d"] = set.config.d;
    j["t_max"] = set.config.t_max;
    j["eta"] = set.config.scales.eta;
    j["gamma"] = set.config.scales.gamma;
    j["scales"] = set.scales;
    j["lambda2"] = set.spectrum.lambda2;
    j["lambda_max"] = set.spectrum.lambda_max;
    if (set.chebyshev) {
        j["order"] = set.config.wavelet.order;
        j["filter_tols"] = set.filter_tols;
    }
    out << j.dump(2) << '\n';
}

} // namespace gravelet
