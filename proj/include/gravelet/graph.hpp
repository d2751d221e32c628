#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <queue>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Sparse>

#include "gravelet/common.hpp"
#include "gravelet/rng.hpp"

namespace gravelet {

struct EdgeInput {
    std::string u;
    std::string v;
    std::optional<double> w;
};

struct Edge {
    int u;
    int v;
    double w;
};

// Immutable undirected weighted graph. Node labels are arbitrary strings
// mapped to dense 0-based indices in first-seen order.
class Graph {
public:
    Graph() = default;

    int n() const { return static_cast<int>(labels_.size()); }
    std::size_t edge_count() const { return edges_.size(); }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<std::string>& node_labels() const { return labels_; }

    const std::string& label(int i) const { return labels_.at(static_cast<std::size_t>(i)); }

    std::optional<int> index_of(const std::string& label) const {
        auto it = label_to_index_.find(label);
        if (it == label_to_index_.end()) return std::nullopt;
        return it->second;
    }

    double degree(int i) const { return degrees_.at(static_cast<std::size_t>(i)); }
    const std::vector<double>& degrees() const { return degrees_; }
    double max_degree() const {
        double m = 0.0;
        for (double d : degrees_) m = std::max(m, d);
        return m;
    }

    std::span<const int> neighbors(int i) const {
        return {nbr_index_.data() + offsets_[static_cast<std::size_t>(i)],
                nbr_index_.data() + offsets_[static_cast<std::size_t>(i) + 1]};
    }
    std::span<const double> neighbor_weights(int i) const {
        return {nbr_weight_.data() + offsets_[static_cast<std::size_t>(i)],
                nbr_weight_.data() + offsets_[static_cast<std::size_t>(i) + 1]};
    }

    Eigen::SparseMatrix<double> adjacency_matrix() const {
        Eigen::SparseMatrix<double> a(n(), n());
        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(edges_.size() * 2);
        for (const Edge& e : edges_) {
            trips.emplace_back(e.u, e.v, e.w);
            trips.emplace_back(e.v, e.u, e.w);
        }
        a.setFromTriplets(trips.begin(), trips.end());
        return a;
    }

    // FNV-1a over the canonical edge list; echoed into output metadata so
    // runs on identical inputs are recognizable.
    std::uint64_t content_hash() const {
        std::uint64_t h = fnv1a(nullptr, 0);
        for (const Edge& e : edges_) {
            std::ostringstream line;
            line << labels_[static_cast<std::size_t>(e.u)] << '\t'
                 << labels_[static_cast<std::size_t>(e.v)] << '\t' << e.w << '\n';
            const std::string s = line.str();
            h = fnv1a(s.data(), s.size(), h);
        }
        return h;
    }

    friend Graph build_graph(const std::vector<EdgeInput>& edges,
                             const std::vector<std::string>& isolated_labels);

private:
    std::vector<std::string> labels_;
    std::unordered_map<std::string, int> label_to_index_;
    std::vector<Edge> edges_; // canonical u < v
    std::vector<std::size_t> offsets_;
    std::vector<int> nbr_index_;
    std::vector<double> nbr_weight_;
    std::vector<double> degrees_;
};

inline Graph build_graph(const std::vector<EdgeInput>& edges,
                         const std::vector<std::string>& isolated_labels = {}) {
    Graph g;
    auto intern = [&g](const std::string& label) -> int {
        if (label.empty()) throw Error(ErrorClass::InvalidInput, "empty node label");
        auto it = g.label_to_index_.find(label);
        if (it != g.label_to_index_.end()) return it->second;
        const int idx = static_cast<int>(g.labels_.size());
        g.labels_.push_back(label);
        g.label_to_index_.emplace(label, idx);
        return idx;
    };

    for (const std::string& label : isolated_labels) intern(label);

    std::unordered_map<std::uint64_t, double> seen; // key: (min<<32)|max
    for (const EdgeInput& e : edges) {
        const int u = intern(e.u);
        const int v = intern(e.v);
        if (u == v) throw Error(ErrorClass::InvalidInput, "self-loop on node '" + e.u + "'");
        const double w = e.w.value_or(1.0);
        if (!std::isfinite(w) || w <= 0.0)
            throw Error(ErrorClass::InvalidInput,
                        "edge " + e.u + " -- " + e.v + " has non-positive or non-finite weight");
        const int a = std::min(u, v), b = std::max(u, v);
        const std::uint64_t key =
            (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
        auto it = seen.find(key);
        if (it != seen.end()) {
            if (it->second != w)
                throw Error(ErrorClass::InvalidInput,
                            "duplicate edge " + e.u + " -- " + e.v + " with conflicting weights");
            continue; // equal-weight duplicate, dedup silently
        }
        seen.emplace(key, w);
        g.edges_.push_back({a, b, w});
    }

    const std::size_t n = g.labels_.size();
    std::vector<std::size_t> counts(n + 1, 0);
    for (const Edge& e : g.edges_) {
        counts[static_cast<std::size_t>(e.u) + 1]++;
        counts[static_cast<std::size_t>(e.v) + 1]++;
    }
    g.offsets_.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) g.offsets_[i + 1] = g.offsets_[i] + counts[i + 1];
    g.nbr_index_.resize(g.offsets_[n]);
    g.nbr_weight_.resize(g.offsets_[n]);
    std::vector<std::size_t> fill(g.offsets_.begin(), g.offsets_.end() - 1);
    for (const Edge& e : g.edges_) {
        g.nbr_index_[fill[static_cast<std::size_t>(e.u)]] = e.v;
        g.nbr_weight_[fill[static_cast<std::size_t>(e.u)]++] = e.w;
        g.nbr_index_[fill[static_cast<std::size_t>(e.v)]] = e.u;
        g.nbr_weight_[fill[static_cast<std::size_t>(e.v)]++] = e.w;
    }
    // Sort each neighbor list by index for deterministic iteration.
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = g.offsets_[i], hi = g.offsets_[i + 1];
        std::vector<std::pair<int, double>> row;
        row.reserve(hi - lo);
        for (std::size_t k = lo; k < hi; ++k) row.emplace_back(g.nbr_index_[k], g.nbr_weight_[k]);
        std::sort(row.begin(), row.end());
        for (std::size_t k = lo; k < hi; ++k) {
            g.nbr_index_[k] = row[k - lo].first;
            g.nbr_weight_[k] = row[k - lo].second;
        }
    }
    g.degrees_.assign(n, 0.0);
    for (const Edge& e : g.edges_) {
        g.degrees_[static_cast<std::size_t>(e.u)] += e.w;
        g.degrees_[static_cast<std::size_t>(e.v)] += e.w;
    }
    return g;
}

// Convenience for integer-indexed construction (generators, tests). Node
// index i is guaranteed to carry label std::to_string(i).
inline Graph build_graph_indexed(int n, const std::vector<std::tuple<int, int, double>>& edges) {
    std::vector<EdgeInput> in;
    in.reserve(edges.size());
    for (const auto& [u, v, w] : edges)
        in.push_back({std::to_string(u), std::to_string(v), w});
    std::vector<std::string> isolated;
    for (int i = 0; i < n; ++i) isolated.push_back(std::to_string(i));
    return build_graph(in, isolated);
}

struct Laplacian {
    Eigen::SparseMatrix<double> matrix; // L = D - A, symmetric
    int n = 0;
};

inline Laplacian laplacian(const Graph& g) {
    Laplacian lap;
    lap.n = g.n();
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(g.edge_count() * 2 + static_cast<std::size_t>(g.n()));
    for (const Edge& e : g.edges()) {
        trips.emplace_back(e.u, e.v, -e.w);
        trips.emplace_back(e.v, e.u, -e.w);
    }
    for (int i = 0; i < g.n(); ++i) trips.emplace_back(i, i, g.degree(i));
    lap.matrix.resize(g.n(), g.n());
    lap.matrix.setFromTriplets(trips.begin(), trips.end());
    return lap;
}

// All nodes within hop distance K of a, including a itself. Sorted.
inline std::vector<int> khop_neighborhood(const Graph& g, int a, int hops) {
    if (a < 0 || a >= g.n())
        throw Error(ErrorClass::InvalidInput, "node index out of range");
    if (hops < 0) throw Error(ErrorClass::InvalidInput, "hop count must be >= 0");
    std::vector<int> dist(static_cast<std::size_t>(g.n()), -1);
    std::queue<int> q;
    dist[static_cast<std::size_t>(a)] = 0;
    q.push(a);
    std::vector<int> out{a};
    while (!q.empty()) {
        const int u = q.front();
        q.pop();
        if (dist[static_cast<std::size_t>(u)] == hops) continue;
        for (int v : g.neighbors(u)) {
            if (dist[static_cast<std::size_t>(v)] < 0) {
                dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
                out.push_back(v);
                q.push(v);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Component id per node, ids contiguous from 0 in order of first node seen.
inline std::vector<int> connected_components(const Graph& g) {
    std::vector<int> comp(static_cast<std::size_t>(g.n()), -1);
    int next = 0;
    for (int s = 0; s < g.n(); ++s) {
        if (comp[static_cast<std::size_t>(s)] >= 0) continue;
        comp[static_cast<std::size_t>(s)] = next;
        std::queue<int> q;
        q.push(s);
        while (!q.empty()) {
            const int u = q.front();
            q.pop();
            for (int v : g.neighbors(u)) {
                if (comp[static_cast<std::size_t>(v)] < 0) {
                    comp[static_cast<std::size_t>(v)] = next;
                    q.push(v);
                }
            }
        }
        ++next;
    }
    return comp;
}

inline std::vector<int> component_sizes(const Graph& g) {
    const std::vector<int> comp = connected_components(g);
    int count = 0;
    for (int c : comp) count = std::max(count, c + 1);
    std::vector<int> sizes(static_cast<std::size_t>(count), 0);
    for (int c : comp) sizes[static_cast<std::size_t>(c)]++;
    return sizes;
}

inline bool is_connected(const Graph& g) {
    if (g.n() == 0) return true;
    return component_sizes(g).size() == 1;
}

inline void require_connected(const Graph& g) {
    if (is_connected(g)) return;
    const std::vector<int> sizes = component_sizes(g);
    std::ostringstream msg;
    msg << "graph is disconnected (" << sizes.size() << " components, sizes: ";
    for (std::size_t i = 0; i < sizes.size(); ++i)
        msg << (i ? ", " : "") << sizes[i];
    msg << ")";
    throw Error(ErrorClass::Disconnected, msg.str());
}

// Induced subgraph on the largest connected component (ties by lowest
// component id). Node labels are preserved.
inline Graph largest_component(const Graph& g) {
    const std::vector<int> comp = connected_components(g);
    const std::vector<int> sizes = component_sizes(g);
    int best = 0;
    for (std::size_t c = 1; c < sizes.size(); ++c)
        if (sizes[c] > sizes[static_cast<std::size_t>(best)]) best = static_cast<int>(c);
    std::vector<EdgeInput> edges;
    for (const Edge& e : g.edges())
        if (comp[static_cast<std::size_t>(e.u)] == best)
            edges.push_back({g.label(e.u), g.label(e.v), e.w});
    std::vector<std::string> isolated;
    for (int i = 0; i < g.n(); ++i)
        if (comp[static_cast<std::size_t>(i)] == best && g.neighbors(i).empty())
            isolated.push_back(g.label(i));
    return build_graph(edges, isolated);
}

// Edge-list text format: `src dst [weight]`, whitespace-separated, one edge
// per line; lines starting with `#` are comments.
inline Graph read_edge_list(std::istream& in) {
    std::vector<EdgeInput> edges;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ss(line);
        std::string u, v, wtok, extra;
        if (!(ss >> u)) continue; // blank line
        if (u[0] == '#') continue;
        if (!(ss >> v))
            throw Error(ErrorClass::ParseError,
                        "line " + std::to_string(lineno) + ": expected `src dst [weight]`");
        EdgeInput e{u, v, std::nullopt};
        if (ss >> wtok) {
            try {
                std::size_t pos = 0;
                const double w = std::stod(wtok, &pos);
                if (pos != wtok.size()) throw std::invalid_argument(wtok);
                e.w = w;
            } catch (const std::exception&) {
                throw Error(ErrorClass::ParseError,
                            "line " + std::to_string(lineno) + ": bad weight '" + wtok + "'");
            }
            if (ss >> extra)
                throw Error(ErrorClass::ParseError,
                            "line " + std::to_string(lineno) + ": trailing tokens");
        }
        edges.push_back(std::move(e));
    }
    return build_graph(edges);
}

inline void write_edge_list(std::ostream& out, const Graph& g) {
    for (const Edge& e : g.edges()) {
        out << g.label(e.u) << ' ' << g.label(e.v);
        if (e.w != 1.0) out << ' ' << e.w;
        out << '\n';
    }
}

} // namespace gravelet
