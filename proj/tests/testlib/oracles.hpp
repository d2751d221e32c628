#pragma once

// Independent reference implementations used only by the test suite. These
// deliberately avoid the library's own code paths: closed-form spectra,
// Bessel-series Chebyshev coefficients, a brute-force automorphism search.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <numeric>
#include <utility>
#include <vector>

#include "gravelet/graph.hpp"
#include "gravelet/rng.hpp"

namespace oracle {

inline gravelet::Graph make_path(int n) {
    std::vector<std::tuple<int, int, double>> edges;
    for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1, 1.0);
    return gravelet::build_graph_indexed(n, edges);
}

inline gravelet::Graph make_cycle(int n) {
    std::vector<std::tuple<int, int, double>> edges;
    for (int i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n, 1.0);
    return gravelet::build_graph_indexed(n, edges);
}

inline gravelet::Graph make_star(int leaves) {
    std::vector<std::tuple<int, int, double>> edges;
    for (int i = 1; i <= leaves; ++i) edges.emplace_back(0, i, 1.0);
    return gravelet::build_graph_indexed(leaves + 1, edges);
}

inline gravelet::Graph make_complete(int n) {
    std::vector<std::tuple<int, int, double>> edges;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) edges.emplace_back(i, j, 1.0);
    return gravelet::build_graph_indexed(n, edges);
}

// Laplacian spectra with known closed forms, returned ascending.
inline std::vector<double> cycle_eigenvalues(int n) {
    std::vector<double> ev;
    for (int k = 0; k < n; ++k)
        ev.push_back(2.0 - 2.0 * std::cos(2.0 * std::numbers::pi * k / n));
    std::sort(ev.begin(), ev.end());
    return ev;
}

inline std::vector<double> path_eigenvalues(int n) {
    std::vector<double> ev;
    for (int k = 0; k < n; ++k)
        ev.push_back(2.0 - 2.0 * std::cos(std::numbers::pi * k / n));
    std::sort(ev.begin(), ev.end());
    return ev;
}

// Random spanning tree plus `extra` random non-duplicate edges; always
// connected by construction.
inline gravelet::Graph random_connected_graph(int n, int extra, std::uint64_t seed,
                                              bool weighted = false) {
    gravelet::Rng rng(seed);
    std::vector<std::tuple<int, int, double>> edges;
    auto weight = [&]() { return weighted ? 0.25 + 1.75 * rng.next_double() : 1.0; };
    std::vector<std::pair<int, int>> present;
    for (int i = 1; i < n; ++i) {
        const int j = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(i)));
        edges.emplace_back(j, i, weight());
        present.emplace_back(j, i);
    }
    int attempts = 0;
    while (extra > 0 && attempts < 1000) {
        ++attempts;
        const int u = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
        const int v = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
        if (u == v) continue;
        const auto key = std::minmax(u, v);
        if (std::find(present.begin(), present.end(),
                      std::make_pair(key.first, key.second)) != present.end())
            continue;
        present.emplace_back(key.first, key.second);
        edges.emplace_back(key.first, key.second, weight());
        --extra;
    }
    return gravelet::build_graph_indexed(n, edges);
}

// Chebyshev coefficients of exp(-s x) on [0, b] from the modified Bessel
// series exp(z y) = I_0(z) + 2 sum_k I_k(z) T_k(y).
inline std::vector<double> bessel_chebyshev_coefficients(int order, double s, double b) {
    const double z = s * b / 2.0;
    std::vector<double> c(static_cast<std::size_t>(order) + 1);
    for (int k = 0; k <= order; ++k) {
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        c[static_cast<std::size_t>(k)] = 2.0 * std::exp(-z) * sign * std::cyl_bessel_i(k, z);
    }
    return c;
}

// Direct trigonometric evaluation of c_0/2 + sum c_k T_k(2x/b - 1).
inline double chebyshev_series_trig(const std::vector<double>& c, double x, double b) {
    const double y = std::clamp(2.0 * x / b - 1.0, -1.0, 1.0);
    const double theta = std::acos(y);
    double acc = 0.5 * c[0];
    for (std::size_t k = 1; k < c.size(); ++k) acc += c[k] * std::cos(k * theta);
    return acc;
}

inline int diameter(const gravelet::Graph& g) {
    int best = 0;
    for (int s = 0; s < g.n(); ++s) {
        std::vector<int> dist(static_cast<std::size_t>(g.n()), -1);
        std::vector<int> queue{s};
        dist[static_cast<std::size_t>(s)] = 0;
        for (std::size_t h = 0; h < queue.size(); ++h) {
            const int u = queue[h];
            for (int v : g.neighbors(u))
                if (dist[static_cast<std::size_t>(v)] < 0) {
                    dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
                    queue.push_back(v);
                }
        }
        for (int d : dist) best = std::max(best, d);
    }
    return best;
}

namespace detail {

// Backtracking search for an automorphism sending u -> v. Unweighted view:
// adjacency only. Degree sequence and matched-neighborhood consistency prune
// the search; fine for the test graphs (n <= ~100, mostly rigid).
class AutomorphismSearch {
public:
    explicit AutomorphismSearch(const gravelet::Graph& g) : g_(g), n_(g.n()) {
        adj_.assign(static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_), 0);
        for (const gravelet::Edge& e : g.edges()) {
            adj_[static_cast<std::size_t>(e.u) * static_cast<std::size_t>(n_) +
                 static_cast<std::size_t>(e.v)] = 1;
            adj_[static_cast<std::size_t>(e.v) * static_cast<std::size_t>(n_) +
                 static_cast<std::size_t>(e.u)] = 1;
        }
    }

    bool exists_mapping(int u, int v) {
        if (g_.neighbors(u).size() != g_.neighbors(v).size()) return false;
        map_.assign(static_cast<std::size_t>(n_), -1);
        used_.assign(static_cast<std::size_t>(n_), 0);
        map_[static_cast<std::size_t>(u)] = v;
        used_[static_cast<std::size_t>(v)] = 1;
        order_.clear();
        order_.push_back(u);
        // BFS order from u keeps each new node adjacent to a matched one.
        std::vector<char> seen(static_cast<std::size_t>(n_), 0);
        seen[static_cast<std::size_t>(u)] = 1;
        for (std::size_t h = 0; h < order_.size(); ++h)
            for (int w : g_.neighbors(order_[h]))
                if (!seen[static_cast<std::size_t>(w)]) {
                    seen[static_cast<std::size_t>(w)] = 1;
                    order_.push_back(w);
                }
        for (int w = 0; w < n_; ++w)
            if (!seen[static_cast<std::size_t>(w)]) order_.push_back(w);
        return extend(1);
    }

private:
    bool adjacent(int a, int b) const {
        return adj_[static_cast<std::size_t>(a) * static_cast<std::size_t>(n_) +
                    static_cast<std::size_t>(b)] != 0;
    }

    bool extend(std::size_t depth) {
        if (depth == order_.size()) return true;
        const int w = order_[depth];
        for (int cand = 0; cand < n_; ++cand) {
            if (used_[static_cast<std::size_t>(cand)]) continue;
            if (g_.neighbors(w).size() != g_.neighbors(cand).size()) continue;
            bool ok = true;
            for (std::size_t d = 0; d < depth && ok; ++d) {
                const int prev = order_[d];
                if (adjacent(w, prev) != adjacent(cand, map_[static_cast<std::size_t>(prev)]))
                    ok = false;
            }
            if (!ok) continue;
            map_[static_cast<std::size_t>(w)] = cand;
            used_[static_cast<std::size_t>(cand)] = 1;
            if (extend(depth + 1)) return true;
            map_[static_cast<std::size_t>(w)] = -1;
            used_[static_cast<std::size_t>(cand)] = 0;
        }
        return false;
    }

    const gravelet::Graph& g_;
    int n_;
    std::vector<char> adj_;
    std::vector<int> map_;
    std::vector<char> used_;
    std::vector<int> order_;
};

} // namespace detail

// Exact automorphism orbit partition (adjacency only, weights ignored).
// Returns orbit id per node, ids in order of each orbit's smallest node.
inline std::vector<int> automorphism_orbits(const gravelet::Graph& g) {
    const int n = g.n();
    std::vector<int> parent(static_cast<std::size_t>(n));
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    };
    detail::AutomorphismSearch search(g);
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) {
            if (find(u) == find(v)) continue;
            if (search.exists_mapping(u, v))
                parent[static_cast<std::size_t>(find(v))] = find(u);
        }
    std::vector<int> orbit(static_cast<std::size_t>(n), -1);
    int next = 0;
    for (int u = 0; u < n; ++u) {
        const int r = find(u);
        if (orbit[static_cast<std::size_t>(r)] < 0) orbit[static_cast<std::size_t>(r)] = next++;
        orbit[static_cast<std::size_t>(u)] = orbit[static_cast<std::size_t>(r)];
    }
    return orbit;
}

} // namespace oracle
