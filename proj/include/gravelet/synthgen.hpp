#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <ostream>
#include <string>
#include <tuple>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gravelet/common.hpp"
#include "gravelet/graph.hpp"
#include "gravelet/rng.hpp"

namespace gravelet {

enum class ShapeKind { House, Fan, Star, Chain };

inline const char* shape_kind_name(ShapeKind k) {
    switch (k) {
        case ShapeKind::House: return "house";
        case ShapeKind::Fan: return "fan";
        case ShapeKind::Star: return "star";
        case ShapeKind::Chain: return "chain";
    }
    return "?";
}

// Frozen topology of one detached shape. Local roles follow the shape's own
// automorphism orbits; the anchor is split into its own role when its orbit
// has more than one member (that splitting is what breaks the house floor /
// roof symmetry once attached).
struct ShapeSpec {
    ShapeKind kind;
    int size;
    std::vector<std::pair<int, int>> edges;
    int anchor;
    std::vector<int> local_role;          // node -> index into role_names
    std::vector<std::string> role_names;
};

inline const ShapeSpec& shape_spec(ShapeKind kind) {
    // House: square 0-1-2-3 with apex 4 over the 0-1 edge, anchored at floor
    // corner 2. Anchoring away from the apex keeps the roof pair as the only
    // role spanning two orbits; an apex-adjacent anchor splits both pairs.
    static const ShapeSpec house{
        ShapeKind::House, 5,
        {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 4}, {1, 4}},
        2,
        {1, 1, 0, 2, 3},
        {"house_anchor", "house_roof", "house_floor", "house_apex"}};
    // Fan: apex 0 joined to every node of the path 1-2-3-4, anchored at the apex.
    static const ShapeSpec fan{
        ShapeKind::Fan, 5,
        {{1, 2}, {2, 3}, {3, 4}, {0, 1}, {0, 2}, {0, 3}, {0, 4}},
        0,
        {0, 1, 2, 2, 1},
        {"fan_apex", "fan_end", "fan_mid"}};
    // Star: hub 0 with five leaves, anchored at the hub.
    static const ShapeSpec star{
        ShapeKind::Star, 6,
        {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}},
        0,
        {0, 1, 1, 1, 1, 1},
        {"star_hub", "star_leaf"}};
    // Chain: path of five, anchored at the middle.
    static const ShapeSpec chain{
        ShapeKind::Chain, 5,
        {{0, 1}, {1, 2}, {2, 3}, {3, 4}},
        2,
        {0, 1, 2, 1, 0},
        {"chain_end", "chain_mid", "chain_center"}};
    switch (kind) {
        case ShapeKind::House: return house;
        case ShapeKind::Fan: return fan;
        case ShapeKind::Star: return star;
        case ShapeKind::Chain: return chain;
    }
    return house;
}

struct RoleBenchmark {
    Graph graph;
    std::vector<int> roles;               // per node index
    std::vector<std::string> role_names;  // role id -> name
    std::uint64_t seed = 0;
    std::string recipe;                   // JSON generation record
    std::vector<int> mirror_map;          // node -> partner; empty unless mirrored

    int num_roles() const { return static_cast<int>(role_names.size()); }
};

namespace detail {

inline std::uint64_t edge_key(int u, int v) {
    const auto [a, b] = std::minmax(u, v);
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
}

} // namespace detail

// Two cliques joined by a path; one gateway node per clique carries the
// chain. Roles are the graph's automorphism orbits: interiors, gateways, and
// mirror-paired chain positions. Defaults give six role classes with every
// class holding at least two nodes (an even chain has no unpaired center);
// a longer chain buries interior orbits below the default heat horizon.
inline RoleBenchmark make_barbell(int clique_size = 7, int chain_length = 8) {
    if (clique_size < 3)
        throw Error(ErrorClass::InvalidInput, "clique size must be >= 3");
    if (chain_length < 1)
        throw Error(ErrorClass::InvalidInput, "chain length must be >= 1");
    const int c = clique_size, l = chain_length;
    const int n = 2 * c + l;
    std::vector<std::tuple<int, int, double>> edges;
    for (int i = 0; i < c; ++i)
        for (int j = i + 1; j < c; ++j) edges.emplace_back(i, j, 1.0);
    const int gate_a = c - 1;
    const int gate_b = c + l;
    for (int i = 0; i < c; ++i)
        for (int j = i + 1; j < c; ++j) edges.emplace_back(gate_b + i, gate_b + j, 1.0);
    // chain nodes are c .. c+l-1
    edges.emplace_back(gate_a, c, 1.0);
    for (int p = 0; p + 1 < l; ++p) edges.emplace_back(c + p, c + p + 1, 1.0);
    edges.emplace_back(c + l - 1, gate_b, 1.0);

    RoleBenchmark b;
    b.graph = build_graph_indexed(n, edges);
    b.roles.assign(static_cast<std::size_t>(n), 0);
    b.role_names = {"clique_interior", "clique_gateway"};
    const int pairs = (l + 1) / 2;
    for (int p = 1; p <= pairs; ++p) b.role_names.push_back("chain_" + std::to_string(p));
    for (int i = 0; i < c; ++i) b.roles[static_cast<std::size_t>(i)] = i == gate_a ? 1 : 0;
    for (int i = 0; i < c; ++i) b.roles[static_cast<std::size_t>(gate_b + i)] = i == 0 ? 1 : 0;
    for (int p = 1; p <= l; ++p)
        b.roles[static_cast<std::size_t>(c + p - 1)] = 2 + std::min(p, l + 1 - p) - 1;
    nlohmann::ordered_json recipe;
    recipe["name"] = "barbell";
    recipe["clique_size"] = c;
    recipe["chain_length"] = l;
    b.recipe = recipe.dump();
    return b;
}

enum class Placement { Regular, Random };

// Cycle skeleton with shape instances hung off distinct cycle slots, one
// attachment edge each. Role vocabulary: plain cycle, attachment point, then
// each present shape kind's internal roles.
inline RoleBenchmark make_cycle_with_shapes(int cycle_len,
                                            const std::vector<std::pair<ShapeKind, int>>& shapes,
                                            Placement placement, std::uint64_t seed) {
    if (cycle_len < 3)
        throw Error(ErrorClass::InvalidInput, "cycle length must be >= 3");
    std::vector<ShapeKind> flat;
    for (const auto& [kind, count] : shapes) {
        if (count < 0) throw Error(ErrorClass::InvalidInput, "shape count must be >= 0");
        for (int i = 0; i < count; ++i) flat.push_back(kind);
    }
    const int total = static_cast<int>(flat.size());
    if (total > cycle_len)
        throw Error(ErrorClass::InvalidInput, "more shapes than distinct cycle slots");

    RoleBenchmark b;
    b.seed = seed;
    b.role_names = {"cycle"};
    if (total > 0) b.role_names.push_back("cycle_attach");
    // Stable vocabulary order regardless of the order shapes were requested.
    std::vector<int> kind_role_offset(4, -1);
    for (ShapeKind kind : {ShapeKind::House, ShapeKind::Fan, ShapeKind::Star, ShapeKind::Chain}) {
        if (std::find(flat.begin(), flat.end(), kind) == flat.end()) continue;
        kind_role_offset[static_cast<int>(kind)] = static_cast<int>(b.role_names.size());
        const ShapeSpec& spec = shape_spec(kind);
        b.role_names.insert(b.role_names.end(), spec.role_names.begin(), spec.role_names.end());
    }

    std::vector<int> slots;
    if (placement == Placement::Regular) {
        for (int k = 0; k < total; ++k)
            slots.push_back(static_cast<int>(static_cast<long long>(cycle_len) * k / total));
    } else {
        Rng rng(seed);
        for (std::uint64_t s : rng.sample_distinct(static_cast<std::uint64_t>(cycle_len),
                                                   static_cast<std::uint64_t>(total)))
            slots.push_back(static_cast<int>(s));
    }

    std::vector<std::tuple<int, int, double>> edges;
    for (int i = 0; i < cycle_len; ++i) edges.emplace_back(i, (i + 1) % cycle_len, 1.0);
    int next = cycle_len;
    b.roles.assign(static_cast<std::size_t>(cycle_len), 0);
    for (int k = 0; k < total; ++k) {
        const ShapeSpec& spec = shape_spec(flat[static_cast<std::size_t>(k)]);
        const int base = next;
        next += spec.size;
        for (const auto& [u, v] : spec.edges) edges.emplace_back(base + u, base + v, 1.0);
        edges.emplace_back(base + spec.anchor, slots[static_cast<std::size_t>(k)], 1.0);
        b.roles[static_cast<std::size_t>(slots[static_cast<std::size_t>(k)])] = 1;
        const int off = kind_role_offset[static_cast<int>(spec.kind)];
        for (int i = 0; i < spec.size; ++i)
            b.roles.push_back(off + spec.local_role[static_cast<std::size_t>(i)]);
    }
    b.graph = build_graph_indexed(next, edges);

    nlohmann::ordered_json recipe;
    recipe["name"] = "cycle_with_shapes";
    recipe["cycle_len"] = cycle_len;
    nlohmann::ordered_json shape_list = nlohmann::ordered_json::array();
    for (const auto& [kind, count] : shapes)
        shape_list.push_back({{"kind", shape_kind_name(kind)}, {"count", count}});
    recipe["shapes"] = shape_list;
    recipe["placement"] = placement == Placement::Regular ? "regular" : "random";
    recipe["seed"] = seed;
    b.recipe = recipe.dump();
    return b;
}

enum class PerturbMode { Add, Rewire };

// Structural noise. Roles carry over untouched: perturbed graphs are scored
// against the clean labels. A perturbation that disconnects the graph (or
// cannot stay simple) is retried with follow-up seeds before giving up.
inline RoleBenchmark perturb_edges(const RoleBenchmark& src, double fraction, PerturbMode mode,
                                   std::uint64_t seed, int max_retries = 50) {
    if (fraction < 0.0)
        throw Error(ErrorClass::InvalidInput, "perturbation fraction must be >= 0");
    const int n = src.graph.n();
    const auto& orig_edges = src.graph.edges();
    const int count = static_cast<int>(fraction * static_cast<double>(orig_edges.size()));

    const long long max_edges = static_cast<long long>(n) * (n - 1) / 2;
    if (mode == PerturbMode::Add &&
        static_cast<long long>(orig_edges.size()) + count > max_edges)
        throw Error(ErrorClass::InvalidInput, "perturbation fraction too large to keep the graph simple");

    for (int retry = 0; retry <= max_retries; ++retry) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(retry)));
        std::unordered_set<std::uint64_t> present;
        std::vector<std::tuple<int, int, double>> edges;
        for (const Edge& e : orig_edges) {
            present.insert(detail::edge_key(e.u, e.v));
            edges.emplace_back(e.u, e.v, e.w);
        }
        bool ok = true;
        if (mode == PerturbMode::Add) {
            int added = 0;
            long long attempts = 0;
            const long long cap = 200LL * count + 2000;
            while (added < count && attempts < cap) {
                ++attempts;
                const int u = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
                const int v = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
                if (u == v || present.count(detail::edge_key(u, v))) continue;
                present.insert(detail::edge_key(u, v));
                edges.emplace_back(std::min(u, v), std::max(u, v), 1.0);
                ++added;
            }
            ok = added == count;
        } else {
            const std::vector<std::uint64_t> picks =
                rng.sample_distinct(edges.size(), static_cast<std::uint64_t>(count));
            for (std::uint64_t idx : picks) {
                auto& [u, v, w] = edges[static_cast<std::size_t>(idx)];
                const bool keep_u = rng.next_bool();
                const int kept = keep_u ? u : v;
                const int dropped = keep_u ? v : u;
                present.erase(detail::edge_key(u, v));
                bool placed = false;
                for (int attempt = 0; attempt < 100; ++attempt) {
                    const int cand = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
                    if (cand == kept || cand == dropped ||
                        present.count(detail::edge_key(kept, cand)))
                        continue;
                    u = std::min(kept, cand);
                    v = std::max(kept, cand);
                    present.insert(detail::edge_key(u, v));
                    placed = true;
                    break;
                }
                if (!placed) {
                    ok = false;
                    break;
                }
            }
        }
        if (!ok) continue;
        Graph g = build_graph_indexed(n, edges);
        if (!is_connected(g)) continue;

        RoleBenchmark out;
        out.graph = std::move(g);
        out.roles = src.roles;
        out.role_names = src.role_names;
        out.seed = seed;
        out.mirror_map = src.mirror_map;
        nlohmann::ordered_json recipe =
            src.recipe.empty() ? nlohmann::ordered_json{} : nlohmann::ordered_json::parse(src.recipe);
        recipe["perturb"] = {{"fraction", fraction},
                             {"mode", mode == PerturbMode::Add ? "add" : "rewire"},
                             {"seed", seed},
                             {"retries_used", retry}};
        out.recipe = recipe.dump();
        return out;
    }
    throw Error(ErrorClass::InvalidInput,
                "perturbation kept disconnecting or breaking simplicity; retries exhausted");
}

struct CrossgraphParams {
    int min_size = 25; // skeleton nodes
    int max_size = 60;
    int min_shapes = 2;
    int max_shapes = 10;
    int extra_edges = 10; // random chords within the skeleton
};

// Shared vocabulary for the cross-graph corpus so labels line up between
// graphs regardless of which kinds a particular graph drew.
inline std::vector<std::string> crossgraph_role_names() {
    return {"skeleton",     "skeleton_attach", "house_anchor", "house_roof", "house_floor",
            "house_apex",   "chain_end",       "chain_mid",    "chain_center"};
}

// One graph of the cross-graph corpus: cycle-or-path skeleton, house-or-chain
// shapes at random distinct slots, plus random skeleton chords.
inline RoleBenchmark make_crossgraph_graph(std::uint64_t seed,
                                           const CrossgraphParams& params = {}) {
    Rng rng(seed);
    const bool cycle = rng.next_bool();
    const int size = params.min_size +
                     static_cast<int>(rng.next_below(
                         static_cast<std::uint64_t>(params.max_size - params.min_size + 1)));
    const int nshapes = params.min_shapes +
                        static_cast<int>(rng.next_below(
                            static_cast<std::uint64_t>(params.max_shapes - params.min_shapes + 1)));
    if (nshapes > size)
        throw Error(ErrorClass::InvalidInput, "crossgraph ranges oversubscribe the skeleton");
    std::vector<ShapeKind> kinds;
    for (int i = 0; i < nshapes; ++i)
        kinds.push_back(rng.next_bool() ? ShapeKind::House : ShapeKind::Chain);
    std::vector<int> slots;
    for (std::uint64_t s : rng.sample_distinct(static_cast<std::uint64_t>(size),
                                               static_cast<std::uint64_t>(nshapes)))
        slots.push_back(static_cast<int>(s));

    RoleBenchmark b;
    b.seed = seed;
    b.role_names = crossgraph_role_names();
    std::vector<std::tuple<int, int, double>> edges;
    for (int i = 0; i + 1 < size; ++i) edges.emplace_back(i, i + 1, 1.0);
    if (cycle) edges.emplace_back(size - 1, 0, 1.0);
    std::unordered_set<std::uint64_t> present;
    for (const auto& [u, v, w] : edges) present.insert(detail::edge_key(u, v));

    b.roles.assign(static_cast<std::size_t>(size), 0);
    int next = size;
    for (int k = 0; k < nshapes; ++k) {
        const ShapeSpec& spec = shape_spec(kinds[static_cast<std::size_t>(k)]);
        const int base = next;
        next += spec.size;
        for (const auto& [u, v] : spec.edges) edges.emplace_back(base + u, base + v, 1.0);
        edges.emplace_back(base + spec.anchor, slots[static_cast<std::size_t>(k)], 1.0);
        b.roles[static_cast<std::size_t>(slots[static_cast<std::size_t>(k)])] = 1;
        const int off = spec.kind == ShapeKind::House ? 2 : 6;
        for (int i = 0; i < spec.size; ++i)
            b.roles.push_back(off + spec.local_role[static_cast<std::size_t>(i)]);
    }
    int added = 0;
    long long attempts = 0;
    while (added < params.extra_edges && attempts < 10000) {
        ++attempts;
        const int u = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(size)));
        const int v = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(size)));
        if (u == v || present.count(detail::edge_key(u, v))) continue;
        present.insert(detail::edge_key(u, v));
        edges.emplace_back(std::min(u, v), std::max(u, v), 1.0);
        ++added;
    }
    b.graph = build_graph_indexed(next, edges);

    nlohmann::ordered_json recipe;
    recipe["name"] = "crossgraph";
    recipe["skeleton"] = cycle ? "cycle" : "path";
    recipe["skeleton_size"] = size;
    nlohmann::ordered_json kind_list = nlohmann::ordered_json::array();
    for (ShapeKind k : kinds) kind_list.push_back(shape_kind_name(k));
    recipe["shapes"] = kind_list;
    recipe["extra_edges"] = added;
    recipe["seed"] = seed;
    b.recipe = recipe.dump();
    return b;
}

inline std::vector<RoleBenchmark> make_crossgraph_corpus(int count, std::uint64_t seed,
                                                         const CrossgraphParams& params = {}) {
    if (count < 1) throw Error(ErrorClass::InvalidInput, "corpus needs at least one graph");
    std::vector<RoleBenchmark> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        out.push_back(make_crossgraph_graph(derive_seed(seed, static_cast<std::uint64_t>(i)), params));
    return out;
}

// Zachary's karate club, 34 nodes, 78 edges, zero-indexed. Also bundled as
// data/karate.edges for external use; the two must stay in sync.
inline const std::vector<std::pair<int, int>>& karate_edges() {
    static const std::vector<std::pair<int, int>> edges{
        {0, 1},   {0, 2},   {0, 3},   {0, 4},   {0, 5},   {0, 6},   {0, 7},   {0, 8},
        {0, 10},  {0, 11},  {0, 12},  {0, 13},  {0, 17},  {0, 19},  {0, 21},  {0, 31},
        {1, 2},   {1, 3},   {1, 7},   {1, 13},  {1, 17},  {1, 19},  {1, 21},  {1, 30},
        {2, 3},   {2, 7},   {2, 8},   {2, 9},   {2, 13},  {2, 27},  {2, 28},  {2, 32},
        {3, 7},   {3, 12},  {3, 13},  {4, 6},   {4, 10},  {5, 6},   {5, 10},  {5, 16},
        {6, 16},  {8, 30},  {8, 32},  {8, 33},  {9, 33},  {13, 33}, {14, 32}, {14, 33},
        {15, 32}, {15, 33}, {18, 32}, {18, 33}, {19, 33}, {20, 32}, {20, 33}, {22, 32},
        {22, 33}, {23, 25}, {23, 27}, {23, 29}, {23, 32}, {23, 33}, {24, 25}, {24, 27},
        {24, 31}, {25, 31}, {26, 29}, {26, 33}, {27, 33}, {28, 31}, {28, 33}, {29, 32},
        {29, 33}, {30, 32}, {30, 33}, {31, 32}, {31, 33}, {32, 33}};
    return edges;
}

// Two karate copies bridged by mirror edges (i, i+34) at seeded distinct
// sites. Ground truth pairs each node with its double.
inline RoleBenchmark make_mirrored_karate(int num_mirror_edges, std::uint64_t seed) {
    if (num_mirror_edges < 1 || num_mirror_edges > 34)
        throw Error(ErrorClass::InvalidInput, "mirror edge count must be in [1, 34]");
    std::vector<std::tuple<int, int, double>> edges;
    for (const auto& [u, v] : karate_edges()) {
        edges.emplace_back(u, v, 1.0);
        edges.emplace_back(u + 34, v + 34, 1.0);
    }
    Rng rng(seed);
    std::vector<int> sites;
    for (std::uint64_t s : rng.sample_distinct(34, static_cast<std::uint64_t>(num_mirror_edges)))
        sites.push_back(static_cast<int>(s));
    std::sort(sites.begin(), sites.end());
    for (int i : sites) edges.emplace_back(i, i + 34, 1.0);

    RoleBenchmark b;
    b.seed = seed;
    b.graph = build_graph_indexed(68, edges);
    b.roles.resize(68);
    b.mirror_map.resize(68);
    for (int i = 0; i < 34; ++i) {
        b.roles[static_cast<std::size_t>(i)] = i;
        b.roles[static_cast<std::size_t>(i + 34)] = i;
        b.mirror_map[static_cast<std::size_t>(i)] = i + 34;
        b.mirror_map[static_cast<std::size_t>(i + 34)] = i;
        b.role_names.push_back("node_" + std::to_string(i));
    }
    nlohmann::ordered_json recipe;
    recipe["name"] = "mirrored_karate";
    recipe["mirror_edges"] = num_mirror_edges;
    nlohmann::ordered_json site_list = nlohmann::ordered_json::array();
    for (int i : sites) site_list.push_back(i);
    recipe["sites"] = site_list;
    recipe["seed"] = seed;
    b.recipe = recipe.dump();
    return b;
}

// Timing benchmark family: cycle skeleton with one 5-node motif per ten
// nodes, placed at seeded distinct slots, plus a few random chords. Node
// count comes out exactly as requested; |E| grows linearly.
inline std::vector<Graph> make_scaling_family(const std::vector<int>& sizes, std::uint64_t seed) {
    for (std::size_t i = 1; i < sizes.size(); ++i)
        if (sizes[i] < sizes[i - 1])
            throw Error(ErrorClass::InvalidInput, "sizes must be ascending");
    std::vector<Graph> out;
    for (std::size_t idx = 0; idx < sizes.size(); ++idx) {
        const int n = sizes[idx];
        if (n < 20) throw Error(ErrorClass::InvalidInput, "scaling sizes must be >= 20");
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(idx)));
        const int motifs = n / 10;
        const int skeleton = n - 5 * motifs;
        std::vector<std::tuple<int, int, double>> edges;
        for (int i = 0; i < skeleton; ++i) edges.emplace_back(i, (i + 1) % skeleton, 1.0);
        std::unordered_set<std::uint64_t> present;
        for (const auto& [u, v, w] : edges) present.insert(detail::edge_key(u, v));
        std::vector<int> slots;
        for (std::uint64_t s : rng.sample_distinct(static_cast<std::uint64_t>(skeleton),
                                                   static_cast<std::uint64_t>(motifs)))
            slots.push_back(static_cast<int>(s));
        int next = skeleton;
        for (int m = 0; m < motifs; ++m) {
            const ShapeSpec& spec =
                shape_spec(rng.next_bool() ? ShapeKind::House : ShapeKind::Chain);
            const int base = next;
            next += spec.size;
            for (const auto& [u, v] : spec.edges) edges.emplace_back(base + u, base + v, 1.0);
            edges.emplace_back(base + spec.anchor, slots[static_cast<std::size_t>(m)], 1.0);
        }
        int added = 0;
        long long attempts = 0;
        while (added < 10 && attempts < 10000) {
            ++attempts;
            const int u = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(skeleton)));
            const int v = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(skeleton)));
            if (u == v || present.count(detail::edge_key(u, v))) continue;
            present.insert(detail::edge_key(u, v));
            edges.emplace_back(std::min(u, v), std::max(u, v), 1.0);
            ++added;
        }
        out.push_back(build_graph_indexed(next, edges));
    }
    return out;
}

inline void write_roles_csv(std::ostream& out, const RoleBenchmark& b) {
    out << "node,role_id,role_name\n";
    for (int i = 0; i < b.graph.n(); ++i) {
        const int r = b.roles[static_cast<std::size_t>(i)];
        out << b.graph.label(i) << ',' << r << ','
            << b.role_names[static_cast<std::size_t>(r)] << '\n';
    }
}

inline void write_recipe_json(std::ostream& out, const RoleBenchmark& b) {
    out << b.recipe << '\n';
}

} // namespace gravelet
