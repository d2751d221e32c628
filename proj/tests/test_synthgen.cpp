#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gravelet/synthgen.hpp"
#include "testlib/oracles.hpp"

using namespace gravelet;

namespace {

std::string edges_text(const Graph& g) {
    std::ostringstream out;
    write_edge_list(out, g);
    return out.str();
}

std::string roles_text(const RoleBenchmark& b) {
    std::ostringstream out;
    write_roles_csv(out, b);
    return out.str();
}

// orbit id -> set of roles its members carry
std::map<int, std::set<int>> roles_per_orbit(const RoleBenchmark& b,
                                             const std::vector<int>& orbit) {
    std::map<int, std::set<int>> out;
    for (int i = 0; i < b.graph.n(); ++i)
        out[orbit[static_cast<std::size_t>(i)]].insert(b.roles[static_cast<std::size_t>(i)]);
    return out;
}

std::map<int, std::set<int>> orbits_per_role(const RoleBenchmark& b,
                                             const std::vector<int>& orbit) {
    std::map<int, std::set<int>> out;
    for (int i = 0; i < b.graph.n(); ++i)
        out[b.roles[static_cast<std::size_t>(i)]].insert(orbit[static_cast<std::size_t>(i)]);
    return out;
}

} // namespace

TEST_CASE("barbell roles are exactly the automorphism orbits") {
    SECTION("default configuration has six role classes, all with two or more nodes") {
        const RoleBenchmark b = make_barbell();
        REQUIRE(b.graph.n() == 22);
        REQUIRE(b.num_roles() == 6);
        std::map<int, int> sizes;
        for (int r : b.roles) sizes[r]++;
        for (const auto& [r, c] : sizes) REQUIRE(c >= 2);
        const auto orbit = oracle::automorphism_orbits(b.graph);
        for (const auto& [o, roles] : roles_per_orbit(b, orbit)) REQUIRE(roles.size() == 1);
        for (const auto& [r, orbits] : orbits_per_role(b, orbit)) REQUIRE(orbits.size() == 1);
    }
    SECTION("clique 4 with chain 2 collapses to three classes") {
        const RoleBenchmark b = make_barbell(4, 2);
        REQUIRE(b.graph.n() == 10);
        REQUIRE(b.num_roles() == 3);
        const auto orbit = oracle::automorphism_orbits(b.graph);
        for (const auto& [o, roles] : roles_per_orbit(b, orbit)) REQUIRE(roles.size() == 1);
        for (const auto& [r, orbits] : orbits_per_role(b, orbit)) REQUIRE(orbits.size() == 1);
    }
    SECTION("degenerate parameters are rejected") {
        REQUIRE_THROWS_AS(make_barbell(2, 5), Error);
        REQUIRE_THROWS_AS(make_barbell(5, 0), Error);
    }
}

TEST_CASE("house benchmark role structure") {
    const RoleBenchmark b =
        make_cycle_with_shapes(30, {{ShapeKind::House, 10}}, Placement::Regular, 7);
    REQUIRE(b.graph.n() == 80);
    REQUIRE(b.num_roles() == 6);
    REQUIRE(is_connected(b.graph));

    std::map<std::string, int> members;
    for (int i = 0; i < b.graph.n(); ++i)
        members[b.role_names[static_cast<std::size_t>(b.roles[static_cast<std::size_t>(i)])]]++;
    REQUIRE(members["cycle"] == 20);
    REQUIRE(members["cycle_attach"] == 10);
    REQUIRE(members["house_anchor"] == 10);
    REQUIRE(members["house_roof"] == 20);
    REQUIRE(members["house_floor"] == 10);
    REQUIRE(members["house_apex"] == 10);
}

TEST_CASE("house benchmark roles align with orbits, roof being a pair of orbits") {
    // Small instance of the same recipe keeps the orbit oracle fast. The
    // attached house has no symmetry of its own, so the two roof positions
    // fall in different orbits even though they share a role; every other
    // role is exactly one orbit.
    const RoleBenchmark b =
        make_cycle_with_shapes(12, {{ShapeKind::House, 4}}, Placement::Regular, 7);
    REQUIRE(b.graph.n() == 32);
    const auto orbit = oracle::automorphism_orbits(b.graph);
    for (const auto& [o, roles] : roles_per_orbit(b, orbit)) REQUIRE(roles.size() == 1);

    const int roof_role = 3; // cycle, cycle_attach, house_anchor, house_roof, house_floor, ...
    REQUIRE(b.role_names[static_cast<std::size_t>(roof_role)] == "house_roof");
    for (const auto& [r, orbits] : orbits_per_role(b, orbit)) {
        if (r == roof_role)
            REQUIRE(orbits.size() == 2);
        else
            REQUIRE(orbits.size() == 1);
    }
}

TEST_CASE("star and chain attachments keep exact orbit roles") {
    // Hub- and center-anchored shapes stay symmetric after attachment, so
    // role classes and orbits coincide for a single-kind benchmark.
    for (ShapeKind kind : {ShapeKind::Star, ShapeKind::Chain}) {
        const RoleBenchmark b = make_cycle_with_shapes(12, {{kind, 4}}, Placement::Regular, 3);
        const auto orbit = oracle::automorphism_orbits(b.graph);
        for (const auto& [o, roles] : roles_per_orbit(b, orbit)) REQUIRE(roles.size() == 1);
        for (const auto& [r, orbits] : orbits_per_role(b, orbit)) REQUIRE(orbits.size() == 1);
    }
}

TEST_CASE("varied benchmark vocabulary and shape placement") {
    const RoleBenchmark b = make_cycle_with_shapes(
        40, {{ShapeKind::House, 8}, {ShapeKind::Fan, 8}, {ShapeKind::Star, 8}},
        Placement::Random, 99);
    REQUIRE(b.graph.n() == 40 + 8 * (5 + 5 + 6));
    REQUIRE(b.num_roles() == 11);
    REQUIRE(is_connected(b.graph));
    // attachment slots are distinct
    int attach = 0;
    for (int i = 0; i < 40; ++i)
        if (b.roles[static_cast<std::size_t>(i)] == 1) ++attach;
    REQUIRE(attach == 24);
    // every role id in range and every name used
    std::set<int> used;
    for (int r : b.roles) {
        REQUIRE(r >= 0);
        REQUIRE(r < b.num_roles());
        used.insert(r);
    }
    REQUIRE(used.size() == 11);
}

TEST_CASE("cycle benchmark edge cases") {
    SECTION("no shapes leaves a single role") {
        const RoleBenchmark b = make_cycle_with_shapes(9, {}, Placement::Regular, 0);
        REQUIRE(b.num_roles() == 1);
        REQUIRE(b.graph.n() == 9);
        for (int r : b.roles) REQUIRE(r == 0);
    }
    SECTION("oversubscribed slots are rejected") {
        REQUIRE_THROWS_WITH(
            make_cycle_with_shapes(4, {{ShapeKind::Star, 5}}, Placement::Regular, 0),
            Catch::Matchers::ContainsSubstring("slots"));
    }
    SECTION("invalid sizes are rejected") {
        REQUIRE_THROWS_AS(make_cycle_with_shapes(2, {}, Placement::Regular, 0), Error);
        REQUIRE_THROWS_AS(
            make_cycle_with_shapes(10, {{ShapeKind::House, -1}}, Placement::Regular, 0), Error);
    }
}

TEST_CASE("generation is deterministic in the seed") {
    const auto recipe = std::vector<std::pair<ShapeKind, int>>{
        {ShapeKind::House, 8}, {ShapeKind::Fan, 8}, {ShapeKind::Star, 8}};
    const RoleBenchmark a = make_cycle_with_shapes(40, recipe, Placement::Random, 1234);
    const RoleBenchmark b = make_cycle_with_shapes(40, recipe, Placement::Random, 1234);
    REQUIRE(edges_text(a.graph) == edges_text(b.graph));
    REQUIRE(roles_text(a) == roles_text(b));
    REQUIRE(a.recipe == b.recipe);

    const RoleBenchmark c = make_cycle_with_shapes(40, recipe, Placement::Random, 1235);
    REQUIRE(edges_text(a.graph) != edges_text(c.graph));
}

TEST_CASE("edge perturbation") {
    const RoleBenchmark base =
        make_cycle_with_shapes(30, {{ShapeKind::House, 10}}, Placement::Regular, 7);
    const std::size_t m = base.graph.edge_count();

    SECTION("fraction zero returns the identical graph") {
        const RoleBenchmark p = perturb_edges(base, 0.0, PerturbMode::Add, 5);
        REQUIRE(edges_text(p.graph) == edges_text(base.graph));
        REQUIRE(p.roles == base.roles);
    }
    SECTION("add inserts the floor of fraction times edge count") {
        const RoleBenchmark p = perturb_edges(base, 0.1, PerturbMode::Add, 5);
        REQUIRE(p.graph.edge_count() == m + m / 10);
        REQUIRE(is_connected(p.graph));
        REQUIRE(p.roles == base.roles);
        // originals all survive
        std::set<std::pair<int, int>> got;
        for (const Edge& e : p.graph.edges()) got.insert({e.u, e.v});
        for (const Edge& e : base.graph.edges()) REQUIRE(got.count({e.u, e.v}) == 1);
    }
    SECTION("rewire keeps the edge count but moves endpoints") {
        const RoleBenchmark p = perturb_edges(base, 0.1, PerturbMode::Rewire, 5);
        REQUIRE(p.graph.edge_count() == m);
        REQUIRE(is_connected(p.graph));
        REQUIRE(edges_text(p.graph) != edges_text(base.graph));
        REQUIRE(p.roles == base.roles);
    }
    SECTION("perturbation is deterministic in the seed") {
        const RoleBenchmark p = perturb_edges(base, 0.2, PerturbMode::Rewire, 11);
        const RoleBenchmark q = perturb_edges(base, 0.2, PerturbMode::Rewire, 11);
        REQUIRE(edges_text(p.graph) == edges_text(q.graph));
    }
    SECTION("impossible requests are rejected") {
        RoleBenchmark tri;
        tri.graph = build_graph_indexed(3, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}});
        tri.roles = {0, 0, 0};
        tri.role_names = {"all"};
        REQUIRE_THROWS_AS(perturb_edges(tri, 1.0, PerturbMode::Rewire, 1), Error);
        REQUIRE_THROWS_WITH(perturb_edges(tri, 5.0, PerturbMode::Add, 1),
                            Catch::Matchers::ContainsSubstring("too large"));
        REQUIRE_THROWS_AS(perturb_edges(base, -0.1, PerturbMode::Add, 1), Error);
    }
}

TEST_CASE("mirrored karate construction") {
    const RoleBenchmark b = make_mirrored_karate(7, 42);
    REQUIRE(b.graph.n() == 68);
    REQUIRE(b.graph.edge_count() == 2 * 78 + 7);
    REQUIRE(b.num_roles() == 34);
    REQUIRE(is_connected(b.graph));
    for (int i = 0; i < 68; ++i) {
        const int j = b.mirror_map[static_cast<std::size_t>(i)];
        REQUIRE(b.mirror_map[static_cast<std::size_t>(j)] == i);
        REQUIRE(std::abs(j - i) == 34);
        REQUIRE(b.roles[static_cast<std::size_t>(i)] == b.roles[static_cast<std::size_t>(j)]);
    }
    // second copy mirrors the first edge for edge
    std::set<std::pair<int, int>> got;
    for (const Edge& e : b.graph.edges()) got.insert({e.u, e.v});
    for (const auto& [u, v] : karate_edges()) {
        REQUIRE(got.count({u, v}) == 1);
        REQUIRE(got.count({u + 34, v + 34}) == 1);
    }
    REQUIRE_THROWS_AS(make_mirrored_karate(0, 1), Error);
    REQUIRE_THROWS_AS(make_mirrored_karate(35, 1), Error);
}

TEST_CASE("bundled karate fixture matches the embedded edge list") {
    std::ifstream in(std::string(GRAVELET_TEST_DATA_DIR) + "/karate.edges");
    REQUIRE(in.good());
    const Graph fixture = read_edge_list(in);
    REQUIRE(fixture.n() == 34);
    REQUIRE(fixture.edge_count() == 78);
    std::vector<std::pair<int, int>> got;
    for (const Edge& e : fixture.edges()) {
        const int a = std::stoi(fixture.label(e.u));
        const int b = std::stoi(fixture.label(e.v));
        got.emplace_back(std::min(a, b), std::max(a, b));
    }
    std::sort(got.begin(), got.end());
    std::vector<std::pair<int, int>> want = karate_edges();
    std::sort(want.begin(), want.end());
    REQUIRE(got == want);
}

TEST_CASE("crossgraph corpus shares one role vocabulary") {
    const auto corpus = make_crossgraph_corpus(20, 314);
    REQUIRE(corpus.size() == 20);
    std::set<std::uint64_t> hashes;
    for (const RoleBenchmark& b : corpus) {
        REQUIRE(b.role_names == crossgraph_role_names());
        REQUIRE(is_connected(b.graph));
        const auto recipe = nlohmann::json::parse(b.recipe);
        const int size = recipe["skeleton_size"].get<int>();
        REQUIRE(size >= 25);
        REQUIRE(size <= 60);
        const int nshapes = static_cast<int>(recipe["shapes"].size());
        REQUIRE(nshapes >= 2);
        REQUIRE(nshapes <= 10);
        for (int i = 0; i < b.graph.n(); ++i) {
            REQUIRE(b.roles[static_cast<std::size_t>(i)] >= 0);
            REQUIRE(b.roles[static_cast<std::size_t>(i)] < 9);
        }
        hashes.insert(b.graph.content_hash());
    }
    REQUIRE(hashes.size() > 1);

    const auto again = make_crossgraph_corpus(20, 314);
    for (std::size_t i = 0; i < corpus.size(); ++i)
        REQUIRE(again[i].graph.content_hash() == corpus[i].graph.content_hash());
}

TEST_CASE("scaling family hits requested sizes with linear edge growth") {
    const auto family = make_scaling_family({100, 200, 400}, 5);
    REQUIRE(family.size() == 3);
    std::vector<double> edges;
    for (std::size_t i = 0; i < family.size(); ++i) {
        REQUIRE(family[i].n() == 100 << i);
        REQUIRE(is_connected(family[i]));
        edges.push_back(static_cast<double>(family[i].edge_count()));
    }
    REQUIRE(edges[1] / edges[0] == Catch::Approx(2.0).margin(0.2));
    REQUIRE(edges[2] / edges[1] == Catch::Approx(2.0).margin(0.2));
    REQUIRE_THROWS_AS(make_scaling_family({200, 100}, 5), Error);
}

TEST_CASE("roles csv lists node, id and name") {
    const RoleBenchmark b = make_barbell(4, 2);
    std::istringstream in(roles_text(b));
    std::string line;
    std::getline(in, line);
    REQUIRE(line == "node,role_id,role_name");
    std::getline(in, line);
    REQUIRE(line == "0,0,clique_interior");
    int rows = 1;
    while (std::getline(in, line)) ++rows;
    REQUIRE(rows == b.graph.n());
}
