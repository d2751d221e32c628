#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gravelet/embedding.hpp"
#include "gravelet/graph.hpp"
#include "gravelet/roles_eval.hpp"
#include "gravelet/synthgen.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace gravelet;

namespace {

int exit_code(ErrorClass c) {
    switch (c) {
        case ErrorClass::EigensolverFailure: return 3;
        case ErrorClass::ProtocolRefused: return 4;
        default: return 2; // input and format problems
    }
}

// Everything a run needs to be reproduced; echoed into every output file.
struct RunConfig {
    std::string subcommand;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    int d = 50;
    double t_max = 100.0;
    double eta = 0.85;
    double gamma = 0.95;
    int num_scales = 2;
    int order = 30;
    std::string mode = "auto";
    std::uint64_t seed = 0;
    int trials = 25;
    int threads = 0;
    ordered_json params = ordered_json::object(); // subcommand-specific extras

    ordered_json to_json() const {
        ordered_json j;
        j["subcommand"] = subcommand;
        j["inputs"] = inputs;
        j["outputs"] = outputs;
        j["d"] = d;
        j["t_max"] = t_max;
        j["eta"] = eta;
        j["gamma"] = gamma;
        j["num_scales"] = num_scales;
        j["order"] = order;
        j["mode"] = mode;
        j["seed"] = seed;
        j["trials"] = trials;
        j["threads"] = threads;
        if (!params.empty()) j["params"] = params;
        return j;
    }

    EmbeddingConfig embedding() const {
        EmbeddingConfig cfg;
        cfg.d = d;
        cfg.t_max = t_max;
        cfg.scales.eta = eta;
        cfg.scales.gamma = gamma;
        cfg.scales.count = num_scales;
        cfg.wavelet.order = order;
        if (mode == "dense")
            cfg.wavelet.mode = WaveletMode::Dense;
        else if (mode == "chebyshev")
            cfg.wavelet.mode = WaveletMode::Chebyshev;
        else
            cfg.wavelet.mode = WaveletMode::Auto;
        cfg.threads = threads;
        return cfg;
    }
};

void write_provenance(std::ostream& out, const RunConfig& rc, std::uint64_t input_hash) {
    out << "# config: " << rc.to_json().dump() << '\n';
    out << "# input_hash: " << hash_hex(input_hash) << '\n';
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorClass::InvalidInput, "cannot read input file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::function<void(std::ostream&)>& body) {
    const fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p);
    if (!out) throw Error(ErrorClass::InvalidInput, "cannot open '" + path + "' for writing");
    body(out);
    if (!out) throw Error(ErrorClass::InvalidInput, "short write to '" + path + "'");
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::istringstream in(text);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        std::size_t used = 0;
        const int v = std::stoi(tok, &used);
        if (used != tok.size())
            throw Error(ErrorClass::InvalidInput, "bad integer '" + tok + "' in list");
        out.push_back(v);
    }
    if (out.empty()) throw Error(ErrorClass::InvalidInput, "empty list");
    return out;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::istringstream in(text);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        std::size_t used = 0;
        const double v = std::stod(tok, &used);
        if (used != tok.size())
            throw Error(ErrorClass::InvalidInput, "bad number '" + tok + "' in list");
        out.push_back(v);
    }
    if (out.empty()) throw Error(ErrorClass::InvalidInput, "empty list");
    return out;
}

// "7" -> [7,7]; "1..25" -> [1,25]
std::pair<int, int> parse_range(const std::string& text) {
    const auto dots = text.find("..");
    if (dots == std::string::npos) {
        const int v = std::stoi(text);
        return {v, v};
    }
    const int lo = std::stoi(text.substr(0, dots));
    const int hi = std::stoi(text.substr(dots + 2));
    if (lo > hi) throw Error(ErrorClass::InvalidInput, "range '" + text + "' is reversed");
    return {lo, hi};
}

// ---- benchmark recipes shared by generate and experiment ----

RoleBenchmark build_house(std::uint64_t seed) {
    return make_cycle_with_shapes(30, {{ShapeKind::House, 10}}, Placement::Regular, seed);
}

RoleBenchmark build_varied(std::uint64_t seed) {
    return make_cycle_with_shapes(
        40, {{ShapeKind::House, 8}, {ShapeKind::Fan, 8}, {ShapeKind::Star, 8}},
        Placement::Random, seed);
}

// Table-style noisy variants add edges; the noise sweep rewires instead.
RoleBenchmark build_named(const std::string& name, std::uint64_t seed, double fraction,
                          int mirror_edges, int clique_size, int chain_length) {
    if (name == "barbell") return make_barbell(clique_size, chain_length);
    if (name == "house") return build_house(seed);
    if (name == "house-perturbed")
        return perturb_edges(build_house(derive_seed(seed, 0)), fraction, PerturbMode::Add,
                             derive_seed(seed, 1));
    if (name == "varied") return build_varied(seed);
    if (name == "varied-perturbed")
        return perturb_edges(build_varied(derive_seed(seed, 0)), fraction, PerturbMode::Add,
                             derive_seed(seed, 1));
    if (name == "karate") return make_mirrored_karate(mirror_edges, seed);
    throw Error(ErrorClass::InvalidInput, "unknown benchmark '" + name + "'");
}

std::uint64_t recipe_hash(const std::string& name, std::uint64_t seed) {
    const std::string key = name + ":" + std::to_string(seed);
    return fnv1a(key.data(), key.size());
}

// ---- embed ----

struct EmbedArgs {
    std::string input;
    std::string output;    // empty = stdout
    std::string metadata;  // optional
    bool largest = false;
};

int cmd_embed(RunConfig& rc, const EmbedArgs& args) {
    const std::string raw = slurp(args.input);
    const std::uint64_t input_hash = fnv1a(raw.data(), raw.size());
    std::istringstream in(raw);
    Graph g = read_edge_list(in);
    if (args.largest) g = largest_component(g);
    const EmbeddingSet set = embed_all(g, rc.embedding());

    const auto emit_csv = [&](std::ostream& out) {
        write_provenance(out, rc, input_hash);
        write_embedding_csv(out, set);
    };
    if (args.output.empty())
        emit_csv(std::cout);
    else
        write_file(args.output, emit_csv);

    if (!args.metadata.empty()) {
        std::ostringstream module_meta;
        write_embedding_metadata(module_meta, set);
        ordered_json meta;
        meta["run_config"] = rc.to_json();
        meta["input_hash"] = hash_hex(input_hash);
        meta["embedding"] = ordered_json::parse(module_meta.str());
        write_file(args.metadata, [&](std::ostream& out) { out << meta.dump(2) << '\n'; });
    }
    if (!args.output.empty())
        std::cout << "wrote " << args.output << " (" << set.n() << " nodes, dim " << set.dim()
                  << ")\n";
    return 0;
}

// ---- generate ----

struct GenerateArgs {
    std::string name;
    std::string prefix; // empty = name
    int count = 10;     // crossgraph only
    int mirror_edges = 10;
    double fraction = 0.10;
    int clique_size = 7;
    int chain_length = 8;
};

void write_benchmark_files(const RunConfig& rc, const RoleBenchmark& bench,
                           const std::string& prefix, std::uint64_t input_hash) {
    write_file(prefix + ".edges", [&](std::ostream& out) {
        write_provenance(out, rc, input_hash);
        write_edge_list(out, bench.graph);
    });
    write_file(prefix + "_roles.csv", [&](std::ostream& out) {
        write_provenance(out, rc, input_hash);
        write_roles_csv(out, bench);
    });
    write_file(prefix + "_recipe.json", [&](std::ostream& out) {
        ordered_json j;
        j["run_config"] = rc.to_json();
        j["input_hash"] = hash_hex(input_hash);
        j["recipe"] = ordered_json::parse(bench.recipe);
        j["graph_hash"] = hash_hex(bench.graph.content_hash());
        j["nodes"] = bench.graph.n();
        j["edges"] = bench.graph.edge_count();
        j["roles"] = bench.num_roles();
        out << j.dump(2) << '\n';
    });
    std::cout << "wrote " << prefix << ".edges " << prefix << "_roles.csv " << prefix
              << "_recipe.json\n";
}

int cmd_generate(RunConfig& rc, const GenerateArgs& args) {
    const std::string prefix = args.prefix.empty() ? args.name : args.prefix;
    const std::uint64_t input_hash = recipe_hash(args.name, rc.seed);
    if (args.name == "crossgraph") {
        const auto corpus = make_crossgraph_corpus(args.count, rc.seed);
        for (std::size_t i = 0; i < corpus.size(); ++i) {
            char suffix[16];
            std::snprintf(suffix, sizeof(suffix), "_%03zu", i);
            write_benchmark_files(rc, corpus[i], prefix + suffix, input_hash);
        }
        return 0;
    }
    const RoleBenchmark bench = build_named(args.name, rc.seed, args.fraction, args.mirror_edges,
                                            args.clique_size, args.chain_length);
    write_benchmark_files(rc, bench, prefix, input_hash);
    return 0;
}

// ---- experiment ----

struct ExperimentArgs {
    std::string name;
    std::string out_dir = ".";
    std::string mirror_edges = "1..25";
    std::string sizes = "1000,2000,4000,8000,16000";
    std::string fractions = "0,0.05,0.1,0.15,0.2,0.25,0.3";
    int count = 200; // crossgraph corpus size
    double fraction = 0.10;
};

int experiment_benchmark(RunConfig& rc, const ExperimentArgs& args) {
    EvalOptions eval;
    eval.mirror = args.name == "karate";
    const auto gen = [&](std::uint64_t s) {
        return build_named(args.name, s, args.fraction, 10, 7, 12);
    };
    const BenchmarkReport report =
        run_benchmark(args.name, gen, rc.embedding(), eval, rc.trials, rc.seed);

    const std::string path = args.out_dir + "/" + args.name + "_report.csv";
    write_file(path, [&](std::ostream& out) {
        write_provenance(out, rc, recipe_hash(args.name, rc.seed));
        write_benchmark_csv(out, report);
    });
    write_benchmark_table(std::cout, report);
    std::cout << "wrote " << path << '\n';
    return 0;
}

int experiment_crossgraph(RunConfig& rc, const ExperimentArgs& args) {
    const auto corpus = make_crossgraph_corpus(args.count, rc.seed);
    const EmbeddingConfig cfg = rc.embedding();

    RowMatrixXd pooled;
    std::vector<std::string> labels;
    std::vector<int> truth;
    struct GraphStatus {
        int nodes = 0;
        bool ok = false;
        std::string error;
    };
    std::vector<GraphStatus> status(corpus.size());
    std::vector<RowMatrixXd> blocks(corpus.size());
    Eigen::Index total = 0, dim = 0;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        status[i].nodes = corpus[i].graph.n();
        try {
            const EmbeddingSet set = embed_all(corpus[i].graph, cfg);
            blocks[i] = set.coords;
            dim = set.coords.cols();
            total += set.coords.rows();
            status[i].ok = true;
        } catch (const Error& e) {
            status[i].error = std::string(e.tag()) + ": " + e.what();
        }
    }
    pooled.resize(total, dim);
    Eigen::Index row = 0;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        if (!status[i].ok) continue;
        pooled.middleRows(row, blocks[i].rows()) = blocks[i];
        for (int a = 0; a < corpus[i].graph.n(); ++a) {
            labels.push_back("g" + std::to_string(i) + ":" + corpus[i].graph.label(a));
            truth.push_back(corpus[i].roles[static_cast<std::size_t>(a)]);
        }
        row += blocks[i].rows();
    }
    if (row == 0)
        throw Error(ErrorClass::EigensolverFailure, "every corpus graph failed to embed");

    const ClassificationScore score =
        knn_cv_classify(pooled, labels, truth, 4, 10, derive_seed(rc.seed, 1), false,
                        static_cast<unsigned>(rc.threads < 0 ? 0 : rc.threads));

    int failed = 0;
    for (const GraphStatus& s : status)
        if (!s.ok) ++failed;

    const std::uint64_t input_hash = recipe_hash(args.name, rc.seed);
    const std::string report_path = args.out_dir + "/crossgraph_report.csv";
    write_file(report_path, [&](std::ostream& out) {
        write_provenance(out, rc, input_hash);
        out << "metric,value\n";
        out << "accuracy," << format_double(score.accuracy) << '\n';
        out << "f1," << format_double(score.f1) << '\n';
        out << "graphs," << corpus.size() << '\n';
        out << "graphs_failed," << failed << '\n';
        out << "pooled_nodes," << row << '\n';
    });
    const std::string graphs_path = args.out_dir + "/crossgraph_graphs.csv";
    write_file(graphs_path, [&](std::ostream& out) {
        write_provenance(out, rc, input_hash);
        out << "graph,status,nodes,error\n";
        for (std::size_t i = 0; i < status.size(); ++i)
            out << i << ',' << (status[i].ok ? "ok" : "failed") << ',' << status[i].nodes << ','
                << status[i].error << '\n';
    });
    std::cout << "crossgraph: accuracy " << format_double(score.accuracy) << ", f1 "
              << format_double(score.f1) << " over " << row << " pooled nodes ("
              << corpus.size() - static_cast<std::size_t>(failed) << "/" << corpus.size()
              << " graphs)\n";
    std::cout << "wrote " << report_path << ' ' << graphs_path << '\n';
    return 0;
}

int experiment_karate(RunConfig& rc, const ExperimentArgs& args) {
    const auto [lo, hi] = parse_range(args.mirror_edges);
    const EmbeddingConfig cfg = rc.embedding();
    std::vector<double> means;
    const std::string path = args.out_dir + "/karate_sweep.csv";
    std::ostringstream body;
    body << "mirror_edges,mean_mirror_accuracy,std_mirror_accuracy,failed_trials\n";
    for (int k = lo; k <= hi; ++k) {
        std::vector<double> acc;
        int failed = 0;
        for (int t = 0; t < rc.trials; ++t) {
            const std::uint64_t s =
                derive_seed(rc.seed, static_cast<std::uint64_t>(k) * 1000003ULL +
                                         static_cast<std::uint64_t>(t));
            try {
                const RoleBenchmark bench = make_mirrored_karate(k, s);
                const EmbeddingSet set = embed_all(bench.graph, cfg);
                acc.push_back(mirror_accuracy(set.coords, bench.mirror_map));
            } catch (const Error&) {
                ++failed;
            }
        }
        if (acc.empty())
            throw Error(ErrorClass::EigensolverFailure,
                        "all karate trials failed at k=" + std::to_string(k));
        double mean = 0.0;
        for (double a : acc) mean += a;
        mean /= static_cast<double>(acc.size());
        double var = 0.0;
        for (double a : acc) var += (a - mean) * (a - mean);
        const double sd = acc.size() > 1 ? std::sqrt(var / (acc.size() - 1)) : 0.0;
        means.push_back(mean);
        body << k << ',' << format_double(mean) << ',' << format_double(sd) << ',' << failed
             << '\n';
    }
    double overall = 0.0;
    for (double m : means) overall += m;
    overall /= static_cast<double>(means.size());
    body << "overall," << format_double(overall) << ",,\n";

    write_file(path, [&](std::ostream& out) {
        write_provenance(out, rc, recipe_hash("karate", rc.seed));
        out << body.str();
    });
    std::cout << "karate mirror sweep " << lo << ".." << hi << ": overall mean accuracy "
              << format_double(overall) << '\n';
    std::cout << "wrote " << path << '\n';
    return 0;
}

int experiment_scaling(RunConfig& rc, const ExperimentArgs& args) {
    if (rc.mode == "dense")
        throw Error(ErrorClass::ProtocolRefused,
                    "the scaling protocol is defined for chebyshev mode; dense mode was refused");
    rc.mode = "chebyshev";
    const std::vector<int> sizes = parse_int_list(args.sizes);
    const auto family = make_scaling_family(sizes, rc.seed);
    EmbeddingConfig cfg = rc.embedding();
    // a slope measurement must time one pipeline at every size; without this
    // the smallest graphs take the dense spectral-bounds shortcut
    cfg.wavelet.spectral.dense_threshold = 0;

    std::vector<double> log_edges, log_secs;
    const std::string path = args.out_dir + "/scaling_timing.csv";
    std::ostringstream body;
    body << "n,edges,seconds\n";
    for (const Graph& g : family) {
        const auto start = std::chrono::steady_clock::now();
        const EmbeddingSet set = embed_all(g, cfg);
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        (void)set;
        body << g.n() << ',' << g.edge_count() << ',' << format_double(secs) << '\n';
        log_edges.push_back(std::log(static_cast<double>(g.edge_count())));
        log_secs.push_back(std::log(secs));
        std::cout << "n=" << g.n() << " edges=" << g.edge_count() << " seconds="
                  << format_double(secs) << '\n';
    }
    const double slope = least_squares_slope(log_edges, log_secs);
    body << "# log-log slope: " << format_double(slope) << '\n';
    write_file(path, [&](std::ostream& out) {
        write_provenance(out, rc, recipe_hash("scaling:" + args.sizes, rc.seed));
        out << "# the seconds column is wall-clock time and exempt from byte-identical reruns\n";
        out << body.str();
    });
    std::cout << "log-log slope of seconds vs edges: " << format_double(slope) << '\n';
    std::cout << "wrote " << path << '\n';
    return 0;
}

int experiment_noise_sweep(RunConfig& rc, const ExperimentArgs& args) {
    const std::vector<double> fractions = parse_double_list(args.fractions);
    EvalOptions eval;
    const std::string path = args.out_dir + "/noise_sweep.csv";
    std::ostringstream body;
    body << "fraction,homogeneity_mean,homogeneity_std,completeness_mean,completeness_std,"
            "silhouette_mean,silhouette_std,knn_accuracy_mean,knn_accuracy_std,"
            "knn_f1_mean,knn_f1_std,failed_trials\n";
    for (std::size_t i = 0; i < fractions.size(); ++i) {
        const double f = fractions[i];
        if (f < 0.0) throw Error(ErrorClass::InvalidInput, "noise fraction must be >= 0");
        const auto gen = [&](std::uint64_t s) {
            return perturb_edges(build_house(derive_seed(s, 0)), f, PerturbMode::Rewire,
                                 derive_seed(s, 1));
        };
        const BenchmarkReport report =
            run_benchmark("noise", gen, rc.embedding(), eval, rc.trials,
                          derive_seed(rc.seed, static_cast<std::uint64_t>(i)));
        body << format_double(f) << ','
             << format_double(report_mean(report, &TrialResult::homogeneity)) << ','
             << format_double(report_std(report, &TrialResult::homogeneity)) << ','
             << format_double(report_mean(report, &TrialResult::completeness)) << ','
             << format_double(report_std(report, &TrialResult::completeness)) << ','
             << format_double(report_mean(report, &TrialResult::silhouette)) << ','
             << format_double(report_std(report, &TrialResult::silhouette)) << ','
             << format_double(report_mean(report, &TrialResult::knn_accuracy)) << ','
             << format_double(report_std(report, &TrialResult::knn_accuracy)) << ','
             << format_double(report_mean(report, &TrialResult::knn_f1)) << ','
             << format_double(report_std(report, &TrialResult::knn_f1)) << ','
             << report.failures() << '\n';
        std::cout << "fraction " << format_double(f) << ": homogeneity "
                  << format_double(report_mean(report, &TrialResult::homogeneity)) << '\n';
    }
    write_file(path, [&](std::ostream& out) {
        write_provenance(out, rc, recipe_hash("noise-sweep:" + args.fractions, rc.seed));
        out << "# note: clusters come from single-linkage agglomerative clustering with the\n";
        out << "# true cluster count, not from affinity propagation\n";
        out << body.str();
    });
    std::cout << "wrote " << path << '\n';
    return 0;
}

int cmd_experiment(RunConfig& rc, const ExperimentArgs& args) {
    fs::create_directories(args.out_dir);
    if (args.name == "crossgraph") return experiment_crossgraph(rc, args);
    if (args.name == "karate") return experiment_karate(rc, args);
    if (args.name == "scaling") return experiment_scaling(rc, args);
    if (args.name == "noise-sweep") return experiment_noise_sweep(rc, args);
    return experiment_benchmark(rc, args);
}

// ---- distances ----

struct DistanceArgs {
    std::string embedding;
    std::string embedding_b; // optional second file
    std::string pairs;       // "a:b,c:d"
    int knn = 0;
    std::string nodes; // optional query subset for --knn
    std::string output;
};

int cmd_distances(RunConfig& rc, const DistanceArgs& args) {
    const std::string raw_a = slurp(args.embedding);
    std::uint64_t input_hash = fnv1a(raw_a.data(), raw_a.size());
    std::istringstream in_a(raw_a);
    const EmbeddingSet a = read_embedding_csv(in_a);

    EmbeddingSet b = a;
    const bool two_files = !args.embedding_b.empty();
    if (two_files) {
        const std::string raw_b = slurp(args.embedding_b);
        input_hash = fnv1a(raw_b.data(), raw_b.size(), input_hash);
        std::istringstream in_b(raw_b);
        b = read_embedding_csv(in_b);
        if (a.dim() != b.dim())
            throw Error(ErrorClass::DimensionMismatch,
                        "embedding dimensions differ: " + std::to_string(a.dim()) + " vs " +
                            std::to_string(b.dim()));
    }

    std::map<std::string, int> index_a, index_b;
    for (int i = 0; i < a.n(); ++i) index_a[a.labels[static_cast<std::size_t>(i)]] = i;
    for (int i = 0; i < b.n(); ++i) index_b[b.labels[static_cast<std::size_t>(i)]] = i;
    const auto lookup = [](const std::map<std::string, int>& index, const std::string& label,
                           const char* which) {
        const auto it = index.find(label);
        if (it == index.end())
            throw Error(ErrorClass::InvalidInput,
                        std::string("unknown node label '") + label + "' in " + which +
                            " embedding");
        return it->second;
    };

    std::ostringstream body;
    if (!args.pairs.empty()) {
        body << "node_a,node_b,distance\n";
        std::istringstream in(args.pairs);
        std::string tok;
        while (std::getline(in, tok, ',')) {
            const auto colon = tok.find(':');
            if (colon == std::string::npos)
                throw Error(ErrorClass::InvalidInput, "pair '" + tok + "' is not 'a:b'");
            const std::string la = tok.substr(0, colon), lb = tok.substr(colon + 1);
            const int ia = lookup(index_a, la, "first");
            const int ib = lookup(index_b, lb, two_files ? "second" : "first");
            const double d = (a.coords.row(ia) - b.coords.row(ib)).norm();
            body << la << ',' << lb << ',' << format_double(d) << '\n';
        }
    } else {
        if (args.knn < 1)
            throw Error(ErrorClass::InvalidInput, "pass --pairs or --knn with k >= 1");
        std::vector<int> queries;
        if (args.nodes.empty()) {
            for (int i = 0; i < a.n(); ++i) queries.push_back(i);
        } else {
            std::istringstream in(args.nodes);
            std::string tok;
            while (std::getline(in, tok, ','))
                queries.push_back(lookup(index_a, tok, "first"));
        }
        body << "node,rank,neighbor,distance\n";
        for (int q : queries) {
            std::vector<std::pair<double, int>> cands;
            for (int j = 0; j < b.n(); ++j) {
                if (!two_files && j == q) continue;
                cands.emplace_back((a.coords.row(q) - b.coords.row(j)).norm(), j);
            }
            const int k = std::min<int>(args.knn, static_cast<int>(cands.size()));
            std::partial_sort(cands.begin(), cands.begin() + k, cands.end());
            for (int r = 0; r < k; ++r)
                body << a.labels[static_cast<std::size_t>(q)] << ',' << r + 1 << ','
                     << b.labels[static_cast<std::size_t>(cands[static_cast<std::size_t>(r)]
                                                              .second)]
                     << ',' << format_double(cands[static_cast<std::size_t>(r)].first) << '\n';
        }
    }

    const auto emit = [&](std::ostream& out) {
        write_provenance(out, rc, input_hash);
        out << body.str();
    };
    if (args.output.empty())
        emit(std::cout);
    else {
        write_file(args.output, emit);
        std::cout << "wrote " << args.output << '\n';
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"heat-wavelet structural node embeddings"};
    app.require_subcommand(1);

    RunConfig rc;
    EmbedArgs embed_args;
    GenerateArgs gen_args;
    ExperimentArgs exp_args;
    DistanceArgs dist_args;

    const auto add_embedding_flags = [&rc](CLI::App* cmd) {
        cmd->add_option("--d", rc.d, "characteristic function sample points per scale")
            ->envname("GRAVELET_D");
        cmd->add_option("--t-max", rc.t_max, "largest sample point")->envname("GRAVELET_T_MAX");
        cmd->add_option("--eta", rc.eta, "scale selection eta")->envname("GRAVELET_ETA");
        cmd->add_option("--gamma", rc.gamma, "scale selection gamma")->envname("GRAVELET_GAMMA");
        cmd->add_option("--num-scales", rc.num_scales, "number of wavelet scales")
            ->envname("GRAVELET_NUM_SCALES");
        cmd->add_option("--order", rc.order, "Chebyshev polynomial order")
            ->envname("GRAVELET_ORDER");
        cmd->add_option("--mode", rc.mode, "wavelet mode")
            ->check(CLI::IsMember({"auto", "dense", "chebyshev"}))
            ->envname("GRAVELET_MODE");
        cmd->add_option("--threads", rc.threads, "worker thread cap (0 = hardware)")
            ->envname("GRAVELET_THREADS");
    };

    CLI::App* embed = app.add_subcommand("embed", "embed a graph from an edge list");
    embed->add_option("input", embed_args.input, "edge list file")->required();
    embed->add_option("--output,-o", embed_args.output, "embedding CSV (default stdout)");
    embed->add_option("--metadata", embed_args.metadata, "metadata JSON path");
    embed->add_flag("--largest-component", embed_args.largest,
                    "embed the largest component instead of failing on disconnected input");
    add_embedding_flags(embed);

    const std::vector<std::string> generate_names = {
        "barbell", "house",  "house-perturbed", "varied",
        "varied-perturbed", "karate", "crossgraph"};
    CLI::App* generate = app.add_subcommand("generate", "write a benchmark graph with roles");
    generate->add_option("name", gen_args.name, "benchmark name")
        ->required()
        ->check(CLI::IsMember(generate_names));
    generate->add_option("--seed", rc.seed, "generation seed")->envname("GRAVELET_SEED");
    generate->add_option("--out-prefix", gen_args.prefix, "output file prefix (default: name)");
    generate->add_option("--count", gen_args.count, "graphs to emit (crossgraph)");
    generate->add_option("--mirror-edges", gen_args.mirror_edges, "mirror edge count (karate)");
    generate->add_option("--fraction", gen_args.fraction, "perturbation fraction");
    generate->add_option("--clique-size", gen_args.clique_size, "barbell clique size");
    generate->add_option("--chain-length", gen_args.chain_length, "barbell chain length");

    const std::vector<std::string> experiment_names = {
        "barbell", "house",  "house-perturbed", "varied",     "varied-perturbed",
        "crossgraph", "karate", "scaling",        "noise-sweep"};
    CLI::App* experiment = app.add_subcommand("experiment", "run a named evaluation protocol");
    experiment->add_option("name", exp_args.name, "experiment name")
        ->required()
        ->check(CLI::IsMember(experiment_names));
    experiment->add_option("--seed", rc.seed, "master seed")->envname("GRAVELET_SEED");
    experiment->add_option("--trials", rc.trials, "trials per configuration")
        ->envname("GRAVELET_TRIALS");
    experiment->add_option("--out", exp_args.out_dir, "output directory");
    experiment->add_option("--mirror-edges", exp_args.mirror_edges,
                           "mirror edge count or range A..B (karate)");
    experiment->add_option("--sizes", exp_args.sizes, "comma list of node counts (scaling)");
    experiment->add_option("--fractions", exp_args.fractions,
                           "comma list of rewiring fractions (noise-sweep)");
    experiment->add_option("--count", exp_args.count, "corpus size (crossgraph)");
    experiment->add_option("--fraction", exp_args.fraction,
                           "added-edge fraction for perturbed benchmarks");
    add_embedding_flags(experiment);

    CLI::App* distances = app.add_subcommand("distances", "query distances in an embedding");
    distances->add_option("embedding", dist_args.embedding, "embedding CSV")->required();
    distances->add_option("embedding_b", dist_args.embedding_b, "second embedding CSV");
    distances->add_option("--pairs", dist_args.pairs, "comma list of a:b label pairs");
    distances->add_option("--knn", dist_args.knn, "list the k nearest neighbors");
    distances->add_option("--nodes", dist_args.nodes, "restrict --knn queries to these labels");
    distances->add_option("--output,-o", dist_args.output, "output CSV (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help and friends
        std::cerr << "error: invalid-input: " << e.what() << '\n';
        return 2;
    }

    try {
        if (embed->parsed()) {
            rc.subcommand = "embed";
            rc.inputs = {embed_args.input};
            if (!embed_args.output.empty()) rc.outputs.push_back(embed_args.output);
            if (!embed_args.metadata.empty()) rc.outputs.push_back(embed_args.metadata);
            rc.params["largest_component"] = embed_args.largest;
            return cmd_embed(rc, embed_args);
        }
        if (generate->parsed()) {
            rc.subcommand = "generate";
            rc.params["name"] = gen_args.name;
            rc.params["fraction"] = gen_args.fraction;
            if (gen_args.name == "karate") rc.params["mirror_edges"] = gen_args.mirror_edges;
            if (gen_args.name == "crossgraph") rc.params["count"] = gen_args.count;
            if (gen_args.name == "barbell") {
                rc.params["clique_size"] = gen_args.clique_size;
                rc.params["chain_length"] = gen_args.chain_length;
            }
            return cmd_generate(rc, gen_args);
        }
        if (experiment->parsed()) {
            rc.subcommand = "experiment";
            rc.params["name"] = exp_args.name;
            if (exp_args.name == "karate") rc.params["mirror_edges"] = exp_args.mirror_edges;
            if (exp_args.name == "scaling") rc.params["sizes"] = exp_args.sizes;
            if (exp_args.name == "noise-sweep") rc.params["fractions"] = exp_args.fractions;
            if (exp_args.name == "crossgraph") rc.params["count"] = exp_args.count;
            return cmd_experiment(rc, exp_args);
        }
        rc.subcommand = "distances";
        rc.inputs = {dist_args.embedding};
        if (!dist_args.embedding_b.empty()) rc.inputs.push_back(dist_args.embedding_b);
        if (!dist_args.output.empty()) rc.outputs.push_back(dist_args.output);
        if (dist_args.knn > 0) rc.params["knn"] = dist_args.knn;
        return cmd_distances(rc, dist_args);
    } catch (const Error& e) {
        std::cerr << "error: " << e.tag() << ": " << e.what() << '\n';
        return exit_code(e.error_class());
    } catch (const std::exception& e) {
        std::cerr << "error: internal-error: " << e.what() << '\n';
        return 3;
    }
}
