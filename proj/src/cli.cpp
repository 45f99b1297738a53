#include "ptlearn/cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ptlearn/bench.hpp"
#include "ptlearn/errors.hpp"
#include "ptlearn/io.hpp"
#include "ptlearn/orientation.hpp"
#include "ptlearn/parallel.hpp"
#include "ptlearn/version.hpp"

namespace ptlearn::cli {

namespace {

namespace fs = std::filesystem;

struct LearnOptions {
    std::string manifest;
    std::string aggregation = "mean";
    std::string procedure = "p2";
    std::string pairwise = "irc";
    std::string collider = "simple";
    double alpha = 0.05;
    int threads = default_thread_count();
    std::uint64_t seed = 0;
    std::string out_dir = ".";
};

nlohmann::json report_json(const LearnReport& report, const LearnOptions& opt) {
    nlohmann::json j;
    j["version"] = kVersion;
    j["seed"] = opt.seed;
    j["config"] = {{"aggregation", to_string(report.aggregation)},
                   {"procedure", to_string(report.config.procedure)},
                   {"pairwise", to_string(report.config.pairwise)},
                   {"collider", to_string(report.config.collider_mode)},
                   {"alpha", report.config.alpha},
                   {"threads", report.config.threads}};
    j["data"] = {{"vertices", report.vertex_count},
                 {"environments", report.environments},
                 {"total_samples", report.total_samples}};
    j["timings_ms"] = {{"suff_stats", report.suff_stats_ms},
                       {"skeleton", report.skeleton_ms},
                       {"orientation", report.orientation_ms},
                       {"total", report.total_ms}};
    j["counts"] = {{"f_tests", report.counters.f_tests},
                   {"bic_evals", report.counters.bic_evals},
                   {"collider_tests", report.counters.collider_tests},
                   {"refined_fallbacks", report.counters.refined_fallbacks},
                   {"undecided_edges", report.counters.undecided_edges}};
    j["estimate"] = {{"directed_edges", report.directed_edges},
                     {"undirected_edges", report.undirected_edges}};
    return j;
}

int cmd_learn(const LearnOptions& opt) {
    const fs::path manifest_path(opt.manifest);
    const DatasetManifest manifest = read_manifest(manifest_path);
    const LoadedDataset dataset = load_dataset(manifest, manifest_path.parent_path());

    OrientationConfig config;
    config.procedure = procedure_from_string(opt.procedure);
    config.pairwise = pairwise_from_string(opt.pairwise);
    config.collider_mode = collider_mode_from_string(opt.collider);
    config.alpha = opt.alpha;
    config.threads = opt.threads;
    if (opt.alpha <= 0.0 || opt.alpha >= 1.0) throw InputError("--alpha must lie in (0,1)");

    const LearnResult result =
        learn(dataset.data, dataset.fam, aggregation_from_string(opt.aggregation), config);

    const fs::path out_dir(opt.out_dir);
    fs::create_directories(out_dir);
    write_edge_list_file(out_dir / "estimate.edges.txt", dataset.names, result.graph);
    {
        std::ofstream dot(out_dir / "estimate.dot");
        write_dot(dot, dataset.names, result.graph);
    }
    {
        std::ofstream rep(out_dir / "report.json");
        rep << report_json(result.report, opt).dump(2) << '\n';
    }
    std::cout << "learned " << result.report.directed_edges << " directed and "
              << result.report.undirected_edges << " undirected edges in "
              << result.report.total_ms << " ms; outputs in " << out_dir.string() << "\n";
    return kExitOk;
}

int cmd_simulate(int p, int environments, int k, long n, const std::string& kind_name,
                 double obs_fraction, std::uint64_t seed, const std::string& out_dir_name) {
    Scenario sc;
    sc.p = p;
    sc.n = n;
    sc.environments = environments;
    sc.targets_per_intervention = k;
    sc.kind = intervention_kind_from_string(kind_name);
    sc.obs_fraction = obs_fraction;
    sc.seed = seed;
    const ScenarioData inst = make_scenario(sc);

    std::vector<std::string> names(p);
    for (int i = 0; i < p; ++i) names[i] = "x" + std::to_string(i);

    const fs::path out_dir(out_dir_name);
    fs::create_directories(out_dir);
    DatasetManifest manifest;
    manifest.vertex_names = names;
    for (int e = 0; e < inst.fam.size(); ++e) {
        const std::string file = "env_" + std::to_string(e) + ".csv";
        write_csv(out_dir / file, names, inst.data[e]);
        manifest.environments.push_back({file, inst.fam.target(e), inst.sizes[e]});
    }
    write_manifest(out_dir / "manifest.json", manifest);

    const Dag& truth = inst.truth.dag();
    write_edge_list_file(out_dir / "truth.edges.txt", names,
                         PartiallyDirectedGraph(p, truth.edges(), {}));
    write_edge_list_file(out_dir / "truth_icpdag.edges.txt", names, i_cpdag(inst.truth, inst.fam));
    std::cout << "simulated " << inst.fam.size() << " environments over " << p
              << " vertices into " << out_dir.string() << " (seed " << seed << ")\n";
    return kExitOk;
}

int cmd_benchmark(const std::string& spec_path, const std::string& out_path, int threads) {
    const BenchmarkSpec spec = BenchmarkSpec::from_json_file(spec_path);
    const auto rows = run_benchmark(spec, threads);
    std::ofstream out(out_path);
    if (!out) throw InputError("cannot write results: " + out_path);
    write_benchmark_csv(out, rows);
    std::cout << "wrote " << rows.size() << " benchmark rows to " << out_path << "\n";
    return kExitOk;
}

int cmd_shd(const std::string& path_a, const std::string& path_b) {
    const NamedGraph a = read_edge_list(path_a);
    const NamedGraph b = read_edge_list(path_b);

    // Compare by vertex name; the files must describe the same vertex set.
    std::vector<std::string> sorted_a = a.names, sorted_b = b.names;
    std::sort(sorted_a.begin(), sorted_a.end());
    std::sort(sorted_b.begin(), sorted_b.end());
    if (sorted_a != sorted_b)
        throw InputError("shd: the two graphs have different vertex sets");

    auto remap = [&](const NamedGraph& g) {
        std::map<std::string, int> to_index;
        for (std::size_t i = 0; i < sorted_a.size(); ++i) to_index[sorted_a[i]] = static_cast<int>(i);
        std::vector<Edge> directed;
        std::vector<VertexPair> undirected;
        for (const auto& [u, v] : g.directed)
            directed.emplace_back(to_index.at(g.names[u]), to_index.at(g.names[v]));
        for (const auto& [u, v] : g.undirected)
            undirected.push_back(canonical_pair(to_index.at(g.names[u]), to_index.at(g.names[v])));
        return PartiallyDirectedGraph(static_cast<int>(g.names.size()), std::move(directed),
                                      std::move(undirected));
    };
    const ShdResult r = shd_cpdag(remap(a), remap(b));
    std::cout << "SHD " << r.distance << " (additions " << r.additions << ", deletions "
              << r.deletions << ", mark-changes " << r.reversals << ")\n";
    return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"Interventional polytree structure learning"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    LearnOptions learn_opt;
    CLI::App* learn_cmd = app.add_subcommand("learn", "Estimate an interventional CPDAG from data");
    learn_cmd->add_option("--manifest", learn_opt.manifest, "Dataset manifest JSON")->required();
    learn_cmd->add_option("--aggregation", learn_opt.aggregation,
                          "Skeleton weights: fisher|mean|median|pooled|obs");
    learn_cmd->add_option("--procedure", learn_opt.procedure, "Orientation procedure: p1|p2");
    learn_cmd->add_option("--pairwise", learn_opt.pairwise, "Single-edge orientation: bic|irc");
    learn_cmd->add_option("--collider", learn_opt.collider, "Collider test: simple|refined");
    learn_cmd->add_option("--alpha", learn_opt.alpha, "Significance level of the invariance test");
    learn_cmd->add_option("--threads", learn_opt.threads, "Worker threads (default from PTLEARN_THREADS)");
    learn_cmd->add_option("--seed", learn_opt.seed, "Seed recorded in the report");
    learn_cmd->add_option("--out-dir", learn_opt.out_dir, "Output directory");

    int sim_p = 10, sim_envs = 2, sim_k = 1;
    long sim_n = 1000;
    std::string sim_kind = "perfect", sim_out = ".";
    double sim_wo = -1.0;
    std::uint64_t sim_seed = 1;
    CLI::App* sim_cmd = app.add_subcommand("simulate", "Sample a synthetic interventional dataset");
    sim_cmd->add_option("--p", sim_p, "Vertex count")->required();
    sim_cmd->add_option("--environments", sim_envs, "Environment count (first is observational)");
    sim_cmd->add_option("--targets-per-intervention", sim_k, "Target set size per intervention");
    sim_cmd->add_option("--n", sim_n, "Total sample size")->required();
    sim_cmd->add_option("--kind", sim_kind, "perfect|mean_shift|inhibitory|flipped");
    sim_cmd->add_option("--obs-fraction", sim_wo, "Observational share (default: even split)");
    sim_cmd->add_option("--seed", sim_seed, "RNG seed");
    sim_cmd->add_option("--out-dir", sim_out, "Output directory");

    std::string bench_spec, bench_out = "results.csv";
    int bench_threads = default_thread_count();
    CLI::App* bench_cmd = app.add_subcommand("benchmark", "Run a simulation grid");
    bench_cmd->add_option("--spec", bench_spec, "Benchmark spec JSON")->required();
    bench_cmd->add_option("--out", bench_out, "Results CSV path");
    bench_cmd->add_option("--threads", bench_threads, "Worker threads");

    std::string shd_a, shd_b;
    CLI::App* shd_cmd = app.add_subcommand("shd", "Structural Hamming distance of two edge lists");
    shd_cmd->add_option("file_a", shd_a, "First edge-list file")->required();
    shd_cmd->add_option("file_b", shd_b, "Second edge-list file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInputError;
    }

    try {
        if (learn_cmd->parsed()) return cmd_learn(learn_opt);
        if (sim_cmd->parsed())
            return cmd_simulate(sim_p, sim_envs, sim_k, sim_n, sim_kind, sim_wo, sim_seed, sim_out);
        if (bench_cmd->parsed()) return cmd_benchmark(bench_spec, bench_out, bench_threads);
        if (shd_cmd->parsed()) return cmd_shd(shd_a, shd_b);
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const NumericError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumericError;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumericError;
    }
    return kExitOk;
}

}  // namespace ptlearn::cli
