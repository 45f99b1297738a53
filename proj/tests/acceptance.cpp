// Acceptance suite: one numbered check per release criterion, each printing
// a single PASS/FAIL line. Run with no arguments for the full suite or with
// criterion numbers to select.
#include <openssl/evp.h>
#include <sys/resource.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "ptlearn/bench.hpp"
#include "ptlearn/io.hpp"
#include "ptlearn/orientation.hpp"
#include "ptlearn/parallel.hpp"
#include "ptlearn/synth.hpp"

using namespace ptlearn;
namespace fs = std::filesystem;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

SuffStats population_stats(const Dag& g, const InterventionFamily& fam, const SemParams& params,
                           const std::vector<int>& sizes) {
    std::vector<SymMatrix> cov;
    for (int e = 0; e < fam.size(); ++e) cov.push_back(trek_rule_covariance(g, params, e));
    return SuffStats::from_covariances(cov, sizes);
}

int undirected_shd(const std::vector<VertexPair>& a, const std::vector<VertexPair>& b, int p) {
    return shd_cpdag(PartiallyDirectedGraph(p, {}, a), PartiallyDirectedGraph(p, {}, b)).distance;
}

InterventionFamily distinct_singleton_family(int p, int interventions, std::mt19937_64& rng) {
    std::vector<std::vector<int>> targets{{}};
    std::vector<int> pool(p);
    std::iota(pool.begin(), pool.end(), 0);
    std::shuffle(pool.begin(), pool.end(), rng);
    for (int i = 0; i < interventions; ++i) targets.push_back({pool[i]});
    return InterventionFamily(targets);
}

// ---- criterion 1 -----------------------------------------------------------

bool criterion_1(std::string& detail) {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(101);
    int exact = 0;
    const int reps = 100;
    for (int rep = 0; rep < reps; ++rep) {
        const int p = 30;
        const Polytree g = random_polytree(p, rng());
        const int interventions = static_cast<int>(rng() % 5);  // |I| <= 5
        InterventionFamily fam = distinct_singleton_family(p, interventions, rng);
        const SemParams params = draw_params(g, fam, InterventionKind::perfect, rng());
        std::vector<int> sizes(fam.size(), 1000);
        sizes[0] = 2000;
        const auto stats = population_stats(g, fam, params, sizes);
        const auto truth = skeleton(g.dag());
        bool all = true;
        for (auto method : {AggregationMethod::fisher, AggregationMethod::mean,
                            AggregationMethod::median})
            all = all && undirected_shd(learn_skeleton(stats, fam, method), truth, p) == 0;
        if (all) ++exact;
    }
    const double elapsed = seconds_since(t0);
    std::ostringstream os;
    os << exact << "/" << reps << " exact recoveries, " << elapsed << " s";
    detail = os.str();
    return exact == reps && elapsed < 10.0;
}

// ---- criterion 2 -----------------------------------------------------------

bool criterion_2(std::string& detail) {
    const auto t0 = std::chrono::steady_clock::now();
    long graphs = 0, families = 0, mismatches = 0;
    std::mutex mutex;
    for (int p = 2; p <= 6; ++p) {
        const auto trees = oracles::all_trees(p);
        parallel_for(0, static_cast<int>(trees.size()), default_thread_count(), [&](int t) {
            std::mt19937_64 rng(split_seed(202, static_cast<std::uint64_t>(p) * 100000 + t));
            long local_graphs = 0, local_families = 0, local_mismatches = 0;
            for (const Dag& g : oracles::all_orientations(p, trees[t])) {
                const Polytree poly(g);
                std::vector<std::vector<int>> targets{{}};
                const int extra = static_cast<int>(rng() % 3);
                for (int e = 0; e < extra; ++e) {
                    std::vector<int> target;
                    for (int v = 0; v < p; ++v)
                        if (rng() % 3 == 0) target.push_back(v);
                    targets.push_back(target);
                }
                const InterventionFamily fam(targets);
                ++local_graphs;
                ++local_families;
                if (!(i_cpdag(poly, fam) == oracles::brute_force_icpdag(poly, fam)))
                    ++local_mismatches;
            }
            std::lock_guard<std::mutex> lock(mutex);
            graphs += local_graphs;
            families += local_families;
            mismatches += local_mismatches;
        });
    }
    const double elapsed = seconds_since(t0);
    std::ostringstream os;
    os << graphs << " polytrees, " << families << " sampled families, " << mismatches
       << " mismatches, " << elapsed << " s";
    detail = os.str();
    return mismatches == 0 && families >= 200 && elapsed < 60.0;
}

// ---- criterion 3 -----------------------------------------------------------

bool criterion_3(std::string& detail) {
    const std::vector<long> ns{200, 500, 1000, 2000};
    const int seeds = 20;
    std::ostringstream os;
    bool ok = true;
    for (auto method : {AggregationMethod::fisher, AggregationMethod::mean,
                        AggregationMethod::median}) {
        os << to_string(method) << ":";
        std::vector<double> medians;
        for (long n : ns) {
            std::vector<double> shds(seeds);
            parallel_for(0, seeds, default_thread_count(), [&](int s) {
                Scenario sc;
                sc.p = 100;
                sc.n = n;
                sc.environments = 6;  // observational + 5 interventions of 5 nodes
                sc.targets_per_intervention = 5;
                sc.kind = InterventionKind::perfect;
                sc.seed = 300 + s;
                const ScenarioData inst = make_scenario(sc);
                const auto stats = suff_stats(inst.data, 1);
                shds[s] = undirected_shd(learn_skeleton(stats, inst.fam, method),
                                         skeleton(inst.truth.dag()), sc.p);
            });
            medians.push_back(oracles::median(shds));
            os << " " << medians.back();
        }
        os << ";";
        bool monotone = true;
        for (std::size_t i = 1; i < medians.size(); ++i) monotone = monotone && medians[i] <= medians[i - 1];
        os << (monotone ? " trend ok" : " trend violated") << ", final "
           << (medians.back() <= 2.0 ? "<= 2" : "> 2") << ";";
        ok = ok && monotone && medians.back() <= 2.0;
    }
    detail = os.str();
    return ok;
}

// ---- criteria 4 and 5 ------------------------------------------------------

struct OrientationStudy {
    double median_p1_simple = 0, median_p2_simple = 0, median_p2_refined = 0;
    double median_random = 0;
    double time_simple = 0, time_refined = 0;
};

OrientationStudy orientation_study() {
    const int seeds = 20;
    std::vector<double> p1_simple(seeds), p2_simple(seeds), p2_refined(seeds), random_shd(seeds);
    std::vector<double> t_simple(seeds), t_refined(seeds);
    parallel_for(0, seeds, default_thread_count(), [&](int s) {
        Scenario sc;
        sc.p = 100;
        sc.n = 2000;
        sc.environments = 11;  // observational + 10 interventions of 5 nodes
        sc.targets_per_intervention = 5;
        sc.kind = InterventionKind::perfect;
        sc.seed = 400 + s;
        const ScenarioData inst = make_scenario(sc);
        const auto stats = suff_stats(inst.data, 1);
        const auto true_skel = skeleton(inst.truth.dag());
        const auto target = i_cpdag(inst.truth, inst.fam);

        OrientationConfig config;
        config.pairwise = PairwiseMethod::irc;
        config.collider_mode = ColliderMode::simple;

        auto t0 = std::chrono::steady_clock::now();
        config.procedure = Procedure::p1;
        p1_simple[s] = shd_cpdag(procedure_1(true_skel, stats, inst.fam, config), target).distance;
        config.procedure = Procedure::p2;
        p2_simple[s] = shd_cpdag(procedure_2(true_skel, stats, inst.fam, config), target).distance;
        t_simple[s] = seconds_since(t0);

        t0 = std::chrono::steady_clock::now();
        config.collider_mode = ColliderMode::refined;
        p2_refined[s] =
            shd_cpdag(procedure_2(true_skel, stats, inst.fam, config), target).distance;
        config.procedure = Procedure::p1;
        [[maybe_unused]] const auto p1_refined = procedure_1(true_skel, stats, inst.fam, config);
        t_refined[s] = seconds_since(t0);

        random_shd[s] = shd_cpdag(
            random_orientation_icpdag(sc.p, true_skel, inst.fam, split_seed(sc.seed, 5)), target)
                            .distance;
    });
    OrientationStudy study;
    study.median_p1_simple = oracles::median(p1_simple);
    study.median_p2_simple = oracles::median(p2_simple);
    study.median_p2_refined = oracles::median(p2_refined);
    study.median_random = oracles::median(random_shd);
    for (int s = 0; s < seeds; ++s) {
        study.time_simple += t_simple[s];
        study.time_refined += t_refined[s];
    }
    return study;
}

const OrientationStudy& shared_study() {
    static OrientationStudy study = orientation_study();
    return study;
}

bool criterion_4(std::string& detail) {
    const auto& study = shared_study();
    std::ostringstream os;
    os << "median orientation SHD: P1+simple " << study.median_p1_simple << ", P2+simple "
       << study.median_p2_simple << ", random baseline " << study.median_random;
    detail = os.str();
    const double cap = 0.25 * study.median_random;
    return study.median_p1_simple <= cap && study.median_p2_simple <= cap;
}

bool criterion_5(std::string& detail) {
    const auto& study = shared_study();
    std::ostringstream os;
    os << "median SHD simple " << study.median_p2_simple << " vs refined "
       << study.median_p2_refined << "; wall-clock simple " << study.time_simple
       << " s vs refined " << study.time_refined << " s";
    detail = os.str();
    return std::abs(study.median_p2_refined - study.median_p2_simple) <= 2.0 &&
           study.time_refined > study.time_simple;
}

// ---- criterion 6 -----------------------------------------------------------

bool criterion_6(std::string& detail) {
    Scenario sc;
    sc.p = 500;
    sc.n = 1000;
    sc.environments = 10;  // observational + 9 interventions of 10 nodes
    sc.targets_per_intervention = 10;
    sc.kind = InterventionKind::perfect;
    sc.seed = 600;
    const ScenarioData inst = make_scenario(sc);

    OrientationConfig config;
    config.pairwise = PairwiseMethod::irc;
    config.collider_mode = ColliderMode::simple;
    config.threads = 1;

    std::ostringstream os;
    bool ok = true;
    for (auto procedure : {Procedure::p1, Procedure::p2}) {
        config.procedure = procedure;
        const auto t0 = std::chrono::steady_clock::now();
        const LearnResult result = learn(inst.data, inst.fam, AggregationMethod::mean, config);
        const double elapsed = seconds_since(t0);
        auto learned_pairs = result.graph.undirected();
        for (const auto& [u, v] : result.graph.directed())
            learned_pairs.push_back(canonical_pair(u, v));
        std::sort(learned_pairs.begin(), learned_pairs.end());
        os << to_string(procedure) << " " << elapsed << " s (skeleton SHD "
           << undirected_shd(learned_pairs, skeleton(inst.truth.dag()), sc.p) << "); ";
        ok = ok && elapsed < 60.0;
    }
    struct rusage usage;
    getrusage(RUSAGE_SELF, &usage);
    const double peak_gb = usage.ru_maxrss / (1024.0 * 1024.0);
    os << "peak RSS " << peak_gb << " GB";
    detail = os.str();
    return ok && peak_gb < 2.0;
}

// ---- criterion 7 -----------------------------------------------------------

bool criterion_7(std::string& detail) {
    std::mt19937_64 rng(700);
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> coef(0.5, 2.0);
    std::uniform_real_distribution<double> noise(0.05, 0.15);
    const int reps = 2000, n = 500;
    std::vector<double> pvalues;
    pvalues.reserve(reps);
    int rejections = 0;
    std::vector<double> xu0(n), xv0(n), xu1(n), xv1(n);
    for (int rep = 0; rep < reps; ++rep) {
        const double lambda = (rng() % 2 ? 1 : -1) * coef(rng);
        const double sd_res = std::sqrt(noise(rng));
        const double sd_u0 = std::sqrt(noise(rng));
        const double mu1 = 5.0 + gauss(rng);
        for (int i = 0; i < n; ++i) {
            xu0[i] = sd_u0 * gauss(rng);
            xv0[i] = lambda * xu0[i] + sd_res * gauss(rng);
            xu1[i] = mu1 + std::sqrt(0.5) * gauss(rng);  // intervened regressor
            xv1[i] = lambda * xu1[i] + sd_res * gauss(rng);
        }
        const auto p = irc_f_test(xu0, xv0, xu1, xv1);
        if (!p) {
            detail = "degenerate test under the null";
            return false;
        }
        pvalues.push_back(*p);
        if (*p < 0.05) ++rejections;
    }
    const double ks = oracles::ks_uniform_statistic(pvalues);
    const double ks_critical = 1.6276 / std::sqrt(static_cast<double>(reps));  // 1% level
    const double size = rejections / static_cast<double>(reps);
    std::ostringstream os;
    os << "KS distance " << ks << " (1% critical " << ks_critical << "), empirical size " << size;
    detail = os.str();
    return ks < ks_critical && size >= 0.03 && size <= 0.07;
}

// ---- criterion 8 -----------------------------------------------------------

bool criterion_8(std::string& detail) {
    std::mt19937_64 rng(800);
    double worst = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
        const Dag g(2, {{0, 1}});
        const int extra = 1 + static_cast<int>(rng() % 2);
        std::vector<std::vector<int>> targets{{}};
        for (int e = 0; e < extra; ++e) targets.push_back({0});  // shared-lambda environments
        const InterventionFamily fam(targets);
        const SemParams params = draw_params(g, fam, InterventionKind::perfect, rng());
        const auto data = sample(g, params, std::vector<int>(fam.size(), 300), rng());
        const auto stats = suff_stats(data);
        const auto score = bic_edge_score(0, 1, stats, fam);

        auto profile = [&](double l) {
            double acc = 0;
            for (int e = 0; e < stats.env_count(); ++e) {
                const double suu = stats.second_moment(e, 0);
                const double suv = stats.cross_moment(e, 0, 1);
                const double svv = stats.second_moment(e, 1);
                acc -= 0.5 * stats.env(e).n * std::log(svv - 2 * l * suv + l * l * suu);
            }
            return acc;
        };
        double bracket = 0.0;
        for (int e = 0; e < stats.env_count(); ++e)
            bracket = std::max(
                bracket, std::abs(stats.cross_moment(e, 0, 1) / stats.second_moment(e, 0)));
        bracket = 2 * bracket + 1;
        double best_x = 0, best_f = -1e300;
        const int grid = 1000000;
        for (int i = 0; i <= grid; ++i) {
            const double x = -bracket + 2 * bracket * i / grid;
            const double y = profile(x);
            if (y > best_f) {
                best_f = y;
                best_x = x;
            }
        }
        worst = std::max(worst, std::abs(score.lambda_shared - best_x));
    }
    std::ostringstream os;
    os << "max |brent - grid| = " << worst << " over 50 instances";
    detail = os.str();
    return worst <= 1e-4;
}

// ---- criterion 9 -----------------------------------------------------------

bool criterion_9(std::string& detail) {
    std::mt19937_64 rng(900);
    double worst = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        const int p = 4 + static_cast<int>(rng() % 7);  // up to 10
        const Dag g = random_dag(p, 2.0, RandomDagModel::erdos_renyi, rng());
        const InterventionFamily fam({{}});
        const SemParams params = draw_params(g, fam, InterventionKind::perfect, rng());
        const SymMatrix mine = trek_rule_covariance(g, params, 0);
        const Eigen::MatrixXd ref = oracles::eq2_covariance(g, params.env[0]);
        for (int u = 0; u < p; ++u)
            for (int v = u; v < p; ++v) worst = std::max(worst, std::abs(mine(u, v) - ref(u, v)));
    }
    std::ostringstream os;
    os << "max entrywise |trek - matrix| = " << worst << " over 100 DAGs";
    detail = os.str();
    return worst <= 1e-10;
}

// ---- criterion 10 ----------------------------------------------------------

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return "";
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    char buffer[1 << 16];
    while (in) {
        in.read(buffer, sizeof buffer);
        EVP_DigestUpdate(ctx, buffer, static_cast<std::size_t>(in.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, digest, &len);
    EVP_MD_CTX_free(ctx);
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i) {
        char hex[3];
        std::snprintf(hex, sizeof hex, "%02x", digest[i]);
        os << hex;
    }
    return os.str();
}

fs::path sachs_dir() {
    for (fs::path dir : {fs::path("data/sachs"), fs::path("../data/sachs"),
                         fs::path("../../data/sachs"), fs::path("../../../data/sachs")})
        if (fs::exists(dir / "SHA256SUMS")) return dir;
    return {};
}

bool criterion_10(std::string& detail) {
    const fs::path dir = sachs_dir();
    if (dir.empty()) {
        detail = "fixtures not found";
        return false;
    }
    std::ifstream sums(dir / "SHA256SUMS");
    std::string expected, name;
    while (sums >> expected >> name) {
        if (sha256_file(dir / name) != expected) {
            detail = "fixture hash mismatch: " + name;
            return false;
        }
    }

    const NamedGraph consensus = read_edge_list(dir / "consensus_icpdag.edges.txt");
    const NamedGraph estimate = read_edge_list(dir / "published_estimate.edges.txt");
    const int table_shd = shd_cpdag(consensus.to_graph(), estimate.to_graph()).distance;

    const DatasetManifest manifest = read_manifest(dir / "manifest.json");
    const LoadedDataset dataset = load_dataset(manifest, dir);
    OrientationConfig config;
    config.procedure = Procedure::p2;
    config.pairwise = PairwiseMethod::irc;
    config.collider_mode = ColliderMode::simple;
    const LearnResult result = learn(dataset.data, dataset.fam, AggregationMethod::mean, config);
    const int shd = shd_cpdag(result.graph, consensus.to_graph()).distance;

    std::ostringstream os;
    os << "estimate-vs-consensus fixture SHD " << table_shd << " (reported value 15); learned SHD "
       << shd << " on pinned surrogate data (gate <= 18, target 15 +- 3"
       << (std::abs(shd - 15) <= 3 ? "" : ": deviation, see data/sachs/README.md") << ")";
    detail = os.str();
    return table_shd == 15 && shd <= 18;
}

// ---- criterion 11 ----------------------------------------------------------

bool criterion_11(std::string& detail) {
    const int seeds = 20;
    std::vector<double> shd_mean(seeds), shd_pooled(seeds);
    parallel_for(0, seeds, default_thread_count(), [&](int s) {
        std::mt19937_64 rng(split_seed(1100, s));
        const int p = 100;
        const Polytree g = random_polytree(p, rng());
        InterventionFamily fam = distinct_singleton_family(p, 20, rng);
        const SemParams params = draw_params(g, fam, InterventionKind::flipped, rng());
        const std::vector<int> sizes = split_sizes(5000, fam.size(), -1.0);
        const auto data = sample(g, params, sizes, rng());
        const auto stats = suff_stats(data, 1);
        const auto truth = skeleton(g.dag());
        shd_mean[s] =
            undirected_shd(learn_skeleton(stats, fam, AggregationMethod::mean), truth, p);
        shd_pooled[s] = undirected_shd(
            learn_skeleton(stats, fam, AggregationMethod::pooled_baseline), truth, p);
    });
    const double med_mean = oracles::median(shd_mean);
    const double med_pooled = oracles::median(shd_pooled);
    std::ostringstream os;
    os << "median skeleton SHD: weighted mean " << med_mean << ", pooled " << med_pooled;
    detail = os.str();
    return med_pooled > med_mean;
}

}  // namespace

int main(int argc, char** argv) {
    using Criterion = std::function<bool(std::string&)>;
    const std::vector<std::pair<std::string, Criterion>> criteria{
        {"population-oracle skeleton recovery", criterion_1},
        {"I-CPDAG oracle equivalence", criterion_2},
        {"finite-sample skeleton trend", criterion_3},
        {"orientation accuracy vs random baseline", criterion_4},
        {"refined-vs-simple parity", criterion_5},
        {"scalability p=500", criterion_6},
        {"F-test calibration", criterion_7},
        {"shared-coefficient optimizer", criterion_8},
        {"trek-rule covariance oracle", criterion_9},
        {"protein-network reproduction", criterion_10},
        {"flipped-intervention pooling failure", criterion_11},
    };

    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
    if (selected.empty())
        for (std::size_t i = 1; i <= criteria.size(); ++i) selected.push_back(static_cast<int>(i));

    int failures = 0;
    for (int id : selected) {
        if (id < 1 || id > static_cast<int>(criteria.size())) {
            std::printf("[FAIL] criterion %d: unknown\n", id);
            ++failures;
            continue;
        }
        const auto& [name, fn] = criteria[id - 1];
        std::string det;
        bool ok = false;
        try {
            ok = fn(det);
        } catch (const std::exception& e) {
            det = std::string("exception: ") + e.what();
        }
        std::printf("[%s] criterion %d (%s): %s\n", ok ? "PASS" : "FAIL", id, name.c_str(),
                    det.c_str());
        if (!ok) ++failures;
        std::fflush(stdout);
    }
    return failures;
}
