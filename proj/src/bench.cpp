#include "ptlearn/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>

#include <json.hpp>

#include "ptlearn/errors.hpp"
#include "ptlearn/parallel.hpp"

namespace ptlearn {

InterventionFamily random_family(int p, int environments, int targets_per_intervention,
                                 std::uint64_t seed) {
    if (environments < 1) throw InputError("random_family: need at least one environment");
    if (targets_per_intervention < 1 || targets_per_intervention > p)
        throw InputError("random_family: bad intervention size");
    std::mt19937_64 rng(split_seed(seed, 0x66616d));
    std::vector<std::vector<int>> targets{{}};
    std::set<std::vector<int>> used;
    std::vector<int> pool(p);
    for (int e = 1; e < environments; ++e) {
        std::vector<int> t;
        for (int attempt = 0; attempt < 1000; ++attempt) {
            for (int i = 0; i < p; ++i) pool[i] = i;
            t.clear();
            for (int i = 0; i < targets_per_intervention; ++i) {
                std::uniform_int_distribution<int> pick(i, p - 1);
                std::swap(pool[i], pool[pick(rng)]);
                t.push_back(pool[i]);
            }
            std::sort(t.begin(), t.end());
            if (used.insert(t).second) break;
            t.clear();
        }
        if (t.empty()) throw InputError("random_family: could not draw distinct targets");
        targets.push_back(std::move(t));
    }
    return InterventionFamily(std::move(targets));
}

std::vector<int> split_sizes(long n, int environments, double obs_fraction) {
    if (environments < 1 || n < environments)
        throw InputError("split_sizes: need at least one sample per environment");
    std::vector<int> sizes(environments);
    if (obs_fraction < 0) {
        const long base = n / environments;
        for (auto& s : sizes) s = static_cast<int>(base);
        sizes[0] += static_cast<int>(n - base * environments);
    } else {
        long obs = std::lround(obs_fraction * static_cast<double>(n));
        obs = std::clamp(obs, 1L, n - (environments - 1));
        sizes[0] = static_cast<int>(obs);
        const long rest = n - obs;
        const long base = rest / (environments - 1);
        for (int e = 1; e < environments; ++e) sizes[e] = static_cast<int>(base);
        sizes[1] += static_cast<int>(rest - base * (environments - 1));
    }
    return sizes;
}

ScenarioData make_scenario(const Scenario& s) {
    Polytree truth = random_polytree(s.p, split_seed(s.seed, 1));
    InterventionFamily fam =
        random_family(s.p, s.environments, s.targets_per_intervention, split_seed(s.seed, 2));
    SemParams params = draw_params(truth, fam, s.kind, split_seed(s.seed, 3));
    std::vector<int> sizes = split_sizes(s.n, s.environments, s.obs_fraction);
    std::vector<DataMatrix> data = sample(truth, params, sizes, split_seed(s.seed, 4));
    return {std::move(truth), std::move(fam), std::move(params), std::move(sizes),
            std::move(data)};
}

PartiallyDirectedGraph random_orientation_icpdag(int p, const std::vector<VertexPair>& skeleton,
                                                 const InterventionFamily& fam,
                                                 std::uint64_t seed) {
    std::mt19937_64 rng(split_seed(seed, 0x72616e64));
    std::uniform_int_distribution<int> coin(0, 1);
    std::vector<Edge> edges;
    edges.reserve(skeleton.size());
    for (const auto& [u, v] : skeleton) edges.push_back(coin(rng) ? Edge{u, v} : Edge{v, u});
    return i_cpdag(Polytree(Dag(p, std::move(edges))), fam);
}

namespace {

template <typename T>
std::vector<T> array_or_scalar(const nlohmann::json& j, const std::string& key,
                               const std::vector<T>& fallback) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (v.is_array()) return v.get<std::vector<T>>();
    return {v.get<T>()};
}

std::vector<std::string> string_list(const nlohmann::json& j, const std::string& key,
                                     const std::vector<std::string>& fallback) {
    return array_or_scalar<std::string>(j, key, fallback);
}

}  // namespace

BenchmarkSpec BenchmarkSpec::from_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open benchmark spec: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InputError("bad benchmark spec: " + std::string(e.what()));
    }
    BenchmarkSpec spec;
    spec.p = array_or_scalar<int>(j, "p", spec.p);
    spec.n = array_or_scalar<long>(j, "n", spec.n);
    spec.environments = array_or_scalar<int>(j, "environments", spec.environments);
    spec.targets_per_intervention =
        array_or_scalar<int>(j, "targets_per_intervention", spec.targets_per_intervention);
    spec.obs_fractions = array_or_scalar<double>(j, "obs_fractions", spec.obs_fractions);
    spec.seeds = array_or_scalar<std::uint64_t>(j, "seeds", spec.seeds);
    if (j.contains("alpha")) spec.alpha = j.at("alpha").get<double>();

    spec.kinds.clear();
    for (const auto& s : string_list(j, "kinds", {"perfect"}))
        spec.kinds.push_back(intervention_kind_from_string(s));
    spec.aggregations.clear();
    for (const auto& s : string_list(j, "aggregations", {"mean"}))
        spec.aggregations.push_back(aggregation_from_string(s));
    spec.procedures.clear();
    for (const auto& s : string_list(j, "procedures", {"p2"}))
        spec.procedures.push_back(procedure_from_string(s));
    spec.pairwise.clear();
    for (const auto& s : string_list(j, "pairwise", {"irc"}))
        spec.pairwise.push_back(pairwise_from_string(s));
    spec.colliders.clear();
    for (const auto& s : string_list(j, "colliders", {"simple"}))
        spec.colliders.push_back(collider_mode_from_string(s));

    if (spec.p.empty() || spec.n.empty() || spec.seeds.empty() || spec.environments.empty() ||
        spec.targets_per_intervention.empty() || spec.obs_fractions.empty())
        throw InputError("benchmark spec: every grid dimension needs at least one value");
    return spec;
}

namespace {

double ms_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
}

int undirected_shd(const std::vector<VertexPair>& a, const std::vector<VertexPair>& b, int p) {
    const PartiallyDirectedGraph ga(p, {}, a);
    const PartiallyDirectedGraph gb(p, {}, b);
    return shd_cpdag(ga, gb).distance;
}

BenchmarkRow run_row(BenchmarkRow row) {
    Scenario sc{row.p, row.n, row.environments, row.targets_per_intervention,
                row.kind, row.obs_fraction, row.seed};
    const ScenarioData inst = make_scenario(sc);
    const PartiallyDirectedGraph target = i_cpdag(inst.truth, inst.fam);
    const std::vector<VertexPair> true_skeleton = skeleton(inst.truth.dag());

    OrientationConfig config;
    config.procedure = row.procedure;
    config.pairwise = row.pairwise_method;
    config.collider_mode = row.collider_mode;
    config.alpha = row.alpha;
    config.threads = 1;

    const auto t0 = std::chrono::steady_clock::now();
    const SuffStats stats = suff_stats(inst.data, 1);
    row.stats_ms = ms_since(t0);

    const auto t1 = std::chrono::steady_clock::now();
    const auto learned_skeleton = learn_skeleton(stats, inst.fam, row.aggregation, 1);
    row.skeleton_ms = ms_since(t1);
    row.shd_skeleton = undirected_shd(learned_skeleton, true_skeleton, row.p);

    const auto t2 = std::chrono::steady_clock::now();
    const PartiallyDirectedGraph full =
        row.procedure == Procedure::p1
            ? procedure_1(learned_skeleton, stats, inst.fam, config)
            : procedure_2(learned_skeleton, stats, inst.fam, config);
    row.orientation_ms = ms_since(t2);
    row.shd_full = shd_cpdag(full, target).distance;

    const PartiallyDirectedGraph oriented =
        row.procedure == Procedure::p1
            ? procedure_1(true_skeleton, stats, inst.fam, config)
            : procedure_2(true_skeleton, stats, inst.fam, config);
    row.shd_orientation = shd_cpdag(oriented, target).distance;

    row.shd_random =
        shd_cpdag(random_orientation_icpdag(row.p, true_skeleton, inst.fam, split_seed(row.seed, 5)),
                  target)
            .distance;
    row.total_ms = ms_since(t0);
    return row;
}

}  // namespace

std::vector<BenchmarkRow> run_benchmark(const BenchmarkSpec& spec, int threads) {
    std::vector<BenchmarkRow> rows;
    for (int p : spec.p)
        for (long n : spec.n)
            for (int d : spec.environments)
                for (int k : spec.targets_per_intervention)
                    for (InterventionKind kind : spec.kinds)
                        for (AggregationMethod agg : spec.aggregations)
                            for (Procedure proc : spec.procedures)
                                for (PairwiseMethod pw : spec.pairwise)
                                    for (ColliderMode coll : spec.colliders)
                                        for (double wo : spec.obs_fractions)
                                            for (std::uint64_t seed : spec.seeds) {
                                                BenchmarkRow row;
                                                row.p = p;
                                                row.n = n;
                                                row.environments = d;
                                                row.targets_per_intervention = k;
                                                row.kind = kind;
                                                row.aggregation = agg;
                                                row.procedure = proc;
                                                row.pairwise_method = pw;
                                                row.collider_mode = coll;
                                                row.alpha = spec.alpha;
                                                row.obs_fraction = wo;
                                                row.seed = seed;
                                                rows.push_back(row);
                                            }
    parallel_for(0, static_cast<int>(rows.size()), threads,
                 [&](int i) { rows[i] = run_row(rows[i]); });
    return rows;
}

void write_benchmark_csv(std::ostream& os, const std::vector<BenchmarkRow>& rows) {
    os << "p,n,environments,targets_per_intervention,kind,aggregation,procedure,pairwise,"
          "collider,alpha,obs_fraction,seed,shd_skeleton,shd_orientation,shd_full,shd_random,"
          "stats_ms,skeleton_ms,orientation_ms,total_ms\n";
    char buffer[128];
    for (const auto& r : rows) {
        std::snprintf(buffer, sizeof buffer, "%.17g,%.17g", r.alpha, r.obs_fraction);
        os << r.p << ',' << r.n << ',' << r.environments << ',' << r.targets_per_intervention
           << ',' << to_string(r.kind) << ',' << to_string(r.aggregation) << ','
           << to_string(r.procedure) << ',' << to_string(r.pairwise_method) << ','
           << to_string(r.collider_mode) << ',' << buffer << ',' << r.seed << ','
           << r.shd_skeleton << ',' << r.shd_orientation << ',' << r.shd_full << ','
           << r.shd_random;
        std::snprintf(buffer, sizeof buffer, "%.3f,%.3f,%.3f,%.3f", r.stats_ms, r.skeleton_ms,
                      r.orientation_ms, r.total_ms);
        os << ',' << buffer << '\n';
    }
}

}  // namespace ptlearn
