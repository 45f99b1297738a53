#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "ptlearn/orientation.hpp"
#include "ptlearn/synth.hpp"

namespace ptlearn {

// One synthetic problem instance: graph, family, parameters, data.
struct Scenario {
    int p = 100;
    long n = 1000;                     // total sample size
    int environments = 2;              // observational + (environments-1) interventions
    int targets_per_intervention = 1;
    InterventionKind kind = InterventionKind::perfect;
    double obs_fraction = -1.0;        // < 0: even n / environments split
    std::uint64_t seed = 1;
};

struct ScenarioData {
    Polytree truth;
    InterventionFamily fam;
    SemParams params;
    std::vector<int> sizes;
    std::vector<DataMatrix> data;
};

// Distinct random targets of size k for each interventional environment,
// with the observational entry first.
InterventionFamily random_family(int p, int environments, int targets_per_intervention,
                                 std::uint64_t seed);

std::vector<int> split_sizes(long n, int environments, double obs_fraction);

ScenarioData make_scenario(const Scenario& s);

// Baseline estimate: a fair-coin orientation of the skeleton, reduced to its
// interventional CPDAG.
PartiallyDirectedGraph random_orientation_icpdag(int p, const std::vector<VertexPair>& skeleton,
                                                 const InterventionFamily& fam,
                                                 std::uint64_t seed);

struct BenchmarkSpec {
    std::vector<int> p{100};
    std::vector<long> n{1000};
    std::vector<int> environments{2};
    std::vector<int> targets_per_intervention{1};
    std::vector<InterventionKind> kinds{InterventionKind::perfect};
    std::vector<AggregationMethod> aggregations{AggregationMethod::mean};
    std::vector<Procedure> procedures{Procedure::p2};
    std::vector<PairwiseMethod> pairwise{PairwiseMethod::irc};
    std::vector<ColliderMode> colliders{ColliderMode::simple};
    std::vector<double> obs_fractions{-1.0};
    std::vector<std::uint64_t> seeds{1};
    double alpha = 0.05;

    static BenchmarkSpec from_json_file(const std::filesystem::path& path);
};

struct BenchmarkRow {
    int p = 0;
    long n = 0;
    int environments = 0;
    int targets_per_intervention = 0;
    InterventionKind kind = InterventionKind::perfect;
    AggregationMethod aggregation = AggregationMethod::mean;
    Procedure procedure = Procedure::p2;
    PairwiseMethod pairwise_method = PairwiseMethod::irc;
    ColliderMode collider_mode = ColliderMode::simple;
    double alpha = 0.05;
    double obs_fraction = -1.0;
    std::uint64_t seed = 0;
    int shd_skeleton = 0;
    int shd_orientation = 0;  // from the true skeleton
    int shd_full = 0;
    int shd_random = 0;       // random-orientation baseline
    double stats_ms = 0.0;
    double skeleton_ms = 0.0;
    double orientation_ms = 0.0;
    double total_ms = 0.0;
};

// Runs the full grid; rows come back in deterministic grid order regardless
// of the worker pool.
std::vector<BenchmarkRow> run_benchmark(const BenchmarkSpec& spec, int threads);

void write_benchmark_csv(std::ostream& os, const std::vector<BenchmarkRow>& rows);

}  // namespace ptlearn
