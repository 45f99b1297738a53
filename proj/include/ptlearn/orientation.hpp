#pragma once

#include <set>
#include <string>
#include <vector>

#include "ptlearn/graph.hpp"
#include "ptlearn/skeleton.hpp"
#include "ptlearn/stats.hpp"

namespace ptlearn {

enum class Procedure { p1, p2 };
enum class PairwiseMethod { bic, irc };
enum class ColliderMode { simple, refined };

Procedure procedure_from_string(const std::string& s);
PairwiseMethod pairwise_from_string(const std::string& s);
ColliderMode collider_mode_from_string(const std::string& s);
std::string to_string(Procedure p);
std::string to_string(PairwiseMethod m);
std::string to_string(ColliderMode m);

struct OrientationConfig {
    Procedure procedure = Procedure::p2;
    PairwiseMethod pairwise = PairwiseMethod::irc;
    ColliderMode collider_mode = ColliderMode::simple;
    double alpha = 0.05;
    int threads = 1;
};

// Partition of the skeleton edges into an unoriented set E and an oriented
// set O; every mutation moves one edge from E to O.
class OrientationState {
public:
    OrientationState(int vertex_count, const std::vector<VertexPair>& skeleton_edges);

    int vertex_count() const { return p_; }
    const std::set<VertexPair>& unoriented() const { return unoriented_; }
    const std::set<Edge>& oriented() const { return oriented_; }
    const std::vector<int>& neighbors(int v) const { return adj_[v]; }

    bool is_unoriented(int u, int v) const { return unoriented_.count(canonical_pair(u, v)) > 0; }
    void orient(int tail, int head);

    PartiallyDirectedGraph to_graph() const;

private:
    int p_ = 0;
    std::size_t edge_count_ = 0;
    std::vector<std::vector<int>> adj_;
    std::set<VertexPair> unoriented_;
    std::set<Edge> oriented_;
};

struct OrientationCounters {
    long collider_tests = 0;
    long refined_fallbacks = 0;
    long f_tests = 0;
    long bic_evals = 0;
    long undecided_edges = 0;
};

// Repeats the two collider scans (seeded from oriented edges, then over
// unoriented triples) until a full pass changes nothing.
void collider_pass(OrientationState& state, const SuffStats& stats, const InterventionFamily& fam,
                   ColliderMode mode, OrientationCounters* counters = nullptr);

// Propagates one oriented edge through the unoriented part of the tree.
void recursive_collider(OrientationState& state, const SuffStats& stats,
                        const InterventionFamily& fam, Edge seed, ColliderMode mode,
                        OrientationCounters* counters = nullptr);

// Scores every vertex of an undirected component as the root and orients the
// component away from the best one. Returns the directed edges.
std::vector<Edge> find_the_root(const std::vector<int>& component,
                                const std::vector<VertexPair>& component_edges,
                                const SuffStats& stats, const InterventionFamily& fam,
                                OrientationCounters* counters = nullptr);

PartiallyDirectedGraph procedure_1(const std::vector<VertexPair>& skeleton_edges,
                                   const SuffStats& stats, const InterventionFamily& fam,
                                   const OrientationConfig& config,
                                   OrientationCounters* counters = nullptr);
PartiallyDirectedGraph procedure_2(const std::vector<VertexPair>& skeleton_edges,
                                   const SuffStats& stats, const InterventionFamily& fam,
                                   const OrientationConfig& config,
                                   OrientationCounters* counters = nullptr);

struct LearnReport {
    OrientationCounters counters;
    double suff_stats_ms = 0.0;
    double skeleton_ms = 0.0;
    double orientation_ms = 0.0;
    double total_ms = 0.0;
    int vertex_count = 0;
    int environments = 0;
    long total_samples = 0;
    int directed_edges = 0;
    int undirected_edges = 0;
    AggregationMethod aggregation = AggregationMethod::mean;
    OrientationConfig config;
};

struct LearnResult {
    PartiallyDirectedGraph graph;
    LearnReport report;
};

LearnResult learn(const std::vector<DataMatrix>& data, const InterventionFamily& fam,
                  AggregationMethod aggregation, const OrientationConfig& config);
// Same pipeline on precomputed statistics (population runs, reuse).
LearnResult learn_from_stats(const SuffStats& stats, const InterventionFamily& fam,
                             AggregationMethod aggregation, const OrientationConfig& config);

}  // namespace ptlearn
