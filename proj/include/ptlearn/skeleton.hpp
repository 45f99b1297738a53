#pragma once

#include <string>
#include <vector>

#include "ptlearn/graph.hpp"
#include "ptlearn/stats.hpp"
#include "ptlearn/sym_matrix.hpp"

namespace ptlearn {

// fisher/mean/median are the aggregation functions proper; the two baselines
// exist for benchmark comparison only.
enum class AggregationMethod { fisher, mean, median, pooled_baseline, observational_baseline };

AggregationMethod aggregation_from_string(const std::string& s);
std::string to_string(AggregationMethod method);

// Symmetric p x p nonnegative score matrix, diagonal unused.
using WeightMatrix = SymMatrix;

WeightMatrix aggregate_weights(const SuffStats& stats, AggregationMethod method,
                               const InterventionFamily& fam, int threads = 1);

// Kruskal over the complete graph; ties broken by lexicographic edge order.
std::vector<VertexPair> max_weight_spanning_tree(const WeightMatrix& weights);

std::vector<VertexPair> learn_skeleton(const SuffStats& stats, const InterventionFamily& fam,
                                       AggregationMethod method, int threads = 1);
std::vector<VertexPair> learn_skeleton(const std::vector<DataMatrix>& data,
                                       const InterventionFamily& fam, AggregationMethod method,
                                       int threads = 1);

}  // namespace ptlearn
