#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ptlearn/graph.hpp"
#include "ptlearn/sym_matrix.hpp"

namespace ptlearn {

enum class InterventionKind { perfect, mean_shift, inhibitory, flipped };
enum class RandomDagModel { erdos_renyi, barabasi_albert };

InterventionKind intervention_kind_from_string(const std::string& s);
std::string to_string(InterventionKind kind);

// splitmix64 mix of a base seed and a stream id; used to derive independent
// generator streams deterministically.
std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream);

// Effective structural parameters of one environment.
struct EnvParams {
    std::vector<double> lambda;  // aligned with Dag::edges()
    std::vector<double> omega;   // error variance per vertex
    std::vector<double> mu;      // structural mean shift per vertex
};

// Observational parameters plus the per-environment overrides of a family.
// Vertices outside an environment's target keep the observational values.
struct SemParams {
    std::vector<EnvParams> env;  // one entry per family environment
    const EnvParams& observational(const InterventionFamily& fam) const {
        return env[fam.observational_index()];
    }
};

// Column-major-agnostic dense sample matrix, rows = observations.
struct DataMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> values;  // row-major

    DataMatrix() = default;
    DataMatrix(int r, int c) : rows(r), cols(c), values(static_cast<std::size_t>(r) * c, 0.0) {}
    double at(int r, int c) const { return values[static_cast<std::size_t>(r) * cols + c]; }
    double& at(int r, int c) { return values[static_cast<std::size_t>(r) * cols + c]; }
};

// Uniform random labeled tree from a Prüfer sequence, each edge then
// oriented by a fair coin flip.
Polytree random_polytree(int p, std::uint64_t seed);

// Decodes a Prüfer sequence (length p-2, entries in [0,p)) into tree edges.
std::vector<VertexPair> prufer_decode(const std::vector<int>& seq, int p);

Dag random_dag(int p, double expected_edges_per_node, RandomDagModel model, std::uint64_t seed);

SemParams draw_params(const Dag& g, const InterventionFamily& fam, InterventionKind kind,
                      std::uint64_t seed);

// Forward-substitution sampling of every environment; environment streams
// are split from the base seed and independent of each other.
std::vector<DataMatrix> sample(const Dag& g, const SemParams& params,
                               const std::vector<int>& sizes, std::uint64_t seed);

// Exact population covariance of one environment. Polytrees take the
// single-simple-trek path; general DAGs accumulate directed path weights.
SymMatrix trek_rule_covariance(const Dag& g, const SemParams& params, int env);
SymMatrix trek_rule_covariance(const Dag& g, const EnvParams& params);

}  // namespace ptlearn
