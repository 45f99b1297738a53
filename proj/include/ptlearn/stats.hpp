#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "ptlearn/graph.hpp"
#include "ptlearn/sym_matrix.hpp"
#include "ptlearn/synth.hpp"

namespace ptlearn {

// Correlations are clipped away from +-1 before Fisher-type logarithms.
inline constexpr double kMaxAbsCorrelation = 1.0 - 1e-12;
// Environments below this size are skipped by pairwise orientation tests.
inline constexpr int kMinPairwiseSamples = 5;
// BIC comparisons closer than this resolve to "undecided".
inline constexpr double kBicTieGap = 1e-9;

// Second-order statistics of one environment. Correlations involving a
// zero-variance column are stored as 0 and the column is flagged.
struct EnvStats {
    int n = 0;
    std::vector<double> mean;
    std::vector<double> var;  // maximum-likelihood variance (centered SS / n)
    SymMatrix corr;
    std::vector<std::uint8_t> zero_var;
};

class SuffStats {
public:
    static SuffStats from_data(const std::vector<DataMatrix>& data, int threads = 1);
    // Exact statistics from population covariances, with nominal sizes; used
    // to drive the pipeline at the population level.
    static SuffStats from_covariances(const std::vector<SymMatrix>& covariances,
                                      const std::vector<int>& sizes);

    int var_count() const { return p_; }
    int env_count() const { return static_cast<int>(envs_.size()); }
    long total_samples() const { return total_n_; }
    const EnvStats& env(int e) const { return envs_[e]; }

    // Centered moments reconstructed from correlations and variances.
    double second_moment(int e, int u) const;
    double cross_moment(int e, int u, int v) const;

    bool flagged(int e, int v) const { return envs_[e].zero_var[v] != 0; }
    bool pair_flagged(int e, int u, int v) const { return flagged(e, u) || flagged(e, v); }

private:
    int p_ = 0;
    long total_n_ = 0;
    std::vector<EnvStats> envs_;
};

SuffStats suff_stats(const std::vector<DataMatrix>& data, int threads = 1);

enum class Direction { u_to_v, v_to_u, undecided };

struct EdgeTestResult {
    Direction direction = Direction::undecided;
    double p_value = 1.0;  // smallest p-value backing the decision
    int tests_run = 0;
};

// -sum_I (n_I/2) log(1 - rho_I^2), the Fisher-style aggregation weight.
double fisher_weight(std::span<const double> rhos, std::span<const double> ns);

double weighted_mean(std::span<const double> values, std::span<const double> weights);
// Lower median: smallest value whose cumulative weight reaches one half.
double weighted_median(std::span<const double> values, std::span<const double> weights);

// F test for equality of the regression slope of v on u between a reference
// environment and an intervened one, on per-environment centered columns,
// with Welch-style denominator degrees of freedom. Returns the upper-tail
// p-value, or nullopt when the variances degenerate.
std::optional<double> irc_f_test(std::span<const double> x_u0, std::span<const double> x_v0,
                                 std::span<const double> x_uI, std::span<const double> x_vI);

// Orients one edge by slope-invariance tests over the environments that
// intervene on exactly one endpoint, Bonferroni-corrected per direction.
EdgeTestResult irc_orient_edge(int u, int v, const SuffStats& stats,
                               const InterventionFamily& fam, double alpha);

struct BrentResult {
    double x = 0.0;
    double value = 0.0;
};

// Bounded scalar maximization (Brent). Finds a local maximizer within tol;
// the global one when f is unimodal. Throws NumericError on non-finite f.
BrentResult brent_maximize(const std::function<double(double)>& f, double lo, double hi,
                           double tol);

struct BicScore {
    double score = 0.0;  // log(n) * dim - 2 * loglik; lower preferred
    double loglik = 0.0;
    int dim = 0;
    double lambda_shared = 0.0;
    int excluded_envs = 0;
};

// BIC of the single-edge model u -> v with per-environment variances and a
// slope shared across the environments that do not intervene on v.
BicScore bic_edge_score(int u, int v, const SuffStats& stats, const InterventionFamily& fam);

// BIC of the model orienting a connected undirected subtree away from root;
// variances and slopes are shared across non-intervened environments.
double bic_root_score(const std::vector<int>& component,
                      const std::vector<VertexPair>& component_edges, int root,
                      const SuffStats& stats, const InterventionFamily& fam);

// Collider decision for a path u - v - w from the joint independence of u
// and w: true when the independence model wins the BIC comparison.
bool collider_test_simple(int u, int v, int w, const SuffStats& stats,
                          const InterventionFamily& fam);

struct ColliderDecision {
    bool is_collider = false;
    bool fell_back = false;  // singular regressors; simple test used instead
};

// With u -> v already oriented, compares the chain u -> v -> w against the
// collider u -> v <- w by BIC.
ColliderDecision collider_test_refined(int u, int v, int w, const SuffStats& stats,
                                       const InterventionFamily& fam);

}  // namespace ptlearn
