#include "ptlearn/skeleton.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ptlearn/errors.hpp"
#include "ptlearn/parallel.hpp"

namespace ptlearn {

AggregationMethod aggregation_from_string(const std::string& s) {
    if (s == "fisher" || s == "itest") return AggregationMethod::fisher;
    if (s == "mean") return AggregationMethod::mean;
    if (s == "median") return AggregationMethod::median;
    if (s == "pooled") return AggregationMethod::pooled_baseline;
    if (s == "obs") return AggregationMethod::observational_baseline;
    throw InputError("unknown aggregation method: " + s);
}

std::string to_string(AggregationMethod method) {
    switch (method) {
        case AggregationMethod::fisher: return "fisher";
        case AggregationMethod::mean: return "mean";
        case AggregationMethod::median: return "median";
        case AggregationMethod::pooled_baseline: return "pooled";
        case AggregationMethod::observational_baseline: return "obs";
    }
    return "?";
}

WeightMatrix aggregate_weights(const SuffStats& stats, AggregationMethod method,
                               const InterventionFamily& fam, int threads) {
    const int p = stats.var_count();
    const int k = stats.env_count();
    WeightMatrix w(p, 0.0);
    const double total = static_cast<double>(stats.total_samples());

    switch (method) {
        case AggregationMethod::fisher:
            parallel_for(0, p, threads, [&](int u) {
                for (int v = u + 1; v < p; ++v) {
                    double acc = 0.0;
                    for (int e = 0; e < k; ++e) {
                        double rho = stats.env(e).corr(u, v);
                        rho = std::clamp(rho, -kMaxAbsCorrelation, kMaxAbsCorrelation);
                        acc -= 0.5 * stats.env(e).n * std::log1p(-rho * rho);
                    }
                    w(u, v) = acc;
                }
            });
            break;
        case AggregationMethod::mean:
            parallel_for(0, p, threads, [&](int u) {
                for (int v = u + 1; v < p; ++v) {
                    double acc = 0.0;
                    for (int e = 0; e < k; ++e)
                        acc += stats.env(e).n * std::abs(stats.env(e).corr(u, v));
                    w(u, v) = acc / total;
                }
            });
            break;
        case AggregationMethod::median:
            parallel_for(0, p, threads, [&](int u) {
                std::vector<double> values(k), weights(k);
                for (int v = u + 1; v < p; ++v) {
                    for (int e = 0; e < k; ++e) {
                        values[e] = std::abs(stats.env(e).corr(u, v));
                        weights[e] = stats.env(e).n;
                    }
                    w(u, v) = weighted_median(values, weights);
                }
            });
            break;
        case AggregationMethod::observational_baseline: {
            const int obs = fam.observational_index();
            parallel_for(0, p, threads, [&](int u) {
                for (int v = u + 1; v < p; ++v) w(u, v) = std::abs(stats.env(obs).corr(u, v));
            });
            break;
        }
        case AggregationMethod::pooled_baseline: {
            // Correlations of the row-concatenated data, rebuilt from the
            // per-environment moments and means.
            std::vector<double> grand_mean(p, 0.0);
            for (int e = 0; e < k; ++e)
                for (int c = 0; c < p; ++c) grand_mean[c] += stats.env(e).n * stats.env(e).mean[c];
            for (int c = 0; c < p; ++c) grand_mean[c] /= total;

            std::vector<double> pooled_var(p, 0.0);
            for (int c = 0; c < p; ++c) {
                double acc = 0.0;
                for (int e = 0; e < k; ++e) {
                    const double d = stats.env(e).mean[c] - grand_mean[c];
                    acc += stats.second_moment(e, c) + stats.env(e).n * d * d;
                }
                pooled_var[c] = acc;
            }
            parallel_for(0, p, threads, [&](int u) {
                for (int v = u + 1; v < p; ++v) {
                    double cross = 0.0;
                    for (int e = 0; e < k; ++e) {
                        const double du = stats.env(e).mean[u] - grand_mean[u];
                        const double dv = stats.env(e).mean[v] - grand_mean[v];
                        cross += stats.cross_moment(e, u, v) + stats.env(e).n * du * dv;
                    }
                    const double denom = std::sqrt(pooled_var[u] * pooled_var[v]);
                    w(u, v) = denom > 0 ? std::abs(cross) / denom : 0.0;
                }
            });
            break;
        }
    }
    return w;
}

namespace {

struct UnionFind {
    std::vector<int> parent, rank_;
    explicit UnionFind(int n) : parent(n), rank_(n, 0) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (rank_[a] < rank_[b]) std::swap(a, b);
        parent[b] = a;
        if (rank_[a] == rank_[b]) ++rank_[a];
        return true;
    }
};

}  // namespace

std::vector<VertexPair> max_weight_spanning_tree(const WeightMatrix& weights) {
    const int p = weights.size();
    if (p < 1) throw InputError("max_weight_spanning_tree: empty weight matrix");
    struct Entry {
        double w;
        int u, v;
    };
    std::vector<Entry> entries;
    entries.reserve(static_cast<std::size_t>(p) * (p - 1) / 2);
    for (int u = 0; u < p; ++u)
        for (int v = u + 1; v < p; ++v) {
            const double w = weights(u, v);
            if (!std::isfinite(w)) throw NumericError("max_weight_spanning_tree: non-finite weight");
            entries.push_back({w, u, v});
        }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.w != b.w) return a.w > b.w;
        return std::pair{a.u, a.v} < std::pair{b.u, b.v};
    });

    UnionFind uf(p);
    std::vector<VertexPair> tree;
    tree.reserve(p - 1);
    for (const Entry& e : entries) {
        if (uf.unite(e.u, e.v)) {
            tree.emplace_back(e.u, e.v);
            if (static_cast<int>(tree.size()) == p - 1) break;
        }
    }
    std::sort(tree.begin(), tree.end());
    return tree;
}

std::vector<VertexPair> learn_skeleton(const SuffStats& stats, const InterventionFamily& fam,
                                       AggregationMethod method, int threads) {
    if (stats.var_count() < 2) throw InputError("learn_skeleton: need at least two variables");
    return max_weight_spanning_tree(aggregate_weights(stats, method, fam, threads));
}

std::vector<VertexPair> learn_skeleton(const std::vector<DataMatrix>& data,
                                       const InterventionFamily& fam, AggregationMethod method,
                                       int threads) {
    return learn_skeleton(suff_stats(data, threads), fam, method, threads);
}

}  // namespace ptlearn
