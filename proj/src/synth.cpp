#include "ptlearn/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "ptlearn/parallel.hpp"

namespace ptlearn {

InterventionKind intervention_kind_from_string(const std::string& s) {
    if (s == "perfect") return InterventionKind::perfect;
    if (s == "mean_shift" || s == "mean-shift") return InterventionKind::mean_shift;
    if (s == "inhibitory") return InterventionKind::inhibitory;
    if (s == "flipped") return InterventionKind::flipped;
    throw std::invalid_argument("unknown intervention kind: " + s);
}

std::string to_string(InterventionKind kind) {
    switch (kind) {
        case InterventionKind::perfect: return "perfect";
        case InterventionKind::mean_shift: return "mean_shift";
        case InterventionKind::inhibitory: return "inhibitory";
        case InterventionKind::flipped: return "flipped";
    }
    return "?";
}

std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::vector<VertexPair> prufer_decode(const std::vector<int>& seq, int p) {
    if (p < 2) throw std::invalid_argument("prufer_decode: need at least two vertices");
    if (static_cast<int>(seq.size()) != p - 2)
        throw std::invalid_argument("prufer_decode: sequence length must be p-2");
    std::vector<int> degree(p, 1);
    for (int s : seq) {
        if (s < 0 || s >= p) throw std::invalid_argument("prufer_decode: entry out of range");
        ++degree[s];
    }
    std::vector<VertexPair> edges;
    edges.reserve(p - 1);
    int ptr = 0;
    while (degree[ptr] != 1) ++ptr;
    int leaf = ptr;
    for (int s : seq) {
        edges.push_back(canonical_pair(leaf, s));
        if (--degree[s] == 1 && s < ptr) {
            leaf = s;
        } else {
            ++ptr;
            while (degree[ptr] != 1) ++ptr;
            leaf = ptr;
        }
    }
    edges.push_back(canonical_pair(leaf, p - 1));
    return edges;
}

Polytree random_polytree(int p, std::uint64_t seed) {
    if (p < 2) throw std::invalid_argument("random_polytree: p must be at least 2");
    std::mt19937_64 rng(split_seed(seed, 0x706f6c79));
    std::uniform_int_distribution<int> vertex(0, p - 1);
    std::vector<int> seq(p - 2);
    for (auto& s : seq) s = vertex(rng);
    auto tree = prufer_decode(seq, p);
    std::vector<Edge> edges;
    edges.reserve(tree.size());
    std::uniform_int_distribution<int> coin(0, 1);
    for (const auto& [u, v] : tree)
        edges.push_back(coin(rng) ? Edge{u, v} : Edge{v, u});
    return Polytree(Dag(p, std::move(edges)));
}

Dag random_dag(int p, double expected_edges_per_node, RandomDagModel model, std::uint64_t seed) {
    if (p < 2) throw std::invalid_argument("random_dag: p must be at least 2");
    if (expected_edges_per_node < 0) throw std::invalid_argument("random_dag: e must be nonnegative");
    std::mt19937_64 rng(split_seed(seed, 0x646167));
    std::vector<Edge> edges;
    if (model == RandomDagModel::erdos_renyi) {
        std::vector<int> order(p);
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        const double prob = std::min(1.0, expected_edges_per_node / (p - 1));
        std::bernoulli_distribution keep(prob);
        for (int i = 0; i < p; ++i)
            for (int j = i + 1; j < p; ++j)
                if (keep(rng)) edges.emplace_back(order[i], order[j]);
    } else {
        // Preferential attachment via the endpoint urn, edges oriented old -> new.
        const int m = std::max(1, static_cast<int>(std::lround(expected_edges_per_node)));
        std::vector<int> urn{0};
        for (int v = 1; v < p; ++v) {
            const int k = std::min(m, v);
            std::vector<int> chosen;
            while (static_cast<int>(chosen.size()) < k) {
                std::uniform_int_distribution<std::size_t> pick(0, urn.size() - 1);
                int cand = urn[pick(rng)];
                if (std::find(chosen.begin(), chosen.end(), cand) == chosen.end())
                    chosen.push_back(cand);
            }
            for (int u : chosen) {
                edges.emplace_back(u, v);
                urn.push_back(u);
                urn.push_back(v);
            }
            if (k == 0) urn.push_back(v);
        }
    }
    return Dag(p, std::move(edges));
}

SemParams draw_params(const Dag& g, const InterventionFamily& fam, InterventionKind kind,
                      std::uint64_t seed) {
    fam.validate_for(g.vertex_count());
    std::mt19937_64 rng(split_seed(seed, 0x706172616d));
    const int p = g.vertex_count();
    const auto& edges = g.edges();

    EnvParams base;
    base.lambda.resize(edges.size());
    base.omega.resize(p);
    base.mu.assign(p, 0.0);
    std::uniform_real_distribution<double> coef(0.5, 2.0);
    std::uniform_int_distribution<int> coin(0, 1);
    for (auto& l : base.lambda) l = (coin(rng) ? 1.0 : -1.0) * coef(rng);
    std::uniform_real_distribution<double> noise(0.05, 0.15);
    for (auto& w : base.omega) w = noise(rng);

    std::normal_distribution<double> shift_seed_dist(0.0, std::sqrt(2.0));
    auto draw_mean_shift = [&] {
        double mu_hat = shift_seed_dist(rng);
        return 5.0 * (mu_hat >= 0 ? 1.0 : -1.0) + mu_hat;
    };

    SemParams params;
    params.env.assign(fam.size(), base);
    for (int e = 0; e < fam.size(); ++e) {
        EnvParams& env = params.env[e];
        for (int v : fam.target(e)) {
            // Coefficient treatment distinguishes the kinds; apart from the
            // pure mean shift, every intervention also resets the target's
            // noise variance to 0.5 and shifts its mean.
            switch (kind) {
                case InterventionKind::perfect:
                    for (std::size_t i = 0; i < edges.size(); ++i)
                        if (edges[i].second == v) env.lambda[i] = 0.0;
                    break;
                case InterventionKind::mean_shift:
                    break;
                case InterventionKind::inhibitory:
                    for (std::size_t i = 0; i < edges.size(); ++i)
                        if (edges[i].second == v) env.lambda[i] *= 0.1;
                    break;
                case InterventionKind::flipped:
                    for (std::size_t i = 0; i < edges.size(); ++i)
                        if (edges[i].second == v) env.lambda[i] = -env.lambda[i];
                    break;
            }
            if (kind != InterventionKind::mean_shift) env.omega[v] = 0.5;
            env.mu[v] = draw_mean_shift();
        }
    }
    return params;
}

std::vector<DataMatrix> sample(const Dag& g, const SemParams& params,
                               const std::vector<int>& sizes, std::uint64_t seed) {
    if (sizes.size() != params.env.size())
        throw std::invalid_argument("sample: one size per environment required");
    for (int n : sizes)
        if (n <= 0) throw std::invalid_argument("sample: sizes must be positive");
    const int p = g.vertex_count();
    const auto& edges = g.edges();
    const auto& topo = g.topological_order();

    // Incoming edge list per vertex as (parent, edge index) for substitution.
    std::vector<std::vector<std::pair<int, int>>> incoming(p);
    for (std::size_t i = 0; i < edges.size(); ++i)
        incoming[edges[i].second].emplace_back(edges[i].first, static_cast<int>(i));

    std::vector<DataMatrix> out(sizes.size());
    parallel_for(0, static_cast<int>(sizes.size()), static_cast<int>(sizes.size()),
                 [&](int e) {
                     const EnvParams& env = params.env[e];
                     std::mt19937_64 rng(split_seed(seed, 0x73616d70 + static_cast<std::uint64_t>(e)));
                     std::normal_distribution<double> gauss(0.0, 1.0);
                     DataMatrix m(sizes[e], p);
                     for (int r = 0; r < sizes[e]; ++r) {
                         for (int v : topo) {
                             double x = env.mu[v] + gauss(rng) * std::sqrt(env.omega[v]);
                             for (const auto& [u, idx] : incoming[v]) x += env.lambda[idx] * m.at(r, u);
                             m.at(r, v) = x;
                         }
                     }
                     out[e] = std::move(m);
                 });
    return out;
}

namespace {

// Polytree route: variances by topological recursion, covariances from the
// unique simple trek (zero when the connecting path has a collider).
SymMatrix polytree_covariance(const Dag& g, const EnvParams& env) {
    const int p = g.vertex_count();
    const auto& edges = g.edges();
    SymMatrix sigma(p, 0.0);

    std::vector<std::vector<std::pair<int, int>>> incoming(p);
    std::vector<std::vector<std::pair<int, int>>> adj(p);  // (neighbor, edge index)
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const auto [u, v] = edges[i];
        incoming[v].emplace_back(u, static_cast<int>(i));
        adj[u].emplace_back(v, static_cast<int>(i));
        adj[v].emplace_back(u, static_cast<int>(i));
    }
    for (int v : g.topological_order()) {
        double var = env.omega[v];
        for (const auto& [u, idx] : incoming[v]) var += env.lambda[idx] * env.lambda[idx] * sigma(u, u);
        sigma(v, v) = var;
    }

    // One DFS per source: walk the tree keeping the running coefficient
    // product and the trek top's variance; branches that would pass a
    // collider are cut, leaving those covariances at zero.
    struct Item {
        int node, from;
        double prod;
        double top_var;  // variance of the trek top once descending
        bool ascending;  // still moving toward ancestors of the source
    };
    for (int s = 0; s < p; ++s) {
        std::vector<Item> stack{{s, -1, 1.0, sigma(s, s), true}};
        while (!stack.empty()) {
            Item it = stack.back();
            stack.pop_back();
            for (const auto& [nb, idx] : adj[it.node]) {
                if (nb == it.from) continue;
                const bool down_step = edges[idx].first == it.node;  // it.node -> nb
                if (down_step) {
                    // Top fixed: the current node while ascending, inherited otherwise.
                    const double top_var = it.ascending ? sigma(it.node, it.node) : it.top_var;
                    const double prod = it.prod * env.lambda[idx];
                    if (nb > s) sigma(s, nb) = prod * top_var;
                    stack.push_back({nb, it.node, prod, top_var, false});
                } else if (it.ascending) {
                    // nb -> it.node: keep climbing; nb is the new top candidate.
                    const double prod = it.prod * env.lambda[idx];
                    if (nb > s) sigma(s, nb) = prod * sigma(nb, nb);
                    stack.push_back({nb, it.node, prod, sigma(nb, nb), true});
                }
                // nb -> it.node while descending is a collider: no trek.
            }
        }
    }
    return sigma;
}

}  // namespace

SymMatrix trek_rule_covariance(const Dag& g, const EnvParams& params) {
    const int p = g.vertex_count();
    if (is_polytree(g)) return polytree_covariance(g, params);

    // General DAGs: path-weight accumulation A[t][x] = sum over directed
    // paths t->x of the coefficient product, then sum omega_t A[t][u] A[t][v]
    // over trek tops t.
    const auto& edges = g.edges();
    std::vector<std::vector<std::pair<int, int>>> incoming(p);
    for (std::size_t i = 0; i < edges.size(); ++i)
        incoming[edges[i].second].emplace_back(edges[i].first, static_cast<int>(i));

    std::vector<std::vector<double>> path(p, std::vector<double>(p, 0.0));
    for (int t = 0; t < p; ++t) {
        path[t][t] = 1.0;
        for (int x : g.topological_order()) {
            if (x == t) continue;
            double acc = 0.0;
            for (const auto& [u, idx] : incoming[x]) acc += path[t][u] * params.lambda[idx];
            path[t][x] = acc;
        }
    }
    SymMatrix sigma(p, 0.0);
    for (int u = 0; u < p; ++u)
        for (int v = u; v < p; ++v) {
            double acc = 0.0;
            for (int t = 0; t < p; ++t) acc += params.omega[t] * path[t][u] * path[t][v];
            sigma(u, v) = acc;
        }
    return sigma;
}

SymMatrix trek_rule_covariance(const Dag& g, const SemParams& params, int env) {
    return trek_rule_covariance(g, params.env.at(env));
}

}  // namespace ptlearn
