#include "ptlearn/orientation.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <stdexcept>

#include "ptlearn/errors.hpp"
#include "ptlearn/parallel.hpp"

namespace ptlearn {

Procedure procedure_from_string(const std::string& s) {
    if (s == "p1" || s == "P1") return Procedure::p1;
    if (s == "p2" || s == "P2") return Procedure::p2;
    throw InputError("unknown procedure: " + s);
}

PairwiseMethod pairwise_from_string(const std::string& s) {
    if (s == "bic") return PairwiseMethod::bic;
    if (s == "irc") return PairwiseMethod::irc;
    throw InputError("unknown pairwise method: " + s);
}

ColliderMode collider_mode_from_string(const std::string& s) {
    if (s == "simple") return ColliderMode::simple;
    if (s == "refined") return ColliderMode::refined;
    throw InputError("unknown collider mode: " + s);
}

std::string to_string(Procedure p) { return p == Procedure::p1 ? "p1" : "p2"; }
std::string to_string(PairwiseMethod m) { return m == PairwiseMethod::bic ? "bic" : "irc"; }
std::string to_string(ColliderMode m) { return m == ColliderMode::simple ? "simple" : "refined"; }

OrientationState::OrientationState(int vertex_count, const std::vector<VertexPair>& skeleton_edges)
    : p_(vertex_count), edge_count_(skeleton_edges.size()), adj_(vertex_count) {
    for (const auto& [u, v] : skeleton_edges) {
        if (u < 0 || v < 0 || u >= p_ || v >= p_ || u == v)
            throw InputError("OrientationState: bad skeleton edge");
        if (!unoriented_.insert(canonical_pair(u, v)).second)
            throw InputError("OrientationState: duplicate skeleton edge");
        adj_[u].push_back(v);
        adj_[v].push_back(u);
    }
    for (auto& nbrs : adj_) std::sort(nbrs.begin(), nbrs.end());
}

void OrientationState::orient(int tail, int head) {
    const auto pair = canonical_pair(tail, head);
    if (unoriented_.erase(pair) != 1)
        throw std::logic_error("OrientationState::orient: edge is not unoriented");
    oriented_.insert({tail, head});
    if (unoriented_.size() + oriented_.size() != edge_count_)
        throw std::logic_error("OrientationState: partition invariant violated");
}

PartiallyDirectedGraph OrientationState::to_graph() const {
    return PartiallyDirectedGraph(p_, {oriented_.begin(), oriented_.end()},
                                  {unoriented_.begin(), unoriented_.end()});
}

namespace {

// Independence decision for u (tail of an oriented edge into v) and w.
bool seeded_independent(int u, int v, int w, const SuffStats& stats, const InterventionFamily& fam,
                        ColliderMode mode, OrientationCounters* counters) {
    if (counters) ++counters->collider_tests;
    if (mode == ColliderMode::simple) return collider_test_simple(u, v, w, stats, fam);
    const ColliderDecision d = collider_test_refined(u, v, w, stats, fam);
    if (d.fell_back && counters) ++counters->refined_fallbacks;
    return d.is_collider;
}

}  // namespace

void collider_pass(OrientationState& state, const SuffStats& stats, const InterventionFamily& fam,
                   ColliderMode mode, OrientationCounters* counters) {
    bool changed = true;
    while (changed) {
        changed = false;
        const std::vector<Edge> seeds(state.oriented().begin(), state.oriented().end());
        for (const auto& [u, v] : seeds) {
            for (int w : state.neighbors(v)) {
                if (w == u || !state.is_unoriented(v, w)) continue;
                if (seeded_independent(u, v, w, stats, fam, mode, counters))
                    state.orient(w, v);
                else
                    state.orient(v, w);
                changed = true;
            }
        }
        for (int v = 0; v < state.vertex_count(); ++v) {
            const auto& nbrs = state.neighbors(v);
            for (std::size_t i = 0; i < nbrs.size(); ++i) {
                if (!state.is_unoriented(nbrs[i], v)) continue;
                for (std::size_t j = i + 1; j < nbrs.size(); ++j) {
                    if (!state.is_unoriented(nbrs[i], v) || !state.is_unoriented(v, nbrs[j]))
                        continue;
                    if (counters) ++counters->collider_tests;
                    if (collider_test_simple(nbrs[i], v, nbrs[j], stats, fam)) {
                        state.orient(nbrs[i], v);
                        state.orient(nbrs[j], v);
                        changed = true;
                    }
                }
            }
        }
    }
}

void recursive_collider(OrientationState& state, const SuffStats& stats,
                        const InterventionFamily& fam, Edge seed, ColliderMode mode,
                        OrientationCounters* counters) {
    const auto [u, v] = seed;
    for (int w : state.neighbors(v)) {
        if (w == u || !state.is_unoriented(v, w)) continue;
        if (seeded_independent(u, v, w, stats, fam, mode, counters)) {
            state.orient(w, v);
        } else {
            state.orient(v, w);
            recursive_collider(state, stats, fam, {v, w}, mode, counters);
        }
    }
}

std::vector<Edge> find_the_root(const std::vector<int>& component,
                                const std::vector<VertexPair>& component_edges,
                                const SuffStats& stats, const InterventionFamily& fam,
                                OrientationCounters* counters) {
    if (component_edges.empty()) return {};
    double best = std::numeric_limits<double>::infinity();
    int root = component.front();
    for (int r : component) {
        const double score = bic_root_score(component, component_edges, r, stats, fam);
        if (counters) ++counters->bic_evals;
        if (score < best) {
            best = score;
            root = r;
        }
    }
    // Orient away from the winner.
    std::vector<std::vector<int>> adj(stats.var_count());
    for (const auto& [a, b] : component_edges) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    std::vector<Edge> out;
    std::vector<int> queue{root};
    std::vector<char> seen(stats.var_count(), 0);
    seen[root] = 1;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const int x = queue[head];
        for (int y : adj[x]) {
            if (seen[y]) continue;
            seen[y] = 1;
            out.push_back({x, y});
            queue.push_back(y);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

struct Component {
    std::vector<int> vertices;
    std::vector<VertexPair> edges;
};

std::vector<Component> unoriented_components(const OrientationState& state) {
    const int p = state.vertex_count();
    std::vector<std::vector<int>> adj(p);
    for (const auto& [u, v] : state.unoriented()) {
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    std::vector<Component> comps;
    std::vector<char> seen(p, 0);
    for (int s = 0; s < p; ++s) {
        if (seen[s] || adj[s].empty()) continue;
        Component comp;
        std::vector<int> queue{s};
        seen[s] = 1;
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const int x = queue[head];
            comp.vertices.push_back(x);
            for (int y : adj[x]) {
                if (x < y) comp.edges.emplace_back(x, y);
                if (!seen[y]) {
                    seen[y] = 1;
                    queue.push_back(y);
                }
            }
        }
        std::sort(comp.vertices.begin(), comp.vertices.end());
        std::sort(comp.edges.begin(), comp.edges.end());
        comps.push_back(std::move(comp));
    }
    return comps;
}

Direction pairwise_direction(int u, int v, const SuffStats& stats, const InterventionFamily& fam,
                             const OrientationConfig& config, OrientationCounters* counters) {
    if (config.pairwise == PairwiseMethod::irc) {
        const EdgeTestResult r = irc_orient_edge(u, v, stats, fam, config.alpha);
        if (counters) counters->f_tests += r.tests_run;
        return r.direction;
    }
    const BicScore forward = bic_edge_score(u, v, stats, fam);
    const BicScore backward = bic_edge_score(v, u, stats, fam);
    if (counters) counters->bic_evals += 2;
    const double gap = forward.score - backward.score;
    if (std::abs(gap) < kBicTieGap) return Direction::undecided;
    return gap < 0 ? Direction::u_to_v : Direction::v_to_u;
}

}  // namespace

PartiallyDirectedGraph procedure_1(const std::vector<VertexPair>& skeleton_edges,
                                   const SuffStats& stats, const InterventionFamily& fam,
                                   const OrientationConfig& config,
                                   OrientationCounters* counters) {
    OrientationState state(stats.var_count(), skeleton_edges);
    collider_pass(state, stats, fam, config.collider_mode, counters);

    if (config.pairwise == PairwiseMethod::bic) {
        const auto comps = unoriented_components(state);
        std::vector<std::vector<Edge>> oriented(comps.size());
        std::vector<OrientationCounters> local(comps.size());
        parallel_for(0, static_cast<int>(comps.size()), config.threads, [&](int i) {
            oriented[i] = find_the_root(comps[i].vertices, comps[i].edges, stats, fam, &local[i]);
        });
        if (counters)
            for (const auto& c : local) counters->bic_evals += c.bic_evals;
        std::vector<Edge> all(state.oriented().begin(), state.oriented().end());
        for (const auto& dirs : oriented) all.insert(all.end(), dirs.begin(), dirs.end());
        // Fully directed now; keep only what is identifiable from the estimate.
        return i_cpdag(Polytree(Dag(stats.var_count(), std::move(all))), fam);
    }

    const std::vector<VertexPair> snapshot(state.unoriented().begin(), state.unoriented().end());
    for (const auto& [u, v] : snapshot) {
        if (!state.is_unoriented(u, v)) continue;
        if (!fam.directly_identifiable(u, v)) continue;
        const Direction d = pairwise_direction(u, v, stats, fam, config, counters);
        if (d == Direction::undecided) {
            if (counters) ++counters->undecided_edges;
            continue;
        }
        const Edge o = d == Direction::u_to_v ? Edge{u, v} : Edge{v, u};
        state.orient(o.first, o.second);
        recursive_collider(state, stats, fam, o, config.collider_mode, counters);
    }
    return state.to_graph();
}

PartiallyDirectedGraph procedure_2(const std::vector<VertexPair>& skeleton_edges,
                                   const SuffStats& stats, const InterventionFamily& fam,
                                   const OrientationConfig& config,
                                   OrientationCounters* counters) {
    OrientationState state(stats.var_count(), skeleton_edges);
    const std::vector<VertexPair> snapshot(state.unoriented().begin(), state.unoriented().end());
    for (const auto& [u, v] : snapshot) {
        if (!fam.directly_identifiable(u, v)) continue;
        const Direction d = pairwise_direction(u, v, stats, fam, config, counters);
        if (d == Direction::undecided) {
            if (counters) ++counters->undecided_edges;
            continue;
        }
        if (d == Direction::u_to_v)
            state.orient(u, v);
        else
            state.orient(v, u);
    }
    collider_pass(state, stats, fam, config.collider_mode, counters);
    return state.to_graph();
}

namespace {

double ms_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
}

}  // namespace

LearnResult learn_from_stats(const SuffStats& stats, const InterventionFamily& fam,
                             AggregationMethod aggregation, const OrientationConfig& config) {
    fam.validate_for(stats.var_count());
    if (stats.env_count() != fam.size())
        throw InputError("learn: one environment per family entry required");

    LearnReport report;
    report.aggregation = aggregation;
    report.config = config;
    report.vertex_count = stats.var_count();
    report.environments = stats.env_count();
    report.total_samples = stats.total_samples();

    const auto t0 = std::chrono::steady_clock::now();
    const auto skel = learn_skeleton(stats, fam, aggregation, config.threads);
    report.skeleton_ms = ms_since(t0);

    const auto t1 = std::chrono::steady_clock::now();
    PartiallyDirectedGraph graph =
        config.procedure == Procedure::p1
            ? procedure_1(skel, stats, fam, config, &report.counters)
            : procedure_2(skel, stats, fam, config, &report.counters);
    report.orientation_ms = ms_since(t1);
    report.total_ms = ms_since(t0);
    report.directed_edges = static_cast<int>(graph.directed().size());
    report.undirected_edges = static_cast<int>(graph.undirected().size());
    return {std::move(graph), std::move(report)};
}

LearnResult learn(const std::vector<DataMatrix>& data, const InterventionFamily& fam,
                  AggregationMethod aggregation, const OrientationConfig& config) {
    const auto t0 = std::chrono::steady_clock::now();
    const SuffStats stats = suff_stats(data, config.threads);
    const double stats_ms = ms_since(t0);
    LearnResult result = learn_from_stats(stats, fam, aggregation, config);
    result.report.suff_stats_ms = stats_ms;
    result.report.total_ms += stats_ms;
    return result;
}

}  // namespace ptlearn
