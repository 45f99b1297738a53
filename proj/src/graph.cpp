#include "ptlearn/graph.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>
#include <stdexcept>

namespace ptlearn {

Dag::Dag(int vertex_count, std::vector<Edge> edges) : p_(vertex_count), edges_(std::move(edges)) {
    if (p_ <= 0) throw std::invalid_argument("Dag: vertex_count must be positive");
    std::sort(edges_.begin(), edges_.end());
    parents_.resize(p_);
    children_.resize(p_);
    std::set<VertexPair> seen;
    for (const auto& [u, v] : edges_) {
        if (u < 0 || v < 0 || u >= p_ || v >= p_) throw std::invalid_argument("Dag: vertex index out of range");
        if (u == v) throw std::invalid_argument("Dag: self-loop");
        if (!seen.insert(canonical_pair(u, v)).second)
            throw std::invalid_argument("Dag: more than one edge between a vertex pair");
        children_[u].push_back(v);
        parents_[v].push_back(u);
    }
    for (int v = 0; v < p_; ++v) {
        std::sort(parents_[v].begin(), parents_[v].end());
        std::sort(children_[v].begin(), children_[v].end());
    }
    // Kahn's algorithm; a leftover vertex means a directed cycle.
    std::vector<int> indeg(p_);
    for (int v = 0; v < p_; ++v) indeg[v] = static_cast<int>(parents_[v].size());
    std::queue<int> ready;
    for (int v = 0; v < p_; ++v)
        if (indeg[v] == 0) ready.push(v);
    topo_.reserve(p_);
    while (!ready.empty()) {
        int v = ready.front();
        ready.pop();
        topo_.push_back(v);
        for (int c : children_[v])
            if (--indeg[c] == 0) ready.push(c);
    }
    if (static_cast<int>(topo_.size()) != p_) throw std::invalid_argument("Dag: directed cycle");
}

bool Dag::has_edge(int u, int v) const {
    return std::binary_search(children_[u].begin(), children_[u].end(), v);
}

bool Dag::adjacent(int u, int v) const { return has_edge(u, v) || has_edge(v, u); }

bool is_polytree(const Dag& g) {
    const int p = g.vertex_count();
    if (static_cast<int>(g.edges().size()) != p - 1) return false;
    // Acyclic with p-1 edges; connectivity of the skeleton remains to check.
    std::vector<std::vector<int>> adj(p);
    for (const auto& [u, v] : g.edges()) {
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    std::vector<char> seen(p, 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    int reached = 1;
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        for (int w : adj[v])
            if (!seen[w]) {
                seen[w] = 1;
                ++reached;
                q.push(w);
            }
    }
    return reached == p;
}

Polytree::Polytree(Dag dag) : dag_(std::move(dag)) {
    if (!is_polytree(dag_)) throw std::invalid_argument("Polytree: skeleton is not a tree");
}

PartiallyDirectedGraph::PartiallyDirectedGraph(int vertex_count, std::vector<Edge> directed,
                                               std::vector<VertexPair> undirected)
    : p_(vertex_count), directed_(std::move(directed)), undirected_(std::move(undirected)) {
    if (p_ <= 0) throw std::invalid_argument("PartiallyDirectedGraph: vertex_count must be positive");
    for (auto& e : undirected_) e = canonical_pair(e.first, e.second);
    std::sort(directed_.begin(), directed_.end());
    std::sort(undirected_.begin(), undirected_.end());
    std::set<VertexPair> seen;
    auto check_pair = [&](int u, int v) {
        if (u < 0 || v < 0 || u >= p_ || v >= p_)
            throw std::invalid_argument("PartiallyDirectedGraph: vertex index out of range");
        if (u == v) throw std::invalid_argument("PartiallyDirectedGraph: self-loop");
        if (!seen.insert(canonical_pair(u, v)).second)
            throw std::invalid_argument("PartiallyDirectedGraph: duplicate edge between a vertex pair");
    };
    for (const auto& [u, v] : directed_) check_pair(u, v);
    for (const auto& [u, v] : undirected_) check_pair(u, v);
}

InterventionFamily::InterventionFamily(std::vector<std::vector<int>> targets)
    : targets_(std::move(targets)) {
    for (std::size_t i = 0; i < targets_.size(); ++i) {
        auto& t = targets_[i];
        std::sort(t.begin(), t.end());
        t.erase(std::unique(t.begin(), t.end()), t.end());
        for (int v : t)
            if (v < 0) throw std::invalid_argument("InterventionFamily: negative vertex index");
        if (t.empty() && obs_index_ < 0) obs_index_ = static_cast<int>(i);
    }
    if (obs_index_ < 0)
        throw std::invalid_argument("InterventionFamily: no observational (empty) target set");
}

bool InterventionFamily::intervenes(int env, int v) const {
    const auto& t = targets_[env];
    return std::binary_search(t.begin(), t.end(), v);
}

bool InterventionFamily::directly_identifiable(int u, int v) const {
    for (int e = 0; e < size(); ++e)
        if (intervenes(e, u) != intervenes(e, v)) return true;
    return false;
}

void InterventionFamily::validate_for(int vertex_count) const {
    for (const auto& t : targets_)
        for (int v : t)
            if (v >= vertex_count)
                throw std::invalid_argument("InterventionFamily: target index exceeds vertex count");
}

std::vector<VertexPair> skeleton(const Dag& g) {
    std::vector<VertexPair> out;
    out.reserve(g.edges().size());
    for (const auto& [u, v] : g.edges()) out.push_back(canonical_pair(u, v));
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<ColliderTriple> find_colliders(const Polytree& g) {
    return unshielded_colliders(g.dag());
}

std::vector<ColliderTriple> unshielded_colliders(const Dag& g) {
    std::vector<ColliderTriple> out;
    for (int v = 0; v < g.vertex_count(); ++v) {
        const auto& pa = g.parents(v);
        for (std::size_t i = 0; i < pa.size(); ++i)
            for (std::size_t j = i + 1; j < pa.size(); ++j)
                if (!g.adjacent(pa[i], pa[j])) out.emplace_back(pa[i], v, pa[j]);
    }
    std::sort(out.begin(), out.end());
    return out;
}

Dag i_dag(const Dag& g, const InterventionFamily& fam) {
    fam.validate_for(g.vertex_count());
    std::vector<Edge> edges = g.edges();
    int next = g.vertex_count();
    for (int e = 0; e < fam.size(); ++e) {
        if (fam.target(e).empty()) continue;
        for (int v : fam.target(e)) edges.emplace_back(next, v);
        ++next;
    }
    return Dag(next, std::move(edges));
}

bool i_mec_equal(const Dag& g1, const Dag& g2, const InterventionFamily& fam) {
    if (g1.vertex_count() != g2.vertex_count())
        throw std::invalid_argument("i_mec_equal: vertex counts differ");
    for (int i = 0; i < fam.size(); ++i) {
        // Family of pairwise unions anchored at target i, plus the empty set.
        std::set<std::vector<int>> pool;
        pool.insert(std::vector<int>{});
        for (int j = 0; j < fam.size(); ++j) {
            if (fam.target(j) == fam.target(i)) continue;
            std::vector<int> u;
            std::set_union(fam.target(i).begin(), fam.target(i).end(), fam.target(j).begin(),
                           fam.target(j).end(), std::back_inserter(u));
            pool.insert(std::move(u));
        }
        InterventionFamily anchored{std::vector<std::vector<int>>(pool.begin(), pool.end())};
        Dag d1 = i_dag(g1, anchored);
        Dag d2 = i_dag(g2, anchored);
        if (skeleton(d1) != skeleton(d2)) return false;
        if (unshielded_colliders(d1) != unshielded_colliders(d2)) return false;
    }
    return true;
}

PartiallyDirectedGraph i_cpdag(const Polytree& g, const InterventionFamily& fam) {
    const Dag& d = g.dag();
    fam.validate_for(d.vertex_count());
    const auto& edges = d.edges();
    const int m = static_cast<int>(edges.size());
    std::map<Edge, int> edge_index;
    for (int i = 0; i < m; ++i) edge_index[edges[i]] = i;

    std::vector<char> identifiable(m, 0);
    std::vector<int> work;
    for (int i = 0; i < m; ++i) {
        const auto& [u, v] = edges[i];
        if (d.parents(v).size() >= 2 || fam.directly_identifiable(u, v)) {
            identifiable[i] = 1;
            work.push_back(i);
        }
    }
    // Identifiability flows through a vertex: a known edge into u settles
    // every edge out of u.
    while (!work.empty()) {
        int i = work.back();
        work.pop_back();
        int u = edges[i].second;
        for (int x : d.children(u)) {
            int j = edge_index.at({u, x});
            if (!identifiable[j]) {
                identifiable[j] = 1;
                work.push_back(j);
            }
        }
    }

    std::vector<Edge> directed;
    std::vector<VertexPair> undirected;
    for (int i = 0; i < m; ++i) {
        if (identifiable[i])
            directed.push_back(edges[i]);
        else
            undirected.push_back(canonical_pair(edges[i].first, edges[i].second));
    }
    return PartiallyDirectedGraph(d.vertex_count(), std::move(directed), std::move(undirected));
}

namespace {
enum class Mark : std::uint8_t { forward, backward, undirected };
}

ShdResult shd_cpdag(const PartiallyDirectedGraph& a, const PartiallyDirectedGraph& b) {
    if (a.vertex_count() != b.vertex_count())
        throw std::invalid_argument("shd_cpdag: vertex counts differ");
    auto marks = [](const PartiallyDirectedGraph& g) {
        std::map<VertexPair, Mark> m;
        for (const auto& [u, v] : g.directed())
            m[canonical_pair(u, v)] = u < v ? Mark::forward : Mark::backward;
        for (const auto& e : g.undirected()) m[e] = Mark::undirected;
        return m;
    };
    const auto ma = marks(a);
    const auto mb = marks(b);
    ShdResult r;
    for (const auto& [pair, mark] : ma) {
        auto it = mb.find(pair);
        if (it == mb.end())
            ++r.deletions;
        else if (it->second != mark)
            ++r.reversals;
    }
    for (const auto& [pair, mark] : mb)
        if (!ma.count(pair)) ++r.additions;
    r.distance = r.additions + r.deletions + r.reversals;
    return r;
}

}  // namespace ptlearn
