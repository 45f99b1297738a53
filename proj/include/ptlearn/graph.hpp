#pragma once

#include <cstdint>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace ptlearn {

// Directed edge u -> v.
using Edge = std::pair<int, int>;
// Unordered vertex pair, canonicalized so that first < second.
using VertexPair = std::pair<int, int>;

inline VertexPair canonical_pair(int u, int v) { return u < v ? VertexPair{u, v} : VertexPair{v, u}; }

// Collider triple u -> v <- w, canonicalized with u < w.
using ColliderTriple = std::tuple<int, int, int>;

// Immutable directed acyclic graph over vertices 0..p-1.
class Dag {
public:
    Dag(int vertex_count, std::vector<Edge> edges);

    int vertex_count() const { return p_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<int>& parents(int v) const { return parents_[v]; }
    const std::vector<int>& children(int v) const { return children_[v]; }
    const std::vector<int>& topological_order() const { return topo_; }

    bool has_edge(int u, int v) const;
    bool adjacent(int u, int v) const;

    bool operator==(const Dag& other) const {
        return p_ == other.p_ && edges_ == other.edges_;
    }

private:
    int p_ = 0;
    std::vector<Edge> edges_;  // sorted ascending
    std::vector<std::vector<int>> parents_, children_;
    std::vector<int> topo_;
};

// A DAG whose skeleton is a tree (connected, p-1 edges).
class Polytree {
public:
    explicit Polytree(Dag dag);

    const Dag& dag() const { return dag_; }
    operator const Dag&() const { return dag_; }
    int vertex_count() const { return dag_.vertex_count(); }

private:
    Dag dag_;
};

bool is_polytree(const Dag& g);

// Mixed graph: directed plus undirected edges, at most one edge per pair.
class PartiallyDirectedGraph {
public:
    PartiallyDirectedGraph(int vertex_count, std::vector<Edge> directed,
                           std::vector<VertexPair> undirected);

    int vertex_count() const { return p_; }
    const std::vector<Edge>& directed() const { return directed_; }
    const std::vector<VertexPair>& undirected() const { return undirected_; }

    bool operator==(const PartiallyDirectedGraph& other) const {
        return p_ == other.p_ && directed_ == other.directed_ && undirected_ == other.undirected_;
    }

private:
    int p_ = 0;
    std::vector<Edge> directed_;          // sorted
    std::vector<VertexPair> undirected_;  // canonical, sorted
};

// Ordered list of intervention targets, one per environment. Targets are
// kept sorted and deduplicated; the family must contain an empty set.
class InterventionFamily {
public:
    explicit InterventionFamily(std::vector<std::vector<int>> targets);
    InterventionFamily(std::initializer_list<std::vector<int>> targets)
        : InterventionFamily(std::vector<std::vector<int>>(targets)) {}

    int size() const { return static_cast<int>(targets_.size()); }
    const std::vector<int>& target(int env) const { return targets_[env]; }
    const std::vector<std::vector<int>>& targets() const { return targets_; }

    int observational_index() const { return obs_index_; }
    bool intervenes(int env, int v) const;

    // Environments I with |I ∩ {u,v}| == 1 exist.
    bool directly_identifiable(int u, int v) const;

    // Throws if a target index is out of [0, vertex_count).
    void validate_for(int vertex_count) const;

private:
    std::vector<std::vector<int>> targets_;
    int obs_index_ = -1;
};

struct ShdResult {
    int distance = 0;
    int additions = 0;  // pairs present only in the second graph
    int deletions = 0;  // pairs present only in the first graph
    int reversals = 0;  // shared pairs whose mark differs
};

std::vector<VertexPair> skeleton(const Dag& g);

// All triples u -> v <- w with u < w. Rejects non-polytree input by contract.
std::vector<ColliderTriple> find_colliders(const Polytree& g);

// Colliders u -> v <- w with u, w non-adjacent, for general DAGs.
std::vector<ColliderTriple> unshielded_colliders(const Dag& g);

// Augments g with one vertex per nonempty target (indices p, p+1, ...) and
// edges from it into the target's members.
Dag i_dag(const Dag& g, const InterventionFamily& fam);

// True iff g1, g2 generate the same interventional Markov equivalence class.
bool i_mec_equal(const Dag& g1, const Dag& g2, const InterventionFamily& fam);

// Mixed-graph representative of the interventional equivalence class of g:
// an edge is directed iff its orientation is shared by every class member.
PartiallyDirectedGraph i_cpdag(const Polytree& g, const InterventionFamily& fam);

// Structural Hamming distance between mixed graphs on the same vertex set.
ShdResult shd_cpdag(const PartiallyDirectedGraph& a, const PartiallyDirectedGraph& b);

}  // namespace ptlearn
