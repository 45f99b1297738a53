#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "ptlearn/graph.hpp"
#include "ptlearn/synth.hpp"

using namespace ptlearn;

TEST_CASE("dag validation") {
    CHECK_THROWS_AS(Dag(0, {}), std::invalid_argument);
    CHECK_THROWS_AS(Dag(2, {{0, 0}}), std::invalid_argument);
    CHECK_THROWS_AS(Dag(2, {{0, 1}, {1, 0}}), std::invalid_argument);
    CHECK_THROWS_AS(Dag(2, {{0, 2}}), std::invalid_argument);
    CHECK_THROWS_AS(Dag(3, {{0, 1}, {1, 2}, {2, 0}}), std::invalid_argument);
    const Dag g(3, {{1, 2}, {0, 1}});
    CHECK(g.edges() == std::vector<Edge>{{0, 1}, {1, 2}});
    CHECK(g.has_edge(0, 1));
    CHECK_FALSE(g.has_edge(1, 0));
    CHECK(g.adjacent(1, 0));
}

TEST_CASE("skeleton erases orientation") {
    CHECK(skeleton(Dag(1, {})).empty());
    CHECK(skeleton(Dag(2, {{0, 1}})) == std::vector<VertexPair>{{0, 1}});
    const auto chain = skeleton(Dag(3, {{0, 1}, {1, 2}}));
    const auto fork = skeleton(Dag(3, {{1, 0}, {1, 2}}));
    CHECK(chain == fork);
    CHECK(chain == std::vector<VertexPair>{{0, 1}, {1, 2}});
}

TEST_CASE("find_colliders") {
    CHECK(find_colliders(Polytree(Dag(3, {{0, 1}, {2, 1}}))) ==
          std::vector<ColliderTriple>{{0, 1, 2}});
    CHECK(find_colliders(Polytree(Dag(3, {{0, 1}, {1, 2}}))).empty());
    // Star: three parents into the center, all parent pairs collide.
    const Polytree star(Dag(4, {{1, 0}, {2, 0}, {3, 0}}));
    std::vector<ColliderTriple> expected{{1, 0, 2}, {1, 0, 3}, {2, 0, 3}};
    CHECK(find_colliders(star) == expected);
    // Non-polytree input is rejected at the type boundary.
    CHECK_THROWS_AS(Polytree(Dag(3, {{0, 1}})), std::invalid_argument);
    CHECK_THROWS_AS(Polytree(Dag(3, {{0, 1}, {1, 2}, {0, 2}})), std::invalid_argument);
}

TEST_CASE("intervention family invariants") {
    CHECK_THROWS_AS(InterventionFamily({{0}}), std::invalid_argument);
    const InterventionFamily fam({{}, {1, 0, 1}});
    CHECK(fam.observational_index() == 0);
    CHECK(fam.target(1) == std::vector<int>{0, 1});  // sorted, deduplicated
    CHECK(fam.intervenes(1, 0));
    CHECK_FALSE(fam.intervenes(0, 0));
    CHECK_THROWS_AS(fam.validate_for(1), std::invalid_argument);
}

TEST_CASE("i_dag construction") {
    const Dag g(2, {{0, 1}});
    SUBCASE("no nonempty targets") {
        const Dag augmented = i_dag(g, InterventionFamily({{}}));
        CHECK(augmented == g);
    }
    SUBCASE("single target") {
        const Dag augmented = i_dag(g, InterventionFamily({{}, {1}}));
        CHECK(augmented.vertex_count() == 3);
        CHECK(augmented.edges() == std::vector<Edge>{{0, 1}, {2, 1}});
    }
    SUBCASE("counts follow the target sizes") {
        const Dag base(3, {{0, 1}});
        const Dag augmented = i_dag(base, InterventionFamily({{}, {0}, {0, 2}}));
        CHECK(augmented.vertex_count() == 3 + 2);
        CHECK(augmented.edges().size() == 1 + 1 + 2);
    }
}

TEST_CASE("i_dag counts on random families") {
    std::mt19937_64 rng(7);
    for (int rep = 0; rep < 30; ++rep) {
        const int p = 4 + static_cast<int>(rng() % 4);
        const Polytree g = random_polytree(p, rng());
        std::vector<std::vector<int>> targets{{}};
        int nonempty = 0;
        long edge_sum = 0;
        const int envs = 1 + static_cast<int>(rng() % 4);
        for (int e = 0; e < envs; ++e) {
            std::vector<int> t;
            for (int v = 0; v < p; ++v)
                if (rng() % 3 == 0) t.push_back(v);
            if (!t.empty()) {
                ++nonempty;
                edge_sum += static_cast<long>(t.size());
            }
            targets.push_back(t);
        }
        const Dag augmented = i_dag(g, InterventionFamily(targets));
        CHECK(augmented.vertex_count() == p + nonempty);
        CHECK(static_cast<long>(augmented.edges().size()) == static_cast<long>(p - 1) + edge_sum);
    }
}

TEST_CASE("i_mec_equal basics") {
    const Dag a(2, {{0, 1}});
    const Dag b(2, {{1, 0}});
    CHECK(i_mec_equal(a, a, InterventionFamily({{}, {0}})));
    CHECK(i_mec_equal(a, b, InterventionFamily({{}})));
    CHECK_FALSE(i_mec_equal(a, b, InterventionFamily({{}, {0}})));
}

TEST_CASE("i_cpdag examples") {
    SUBCASE("chain with no interventions stays undirected") {
        const auto g = i_cpdag(Polytree(Dag(3, {{0, 1}, {1, 2}})), InterventionFamily({{}}));
        CHECK(g.directed().empty());
        CHECK(g.undirected() == std::vector<VertexPair>{{0, 1}, {1, 2}});
    }
    SUBCASE("collider edges are directed") {
        const auto g = i_cpdag(Polytree(Dag(3, {{0, 1}, {2, 1}})), InterventionFamily({{}}));
        CHECK(g.directed() == std::vector<Edge>{{0, 1}, {2, 1}});
        CHECK(g.undirected().empty());
    }
    SUBCASE("single intervention can direct the whole tree") {
        // b -> a, b -> c, c -> d, e -> d with targets {} and {b}:
        // vertices a=0, b=1, c=2, d=3, e=4.
        const Polytree g(Dag(5, {{1, 0}, {1, 2}, {2, 3}, {4, 3}}));
        const auto cpdag = i_cpdag(g, InterventionFamily({{}, {1}}));
        CHECK(cpdag.undirected().empty());
        CHECK(cpdag.directed() == std::vector<Edge>{{1, 0}, {1, 2}, {2, 3}, {4, 3}});
    }
}

TEST_CASE("i_cpdag matches the brute-force class definition") {
    std::mt19937_64 rng(2024);
    int families_checked = 0;
    for (int rep = 0; rep < 60; ++rep) {
        const int p = 3 + static_cast<int>(rng() % 4);  // up to 6
        const Polytree g = random_polytree(p, rng());
        for (int f = 0; f < 3; ++f) {
            std::vector<std::vector<int>> targets{{}};
            const int extra = static_cast<int>(rng() % 3);
            for (int e = 0; e < extra; ++e) {
                std::vector<int> t;
                for (int v = 0; v < p; ++v)
                    if (rng() % 3 == 0) t.push_back(v);
                targets.push_back(t);
            }
            const InterventionFamily fam(targets);
            CHECK(i_cpdag(g, fam) == oracles::brute_force_icpdag(g, fam));
            ++families_checked;
        }
    }
    CHECK(families_checked >= 180);
}

TEST_CASE("i_cpdag output skeleton equals the input skeleton") {
    std::mt19937_64 rng(5);
    for (int rep = 0; rep < 20; ++rep) {
        const int p = 4 + static_cast<int>(rng() % 3);
        const Polytree g = random_polytree(p, rng());
        const InterventionFamily fam({{}, {static_cast<int>(rng() % p)}});
        const auto cpdag = i_cpdag(g, fam);
        auto edges = cpdag.undirected();
        for (const auto& [u, v] : cpdag.directed()) edges.push_back(canonical_pair(u, v));
        std::sort(edges.begin(), edges.end());
        CHECK(skeleton(g.dag()) == edges);
    }
}

TEST_CASE("shd_cpdag") {
    const PartiallyDirectedGraph a(2, {{0, 1}}, {});
    const PartiallyDirectedGraph b(2, {{1, 0}}, {});
    CHECK(shd_cpdag(a, a).distance == 0);
    CHECK(shd_cpdag(a, b).distance == 1);
    CHECK(shd_cpdag(a, b).reversals == 1);

    // Directed vs undirected on a shared pair also costs one.
    const PartiallyDirectedGraph c(2, {}, {{0, 1}});
    CHECK(shd_cpdag(a, c).distance == 1);

    CHECK_THROWS_AS(shd_cpdag(a, PartiallyDirectedGraph(3, {}, {})), std::invalid_argument);
}

TEST_CASE("shd_cpdag properties on random triples") {
    std::mt19937_64 rng(99);
    auto random_pdg = [&](int p) {
        std::vector<Edge> directed;
        std::vector<VertexPair> undirected;
        for (int u = 0; u < p; ++u)
            for (int v = u + 1; v < p; ++v) {
                switch (rng() % 4) {
                    case 0: directed.push_back({u, v}); break;
                    case 1: directed.push_back({v, u}); break;
                    case 2: undirected.push_back({u, v}); break;
                    default: break;
                }
            }
        return PartiallyDirectedGraph(p, std::move(directed), std::move(undirected));
    };
    for (int rep = 0; rep < 50; ++rep) {
        const int p = 3 + static_cast<int>(rng() % 5);
        const auto a = random_pdg(p), b = random_pdg(p), c = random_pdg(p);
        const auto ab = shd_cpdag(a, b), ba = shd_cpdag(b, a);
        CHECK(ab.distance == ba.distance);
        CHECK(ab.additions == ba.deletions);
        CHECK(shd_cpdag(a, a).distance == 0);
        CHECK(shd_cpdag(a, c).distance <= ab.distance + shd_cpdag(b, c).distance);
        CHECK(ab.additions + ab.deletions + ab.reversals == ab.distance);
    }
}
