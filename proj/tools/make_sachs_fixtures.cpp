// Regenerates the pinned protein-network fixtures under data/sachs/.
//
// The consensus interventional CPDAG and the reference estimate are fixed
// graphs; the environment CSVs are a seeded linear-SEM surrogate over the
// consensus network with the conventional six-environment split (the raw
// measurements are not redistributable). See data/sachs/README.md.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "ptlearn/graph.hpp"
#include "ptlearn/io.hpp"
#include "ptlearn/synth.hpp"

using namespace ptlearn;
namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kNodes = {"praf", "pmek",     "p44/42", "plcg",
                                         "PIP2", "PIP3",     "pakts473", "PKA",
                                         "PKC",  "P38",      "pjnk"};

int id(const std::string& name) {
    for (std::size_t i = 0; i < kNodes.size(); ++i)
        if (kNodes[i] == name) return static_cast<int>(i);
    throw std::runtime_error("unknown node " + name);
}

// Consensus I-CPDAG: 14 directed edges plus the PKA-PKC and PKA-pjnk
// feedback pairs kept undirected.
PartiallyDirectedGraph consensus_icpdag() {
    std::vector<Edge> directed;
    for (const auto& [a, b] : std::vector<std::pair<std::string, std::string>>{
             {"praf", "pmek"},     {"pmek", "p44/42"},   {"plcg", "PIP2"},
             {"plcg", "PIP3"},     {"PIP2", "PKC"},      {"PIP3", "PIP2"},
             {"PIP3", "pakts473"}, {"p44/42", "pakts473"}, {"PKA", "praf"},
             {"PKA", "pmek"},      {"PKA", "p44/42"},    {"PKA", "pakts473"},
             {"PKA", "P38"},       {"pjnk", "PKC"}})
        directed.push_back({id(a), id(b)});
    std::vector<VertexPair> undirected{canonical_pair(id("PKA"), id("PKC")),
                                       canonical_pair(id("PKA"), id("pjnk"))};
    return PartiallyDirectedGraph(static_cast<int>(kNodes.size()), std::move(directed),
                                  std::move(undirected));
}

// The estimate reported alongside the consensus: eight directed edges and
// one undirected.
PartiallyDirectedGraph published_estimate() {
    std::vector<Edge> directed;
    for (const auto& [a, b] : std::vector<std::pair<std::string, std::string>>{
             {"praf", "pmek"}, {"PIP2", "pmek"}, {"PIP2", "plcg"},
             {"PIP3", "PIP2"}, {"p44/42", "pakts473"}, {"pakts473", "PKA"},
             {"PKA", "pmek"}, {"P38", "PKC"}})
        directed.push_back({id(a), id(b)});
    std::vector<VertexPair> undirected{canonical_pair(id("P38"), id("pjnk"))};
    return PartiallyDirectedGraph(static_cast<int>(kNodes.size()), std::move(directed),
                                  std::move(undirected));
}

// Generating DAG for the surrogate data: the consensus with the two
// feedback pairs oriented into PKA.
Dag consensus_dag() {
    std::vector<Edge> edges;
    for (const auto& [a, b] : std::vector<std::pair<std::string, std::string>>{
             {"praf", "pmek"},     {"pmek", "p44/42"},   {"plcg", "PIP2"},
             {"plcg", "PIP3"},     {"PIP2", "PKC"},      {"PIP3", "PIP2"},
             {"PIP3", "pakts473"}, {"p44/42", "pakts473"}, {"PKA", "praf"},
             {"PKA", "pmek"},      {"PKA", "p44/42"},    {"PKA", "pakts473"},
             {"PKA", "P38"},       {"pjnk", "PKC"},      {"PKC", "PKA"},
             {"pjnk", "PKA"}})
        edges.push_back({id(a), id(b)});
    return Dag(static_cast<int>(kNodes.size()), std::move(edges));
}

}  // namespace

int main(int argc, char** argv) {
    const fs::path out_dir = argc > 1 ? argv[1] : "data/sachs";
    const std::uint64_t seed = argc > 2 ? std::stoull(argv[2]) : 1;
    fs::create_directories(out_dir);

    write_edge_list_file(out_dir / "consensus_icpdag.edges.txt", kNodes, consensus_icpdag());
    write_edge_list_file(out_dir / "published_estimate.edges.txt", kNodes, published_estimate());

    const Dag g = consensus_dag();
    // One observational plus five one-node interventional environments, with
    // the conventional split of the 5846 samples.
    const InterventionFamily fam({{},
                                  {id("pakts473")},
                                  {id("PKC")},
                                  {id("PIP2")},
                                  {id("pmek")},
                                  {id("PIP3")}});
    const std::vector<int> sizes{1755, 911, 723, 810, 799, 848};
    const SemParams params = draw_params(g, fam, InterventionKind::perfect, seed);
    const auto data = sample(g, params, sizes, split_seed(seed, 0x73616368));

    DatasetManifest manifest;
    manifest.vertex_names = kNodes;
    for (int e = 0; e < fam.size(); ++e) {
        const std::string file = "env_" + std::to_string(e) + ".csv";
        write_csv(out_dir / file, kNodes, data[e]);
        manifest.environments.push_back({file, fam.target(e), sizes[e]});
    }
    write_manifest(out_dir / "manifest.json", manifest);
    std::cout << "fixtures written to " << out_dir.string() << " (seed " << seed << ")\n";
    return 0;
}
