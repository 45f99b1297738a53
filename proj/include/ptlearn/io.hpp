#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "ptlearn/graph.hpp"
#include "ptlearn/synth.hpp"

namespace ptlearn {

// Mixed graph with a vertex name table, the on-disk form of estimates and
// ground truths: one `u -> v` or `u -- v` line per edge.
struct NamedGraph {
    std::vector<std::string> names;
    std::vector<Edge> directed;
    std::vector<VertexPair> undirected;

    PartiallyDirectedGraph to_graph() const {
        return PartiallyDirectedGraph(static_cast<int>(names.size()), directed, undirected);
    }
};

NamedGraph read_edge_list(const std::filesystem::path& path);
void write_edge_list(std::ostream& os, const std::vector<std::string>& names,
                     const PartiallyDirectedGraph& g);
void write_edge_list_file(const std::filesystem::path& path, const std::vector<std::string>& names,
                          const PartiallyDirectedGraph& g);

void write_dot(std::ostream& os, const std::vector<std::string>& names,
               const PartiallyDirectedGraph& g);

struct CsvTable {
    std::vector<std::string> names;
    DataMatrix data;
};

CsvTable read_csv(const std::filesystem::path& path);
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& names,
               const DataMatrix& data);

// Bare intervention manifest: a JSON array of integer arrays.
InterventionFamily read_intervention_family(const std::filesystem::path& path);
void write_intervention_family(const std::filesystem::path& path, const InterventionFamily& fam);

struct ManifestEnv {
    std::string data_path;
    std::vector<int> targets;
    int samples = 0;
};

struct DatasetManifest {
    std::vector<std::string> vertex_names;
    std::vector<ManifestEnv> environments;
};

// Validates the manifest invariants: exactly one observational environment,
// positive declared sizes, target indices within range.
DatasetManifest read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);

struct LoadedDataset {
    std::vector<std::string> names;
    std::vector<DataMatrix> data;
    InterventionFamily fam;
};

// Reads every environment CSV (paths relative to the manifest directory) and
// cross-checks column names, column counts and declared sample sizes.
LoadedDataset load_dataset(const DatasetManifest& manifest, const std::filesystem::path& base_dir);

}  // namespace ptlearn
