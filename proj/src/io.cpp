#include "ptlearn/io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "ptlearn/errors.hpp"

namespace ptlearn {

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open file: " + path.string());
    return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write file: " + path.string());
    return out;
}

std::vector<std::string> split_ws(const std::string& line) {
    std::istringstream ss(line);
    std::vector<std::string> tokens;
    std::string t;
    while (ss >> t) tokens.push_back(t);
    return tokens;
}

}  // namespace

NamedGraph read_edge_list(const std::filesystem::path& path) {
    auto in = open_input(path);
    NamedGraph g;
    std::map<std::string, int> index;
    auto vertex = [&](const std::string& name) {
        auto it = index.find(name);
        if (it != index.end()) return it->second;
        const int id = static_cast<int>(g.names.size());
        g.names.push_back(name);
        index.emplace(name, id);
        return id;
    };

    std::string line;
    while (std::getline(in, line)) {
        if (auto pos = line.find('#'); pos != std::string::npos) {
            // An optional "# vertices: a b c" header pins the vertex order.
            auto tokens = split_ws(line.substr(pos + 1));
            if (!tokens.empty() && tokens[0] == "vertices:")
                for (std::size_t i = 1; i < tokens.size(); ++i) vertex(tokens[i]);
            line.erase(pos);
        }
        auto tokens = split_ws(line);
        if (tokens.empty()) continue;
        if (tokens.size() != 3 || (tokens[1] != "->" && tokens[1] != "--"))
            throw InputError("bad edge-list line in " + path.string() + ": " + line);
        const int u = vertex(tokens[0]);
        const int v = vertex(tokens[2]);
        if (tokens[1] == "->")
            g.directed.emplace_back(u, v);
        else
            g.undirected.push_back(canonical_pair(u, v));
    }
    if (g.names.empty()) throw InputError("edge list has no vertices: " + path.string());
    return g;
}

void write_edge_list(std::ostream& os, const std::vector<std::string>& names,
                     const PartiallyDirectedGraph& g) {
    if (static_cast<int>(names.size()) != g.vertex_count())
        throw InputError("write_edge_list: name table size mismatch");
    os << "# vertices:";
    for (const auto& n : names) os << ' ' << n;
    os << '\n';
    for (const auto& [u, v] : g.directed()) os << names[u] << " -> " << names[v] << '\n';
    for (const auto& [u, v] : g.undirected()) os << names[u] << " -- " << names[v] << '\n';
}

void write_edge_list_file(const std::filesystem::path& path, const std::vector<std::string>& names,
                          const PartiallyDirectedGraph& g) {
    auto out = open_output(path);
    write_edge_list(out, names, g);
}

void write_dot(std::ostream& os, const std::vector<std::string>& names,
               const PartiallyDirectedGraph& g) {
    os << "digraph estimate {\n";
    for (const auto& n : names) os << "  \"" << n << "\";\n";
    for (const auto& [u, v] : g.directed())
        os << "  \"" << names[u] << "\" -> \"" << names[v] << "\";\n";
    for (const auto& [u, v] : g.undirected())
        os << "  \"" << names[u] << "\" -> \"" << names[v] << "\" [dir=none];\n";
    os << "}\n";
}

CsvTable read_csv(const std::filesystem::path& path) {
    auto in = open_input(path);
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw InputError("empty CSV file: " + path.string());
    {
        std::stringstream header(line);
        std::string cell;
        while (std::getline(header, cell, ',')) {
            while (!cell.empty() && std::isspace(static_cast<unsigned char>(cell.back())))
                cell.pop_back();
            while (!cell.empty() && std::isspace(static_cast<unsigned char>(cell.front())))
                cell.erase(cell.begin());
            table.names.push_back(cell);
        }
    }
    const int p = static_cast<int>(table.names.size());
    if (p == 0) throw InputError("CSV header has no columns: " + path.string());

    std::vector<double> values;
    int rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        int cols = 0;
        while (std::getline(ss, cell, ',')) {
            const char* begin = cell.c_str();
            char* end = nullptr;
            const double x = std::strtod(begin, &end);
            while (end && *end != '\0' && std::isspace(static_cast<unsigned char>(*end))) ++end;
            if (end == begin || (end && *end != '\0'))
                throw InputError("malformed CSV value '" + cell + "' in " + path.string());
            values.push_back(x);
            ++cols;
        }
        if (cols != p)
            throw InputError("CSV row with " + std::to_string(cols) + " cells, expected " +
                             std::to_string(p) + " in " + path.string());
        ++rows;
    }
    table.data.rows = rows;
    table.data.cols = p;
    table.data.values = std::move(values);
    return table;
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& names,
               const DataMatrix& data) {
    if (static_cast<int>(names.size()) != data.cols)
        throw InputError("write_csv: name table size mismatch");
    auto out = open_output(path);
    char buffer[64];
    for (std::size_t i = 0; i < names.size(); ++i)
        out << (i ? "," : "") << names[i];
    out << '\n';
    for (int r = 0; r < data.rows; ++r) {
        for (int c = 0; c < data.cols; ++c) {
            std::snprintf(buffer, sizeof buffer, "%.10g", data.at(r, c));
            out << (c ? "," : "") << buffer;
        }
        out << '\n';
    }
}

InterventionFamily read_intervention_family(const std::filesystem::path& path) {
    auto in = open_input(path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InputError("bad intervention manifest " + path.string() + ": " + e.what());
    }
    if (!j.is_array()) throw InputError("intervention manifest must be a JSON array");
    std::vector<std::vector<int>> targets;
    for (const auto& entry : j) {
        if (!entry.is_array()) throw InputError("intervention manifest entries must be arrays");
        targets.push_back(entry.get<std::vector<int>>());
    }
    return InterventionFamily(std::move(targets));
}

void write_intervention_family(const std::filesystem::path& path, const InterventionFamily& fam) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& t : fam.targets()) j.push_back(t);
    open_output(path) << j.dump(2) << '\n';
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
    auto in = open_input(path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InputError("bad manifest " + path.string() + ": " + e.what());
    }
    DatasetManifest m;
    try {
        m.vertex_names = j.at("vertices").get<std::vector<std::string>>();
        for (const auto& env : j.at("environments")) {
            ManifestEnv e;
            e.data_path = env.at("data").get<std::string>();
            e.targets = env.at("targets").get<std::vector<int>>();
            e.samples = env.at("samples").get<int>();
            m.environments.push_back(std::move(e));
        }
    } catch (const nlohmann::json::exception& e) {
        throw InputError("bad manifest " + path.string() + ": " + e.what());
    }
    if (m.vertex_names.empty()) throw InputError("manifest has no vertices");
    const int p = static_cast<int>(m.vertex_names.size());
    int observational = 0;
    for (const auto& env : m.environments) {
        if (env.targets.empty()) ++observational;
        if (env.samples <= 0) throw InputError("manifest declares a non-positive sample size");
        for (int t : env.targets)
            if (t < 0 || t >= p) throw InputError("manifest target index out of range");
    }
    if (observational != 1)
        throw InputError("manifest must contain exactly one observational environment "
                         "(empty target list), found " +
                         std::to_string(observational));
    return m;
}

void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest) {
    nlohmann::json j;
    j["vertices"] = manifest.vertex_names;
    j["environments"] = nlohmann::json::array();
    for (const auto& env : manifest.environments)
        j["environments"].push_back(
            {{"data", env.data_path}, {"targets", env.targets}, {"samples", env.samples}});
    open_output(path) << j.dump(2) << '\n';
}

LoadedDataset load_dataset(const DatasetManifest& manifest, const std::filesystem::path& base_dir) {
    std::vector<DataMatrix> data;
    std::vector<std::vector<int>> targets;
    for (const auto& env : manifest.environments) {
        CsvTable table = read_csv(base_dir / env.data_path);
        if (table.names != manifest.vertex_names)
            throw InputError("CSV columns of " + env.data_path +
                             " do not match the manifest vertex table");
        if (table.data.rows != env.samples)
            throw InputError("environment " + env.data_path + " has " +
                             std::to_string(table.data.rows) + " rows, manifest declares " +
                             std::to_string(env.samples));
        data.push_back(std::move(table.data));
        targets.push_back(env.targets);
    }
    return {manifest.vertex_names, std::move(data), InterventionFamily(std::move(targets))};
}

}  // namespace ptlearn
