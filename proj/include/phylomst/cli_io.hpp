#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "phylomst/cost_oracle.hpp"
#include "phylomst/geo_rw.hpp"
#include "phylomst/steiner_mst.hpp"
#include "phylomst/substitution.hpp"
#include "phylomst/synth.hpp"

namespace phylomst {

inline constexpr const char* k_version = PHYLOMST_VERSION;

// FASTA records become samples: the first word of the header is the id and
// sequences are upper-cased and checked against the model alphabet.
auto parse_fasta(std::istream& in, const std::string& source, const SiteModel& model) -> std::vector<Sample>;
auto parse_fasta(const std::filesystem::path& path, const SiteModel& model) -> std::vector<Sample>;

// "sample_id<TAB>node" lines.
auto parse_locations(std::istream& in, const std::string& source) -> std::map<std::string, NodeId>;
auto parse_locations(const std::filesystem::path& path) -> std::map<std::string, NodeId>;
// Every sample must be covered and every node must exist in the graph.
void attach_locations(std::vector<Sample>& samples, const std::map<std::string, NodeId>& locations, int node_count);

// "u<TAB>v<TAB>weight" lines; duplicate edges are summed.
auto parse_geo_graph(std::istream& in, const std::string& source) -> GeoGraph;
auto parse_geo_graph(const std::filesystem::path& path) -> GeoGraph;

// "gtr m", then m stationary frequencies, then the upper triangle of S, row by
// row, either with or without its zero diagonal.
auto parse_gtr_model(std::istream& in, const std::string& source) -> SiteModel;
auto parse_gtr_model(const std::filesystem::path& path) -> SiteModel;

void write_fasta(std::ostream& out, std::span<const Sample> samples);
void write_locations(std::ostream& out, std::span<const Sample> samples);
void write_geo_graph(std::ostream& out, const GeoGraph& graph);
auto truth_json(const TruthTree& truth) -> nlohmann::json;

// Every node is a labelled sample, so internal nodes carry ids too: "(B,C)A;".
auto to_newick(const PhyloTree& tree) -> std::string;

struct ModelSpec {
  std::string name = "jc69";  // binary | jc69 | gtr
  double mu = 1.0;
  std::optional<std::filesystem::path> gtr_file;
};

// Parses "binary", "jc69" or "gtr:FILE".
auto parse_model_arg(const std::string& arg, double mu) -> ModelSpec;
auto load_model(const ModelSpec& spec) -> SiteModel;

struct RunConfig {
  ModelSpec model;
  EdgeMode mode = EdgeMode::independent;
  double eps = 0.1;
  std::optional<std::string> root;
  std::filesystem::path fasta;
  std::optional<std::filesystem::path> locations;
  std::optional<std::filesystem::path> geo_graph;
  std::optional<std::filesystem::path> out_newick;
  std::optional<std::filesystem::path> out_edges;
  std::optional<std::filesystem::path> out_report;
  std::uint64_t seed = 0;
};

struct EpsLadder {
  double eps;
  double eps3;
  double eps2;
  double eps1;
  GeoBounds bounds;
};

// eps3 = min(eps / 8, -log B); eps2 = eps3 (-log B) / 2; eps1 = A eps2.
auto eps_ladder(double eps, const GeoBounds& bounds) -> EpsLadder;

struct RunResult {
  CostMatrix costs;
  PhyloTree tree;
  double total_weight = 0.0;
  double tree_cost_directed = 0.0;
  double tree_cost_symmetric = 0.0;
  std::optional<EpsLadder> ladder;
  std::string newick;
  std::string edges_tsv;
  nlohmann::json report;
};

// Parse inputs, build the cost matrix, run Kruskal, root, evaluate and write
// whichever outputs the config names.
auto run_pipeline(const RunConfig& config) -> RunResult;

// Same pipeline over in-memory samples.
auto infer_tree(const std::vector<Sample>& samples, const CostModel& model,
                const std::optional<std::string>& root = std::nullopt) -> RunResult;

}  // namespace phylomst
