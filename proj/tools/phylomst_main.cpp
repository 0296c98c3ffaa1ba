// phylomst: minimum-spanning-tree inference of ancestral maximum-likelihood and
// phylogeography trees, plus a simulator for ground-truth inputs.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "phylomst/cli_io.hpp"
#include "phylomst/errors.hpp"
#include "phylomst/synth.hpp"

namespace {

using namespace phylomst;

struct SimulateOptions {
  int k = 8;
  int sites = 100;
  std::string model = "jc69";
  double mu = 1.0;
  std::optional<std::string> geo_graph;
  double duration_lo = 0.1;
  double duration_hi = 1.0;
  std::uint64_t seed = 1;
  std::string out_fasta;
  std::optional<std::string> out_locations;
  std::optional<std::string> out_truth;
};

auto write_file(const std::string& path) -> std::ofstream {
  auto out = std::ofstream{path, std::ios::binary};
  if (!out) fail(ErrorKind::parse, "cannot write '" + path + "'");
  return out;
}

auto run_simulate(const SimulateOptions& opts) -> int {
  const auto model = load_model(parse_model_arg(opts.model, opts.mu));
  auto walk = std::optional<RandomWalk>{};
  if (opts.geo_graph) walk.emplace(parse_geo_graph(std::filesystem::path{*opts.geo_graph}));
  const auto sim = simulate(opts.k, opts.sites, model, walk ? &*walk : nullptr,
                            {opts.duration_lo, opts.duration_hi}, opts.seed);
  {
    auto out = write_file(opts.out_fasta);
    write_fasta(out, sim.leaves);
  }
  if (opts.out_locations) {
    if (!walk) fail(ErrorKind::parse, "--out-locations needs --geo-graph");
    auto out = write_file(*opts.out_locations);
    write_locations(out, sim.leaves);
  }
  if (opts.out_truth) {
    auto out = write_file(*opts.out_truth);
    out << truth_json(sim.truth).dump(2) << '\n';
  }
  return 0;
}

auto run_infer(const RunConfig& config, bool print_newick) -> int {
  const auto result = run_pipeline(config);
  if (print_newick) std::cout << result.newick << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  auto app = CLI::App{"Approximate ancestral maximum-likelihood and phylogeography trees via minimum spanning trees"};
  app.require_subcommand(0, 1);

  auto config = RunConfig{};
  auto fasta = std::string{};
  auto model_arg = std::string{"jc69"};
  auto mu = 1.0;
  auto mode = std::string{"independent"};
  auto locations = std::string{};
  auto geo_graph = std::string{};
  auto root = std::string{};
  auto out_newick = std::string{};
  auto out_edges = std::string{};
  auto out_report = std::string{};

  app.add_option("--fasta", fasta, "Aligned input sequences (FASTA)");
  app.add_option("--model", model_arg, "Substitution model: binary, jc69 or gtr:FILE")->capture_default_str();
  app.add_option("--mu", mu, "Substitution rate for binary and jc69")->capture_default_str();
  app.add_option("--locations", locations, "Sample locations (TSV: sample_id, node)");
  app.add_option("--geo-graph", geo_graph, "Geography graph (TSV: u, v, weight)");
  app.add_option("--mode", mode, "Edge cost mode")->check(CLI::IsMember({"independent", "shared-t"}))->capture_default_str();
  app.add_option("--eps", config.eps, "Phylogeography approximation slack, in (0, 1)")->capture_default_str();
  app.add_option("--root", root, "Root sample id (default: smallest id)");
  app.add_option("--out-newick", out_newick, "Write the tree in Newick format (default: stdout)");
  app.add_option("--out-edges", out_edges, "Write tree edges as TSV");
  app.add_option("--out-report", out_report, "Write the JSON run report");
  app.add_option("--seed", config.seed, "Seed recorded in the report")->capture_default_str();

  auto sim = SimulateOptions{};
  auto* simulate_cmd = app.add_subcommand("simulate", "Simulate leaves along a random tree");
  simulate_cmd->add_option("--k", sim.k, "Number of leaves")->capture_default_str();
  simulate_cmd->add_option("--n", sim.sites, "Sequence length")->capture_default_str();
  simulate_cmd->add_option("--model", sim.model, "binary, jc69 or gtr:FILE")->capture_default_str();
  simulate_cmd->add_option("--mu", sim.mu, "Substitution rate for binary and jc69")->capture_default_str();
  simulate_cmd->add_option("--geo-graph", sim.geo_graph, "Geography graph; leaves get locations when given");
  simulate_cmd->add_option("--duration-min", sim.duration_lo, "Smallest edge duration")->capture_default_str();
  simulate_cmd->add_option("--duration-max", sim.duration_hi, "Largest edge duration")->capture_default_str();
  simulate_cmd->add_option("--seed", sim.seed, "Random seed")->capture_default_str();
  simulate_cmd->add_option("--out-fasta", sim.out_fasta, "Leaf sequences (FASTA)")->required();
  simulate_cmd->add_option("--out-locations", sim.out_locations, "Leaf locations (TSV)");
  simulate_cmd->add_option("--out-truth", sim.out_truth, "Ground-truth tree (JSON)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    if (*simulate_cmd) return run_simulate(sim);

    if (fasta.empty()) {
      std::cerr << "error: --fasta is required\n";
      return 1;
    }
    config.fasta = fasta;
    config.model = parse_model_arg(model_arg, mu);
    config.mode = mode == "shared-t" ? EdgeMode::shared_t : EdgeMode::independent;
    if (!locations.empty()) config.locations = locations;
    if (!geo_graph.empty()) config.geo_graph = geo_graph;
    if (!root.empty()) config.root = root;
    if (!out_newick.empty()) config.out_newick = out_newick;
    if (!out_edges.empty()) config.out_edges = out_edges;
    if (!out_report.empty()) config.out_report = out_report;
    return run_infer(config, out_newick.empty());
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
