#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "phylomst/geo_rw.hpp"
#include "phylomst/substitution.hpp"

namespace phylomst {

struct Sample {
  std::string id;
  std::string sequence;
  std::optional<NodeId> location;
};

enum class EdgeMode {
  independent,  // sequence block and location coordinate each take their own supremum over time
  shared_t      // one integer time shared by every coordinate
};

enum class GeoPrecision {
  estimated,   // E3 estimator at tolerance eps3
  exact_scan   // walk scanned until the tail is certified to ~1e-13 relative
};

struct Geography {
  std::shared_ptr<const RandomWalk> walk;
  GeoBounds bounds{};
  double eps3 = 0.0125;
  GeoPrecision precision = GeoPrecision::estimated;
};

// Builds the walk, derives A and B, and uses eps3 as given.
auto make_geography(GeoGraph graph, double eps3, GeoPrecision precision = GeoPrecision::estimated) -> Geography;

struct CostModel {
  SiteModel site;
  std::optional<Geography> geo;
  EdgeMode mode = EdgeMode::independent;
};

// A sample encoded against a model: symbol indices plus the location node.
struct Label {
  std::vector<Symbol> states;
  std::optional<NodeId> location;
};

auto encode(const Sample& sample, const CostModel& model) -> Label;

struct EdgeCost {
  double phi;            // -log of the supremum transition probability, natural log
  double t_star;         // maximizing duration of the sequence block (shared_t: the shared integer time)
  double sequence_part;
  double geo_part;
};

auto node_cost(const Label& label, const CostModel& model) -> double;
auto node_cost(const Sample& sample, const CostModel& model) -> double;

auto edge_cost(const Label& u, const Label& v, const CostModel& model) -> EdgeCost;
auto edge_cost(const Sample& u, const Sample& v, const CostModel& model) -> EdgeCost;

// w(u, v) = phi(u, v) - phi(v).
inline auto mst_weight(double phi_uv, double phi_v) -> double { return phi_uv - phi_v; }

// w'(u, v) = (phi(u, v) + phi(v, u) - phi(u) - phi(v)) / 2.
inline auto symmetric_weight(double phi_uv, double phi_vu, double phi_u, double phi_v) -> double {
  return 0.5 * (phi_uv + phi_vu - phi_u - phi_v);
}

// Node and directed edge costs over a fixed, indexed label set.
class CostOracle {
 public:
  virtual ~CostOracle() = default;

  virtual auto size() const -> std::size_t = 0;
  virtual auto node_cost(std::size_t v) const -> double = 0;
  virtual auto edge_cost(std::size_t u, std::size_t v) const -> double = 0;

  auto symmetric_weight(std::size_t u, std::size_t v) const -> double;
};

class SampleCostOracle final : public CostOracle {
 public:
  SampleCostOracle(std::span<const Sample> samples, CostModel model);

  auto size() const -> std::size_t override { return labels_.size(); }
  auto node_cost(std::size_t v) const -> double override { return node_costs_.at(v); }
  auto edge_cost(std::size_t u, std::size_t v) const -> double override;
  auto edge_details(std::size_t u, std::size_t v) const -> EdgeCost;

  auto model() const -> const CostModel& { return model_; }
  auto label(std::size_t v) const -> const Label& { return labels_.at(v); }

 private:
  CostModel model_;
  std::vector<Label> labels_;
  std::vector<double> node_costs_;
};

// Precomputed node costs and a full k x k directed cost table.
class TableCostOracle final : public CostOracle {
 public:
  TableCostOracle(std::vector<double> node_costs, std::vector<double> phi);
  static auto tabulate(const CostOracle& source) -> TableCostOracle;

  auto size() const -> std::size_t override { return node_costs_.size(); }
  auto node_cost(std::size_t v) const -> double override { return node_costs_.at(v); }
  auto edge_cost(std::size_t u, std::size_t v) const -> double override;

 private:
  std::vector<double> node_costs_;
  std::vector<double> phi_;
};

// Complete graph over the samples with MST weights w(u, v) = phi(u, v) - phi(v).
struct CostMatrix {
  std::vector<std::string> ids;
  std::vector<double> node_costs;
  std::vector<double> weights;         // k x k, symmetric; diagonal unused (zero)
  std::vector<EdgeCost> diagnostics;   // k x k; entry (i, j), i < j, describes orientation i -> j

  auto size() const -> std::size_t { return ids.size(); }
  auto weight(std::size_t u, std::size_t v) const -> double { return weights[u * size() + v]; }
  auto diagnostic(std::size_t u, std::size_t v) const -> const EdgeCost& {
    return u < v ? diagnostics[u * size() + v] : diagnostics[v * size() + u];
  }
};

// Each pair is evaluated in one orientation and mirrored. Failures name the pair.
auto build_cost_matrix(std::span<const Sample> samples, const CostModel& model) -> CostMatrix;

// Checks the sample set against the model: >= 2 samples, unique ids, equal lengths,
// and locations present on all samples exactly when the model has a geography.
void validate_samples(std::span<const Sample> samples, const CostModel& model, std::size_t min_count = 2);

}  // namespace phylomst
