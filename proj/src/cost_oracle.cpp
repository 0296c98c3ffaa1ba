#include "phylomst/cost_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "phylomst/errors.hpp"

namespace phylomst {

namespace {

// Relative precision of the stationary-product tail in shared_t mode.
constexpr auto k_shared_tail_tol = 1e-12;
constexpr auto k_max_shared_horizon = 10'000'000;

auto sequence_cutoff(const SiteModel& site, std::int64_t sites, double tol) -> int {
  if (sites == 0) return 1;
  // |P^t(a,b) / pi_b - 1| <= exp(-rate t) / min pi per site, so the product over
  // n sites stays within exp(tol) of the stationary product once
  // n exp(-rate t) / min pi <= tol.
  const auto& pi = site.stationary();
  const auto min_pi = *std::min_element(pi.begin(), pi.end());
  const auto t = std::log(static_cast<double>(sites) / (min_pi * tol)) / site.relaxation_rate();
  if (!(t < k_max_shared_horizon)) {
    fail(ErrorKind::domain, "substitution rate too small for the shared-time scan horizon");
  }
  return std::max(1, static_cast<int>(std::ceil(t)));
}

auto shared_edge_cost(const Label& u, const Label& v, const CostModel& model, const CountMatrix& counts) -> EdgeCost {
  const auto& walk = *model.geo->walk;
  const auto& site = model.site;
  const auto t_walk = pair_cutoff(walk, *u.location, *v.location, k_shared_tail_tol);
  const auto t_seq = sequence_cutoff(site, counts.total, k_shared_tail_tol);
  const auto horizon = std::max(t_walk, t_seq);
  if (horizon > k_max_shared_horizon) fail(ErrorKind::domain, "shared-time scan horizon too large");

  const auto walk_probs = walk.scan(*u.location, *v.location, horizon);
  auto best = -std::numeric_limits<double>::infinity();
  auto best_t = 1;
  auto best_seq = 0.0;
  for (auto t = 1; t <= horizon; ++t) {
    const auto seq = counts.total > 0 ? sequence_log_likelihood(site, counts, t) : 0.0;
    const auto value = std::log(walk_probs[t - 1]) + seq;
    if (value > best) {
      best = value;
      best_t = t;
      best_seq = seq;
    }
  }

  auto tail_seq = 0.0;
  for (auto a = 0; a < counts.states; ++a) {
    for (auto b = 0; b < counts.states; ++b) {
      if (counts.at(a, b) > 0) tail_seq += static_cast<double>(counts.at(a, b)) * std::log(site.stationary()[b]);
    }
  }
  const auto tail = std::log(walk.stationary(*v.location)) + tail_seq;
  if (tail >= best) return {-tail, k_infinite_time, -tail_seq, -(tail - tail_seq)};
  return {-best, static_cast<double>(best_t), -best_seq, -(best - best_seq)};
}

}  // namespace

auto make_geography(GeoGraph graph, double eps3, GeoPrecision precision) -> Geography {
  auto walk = std::make_shared<const RandomWalk>(std::move(graph));
  const auto bounds = derive_bounds(*walk);
  return {std::move(walk), bounds, eps3, precision};
}

auto encode(const Sample& sample, const CostModel& model) -> Label {
  auto label = Label{};
  try {
    label.states = model.site.encode(sample.sequence);
  } catch (const Error& e) {
    fail(e.kind(), fmt::format("sample '{}': {}", sample.id, e.what()));
  }
  if (model.geo) {
    if (!sample.location) fail(ErrorKind::domain, fmt::format("sample '{}' has no location", sample.id));
    if (*sample.location < 0 || *sample.location >= model.geo->walk->node_count()) {
      fail(ErrorKind::structural,
           fmt::format("sample '{}' location {} is not a graph node", sample.id, *sample.location));
    }
    label.location = sample.location;
  }
  return label;
}

auto node_cost(const Label& label, const CostModel& model) -> double {
  const auto& pi = model.site.stationary();
  auto cost = 0.0;
  for (auto s : label.states) {
    if (s >= pi.size()) fail(ErrorKind::domain, "symbol index outside alphabet");
    cost -= std::log(pi[s]);
  }
  if (model.geo && label.location) cost -= std::log(model.geo->walk->stationary(*label.location));
  return cost;
}

auto node_cost(const Sample& sample, const CostModel& model) -> double {
  return node_cost(encode(sample, model), model);
}

auto edge_cost(const Label& u, const Label& v, const CostModel& model) -> EdgeCost {
  const auto counts = count_pairs(model.site.states(), u.states, v.states);
  const auto with_geo = model.geo && u.location && v.location;

  if (with_geo && model.mode == EdgeMode::shared_t) return shared_edge_cost(u, v, model, counts);

  auto result = EdgeCost{0.0, 0.0, 0.0, 0.0};
  if (counts.total > 0) {
    const auto seq = sup_seq_loglik(model.site, counts);
    result.t_star = seq.t_star;
    result.sequence_part = seq.cost;
  }
  if (with_geo) {
    const auto& geo = *model.geo;
    result.geo_part = geo.precision == GeoPrecision::exact_scan
                          ? neg_log_sup_rw_scan(*geo.walk, *u.location, *v.location)
                          : neg_log_sup_rw(*geo.walk, *u.location, *v.location, geo.eps3, geo.bounds);
  }
  result.phi = result.sequence_part + result.geo_part;
  return result;
}

auto edge_cost(const Sample& u, const Sample& v, const CostModel& model) -> EdgeCost {
  if (u.sequence.size() != v.sequence.size()) {
    fail(ErrorKind::domain, fmt::format("samples '{}' and '{}' have different lengths ({} vs {})", u.id, v.id,
                                        u.sequence.size(), v.sequence.size()));
  }
  return edge_cost(encode(u, model), encode(v, model), model);
}

auto CostOracle::symmetric_weight(std::size_t u, std::size_t v) const -> double {
  return phylomst::symmetric_weight(edge_cost(u, v), edge_cost(v, u), node_cost(u), node_cost(v));
}

SampleCostOracle::SampleCostOracle(std::span<const Sample> samples, CostModel model) : model_(std::move(model)) {
  validate_samples(samples, model_, 1);
  labels_.reserve(samples.size());
  node_costs_.reserve(samples.size());
  for (const auto& s : samples) {
    labels_.push_back(encode(s, model_));
    node_costs_.push_back(phylomst::node_cost(labels_.back(), model_));
  }
}

auto SampleCostOracle::edge_cost(std::size_t u, std::size_t v) const -> double { return edge_details(u, v).phi; }

auto SampleCostOracle::edge_details(std::size_t u, std::size_t v) const -> EdgeCost {
  return phylomst::edge_cost(labels_.at(u), labels_.at(v), model_);
}

TableCostOracle::TableCostOracle(std::vector<double> node_costs, std::vector<double> phi)
    : node_costs_(std::move(node_costs)), phi_(std::move(phi)) {
  if (phi_.size() != node_costs_.size() * node_costs_.size()) {
    fail(ErrorKind::domain, "cost table must be k x k");
  }
}

auto TableCostOracle::tabulate(const CostOracle& source) -> TableCostOracle {
  const auto k = source.size();
  auto nodes = std::vector<double>(k);
  auto phi = std::vector<double>(k * k);
  for (auto u = std::size_t{0}; u < k; ++u) {
    nodes[u] = source.node_cost(u);
    for (auto v = std::size_t{0}; v < k; ++v) phi[u * k + v] = source.edge_cost(u, v);
  }
  return {std::move(nodes), std::move(phi)};
}

auto TableCostOracle::edge_cost(std::size_t u, std::size_t v) const -> double {
  if (u >= size() || v >= size()) fail(ErrorKind::domain, "label index outside cost table");
  return phi_[u * size() + v];
}

void validate_samples(std::span<const Sample> samples, const CostModel& model, std::size_t min_count) {
  if (samples.size() < min_count) {
    fail(ErrorKind::domain, fmt::format("need at least {} samples, got {}", min_count, samples.size()));
  }
  auto ids = std::set<std::string>{};
  const auto located = std::count_if(samples.begin(), samples.end(), [](const Sample& s) { return s.location.has_value(); });
  if (located != 0 && located != static_cast<std::ptrdiff_t>(samples.size())) {
    fail(ErrorKind::domain, "either every sample has a location or none does");
  }
  if (model.geo && located == 0 && !samples.empty()) {
    fail(ErrorKind::domain, "the model has a geography but samples carry no locations");
  }
  for (const auto& s : samples) {
    if (!ids.insert(s.id).second) fail(ErrorKind::domain, fmt::format("duplicate sample id '{}'", s.id));
    if (s.sequence.size() != samples.front().sequence.size()) {
      fail(ErrorKind::domain, fmt::format("sample '{}' has length {}, expected {}", s.id, s.sequence.size(),
                                          samples.front().sequence.size()));
    }
  }
}

auto build_cost_matrix(std::span<const Sample> samples, const CostModel& model) -> CostMatrix {
  validate_samples(samples, model);
  const auto k = samples.size();
  auto labels = std::vector<Label>{};
  labels.reserve(k);
  auto result = CostMatrix{};
  for (const auto& s : samples) {
    labels.push_back(encode(s, model));
    result.ids.push_back(s.id);
    result.node_costs.push_back(node_cost(labels.back(), model));
  }
  result.weights.assign(k * k, 0.0);
  result.diagnostics.assign(k * k, EdgeCost{0.0, 0.0, 0.0, 0.0});
  for (auto i = std::size_t{0}; i < k; ++i) {
    for (auto j = i + 1; j < k; ++j) {
      auto cost = EdgeCost{};
      try {
        cost = edge_cost(labels[i], labels[j], model);
      } catch (const Error& e) {
        fail(e.kind(), fmt::format("pair ('{}', '{}'): {}", samples[i].id, samples[j].id, e.what()));
      }
      const auto w = mst_weight(cost.phi, result.node_costs[j]);
      result.weights[i * k + j] = w;
      result.weights[j * k + i] = w;
      result.diagnostics[i * k + j] = cost;
    }
  }
  return result;
}

}  // namespace phylomst
