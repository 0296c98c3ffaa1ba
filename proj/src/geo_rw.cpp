#include "phylomst/geo_rw.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <utility>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "phylomst/errors.hpp"

namespace phylomst {

namespace {

auto max_node_id(const std::vector<GeoEdge>& edges) -> int {
  auto max_id = -1;
  for (const auto& e : edges) max_id = std::max({max_id, e.u, e.v});
  return max_id + 1;
}

}  // namespace

GeoGraph::GeoGraph(std::vector<GeoEdge> edges) : GeoGraph(max_node_id(edges), edges) {}

GeoGraph::GeoGraph(int node_count, std::vector<GeoEdge> edges) : node_count_(node_count) {
  if (node_count < 1) fail(ErrorKind::structural, "geography graph has no nodes");

  auto merged = std::map<std::pair<NodeId, NodeId>, double>{};
  for (const auto& e : edges) {
    if (e.u < 0 || e.v < 0 || e.u >= node_count || e.v >= node_count) {
      fail(ErrorKind::structural, fmt::format("edge ({}, {}) references a node outside 0..{}", e.u, e.v, node_count - 1));
    }
    if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
      fail(ErrorKind::structural, fmt::format("edge ({}, {}) has non-positive weight {}", e.u, e.v, e.weight));
    }
    merged[{std::min(e.u, e.v), std::max(e.u, e.v)}] += e.weight;
  }

  degree_.assign(node_count, 0.0);
  auto counts = std::vector<std::size_t>(node_count, 0);
  for (const auto& [key, w] : merged) {
    const auto [u, v] = key;
    edges_.push_back({u, v, w});
    degree_[u] += w;
    ++counts[u];
    if (u != v) {
      degree_[v] += w;
      ++counts[v];
    }
  }
  offsets_.assign(node_count + 1, 0);
  for (auto v = 0; v < node_count; ++v) offsets_[v + 1] = offsets_[v] + counts[v];
  arcs_.resize(offsets_.back());
  auto fill = std::vector<std::size_t>(offsets_.begin(), offsets_.end() - 1);
  for (const auto& e : edges_) {
    arcs_[fill[e.u]++] = {e.v, e.weight};
    if (e.u != e.v) arcs_[fill[e.v]++] = {e.u, e.weight};
  }
  volume_ = std::accumulate(degree_.begin(), degree_.end(), 0.0);
}

auto GeoGraph::is_connected() const -> bool {
  auto seen = std::vector<bool>(node_count_, false);
  auto stack = std::vector<NodeId>{0};
  seen[0] = true;
  auto reached = 1;
  while (!stack.empty()) {
    const auto v = stack.back();
    stack.pop_back();
    for (const auto& arc : arcs(v)) {
      if (!seen[arc.to]) {
        seen[arc.to] = true;
        ++reached;
        stack.push_back(arc.to);
      }
    }
  }
  return reached == node_count_ && (node_count_ > 1 || !edges_.empty());
}

auto rw_stationary(const GeoGraph& graph) -> std::vector<double> {
  if (!graph.is_connected()) fail(ErrorKind::structural, "geography graph is not connected");
  auto pi = std::vector<double>(graph.node_count());
  for (auto v = 0; v < graph.node_count(); ++v) pi[v] = graph.degree(v) / graph.volume();
  return pi;
}

auto mixing_lambda(const GeoGraph& graph) -> SpectralInfo {
  auto info = SpectralInfo{};
  info.pi = rw_stationary(graph);

  const auto n = graph.node_count();
  auto normalized = Eigen::MatrixXd::Zero(n, n).eval();
  for (const auto& e : graph.edges()) {
    const auto value = e.weight / std::sqrt(graph.degree(e.u) * graph.degree(e.v));
    normalized(e.u, e.v) = value;
    normalized(e.v, e.u) = value;
  }
  const auto solver = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>{normalized, Eigen::EigenvaluesOnly};
  const auto& ev = solver.eigenvalues();  // ascending; ev(n - 1) == 1
  info.lambda = n == 1 ? 0.0 : std::max(std::abs(ev(0)), std::abs(ev(n - 2)));
  if (info.lambda >= 1.0 - 1e-12) {
    fail(ErrorKind::mixing, "walk does not mix: the graph is bipartite (add a self-loop to repair)");
  }
  const auto [lo, hi] = std::minmax_element(info.pi.begin(), info.pi.end());
  info.ratio = std::sqrt(*hi / *lo);
  return info;
}

auto cutoff_time(const SpectralInfo& spectral, double eps1, NodeId b) -> int {
  if (!(eps1 > 0.0)) fail(ErrorKind::parameter, "eps1 must be positive");
  const auto target = eps1 * spectral.pi.at(b);
  const auto bound = [&](int t) { return spectral.ratio * std::pow(spectral.lambda, t); };
  if (spectral.lambda <= 0.0 || bound(1) <= target) return 1;
  auto t = static_cast<int>(std::ceil(std::log(target / spectral.ratio) / std::log(spectral.lambda)));
  t = std::max(t, 1);
  while (t > 1 && bound(t - 1) <= target) --t;
  while (bound(t) > target) ++t;
  return t;
}

RandomWalk::RandomWalk(GeoGraph graph) : graph_(std::move(graph)), spectral_(mixing_lambda(graph_)) {}

auto RandomWalk::min_stationary() const -> double {
  return *std::min_element(spectral_.pi.begin(), spectral_.pi.end());
}

void RandomWalk::check_node(NodeId v) const {
  if (v < 0 || v >= node_count()) {
    fail(ErrorKind::structural, fmt::format("location {} is not a node of the geography graph", v));
  }
}

auto RandomWalk::step_prob(NodeId x, NodeId y) const -> double {
  check_node(x);
  check_node(y);
  auto w = 0.0;
  for (const auto& arc : graph_.arcs(x)) {
    if (arc.to == y) w += arc.weight;
  }
  return w / graph_.degree(x);
}

void RandomWalk::step(std::span<const double> current, std::span<double> next) const {
  std::fill(next.begin(), next.end(), 0.0);
  for (auto u = 0; u < node_count(); ++u) {
    if (current[u] == 0.0) continue;
    const auto mass = current[u] / graph_.degree(u);
    for (const auto& arc : graph_.arcs(u)) next[arc.to] += mass * arc.weight;
  }
}

auto RandomWalk::scan(NodeId x, NodeId y, int t_max) const -> std::vector<double> {
  check_node(x);
  check_node(y);
  auto current = std::vector<double>(node_count(), 0.0);
  auto next = std::vector<double>(node_count(), 0.0);
  current[x] = 1.0;
  auto values = std::vector<double>{};
  values.reserve(std::max(t_max, 0));
  for (auto t = 1; t <= t_max; ++t) {
    step(current, next);
    std::swap(current, next);
    values.push_back(current[y]);
  }
  return values;
}

auto RandomWalk::scan_max(NodeId x, NodeId y, int t_max) const -> double {
  const auto values = scan(x, y, t_max);
  return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
}

auto pair_cutoff(const RandomWalk& walk, NodeId x, NodeId y, double eps1) -> int {
  walk.check_node(x);
  walk.check_node(y);
  return std::max(cutoff_time(walk.spectral(), eps1, x), cutoff_time(walk.spectral(), eps1, y));
}

auto sup_rw_additive(const RandomWalk& walk, NodeId x, NodeId y, double eps1) -> double {
  const auto t_prime = pair_cutoff(walk, x, y, eps1);
  return std::max(walk.scan_max(x, y, t_prime), walk.stationary(y));
}

auto sup_rw_multiplicative(const RandomWalk& walk, NodeId x, NodeId y, double eps2) -> double {
  if (!(eps2 > 0.0 && eps2 < 1.0)) fail(ErrorKind::parameter, fmt::format("eps2 must lie in (0, 1), got {}", eps2));
  return sup_rw_additive(walk, x, y, walk.min_stationary() * eps2);
}

auto neg_log_sup_rw(const RandomWalk& walk, NodeId x, NodeId y, double eps3, const GeoBounds& bounds) -> double {
  if (!(bounds.upper > 0.0 && bounds.upper < 1.0)) fail(ErrorKind::parameter, "upper bound B must lie in (0, 1)");
  const auto neg_log_b = -std::log(bounds.upper);
  if (!(eps3 > 0.0) || eps3 > neg_log_b) {
    fail(ErrorKind::parameter, fmt::format("eps3 = {} must lie in (0, -log B = {}]", eps3, neg_log_b));
  }
  const auto eps2 = 0.5 * eps3 * neg_log_b;
  const auto estimate = sup_rw_multiplicative(walk, x, y, eps2);
  // E2 never exceeds zeta, so E2 > B proves a violation. When E2 is within the
  // additive slack of B, a tighter scan decides.
  const auto slack = walk.min_stationary() * eps2;
  auto violated = estimate > bounds.upper;
  if (!violated && estimate + slack > bounds.upper) {
    violated = sup_rw_additive(walk, x, y, slack * 1e-3) > bounds.upper;
  }
  if (violated) {
    fail(ErrorKind::bounds, fmt::format("supremum estimate {} for locations ({}, {}) exceeds the bound B = {}",
                                        estimate, x, y, bounds.upper));
  }
  return -std::log(estimate);
}

auto neg_log_sup_rw_scan(const RandomWalk& walk, NodeId x, NodeId y, double rel_tol) -> double {
  const auto t_max = pair_cutoff(walk, x, y, rel_tol);
  return -std::log(std::max(walk.scan_max(x, y, t_max), walk.stationary(y)));
}

auto derive_bounds(const RandomWalk& walk) -> GeoBounds {
  const auto a = walk.min_stationary();
  const auto eps1 = a / 10.0;
  const auto n = walk.node_count();
  auto cutoffs = std::vector<int>(n);
  for (auto v = 0; v < n; ++v) cutoffs[v] = cutoff_time(walk.spectral(), eps1, v);

  // One walk per source covers every target; each pair uses its own horizon.
  auto best = 0.0;
  auto current = std::vector<double>(n);
  auto next = std::vector<double>(n);
  for (auto x = 0; x < n; ++x) {
    auto sup = std::vector<double>(walk.spectral().pi);
    std::fill(current.begin(), current.end(), 0.0);
    current[x] = 1.0;
    const auto horizon = std::max(cutoffs[x], *std::max_element(cutoffs.begin(), cutoffs.end()));
    for (auto t = 1; t <= horizon; ++t) {
      walk.step(current, next);
      std::swap(current, next);
      for (auto y = 0; y < n; ++y) {
        if (t <= std::max(cutoffs[x], cutoffs[y])) sup[y] = std::max(sup[y], current[y]);
      }
    }
    best = std::max(best, *std::max_element(sup.begin(), sup.end()));
  }
  auto upper = std::min(1.0 - 1e-6, best + eps1);
  upper = std::max(upper, a);
  return {a, upper};
}

}  // namespace phylomst
