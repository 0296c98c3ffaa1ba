#include "phylomst/exact_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "phylomst/errors.hpp"
#include "phylomst/steiner_mst.hpp"

namespace phylomst {

auto enumerate_states(const SiteModel& model, int sites, std::optional<int> locations) -> StateSpace {
  if (sites < 0) fail(ErrorKind::domain, "sequence length must be nonnegative");
  if (locations && *locations < 1) fail(ErrorKind::domain, "location count must be positive");
  const auto m = static_cast<std::size_t>(model.states());
  auto count = std::size_t{1};
  for (auto i = 0; i < sites; ++i) {
    count *= m;
    if (count > k_max_states) break;
  }
  if (locations) count *= static_cast<std::size_t>(*locations);
  if (count > k_max_states) {
    fail(ErrorKind::size, fmt::format("state space has more than {} states", k_max_states));
  }

  auto space = StateSpace{};
  const auto sequence_count = count / static_cast<std::size_t>(locations.value_or(1));
  for (auto code = std::size_t{0}; code < sequence_count; ++code) {
    auto sequence = std::string(sites, ' ');
    auto rest = code;
    for (auto i = sites - 1; i >= 0; --i) {
      sequence[i] = model.alphabet()[rest % m];
      rest /= m;
    }
    if (!locations) {
      space.states.push_back({sequence, sequence, std::nullopt});
      continue;
    }
    for (auto loc = 0; loc < *locations; ++loc) {
      space.states.push_back({fmt::format("{}@{}", sequence, loc), sequence, loc});
    }
  }
  return space;
}

auto state_index(const SiteModel& model, std::span<const Symbol> sequence, std::optional<int> location,
                 std::optional<int> locations) -> std::size_t {
  auto code = std::size_t{0};
  for (auto s : sequence) code = code * model.states() + s;
  if (locations) code = code * static_cast<std::size_t>(*locations) + static_cast<std::size_t>(location.value_or(0));
  return code;
}

namespace {

auto superset_scan(const CostOracle& space, std::span<const std::size_t> terminals) -> double {
  const auto n = space.size();
  auto is_terminal = std::vector<bool>(n, false);
  for (auto t : terminals) is_terminal[t] = true;
  auto free = std::vector<std::size_t>{};
  for (auto v = std::size_t{0}; v < n; ++v) {
    if (!is_terminal[v]) free.push_back(v);
  }
  if (free.size() > k_max_free_states_for_subsets) {
    fail(ErrorKind::size, fmt::format("superset scan over {} free states exceeds the cap of {}", free.size(),
                                      k_max_free_states_for_subsets));
  }

  // Symmetric weights and node costs are reused across every subset.
  auto w = std::vector<double>(n * n, 0.0);
  for (auto u = std::size_t{0}; u < n; ++u) {
    for (auto v = u + 1; v < n; ++v) w[u * n + v] = w[v * n + u] = space.symmetric_weight(u, v);
  }

  auto best = std::numeric_limits<double>::infinity();
  auto members = std::vector<std::size_t>{};
  auto ids = std::vector<std::string>{};
  for (auto mask = std::uint64_t{0}; mask < (std::uint64_t{1} << free.size()); ++mask) {
    members.assign(terminals.begin(), terminals.end());
    for (auto i = std::size_t{0}; i < free.size(); ++i) {
      if (mask & (std::uint64_t{1} << i)) members.push_back(free[i]);
    }
    ids.resize(members.size());
    for (auto i = std::size_t{0}; i < members.size(); ++i) ids[i] = std::to_string(members[i]);
    auto cost = 0.0;
    for (auto v : members) cost += space.node_cost(v);
    const auto tree = kruskal_mst(ids, [&](std::size_t i, std::size_t j) { return w[members[i] * n + members[j]]; });
    for (const auto& e : tree) cost += w[members[e.u] * n + members[e.v]];
    best = std::min(best, cost);
  }
  return best;
}

// Minimum-cost arborescence rooted at a terminal over arcs u -> v costing
// phi(u, v) >= 0. The arc into each non-root node carries that node's cost, so
// an arborescence costs phi(root) + sum of w' + sum of the other phi(v).
auto dreyfus_wagner(const CostOracle& space, std::span<const std::size_t> terminals) -> double {
  const auto n = space.size();
  const auto root = terminals[0];
  const auto rest = std::vector<std::size_t>(terminals.begin() + 1, terminals.end());
  const auto q = rest.size();
  if (q == 0) return space.node_cost(root);

  constexpr auto inf = std::numeric_limits<double>::infinity();
  auto dist = std::vector<double>(n * n);
  for (auto u = std::size_t{0}; u < n; ++u) {
    for (auto v = std::size_t{0}; v < n; ++v) {
      dist[u * n + v] = u == v ? 0.0 : std::max(0.0, space.edge_cost(u, v));
    }
  }
  for (auto m = std::size_t{0}; m < n; ++m) {
    for (auto u = std::size_t{0}; u < n; ++u) {
      for (auto v = std::size_t{0}; v < n; ++v) {
        dist[u * n + v] = std::min(dist[u * n + v], dist[u * n + m] + dist[m * n + v]);
      }
    }
  }

  // dp[mask][v]: cheapest arborescence rooted at v reaching the terminals in mask.
  const auto full = (std::size_t{1} << q) - 1;
  auto dp = std::vector<double>((full + 1) * n, inf);
  for (auto i = std::size_t{0}; i < q; ++i) {
    for (auto v = std::size_t{0}; v < n; ++v) dp[(std::size_t{1} << i) * n + v] = dist[v * n + rest[i]];
  }
  auto merged = std::vector<double>(n);
  for (auto mask = std::size_t{1}; mask <= full; ++mask) {
    if ((mask & (mask - 1)) == 0) continue;
    for (auto v = std::size_t{0}; v < n; ++v) {
      auto best = inf;
      for (auto sub = (mask - 1) & mask; sub > 0; sub = (sub - 1) & mask) {
        if (sub < (mask ^ sub)) continue;  // each split once
        best = std::min(best, dp[sub * n + v] + dp[(mask ^ sub) * n + v]);
      }
      merged[v] = best;
    }
    for (auto v = std::size_t{0}; v < n; ++v) {
      auto best = inf;
      for (auto u = std::size_t{0}; u < n; ++u) best = std::min(best, dist[v * n + u] + merged[u]);
      dp[mask * n + v] = best;
    }
  }
  return space.node_cost(root) + dp[full * n + root];
}

}  // namespace

auto exact_steiner_cost(const CostOracle& space, std::span<const std::size_t> terminals, SteinerMethod method)
    -> double {
  if (space.size() > k_max_states) {
    fail(ErrorKind::size, fmt::format("exact Steiner oracle is capped at {} states", k_max_states));
  }
  if (terminals.empty()) fail(ErrorKind::domain, "exact Steiner oracle needs at least one terminal");
  if (terminals.size() > k_max_terminals) {
    fail(ErrorKind::size, fmt::format("exact Steiner oracle is capped at {} terminals", k_max_terminals));
  }
  auto sorted = std::vector<std::size_t>(terminals.begin(), terminals.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    fail(ErrorKind::domain, "terminals must be distinct states");
  }
  if (sorted.back() >= space.size()) fail(ErrorKind::domain, "terminal outside the state space");

  if (method == SteinerMethod::automatic) {
    method = space.size() - sorted.size() <= k_max_free_states_for_subsets ? SteinerMethod::superset_scan
                                                                            : SteinerMethod::dreyfus_wagner;
  }
  return method == SteinerMethod::superset_scan ? superset_scan(space, sorted) : dreyfus_wagner(space, sorted);
}

auto brute_force_sup_rw(const RandomWalk& walk, NodeId x, NodeId y, int t_max) -> WalkSupremum {
  walk.check_node(x);
  walk.check_node(y);
  if (t_max < 1) fail(ErrorKind::parameter, "brute force scan needs t_max >= 1");
  const auto n = walk.node_count();
  auto p = Eigen::MatrixXd::Zero(n, n).eval();
  for (const auto& e : walk.graph().edges()) {
    p(e.u, e.v) += e.weight / walk.graph().degree(e.u);
    if (e.u != e.v) p(e.v, e.u) += e.weight / walk.graph().degree(e.v);
  }
  auto power = p;
  auto scan_max = power(x, y);
  for (auto t = 2; t <= t_max; ++t) {
    power = (power * p).eval();
    scan_max = std::max(scan_max, power(x, y));
  }
  const auto& spectral = walk.spectral();
  return {scan_max, std::max(scan_max, spectral.pi[y]),
          spectral.pi[y] + spectral.ratio * std::pow(spectral.lambda, t_max)};
}

}  // namespace phylomst
