#pragma once

// Shared fixtures for the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "phylomst/cost_oracle.hpp"
#include "phylomst/geo_rw.hpp"
#include "phylomst/steiner_mst.hpp"
#include "phylomst/substitution.hpp"

namespace phylomst::testing {

using Rng = std::mt19937_64;

inline auto triangle() -> GeoGraph { return GeoGraph{3, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}}}; }

inline auto complete_graph(int n) -> GeoGraph {
  auto edges = std::vector<GeoEdge>{};
  for (auto u = 0; u < n; ++u) {
    for (auto v = u + 1; v < n; ++v) edges.push_back({u, v, 1.0});
  }
  return GeoGraph{n, edges};
}

inline auto cycle(int n) -> GeoGraph {
  auto edges = std::vector<GeoEdge>{};
  for (auto v = 0; v < n; ++v) edges.push_back({v, (v + 1) % n, 1.0});
  return GeoGraph{n, edges};
}

// Connected, non-bipartite, minimum degree >= 3 (for nodes >= 4), weights U[0.5, 1.5].
// A ring with the chord (0, 2) guarantees an odd cycle; random chords raise degrees.
inline auto random_graph(Rng& rng, int nodes) -> GeoGraph {
  auto weight = std::uniform_real_distribution<double>{0.5, 1.5};
  auto pick = std::uniform_int_distribution<int>{0, nodes - 1};
  auto present = std::set<std::pair<int, int>>{};
  auto edges = std::vector<GeoEdge>{};
  auto degree = std::vector<int>(nodes, 0);
  const auto add = [&](int u, int v) {
    if (u == v) return;
    const auto key = std::minmax(u, v);
    if (!present.insert(key).second) return;
    edges.push_back({key.first, key.second, weight(rng)});
    ++degree[u];
    ++degree[v];
  };
  for (auto v = 0; v < nodes; ++v) add(v, (v + 1) % nodes);
  add(0, 2);
  const auto target = std::min(3, nodes - 1);
  for (auto v = 0; v < nodes; ++v) {
    while (degree[v] < target) add(v, pick(rng));
  }
  return GeoGraph{nodes, edges};
}

// Random GTR over m states with pi bounded away from zero.
inline auto random_gtr(Rng& rng, int m = 4) -> SiteModel {
  auto u = std::uniform_real_distribution<double>{0.2, 1.0};
  auto pi = std::vector<double>(m);
  for (auto& p : pi) p = u(rng);
  const auto total = [&] {
    auto s = 0.0;
    for (auto p : pi) s += p;
    return s;
  }();
  for (auto& p : pi) p /= total;
  auto s = std::vector<double>(m * m, 0.0);
  auto ex = std::uniform_real_distribution<double>{0.2, 3.0};
  for (auto a = 0; a < m; ++a) {
    for (auto b = a + 1; b < m; ++b) s[a * m + b] = s[b * m + a] = ex(rng);
  }
  return SiteModel::gtr(pi, s);
}

// exp(Q t) with Q_ab = S_ab pi_b, via Eigen's general matrix exponential.
inline auto expm_oracle(const SiteModel& model, double t) -> Eigen::MatrixXd {
  const auto m = model.states();
  auto q = Eigen::MatrixXd::Zero(m, m).eval();
  if (model.kind() == ModelKind::gtr) {
    for (auto a = 0; a < m; ++a) {
      for (auto b = 0; b < m; ++b) {
        if (a != b) q(a, b) = model.exchangeability()[a * m + b] * model.stationary()[b];
      }
    }
  } else {
    // JC69: off-diagonal mu/4 gives decay rate mu; binary: off-diagonal mu gives 2 mu.
    const auto rate = model.kind() == ModelKind::jc69 ? model.mu() / 4.0 : model.mu();
    q.setConstant(rate);
  }
  for (auto a = 0; a < m; ++a) {
    q(a, a) = 0.0;
    q(a, a) = -q.row(a).sum();
  }
  return (q * t).exp();
}

inline auto random_sequence(Rng& rng, const SiteModel& model, int sites) -> std::string {
  auto pick = std::uniform_int_distribution<int>{0, model.states() - 1};
  auto s = std::string(sites, ' ');
  for (auto& c : s) c = model.alphabet()[pick(rng)];
  return s;
}

// Mutates each site independently with probability p.
inline auto mutate(Rng& rng, const SiteModel& model, std::string s, double p) -> std::string {
  auto coin = std::uniform_real_distribution<double>{0.0, 1.0};
  auto pick = std::uniform_int_distribution<int>{0, model.states() - 1};
  for (auto& c : s) {
    if (coin(rng) < p) c = model.alphabet()[pick(rng)];
  }
  return s;
}

inline auto hamming(const std::string& a, const std::string& b) -> int {
  auto d = 0;
  for (auto i = std::size_t{0}; i < a.size(); ++i) d += a[i] != b[i];
  return d;
}

// Binary entropy in nats with 0 log 0 = 0.
inline auto entropy(double p) -> double {
  const auto term = [](double x) { return x > 0.0 ? -x * std::log(x) : 0.0; };
  return term(p) + term(1.0 - p);
}

// Uniform random labelled tree on k nodes from a random Pruefer sequence.
inline auto random_tree_edges(Rng& rng, std::size_t k) -> std::vector<TreeEdge> {
  if (k < 2) return {};
  auto pick = std::uniform_int_distribution<std::size_t>{0, k - 1};
  auto code = std::vector<std::size_t>(k - 2);
  for (auto& c : code) c = pick(rng);
  auto degree = std::vector<std::size_t>(k, 1);
  for (auto c : code) ++degree[c];
  auto edges = std::vector<TreeEdge>{};
  for (auto c : code) {
    auto leaf = std::size_t{0};
    while (degree[leaf] != 1) ++leaf;
    edges.push_back({leaf, c});
    --degree[leaf];
    --degree[c];
  }
  auto rest = std::vector<std::size_t>{};
  for (auto v = std::size_t{0}; v < k; ++v) {
    if (degree[v] == 1) rest.push_back(v);
  }
  edges.push_back({rest[0], rest[1]});
  return edges;
}

// Every labelled tree on k nodes, decoded from every Pruefer sequence.
template <typename Visit>
void for_each_spanning_tree(std::size_t k, Visit&& visit) {
  if (k == 2) {
    visit(std::vector<TreeEdge>{{0, 1}});
    return;
  }
  auto code = std::vector<std::size_t>(k - 2, 0);
  while (true) {
    auto degree = std::vector<std::size_t>(k, 1);
    for (auto c : code) ++degree[c];
    auto edges = std::vector<TreeEdge>{};
    for (auto c : code) {
      auto leaf = std::size_t{0};
      while (degree[leaf] != 1) ++leaf;
      edges.push_back({leaf, c});
      --degree[leaf];
      --degree[c];
    }
    auto rest = std::vector<std::size_t>{};
    for (auto v = std::size_t{0}; v < k; ++v) {
      if (degree[v] == 1) rest.push_back(v);
    }
    edges.push_back({rest[0], rest[1]});
    visit(edges);

    auto i = std::size_t{0};
    while (i < code.size() && ++code[i] == k) code[i++] = 0;
    if (i == code.size()) break;
  }
}

inline auto ids_for(std::size_t k) -> std::vector<std::string> {
  auto ids = std::vector<std::string>{};
  for (auto i = std::size_t{0}; i < k; ++i) ids.push_back("s" + std::to_string(i));
  return ids;
}

}  // namespace phylomst::testing
