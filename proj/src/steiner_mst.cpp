#include "phylomst/steiner_mst.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <tuple>

#include <fmt/format.h>

#include "phylomst/errors.hpp"

namespace phylomst {

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), size_(n, 1) { std::iota(parent_.begin(), parent_.end(), 0); }

  auto find(std::size_t x) -> std::size_t {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  auto unite(std::size_t a, std::size_t b) -> bool {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

}  // namespace

auto kruskal_mst(std::span<const std::string> ids, const std::function<double(std::size_t, std::size_t)>& weight)
    -> std::vector<TreeEdge> {
  const auto k = ids.size();
  struct Candidate {
    double w;
    const std::string* first;
    const std::string* second;
    TreeEdge edge;
  };
  auto candidates = std::vector<Candidate>{};
  candidates.reserve(k * (k - 1) / 2);
  for (auto i = std::size_t{0}; i < k; ++i) {
    for (auto j = i + 1; j < k; ++j) {
      const auto w = weight(i, j);
      if (!std::isfinite(w)) fail(ErrorKind::numeric, fmt::format("weight ({}, {}) is not finite", ids[i], ids[j]));
      const auto swap = ids[j] < ids[i];
      candidates.push_back({w, swap ? &ids[j] : &ids[i], swap ? &ids[i] : &ids[j], {i, j}});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    return std::tie(a.w, *a.first, *a.second) < std::tie(b.w, *b.first, *b.second);
  });

  auto sets = DisjointSets{k};
  auto tree = std::vector<TreeEdge>{};
  tree.reserve(k > 0 ? k - 1 : 0);
  for (const auto& c : candidates) {
    if (sets.unite(c.edge.u, c.edge.v)) {
      tree.push_back(c.edge);
      if (tree.size() + 1 == k) break;
    }
  }
  return tree;
}

auto kruskal_mst(const CostMatrix& costs) -> std::vector<TreeEdge> {
  if (costs.size() < 2) fail(ErrorKind::domain, "kruskal_mst needs at least two samples");
  return kruskal_mst(costs.ids, [&](std::size_t i, std::size_t j) { return costs.weight(i, j); });
}

auto PhyloTree::children(std::size_t v) const -> std::vector<std::size_t> {
  auto result = std::vector<std::size_t>{};
  for (const auto& e : edges) {
    if (e.u == v) result.push_back(e.v);
  }
  std::sort(result.begin(), result.end(), [&](std::size_t a, std::size_t b) { return ids[a] < ids[b]; });
  return result;
}

auto root_tree(std::span<const std::string> ids, std::span<const TreeEdge> edges, const std::optional<std::string>& root)
    -> PhyloTree {
  const auto k = ids.size();
  if (k == 0) fail(ErrorKind::domain, "cannot root an empty tree");
  if (edges.size() + 1 != k) fail(ErrorKind::domain, fmt::format("a spanning tree on {} nodes needs {} edges", k, k - 1));

  auto tree = PhyloTree{};
  tree.ids.assign(ids.begin(), ids.end());
  if (root) {
    const auto it = std::find(ids.begin(), ids.end(), *root);
    if (it == ids.end()) fail(ErrorKind::domain, fmt::format("root '{}' is not a sample id", *root));
    tree.root = static_cast<std::size_t>(it - ids.begin());
  } else {
    tree.root = static_cast<std::size_t>(std::min_element(ids.begin(), ids.end()) - ids.begin());
  }

  auto adjacency = std::vector<std::vector<std::size_t>>(k);
  for (const auto& e : edges) {
    if (e.u >= k || e.v >= k) fail(ErrorKind::domain, "tree edge references an unknown node");
    adjacency[e.u].push_back(e.v);
    adjacency[e.v].push_back(e.u);
  }
  for (auto& nbrs : adjacency) {
    std::sort(nbrs.begin(), nbrs.end(), [&](std::size_t a, std::size_t b) { return ids[a] < ids[b]; });
  }

  tree.parent.assign(k, std::nullopt);
  auto visited = std::vector<bool>(k, false);
  auto queue = std::deque<std::size_t>{tree.root};
  visited[tree.root] = true;
  while (!queue.empty()) {
    const auto v = queue.front();
    queue.pop_front();
    for (const auto c : adjacency[v]) {
      if (visited[c]) continue;
      visited[c] = true;
      tree.parent[c] = v;
      tree.edges.push_back({v, c});
      queue.push_back(c);
    }
  }
  if (tree.edges.size() + 1 != k) fail(ErrorKind::domain, "edges do not form a spanning tree");
  return tree;
}

namespace {

void check_labels(const PhyloTree& tree, const CostOracle& oracle) {
  if (tree.size() > oracle.size()) {
    fail(ErrorKind::domain, fmt::format("tree has {} nodes but the cost oracle covers {}", tree.size(), oracle.size()));
  }
}

}  // namespace

auto tree_cost_directed(const PhyloTree& tree, const CostOracle& oracle) -> double {
  check_labels(tree, oracle);
  auto cost = oracle.node_cost(tree.root);
  for (const auto& e : tree.edges) cost += oracle.edge_cost(e.u, e.v);
  return cost;
}

auto tree_cost_symmetric(const PhyloTree& tree, const CostOracle& oracle) -> double {
  check_labels(tree, oracle);
  auto cost = 0.0;
  for (auto v = std::size_t{0}; v < tree.size(); ++v) cost += oracle.node_cost(v);
  for (const auto& e : tree.edges) cost += oracle.symmetric_weight(e.u, e.v);
  return cost;
}

auto interior_path_costs(const CostOracle& oracle) -> std::vector<double> {
  // Entering node b along (a, b) costs w'(a, b) + phi(b); a path's cost without
  // its endpoint node costs is the arc sum minus phi(target).
  const auto k = oracle.size();
  auto dist = std::vector<double>(k * k, 0.0);
  for (auto a = std::size_t{0}; a < k; ++a) {
    for (auto b = std::size_t{0}; b < k; ++b) {
      if (a != b) dist[a * k + b] = oracle.symmetric_weight(a, b) + oracle.node_cost(b);
    }
  }
  for (auto m = std::size_t{0}; m < k; ++m) {
    for (auto a = std::size_t{0}; a < k; ++a) {
      for (auto b = std::size_t{0}; b < k; ++b) {
        dist[a * k + b] = std::min(dist[a * k + b], dist[a * k + m] + dist[m * k + b]);
      }
    }
  }
  for (auto a = std::size_t{0}; a < k; ++a) {
    for (auto b = std::size_t{0}; b < k; ++b) {
      if (a != b) dist[a * k + b] -= oracle.node_cost(b);
    }
  }
  return dist;
}

auto spider_quotient(std::size_t center, std::span<const std::size_t> terminals, const CostOracle& oracle,
                     bool center_is_terminal) -> double {
  if (terminals.size() < 2) fail(ErrorKind::domain, "a spider needs at least two terminals");
  if (center >= oracle.size()) fail(ErrorKind::domain, "spider center outside the label set");
  const auto dist = interior_path_costs(oracle);
  const auto k = oracle.size();
  auto total = center_is_terminal ? 0.0 : oracle.node_cost(center);
  for (const auto u : terminals) {
    if (u >= k) fail(ErrorKind::domain, "spider terminal outside the label set");
    total += dist[center * k + u];
  }
  return total / static_cast<double>(terminals.size());
}

}  // namespace phylomst
