#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "phylomst/cost_oracle.hpp"

namespace phylomst {

struct TreeEdge {
  std::size_t u;
  std::size_t v;

  friend auto operator==(const TreeEdge&, const TreeEdge&) -> bool = default;
};

// Kruskal over the complete graph on `ids`. Ties are broken by the
// lexicographically ordered id pair, so the result is reproducible.
// Returned edges have u < v by index and are listed in acceptance order.
auto kruskal_mst(std::span<const std::string> ids, const std::function<double(std::size_t, std::size_t)>& weight)
    -> std::vector<TreeEdge>;
auto kruskal_mst(const CostMatrix& costs) -> std::vector<TreeEdge>;

// A rooted tree whose nodes are exactly the labelled samples.
struct PhyloTree {
  std::vector<std::string> ids;
  std::size_t root = 0;
  std::vector<std::optional<std::size_t>> parent;
  std::vector<TreeEdge> edges;  // (parent, child), breadth-first from the root

  auto size() const -> std::size_t { return ids.size(); }
  // Children sorted by id.
  auto children(std::size_t v) const -> std::vector<std::size_t>;
};

// Orients a spanning tree away from `root` (default: lexicographically smallest id).
auto root_tree(std::span<const std::string> ids, std::span<const TreeEdge> edges,
               const std::optional<std::string>& root = std::nullopt) -> PhyloTree;

// phi(root) + sum over directed edges of phi(parent, child).
auto tree_cost_directed(const PhyloTree& tree, const CostOracle& oracle) -> double;
// sum over edges of w'(u, v) + sum over nodes of phi(v).
auto tree_cost_symmetric(const PhyloTree& tree, const CostOracle& oracle) -> double;

// Quotient cost (c(center) + sum_{u in S} d(center, u)) / |S| of a spider. d is the
// cheapest path cost between the endpoints over the oracle's labels, counting w'
// on every edge and phi on interior nodes only. The center cost is zero when the
// center is itself a terminal.
auto spider_quotient(std::size_t center, std::span<const std::size_t> terminals, const CostOracle& oracle,
                     bool center_is_terminal) -> double;

// All-pairs d(u, v) used by spider_quotient (row-major, size x size).
auto interior_path_costs(const CostOracle& oracle) -> std::vector<double>;

}  // namespace phylomst
