#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "phylomst/cost_oracle.hpp"
#include "phylomst/geo_rw.hpp"
#include "phylomst/steiner_mst.hpp"
#include "phylomst/substitution.hpp"

namespace phylomst {

// Counter-based generator: the n-th draw of stream s under seed k is a pure
// function of (k, s, n), so streams can be split and consumed independently.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

  auto next() -> std::uint64_t;
  auto uniform() -> double;                          // [0, 1)
  auto uniform(double lo, double hi) -> double;      // [lo, hi)
  auto below(std::uint64_t bound) -> std::uint64_t;  // [0, bound)
  // Index drawn with probability proportional to weights.
  auto categorical(std::span<const double> weights) -> std::size_t;
  auto split(std::uint64_t stream) const -> CounterRng;

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

struct DurationRange {
  double lo = 0.1;
  double hi = 1.0;
};

struct TruthNode {
  std::optional<std::size_t> parent;
  double duration = 0.0;  // length of the edge from the parent
  Sample label;
  bool leaf = false;
};

// Rooted binary tree with a full label at every node.
struct TruthTree {
  std::vector<TruthNode> nodes;
  std::size_t root = 0;

  auto to_phylo_tree() const -> PhyloTree;
  auto labels() const -> std::vector<Sample>;
};

struct Simulation {
  TruthTree truth;
  std::vector<Sample> leaves;
};

// Random coalescent-style binary topology over k leaves, root label drawn from
// the stationary distributions, sites evolved with P^t along each edge and the
// location moved by ceil(t) walk steps.
auto simulate(int k, int sites, const SiteModel& model, const RandomWalk* geo, DurationRange durations,
              std::uint64_t seed) -> Simulation;

}  // namespace phylomst
