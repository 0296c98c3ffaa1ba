#include "phylomst/synth.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include <fmt/format.h>

#include "phylomst/errors.hpp"

namespace phylomst {

namespace {

auto splitmix64(std::uint64_t x) -> std::uint64_t {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

auto padded(char prefix, std::size_t index, std::size_t count) -> std::string {
  const auto width = std::to_string(count).size();
  return fmt::format("{}{:0{}}", prefix, index, width);
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(splitmix64(splitmix64(seed) ^ (stream * 0xd1342543de82ef95ULL))) {}

auto CounterRng::next() -> std::uint64_t { return splitmix64(key_ ^ splitmix64(counter_++)); }

auto CounterRng::uniform() -> double { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

auto CounterRng::uniform(double lo, double hi) -> double { return lo + (hi - lo) * uniform(); }

auto CounterRng::below(std::uint64_t bound) -> std::uint64_t {
  // Rejection keeps the draw exactly uniform.
  const auto limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  auto x = next();
  while (x >= limit) x = next();
  return x % bound;
}

auto CounterRng::categorical(std::span<const double> weights) -> std::size_t {
  const auto total = std::accumulate(weights.begin(), weights.end(), 0.0);
  auto target = uniform() * total;
  for (auto i = std::size_t{0}; i < weights.size(); ++i) {
    target -= weights[i];
    if (target < 0.0) return i;
  }
  // Rounding can leave a sliver of mass; return the last positive entry.
  for (auto i = weights.size(); i-- > 0;) {
    if (weights[i] > 0.0) return i;
  }
  return weights.size() - 1;
}

auto CounterRng::split(std::uint64_t stream) const -> CounterRng {
  auto child = *this;
  child.key_ = splitmix64(key_ ^ splitmix64(~stream));
  child.counter_ = 0;
  return child;
}

auto TruthTree::to_phylo_tree() const -> PhyloTree {
  auto tree = PhyloTree{};
  tree.root = root;
  for (const auto& node : nodes) {
    tree.ids.push_back(node.label.id);
    tree.parent.push_back(node.parent);
  }
  for (auto v = std::size_t{0}; v < nodes.size(); ++v) {
    if (nodes[v].parent) tree.edges.push_back({*nodes[v].parent, v});
  }
  return tree;
}

auto TruthTree::labels() const -> std::vector<Sample> {
  auto result = std::vector<Sample>{};
  for (const auto& node : nodes) result.push_back(node.label);
  return result;
}

auto simulate(int k, int sites, const SiteModel& model, const RandomWalk* geo, DurationRange durations,
              std::uint64_t seed) -> Simulation {
  if (k < 2) fail(ErrorKind::domain, "simulation needs at least two leaves");
  if (sites < 1) fail(ErrorKind::domain, "simulation needs at least one site");
  if (!(durations.lo >= 0.0) || !(durations.hi >= durations.lo) || !std::isfinite(durations.hi)) {
    fail(ErrorKind::domain, "duration range must satisfy 0 <= lo <= hi < inf");
  }

  auto topology_rng = CounterRng{seed, 0};
  auto duration_rng = CounterRng{seed, 1};
  auto sequence_rng = CounterRng{seed, 2};
  auto location_rng = CounterRng{seed, 3};

  // Leaves are nodes 0..k-1; each merge appends a parent.
  const auto total = static_cast<std::size_t>(2 * k - 1);
  auto sim = Simulation{};
  auto& nodes = sim.truth.nodes;
  nodes.resize(total);
  auto active = std::vector<std::size_t>(k);
  std::iota(active.begin(), active.end(), std::size_t{0});
  for (auto next = static_cast<std::size_t>(k); next < total; ++next) {
    const auto i = topology_rng.below(active.size());
    const auto a = active[i];
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(i));
    const auto j = topology_rng.below(active.size());
    const auto b = active[j];
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(j));
    nodes[a].parent = next;
    nodes[b].parent = next;
    active.push_back(next);
  }
  sim.truth.root = total - 1;
  for (auto v = std::size_t{0}; v < total; ++v) {
    nodes[v].leaf = v < static_cast<std::size_t>(k);
    nodes[v].label.id = nodes[v].leaf ? padded('s', v + 1, k) : padded('n', v + 1 - k, k - 1);
    if (nodes[v].parent) nodes[v].duration = duration_rng.uniform(durations.lo, durations.hi);
  }

  const auto& alphabet = model.alphabet();
  const auto& pi = model.stationary();
  auto& root = nodes[sim.truth.root].label;
  root.sequence.resize(sites);
  for (auto& c : root.sequence) c = alphabet[sequence_rng.categorical(pi)];
  if (geo) root.location = static_cast<NodeId>(location_rng.categorical(geo->spectral().pi));

  // Parents always have larger indices, so a descending sweep visits them first.
  auto neighbor_weights = std::vector<double>{};
  for (auto v = total - 1; v-- > 0;) {
    auto& node = nodes[v];
    const auto& parent = nodes[*node.parent].label;
    const auto p = model.transition_matrix(node.duration);
    const auto m = static_cast<std::size_t>(model.states());
    node.label.sequence.resize(sites);
    for (auto i = 0; i < sites; ++i) {
      const auto from = model.symbol_of(parent.sequence[i]);
      const auto row = std::span<const double>{p.data() + from * m, m};
      node.label.sequence[i] = alphabet[sequence_rng.categorical(row)];
    }
    if (geo) {
      auto here = *parent.location;
      const auto steps = static_cast<int>(std::ceil(node.duration));
      for (auto s = 0; s < steps; ++s) {
        const auto arcs = geo->graph().arcs(here);
        neighbor_weights.clear();
        for (const auto& arc : arcs) neighbor_weights.push_back(arc.weight);
        here = arcs[location_rng.categorical(neighbor_weights)].to;
      }
      node.label.location = here;
    }
  }

  for (auto v = 0; v < k; ++v) sim.leaves.push_back(nodes[v].label);
  return sim;
}

}  // namespace phylomst
