#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "phylomst/cost_oracle.hpp"
#include "phylomst/geo_rw.hpp"
#include "phylomst/numeric.hpp"
#include "phylomst/substitution.hpp"

namespace phylomst {

inline constexpr std::size_t k_max_states = 64;
inline constexpr std::size_t k_max_terminals = 6;
inline constexpr std::size_t k_max_free_states_for_subsets = 16;

// Every sequence of length `sites` over the model alphabet, optionally crossed
// with every location node. State ids are "<sequence>" or "<sequence>@<node>".
struct StateSpace {
  std::vector<Sample> states;

  auto size() const -> std::size_t { return states.size(); }
};

auto enumerate_states(const SiteModel& model, int sites, std::optional<int> locations = std::nullopt) -> StateSpace;

// Index of a state in the enumeration order of enumerate_states.
auto state_index(const SiteModel& model, std::span<const Symbol> sequence, std::optional<int> location,
                 std::optional<int> locations) -> std::size_t;

enum class SteinerMethod {
  automatic,      // subset enumeration when it is small enough, otherwise dynamic programming
  superset_scan,  // min over X containing the terminals of MST(X; w') + sum_{v in X} phi(v)
  dreyfus_wagner  // subset DP over the directed arcs u -> v with cost phi(u, v)
};

// Exact optimum of the node- and edge-weighted Steiner tree over the oracle's
// labels. Caps: at most 64 labels and 6 terminals.
auto exact_steiner_cost(const CostOracle& space, std::span<const std::size_t> terminals,
                        SteinerMethod method = SteinerMethod::automatic) -> double;

struct WalkSupremum {
  double scan_max;    // max over 1 <= t <= t_max of P^t(x, y)
  double zeta;        // max(scan_max, pi(y)), a lower bound on the supremum
  double tail_bound;  // pi(y) + R lambda^t_max, an upper bound on P^t(x, y) for t >= t_max
};

// Reference supremum by dense matrix powers of the walk matrix.
auto brute_force_sup_rw(const RandomWalk& walk, NodeId x, NodeId y, int t_max) -> WalkSupremum;

}  // namespace phylomst
