#pragma once

#include <functional>
#include <optional>

namespace phylomst {

struct GridOptions {
  double t_lo = 1e-6;
  double t_hi = 1e3;
  int points = 200;
  int refinements = 200;
  bool log_spaced = true;
  double rel_tol = 1e-10;
  // Limits of the objective as t -> 0 and t -> infinity, when known. Either may be -inf.
  std::optional<double> value_at_zero;
  std::optional<double> value_at_infinity;
};

struct GridSupremum {
  double t;           // 0 or +inf when a supplied limit wins
  double value;
  bool at_boundary;   // best point is t_lo, t_hi, or one of the limits
};

// Supremum of a one-dimensional objective over durations: a coarse grid scan on
// [t_lo, t_hi] followed by golden-section refinement of the best bracket.
// Ties keep the earlier grid point; supplied limits win ties against the grid.
// NaN or +inf objective values raise ErrorKind::numeric.
auto grid_sup_t(const std::function<double(double)>& f, const GridOptions& options = {}) -> GridSupremum;

}  // namespace phylomst
