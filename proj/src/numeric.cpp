#include "phylomst/numeric.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "phylomst/errors.hpp"

namespace phylomst {

namespace {

auto checked(const std::function<double(double)>& f, double t) -> double {
  const auto value = f(t);
  if (std::isnan(value) || value == std::numeric_limits<double>::infinity()) {
    fail(ErrorKind::numeric, "objective is not finite at t = " + std::to_string(t));
  }
  return value;
}

}  // namespace

auto grid_sup_t(const std::function<double(double)>& f, const GridOptions& options) -> GridSupremum {
  if (!(options.t_lo < options.t_hi) || options.points < 2) {
    fail(ErrorKind::domain, "grid_sup_t needs t_lo < t_hi and at least two grid points");
  }
  if (options.log_spaced && options.t_lo <= 0.0) {
    fail(ErrorKind::domain, "log-spaced grid needs t_lo > 0");
  }

  // Work in u = log t for log-spaced grids so the golden bracket is scale-free.
  const auto to_t = [&](double u) { return options.log_spaced ? std::exp(u) : u; };
  const auto u_lo = options.log_spaced ? std::log(options.t_lo) : options.t_lo;
  const auto u_hi = options.log_spaced ? std::log(options.t_hi) : options.t_hi;
  const auto n = options.points;

  auto grid = std::vector<double>(n);
  auto values = std::vector<double>(n);
  auto best = 0;
  for (auto i = 0; i < n; ++i) {
    grid[i] = (i == n - 1) ? u_hi : u_lo + (u_hi - u_lo) * i / (n - 1);
    values[i] = checked(f, to_t(grid[i]));
    if (values[i] > values[best]) best = i;
  }

  auto best_t = to_t(grid[best]);
  auto best_value = values[best];

  // Golden-section search on the bracket around the best grid point.
  if (std::isfinite(best_value)) {
    constexpr auto inv_phi = 0.6180339887498949;
    auto a = grid[best > 0 ? best - 1 : 0];
    auto b = grid[best < n - 1 ? best + 1 : n - 1];
    auto c = b - inv_phi * (b - a);
    auto d = a + inv_phi * (b - a);
    auto fc = checked(f, to_t(c));
    auto fd = checked(f, to_t(d));
    for (auto it = 0; it < options.refinements; ++it) {
      if (fc > best_value) { best_value = fc; best_t = to_t(c); }
      if (fd > best_value) { best_value = fd; best_t = to_t(d); }
      const auto width = std::abs(to_t(b) - to_t(a));
      if (width <= options.rel_tol * std::max(std::abs(best_t), std::numeric_limits<double>::min())) break;
      if (fc >= fd) {
        b = d; d = c; fd = fc;
        c = b - inv_phi * (b - a);
        fc = checked(f, to_t(c));
      } else {
        a = c; c = d; fc = fd;
        d = a + inv_phi * (b - a);
        fd = checked(f, to_t(d));
      }
    }
  }

  auto result = GridSupremum{best_t, best_value, best == 0 || best == n - 1};
  if (options.value_at_zero && *options.value_at_zero >= result.value) {
    result = GridSupremum{0.0, *options.value_at_zero, true};
  }
  if (options.value_at_infinity && *options.value_at_infinity >= result.value) {
    result = GridSupremum{std::numeric_limits<double>::infinity(), *options.value_at_infinity, true};
  }
  return result;
}

}  // namespace phylomst
