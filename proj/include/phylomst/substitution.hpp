#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace phylomst {

// Index of a character in a model's alphabet.
using Symbol = std::uint8_t;

inline constexpr double k_infinite_time = std::numeric_limits<double>::infinity();

enum class ModelKind { binary_symmetric, jc69, gtr };

// A reversible per-site substitution process.
//
// Binary-symmetric and JC69 kernels use their closed forms. GTR kernels are
// evaluated from the eigendecomposition of the symmetrized rate matrix
// Pi^{1/2} Q Pi^{-1/2}, where Q_ab = S_ab * pi_b for a != b.
class SiteModel {
 public:
  static auto binary_symmetric(double mu) -> SiteModel;
  static auto jc69(double mu) -> SiteModel;
  // `exchangeability` is the m x m symmetric matrix S in row-major order, zero diagonal.
  static auto gtr(std::vector<double> pi, std::vector<double> exchangeability) -> SiteModel;

  auto kind() const -> ModelKind { return kind_; }
  auto mu() const -> double { return mu_; }
  auto states() const -> int { return static_cast<int>(pi_.size()); }
  auto alphabet() const -> const std::string& { return alphabet_; }
  auto stationary() const -> const std::vector<double>& { return pi_; }
  auto exchangeability() const -> const std::vector<double>& { return exchangeability_; }
  auto name() const -> std::string;

  // Throws ErrorKind::domain for characters outside the alphabet (after upper-casing).
  auto symbol_of(char c) const -> Symbol;
  auto encode(std::string_view sequence) const -> std::vector<Symbol>;

  // P^t(a, b). t = +inf yields the stationary limit.
  auto transition_prob(int a, int b, double t) const -> double;
  // Row-major m x m matrix P^t.
  auto transition_matrix(double t) const -> std::vector<double>;

  // Slowest decay rate of P^t towards stationarity: |P^t(a,b) - pi_b| = O(exp(-rate * t)).
  auto relaxation_rate() const -> double { return relaxation_rate_; }

 private:
  SiteModel() = default;

  void check_symbol(int a) const;

  ModelKind kind_ = ModelKind::jc69;
  double mu_ = 1.0;
  std::string alphabet_;
  std::vector<double> pi_;
  std::vector<double> exchangeability_;
  // GTR spectral data: eigenvalues of the symmetrized rate matrix and its
  // orthonormal eigenvectors (column k stored at [a * m + k]).
  std::vector<double> eigenvalues_;
  std::vector<double> eigenvectors_;
  std::vector<double> sqrt_pi_;
  double relaxation_rate_ = 0.0;
};

// Joint symbol counts of two aligned sequences: counts[a * m + b] is the number
// of sites showing a in the first sequence and b in the second.
struct CountMatrix {
  int states = 0;
  std::vector<std::int64_t> counts;
  std::int64_t total = 0;

  auto at(int a, int b) const -> std::int64_t { return counts[a * states + b]; }
  auto mismatches() const -> std::int64_t;
};

auto count_pairs(int states, std::span<const Symbol> x, std::span<const Symbol> y) -> CountMatrix;

// Sum over sites of log P^t(x_i, y_i), natural log.
auto sequence_log_likelihood(const SiteModel& model, const CountMatrix& counts, double t) -> double;

auto transition_prob(const SiteModel& model, int a, int b, double t) -> double;
auto stationary(const SiteModel& model) -> std::vector<double>;

struct SupResult {
  double t_star;  // k_infinite_time when the supremum is only approached as t grows
  double cost;    // -log sup_t prod_i P^t(x_i, y_i)
};

// Supremum over t >= 0 of the product likelihood, returned as a cost.
// Closed forms for binary-symmetric and JC69; GTR uses grid_sup_t.
auto sup_seq_loglik(const SiteModel& model, const CountMatrix& counts) -> SupResult;

}  // namespace phylomst
