#include "phylomst/substitution.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "phylomst/errors.hpp"
#include "phylomst/numeric.hpp"

namespace phylomst {

namespace {

auto default_alphabet(int m) -> std::string {
  if (m == 4) return "ACGT";
  static const auto generic = std::string{"0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ"};
  if (m > static_cast<int>(generic.size())) {
    fail(ErrorKind::domain, fmt::format("alphabet size {} is not supported", m));
  }
  return generic.substr(0, m);
}

void check_rate(double mu) {
  if (!(mu > 0.0) || !std::isfinite(mu)) {
    fail(ErrorKind::domain, fmt::format("substitution rate must be positive and finite, got {}", mu));
  }
}

}  // namespace

auto SiteModel::binary_symmetric(double mu) -> SiteModel {
  check_rate(mu);
  auto model = SiteModel{};
  model.kind_ = ModelKind::binary_symmetric;
  model.mu_ = mu;
  model.alphabet_ = "01";
  model.pi_ = {0.5, 0.5};
  model.exchangeability_ = {0.0, 2.0 * mu, 2.0 * mu, 0.0};
  model.relaxation_rate_ = 2.0 * mu;
  return model;
}

auto SiteModel::jc69(double mu) -> SiteModel {
  check_rate(mu);
  auto model = SiteModel{};
  model.kind_ = ModelKind::jc69;
  model.mu_ = mu;
  model.alphabet_ = "ACGT";
  model.pi_ = {0.25, 0.25, 0.25, 0.25};
  model.exchangeability_.assign(16, mu);
  for (auto a = 0; a < 4; ++a) model.exchangeability_[a * 4 + a] = 0.0;
  model.relaxation_rate_ = mu;
  return model;
}

auto SiteModel::gtr(std::vector<double> pi, std::vector<double> exchangeability) -> SiteModel {
  const auto m = static_cast<int>(pi.size());
  if (m < 2) fail(ErrorKind::domain, "GTR model needs at least two states");
  if (static_cast<int>(exchangeability.size()) != m * m) {
    fail(ErrorKind::domain, fmt::format("GTR exchangeability matrix must be {0}x{0}", m));
  }
  for (auto p : pi) {
    if (!(p > 0.0) || !std::isfinite(p)) fail(ErrorKind::domain, "GTR stationary entries must be positive");
  }
  const auto total = std::accumulate(pi.begin(), pi.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-6) {
    fail(ErrorKind::domain, fmt::format("GTR stationary distribution sums to {}, not 1", total));
  }
  for (auto& p : pi) p /= total;

  for (auto a = 0; a < m; ++a) {
    if (exchangeability[a * m + a] != 0.0) fail(ErrorKind::domain, "GTR exchangeability diagonal must be zero");
    for (auto b = 0; b < m; ++b) {
      const auto s_ab = exchangeability[a * m + b];
      const auto s_ba = exchangeability[b * m + a];
      if (!(s_ab >= 0.0) || !std::isfinite(s_ab)) {
        fail(ErrorKind::domain, "GTR exchangeabilities must be finite and nonnegative");
      }
      if (std::abs(s_ab - s_ba) > 1e-12 * std::max(1.0, std::abs(s_ab))) {
        fail(ErrorKind::domain, "GTR exchangeability matrix must be symmetric");
      }
    }
  }

  auto model = SiteModel{};
  model.kind_ = ModelKind::gtr;
  model.mu_ = 1.0;
  model.alphabet_ = default_alphabet(m);
  model.pi_ = std::move(pi);
  model.exchangeability_ = std::move(exchangeability);

  // B = Pi^{1/2} Q Pi^{-1/2} is symmetric: B_ab = S_ab sqrt(pi_a pi_b).
  model.sqrt_pi_.resize(m);
  for (auto a = 0; a < m; ++a) model.sqrt_pi_[a] = std::sqrt(model.pi_[a]);
  auto sym = Eigen::MatrixXd(m, m);
  for (auto a = 0; a < m; ++a) {
    auto row_sum = 0.0;
    for (auto b = 0; b < m; ++b) {
      if (a == b) continue;
      const auto s = 0.5 * (model.exchangeability_[a * m + b] + model.exchangeability_[b * m + a]);
      row_sum += s * model.pi_[b];
      sym(a, b) = s * model.sqrt_pi_[a] * model.sqrt_pi_[b];
    }
    sym(a, a) = -row_sum;
  }
  const auto solver = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>{sym};
  model.eigenvalues_.resize(m);
  model.eigenvectors_.resize(m * m);
  for (auto k = 0; k < m; ++k) {
    model.eigenvalues_[k] = solver.eigenvalues()(k);
    for (auto a = 0; a < m; ++a) model.eigenvectors_[a * m + k] = solver.eigenvectors()(a, k);
  }
  // Ascending order: the last eigenvalue is the stationary zero, the one before
  // it governs relaxation.
  model.relaxation_rate_ = -model.eigenvalues_[m - 2];
  if (!(model.relaxation_rate_ > 1e-12)) {
    fail(ErrorKind::domain, "GTR rate matrix is reducible (exchangeability graph is disconnected)");
  }
  return model;
}

auto SiteModel::name() const -> std::string {
  switch (kind_) {
    case ModelKind::binary_symmetric: return "binary";
    case ModelKind::jc69: return "jc69";
    case ModelKind::gtr: return "gtr";
  }
  return "unknown";
}

auto SiteModel::symbol_of(char c) const -> Symbol {
  const auto upper = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  const auto pos = alphabet_.find(upper);
  if (pos == std::string::npos) {
    fail(ErrorKind::domain, fmt::format("symbol '{}' is not in the {} alphabet \"{}\"", c, name(), alphabet_));
  }
  return static_cast<Symbol>(pos);
}

auto SiteModel::encode(std::string_view sequence) const -> std::vector<Symbol> {
  auto result = std::vector<Symbol>{};
  result.reserve(sequence.size());
  for (auto c : sequence) result.push_back(symbol_of(c));
  return result;
}

void SiteModel::check_symbol(int a) const {
  if (a < 0 || a >= states()) {
    fail(ErrorKind::domain, fmt::format("symbol index {} outside alphabet of size {}", a, states()));
  }
}

auto SiteModel::transition_prob(int a, int b, double t) const -> double {
  check_symbol(a);
  check_symbol(b);
  if (std::isnan(t) || t < 0.0) fail(ErrorKind::domain, fmt::format("duration must be nonnegative, got {}", t));

  switch (kind_) {
    case ModelKind::binary_symmetric: {
      const auto decay = std::exp(-2.0 * mu_ * t);
      return a == b ? 0.5 + 0.5 * decay : 0.5 - 0.5 * decay;
    }
    case ModelKind::jc69: {
      const auto decay = std::exp(-mu_ * t);
      return a == b ? 0.25 + 0.75 * decay : 0.25 - 0.25 * decay;
    }
    case ModelKind::gtr: {
      if (std::isinf(t)) return pi_[b];
      const auto m = states();
      auto sum = 0.0;
      for (auto k = 0; k < m; ++k) {
        sum += eigenvectors_[a * m + k] * eigenvectors_[b * m + k] * std::exp(eigenvalues_[k] * t);
      }
      return std::clamp(sum * sqrt_pi_[b] / sqrt_pi_[a], 0.0, 1.0);
    }
  }
  return 0.0;
}

auto SiteModel::transition_matrix(double t) const -> std::vector<double> {
  const auto m = states();
  auto p = std::vector<double>(m * m);
  for (auto a = 0; a < m; ++a) {
    for (auto b = 0; b < m; ++b) p[a * m + b] = transition_prob(a, b, t);
  }
  return p;
}

auto CountMatrix::mismatches() const -> std::int64_t {
  auto d = std::int64_t{0};
  for (auto a = 0; a < states; ++a) {
    for (auto b = 0; b < states; ++b) {
      if (a != b) d += at(a, b);
    }
  }
  return d;
}

auto count_pairs(int states, std::span<const Symbol> x, std::span<const Symbol> y) -> CountMatrix {
  if (x.size() != y.size()) {
    fail(ErrorKind::domain, fmt::format("sequence lengths differ ({} vs {})", x.size(), y.size()));
  }
  auto result = CountMatrix{states, std::vector<std::int64_t>(states * states, 0), static_cast<std::int64_t>(x.size())};
  for (auto i = std::size_t{0}; i < x.size(); ++i) {
    if (x[i] >= states || y[i] >= states) fail(ErrorKind::domain, "symbol index outside alphabet");
    ++result.counts[x[i] * states + y[i]];
  }
  return result;
}

auto sequence_log_likelihood(const SiteModel& model, const CountMatrix& counts, double t) -> double {
  const auto m = model.states();
  if (counts.states != m) fail(ErrorKind::domain, "count matrix does not match model alphabet");
  const auto p = model.transition_matrix(t);
  auto sum = 0.0;
  for (auto i = 0; i < m * m; ++i) {
    if (counts.counts[i] == 0) continue;
    sum += static_cast<double>(counts.counts[i]) * std::log(p[i]);
  }
  return sum;
}

auto transition_prob(const SiteModel& model, int a, int b, double t) -> double {
  return model.transition_prob(a, b, t);
}

auto stationary(const SiteModel& model) -> std::vector<double> { return model.stationary(); }

namespace {

// Closed-form supremum for models whose kernel depends only on match/mismatch:
// P_same = base + (1 - base) z, P_diff = base (1 - z), z = exp(-rate t).
// The stationary point of the log-likelihood in z is z* = 1 - d / (n (1 - base)).
auto sup_two_class(std::int64_t n, std::int64_t d, double base, double rate) -> SupResult {
  if (d == 0) return {0.0, 0.0};
  const auto nd = static_cast<double>(n);
  const auto dd = static_cast<double>(d);
  const auto z = 1.0 - dd / (nd * (1.0 - base));
  if (z <= 0.0) {
    // Supremum is the stationary limit: every site contributes log(base).
    return {k_infinite_time, -nd * std::log(base)};
  }
  const auto same = base + (1.0 - base) * z;
  const auto diff = base * (1.0 - z);
  const auto loglik = (nd - dd) * std::log(same) + dd * std::log(diff);
  return {-std::log(z) / rate, -loglik};
}

}  // namespace

auto sup_seq_loglik(const SiteModel& model, const CountMatrix& counts) -> SupResult {
  if (counts.total < 1) fail(ErrorKind::domain, "sup_seq_loglik needs at least one site");
  if (counts.states != model.states()) fail(ErrorKind::domain, "count matrix does not match model alphabet");

  switch (model.kind()) {
    case ModelKind::jc69:
      return sup_two_class(counts.total, counts.mismatches(), 0.25, model.mu());
    case ModelKind::binary_symmetric:
      return sup_two_class(counts.total, counts.mismatches(), 0.5, 2.0 * model.mu());
    case ModelKind::gtr:
      break;
  }

  if (counts.mismatches() == 0) return {0.0, 0.0};

  const auto m = model.states();
  auto at_infinity = 0.0;
  for (auto a = 0; a < m; ++a) {
    for (auto b = 0; b < m; ++b) {
      at_infinity += static_cast<double>(counts.at(a, b)) * std::log(model.stationary()[b]);
    }
  }
  auto options = GridOptions{};
  options.value_at_zero = -std::numeric_limits<double>::infinity();
  options.value_at_infinity = at_infinity;
  const auto best = grid_sup_t([&](double t) { return sequence_log_likelihood(model, counts, t); }, options);
  return {best.t, -best.value};
}

}  // namespace phylomst
