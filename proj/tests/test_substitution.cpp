#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "phylomst/errors.hpp"
#include "phylomst/numeric.hpp"
#include "phylomst/substitution.hpp"
#include "support.hpp"

using namespace phylomst;
using namespace phylomst::testing;

namespace {

auto jc_counts(int n, int d) -> CountMatrix {
  auto c = CountMatrix{4, std::vector<std::int64_t>(16, 0), n};
  c.counts[0] = n - d;
  c.counts[1] = d;
  return c;
}

auto binary_counts(int n, int d) -> CountMatrix {
  return CountMatrix{2, {n - d, d, 0, 0}, n};
}

}  // namespace

TEST(Substitution, Jc69ClosedFormMatchesMatrixExponential) {
  const auto model = SiteModel::jc69(1.0);
  EXPECT_DOUBLE_EQ(model.transition_prob(0, 0, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(model.transition_prob(0, 0, k_infinite_time), 0.25);
  EXPECT_NEAR(model.transition_prob(0, 0, 1.0), 0.5259095808785818, 1e-15);
  for (auto t : {0.01, 0.3, 1.0, 2.5, 10.0}) {
    const auto oracle = expm_oracle(model, t);
    for (auto a = 0; a < 4; ++a) {
      for (auto b = 0; b < 4; ++b) EXPECT_NEAR(model.transition_prob(a, b, t), oracle(a, b), 1e-12);
    }
  }
}

TEST(Substitution, BinaryClosedFormMatchesMatrixExponential) {
  const auto model = SiteModel::binary_symmetric(0.7);
  for (auto t : {0.05, 0.5, 3.0}) {
    const auto oracle = expm_oracle(model, t);
    for (auto a = 0; a < 2; ++a) {
      for (auto b = 0; b < 2; ++b) EXPECT_NEAR(model.transition_prob(a, b, t), oracle(a, b), 1e-12);
    }
  }
}

TEST(Substitution, GtrMatchesMatrixExponential) {
  auto rng = Rng{11};
  for (auto trial = 0; trial < 20; ++trial) {
    const auto model = random_gtr(rng, trial % 2 == 0 ? 4 : 3);
    for (auto t : {0.0, 0.02, 0.4, 1.7, 9.0}) {
      const auto oracle = expm_oracle(model, t);
      const auto m = model.states();
      for (auto a = 0; a < m; ++a) {
        for (auto b = 0; b < m; ++b) EXPECT_NEAR(model.transition_prob(a, b, t), oracle(a, b), 1e-11);
      }
    }
  }
}

TEST(Substitution, StationaryDistributions) {
  EXPECT_EQ(stationary(SiteModel::jc69(1.0)), (std::vector<double>{0.25, 0.25, 0.25, 0.25}));
  EXPECT_EQ(stationary(SiteModel::binary_symmetric(1.0)), (std::vector<double>{0.5, 0.5}));
  const auto pi = std::vector<double>{0.1, 0.2, 0.3, 0.4};
  auto s = std::vector<double>(16, 1.0);
  for (auto a = 0; a < 4; ++a) s[a * 4 + a] = 0.0;
  EXPECT_EQ(stationary(SiteModel::gtr(pi, s)), pi);
}

TEST(Substitution, RowsSumToOne) {
  auto rng = Rng{5};
  const auto models = std::vector<SiteModel>{SiteModel::jc69(1.3), SiteModel::binary_symmetric(0.4), random_gtr(rng)};
  for (const auto& model : models) {
    for (auto t : {0.0, 0.1, 1.0, 50.0}) {
      const auto p = model.transition_matrix(t);
      const auto m = model.states();
      for (auto a = 0; a < m; ++a) {
        EXPECT_NEAR(std::accumulate(p.begin() + a * m, p.begin() + (a + 1) * m, 0.0), 1.0, 1e-10);
      }
    }
  }
}

TEST(Substitution, DetailedBalance) {
  auto rng = Rng{21};
  for (auto trial = 0; trial < 10; ++trial) {
    const auto model = random_gtr(rng);
    const auto& pi = model.stationary();
    for (auto t : {0.0, 0.05, 0.5, 2.0, 20.0}) {
      for (auto a = 0; a < 4; ++a) {
        for (auto b = 0; b < 4; ++b) {
          EXPECT_NEAR(pi[a] * model.transition_prob(a, b, t), pi[b] * model.transition_prob(b, a, t), 1e-10);
        }
      }
    }
  }
}

TEST(Substitution, ChapmanKolmogorov) {
  auto rng = Rng{3};
  auto dt = std::uniform_real_distribution<double>{0.0, 3.0};
  for (auto trial = 0; trial < 20; ++trial) {
    const auto model = trial % 2 == 0 ? random_gtr(rng) : SiteModel::jc69(0.5 + trial * 0.1);
    const auto t1 = dt(rng);
    const auto t2 = dt(rng);
    const auto m = model.states();
    const auto a = model.transition_matrix(t1);
    const auto b = model.transition_matrix(t2);
    const auto ab = model.transition_matrix(t1 + t2);
    for (auto i = 0; i < m; ++i) {
      for (auto j = 0; j < m; ++j) {
        auto sum = 0.0;
        for (auto k = 0; k < m; ++k) sum += a[i * m + k] * b[k * m + j];
        EXPECT_NEAR(sum, ab[i * m + j], 1e-9);
      }
    }
  }
}

TEST(Substitution, SupremumExamples) {
  const auto jc = SiteModel::jc69(1.0);
  const auto zero = sup_seq_loglik(jc, jc_counts(4, 0));
  EXPECT_EQ(zero.t_star, 0.0);
  EXPECT_EQ(zero.cost, 0.0);

  const auto one = sup_seq_loglik(jc, jc_counts(4, 1));
  EXPECT_NEAR(one.cost, 3.347952867143343, 1e-12);
  EXPECT_NEAR(std::exp(-one.t_star), 2.0 / 3.0, 1e-12);

  const auto three = sup_seq_loglik(jc, jc_counts(4, 3));
  EXPECT_EQ(three.t_star, k_infinite_time);
  EXPECT_NEAR(three.cost, 5.545177444479562, 1e-12);

  const auto bin = sup_seq_loglik(SiteModel::binary_symmetric(1.0), binary_counts(4, 1));
  EXPECT_NEAR(bin.cost, 2.249340578475233, 1e-12);
  EXPECT_NEAR(bin.cost, 4.0 * entropy(0.25), 1e-12);
}

TEST(Substitution, ClosedFormAgreesWithGrid) {
  for (const auto& model : {SiteModel::jc69(1.0), SiteModel::binary_symmetric(1.0)}) {
    for (auto n = 1; n <= 20; ++n) {
      for (auto d = 0; d <= n; ++d) {
        const auto counts = model.states() == 4 ? jc_counts(n, d) : binary_counts(n, d);
        const auto closed = sup_seq_loglik(model, counts);
        auto options = GridOptions{};
        options.value_at_zero = d == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
        options.value_at_infinity = -static_cast<double>(n) * std::log(static_cast<double>(model.states()));
        const auto grid = grid_sup_t([&](double t) { return sequence_log_likelihood(model, counts, t); }, options);
        EXPECT_NEAR(closed.cost, -grid.value, 1e-6) << model.name() << " n=" << n << " d=" << d;
      }
    }
  }
}

TEST(Substitution, BinaryEntropyForm) {
  const auto model = SiteModel::binary_symmetric(2.0);
  for (auto n = 1; n <= 30; ++n) {
    for (auto d = 0; d <= n; ++d) {
      const auto cost = sup_seq_loglik(model, binary_counts(n, d)).cost;
      const auto expected = 2 * d <= n ? n * entropy(static_cast<double>(d) / n) : n * std::log(2.0);
      EXPECT_NEAR(cost, expected, 1e-9) << "n=" << n << " d=" << d;
    }
  }
}

TEST(Substitution, CostMonotoneInDistance) {
  for (const auto& model : {SiteModel::jc69(1.0), SiteModel::binary_symmetric(1.0)}) {
    for (auto n = 1; n <= 25; ++n) {
      auto previous = -1.0;
      for (auto d = 0; d <= n; ++d) {
        const auto counts = model.states() == 4 ? jc_counts(n, d) : binary_counts(n, d);
        const auto cost = sup_seq_loglik(model, counts).cost;
        EXPECT_GE(cost, previous - 1e-12);
        previous = cost;
      }
    }
  }
}

TEST(Substitution, GtrSupremumDominatesEveryDuration) {
  auto rng = Rng{8};
  for (auto trial = 0; trial < 10; ++trial) {
    const auto model = random_gtr(rng);
    const auto xs = random_sequence(rng, model, 30);
    const auto x = model.encode(xs);
    const auto y = model.encode(mutate(rng, model, xs, 0.2 * (trial % 5)));
    const auto counts = count_pairs(4, x, y);
    const auto sup = sup_seq_loglik(model, counts);
    for (auto t = 0.001; t < 200.0; t *= 1.05) {
      EXPECT_GE(-sequence_log_likelihood(model, counts, t), sup.cost - 1e-9);
    }
    if (std::isfinite(sup.t_star)) EXPECT_NEAR(-sequence_log_likelihood(model, counts, sup.t_star), sup.cost, 1e-9);
  }
}

TEST(Substitution, Errors) {
  const auto jc = SiteModel::jc69(1.0);
  const auto expect_kind = [](auto&& f, ErrorKind kind) {
    try {
      f();
      ADD_FAILURE() << "no error raised";
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), kind) << e.what();
    }
  };
  expect_kind([&] { jc.transition_prob(0, 4, 1.0); }, ErrorKind::domain);
  expect_kind([&] { jc.transition_prob(0, 1, -1.0); }, ErrorKind::domain);
  expect_kind([&] { jc.symbol_of('N'); }, ErrorKind::domain);
  expect_kind([&] { SiteModel::jc69(0.0); }, ErrorKind::domain);
  expect_kind([&] { sup_seq_loglik(jc, CountMatrix{4, std::vector<std::int64_t>(16, 0), 0}); }, ErrorKind::domain);
  expect_kind([&] { SiteModel::gtr({0.5, 0.6}, {0, 1, 1, 0}); }, ErrorKind::domain);
  expect_kind([&] { SiteModel::gtr({0.5, 0.5}, {0, 1, 2, 0}); }, ErrorKind::domain);
  EXPECT_EQ(jc.symbol_of('g'), jc.symbol_of('G'));
}
