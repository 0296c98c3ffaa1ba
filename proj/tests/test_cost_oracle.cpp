#include <cmath>

#include <gtest/gtest.h>

#include "phylomst/cost_oracle.hpp"
#include "phylomst/errors.hpp"
#include "support.hpp"

using namespace phylomst;
using namespace phylomst::testing;

namespace {

auto plain(SiteModel site) -> CostModel { return CostModel{std::move(site), std::nullopt, EdgeMode::independent}; }

auto with_geo(SiteModel site, GeoGraph graph, GeoPrecision precision, EdgeMode mode = EdgeMode::independent)
    -> CostModel {
  return CostModel{std::move(site), make_geography(std::move(graph), 0.0125, precision), mode};
}

template <typename F>
void expect_error(F&& f, ErrorKind kind) {
  try {
    f();
    ADD_FAILURE() << "no error raised";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), kind) << e.what();
  }
}

}  // namespace

TEST(CostOracle, NodeCosts) {
  EXPECT_NEAR(node_cost(Sample{"a", "ACGT", {}}, plain(SiteModel::jc69(1.0))), 5.545177444479562, 1e-12);
  EXPECT_NEAR(node_cost(Sample{"a", "010", {}}, plain(SiteModel::binary_symmetric(1.0))), 2.0794415416798357, 1e-12);
  const auto geo = with_geo(SiteModel::jc69(1.0), triangle(), GeoPrecision::estimated);
  EXPECT_NEAR(node_cost(Sample{"a", "AC", 1}, geo), 3.8712010109078907, 1e-12);
  expect_error([] { node_cost(Sample{"a", "ACGN", {}}, plain(SiteModel::jc69(1.0))); }, ErrorKind::domain);
}

TEST(CostOracle, EdgeCosts) {
  const auto jc = plain(SiteModel::jc69(1.0));
  EXPECT_EQ(edge_cost(Sample{"a", "ACGT", {}}, Sample{"b", "ACGT", {}}, jc).phi, 0.0);
  const auto d1 = edge_cost(Sample{"a", "ACGT", {}}, Sample{"b", "ACGA", {}}, jc);
  EXPECT_NEAR(d1.phi, 3.347952867143343, 1e-12);
  EXPECT_NEAR(d1.t_star, std::log(1.5), 1e-12);
  EXPECT_EQ(d1.geo_part, 0.0);

  const auto estimated = with_geo(SiteModel::jc69(1.0), triangle(), GeoPrecision::estimated);
  const auto e = edge_cost(Sample{"a", "AC", 0}, Sample{"b", "AC", 0}, estimated);
  EXPECT_EQ(e.sequence_part, 0.0);
  EXPECT_NEAR(e.phi / std::log(2.0), 1.0, 0.0125);
  const auto exact = with_geo(SiteModel::jc69(1.0), triangle(), GeoPrecision::exact_scan);
  EXPECT_NEAR(edge_cost(Sample{"a", "AC", 0}, Sample{"b", "AC", 0}, exact).phi, std::log(2.0), 1e-12);

  expect_error([&] { edge_cost(Sample{"a", "ACG", {}}, Sample{"b", "ACGT", {}}, jc); }, ErrorKind::domain);
}

TEST(CostOracle, MstWeights) {
  EXPECT_NEAR(mst_weight(3.347952867143343, 5.545177444479562), -2.197224577336219, 1e-12);
  const auto samples = std::vector<Sample>{{"A", "ACGT", {}}, {"B", "ACGA", {}}};
  const auto costs = build_cost_matrix(samples, plain(SiteModel::jc69(1.0)));
  EXPECT_NEAR(costs.weight(0, 1), -2.197224577336219, 1e-12);
  EXPECT_EQ(costs.weight(0, 1), costs.weight(1, 0));
  const auto same = build_cost_matrix(std::vector<Sample>{{"A", "ACGT", {}}, {"B", "ACGT", {}}},
                                      plain(SiteModel::jc69(1.0)));
  EXPECT_NEAR(same.weight(0, 1), -4.0 * std::log(4.0), 1e-12);
}

TEST(CostOracle, SymmetricWeightEqualsMstWeight) {
  auto rng = Rng{9};
  const auto models = std::vector<CostModel>{
      plain(SiteModel::jc69(1.0)), plain(SiteModel::binary_symmetric(0.5)), plain(random_gtr(rng)),
      with_geo(random_gtr(rng), random_graph(rng, 6), GeoPrecision::estimated),
      with_geo(SiteModel::jc69(2.0), random_graph(rng, 5), GeoPrecision::exact_scan, EdgeMode::shared_t)};
  auto loc = std::uniform_int_distribution<int>{0, 4};
  for (const auto& model : models) {
    for (auto trial = 0; trial < 20; ++trial) {
      const auto xs = random_sequence(rng, model.site, 12);
      auto samples = std::vector<Sample>{{"u", xs, {}}, {"v", mutate(rng, model.site, xs, 0.3), {}}};
      if (model.geo) {
        samples[0].location = loc(rng);
        samples[1].location = loc(rng);
      }
      const auto oracle = SampleCostOracle{samples, model};
      const auto w = mst_weight(oracle.edge_cost(0, 1), oracle.node_cost(1));
      const auto w_rev = mst_weight(oracle.edge_cost(1, 0), oracle.node_cost(0));
      EXPECT_NEAR(w, w_rev, 1e-9);
      EXPECT_NEAR(oracle.symmetric_weight(0, 1), w, 1e-9);
      EXPECT_NEAR(oracle.symmetric_weight(0, 0), oracle.edge_cost(0, 0) - oracle.node_cost(0), 1e-12);
    }
  }
}

TEST(CostOracle, MatrixShape) {
  auto rng = Rng{2};
  const auto model = plain(SiteModel::jc69(1.0));
  auto samples = std::vector<Sample>{};
  const auto root = random_sequence(rng, model.site, 10);
  for (auto i = 0; i < 5; ++i) samples.push_back({"s" + std::to_string(i), mutate(rng, model.site, root, 0.2), {}});
  samples[4].sequence = samples[1].sequence;
  const auto costs = build_cost_matrix(samples, model);
  ASSERT_EQ(costs.size(), 5u);
  auto pairs = 0;
  for (auto i = std::size_t{0}; i < 5; ++i) {
    for (auto j = i + 1; j < 5; ++j) {
      ++pairs;
      EXPECT_TRUE(std::isfinite(costs.weight(i, j)));
      EXPECT_EQ(costs.weight(i, j), costs.weight(j, i));
    }
  }
  EXPECT_EQ(pairs, 10);
  EXPECT_EQ(costs.diagnostic(1, 4).phi, 0.0);

  const auto two = build_cost_matrix(std::vector<Sample>(samples.begin(), samples.begin() + 2), model);
  EXPECT_EQ(two.node_costs.size(), 2u);
}

TEST(CostOracle, ValidationErrors) {
  const auto jc = plain(SiteModel::jc69(1.0));
  expect_error([&] { build_cost_matrix(std::vector<Sample>{{"a", "AC", {}}, {"a", "AG", {}}}, jc); },
               ErrorKind::domain);
  expect_error([&] { build_cost_matrix(std::vector<Sample>{{"a", "AC", {}}, {"b", "AGT", {}}}, jc); },
               ErrorKind::domain);
  expect_error([&] { build_cost_matrix(std::vector<Sample>{{"a", "AC", {}}}, jc); }, ErrorKind::domain);
  const auto geo = with_geo(SiteModel::jc69(1.0), triangle(), GeoPrecision::estimated);
  expect_error([&] { build_cost_matrix(std::vector<Sample>{{"a", "AC", 0}, {"b", "AG", {}}}, geo); },
               ErrorKind::domain);
  expect_error([&] { build_cost_matrix(std::vector<Sample>{{"a", "AC", {}}, {"b", "AG", {}}}, geo); },
               ErrorKind::domain);
  expect_error([&] { build_cost_matrix(std::vector<Sample>{{"a", "AC", 0}, {"b", "AG", 7}}, geo); },
               ErrorKind::structural);
}

TEST(CostOracle, PairFailureNamesThePair) {
  auto geo = with_geo(SiteModel::jc69(1.0), triangle(), GeoPrecision::estimated);
  geo.geo->bounds.upper = 0.4;
  try {
    build_cost_matrix(std::vector<Sample>{{"left", "AC", 0}, {"right", "AC", 1}}, geo);
    ADD_FAILURE() << "no error raised";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::bounds);
    EXPECT_NE(std::string{e.what()}.find("'left', 'right'"), std::string::npos) << e.what();
  }
}

TEST(CostOracle, IndependentNeverExceedsSharedTime) {
  auto rng = Rng{77};
  for (auto trial = 0; trial < 30; ++trial) {
    const auto graph = random_graph(rng, 4 + trial % 6);
    const auto nodes = graph.node_count();
    const auto site = trial % 3 == 0 ? random_gtr(rng) : SiteModel::jc69(0.5 + 0.1 * trial);
    const auto independent = with_geo(site, graph, GeoPrecision::exact_scan);
    const auto shared = with_geo(site, graph, GeoPrecision::exact_scan, EdgeMode::shared_t);
    auto loc = std::uniform_int_distribution<int>{0, nodes - 1};
    const auto xs = random_sequence(rng, site, 15);
    const auto u = Sample{"u", xs, loc(rng)};
    const auto v = Sample{"v", mutate(rng, site, xs, 0.1 * (trial % 8)), loc(rng)};
    EXPECT_LE(edge_cost(u, v, independent).phi, edge_cost(u, v, shared).phi + 1e-9);
  }
}

TEST(CostOracle, SharedTimeMatchesDirectScan) {
  auto rng = Rng{5};
  const auto site = SiteModel::jc69(1.0);
  const auto model = with_geo(site, triangle(), GeoPrecision::exact_scan, EdgeMode::shared_t);
  const auto walk = RandomWalk{triangle()};
  for (auto trial = 0; trial < 10; ++trial) {
    const auto xs = random_sequence(rng, site, 8);
    const auto u = Sample{"u", xs, trial % 3};
    const auto v = Sample{"v", mutate(rng, site, xs, 0.3), (trial + 1) % 3};
    const auto counts = count_pairs(4, site.encode(u.sequence), site.encode(v.sequence));
    auto best = -std::numeric_limits<double>::infinity();
    const auto probs = walk.scan(*u.location, *v.location, 400);
    for (auto t = 1; t <= 400; ++t) best = std::max(best, std::log(probs[t - 1]) + sequence_log_likelihood(site, counts, t));
    EXPECT_NEAR(edge_cost(u, v, model).phi, -best, 1e-9);
  }
}
