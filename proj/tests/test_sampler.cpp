#include <gtest/gtest.h>

#include <cmath>

#include "rfim/error.hpp"
#include "rfim/sampler.hpp"
#include "test_util.hpp"

using namespace rfim;
using namespace rfim::test;

TEST(KStar, Rounding) {
  EXPECT_EQ(k_star_for(6, 2.0), 36u);
  EXPECT_EQ(k_star_for(10, 1.5), 32u);
  EXPECT_EQ(k_star_for(1, 3.0), 1u);
  EXPECT_THROW(k_star_for(1000, 10.0), CapacityError);
  EXPECT_THROW(k_star_for(5, 0.0), InputError);
}

TEST(Incremental, SingleVertexIsExact) {
  const auto m = pm_model(Graph::build(1, {}), 0.0, {0.4});
  SamplerConfig cfg;
  cfg.seed = 3;
  const ValidationResult v = validate_incremental(m, cfg, 100000);
  const double p = gibbs_table(m).probs[1];
  EXPECT_NEAR(v.counts[1] / 1e5, p, 3.0 * binom_sigma(p, 1e5));
  const auto [conf, rep] = incremental_sample(m, cfg);
  EXPECT_EQ(rep.total_updates, 0u);
  EXPECT_EQ(rep.ordering, std::vector<int>{0});
}

TEST(Incremental, LoneDrawUsesRawField) {
  const auto pm = pm_model(gen::path(2), 3.0, {0.5, 0.0});
  EXPECT_TRUE(draw_lone_vertex(pm, 0, logistic(1.0) - 1e-12));
  EXPECT_FALSE(draw_lone_vertex(pm, 0, logistic(1.0) + 1e-12));
  const auto z = to_zero_one(pm);
  EXPECT_EQ(draw_lone_vertex(z, 0, 0.3), 0.3 <= logistic(z.field(0)));
  const auto pinned = pm.with_pinning({{1, false}});
  EXPECT_FALSE(draw_lone_vertex(pinned, 1, 1e-9));
}

TEST(Incremental, P2LongRunsMatchOracle) {
  const auto m = pm_model(gen::path(2), 0.8, {0.3, -0.5});
  SamplerConfig cfg;
  cfg.c_star = 10.0;
  cfg.seed = 4;
  const ValidationResult v = validate_incremental(m, cfg, 100000);
  EXPECT_GE(v.k_star, 1000u);
  EXPECT_LE(v.tv, 0.01);
}

TEST(Incremental, BetaZeroIsExactForAnyKStar) {
  const auto m = pm_model(gen::cycle(4), 0.0, {0.3, -0.5, 1.0, 0.0});
  SamplerConfig cfg;
  cfg.c_star = 0.01;
  cfg.seed = 5;
  const ValidationResult v = validate_incremental(m, cfg, 100000);
  EXPECT_EQ(v.k_star, 2u);
  EXPECT_LE(v.tv, 3.0 * v.stat_err);
}

TEST(Incremental, PlanStructure) {
  const auto m = pm_model(gen::grid(3, 3), 0.3, random_field(9, 1.0, 1));
  SamplerConfig cfg;
  cfg.c_star = 1.0;
  cfg.ordering_seed = 9;
  const IncrementalPlan plan(m, cfg);
  EXPECT_EQ(plan.k_star(), 9u);
  EXPECT_EQ(plan.num_stages(), 9u);
  EXPECT_EQ(plan.total_updates(), 8u * 9u);
  std::vector<int> sorted = plan.ordering();
  std::sort(sorted.begin(), sorted.end());
  for (int v = 0; v < 9; ++v) EXPECT_EQ(sorted[static_cast<std::size_t>(v)], v);
  std::vector<std::uint64_t> steps;
  const auto a = plan.sample(11, &steps);
  EXPECT_EQ(a, plan.sample(11));
  EXPECT_EQ(steps.front(), 0u);

  cfg.prefix_kstar = true;
  const IncrementalPlan pre(m, cfg);
  EXPECT_EQ(pre.total_updates(), 2u + 3u + 4u + 5u + 6u + 7u + 8u + 9u);
}

TEST(Incremental, Determinism) {
  const auto m = pm_model(gen::cycle(6), 0.4, random_field(6, 1.0, 2));
  SamplerConfig cfg;
  cfg.seed = 7;
  const auto a = incremental_sample(m, cfg);
  const auto b = incremental_sample(m, cfg);
  EXPECT_EQ(a.first, b.first);
  EXPECT_EQ(a.second.stage_steps, b.second.stage_steps);
  const auto s = validate_incremental(m, cfg, 2000, Exec::serial);
  const auto p = validate_incremental(m, cfg, 2000, Exec::parallel);
  EXPECT_EQ(s.counts, p.counts);
}

TEST(Incremental, PinnedVerticesKept) {
  const auto m = pm_model(gen::path(5), 0.5, random_field(5, 1.0, 3)).with_pinning({{2, false}, {4, true}});
  SamplerConfig cfg;
  cfg.c_star = 1.0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    cfg.seed = s;
    const auto c = incremental_sample(m, cfg).first;
    EXPECT_FALSE(c.up(2));
    EXPECT_TRUE(c.up(4));
  }
}

TEST(Incremental, DisconnectedGraphs) {
  const auto m = pm_model(Graph::build(4, {{0, 1}, {2, 3}}), 0.7, {0.1, 0.2, -0.3, 0.0});
  SamplerConfig cfg;
  cfg.c_star = 2.0;
  cfg.seed = 8;
  const ValidationResult v = validate_incremental(m, cfg, 50000);
  EXPECT_LE(v.tv, 3.0 * v.stat_err + 0.01);
  cfg.per_component = false;
  EXPECT_THROW(incremental_sample(m, cfg), InputError);
}

TEST(Calibration, FindsSmallKStar) {
  const auto m = pm_model(gen::path(4), 0.3, random_field(4, 1.0, 5));
  SamplerConfig cfg;
  cfg.seed = 9;
  const Calibration c = calibrate_cstar(m, cfg, 0.05, 20000, 1024);
  EXPECT_TRUE(c.reached);
  EXPECT_LE(c.tried.back().second, 0.05);
  EXPECT_EQ(c.tried.back().first, c.k_star);
  EXPECT_NEAR(std::pow(4.0, c.c_star), static_cast<double>(c.k_star), 1e-6 * c.k_star + 1e-9);
  for (std::size_t i = 0; i + 1 < c.tried.size(); ++i) EXPECT_GT(c.tried[i].second, 0.05);
}

TEST(WarmStart, Formula) {
  const WarmStartBound a = warm_start_tv_bound(1.0, 1.0, 1.0, 8);
  EXPECT_NEAR(a.value, std::log(8.0) / 8.0, 1e-15);
  EXPECT_NEAR(a.value, 0.2599, 1e-4);
  EXPECT_FALSE(a.warnings.empty());
  EXPECT_NEAR(warm_start_tv_bound(2.0, 3.0, 1.0, 100).value, 2.0 * 9.0 * std::log(100.0) / 100.0, 1e-12);
  const double p = 2.0, m = 1.5, aa = 2.0;
  EXPECT_NEAR(warm_start_tv_bound(m, aa, p, 1000).value,
              m * std::pow(std::pow(aa, 2 * p) * std::log(1000.0) / 1000.0, 1.0 / (2 * p - 1)), 1e-12);
  double prev = INFINITY;
  for (std::uint64_t k = 3; k < 100000; k *= 3) {
    const double v = warm_start_tv_bound(1.0, 2.0, 2.0, k).value;
    EXPECT_LT(v, prev);
    prev = v;
  }
  EXPECT_NEAR(warm_start_constant(0.5, 1.0), std::exp(2.0 * std::exp(1.0)), 1e-9);
}
