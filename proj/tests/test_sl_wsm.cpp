#include <gtest/gtest.h>

#include <cmath>

#include "rfim/error.hpp"
#include "rfim/rng.hpp"
#include "rfim/sl_wsm.hpp"
#include "test_util.hpp"

using namespace rfim;
using namespace rfim::test;

TEST(SlBoost, ZeroTimeIsBaseModel) {
  const auto m = pm_model(gen::cycle(5), 0.5, random_field(5, 1.0, 1));
  const SlRealization r = sl_boost(m, 0.0, {}, 3);
  for (int v = 0; v < 5; ++v) EXPECT_DOUBLE_EQ(r.boosted_model.field(v), m.field(v));
  EXPECT_EQ(r.boosted_model.couplings(), m.couplings());
}

TEST(SlBoost, FieldIsBaseplusObservation) {
  const auto m = pm_model(gen::path(4), 0.3, random_field(4, 1.0, 2));
  const SlRealization r = sl_boost(m, 2.0, {}, 4);
  for (int v = 0; v < 4; ++v) {
    EXPECT_NEAR(r.y[static_cast<std::size_t>(v)],
                2.0 * r.sigma_star.spin(v) + r.noise[static_cast<std::size_t>(v)], 1e-12);
    EXPECT_NEAR(r.boosted_model.field(v), m.field(v) + r.y[static_cast<std::size_t>(v)], 1e-12);
  }
  EXPECT_THROW(sl_boost(to_zero_one(m), 1.0, {}, 1), InputError);
  EXPECT_THROW(sl_boost(m, -1.0, {}, 1), InputError);
}

TEST(SlBoost, LargeTimeFieldsAreStrong) {
  const auto m = pm_model(gen::cycle(6), 0.5, random_field(6, 1.0, 3));
  const TableSampler ts(gibbs_table(m));
  std::uint64_t strong = 0, total = 0;
  for (std::uint64_t s = 0; s < 10000; ++s) {
    const SlRealization r = sl_boost(ts, 50.0, s);
    for (int v = 0; v < 6; ++v) strong += std::abs(r.boosted_model.field(v)) > 1.0;
    total += 6;
  }
  EXPECT_GE(strong / double(total), 0.999);
}

TEST(SlBoost, GlauberSamplerMatchesOracleLaw) {
  const auto m = pm_model(gen::path(3), 0.4, {0.2, -0.1, 0.3});
  const GibbsTable t = gibbs_table(m);
  const int n = 4000;
  int up0 = 0;
  for (int s = 0; s < n; ++s)
    up0 += sl_boost(m, 1.0, {SlSampler::Kind::glauber, 300}, static_cast<std::uint64_t>(s)).sigma_star.up(0);
  const double p = t.marginal_up(0);
  EXPECT_NEAR(up0 / double(n), p, 4.0 * binom_sigma(p, n));
}

TEST(SlBoost, MartingaleOnSmallModel) {
  const auto m = pm_model(gen::path(3), 0.5, {0.3, -0.2, 0.1});
  const GibbsTable base = gibbs_table(m);
  const TableSampler ts(base);
  for (double t : {0.5, 2.0, 10.0}) {
    const int runs = 10000;
    std::vector<double> sum(base.size(), 0.0), sq(base.size(), 0.0);
    for (int s = 0; s < runs; ++s) {
      const GibbsTable b = gibbs_table(sl_boost(ts, t, static_cast<std::uint64_t>(s)).boosted_model, Exec::serial);
      for (std::size_t x = 0; x < b.size(); ++x) {
        sum[x] += b.probs[x];
        sq[x] += b.probs[x] * b.probs[x];
      }
    }
    for (std::size_t x = 0; x < base.size(); ++x) {
      const double mean = sum[x] / runs;
      const double sd = std::sqrt(std::max(0.0, sq[x] / runs - mean * mean) / runs);
      EXPECT_NEAR(mean, base.probs[x], 3.0 * sd + 1e-12) << "t=" << t << " x=" << x;
    }
  }
}

TEST(WsmDelta, Examples) {
  EXPECT_DOUBLE_EQ(wsm_delta(pm_model(gen::path(5), 0.0, {0.1, 0.2, 0.3, 0.4, 0.5}), 2, 1), 0.0);
  const auto m = pm_model(gen::path(5), 0.7, random_field(5, 1.0, 2));
  EXPECT_DOUBLE_EQ(wsm_delta(m, 0, 5), 0.0);
  EXPECT_DOUBLE_EQ(wsm_delta(m, 2, 3), 0.0);
  EXPECT_GT(wsm_delta(m, 2, 2), 0.0);
  EXPECT_DOUBLE_EQ(wsm_delta(m, 2, 0), 1.0);
  const auto p3 = zero_field(gen::path(3), 1.0);
  const double up = gibbs_table(p3.with_pinning({{0, true}, {2, true}})).marginal_up(1);
  const double down = gibbs_table(p3.with_pinning({{0, false}, {2, false}})).marginal_up(1);
  EXPECT_NEAR(wsm_delta(p3, 1, 1), up - down, 1e-14);
  EXPECT_NEAR(up - down, std::tanh(2.0), 1e-14);
}

TEST(WsmDelta, BoundsCovariance) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto m = pm_model(gen::grid(2, 4), 0.3 + 0.1 * static_cast<double>(s % 4), random_field(8, 1.0, s));
    const Moments mo = mean_and_covariance(gibbs_table(m));
    for (int u = 0; u < 8; ++u)
      for (int v = 0; v < 8; ++v)
        for (int l = 0; l <= distance(m.graph(), u, v); ++l) {
          EXPECT_GE(mo.cov(u, v), -1e-15);
          EXPECT_LE(mo.cov(u, v), wsm_delta(m, u, l) + 1e-15);
        }
  }
}

TEST(WsmDelta, DecreasesInRadiusOnFerromagnet) {
  const auto m = pm_model(gen::path(11), 0.6, random_field(11, 1.0, 4));
  for (int u = 0; u < 11; ++u)
    for (int l = 0; l < 10; ++l) EXPECT_LE(wsm_delta(m, u, l + 1), wsm_delta(m, u, l) + 1e-15);
}

TEST(EstimateWsm, StrongFieldDecayOnPath) {
  WsmConfig cfg;
  cfg.beta = 0.5;
  cfg.field = FieldDistribution::two_point(5.0);
  cfg.radii = {1, 4};
  cfg.vertices = {6};
  cfg.field_trials = 1000;
  cfg.seed = 5;
  const WsmReport r = estimate_wsm(share(gen::path(13)), cfg);
  ASSERT_EQ(r.trial_radius_means.size(), 1000u);
  double s = 0.0, s2 = 0.0;
  for (const auto& row : r.trial_radius_means) {
    const double d = row[0] - row[1];
    s += d;
    s2 += d * d;
  }
  const double mean = s / 1000.0;
  const double sd = std::sqrt((s2 / 1000.0 - mean * mean) / 1000.0);
  EXPECT_GT(mean - 2.326 * sd, 0.0);
}

TEST(EstimateWsm, BetaZeroAllZero) {
  WsmConfig cfg;
  cfg.beta = 0.0;
  cfg.field_trials = 20;
  cfg.c_grid = {0.1, 1.0};
  const WsmReport r = estimate_wsm(share(gen::cycle(8)), cfg);
  for (const auto& e : r.entries) {
    EXPECT_EQ(e.mean, 0.0);
    EXPECT_EQ(e.std_err, 0.0);
  }
  for (const auto& [c, ok] : r.satisfied) EXPECT_TRUE(ok) << c;
  EXPECT_TRUE(r.satisfied_at(1e-3));
}

TEST(EstimateWsm, FittedConstantSatisfiesMeans) {
  WsmConfig cfg;
  cfg.field_trials = 50;
  const WsmReport r = estimate_wsm(share(gen::cycle(10)), cfg);
  EXPECT_TRUE(r.satisfied_at(r.minimal_c * (1.0 + 1e-6)));
  EXPECT_TRUE(r.fitted_c.has_value());
}

TEST(SeparationPlanTest, PathExample) {
  const SeparationPlan p = build_separation_plan(gen::path(9), {0, 8});
  EXPECT_DOUBLE_EQ(p.r[1], 2.0);
  EXPECT_EQ(p.j[1], 0);
  ASSERT_EQ(p.q_buckets.size(), 1u);
  EXPECT_EQ(p.q_buckets[0].first, 1);
  EXPECT_EQ(p.q_buckets[0].second, std::vector<int>{1});
  EXPECT_EQ(p.k_star, 1);
  EXPECT_EQ(p.a_set, std::vector<int>{1});
  EXPECT_DOUBLE_EQ(p.ell[1], 2.0);
  EXPECT_EQ(p.ell_floor[1], 2);
  EXPECT_TRUE(p.separation_ok);
}

TEST(SeparationPlanTest, AllPointsEqual) {
  const SeparationPlan p = build_separation_plan(gen::cycle(6), {3, 3, 3});
  EXPECT_DOUBLE_EQ(p.r[1], 0.0);
  EXPECT_DOUBLE_EQ(p.r[2], 0.0);
  EXPECT_TRUE(p.a_set.empty());
  EXPECT_TRUE(p.separation_ok);
}

TEST(SeparationPlanTest, RandomTuplesOnCycle) {
  const Graph g = gen::cycle(20);
  RngStream rng(7, 0);
  int nonempty = 0;
  for (int k = 0; k < 1000; ++k) {
    std::vector<int> pts(5);
    for (int& v : pts) v = static_cast<int>(rng.below(20));
    const SeparationPlan p = build_separation_plan(g, pts);
    ASSERT_TRUE(p.separation_ok);
    if (p.a_set.empty()) continue;
    ++nonempty;
    for (int i : p.a_set) {
      const auto ii = static_cast<std::size_t>(i);
      const std::size_t prev = (ii + 4) % 5;
      EXPECT_GE(distance(g, pts[ii], pts[prev]), p.ell_floor[ii]);
      EXPECT_GE(p.ell[ii], p.r[ii] / 2.0);
      for (int j : p.a_set)
        if (j != i)
          EXPECT_GE(distance(g, pts[ii], pts[static_cast<std::size_t>(j)]),
                    2 * (p.ell_floor[ii] + p.ell_floor[static_cast<std::size_t>(j)]));
    }
  }
  EXPECT_GT(nonempty, 0);
}

TEST(SeparationPlanTest, DisconnectedPointsRejected) {
  const Graph g = Graph::build(4, {{0, 1}, {2, 3}});
  EXPECT_THROW(build_separation_plan(g, {0, 2}), InputError);
}

TEST(TraceMoment, TimeZeroIsExact) {
  const auto m = pm_model(gen::path(4), 0.5, random_field(4, 1.0, 1));
  const Moments mo = mean_and_covariance(gibbs_table(m));
  const Eigen::MatrixXd c2 = mo.cov * mo.cov;
  const TraceMomentReport r = trace_moment_probe(m, 2, {0.0}, 50, 3);
  EXPECT_NEAR(r.points[0].mean, c2.trace(), 1e-12);
  EXPECT_NEAR(r.points[0].std_err, 0.0, 1e-15);
}

TEST(TraceMoment, ProductModelBounds) {
  const auto m = zero_field(Graph::build(5, {}), 0.0);
  const TraceMomentReport r = trace_moment_probe(m, 1, {0.0, 1.0, 4.0}, 100, 4);
  EXPECT_NEAR(r.points[0].mean, 5.0, 1e-12);
  for (const auto& pt : r.points) EXPECT_LE(pt.mean, 5.0 + 1e-12);
  EXPECT_NEAR(r.fitted_c0, r.sup / 5.0, 1e-12);
}

TEST(TraceMoment, BoostingShrinksCorrelations) {
  const auto m = pm_model(gen::path(5), 0.5, sample_field(FieldDistribution::two_point(2.0), 5, 3).values);
  const TraceMomentReport r = trace_moment_probe(m, 2, {0.0, 1.0, 5.0}, 2000, 6);
  EXPECT_LE(r.points[2].mean, r.points[0].mean + 3.0 * r.points[2].std_err);
}

TEST(WeakPoincare, DegenerateCases) {
  const auto m = pm_model(gen::path(3), 0.4, {0.1, 0.0, -0.2});
  const GibbsTable t = gibbs_table(m);
  const std::vector<double> constant(t.size(), 2.5);
  const auto v = weak_poincare_probe(m, 1.0, 0.5, {constant}, 50, 1, 1.0);
  EXPECT_NEAR(v[0].lhs, 0.0, 1e-15);
  EXPECT_NEAR(v[0].rhs, 0.0, 1e-15);
  EXPECT_TRUE(v[0].satisfied);

  const auto z = weak_poincare_probe(m, 0.0, 0.5, {spin_function(t, 1)}, 50, 1, 1.0);
  EXPECT_DOUBLE_EQ(z[0].p, 1.0);
  EXPECT_DOUBLE_EQ(z[0].inv_q, 0.0);
  EXPECT_NEAR(z[0].lhs, z[0].rhs, 1e-12);
  EXPECT_TRUE(z[0].satisfied);
}

TEST(WeakPoincare, MagnetizationOnP4) {
  const Graph g = gen::path(4);
  const auto first = pm_model(g, 0.5, random_field(4, 1.0, 0));
  const double c0 = c0_from_trace_moment(trace_moment_probe(first, 1, {0.0, 1.0, 2.0}, 200, 1).fitted_c0);
  EXPECT_NEAR(c0_from_trace_moment(2.0), 1.0 / (2.0 * std::exp(1.0)), 1e-15);
  int ok = 0;
  const int fields = 1000;
  for (int s = 0; s < fields; ++s) {
    const auto m = pm_model(g, 0.5, random_field(4, 1.0, static_cast<std::uint64_t>(s)));
    const GibbsTable t = gibbs_table(m, Exec::serial);
    ok += weak_poincare_probe(m, 2.0, 0.5, {magnetization_function(t)}, 32, static_cast<std::uint64_t>(s), c0,
                              Exec::serial)[0]
              .satisfied;
  }
  EXPECT_GE(ok / double(fields), 0.5);
}
