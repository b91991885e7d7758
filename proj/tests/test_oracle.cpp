#include <gtest/gtest.h>

#include <cmath>

#include "rfim/error.hpp"
#include "rfim/oracle.hpp"
#include "rfim/rng.hpp"
#include "test_util.hpp"

using namespace rfim;
using namespace rfim::test;

namespace {

IsingModel lone(double h) { return pm_model(Graph::build(1, {}), 0.0, {h}); }
Graph k3() { return gen::complete(3); }

}  // namespace

TEST(GibbsTable, Examples) {
  const GibbsTable a = gibbs_table(lone(0.0));
  EXPECT_NEAR(a.probs[0], 0.5, 1e-15);
  EXPECT_NEAR(a.probs[1], 0.5, 1e-15);
  const double c = 0.8;
  const GibbsTable b = gibbs_table(lone(c));
  EXPECT_NEAR(b.probs[0], std::exp(-c) / (2 * std::cosh(c)), 1e-15);
  EXPECT_NEAR(b.probs[1], std::exp(c) / (2 * std::cosh(c)), 1e-15);
  // index bit i is free[i]: 0 = (−,−), 1 = (+,−), 2 = (−,+), 3 = (+,+)
  const GibbsTable p = gibbs_table(zero_field(gen::path(2), 1.0));
  const double z = 2 * std::exp(1.0) + 2 * std::exp(-1.0);
  EXPECT_NEAR(p.probs[0], std::exp(1.0) / z, 1e-15);
  EXPECT_NEAR(p.probs[1], std::exp(-1.0) / z, 1e-15);
  EXPECT_NEAR(p.probs[2], std::exp(-1.0) / z, 1e-15);
  EXPECT_NEAR(p.probs[3], std::exp(1.0) / z, 1e-15);
  EXPECT_NEAR(p.log_partition, std::log(z), 1e-14);
}

TEST(GibbsTable, NormalizedAndIndexed) {
  const auto m = pm_model(gen::grid(3, 3), 0.4, random_field(9, 1.0, 4)).with_pinning({{4, true}, {0, false}});
  const GibbsTable t = gibbs_table(m);
  EXPECT_EQ(t.size(), 128u);
  double s = 0.0;
  for (std::size_t x = 0; x < t.size(); ++x) {
    EXPECT_GE(t.probs[x], 0.0);
    s += t.probs[x];
    EXPECT_EQ(t.index_of(t.configuration(x)), x);
    EXPECT_TRUE(m.respects_pinning(t.configuration(x)));
  }
  EXPECT_NEAR(s, 1.0, 1e-12);
  EXPECT_TRUE(std::isfinite(t.log_partition));
}

TEST(GibbsTable, CapacityCap) {
  EXPECT_THROW(gibbs_table(zero_field(gen::path(kTableCap + 1), 0.1)), CapacityError);
  EXPECT_THROW(glauber_gap(zero_field(gen::path(kGapCap + 1), 0.1)), CapacityError);
  EXPECT_THROW(mlsi_lower_estimate(zero_field(gen::path(kMlsiCap + 1), 0.1), 1, 1), CapacityError);
}

TEST(ConditionalTable, Examples) {
  const double beta = 0.7;
  const auto m = zero_field(gen::path(2), beta);
  const GibbsTable c = conditional_table(m, {{0, true}});
  EXPECT_NEAR(c.marginal_up(1), std::exp(beta) / (2 * std::cosh(beta)), 1e-15);
  const GibbsTable all = conditional_table(m, {{0, true}, {1, false}});
  EXPECT_EQ(all.size(), 1u);
  EXPECT_DOUBLE_EQ(all.probs[0], 1.0);
  const GibbsTable none = conditional_table(m, {});
  EXPECT_EQ(none.probs, gibbs_table(m).probs);
}

TEST(ConditionalTable, EqualsRenormalizedSlice) {
  const auto m = pm_model(gen::cycle(5), 0.5, random_field(5, 1.0, 8));
  const GibbsTable full = gibbs_table(m);
  const GibbsTable c = conditional_table(m, {{2, true}, {4, false}});
  double mass = 0.0;
  for (std::size_t x = 0; x < full.size(); ++x) {
    const auto cfg = full.configuration(x);
    if (cfg.up(2) && !cfg.up(4)) mass += full.probs[x];
  }
  for (std::size_t x = 0; x < full.size(); ++x) {
    const auto cfg = full.configuration(x);
    if (cfg.up(2) && !cfg.up(4)) EXPECT_NEAR(c.probs[c.index_of(cfg)], full.probs[x] / mass, 1e-13);
  }
}

TEST(Moments, Examples) {
  const Moments a = mean_and_covariance(gibbs_table(lone(0.0)));
  EXPECT_NEAR(a.mean(0), 0.0, 1e-15);
  EXPECT_NEAR(a.cov(0, 0), 1.0, 1e-15);
  const Moments b = mean_and_covariance(gibbs_table(pm_model(gen::cycle(4), 0.0, {0.3, -1, 0, 2})));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (i != j) EXPECT_NEAR(b.cov(i, j), 0.0, 1e-14);
  const Moments c = mean_and_covariance(gibbs_table(zero_field(gen::path(2), 1.0)));
  EXPECT_NEAR(c.cov(0, 1), std::tanh(1.0), 1e-14);
  EXPECT_NEAR(c.cov(0, 1), 0.7615942, 1e-7);
}

TEST(Cor2, Examples) {
  const auto prod = to_zero_one(pm_model(gen::path(4), 0.0, {0.1, 0.2, 0.3, 0.4}));
  const Eigen::MatrixXd c0 = cor2_matrix(gibbs_table(prod));
  EXPECT_NEAR(c0(0, 2), 0.0, 1e-14);
  EXPECT_NEAR(c0(2, 0), 0.0, 1e-14);
  const auto m = to_zero_one(zero_field(k3(), 0.3));
  const GibbsTable t = gibbs_table(m);
  const Eigen::MatrixXd c = cor2_matrix(t);
  const auto ev = edge_event_probs(t);
  for (int e = 0; e < 3; ++e) EXPECT_NEAR(c(e, e), 1.0 - ev[static_cast<std::size_t>(e)], 1e-14);
  // condition-then-renormalize path
  const Graph& g = m.graph();
  for (int e = 0; e < g.num_edges(); ++e) {
    const GibbsTable cond = conditional_table(m, {{g.edge(e).u, true}, {g.edge(e).v, true}});
    const auto ce = edge_event_probs(cond);
    for (int f = 0; f < g.num_edges(); ++f) {
      EXPECT_NEAR(c(e, f), ce[static_cast<std::size_t>(f)] - ev[static_cast<std::size_t>(f)], 1e-12);
    }
  }
  EXPECT_THROW(cor2_matrix(gibbs_table(zero_field(k3(), 0.3))), InputError);
}

TEST(Cor2, ZeroRowForImpossibleEvent) {
  const auto m = to_zero_one(zero_field(gen::path(3), 0.4)).with_pinning({{0, false}});
  const Eigen::MatrixXd c = cor2_matrix(gibbs_table(m));
  for (Eigen::Index k = 0; k < c.cols(); ++k) EXPECT_EQ(c(0, k), 0.0);
}

TEST(TvDistance, Examples) {
  const GibbsTable a = gibbs_table(lone(0.0));
  EXPECT_EQ(tv_distance(a, a), 0.0);
  EXPECT_DOUBLE_EQ(tv_distance(std::vector<double>{1, 0}, std::vector<double>{0, 1}), 1.0);
  const GibbsTable b = gibbs_table(lone(0.5 * std::log(3.0)));
  EXPECT_NEAR(b.probs[1], 0.75, 1e-15);
  EXPECT_NEAR(tv_distance(a, b), 0.25, 1e-15);
  EXPECT_THROW(tv_distance(a, gibbs_table(zero_field(gen::path(2), 0.1))), InputError);
}

TEST(TvDistance, TriangleInequality) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    auto t = [&](std::uint64_t k) { return gibbs_table(pm_model(gen::cycle(4), 0.4, random_field(4, 2.0, 3 * s + k))); };
    const auto a = t(0), b = t(1), c = t(2);
    EXPECT_LE(tv_distance(a, c), tv_distance(a, b) + tv_distance(b, c) + 1e-15);
  }
}

TEST(Gap, Examples) {
  EXPECT_NEAR(glauber_gap(lone(0.7)).gap, 1.0, 1e-12);
  EXPECT_NEAR(glauber_gap(pm_model(Graph::build(2, {}), 0.0, {0.0, 0.0})).gap, 0.5, 1e-12);
  const SpectralReport p = glauber_gap(zero_field(gen::path(2), 1.0));
  EXPECT_NEAR(p.gap, p.gap_rayleigh, 1e-9);
  EXPECT_NEAR(p.at_variance_constant * 2 * p.gap, 1.0, 1e-9);
}

TEST(Gap, PinnedModelsUseFreeVertices) {
  const auto m = pm_model(gen::path(3), 0.5, {0.2, 0.0, -0.1}).with_pinning({{1, true}});
  const SpectralReport r = glauber_gap(m);
  EXPECT_EQ(r.free, 2);
  // two independent free spins: gap is 1/2
  EXPECT_NEAR(r.gap, 0.5, 1e-12);
}

TEST(AtVariance, Examples) {
  EXPECT_NEAR(at_variance_constant(pm_model(gen::cycle(4), 0.0, {0.5, 0, -0.2, 1})), 1.0, 1e-9);
  const auto p2 = zero_field(gen::path(2), 1.0);
  EXPECT_NEAR(at_variance_constant(p2), 1.0 / (2.0 * glauber_gap(p2).gap), 1e-9);
  const IsingModel k4(share(gen::complete(4)), 0.25, std::vector<double>(4, 0.0), Convention::zero_one);
  EXPECT_LE(at_variance_constant(k4), 2.0);
  const IsingModel k4h(share(gen::complete(4)), 0.25, {1.0, -2.0, 0.5, 0.0}, Convention::zero_one);
  EXPECT_LE(at_variance_constant(k4h.with_pinning({{3, true}})), 2.0);
}

TEST(AtVariance, GapDualityOnRandomModels) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const int n = 2 + static_cast<int>(s % 6);
    const auto m = pm_model(n > 2 ? gen::cycle(n) : gen::path(n), 0.2 + 0.05 * static_cast<double>(s % 5),
                            random_field(n, 1.0, s));
    const SpectralReport r = glauber_gap(m);
    EXPECT_NEAR(r.gap, r.gap_rayleigh, 1e-9);
    EXPECT_NEAR(r.at_variance_constant * n * r.gap, 1.0, 1e-9);
    EXPECT_DOUBLE_EQ(heat_bath_gap(m), r.gap);
  }
}

TEST(Mlsi, SingleVertexMatchesScan) {
  const auto m = lone(0.0);
  const GibbsTable t = gibbs_table(m);
  const HeatBathOperator p = heat_bath_operator(t);
  double best = 1e9;
  for (int k = -400; k <= 400; ++k) {
    if (k == 0) continue;
    const double x = std::exp(k / 40.0);
    best = std::min(best, mlsi_ratio(t, p, {x, 1.0}));
  }
  EXPECT_NEAR(mlsi_lower_estimate(m, 20, 1).ratio, best, 1e-6);
}

TEST(Mlsi, ProductWithinFactorOfSingleSpin) {
  const double single = mlsi_lower_estimate(lone(0.0), 20, 1).ratio;
  const double prod = mlsi_lower_estimate(pm_model(Graph::build(2, {}), 0.0, {0, 0}), 50, 1).ratio;
  EXPECT_GE(prod, single / 2.0 - 1e-9);
  EXPECT_LE(prod, single + 1e-9);
}

TEST(Mlsi, SeedStable) {
  const auto m = zero_field(gen::path(2), 1.0);
  const double a = mlsi_lower_estimate(m, 1000, 1).ratio;
  const double b = mlsi_lower_estimate(m, 1000, 2).ratio;
  EXPECT_NEAR(a, b, 1e-3);
  EXPECT_GT(a, 0.0);
  EXPECT_LE(a, 1.0);
}

TEST(Mlsi, EntropyConvention) {
  EXPECT_EQ(entropy({0.5, 0.5}, {0.0, 0.0}), 0.0);
  EXPECT_NEAR(entropy({0.5, 0.5}, {0.0, 2.0}), std::log(2.0), 1e-15);
}

TEST(Sweep, ProductModelClosedForm) {
  const auto m = to_zero_one(pm_model(gen::path(3), 0.0, {0.3, -0.4, 0.1}));
  const Cor2SweepReport r = sup_cor2_over_pinnings(m, {0.0});
  double best = 0.0;
  const auto free = m.free_vertices();
  for (std::uint64_t code = 0; code < 27; ++code) {
    const auto pins = decode_pinning(free, code);
    std::vector<double> p(3);
    for (int v = 0; v < 3; ++v) {
      p[static_cast<std::size_t>(v)] = logistic(m.field(v));
      for (const Pin& q : pins)
        if (q.vertex == v) p[static_cast<std::size_t>(v)] = q.up ? 1.0 : 0.0;
    }
    if (p[0] * p[1] > 0) best = std::max(best, 1.0 - p[0] * p[1] + p[2] * (1.0 - p[1]));
    if (p[1] * p[2] > 0) best = std::max(best, 1.0 - p[1] * p[2] + p[0] * (1.0 - p[1]));
  }
  EXPECT_NEAR(r.max_row_sum, best, 1e-12);
  EXPECT_EQ(r.cells, 27u);
  EXPECT_TRUE(r.exact);
}

TEST(Sweep, K3InterpolationHolds) {
  const auto m = to_zero_one(pm_model(k3(), 0.3, random_field(3, 1.0, 5)));
  const double ts = theta_star(0.3);
  const Cor2SweepReport r = sup_cor2_over_pinnings(m, {0, 0.25 * ts, 0.5 * ts, 0.75 * ts, ts});
  EXPECT_LE(r.max_opnorm, std::sqrt(r.max_row_sum * r.max_col_sum) + 1e-12);
  EXPECT_EQ(r.interpolation_violations, 0u);
}

TEST(Sweep, SingleEdge) {
  const auto m = to_zero_one(pm_model(gen::path(2), 0.5, {0.2, -0.1}));
  const Eigen::MatrixXd c = cor2_matrix(gibbs_table(edge_tilt(m, 0.3)));
  ASSERT_EQ(c.rows(), 1);
  const double mu = edge_event_probs(gibbs_table(edge_tilt(m, 0.3)))[0];
  EXPECT_NEAR(operator_norm(c), 1.0 - mu, 1e-14);
  EXPECT_LT(operator_norm(c), 1.0);
}

TEST(Sweep, SerialEqualsParallel) {
  const auto m = to_zero_one(pm_model(gen::cycle(5), 0.3, random_field(5, 1.0, 1)));
  const auto a = sup_cor2_over_pinnings(m, {0.0, 0.5}, Exec::serial);
  const auto b = sup_cor2_over_pinnings(m, {0.0, 0.5}, Exec::parallel);
  EXPECT_EQ(a.max_row_sum, b.max_row_sum);
  EXPECT_EQ(a.max_col_sum, b.max_col_sum);
  EXPECT_EQ(a.max_opnorm, b.max_opnorm);
  EXPECT_EQ(a.argmax_pinning, b.argmax_pinning);
  EXPECT_EQ(a.edge_row_sup, b.edge_row_sup);
}

TEST(Fkg, ConditionalMeansMonotoneInPinnings) {
  for (const Graph& g : {gen::path(4), gen::complete(4), gen::cycle(6)}) {
    const int n = g.num_vertices();
    const auto m = pm_model(g, 0.4, random_field(n, 1.0, static_cast<std::uint64_t>(n)));
    const std::vector<int> pinned{0, n - 1};
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) {
        if ((a & b) != a) continue;  // a ≤ b pointwise
        const auto lo = conditional_table(m, {{0, (a & 1) != 0}, {n - 1, (a & 2) != 0}});
        const auto hi = conditional_table(m, {{0, (b & 1) != 0}, {n - 1, (b & 2) != 0}});
        for (int v = 1; v < n - 1; ++v) EXPECT_LE(lo.marginal_up(v), hi.marginal_up(v) + 1e-14);
      }
    }
  }
}

TEST(TransitionMatrix, RowsStochasticAndReversible) {
  const auto m = pm_model(gen::path(3), 0.6, {0.1, 0.0, -0.3});
  const GibbsTable t = gibbs_table(m);
  const Eigen::MatrixXd p = transition_matrix(t);
  for (Eigen::Index x = 0; x < p.rows(); ++x) {
    EXPECT_NEAR(p.row(x).sum(), 1.0, 1e-14);
    for (Eigen::Index y = 0; y < p.cols(); ++y)
      EXPECT_NEAR(t.probs[static_cast<std::size_t>(x)] * p(x, y), t.probs[static_cast<std::size_t>(y)] * p(y, x), 1e-15);
  }
}
