#pragma once

#include <cmath>
#include <memory>
#include <vector>

#include "rfim/graph.hpp"
#include "rfim/model.hpp"
#include "rfim/oracle.hpp"
#include "rfim/rng.hpp"

namespace rfim::test {

inline std::shared_ptr<const Graph> share(Graph g) { return std::make_shared<const Graph>(std::move(g)); }

inline IsingModel pm_model(Graph g, double beta, std::vector<double> h) {
  return IsingModel(share(std::move(g)), beta, std::move(h), Convention::plus_minus);
}

inline IsingModel zero_field(Graph g, double beta) {
  const auto n = static_cast<std::size_t>(g.num_vertices());
  return pm_model(std::move(g), beta, std::vector<double>(n, 0.0));
}

/// Uniform fields in [-m, m].
inline std::vector<double> random_field(int n, double m, std::uint64_t seed) {
  return sample_field(FieldDistribution::uniform_symmetric(m), n, seed).values;
}

inline double binom_sigma(double p, double n) { return std::sqrt(p * (1.0 - p) / n); }

/// Joint law of (X, revealed(t)) marginalized to X given S, straight from the
/// definition: each edge with both endpoints up is revealed with probability t.
inline std::vector<double> bayes_by_definition(const IsingModel& m, double t, const std::vector<int>& s) {
  const GibbsTable base = gibbs_table(m, Exec::serial);
  const int edges = m.graph().num_edges();
  std::vector<bool> in_s(static_cast<std::size_t>(edges), false);
  for (int e : s) in_s[static_cast<std::size_t>(e)] = true;
  std::vector<double> joint(base.size(), 0.0);
  double total = 0.0;
  for (std::uint64_t x = 0; x < base.size(); ++x) {
    const SpinConfiguration c = base.configuration(x);
    double w = base.probs[x];
    for (int e = 0; e < edges; ++e) {
      const Edge& ed = m.graph().edge(e);
      const bool event = c.up(ed.u) && c.up(ed.v);
      if (in_s[static_cast<std::size_t>(e)]) {
        w *= event ? t : 0.0;
      } else if (event) {
        w *= 1.0 - t;
      }
    }
    joint[x] = w;
    total += w;
  }
  if (total <= 0.0) return {};
  for (double& p : joint) p /= total;
  return joint;
}

/// Reindexes a full-model vector onto the free vertices of `post`.
inline std::vector<double> restrict_to(const GibbsTable& full, const GibbsTable& post, const std::vector<double>& p) {
  std::vector<double> out(post.size(), 0.0);
  for (std::uint64_t x = 0; x < full.size(); ++x) {
    if (p[x] == 0.0) continue;
    const SpinConfiguration c = full.configuration(x);
    bool ok = true;
    for (int v = 0; v < c.size(); ++v)
      if (post.model.is_pinned(v) && post.model.pinned_up(v) != c.up(v)) ok = false;
    if (!ok) return {};
    out[post.index_of(c)] += p[x];
  }
  return out;
}

}  // namespace rfim::test
