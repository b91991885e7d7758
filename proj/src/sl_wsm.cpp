#include "rfim/sl_wsm.hpp"

#include <algorithm>
#include <cmath>
#include <bit>
#include <map>
#include <numbers>

#include "rfim/error.hpp"
#include "rfim/glauber.hpp"
#include "rfim/rng.hpp"

namespace rfim {

namespace {

void require_pm(const IsingModel& m, const char* what) {
  if (m.convention() != Convention::plus_minus) throw InputError(std::string(what) + ": model must be plus-minus");
}

SlRealization finish_boost(const IsingModel& model, double t, SpinConfiguration sigma, std::uint64_t seed) {
  const int n = model.num_vertices();
  const CounterRng rng(seed, stream_id(StreamKind::stochastic_localization, 1));
  SlRealization r;
  r.t = t;
  r.sigma_star = std::move(sigma);
  r.noise.resize(static_cast<std::size_t>(n));
  r.y.resize(static_cast<std::size_t>(n));
  std::vector<double> field(model.field());
  const double st = std::sqrt(t);
  for (int v = 0; v < n; ++v) {
    const auto i = static_cast<std::size_t>(v);
    const double z = std::sqrt(-2.0 * std::log(rng.uniform(i))) * std::cos(2.0 * std::numbers::pi * rng.uniform2(i));
    r.noise[i] = st * z;
    r.y[i] = t * r.sigma_star.spin(v) + r.noise[i];
    field[i] += r.y[i];
  }
  r.boosted_model = model.with_field(std::move(field));
  return r;
}

void check_t(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw InputError("sl_boost: t must be a finite value >= 0");
}

}  // namespace

SlRealization sl_boost(const TableSampler& sampler, double t, std::uint64_t seed) {
  const IsingModel& model = sampler.table().model;
  require_pm(model, "sl_boost");
  check_t(t);
  const double u = CounterRng(seed, stream_id(StreamKind::stochastic_localization, 0)).uniform(0);
  return finish_boost(model, t, sampler.sample(u), seed);
}

SlRealization sl_boost(const IsingModel& model, double t, const SlSampler& sampler, std::uint64_t seed) {
  require_pm(model, "sl_boost");
  check_t(t);
  if (sampler.kind == SlSampler::Kind::oracle) return sl_boost(TableSampler(gibbs_table(model)), t, seed);
  const SpinConfiguration sigma =
      run_chain(model, model.constant_configuration(false), sampler.glauber_steps,
                derive_seed(seed, 0x51))
          .final_state.config;
  return finish_boost(model, t, sigma, seed);
}

double wsm_delta(const IsingModel& model, int u, int ell) {
  const Graph& g = model.graph();
  if (!g.has_vertex(u)) throw InputError("wsm_delta: vertex out of range");
  if (ell < 0) throw InputError("wsm_delta: radius must be >= 0");
  const std::vector<int> dist = distances_from(g, u);
  VertexSet region, sphere;
  for (int v = 0; v < g.num_vertices(); ++v) {
    const int d = dist[static_cast<std::size_t>(v)];
    if (d < 0 || d > ell) continue;
    region.push_back(v);
    if (d == ell) sphere.push_back(v);
  }
  if (sphere.empty()) return 0.0;
  if (ell == 0) return 1.0;
  IsingModel local = induced_model(model.without_pinning(), region);
  auto local_id = [&](int v) { return static_cast<int>(std::lower_bound(region.begin(), region.end(), v) - region.begin()); };
  Pinning inner;
  for (int v : region) {
    if (model.is_pinned(v) && dist[static_cast<std::size_t>(v)] < ell) inner.push_back({local_id(v), model.pinned_up(v)});
  }
  local = local.with_pinning(inner);
  const int lu = local_id(u);
  auto marginal = [&](bool up) {
    Pinning bc;
    for (int v : sphere) bc.push_back({local_id(v), up});
    return gibbs_table(local.with_pinning(bc), Exec::serial).marginal_up(lu);
  };
  return std::clamp(std::abs(marginal(true) - marginal(false)), 0.0, 1.0);
}

bool WsmReport::satisfied_at(double c) const {
  if (!(c > 0.0)) return std::all_of(entries.begin(), entries.end(), [](const WsmEntry& e) { return e.mean <= 0.0; });
  return std::all_of(entries.begin(), entries.end(),
                     [&](const WsmEntry& e) { return e.mean <= c * std::exp(-e.radius / c); });
}

WsmReport estimate_wsm(std::shared_ptr<const Graph> g, const WsmConfig& cfg, Exec exec) {
  if (!g) throw InputError("estimate_wsm: null graph");
  if (cfg.radii.empty()) throw InputError("estimate_wsm: no radii");
  if (cfg.field_trials == 0) throw InputError("estimate_wsm: field_trials must be >= 1");
  std::vector<int> vertices = cfg.vertices;
  if (vertices.empty())
    for (int v = 0; v < g->num_vertices(); ++v) vertices.push_back(v);
  const std::size_t nr = cfg.radii.size();
  const std::size_t nv = vertices.size();

  // Per trial: δ for each (vertex, radius), row-major by vertex.
  auto one = [&](std::uint64_t trial) {
    const QuenchedField h = sample_field(cfg.field, g->num_vertices(), derive_seed(cfg.seed, trial));
    IsingModel model(g, cfg.beta, h.values);
    if (cfg.sl_time > 0.0) {
      SlSampler s;
      if (g->num_vertices() <= 16) {
        s.kind = SlSampler::Kind::oracle;
      } else {
        s.kind = SlSampler::Kind::glauber;
        s.glauber_steps = cfg.sl_glauber_steps > 0 ? cfg.sl_glauber_steps : 1000ULL * g->num_vertices();
      }
      model = sl_boost(model, cfg.sl_time, s, derive_seed(cfg.seed ^ 0x5A5A5A5AULL, trial)).boosted_model;
    }
    std::vector<double> d(nv * nr);
    for (std::size_t i = 0; i < nv; ++i)
      for (std::size_t k = 0; k < nr; ++k) d[i * nr + k] = wsm_delta(model, vertices[i], cfg.radii[k]);
    return d;
  };
  const auto deltas = map_indexed<std::vector<double>>(cfg.field_trials, one, exec);

  WsmReport rep;
  rep.radii = cfg.radii;
  const double n = static_cast<double>(cfg.field_trials);
  for (std::size_t i = 0; i < nv; ++i) {
    for (std::size_t k = 0; k < nr; ++k) {
      double s = 0.0, s2 = 0.0;
      for (const auto& d : deltas) {
        s += d[i * nr + k];
        s2 += d[i * nr + k] * d[i * nr + k];
      }
      const double mean = s / n;
      const double var = n > 1 ? std::max(0.0, (s2 - n * mean * mean) / (n - 1)) : 0.0;
      rep.entries.push_back({vertices[i], cfg.radii[k], mean, std::sqrt(var / n)});
    }
  }
  for (const auto& d : deltas) {
    std::vector<double> row(nr, 0.0);
    for (std::size_t k = 0; k < nr; ++k) {
      for (std::size_t i = 0; i < nv; ++i) row[k] += d[i * nr + k];
      row[k] /= static_cast<double>(nv);
    }
    rep.trial_radius_means.push_back(std::move(row));
  }

  // Least squares on log scale over radii with positive mean.
  std::vector<std::pair<double, double>> pts;
  for (std::size_t k = 0; k < nr; ++k) {
    double m = 0.0;
    for (const auto& row : rep.trial_radius_means) m += row[k];
    m /= n;
    if (m > 0.0) pts.emplace_back(cfg.radii[k], std::log(m));
  }
  if (!pts.empty()) {
    auto loss = [&](double lc) {
      const double c = std::exp(lc);
      double s = 0.0;
      for (const auto& [r, lm] : pts) {
        const double res = lm - (lc - r / c);
        s += res * res;
      }
      return s;
    };
    double lo = -10.0, hi = 10.0;
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int it = 0; it < 200; ++it) {
      const double a = hi - phi * (hi - lo);
      const double b = lo + phi * (hi - lo);
      if (loss(a) < loss(b)) hi = b; else lo = a;
    }
    rep.fitted_c = std::exp(0.5 * (lo + hi));
  }
  // C e^{−r/C} is increasing in C.
  const bool any_positive = std::any_of(rep.entries.begin(), rep.entries.end(), [](const WsmEntry& e) { return e.mean > 0.0; });
  if (any_positive) {
    double lo = 1e-12, hi = 1.0;
    while (!rep.satisfied_at(hi)) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (rep.satisfied_at(mid)) hi = mid; else lo = mid;
    }
    rep.minimal_c = hi;
  }
  for (double c : cfg.c_grid) rep.satisfied.emplace_back(c, rep.satisfied_at(c));
  return rep;
}

SeparationPlan build_separation_plan(const Graph& g, const std::vector<int>& points) {
  SeparationPlan plan;
  plan.points = points;
  const std::size_t p = points.size();
  plan.r.assign(p, std::numeric_limits<double>::infinity());
  plan.j.assign(p, -1);
  plan.ell.assign(p, std::numeric_limits<double>::quiet_NaN());
  plan.ell_floor.assign(p, -1);
  if (p < 2) return plan;

  std::vector<std::vector<int>> dist;
  for (int u : points) dist.push_back(distances_from(g, u));
  auto d = [&](std::size_t a, std::size_t b) {
    const int x = dist[a][static_cast<std::size_t>(points[b])];
    if (x < 0) throw InputError("separation plan: points lie in different components");
    return x;
  };

  std::map<int, std::vector<int>> buckets;
  for (std::size_t i = 1; i < p; ++i) {
    int best = -1;
    for (std::size_t k = 0; k < i; ++k)
      if (best < 0 || d(i, k) < d(i, static_cast<std::size_t>(best))) best = static_cast<int>(k);
    plan.j[i] = best;
    plan.r[i] = d(i, static_cast<std::size_t>(best)) / 4.0;
    const int fl = static_cast<int>(std::floor(plan.r[i]));
    if (fl >= 1) buckets[std::bit_width(static_cast<unsigned>(fl)) - 1].push_back(static_cast<int>(i));
  }
  for (const auto& [k, members] : buckets) plan.q_buckets.emplace_back(k, members);

  double best_score = 0.0;
  for (const auto& [k, members] : plan.q_buckets) {
    const double score = static_cast<double>(members.size()) * std::ldexp(1.0, k);
    if (score > best_score) {
      best_score = score;
      plan.k_star = k;
      plan.a_set = members;
    }
  }
  for (int i : plan.a_set) {
    const auto ii = static_cast<std::size_t>(i);
    const std::size_t prev = (ii + p - 1) % p;
    double m = std::numeric_limits<double>::infinity();
    if (prev != ii) m = d(ii, prev);
    for (int k : plan.a_set)
      if (k != i) m = std::min(m, static_cast<double>(d(ii, static_cast<std::size_t>(k))));
    plan.ell[ii] = m / 4.0;
    plan.ell_floor[ii] = static_cast<int>(std::floor(plan.ell[ii]));
  }
  for (int i : plan.a_set) {
    const auto ii = static_cast<std::size_t>(i);
    const std::size_t prev = (ii + p - 1) % p;
    if (prev != ii && d(ii, prev) < plan.ell_floor[ii]) plan.separation_ok = false;
    if (!(plan.ell[ii] >= plan.r[ii] / 2.0)) plan.separation_ok = false;
    for (int k : plan.a_set) {
      if (k == i) continue;
      if (d(ii, static_cast<std::size_t>(k)) < 2 * (plan.ell_floor[ii] + plan.ell_floor[static_cast<std::size_t>(k)])) {
        plan.separation_ok = false;
      }
    }
  }
  if (!plan.separation_ok) throw Error("separation plan: constructed plan violates the separation condition");
  return plan;
}

namespace {

double trace_power(const Eigen::MatrixXd& cov, int p) {
  if (cov.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) s += std::pow(std::max(0.0, es.eigenvalues()(i)), p);
  return s;
}

}  // namespace

TraceMomentReport trace_moment_probe(const IsingModel& model, int p, const std::vector<double>& t_grid,
                                     std::uint64_t realizations, std::uint64_t seed, Exec exec) {
  require_pm(model, "trace_moment_probe");
  if (p < 1) throw InputError("trace_moment_probe: p must be >= 1");
  if (realizations == 0 || t_grid.empty()) throw InputError("trace_moment_probe: empty run");
  const TableSampler sampler(gibbs_table(model));
  const std::size_t nt = t_grid.size();
  auto one = [&](std::uint64_t r) {
    std::vector<double> out(nt);
    for (std::size_t k = 0; k < nt; ++k) {
      const SlRealization sl = sl_boost(sampler, t_grid[k], derive_seed(seed, r));
      out[k] = trace_power(mean_and_covariance(gibbs_table(sl.boosted_model, Exec::serial)).cov, p);
    }
    return out;
  };
  const auto vals = map_indexed<std::vector<double>>(realizations, one, exec);
  TraceMomentReport rep;
  rep.p = p;
  const double n = static_cast<double>(realizations);
  for (std::size_t k = 0; k < nt; ++k) {
    double s = 0.0, s2 = 0.0;
    for (const auto& v : vals) {
      s += v[k];
      s2 += v[k] * v[k];
    }
    const double mean = s / n;
    const double var = n > 1 ? std::max(0.0, (s2 - n * mean * mean) / (n - 1)) : 0.0;
    rep.points.push_back({t_grid[k], mean, std::sqrt(var / n)});
    rep.sup = std::max(rep.sup, mean);
  }
  rep.fitted_c0 = std::pow(rep.sup / model.num_vertices(), 1.0 / p) / p;
  return rep;
}

double c0_from_trace_moment(double fitted_c0) {
  if (!(fitted_c0 > 0.0)) throw InputError("c0_from_trace_moment: fitted constant must be > 0");
  return 1.0 / (std::numbers::e * fitted_c0);
}

namespace {

double variance_of(const std::vector<double>& probs, const std::vector<double>& f) {
  double m = 0.0, m2 = 0.0;
  for (std::size_t x = 0; x < probs.size(); ++x) {
    m += probs[x] * f[x];
    m2 += probs[x] * f[x] * f[x];
  }
  return std::max(0.0, m2 - m * m);
}

}  // namespace

std::vector<WeakPoincareVerdict> weak_poincare_probe(const IsingModel& model, double T, double delta,
                                                     const std::vector<std::vector<double>>& functions,
                                                     std::uint64_t realizations, std::uint64_t seed, double c0,
                                                     Exec exec) {
  require_pm(model, "weak_poincare_probe");
  if (!(T >= 0.0) || !(delta > 0.0 && delta < 1.0) || !(c0 > 0.0) || realizations == 0) {
    throw InputError("weak_poincare_probe: need T >= 0, delta in (0,1), c0 > 0, realizations >= 1");
  }
  const TableSampler sampler(gibbs_table(model));
  for (const auto& f : functions)
    if (f.size() != sampler.table().size()) throw InputError("weak_poincare_probe: function length mismatch");
  auto one = [&](std::uint64_t r) {
    const GibbsTable t = gibbs_table(sl_boost(sampler, T, derive_seed(seed, r)).boosted_model, Exec::serial);
    std::vector<double> v;
    for (const auto& f : functions) v.push_back(variance_of(t.probs, f));
    return v;
  };
  const auto vars = map_indexed<std::vector<double>>(realizations, one, exec);
  const double p = std::exp(2.0 * T / c0);
  const double inv_q = 1.0 - 1.0 / p;
  std::vector<WeakPoincareVerdict> out;
  for (std::size_t k = 0; k < functions.size(); ++k) {
    WeakPoincareVerdict v;
    v.p = p;
    v.inv_q = inv_q;
    v.lhs = variance_of(sampler.table().probs, functions[k]);
    for (const auto& row : vars) v.mean_var_t += row[k];
    v.mean_var_t /= static_cast<double>(realizations);
    const auto [mn, mx] = std::minmax_element(functions[k].begin(), functions[k].end());
    const double osc = *mx - *mn;
    v.rhs = std::pow(std::exp(-c0) * model.num_vertices() / delta, inv_q) * std::pow(v.mean_var_t, 1.0 / p) *
            (inv_q > 0.0 ? std::pow(osc, 2.0 * inv_q) : 1.0);
    v.satisfied = v.lhs <= v.rhs * (1.0 + 1e-12) + 1e-300;
    out.push_back(v);
  }
  return out;
}

std::vector<double> magnetization_function(const GibbsTable& table) {
  std::vector<double> f(table.size());
  for (std::uint64_t x = 0; x < table.size(); ++x) {
    const SpinConfiguration c = table.configuration(x);
    double m = 0.0;
    for (int v = 0; v < c.size(); ++v) m += c.spin(v);
    f[x] = m;
  }
  return f;
}

std::vector<double> spin_function(const GibbsTable& table, int v) {
  std::vector<double> f(table.size());
  for (std::uint64_t x = 0; x < table.size(); ++x) f[x] = table.configuration(x).spin(v);
  return f;
}

}  // namespace rfim
