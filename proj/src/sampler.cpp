#include "rfim/sampler.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "rfim/error.hpp"
#include "rfim/oracle.hpp"
#include "rfim/rng.hpp"

namespace rfim {

std::uint64_t k_star_for(int n, double c_star) {
  if (!(c_star > 0.0) || !std::isfinite(c_star)) throw InputError("c_star must be a finite value > 0");
  if (n < 1) throw InputError("k*: n must be >= 1");
  const double k = std::ceil(std::pow(static_cast<double>(n), c_star) - 1e-9);
  if (k > 1e15) throw CapacityError("k* = n^c_star exceeds 1e15 updates per stage");
  return static_cast<std::uint64_t>(std::max(1.0, k));
}

bool draw_lone_vertex(const IsingModel& model, int v, double u) {
  if (model.is_pinned(v)) return model.pinned_up(v);
  const double h = model.field(v);
  const double p = model.convention() == Convention::plus_minus ? logistic(2.0 * h) : logistic(h);
  return u <= p;
}

IncrementalPlan::IncrementalPlan(const IsingModel& model, const SamplerConfig& cfg) : model_(model) {
  const Graph& g = model.graph();
  const int n = g.num_vertices();
  k_star_ = k_star_for(n, cfg.c_star);
  auto comps = connected_components(g);
  if (comps.size() > 1 && !cfg.per_component) {
    throw InputError("incremental_sample: graph is disconnected and per-component mode is off");
  }
  if (cfg.start && !g.has_vertex(*cfg.start)) throw InputError("incremental_sample: start vertex out of range");
  for (std::size_t c = 0; c < comps.size(); ++c) {
    const VertexSet& comp = comps[c];
    const IsingModel sub = induced_model(model, comp);
    std::optional<int> start;
    if (cfg.start) {
      const auto it = std::lower_bound(comp.begin(), comp.end(), *cfg.start);
      if (it != comp.end() && *it == *cfg.start) start = static_cast<int>(it - comp.begin());
    }
    const std::vector<int> local = connected_ordering(sub.graph(), derive_seed(cfg.ordering_seed, c), start);
    std::vector<int> prefix;
    for (std::size_t i = 0; i < local.size(); ++i) {
      const int v = comp[static_cast<std::size_t>(local[i])];
      ordering_.push_back(v);
      prefix.push_back(v);
      Stage s;
      s.vertex = v;
      s.prefix = prefix;
      if (i > 0) {
        s.steps = cfg.prefix_kstar ? k_star_for(static_cast<int>(prefix.size()), cfg.c_star) : k_star_;
        s.kernel.emplace(induced_model(model, prefix));
      }
      stages_.push_back(std::move(s));
    }
  }
}

std::uint64_t IncrementalPlan::total_updates() const {
  std::uint64_t t = 0;
  for (const auto& s : stages_) t += s.steps;
  return t;
}

SpinConfiguration IncrementalPlan::sample(std::uint64_t seed, std::vector<std::uint64_t>* stage_steps) const {
  const CounterRng draws(seed, stream_id(StreamKind::sampler, 0));
  SpinConfiguration out(model_.num_vertices(), model_.convention());
  if (stage_steps) stage_steps->clear();
  ChainState state;
  for (std::size_t i = 0; i < stages_.size(); ++i) {
    const Stage& st = stages_[i];
    const bool up = draw_lone_vertex(model_, st.vertex, draws.uniform(static_cast<std::uint64_t>(st.vertex)));
    if (!st.kernel) {
      state.config = SpinConfiguration(1, model_.convention());
      state.config.set(0, up);
    } else {
      SpinConfiguration next(static_cast<int>(st.prefix.size()), model_.convention());
      for (int k = 0; k + 1 < next.size(); ++k) next.set(k, state.config.up(k));
      next.set(next.size() - 1, up);
      state = ChainState{std::move(next), 0, seed, stream_id(StreamKind::glauber, i)};
      st.kernel->run(state, st.steps);
    }
    if (stage_steps) stage_steps->push_back(st.steps);
    const bool last_of_component = i + 1 == stages_.size() || !stages_[i + 1].kernel;
    if (last_of_component) {
      for (std::size_t k = 0; k < st.prefix.size(); ++k) out.set(st.prefix[k], state.config.up(static_cast<int>(k)));
    }
  }
  return out;
}

std::pair<SpinConfiguration, RunReport> incremental_sample(const IsingModel& model, const SamplerConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const IncrementalPlan plan(model, cfg);
  RunReport rep;
  rep.k_star = plan.k_star();
  rep.ordering = plan.ordering();
  rep.final_config = plan.sample(cfg.seed, &rep.stage_steps);
  for (auto s : rep.stage_steps) rep.total_updates += s;
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {rep.final_config, rep};
}

ValidationResult validate_incremental(const IsingModel& model, const SamplerConfig& cfg, std::uint64_t replicas,
                                      Exec exec) {
  if (replicas == 0) throw InputError("validate_incremental: replicas must be >= 1");
  if (model.num_free() > kTableCap) throw CapacityError("validate_incremental: too many free vertices for the oracle");
  const GibbsTable table = gibbs_table(model, exec);
  const IncrementalPlan plan(model, cfg);
  ValidationResult res;
  res.replicas = replicas;
  res.k_star = plan.k_star();
  res.counts = histogram(
      replicas, table.size(),
      [&](std::uint64_t r) { return static_cast<std::size_t>(table.index_of(plan.sample(derive_seed(cfg.seed, r)))); },
      exec);
  std::vector<double> emp(table.size());
  const double n = static_cast<double>(replicas);
  for (std::size_t x = 0; x < emp.size(); ++x) {
    emp[x] = static_cast<double>(res.counts[x]) / n;
    res.stat_err += 0.5 * std::sqrt(table.probs[x] * (1.0 - table.probs[x]) / n);
  }
  res.tv = tv_distance(emp, table.probs);
  return res;
}

Calibration calibrate_cstar(const IsingModel& model, const SamplerConfig& base, double epsilon,
                            std::uint64_t replicas, std::uint64_t k_max, Exec exec) {
  if (!(epsilon > 0.0)) throw InputError("calibrate_cstar: epsilon must be > 0");
  const int n = model.num_vertices();
  if (n < 2) {
    Calibration c;
    c.c_star = 1.0;
    c.k_star = 1;
    c.epsilon = epsilon;
    c.reached = true;
    return c;
  }
  Calibration cal;
  cal.epsilon = epsilon;
  for (std::uint64_t k = 1; k <= k_max; k *= 2) {
    SamplerConfig cfg = base;
    cfg.prefix_kstar = false;
    cfg.c_star = std::log(static_cast<double>(k)) / std::log(static_cast<double>(n));
    if (k == 1) cfg.c_star = 1e-9;
    const ValidationResult v = validate_incremental(model, cfg, replicas, exec);
    cal.tried.emplace_back(v.k_star, v.tv);
    if (v.tv <= epsilon) {
      cal.c_star = cfg.c_star;
      cal.k_star = v.k_star;
      cal.reached = true;
      return cal;
    }
  }
  return cal;
}

WarmStartBound warm_start_tv_bound(double m_warm, double a, double p, std::uint64_t k) {
  WarmStartBound b;
  if (!(p >= 1.0)) b.warnings.emplace_back("p must be >= 1");
  if (!(std::pow(a, p) >= 2.0 / std::pow(4.0, p - 1.0))) b.warnings.emplace_back("A^p must be >= 2/4^(p-1)");
  if (k < 2) b.warnings.emplace_back("k must be >= 2");
  if (!(m_warm >= 1.0)) b.warnings.emplace_back("M is a density bound and is expected to be >= 1");
  const double kk = static_cast<double>(std::max<std::uint64_t>(k, 1));
  b.value = m_warm * std::pow(std::pow(a, 2.0 * p) * std::log(kk) / kk, 1.0 / (2.0 * p - 1.0));
  return b;
}

double warm_start_constant(double beta, double c_alpha) {
  if (!(beta >= 0.0)) throw InputError("warm_start_constant: beta must be >= 0");
  return std::exp(4.0 * beta * std::exp(c_alpha));
}

}  // namespace rfim
