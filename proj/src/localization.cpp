#include "rfim/localization.hpp"

#include <algorithm>
#include <cmath>

#include "rfim/error.hpp"
#include "rfim/glauber.hpp"
#include "rfim/kernels.hpp"
#include "rfim/rng.hpp"

namespace rfim {

std::vector<int> DenoisingTrace::revealed(double t) const {
  const Graph& g = base_model.graph();
  std::vector<int> out;
  for (int e = 0; e < g.num_edges(); ++e) {
    if (x_sample.up(g.edge(e).u) && x_sample.up(g.edge(e).v) && edge_uniforms[static_cast<std::size_t>(e)] <= t) {
      out.push_back(e);
    }
  }
  return out;
}

namespace {

void require01(const IsingModel& m, const char* what) {
  if (m.convention() != Convention::zero_one) throw InputError(std::string(what) + ": model must be zero-one");
}

std::vector<double> edge_uniforms(std::uint64_t seed, std::uint64_t index, int m) {
  const CounterRng rng(seed, stream_id(StreamKind::trace, 1 + index));
  std::vector<double> out(static_cast<std::size_t>(m));
  for (int e = 0; e < m; ++e) out[static_cast<std::size_t>(e)] = rng.uniform(static_cast<std::uint64_t>(e));
  return out;
}

}  // namespace

DenoisingTrace sample_noising_trace(const TableSampler& sampler, std::uint64_t seed, std::uint64_t index) {
  const IsingModel& model = sampler.table().model;
  require01(model, "sample_noising_trace");
  DenoisingTrace tr;
  tr.base_model = model;
  tr.x_sample = sampler.sample(CounterRng(seed, stream_id(StreamKind::trace, 0)).uniform(index));
  tr.edge_uniforms = edge_uniforms(seed, index, model.graph().num_edges());
  return tr;
}

DenoisingTrace sample_noising_trace(const IsingModel& model01, const TraceSampler& sampler, std::uint64_t seed) {
  require01(model01, "sample_noising_trace");
  if (sampler.kind == TraceSampler::Kind::oracle) {
    return sample_noising_trace(TableSampler(gibbs_table(model01)), seed, 0);
  }
  DenoisingTrace tr;
  tr.base_model = model01;
  tr.x_sample = run_chain(model01, model01.constant_configuration(false), sampler.glauber_steps, seed)
                    .final_state.config;
  tr.edge_uniforms = edge_uniforms(seed, 0, model01.graph().num_edges());
  return tr;
}

namespace {

Pinning endpoint_pins(const Graph& g, const std::vector<int>& revealed) {
  Pinning pins;
  for (int e : revealed) {
    if (e < 0 || e >= g.num_edges()) throw InputError("revealed set: edge id " + std::to_string(e) + " out of range");
    pins.push_back({g.edge(e).u, true});
    pins.push_back({g.edge(e).v, true});
  }
  return pins;
}

}  // namespace

IsingModel posterior_model(const IsingModel& model01, double t, const std::vector<int>& revealed) {
  require01(model01, "posterior_model");
  if (!(t >= 0.0 && t < 1.0)) throw InputError("posterior_model: t must lie in [0,1)");
  return edge_tilt(model01, t, endpoint_pins(model01.graph(), revealed));
}

std::optional<std::vector<double>> bayes_posterior(const IsingModel& model01, double t, const std::vector<int>& revealed) {
  require01(model01, "bayes_posterior");
  if (!(t >= 0.0 && t < 1.0)) throw InputError("bayes_posterior: t must lie in [0,1)");
  IsingModel post;
  try {
    post = model01.with_pinning(endpoint_pins(model01.graph(), revealed));
  } catch (const InfeasibleError&) {
    return std::nullopt;
  }
  const GibbsTable base = gibbs_table(model01, Exec::serial);
  const std::vector<int> post_free = post.free_vertices();
  const Graph& g = model01.graph();
  std::vector<char> in_s(static_cast<std::size_t>(g.num_edges()), 0);
  for (int e : revealed) in_s[static_cast<std::size_t>(e)] = 1;

  std::vector<double> out(std::size_t{1} << post_free.size(), 0.0);
  double total = 0.0;
  for (std::uint64_t x = 0; x < base.size(); ++x) {
    const SpinConfiguration c = base.configuration(x);
    int z_minus_s = 0;
    bool covers = true;
    for (int e = 0; e < g.num_edges(); ++e) {
      const bool sat = c.up(g.edge(e).u) && c.up(g.edge(e).v);
      if (in_s[static_cast<std::size_t>(e)] && !sat) {
        covers = false;
        break;
      }
      if (sat && !in_s[static_cast<std::size_t>(e)]) ++z_minus_s;
    }
    if (!covers) continue;
    const double w = base.probs[x] * std::pow(t, static_cast<double>(revealed.size())) *
                     std::pow(1.0 - t, static_cast<double>(z_minus_s));
    if (w == 0.0) continue;
    std::uint64_t y = 0;
    for (std::size_t i = 0; i < post_free.size(); ++i)
      if (c.up(post_free[i])) y |= std::uint64_t{1} << i;
    out[y] += w;
    total += w;
  }
  if (!(total > 0.0)) return std::nullopt;
  for (auto& p : out) p /= total;
  return out;
}

PosteriorReport verify_posterior_by_simulation(const IsingModel& model01, double t, std::uint64_t traces,
                                               std::uint64_t seed, std::uint64_t min_hits) {
  require01(model01, "verify_posterior_by_simulation");
  if (!(t >= 0.0 && t < 1.0)) throw InputError("verify_posterior_by_simulation: t must lie in [0,1)");
  const TableSampler sampler(gibbs_table(model01));
  const Graph& g = model01.graph();
  const int m = g.num_edges();
  const std::size_t n = sampler.table().size();
  if (m > 20 || (std::size_t{1} << m) * n > (std::size_t{1} << 24)) {
    throw CapacityError("verify_posterior_by_simulation: revealed-set buckets exceed capacity");
  }
  auto one = [&](std::uint64_t i) -> std::size_t {
    const DenoisingTrace tr = sample_noising_trace(sampler, seed, i);
    std::size_t mask = 0;
    for (int e : tr.revealed(t)) mask |= std::size_t{1} << e;
    return mask * n + sampler.table().index_of(tr.x_sample);
  };
  const auto counts = histogram(traces, (std::size_t{1} << m) * n, one, Exec::parallel);

  PosteriorReport rep;
  rep.traces = traces;
  rep.min_hits = min_hits;
  for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
    std::uint64_t hits = 0;
    for (std::size_t x = 0; x < n; ++x) hits += counts[mask * n + x];
    if (hits < min_hits || hits == 0) continue;
    PosteriorBucket b;
    for (int e = 0; e < m; ++e)
      if (mask >> e & 1u) b.revealed.push_back(e);
    b.hits = hits;
    const GibbsTable post = gibbs_table(posterior_model(model01, t, b.revealed), Exec::serial);
    std::vector<double> emp(post.size(), 0.0);
    for (std::size_t x = 0; x < n; ++x) {
      if (counts[mask * n + x] == 0) continue;
      emp[post.index_of(sampler.table().configuration(x))] += static_cast<double>(counts[mask * n + x]) / hits;
    }
    b.tv = tv_distance(emp, post.probs);
    for (double p : post.probs) b.stat_err += 0.5 * std::sqrt(p * (1.0 - p) / static_cast<double>(hits));
    rep.max_tv = std::max(rep.max_tv, b.tv);
    rep.buckets.push_back(std::move(b));
  }
  return rep;
}

ConservationCertificate variance_conservation_R(double c, double theta) {
  if (!(c >= 0.0)) throw InputError("variance_conservation_R: C must be >= 0");
  if (!(theta >= 0.0 && theta < 1.0)) throw InputError("variance_conservation_R: theta must lie in [0,1)");
  ConservationCertificate cert;
  cert.kind = ConservationCertificate::Kind::variance;
  cert.theta = theta;
  cert.rate_c = c;
  cert.log_R = -c * std::log1p(-theta);
  cert.R = std::exp(cert.log_R);
  cert.formula_id = "variance: R = (1-theta)^(-C)";
  return cert;
}

ConservationCertificate entropy_conservation_R(double eta_op, double k_low, double theta) {
  if (!(eta_op >= 1.0)) throw InputError("entropy_conservation_R: eta_op must be >= 1");
  if (!(k_low >= 1.0)) throw InputError("entropy_conservation_R: k_low must be >= 1");
  if (!(theta > 0.0 && theta < 1.0)) throw InputError("entropy_conservation_R: theta must lie in (0,1)");
  ConservationCertificate cert;
  cert.kind = ConservationCertificate::Kind::entropy;
  cert.theta = theta;
  cert.eta_op = eta_op;
  cert.k_low = k_low;
  cert.L = (k_low + 1.0) * (eta_op - 1.0) + 1.0;
  const double log_a = cert.L * std::log1p(-theta);  // log (1−θ)^L
  const double one_minus_a = -std::expm1(log_a);
  cert.ES = cert.L / one_minus_a;
  const double b = -log_a - std::log(one_minus_a);  // log of ES/(L(1−θ)^L)
  cert.log_R = b > 0.0 ? b + std::log1p(std::exp(-b)) : std::log1p(std::exp(b));
  cert.R = std::exp(cert.log_R);
  cert.formula_id = "entropy: L=(K_low+1)(eta_op-1)+1, ES=L/(1-(1-theta)^L), R=1+ES/(L(1-theta)^L)";
  return cert;
}

double marginal_constant(int delta, double m_bound, double beta) {
  if (delta < 0 || !(m_bound >= 0.0) || !(beta >= 0.0)) throw InputError("marginal_constant: negative input");
  const double a = 1.0 + std::exp(2.0 * (beta * delta + m_bound));
  return a * a;
}

double marginal_lower_bound(int delta, double m_bound, double beta) {
  return 1.0 / marginal_constant(delta, m_bound, beta);
}

EntropyInstantiation entropy_conservation_instance(int n, double beta, int delta, double m_bound, double alpha_star) {
  if (n < 1 || !(beta > 0.0) || delta < 1 || !(alpha_star > 0.0)) {
    throw InputError("entropy_conservation_instance: parameters must be positive");
  }
  EntropyInstantiation out;
  const double eta = std::max(1.0, 4.0 * delta * std::log(static_cast<double>(n)) / alpha_star);
  const double c = marginal_constant(delta, m_bound, beta);
  out.certificate = entropy_conservation_R(eta, c, theta_star(beta));
  const double log_n = std::log(static_cast<double>(n));
  out.log_rho_from_R = -out.certificate.log_R - log_n;
  out.rho_from_R = std::exp(out.log_rho_from_R);
  const double log_closed = std::log(3.0) + 4.0 * beta * ((c + 1.0) * eta + 1.0);
  out.closed_form_R = std::exp(log_closed);
  out.log_closed_form_rho = -log_closed - log_n;
  out.closed_form_rho = std::exp(out.log_closed_form_rho);
  return out;
}

GibbsTable vertex_tilt_table(const IsingModel& model01, double theta) {
  require01(model01, "vertex_tilt_table");
  if (!(theta > 0.0 && theta <= 1.0)) throw InputError("vertex_tilt_table: theta must lie in (0,1]");
  std::vector<double> field(model01.field());
  const double shift = std::log(theta);
  for (auto& h : field) h += shift;
  return gibbs_table(model01.with_field(std::move(field)));
}

std::vector<std::vector<int>> feasible_revealed_sets(const IsingModel& model01, double t) {
  require01(model01, "feasible_revealed_sets");
  const Graph& g = model01.graph();
  const int m = g.num_edges();
  if (m > 20) throw CapacityError("feasible_revealed_sets: more than 20 edges");
  std::vector<std::vector<int>> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    if (t == 0.0 && mask != 0) continue;
    std::vector<int> s;
    bool ok = true;
    for (int e = 0; e < m && ok; ++e) {
      if (!(mask >> e & 1u)) continue;
      s.push_back(e);
      for (int v : {g.edge(e).u, g.edge(e).v})
        if (model01.is_pinned(v) && !model01.pinned_up(v)) ok = false;
    }
    if (ok) out.push_back(std::move(s));
  }
  return out;
}

}  // namespace rfim
