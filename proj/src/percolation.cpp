#include "rfim/percolation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rfim/error.hpp"
#include "rfim/glauber.hpp"
#include "rfim/localization.hpp"
#include "rfim/oracle.hpp"

namespace rfim {

VertexSet PercolationRealization::open_set() const {
  VertexSet out;
  for (int v = 0; v < static_cast<int>(provenance.size()); ++v)
    if (open(v)) out.push_back(v);
  return out;
}

PercolationRealization percolate(std::shared_ptr<const Graph> g, const std::vector<double>& field, double K,
                                 double p0, std::uint64_t seed) {
  if (!g) throw InputError("percolate: null graph");
  if (!(p0 > 0.0 && p0 < 1.0)) throw InputError("percolate: p0 must lie in (0,1)");
  if (static_cast<int>(field.size()) != g->num_vertices()) throw InputError("percolate: field length mismatch");
  PercolationRealization r;
  r.graph = std::move(g);
  r.seed = seed;
  r.provenance.resize(field.size());
  for (int x = 0; x < static_cast<int>(field.size()); ++x) {
    const double u = site_uniform(seed, x);
    SiteState s = SiteState::closed;
    if (std::abs(field[static_cast<std::size_t>(x)]) <= K) {
      s = SiteState::field_open;
    } else if (std::min(u, 1.0 - u) <= p0 / 4.0) {
      s = SiteState::uniform_open;
    }
    r.provenance[static_cast<std::size_t>(x)] = s;
  }
  return r;
}

VertexSet cluster_of_edge(const PercolationRealization& r, Edge e) {
  const Graph& g = *r.graph;
  if (!g.edge_id(e.u, e.v)) throw InputError("cluster_of_edge: not an edge");
  std::vector<char> seen(static_cast<std::size_t>(g.num_vertices()), 0);
  std::vector<int> queue{e.u, e.v};
  seen[static_cast<std::size_t>(e.u)] = seen[static_cast<std::size_t>(e.v)] = 1;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    for (int w : g.neighbors(queue[head])) {
      if (!seen[static_cast<std::size_t>(w)] && r.open(w)) {
        seen[static_cast<std::size_t>(w)] = 1;
        queue.push_back(w);
      }
    }
  }
  std::sort(queue.begin(), queue.end());
  return queue;
}

DisagreementResult disagreement_experiment(const IsingModel& model01, Edge e, double theta, const Pinning& extra,
                                           const std::vector<double>& field_pm, double K, double p0,
                                           std::uint64_t seed) {
  model01.require_ferromagnetic("disagreement_experiment");
  const IsingModel nu = edge_tilt(model01, theta, extra);
  const IsingModel nu_uv = nu.with_pinning({{e.u, true}, {e.v, true}});
  const GibbsTable t1 = gibbs_table(nu, Exec::serial);
  const GibbsTable t2 = gibbs_table(nu_uv, Exec::serial);
  const GrandCoupling gc = grand_coupled_update(std::vector<const GibbsTable*>{&t1, &t2}, bfs_order_from_edge(model01.graph(), e), seed);
  const PercolationRealization perc = percolate(model01.graph_ptr(), field_pm, K, p0, seed);
  DisagreementResult out;
  out.disagreement = gc.disagreement_set;
  out.cluster = cluster_of_edge(perc, e);
  out.contained = std::includes(out.cluster.begin(), out.cluster.end(), out.disagreement.begin(),
                                out.disagreement.end());
  return out;
}

namespace {

void check_od_domain(int delta, double p0) {
  if (delta < 3) throw InputError("otter_dwass: max degree must be >= 3");
  if (!(p0 > 0.0 && p0 < 1.0)) throw InputError("otter_dwass: p0 must lie in (0,1)");
}

}  // namespace

double otter_dwass_pmf(int delta, double p0, int x) {
  check_od_domain(delta, p0);
  if (x < 2) throw InputError("otter_dwass_pmf: x must be >= 2");
  const double trials = static_cast<double>(delta - 1) * x;
  const double k = x - 2;
  const double log_binom = std::lgamma(trials + 1.0) - std::lgamma(k + 1.0) - std::lgamma(trials - k + 1.0);
  return 2.0 / x * std::exp(log_binom + k * std::log(p0) + (trials - k) * std::log1p(-p0));
}

double otter_dwass_tail(int delta, double p0, int m, int x_max) {
  double s = 0.0;
  for (int x = std::max(m, 2); x <= x_max; ++x) s += otter_dwass_pmf(delta, p0, x);
  return s;
}

ClusterTailBound cluster_tail_bound(int delta, double p0, int m) {
  check_od_domain(delta, p0);
  if (!(p0 * (delta - 1) < 1.0)) throw InputError("cluster_tail_bound: requires p0(Δ−1) < 1");
  const double d = delta;
  ClusterTailBound b;
  b.xi_star = (d - 2.0) * std::log(d - 2.0) - std::log(p0) - (d - 1.0) * std::log(d - 1.0) -
              (d - 2.0) * std::log1p(-p0);
  b.alpha_star = b.xi_star / 2.0;
  const double c = (1.0 - p0) / (p0 * (d - 2.0));
  b.tail_bound = 2.0 / (-std::expm1(-b.xi_star)) * c * c * std::exp(-b.xi_star * m);
  b.exp_moment_bound = 2.0 / ((-std::expm1(-2.0 * b.alpha_star)) * (-std::expm1(-b.alpha_star))) * c * c;
  return b;
}

namespace {

double tail_prefactor(double alpha) { return 2.0 / ((-std::expm1(-alpha)) * (-std::expm1(-2.0 * alpha))); }

}  // namespace

double row_sum_tail_bound(const AssumptionParams& a, double m) {
  return tail_prefactor(a.alpha_star) * std::exp(2.0 * a.gamma_star - a.alpha_star * m);
}

TailReport row_sum_tail_report(std::shared_ptr<const Graph> g, const TailConfig& cfg, Exec exec) {
  if (!g) throw InputError("row_sum_tail_report: null graph");
  if (cfg.delta < g->max_degree()) throw InputError("row_sum_tail_report: declared degree below the graph's");
  if (cfg.trials == 0) throw InputError("row_sum_tail_report: trials must be >= 1");
  if (cfg.theta_grid.empty() || cfg.m_grid.empty()) throw InputError("row_sum_tail_report: empty grid");
  TailReport rep;
  rep.params = assumption_params(cfg.p0, cfg.K, cfg.beta, cfg.delta);
  rep.exact = !cfg.sampled_pinnings.has_value();
  rep.trials = cfg.trials;
  const int n = g->num_vertices();
  const auto m_edges = static_cast<std::size_t>(g->num_edges());

  // Each trial: per-edge sup row and column sums over pinnings and θ.
  auto one = [&](std::uint64_t trial) {
    const QuenchedField h = sample_field(cfg.field, n, derive_seed(cfg.seed, trial));
    const IsingModel pm(g, cfg.beta, h.values);
    const Cor2SweepReport sw = sup_cor2_over_pinnings(to_zero_one(pm), cfg.theta_grid, Exec::serial,
                                                      cfg.sampled_pinnings, derive_seed(cfg.seed, trial));
    std::vector<double> both(sw.edge_row_sup);
    both.insert(both.end(), sw.edge_col_sup.begin(), sw.edge_col_sup.end());
    return both;
  };
  const auto sups = map_indexed<std::vector<double>>(cfg.trials, one, exec);

  const double big_n = static_cast<double>(cfg.trials);
  for (double m : cfg.m_grid) {
    TailRow row;
    row.m = m;
    row.bound = row_sum_tail_bound(rep.params, m);
    const double b = std::min(row.bound, 1.0);
    row.slack = 2.326 * std::sqrt(b * (1.0 - b) / big_n);
    for (std::size_t e = 0; e < m_edges; ++e) {
      std::uint64_t rows = 0, cols = 0;
      for (const auto& s : sups) {
        if (s[e] >= cfg.delta * m) ++rows;
        if (s[m_edges + e] >= 2.0 * cfg.delta * m) ++cols;
      }
      row.max_row_freq = std::max(row.max_row_freq, rows / big_n);
      row.max_col_freq = std::max(row.max_col_freq, cols / big_n);
    }
    row.ok = row.max_row_freq <= row.bound + row.slack && row.max_col_freq <= row.bound + row.slack;
    rep.ok = rep.ok && row.ok;
    rep.rows.push_back(row);
  }
  return rep;
}

NormCheck norm_interpolation_check(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw InputError("norm_interpolation_check: matrix is not square");
  NormCheck c;
  if (a.size() == 0) return c;
  const Eigen::MatrixXd abs = a.cwiseAbs();
  c.rowsum_max = abs.rowwise().sum().maxCoeff();
  c.colsum_max = abs.colwise().sum().maxCoeff();
  c.opnorm = operator_norm(a);
  c.bound = std::sqrt(c.rowsum_max * c.colsum_max);
  c.ok = c.opnorm <= c.bound * (1.0 + 64 * std::numeric_limits<double>::epsilon());
  return c;
}

double p0_from_alpha(int delta, double alpha_star) {
  if (delta < 3) throw InputError("p0_from_alpha: max degree must be >= 3");
  if (!(alpha_star > 0.0)) throw InputError("p0_from_alpha: alpha_star must be > 0");
  const double d = delta;
  auto alpha = [&](double p) {
    return 0.5 * ((d - 2.0) * std::log(d - 2.0) - std::log(p) - (d - 1.0) * std::log(d - 1.0) -
                  (d - 2.0) * std::log1p(-p));
  };
  // α* is decreasing on (0, 1/(Δ−1)) from +∞ to 0; bisect in log p.
  double lo = -745.0, hi = std::log(1.0 / (d - 1.0));
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (alpha(std::exp(mid)) > alpha_star) lo = mid; else hi = mid;
  }
  return std::exp(0.5 * (lo + hi));
}

double GapCertificate::tmix_upper(double eps, double field_l1) const {
  if (!(eps > 0.0 && eps < 1.0)) throw InputError("tmix_upper: eps must lie in (0,1)");
  return std::pow(static_cast<double>(n), tmix_exponent) * (beta * delta * n + field_l1 + std::log(1.0 / eps));
}

namespace {

void check_cert_inputs(int n, double beta, int delta, double alpha_star, const char* what) {
  if (n < 1 || !(beta > 0.0) || delta < 1 || !(alpha_star > 0.0)) {
    throw InputError(std::string(what) + ": n, beta, delta and alpha_star must be positive");
  }
}

}  // namespace

GapCertificate gap_certificate(int n, double beta, int delta, double alpha_star) {
  check_cert_inputs(n, beta, delta, alpha_star, "gap_certificate");
  GapCertificate c;
  c.n = n;
  c.beta = beta;
  c.delta = delta;
  c.alpha_star = alpha_star;
  const double ln_n = std::log(static_cast<double>(n));
  c.log_gap_lower = -ln_n - 16.0 * beta * delta * ln_n / alpha_star;
  c.gap_lower = std::exp(c.log_gap_lower);
  c.tmix_exponent = 1.0 + 16.0 * beta * delta / alpha_star;
  if (delta >= 3) {
    const double p0 = p0_from_alpha(delta, alpha_star);
    const double gamma = std::log((1.0 - p0) / (p0 * (delta - 2.0)));
    c.failure_constant = 2.0 * n * delta * tail_prefactor(alpha_star) * std::exp(2.0 * gamma) / (static_cast<double>(n) * n);
    c.failure_probability_note = "holds except with field probability at most 2nΔ·2/((1-e^-a)(1-e^-2a))·e^(2γ*)/n^2 = " +
                                 std::to_string(c.failure_constant);
  } else {
    c.failure_probability_note = "failure constant requires max degree >= 3";
  }
  return c;
}

MlsiCertificate mlsi_certificate(int n, double beta, int delta, double alpha_star, double m_bound) {
  check_cert_inputs(n, beta, delta, alpha_star, "mlsi_certificate");
  if (!(m_bound >= 0.0)) throw InputError("mlsi_certificate: field bound must be >= 0");
  MlsiCertificate c;
  c.n = n;
  c.beta = beta;
  c.delta = delta;
  c.alpha_star = alpha_star;
  c.m_bound = m_bound;
  c.c_marginal = marginal_constant(delta, m_bound, beta);
  const double eta = 4.0 * delta * std::log(static_cast<double>(n)) / alpha_star;
  c.log_rho_lower = -std::log(3.0 * n) - 4.0 * beta * ((c.c_marginal + 1.0) * eta + 1.0);
  c.rho_lower = std::exp(c.log_rho_lower);
  return c;
}

RefinedGapTail refined_gap_tail(int n, double beta, int delta, double alpha_star, double L) {
  check_cert_inputs(n, beta, delta, alpha_star, "refined_gap_tail");
  if (delta < 3) throw InputError("refined_gap_tail: max degree must be >= 3");
  if (!(L > 0.0)) throw InputError("refined_gap_tail: L must be > 0");
  RefinedGapTail r;
  const double s = std::sqrt(alpha_star);
  r.epsilon = 16.0 * beta * delta / s;
  const double ln_n = std::log(static_cast<double>(n));
  r.log_gap_inverse = ln_n + r.epsilon * L;
  r.gap_lower = std::exp(-r.log_gap_inverse);
  r.failure = std::exp(-2.0 * L);
  r.p0 = p0_from_alpha(delta, alpha_star);
  const double gamma = std::log((1.0 - r.p0) / (r.p0 * (delta - 2.0)));
  // nΔ·c·e^{2γ*}·e^{−√α* L} ≤ e^{−2L}  ⟺  L(√α* − 2) ≥ ln(nΔ c e^{2γ*}).
  const double rhs = std::log(n * static_cast<double>(delta) * tail_prefactor(alpha_star)) + 2.0 * gamma;
  if (s > 2.0) {
    r.l_threshold = std::max(0.0, rhs / (s - 2.0));
    r.kappa0 = ln_n > 0.0 ? r.l_threshold / ln_n : std::numeric_limits<double>::infinity();
    r.threshold_met = L >= r.l_threshold;
  } else {
    r.l_threshold = std::numeric_limits<double>::infinity();
    r.kappa0 = std::numeric_limits<double>::infinity();
    r.threshold_met = false;
  }
  return r;
}

}  // namespace rfim
