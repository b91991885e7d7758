#include "rfim/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "rfim/error.hpp"
#include "rfim/rng.hpp"

namespace rfim {

SpinConfiguration GibbsTable::configuration(std::uint64_t x) const {
  SpinConfiguration c = model.constant_configuration(false);
  for (std::size_t i = 0; i < free.size(); ++i) c.set(free[i], (x >> i) & 1u);
  return c;
}

std::uint64_t GibbsTable::index_of(const SpinConfiguration& config) const {
  if (config.size() != model.num_vertices()) throw InputError("table index: configuration size mismatch");
  if (!model.respects_pinning(config)) throw InputError("table index: configuration violates pinning");
  std::uint64_t x = 0;
  for (std::size_t i = 0; i < free.size(); ++i)
    if (config.up(free[i])) x |= std::uint64_t{1} << i;
  return x;
}

double GibbsTable::marginal_up(int v) const {
  if (model.is_pinned(v)) return model.pinned_up(v) ? 1.0 : 0.0;
  const auto it = std::find(free.begin(), free.end(), v);
  if (it == free.end()) throw InputError("marginal_up: vertex out of range");
  const auto bit = static_cast<std::uint64_t>(it - free.begin());
  double s = 0.0;
  for (std::uint64_t x = 0; x < probs.size(); ++x)
    if ((x >> bit) & 1u) s += probs[x];
  return s;
}

GibbsTable gibbs_table(const IsingModel& model, Exec exec) {
  GibbsTable t;
  t.model = model;
  t.free = model.free_vertices();
  if (static_cast<int>(t.free.size()) > kTableCap) {
    throw CapacityError("gibbs_table: " + std::to_string(t.free.size()) + " free vertices exceeds the cap of " +
                        std::to_string(kTableCap));
  }
  t.log_weights = log_weights(model, t.free, exec);
  const double mx = *std::max_element(t.log_weights.begin(), t.log_weights.end());
  t.probs.resize(t.log_weights.size());
  double sum = 0.0;
  for (std::size_t x = 0; x < t.probs.size(); ++x) {
    t.probs[x] = std::exp(t.log_weights[x] - mx);
    sum += t.probs[x];
  }
  for (auto& p : t.probs) p /= sum;
  t.log_partition = mx + std::log(sum);
  return t;
}

GibbsTable conditional_table(const IsingModel& model, const Pinning& extra, Exec exec) {
  return gibbs_table(model.with_pinning(extra), exec);
}

TableSampler::TableSampler(GibbsTable table) : table_(std::move(table)), cdf_(table_.probs.size()) {
  std::partial_sum(table_.probs.begin(), table_.probs.end(), cdf_.begin());
}

std::uint64_t TableSampler::sample_index(double u) const {
  const double target = u * cdf_.back();
  const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), target);
  return static_cast<std::uint64_t>(std::min<std::ptrdiff_t>(it - cdf_.begin(), static_cast<std::ptrdiff_t>(cdf_.size()) - 1));
}

Moments mean_and_covariance(const GibbsTable& table) {
  const auto f = static_cast<Eigen::Index>(table.free.size());
  const Convention c = table.model.convention();
  Moments m;
  m.mean = Eigen::VectorXd::Zero(f);
  Eigen::MatrixXd second = Eigen::MatrixXd::Zero(f, f);
  Eigen::VectorXd s(f);
  for (std::uint64_t x = 0; x < table.probs.size(); ++x) {
    const double p = table.probs[x];
    for (Eigen::Index i = 0; i < f; ++i) s(i) = spin_value((x >> i) & 1u, c);
    m.mean += p * s;
    second.noalias() += p * s * s.transpose();
  }
  m.cov = second - m.mean * m.mean.transpose();
  return m;
}

namespace {

// Per edge: for each endpoint either a free bit index or a fixed up/down.
struct EdgeEventView {
  std::vector<std::uint64_t> need;  // bits that must be set
  std::vector<char> impossible;     // an endpoint pinned down
};

EdgeEventView edge_events(const GibbsTable& t) {
  const Graph& g = t.model.graph();
  std::vector<int> local(static_cast<std::size_t>(g.num_vertices()), -1);
  for (std::size_t i = 0; i < t.free.size(); ++i) local[static_cast<std::size_t>(t.free[i])] = static_cast<int>(i);
  EdgeEventView view;
  view.need.assign(static_cast<std::size_t>(g.num_edges()), 0);
  view.impossible.assign(static_cast<std::size_t>(g.num_edges()), 0);
  for (int e = 0; e < g.num_edges(); ++e) {
    for (int v : {g.edge(e).u, g.edge(e).v}) {
      const int i = local[static_cast<std::size_t>(v)];
      if (i >= 0) {
        view.need[static_cast<std::size_t>(e)] |= std::uint64_t{1} << i;
      } else if (!t.model.pinned_up(v)) {
        view.impossible[static_cast<std::size_t>(e)] = 1;
      }
    }
  }
  return view;
}

void require_zero_one(const GibbsTable& t, const char* what) {
  if (t.model.convention() != Convention::zero_one) {
    throw InputError(std::string(what) + ": requires a zero-one convention model");
  }
}

}  // namespace

std::vector<double> edge_event_probs(const GibbsTable& table) {
  const EdgeEventView view = edge_events(table);
  std::vector<double> out(view.need.size(), 0.0);
  for (std::size_t e = 0; e < out.size(); ++e) {
    if (view.impossible[e]) continue;
    for (std::uint64_t x = 0; x < table.probs.size(); ++x)
      if ((x & view.need[e]) == view.need[e]) out[e] += table.probs[x];
  }
  return out;
}

Eigen::MatrixXd cor2_matrix(const GibbsTable& table) {
  require_zero_one(table, "cor2_matrix");
  const EdgeEventView view = edge_events(table);
  const auto m = static_cast<Eigen::Index>(view.need.size());
  Eigen::MatrixXd joint = Eigen::MatrixXd::Zero(m, m);
  std::vector<Eigen::Index> sat;
  sat.reserve(static_cast<std::size_t>(m));
  for (std::uint64_t x = 0; x < table.probs.size(); ++x) {
    sat.clear();
    for (Eigen::Index e = 0; e < m; ++e) {
      const auto k = static_cast<std::size_t>(e);
      if (!view.impossible[k] && (x & view.need[k]) == view.need[k]) sat.push_back(e);
    }
    const double p = table.probs[x];
    for (Eigen::Index a : sat)
      for (Eigen::Index b : sat) joint(a, b) += p;
  }
  Eigen::MatrixXd cor = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    const double pa = joint(a, a);
    if (!(pa > 0.0)) continue;
    for (Eigen::Index b = 0; b < m; ++b) cor(a, b) = joint(a, b) / pa - joint(b, b);
  }
  return cor;
}

double tv_distance(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw InputError("tv_distance: distributions over different spaces");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

double tv_distance(const GibbsTable& a, const GibbsTable& b) {
  if (a.free != b.free || a.model.num_vertices() != b.model.num_vertices()) {
    throw InputError("tv_distance: tables index different free-vertex sets");
  }
  for (int v = 0; v < a.model.num_vertices(); ++v) {
    if (a.model.is_pinned(v) && a.model.pinned_up(v) != b.model.pinned_up(v)) {
      throw InputError("tv_distance: tables disagree on pinned vertex " + std::to_string(v));
    }
  }
  return tv_distance(a.probs, b.probs);
}

namespace {

int require_free(const GibbsTable& t, int cap, const char* what) {
  const int f = static_cast<int>(t.free.size());
  if (f > cap) {
    throw CapacityError(std::string(what) + ": " + std::to_string(f) + " free vertices exceeds the cap of " +
                        std::to_string(cap));
  }
  if (f == 0) throw InputError(std::string(what) + ": model has no free vertices");
  return f;
}

}  // namespace

Eigen::MatrixXd transition_matrix(const GibbsTable& table) {
  const int f = require_free(table, kGapCap, "transition_matrix");
  const auto n = static_cast<Eigen::Index>(table.size());
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index x = 0; x < n; ++x) {
    double out = 0.0;
    for (int i = 0; i < f; ++i) {
      const Eigen::Index y = x ^ (Eigen::Index{1} << i);
      const double q = logistic(table.log_weights[static_cast<std::size_t>(y)] -
                                table.log_weights[static_cast<std::size_t>(x)]) / f;
      p(x, y) = q;
      out += q;
    }
    p(x, x) = 1.0 - out;
  }
  return p;
}

HeatBathOperator heat_bath_operator(const GibbsTable& table) {
  HeatBathOperator op;
  op.f = static_cast<int>(table.free.size());
  if (op.f == 0) throw InputError("heat_bath_operator: model has no free vertices");
  const std::size_t n = table.size();
  op.flip.resize(n * static_cast<std::size_t>(op.f));
  op.stay.resize(n);
  for (std::size_t x = 0; x < n; ++x) {
    double out = 0.0;
    for (int i = 0; i < op.f; ++i) {
      const std::size_t y = x ^ (std::size_t{1} << i);
      const double q = logistic(table.log_weights[y] - table.log_weights[x]) / op.f;
      op.flip[x * static_cast<std::size_t>(op.f) + static_cast<std::size_t>(i)] = q;
      out += q;
    }
    op.stay[x] = 1.0 - out;
  }
  return op;
}

std::vector<double> HeatBathOperator::apply(const std::vector<double>& v) const {
  std::vector<double> out(v.size());
  const auto fs = static_cast<std::size_t>(f);
  for (std::size_t x = 0; x < v.size(); ++x) {
    double s = stay[x] * v[x];
    for (std::size_t i = 0; i < fs; ++i) s += flip[x * fs + i] * v[x ^ (std::size_t{1} << i)];
    out[x] = s;
  }
  return out;
}

namespace {

// Second eigenvalue from below of the generalized problem (A, diag π).
// Σ_{x<y} w_xy (v_x − v_y)² / Var_π(v) for a Laplacian-type matrix a.
double laplacian_rayleigh(const Eigen::MatrixXd& a, const std::vector<double>& pi, const Eigen::VectorXd& v) {
  const Eigen::Index n = a.rows();
  double mean = 0.0;
  for (Eigen::Index x = 0; x < n; ++x) mean += pi[static_cast<std::size_t>(x)] * v(x);
  double num = 0.0, den = 0.0;
  for (Eigen::Index x = 0; x < n; ++x) {
    den += pi[static_cast<std::size_t>(x)] * (v(x) - mean) * (v(x) - mean);
    for (Eigen::Index y = x + 1; y < n; ++y)
      if (a(x, y) != 0.0) num -= a(x, y) * (v(x) - v(y)) * (v(x) - v(y));
  }
  return num / den;
}

// Second smallest eigenvalue of a v = λ diag(π) v, refined by the Rayleigh
// quotient of its eigenvector in sum-of-squares form.
double second_generalized(const Eigen::MatrixXd& a, const std::vector<double>& pi) {
  const auto n = static_cast<Eigen::Index>(pi.size());
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index x = 0; x < n; ++x) d(x, x) = pi[static_cast<std::size_t>(x)];
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(a, d);
  if (es.info() != Eigen::Success) throw NumericalError("generalized eigensolver failed");
  return laplacian_rayleigh(a, pi, es.eigenvectors().col(1));
}

}  // namespace

namespace {

// Symmetrized kernel D^{1/2} P D^{-1/2}.
double symmetric_route_gap(const GibbsTable& t, int f) {
  const auto n = static_cast<Eigen::Index>(t.size());
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index x = 0; x < n; ++x) {
    double out = 0.0;
    for (int i = 0; i < f; ++i) {
      const Eigen::Index y = x ^ (Eigen::Index{1} << i);
      const double dh = t.log_weights[static_cast<std::size_t>(x)] - t.log_weights[static_cast<std::size_t>(y)];
      s(x, y) = 1.0 / (2.0 * std::cosh(0.5 * dh) * f);
      out += logistic(-dh) / f;
    }
    s(x, x) = 1.0 - out;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
  if (es.info() != Eigen::Success) throw NumericalError("heat-bath eigensolver failed");
  // 1 − λ₂ loses relative accuracy for small gaps; use the Rayleigh quotient
  // of I − P at the eigenvector instead.
  Eigen::MatrixXd ip = -s;
  Eigen::VectorXd v(n);
  for (Eigen::Index x = 0; x < n; ++x) {
    const double sp = std::sqrt(t.probs[static_cast<std::size_t>(x)]);
    v(x) = es.eigenvectors()(x, n - 2) / sp;
    for (int i = 0; i < f; ++i) {
      const Eigen::Index y = x ^ (Eigen::Index{1} << i);
      ip(x, y) *= sp * std::sqrt(t.probs[static_cast<std::size_t>(y)]);
    }
  }
  return laplacian_rayleigh(ip, t.probs, v);
}

}  // namespace

double heat_bath_gap(const IsingModel& model) {
  const GibbsTable t = gibbs_table(model, Exec::serial);
  return symmetric_route_gap(t, require_free(t, kGapCap, "heat_bath_gap"));
}

SpectralReport glauber_gap(const IsingModel& model) {
  const GibbsTable t = gibbs_table(model, Exec::serial);
  const int f = require_free(t, kGapCap, "glauber_gap");
  const auto n = static_cast<Eigen::Index>(t.size());
  SpectralReport rep;
  rep.free = f;
  rep.gap = symmetric_route_gap(t, f);

  // Route (b): Dirichlet form over ordered neighbouring pairs with factor 1/(2f).
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index x = 0; x < n; ++x) {
    for (int i = 0; i < f; ++i) {
      const Eigen::Index y = x ^ (Eigen::Index{1} << i);
      const double px = t.probs[static_cast<std::size_t>(x)];
      const double w = px * logistic(t.log_weights[static_cast<std::size_t>(y)] - t.log_weights[static_cast<std::size_t>(x)]);
      const double c = w / (2.0 * f);
      l(x, x) += c;
      l(y, y) += c;
      l(x, y) -= c;
      l(y, x) -= c;
    }
  }
  rep.gap_rayleigh = second_generalized(l, t.probs);
  if (std::abs(rep.gap - rep.gap_rayleigh) > 1e-9) {
    throw NumericalError("glauber_gap: eigenvalue route " + std::to_string(rep.gap) + " and Rayleigh route " +
                         std::to_string(rep.gap_rayleigh) + " disagree");
  }
  rep.at_variance_constant = 1.0 / (f * rep.gap);
  rep.notes = "uniform free-vertex heat-bath; gap = 1 - lambda_2";
  return rep;
}

double at_variance_constant(const IsingModel& model) {
  const GibbsTable t = gibbs_table(model, Exec::serial);
  const int f = require_free(t, kGapCap, "at_variance_constant");
  const auto n = static_cast<Eigen::Index>(t.size());
  // Σ_i E[Var(φ | rest_i)] = Σ over single-flip pairs π⁺π⁻/(π⁺+π⁻) (φ⁺ − φ⁻)².
  Eigen::MatrixXd tq = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index lo = 0; lo < n; ++lo) {
    for (int i = 0; i < f; ++i) {
      const Eigen::Index bit = Eigen::Index{1} << i;
      if (lo & bit) continue;
      const Eigen::Index hi = lo | bit;
      const double plo = t.probs[static_cast<std::size_t>(lo)];
      const double w = plo * logistic(t.log_weights[static_cast<std::size_t>(hi)] - t.log_weights[static_cast<std::size_t>(lo)]);
      tq(lo, lo) += w;
      tq(hi, hi) += w;
      tq(lo, hi) -= w;
      tq(hi, lo) -= w;
    }
  }
  return 1.0 / second_generalized(tq, t.probs);
}

double entropy(const std::vector<double>& pi, const std::vector<double>& f) {
  double m = 0.0;
  double s = 0.0;
  for (std::size_t x = 0; x < pi.size(); ++x) {
    m += pi[x] * f[x];
    if (f[x] > 0.0) s += pi[x] * f[x] * std::log(f[x]);
  }
  return m > 0.0 ? s - m * std::log(m) : 0.0;
}

double mlsi_ratio(const GibbsTable& table, const HeatBathOperator& p, const std::vector<double>& f) {
  const double e1 = entropy(table.probs, f);
  if (!(e1 > 0.0)) throw InputError("mlsi_ratio: f has zero entropy");
  return (e1 - entropy(table.probs, p.apply(f))) / e1;
}

namespace {

struct MlsiObjective {
  const GibbsTable& t;
  const HeatBathOperator& p;

  // Ratio and gradient with respect to g where f = exp(g − max g).
  double eval(const std::vector<double>& g, std::vector<double>* grad) const {
    const std::size_t n = g.size();
    const double gmax = *std::max_element(g.begin(), g.end());
    std::vector<double> f(n);
    for (std::size_t x = 0; x < n; ++x) f[x] = std::exp(g[x] - gmax);
    const std::vector<double> q = p.apply(f);
    double m = 0.0;
    for (std::size_t x = 0; x < n; ++x) m += t.probs[x] * f[x];
    const double lm = std::log(m);
    const double e1 = entropy(t.probs, f);
    const double e2 = entropy(t.probs, q);
    if (!(e1 > 1e-13 * m)) return std::numeric_limits<double>::infinity();
    const double r = (e1 - e2) / e1;
    if (grad) {
      std::vector<double> lq(n);
      for (std::size_t x = 0; x < n; ++x) lq[x] = q[x] > 0.0 ? std::log(q[x]) - lm : 0.0;
      const std::vector<double> plq = p.apply(lq);
      grad->resize(n);
      for (std::size_t x = 0; x < n; ++x) {
        const double d1 = t.probs[x] * ((f[x] > 0.0 ? std::log(f[x]) : 0.0) - lm);
        const double d2 = t.probs[x] * plq[x];
        (*grad)[x] = -f[x] * (d2 * e1 - e2 * d1) / (e1 * e1);
      }
    }
    return r;
  }
};

double descend(const MlsiObjective& obj, std::vector<double> g, int iterations) {
  std::vector<double> grad;
  double r = obj.eval(g, &grad);
  if (!std::isfinite(r)) return r;
  double step = 0.5;
  std::vector<double> trial(g.size());
  for (int it = 0; it < iterations && step > 1e-9; ++it) {
    double norm = 0.0;
    for (double v : grad) norm += v * v;
    norm = std::sqrt(norm);
    if (!(norm > 1e-14)) break;
    for (std::size_t x = 0; x < g.size(); ++x) trial[x] = g[x] - step * grad[x] / norm;
    std::vector<double> tgrad;
    const double rt = obj.eval(trial, &tgrad);
    if (rt < r) {
      g.swap(trial);
      grad.swap(tgrad);
      r = rt;
      step *= 1.5;
    } else {
      step *= 0.5;
    }
  }
  return r;
}

}  // namespace

MlsiEstimate mlsi_lower_estimate(const IsingModel& model, int restarts, std::uint64_t seed, Exec exec) {
  if (restarts < 1) throw InputError("mlsi_lower_estimate: restarts must be >= 1");
  const GibbsTable t = gibbs_table(model, Exec::serial);
  require_free(t, kMlsiCap, "mlsi_lower_estimate");
  const HeatBathOperator p = heat_bath_operator(t);
  const MlsiObjective obj{t, p};
  const std::size_t n = t.size();
  auto run = [&](std::uint64_t r) -> double {
    RngStream rng(seed, stream_id(StreamKind::optimizer, r));
    std::vector<double> g(n);
    if (r % 2 == 0) {
      const double scale = std::exp(4.0 * rng.uniform() - 1.0);
      for (auto& v : g) v = scale * rng.normal();
    } else {
      // Near-indicator of a random set.
      const double height = 1.0 + 20.0 * rng.uniform();
      const double dens = rng.uniform();
      for (auto& v : g) v = rng.uniform() < dens ? height : 0.0;
      g[rng.below(n)] = height;
    }
    const double res = descend(obj, std::move(g), 150);
    return std::isfinite(res) ? res : 1.0;
  };
  const auto ratios = map_indexed<double>(static_cast<std::uint64_t>(restarts), run, exec);
  MlsiEstimate est;
  est.restarts = restarts;
  est.ratio = *std::min_element(ratios.begin(), ratios.end());
  return est;
}

double operator_norm(const Eigen::MatrixXd& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  return svd.singularValues()(0);
}

Pinning decode_pinning(const std::vector<int>& vertices, std::uint64_t code) {
  Pinning out;
  for (std::size_t k = vertices.size(); k-- > 0;) {
    const auto digit = code % 3;
    code /= 3;
    if (digit != 0) out.push_back({vertices[k], digit == 2});
  }
  std::reverse(out.begin(), out.end());
  return out;
}

namespace {

struct SweepAccumulator {
  double max_row = 0, max_col = 0, max_op = -1;
  std::uint64_t arg_cell = 0;
  std::vector<double> row_sup, col_sup;
  std::uint64_t violations = 0;

  explicit SweepAccumulator(std::size_t m) : row_sup(m, 0.0), col_sup(m, 0.0) {}

  void merge(const SweepAccumulator& o) {
    max_row = std::max(max_row, o.max_row);
    max_col = std::max(max_col, o.max_col);
    if (o.max_op > max_op || (o.max_op == max_op && o.arg_cell < arg_cell)) {
      max_op = o.max_op;
      arg_cell = o.arg_cell;
    }
    for (std::size_t e = 0; e < row_sup.size(); ++e) {
      row_sup[e] = std::max(row_sup[e], o.row_sup[e]);
      col_sup[e] = std::max(col_sup[e], o.col_sup[e]);
    }
    violations += o.violations;
  }
};

}  // namespace

Cor2SweepReport sup_cor2_over_pinnings(const IsingModel& model01, const std::vector<double>& theta_grid, Exec exec,
                                       std::optional<int> samples, std::uint64_t seed) {
  if (model01.convention() != Convention::zero_one) throw InputError("cor2 sweep: model must be zero-one");
  if (theta_grid.empty()) throw InputError("cor2 sweep: empty theta grid");
  for (double th : theta_grid)
    if (!(th >= 0.0 && th < 1.0)) throw InputError("cor2 sweep: theta outside [0,1)");
  const std::vector<int> free = model01.free_vertices();
  const bool exact = !samples.has_value();
  if (exact && static_cast<int>(free.size()) > kSweepCap) {
    throw CapacityError("cor2 sweep: exact mode enumerates 3^f pinnings; f=" + std::to_string(free.size()) +
                        " exceeds the cap of " + std::to_string(kSweepCap));
  }
  if (!exact && *samples < 1) throw InputError("cor2 sweep: samples must be >= 1");
  if (static_cast<int>(free.size()) > kTableCap) throw CapacityError("cor2 sweep: too many free vertices");

  std::uint64_t codes = 1;
  if (exact) {
    for (std::size_t i = 0; i < free.size(); ++i) codes *= 3;
  } else {
    codes = static_cast<std::uint64_t>(*samples);
  }
  const std::uint64_t thetas = theta_grid.size();
  const std::uint64_t cells = codes * thetas;
  const auto m = static_cast<std::size_t>(model01.graph().num_edges());

  auto code_of = [&](std::uint64_t c) -> std::uint64_t {
    if (exact) return c;
    RngStream rng(seed, stream_id(StreamKind::pinning, c));
    std::uint64_t code = 0;
    for (std::size_t i = 0; i < free.size(); ++i) code = code * 3 + rng.below(3);
    return code;
  };

  auto visit = [&](std::uint64_t cell, SweepAccumulator& acc) {
    const std::uint64_t code = code_of(cell / thetas);
    const double theta = theta_grid[cell % thetas];
    const IsingModel nu = edge_tilt(model01, theta, decode_pinning(free, code));
    const Eigen::MatrixXd c = cor2_matrix(gibbs_table(nu, Exec::serial)).cwiseAbs();
    double row = 0.0, col = 0.0;
    for (std::size_t e = 0; e < m; ++e) {
      const double rs = c.row(static_cast<Eigen::Index>(e)).sum();
      const double cs = c.col(static_cast<Eigen::Index>(e)).sum();
      acc.row_sup[e] = std::max(acc.row_sup[e], rs);
      acc.col_sup[e] = std::max(acc.col_sup[e], cs);
      row = std::max(row, rs);
      col = std::max(col, cs);
    }
    const double op = operator_norm(c);
    acc.max_row = std::max(acc.max_row, row);
    acc.max_col = std::max(acc.max_col, col);
    if (op > acc.max_op || (op == acc.max_op && cell < acc.arg_cell)) {
      acc.max_op = op;
      acc.arg_cell = cell;
    }
    const double bound = std::sqrt(row * col);
    if (op > bound * (1.0 + 64 * std::numeric_limits<double>::epsilon()) + 1e-300) ++acc.violations;
  };

  SweepAccumulator total(m);
  if (exec == Exec::serial) {
    for (std::uint64_t cell = 0; cell < cells; ++cell) visit(cell, total);
  } else {
#pragma omp parallel
    {
      SweepAccumulator local(m);
#pragma omp for schedule(dynamic, 8)
      for (std::int64_t cell = 0; cell < static_cast<std::int64_t>(cells); ++cell)
        visit(static_cast<std::uint64_t>(cell), local);
#pragma omp critical
      total.merge(local);
    }
  }

  Cor2SweepReport rep;
  rep.exact = exact;
  rep.cells = cells;
  rep.max_row_sum = total.max_row;
  rep.max_col_sum = total.max_col;
  rep.max_opnorm = std::max(0.0, total.max_op);
  rep.edge_row_sup = std::move(total.row_sup);
  rep.edge_col_sup = std::move(total.col_sup);
  rep.argmax_pinning = code_of(total.arg_cell / thetas);
  rep.argmax_theta = static_cast<std::size_t>(total.arg_cell % thetas);
  rep.interpolation_violations = total.violations;
  return rep;
}

}  // namespace rfim
