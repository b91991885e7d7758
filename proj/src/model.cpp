#include "rfim/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>

#include "rfim/error.hpp"
#include "rfim/rng.hpp"

namespace rfim {

std::string to_string(Convention c) { return c == Convention::plus_minus ? "pm" : "01"; }

Convention parse_convention(const std::string& s) {
  if (s == "pm" || s == "plus_minus") return Convention::plus_minus;
  if (s == "01" || s == "zero_one") return Convention::zero_one;
  throw InputError("unknown convention '" + s + "' (expected \"pm\" or \"01\")");
}

SpinConfiguration::SpinConfiguration(int n, Convention c, bool all_up)
    : n_(n), convention_(c), words_((static_cast<std::size_t>(n) + 63) / 64, all_up ? ~std::uint64_t{0} : 0) {
  if (n < 0) throw InputError("configuration: negative size");
  if (all_up && n % 64 != 0) words_.back() &= (std::uint64_t{1} << (n % 64)) - 1;
}

int SpinConfiguration::count_up() const {
  int c = 0;
  for (auto w : words_) c += std::popcount(w);
  return c;
}

SpinConfiguration SpinConfiguration::converted(Convention c) const {
  SpinConfiguration out = *this;
  out.convention_ = c;
  return out;
}

SpinConfiguration SpinConfiguration::from_spins(const std::vector<int>& spins, Convention c) {
  SpinConfiguration out(static_cast<int>(spins.size()), c);
  for (std::size_t v = 0; v < spins.size(); ++v) {
    const int s = spins[v];
    const bool ok = c == Convention::plus_minus ? (s == 1 || s == -1) : (s == 0 || s == 1);
    if (!ok) {
      throw InputError("configuration: spin " + std::to_string(s) + " at vertex " + std::to_string(v) +
                       " is not valid in convention " + to_string(c));
    }
    out.set(static_cast<int>(v), s == 1);
  }
  return out;
}

std::vector<int> SpinConfiguration::spins() const {
  std::vector<int> out(static_cast<std::size_t>(n_));
  for (int v = 0; v < n_; ++v) out[static_cast<std::size_t>(v)] = spin(v);
  return out;
}

bool SpinConfiguration::leq(const SpinConfiguration& other) const {
  for (std::size_t i = 0; i < words_.size(); ++i)
    if (words_[i] & ~other.words_[i]) return false;
  return true;
}

FieldDistribution FieldDistribution::gaussian(double sigma) {
  FieldDistribution d;
  d.kind = Kind::gaussian;
  d.param = sigma;
  d.validate();
  return d;
}

FieldDistribution FieldDistribution::uniform_symmetric(double m) {
  FieldDistribution d;
  d.kind = Kind::uniform_symmetric;
  d.param = m;
  d.validate();
  return d;
}

FieldDistribution FieldDistribution::two_point(double a) {
  FieldDistribution d;
  d.kind = Kind::two_point;
  d.param = a;
  d.validate();
  return d;
}

FieldDistribution FieldDistribution::shifted(FieldDistribution base, std::vector<double> offsets) {
  FieldDistribution d;
  d.kind = Kind::shifted;
  d.param = 0.0;
  d.base = std::make_shared<const FieldDistribution>(std::move(base));
  d.offsets = std::move(offsets);
  d.validate();
  return d;
}

void FieldDistribution::validate() const {
  switch (kind) {
    case Kind::gaussian:
      if (!(param > 0.0) || !std::isfinite(param)) throw InputError("gaussian field: sigma must be > 0");
      break;
    case Kind::uniform_symmetric:
      if (!(param > 0.0) || !std::isfinite(param)) throw InputError("uniform field: M must be > 0");
      break;
    case Kind::two_point:
      if (!(param >= 0.0) || !std::isfinite(param)) throw InputError("two_point field: a must be >= 0");
      break;
    case Kind::shifted:
      if (!base) throw InputError("shifted field: missing base distribution");
      if (base->kind == Kind::shifted) throw InputError("shifted field: base may not itself be shifted");
      base->validate();
      for (double o : offsets)
        if (!std::isfinite(o)) throw InputError("shifted field: non-finite offset");
      break;
  }
}

std::string FieldDistribution::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::gaussian: os << "gaussian(sigma=" << param << ")"; break;
    case Kind::uniform_symmetric: os << "uniform_symmetric(M=" << param << ")"; break;
    case Kind::two_point: os << "two_point(a=" << param << ")"; break;
    case Kind::shifted: os << "shifted(" << base->describe() << ")"; break;
  }
  return os.str();
}

namespace {

double draw_base(const FieldDistribution& d, const CounterRng& rng, std::uint64_t v) {
  switch (d.kind) {
    case FieldDistribution::Kind::gaussian: {
      const double u1 = rng.uniform(v);
      const double u2 = rng.uniform2(v);
      return d.param * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
    case FieldDistribution::Kind::uniform_symmetric:
      return d.param * (2.0 * rng.uniform(v) - 1.0);
    case FieldDistribution::Kind::two_point:
      return rng.uniform(v) < 0.5 ? -d.param : d.param;
    case FieldDistribution::Kind::shifted:
      break;
  }
  throw InputError("field: nested shifted distribution");
}

}  // namespace

QuenchedField sample_field(const FieldDistribution& dist, int n, std::uint64_t seed) {
  dist.validate();
  if (n < 0) throw InputError("sample_field: negative n");
  if (dist.kind == FieldDistribution::Kind::shifted && static_cast<int>(dist.offsets.size()) != n) {
    throw InputError("sample_field: shifted offsets have length " + std::to_string(dist.offsets.size()) +
                     ", expected " + std::to_string(n));
  }
  const CounterRng rng(seed, stream_id(StreamKind::field, 0));
  QuenchedField out;
  out.distribution = dist;
  out.seed = seed;
  out.values.resize(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) {
    const auto i = static_cast<std::size_t>(v);
    out.values[i] = dist.kind == FieldDistribution::Kind::shifted
                        ? draw_base(*dist.base, rng, i) + dist.offsets[i]
                        : draw_base(dist, rng, i);
  }
  return out;
}

IsingModel::IsingModel(std::shared_ptr<const Graph> g, double beta, std::vector<double> field, Convention c)
    : graph_(std::move(g)), field_(std::move(field)), convention_(c) {
  if (!graph_) throw InputError("model: null graph");
  couplings_.assign(static_cast<std::size_t>(graph_->num_edges()), beta);
  check_shapes();
}

IsingModel::IsingModel(std::shared_ptr<const Graph> g, std::vector<double> couplings, std::vector<double> field,
                       Convention c)
    : graph_(std::move(g)), couplings_(std::move(couplings)), field_(std::move(field)), convention_(c) {
  if (!graph_) throw InputError("model: null graph");
  check_shapes();
}

void IsingModel::check_shapes() {
  if (static_cast<int>(couplings_.size()) != graph_->num_edges()) {
    throw InputError("model: " + std::to_string(couplings_.size()) + " couplings for " +
                     std::to_string(graph_->num_edges()) + " edges");
  }
  if (static_cast<int>(field_.size()) != graph_->num_vertices()) {
    throw InputError("model: field has length " + std::to_string(field_.size()) + ", expected " +
                     std::to_string(graph_->num_vertices()));
  }
  for (double j : couplings_)
    if (!std::isfinite(j)) throw InputError("model: non-finite coupling");
  for (double h : field_)
    if (!std::isfinite(h)) throw InputError("model: non-finite field value");
  if (pins_.size() != field_.size()) pins_.assign(field_.size(), -1);
}

double IsingModel::beta_max() const {
  double m = 0.0;
  for (double j : couplings_) m = std::max(m, std::abs(j));
  return m;
}

bool IsingModel::ferromagnetic() const {
  return std::all_of(couplings_.begin(), couplings_.end(), [](double j) { return j >= 0.0; });
}

void IsingModel::require_ferromagnetic(const char* what) const {
  if (!ferromagnetic()) throw InputError(std::string(what) + ": requires non-negative couplings (FKG)");
}

std::vector<int> IsingModel::free_vertices() const {
  std::vector<int> out;
  for (int v = 0; v < num_vertices(); ++v)
    if (!is_pinned(v)) out.push_back(v);
  return out;
}

int IsingModel::num_free() const {
  return static_cast<int>(std::count(pins_.begin(), pins_.end(), std::int8_t{-1}));
}

Pinning IsingModel::pinning() const {
  Pinning out;
  for (int v = 0; v < num_vertices(); ++v)
    if (is_pinned(v)) out.push_back({v, pinned_up(v)});
  return out;
}

IsingModel IsingModel::with_pinning(const Pinning& extra) const {
  IsingModel out = *this;
  for (const Pin& p : extra) {
    if (!graph_->has_vertex(p.vertex)) {
      throw InputError("pinning: vertex " + std::to_string(p.vertex) + " out of range");
    }
    auto& slot = out.pins_[static_cast<std::size_t>(p.vertex)];
    const std::int8_t want = p.up ? 1 : 0;
    if (slot >= 0 && slot != want) {
      throw InfeasibleError("pinning: conflicting values at vertex " + std::to_string(p.vertex));
    }
    slot = want;
  }
  return out;
}

IsingModel IsingModel::without_pinning() const {
  IsingModel out = *this;
  std::fill(out.pins_.begin(), out.pins_.end(), std::int8_t{-1});
  return out;
}

IsingModel IsingModel::with_field(std::vector<double> field) const {
  IsingModel out = *this;
  out.field_ = std::move(field);
  out.check_shapes();
  return out;
}

IsingModel IsingModel::with_couplings(std::vector<double> couplings) const {
  IsingModel out = *this;
  out.couplings_ = std::move(couplings);
  out.check_shapes();
  return out;
}

double IsingModel::local_delta(int v, const SpinConfiguration& config) const {
  const auto nb = graph_->neighbors(v);
  const auto inc = graph_->incident_edges(v);
  double s = 0.0;
  if (convention_ == Convention::plus_minus) {
    for (std::size_t k = 0; k < nb.size(); ++k)
      s += couplings_[static_cast<std::size_t>(inc[k])] * (config.up(nb[k]) ? 1.0 : -1.0);
    return 2.0 * (s + field_[static_cast<std::size_t>(v)]);
  }
  for (std::size_t k = 0; k < nb.size(); ++k)
    if (config.up(nb[k])) s += couplings_[static_cast<std::size_t>(inc[k])];
  return s + field_[static_cast<std::size_t>(v)];
}

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double IsingModel::prob_up(int v, const SpinConfiguration& config) const {
  return logistic(local_delta(v, config));
}

SpinConfiguration IsingModel::constant_configuration(bool up) const {
  SpinConfiguration c(num_vertices(), convention_, up);
  for (int v = 0; v < num_vertices(); ++v)
    if (is_pinned(v)) c.set(v, pinned_up(v));
  return c;
}

bool IsingModel::respects_pinning(const SpinConfiguration& config) const {
  for (int v = 0; v < num_vertices(); ++v)
    if (is_pinned(v) && config.up(v) != pinned_up(v)) return false;
  return true;
}

IsingModel induced_model(const IsingModel& model, const std::vector<int>& vertices) {
  const Graph& g = model.graph();
  auto sub = std::make_shared<const Graph>(induced_subgraph(g, vertices));
  std::vector<double> couplings(static_cast<std::size_t>(sub->num_edges()));
  for (int e = 0; e < sub->num_edges(); ++e) {
    const Edge& ed = sub->edge(e);
    const int parent = *g.edge_id(vertices[static_cast<std::size_t>(ed.u)], vertices[static_cast<std::size_t>(ed.v)]);
    couplings[static_cast<std::size_t>(e)] = model.coupling(parent);
  }
  std::vector<double> field(vertices.size());
  Pinning pins;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    field[i] = model.field(vertices[i]);
    if (model.is_pinned(vertices[i])) pins.push_back({static_cast<int>(i), model.pinned_up(vertices[i])});
  }
  return IsingModel(std::move(sub), std::move(couplings), std::move(field), model.convention()).with_pinning(pins);
}

double hamiltonian(const IsingModel& model, const SpinConfiguration& sigma) {
  if (sigma.convention() != model.convention()) {
    throw InputError("hamiltonian: configuration is in convention " + to_string(sigma.convention()) +
                     " but model is " + to_string(model.convention()));
  }
  if (sigma.size() != model.num_vertices()) throw InputError("hamiltonian: configuration size mismatch");
  const Graph& g = model.graph();
  double h = 0.0;
  for (int e = 0; e < g.num_edges(); ++e) {
    const Edge& ed = g.edge(e);
    h += model.coupling(e) * sigma.spin(ed.u) * sigma.spin(ed.v);
  }
  for (int v = 0; v < g.num_vertices(); ++v) h += model.field(v) * sigma.spin(v);
  return h;
}

IsingModel to_zero_one(const IsingModel& model) {
  if (model.convention() != Convention::plus_minus) throw InputError("to_zero_one: model is not plus-minus");
  const Graph& g = model.graph();
  std::vector<double> couplings(model.couplings());
  std::vector<double> field(model.field());
  for (auto& h : field) h *= 2.0;
  for (int e = 0; e < g.num_edges(); ++e) {
    const double b = model.coupling(e);
    couplings[static_cast<std::size_t>(e)] = 4.0 * b;
    field[static_cast<std::size_t>(g.edge(e).u)] -= 2.0 * b;
    field[static_cast<std::size_t>(g.edge(e).v)] -= 2.0 * b;
  }
  return IsingModel(model.graph_ptr(), std::move(couplings), std::move(field), Convention::zero_one)
      .with_pinning(model.pinning());
}

IsingModel to_plus_minus(const IsingModel& model) {
  if (model.convention() != Convention::zero_one) throw InputError("to_plus_minus: model is not zero-one");
  const Graph& g = model.graph();
  std::vector<double> couplings(model.couplings());
  std::vector<double> field(model.field());
  for (int e = 0; e < g.num_edges(); ++e) {
    const double b = model.coupling(e) / 4.0;
    couplings[static_cast<std::size_t>(e)] = b;
    field[static_cast<std::size_t>(g.edge(e).u)] += 2.0 * b;
    field[static_cast<std::size_t>(g.edge(e).v)] += 2.0 * b;
  }
  for (auto& h : field) h /= 2.0;
  return IsingModel(model.graph_ptr(), std::move(couplings), std::move(field), Convention::plus_minus)
      .with_pinning(model.pinning());
}

IsingModel edge_tilt(const IsingModel& model01, double theta, const Pinning& pinning) {
  if (model01.convention() != Convention::zero_one) throw InputError("edge_tilt: model must be zero-one");
  if (!(theta >= 0.0 && theta < 1.0)) throw InputError("edge_tilt: theta must lie in [0,1)");
  IsingModel out = model01.with_pinning(pinning);
  if (theta == 0.0) return out;
  const double shift = std::log1p(-theta);
  std::vector<double> couplings(out.couplings());
  for (auto& j : couplings) j += shift;
  return out.with_couplings(std::move(couplings));
}

double theta_star(double beta) { return -std::expm1(-4.0 * beta); }

AssumptionParams assumption_params(double p0, double K, double beta, int delta) {
  if (delta < 3) throw InputError("assumption_params: max degree must be >= 3");
  if (!(p0 > 0.0 && p0 < 1.0)) throw InputError("assumption_params: p0 must lie in (0,1)");
  if (!(K > 0.0)) throw InputError("assumption_params: K must be > 0");
  if (!(beta > 0.0)) throw InputError("assumption_params: beta must be > 0");
  AssumptionParams a;
  a.p0 = p0;
  a.K = K;
  a.beta = beta;
  a.delta = delta;
  const double x = delta * beta - K;
  a.rho = logistic(2.0 * x);
  const double d = delta;
  a.xi_star = (d - 2.0) * std::log(d - 2.0) - std::log(p0) - (d - 1.0) * std::log(d - 1.0) -
              (d - 2.0) * std::log1p(-p0);
  a.alpha_star = a.xi_star / 2.0;
  a.gamma_star = std::log((1.0 - p0) / (p0 * (d - 2.0)));
  a.valid = p0 * (d - 1.0) < 1.0 && a.rho < p0 / 4.0;
  return a;
}

FieldAssumptionCheck check_field_assumption(const FieldDistribution& dist, double p0, double K) {
  dist.validate();
  if (!(p0 > 0.0 && p0 < 1.0)) throw InputError("check_field_assumption: p0 must lie in (0,1)");
  if (!(K >= 0.0)) throw InputError("check_field_assumption: K must be >= 0");
  FieldAssumptionCheck out;
  switch (dist.kind) {
    case FieldDistribution::Kind::gaussian:
      out.mass = std::erf(K / (dist.param * std::numbers::sqrt2));
      break;
    case FieldDistribution::Kind::uniform_symmetric:
      out.mass = std::min(1.0, K / dist.param);
      break;
    case FieldDistribution::Kind::two_point:
      out.mass = dist.param <= K ? 1.0 : 0.0;
      break;
    case FieldDistribution::Kind::shifted:
      throw InputError("check_field_assumption: shifted fields have no i.i.d. closed form");
  }
  out.holds = out.mass < p0 / 2.0;
  return out;
}

}  // namespace rfim
