#include "rfim/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "rfim/error.hpp"

namespace rfim {

namespace {

std::string at(const std::string& path, const std::string& key) { return path + "." + key; }

const Json& member(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw InputError(path + ": expected an object");
  const auto it = j.find(key);
  if (it == j.end()) throw InputError(at(path, key) + ": required field is missing");
  return *it;
}

Json num(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

std::vector<double> number_array(const Json& j, const std::string& path) {
  if (!j.is_array()) throw InputError(path + ": expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw InputError(path + "[" + std::to_string(i) + "]: expected a number");
    out.push_back(j[i].get<double>());
  }
  return out;
}

bool spin_is_up(const Json& s, Convention c, const std::string& path) {
  if (!s.is_number_integer()) throw InputError(path + ": expected an integer spin");
  const auto v = s.get<std::int64_t>();
  if (c == Convention::plus_minus) {
    if (v != 1 && v != -1) throw InputError(path + ": plus-minus spins must be +1 or -1");
    return v == 1;
  }
  if (v != 0 && v != 1) throw InputError(path + ": zero-one spins must be 0 or 1");
  return v == 1;
}

void write_u32(std::ostream& os, std::uint32_t x) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(x >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 4);
}

void write_f64(std::ostream& os, double x) {
  const auto bits = std::bit_cast<std::uint64_t>(x);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t read_u32(std::istream& is) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) throw InputError("table file: truncated");
  std::uint32_t x = 0;
  for (int i = 0; i < 4; ++i) x |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return x;
}

double read_f64(std::istream& is) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) throw InputError("table file: truncated");
  std::uint64_t x = 0;
  for (int i = 0; i < 8; ++i) x |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return std::bit_cast<double>(x);
}

constexpr char kMagic[8] = {'R', 'F', 'I', 'M', 'T', 'B', 'L', '1'};

Json certificate(const std::string& formula_id, Json inputs, double value) {
  return Json{{"formula_id", formula_id}, {"inputs", std::move(inputs)}, {"value", num(value)}};
}

}  // namespace

double json_number(const Json& j, const std::string& key, const std::string& path) {
  const Json& v = member(j, key, path);
  if (!v.is_number()) throw InputError(at(path, key) + ": expected a number");
  return v.get<double>();
}

double json_number_or(const Json& j, const std::string& key, double fallback, const std::string& path) {
  if (!j.is_object()) throw InputError(path + ": expected an object");
  return j.contains(key) ? json_number(j, key, path) : fallback;
}

std::int64_t json_int(const Json& j, const std::string& key, const std::string& path) {
  const Json& v = member(j, key, path);
  if (!v.is_number_integer()) throw InputError(at(path, key) + ": expected an integer");
  return v.get<std::int64_t>();
}

std::int64_t json_int_or(const Json& j, const std::string& key, std::int64_t fallback, const std::string& path) {
  if (!j.is_object()) throw InputError(path + ": expected an object");
  return j.contains(key) ? json_int(j, key, path) : fallback;
}

std::string json_string_or(const Json& j, const std::string& key, const std::string& fallback,
                           const std::string& path) {
  if (!j.is_object()) throw InputError(path + ": expected an object");
  if (!j.contains(key)) return fallback;
  if (!j[key].is_string()) throw InputError(at(path, key) + ": expected a string");
  return j[key].get<std::string>();
}

bool json_bool_or(const Json& j, const std::string& key, bool fallback, const std::string& path) {
  if (!j.is_object()) throw InputError(path + ": expected an object");
  if (!j.contains(key)) return fallback;
  if (!j[key].is_boolean()) throw InputError(at(path, key) + ": expected a boolean");
  return j[key].get<bool>();
}

Graph parse_graph_text(const std::string& text) {
  std::istringstream in(text);
  long long n = 0, m = 0;
  if (!(in >> n >> m)) throw InputError("graph text: expected header \"n m\"");
  if (n < 0 || m < 0 || n > (1LL << 30)) throw InputError("graph text: bad header");
  std::vector<Edge> edges;
  for (long long i = 0; i < m; ++i) {
    long long u = 0, v = 0;
    if (!(in >> u >> v)) throw InputError("graph text: expected " + std::to_string(m) + " edges, got " + std::to_string(i));
    if (u < 0 || v < 0 || u >= n || v >= n) throw InputError("graph text: edge " + std::to_string(i) + " out of range");
    edges.push_back({static_cast<int>(u), static_cast<int>(v)});
  }
  return Graph::build(static_cast<int>(n), edges);
}

std::string graph_to_text(const Graph& g) {
  std::ostringstream os;
  os << g.num_vertices() << ' ' << g.num_edges() << '\n';
  for (const Edge& e : g.edges()) os << e.u << ' ' << e.v << '\n';
  return os.str();
}

Graph graph_from_json(const Json& j, const std::string& path) {
  const std::int64_t n = json_int(j, "n", path);
  if (n < 0 || n > (1LL << 30)) throw InputError(at(path, "n") + ": out of range");
  const Json& ej = member(j, "edges", path);
  if (!ej.is_array()) throw InputError(at(path, "edges") + ": expected an array");
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < ej.size(); ++i) {
    const std::string p = at(path, "edges") + "[" + std::to_string(i) + "]";
    const Json& e = ej[i];
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer()) {
      throw InputError(p + ": expected [u, v]");
    }
    const auto u = e[0].get<std::int64_t>(), v = e[1].get<std::int64_t>();
    if (u < 0 || v < 0 || u >= n || v >= n) throw InputError(p + ": endpoint out of range");
    edges.push_back({static_cast<int>(u), static_cast<int>(v)});
  }
  try {
    return Graph::build(static_cast<int>(n), edges);
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

Json graph_to_json(const Graph& g) {
  Json edges = Json::array();
  for (const Edge& e : g.edges()) edges.push_back({e.u, e.v});
  return Json{{"n", g.num_vertices()}, {"edges", std::move(edges)}};
}

Graph load_graph(const std::filesystem::path& file) {
  const std::string text = read_text_file(file);
  const auto pos = text.find_first_not_of(" \t\r\n");
  if (pos != std::string::npos && text[pos] == '{') {
    Json j;
    try {
      j = Json::parse(text);
    } catch (const Json::parse_error& e) {
      throw InputError(file.string() + ": " + e.what());
    }
    return graph_from_json(j);
  }
  return parse_graph_text(text);
}

FieldDistribution field_distribution_from_json(const Json& j, const std::string& path) {
  const std::string kind = json_string_or(j, "kind", "", path);
  FieldDistribution d;
  if (kind == "gaussian") {
    d = FieldDistribution::gaussian(json_number(j, "sigma", path));
  } else if (kind == "uniform_symmetric" || kind == "uniform") {
    d = FieldDistribution::uniform_symmetric(json_number(j, "M", path));
  } else if (kind == "two_point") {
    d = FieldDistribution::two_point(json_number(j, "a", path));
  } else if (kind == "shifted") {
    d = FieldDistribution::shifted(field_distribution_from_json(member(j, "base", path), at(path, "base")),
                                   number_array(member(j, "offsets", path), at(path, "offsets")));
  } else {
    throw InputError(at(path, "kind") + ": expected gaussian, uniform_symmetric, two_point or shifted");
  }
  return d;
}

Json to_json(const FieldDistribution& d) {
  switch (d.kind) {
    case FieldDistribution::Kind::gaussian: return Json{{"kind", "gaussian"}, {"sigma", d.param}};
    case FieldDistribution::Kind::uniform_symmetric: return Json{{"kind", "uniform_symmetric"}, {"M", d.param}};
    case FieldDistribution::Kind::two_point: return Json{{"kind", "two_point"}, {"a", d.param}};
    case FieldDistribution::Kind::shifted:
      return Json{{"kind", "shifted"}, {"base", to_json(*d.base)}, {"offsets", d.offsets}};
  }
  return Json();
}

IsingModel model_from_json(const Json& j, const std::string& path) {
  auto g = std::make_shared<const Graph>(graph_from_json(member(j, "graph", path), at(path, "graph")));
  Convention c = Convention::plus_minus;
  try {
    c = parse_convention(json_string_or(j, "convention", "pm", path));
  } catch (const InputError& e) {
    throw InputError(at(path, "convention") + ": " + e.what());
  }
  std::vector<double> field(static_cast<std::size_t>(g->num_vertices()), 0.0);
  if (j.contains("field")) field = number_array(j["field"], at(path, "field"));
  if (field.size() != static_cast<std::size_t>(g->num_vertices())) {
    throw InputError(at(path, "field") + ": length must equal n");
  }
  std::optional<IsingModel> model;
  try {
    if (j.contains("edge_couplings")) {
      const auto cp = number_array(j["edge_couplings"], at(path, "edge_couplings"));
      if (cp.size() != static_cast<std::size_t>(g->num_edges())) {
        throw InputError(at(path, "edge_couplings") + ": length must equal the number of edges");
      }
      model.emplace(g, cp, field, c);
    } else {
      model.emplace(g, json_number(j, "beta", path), field, c);
    }
  } catch (const InputError& e) {
    const std::string what = e.what();
    if (what.rfind(path, 0) == 0) throw;
    throw InputError(path + ": " + what);
  }
  if (j.contains("pinning")) {
    const Json& pj = j["pinning"];
    const std::string pp = at(path, "pinning");
    if (!pj.is_object()) throw InputError(pp + ": expected an object {\"vertex\": spin}");
    Pinning pins;
    for (const auto& [key, val] : pj.items()) {
      int v = -1;
      try {
        std::size_t used = 0;
        v = std::stoi(key, &used);
        if (used != key.size()) v = -1;
      } catch (const std::exception&) {
        v = -1;
      }
      if (!g->has_vertex(v)) throw InputError(at(pp, key) + ": not a vertex id");
      pins.push_back({v, spin_is_up(val, c, at(pp, key))});
    }
    model = model->with_pinning(pins);
  }
  return *model;
}

std::optional<SpinConfiguration> configuration_from_json(const Json& j, const IsingModel& m, const std::string& path) {
  if (!j.is_object() || !j.contains("configuration")) return std::nullopt;
  const Json& cj = j["configuration"];
  const std::string p = at(path, "configuration");
  if (!cj.is_array() || cj.size() != static_cast<std::size_t>(m.num_vertices())) {
    throw InputError(p + ": expected an array of n spins");
  }
  SpinConfiguration s(m.num_vertices(), m.convention());
  for (std::size_t i = 0; i < cj.size(); ++i)
    s.set(static_cast<int>(i), spin_is_up(cj[i], m.convention(), p + "[" + std::to_string(i) + "]"));
  return s;
}

Json configuration_to_json(const SpinConfiguration& c) { return Json(c.spins()); }

Json model_to_json(const IsingModel& m, const std::optional<SpinConfiguration>& config) {
  Json j;
  j["graph"] = graph_to_json(m.graph());
  const auto& cp = m.couplings();
  const bool uniform = std::all_of(cp.begin(), cp.end(), [&](double x) { return x == cp.front(); });
  if (uniform) {
    j["beta"] = cp.empty() ? 0.0 : cp.front();
  } else {
    j["edge_couplings"] = cp;
  }
  j["field"] = m.field();
  j["convention"] = to_string(m.convention());
  if (m.num_free() < m.num_vertices()) {
    Json pins = Json::object();
    for (const Pin& p : m.pinning()) pins[std::to_string(p.vertex)] = spin_value(p.up, m.convention());
    j["pinning"] = std::move(pins);
  }
  if (config) j["configuration"] = configuration_to_json(*config);
  return j;
}

void write_table_binary(std::ostream& os, const GibbsTable& t) {
  os.write(kMagic, sizeof kMagic);
  write_u32(os, static_cast<std::uint32_t>(t.model.num_vertices()));
  write_u32(os, static_cast<std::uint32_t>(t.free.size()));
  for (int v : t.free) write_u32(os, static_cast<std::uint32_t>(v));
  write_f64(os, t.log_partition);
  for (double p : t.probs) write_f64(os, p);
  if (!os) throw Error("table file: write failed");
}

TableFile read_table_binary(std::istream& is) {
  char magic[8];
  if (!is.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) throw InputError("table file: bad magic header");
  TableFile t;
  t.n = static_cast<int>(read_u32(is));
  const std::uint32_t f = read_u32(is);
  if (f > static_cast<std::uint32_t>(kTableCap) || static_cast<int>(f) > t.n) throw InputError("table file: bad size");
  for (std::uint32_t i = 0; i < f; ++i) {
    t.free.push_back(static_cast<int>(read_u32(is)));
    if (t.free.back() >= t.n) throw InputError("table file: vertex out of range");
  }
  t.log_partition = read_f64(is);
  t.probs.resize(std::size_t{1} << f);
  for (double& p : t.probs) p = read_f64(is);
  return t;
}

Json table_to_json(const GibbsTable& t) {
  Json rows = Json::array();
  for (std::size_t x = 0; x < t.size(); ++x) {
    rows.push_back(Json{{"index", x}, {"configuration", configuration_to_json(t.configuration(x))},
                        {"prob", t.probs[x]}, {"log_weight", t.log_weights[x]}});
  }
  return Json{{"n", t.model.num_vertices()}, {"free", t.free}, {"log_partition", t.log_partition},
              {"convention", to_string(t.model.convention())}, {"rows", std::move(rows)}};
}

Json to_json(const AssumptionParams& a) {
  return Json{{"p0", a.p0}, {"K", a.K}, {"beta", a.beta}, {"delta", a.delta}, {"rho", num(a.rho)},
              {"xi_star", num(a.xi_star)}, {"alpha_star", num(a.alpha_star)}, {"gamma_star", num(a.gamma_star)},
              {"valid", a.valid}};
}

Json to_json(const SpectralReport& r) {
  Json j{{"free", r.free}, {"gap", r.gap}, {"gap_rayleigh", r.gap_rayleigh},
         {"at_variance_constant", num(r.at_variance_constant)}, {"notes", r.notes}};
  if (r.mlsi_lower_estimate) j["mlsi_lower_estimate"] = *r.mlsi_lower_estimate;
  return j;
}

Json to_json(const Cor2SweepReport& r) {
  return Json{{"exact", r.exact},
              {"cells", r.cells},
              {"max_row_sum", r.max_row_sum},
              {"max_col_sum", r.max_col_sum},
              {"max_opnorm", r.max_opnorm},
              {"edge_row_sup", r.edge_row_sup},
              {"edge_col_sup", r.edge_col_sup},
              {"argmax_pinning", r.argmax_pinning},
              {"argmax_theta", r.argmax_theta},
              {"interpolation_violations", r.interpolation_violations}};
}

Json to_json(const PosteriorReport& r) {
  Json buckets = Json::array();
  for (const auto& b : r.buckets) {
    buckets.push_back(Json{{"revealed", b.revealed}, {"hits", b.hits}, {"tv", b.tv}, {"stat_err", b.stat_err}});
  }
  return Json{{"traces", r.traces}, {"min_hits", r.min_hits}, {"max_tv", r.max_tv}, {"buckets", std::move(buckets)}};
}

Json to_json(const ConservationCertificate& c) {
  Json inputs{{"theta", c.theta}};
  if (c.kind == ConservationCertificate::Kind::variance) {
    inputs["C"] = c.rate_c;
  } else {
    inputs["eta_op"] = c.eta_op;
    inputs["K_low"] = c.k_low;
  }
  Json j = certificate(c.formula_id, std::move(inputs), c.R);
  j["log_value"] = num(c.log_R);
  if (c.kind == ConservationCertificate::Kind::entropy) {
    j["L"] = num(c.L);
    j["ES"] = num(c.ES);
  }
  return j;
}

Json to_json(const EntropyInstantiation& e) {
  return Json{{"certificate", to_json(e.certificate)}, {"rho_from_R", num(e.rho_from_R)},
              {"log_rho_from_R", num(e.log_rho_from_R)}, {"log_closed_form_rho", num(e.log_closed_form_rho)},
              {"closed_form_R", num(e.closed_form_R)}, {"closed_form_rho", num(e.closed_form_rho)}};
}

Json to_json(const GapCertificate& c) {
  Json j = certificate("gap_lower_bound",
                       Json{{"n", c.n}, {"beta", c.beta}, {"delta", c.delta}, {"alpha_star", c.alpha_star}},
                       c.gap_lower);
  j["log_value"] = num(c.log_gap_lower);
  j["tmix_exponent"] = num(c.tmix_exponent);
  j["failure_constant"] = num(c.failure_constant);
  j["failure_probability"] = c.failure_probability_note;
  return j;
}

Json to_json(const MlsiCertificate& c) {
  Json j = certificate("mlsi_lower_bound",
                       Json{{"n", c.n}, {"beta", c.beta}, {"delta", c.delta}, {"alpha_star", c.alpha_star},
                            {"M", c.m_bound}},
                       c.rho_lower);
  j["log_value"] = num(c.log_rho_lower);
  j["marginal_constant"] = num(c.c_marginal);
  return j;
}

Json to_json(const RefinedGapTail& r) {
  Json j = certificate("refined_gap_tail", Json{{"p0", r.p0}, {"epsilon", r.epsilon}}, r.gap_lower);
  j["log_gap_inverse"] = num(r.log_gap_inverse);
  j["failure"] = num(r.failure);
  j["L_threshold"] = num(r.l_threshold);
  j["kappa0"] = num(r.kappa0);
  j["threshold_met"] = r.threshold_met;
  return j;
}

Json to_json(const ClusterTailBound& b) {
  return Json{{"xi_star", num(b.xi_star)}, {"alpha_star", num(b.alpha_star)}, {"tail_bound", num(b.tail_bound)},
              {"exp_moment_bound", num(b.exp_moment_bound)}};
}

Json to_json(const TailReport& r) {
  Json rows = Json::array();
  for (const auto& t : r.rows) {
    rows.push_back(Json{{"m", t.m}, {"bound", num(t.bound)}, {"slack", t.slack}, {"max_row_freq", t.max_row_freq},
                        {"max_col_freq", t.max_col_freq}, {"ok", t.ok}});
  }
  return Json{{"params", to_json(r.params)}, {"exact", r.exact}, {"trials", r.trials}, {"rows", std::move(rows)},
              {"ok", r.ok}};
}

Json to_json(const NormCheck& c) {
  Json j = certificate("interpolation_norm", Json{{"rowsum_max", c.rowsum_max}, {"colsum_max", c.colsum_max}},
                       c.bound);
  j["opnorm"] = c.opnorm;
  j["ok"] = c.ok;
  return j;
}

Json to_json(const WsmReport& r) {
  Json j{{"radii", r.radii}, {"minimal_C", r.minimal_c}};
  j["fitted_C"] = r.fitted_c ? num(*r.fitted_c) : Json(nullptr);
  Json sat = Json::array();
  for (const auto& [c, ok] : r.satisfied) sat.push_back(Json{{"C", c}, {"satisfied", ok}});
  j["satisfied"] = std::move(sat);
  Json means = Json::array();
  for (std::size_t k = 0; k < r.radii.size(); ++k) {
    double m = 0.0;
    for (const auto& row : r.trial_radius_means) m += row[k];
    means.push_back(r.trial_radius_means.empty() ? 0.0 : m / static_cast<double>(r.trial_radius_means.size()));
  }
  j["mean_delta_by_radius"] = std::move(means);
  j["field_trials"] = r.trial_radius_means.size();
  return j;
}

Json to_json(const SeparationPlan& p) {
  Json r = Json::array(), ell = Json::array();
  for (double x : p.r) r.push_back(num(x));
  for (double x : p.ell) ell.push_back(num(x));
  Json buckets = Json::object();
  for (const auto& [k, members] : p.q_buckets) buckets[std::to_string(k)] = members;
  return Json{{"points", p.points}, {"r", std::move(r)}, {"j", p.j}, {"q_buckets", std::move(buckets)},
              {"k_star", p.k_star}, {"a_set", p.a_set}, {"ell", std::move(ell)}, {"ell_floor", p.ell_floor},
              {"separation_ok", p.separation_ok}};
}

Json to_json(const TraceMomentReport& r) {
  Json pts = Json::array();
  for (const auto& q : r.points) pts.push_back(Json{{"t", q.t}, {"mean", q.mean}, {"stderr", q.std_err}});
  return Json{{"p", r.p}, {"points", std::move(pts)}, {"sup", r.sup}, {"fitted_C0", r.fitted_c0}};
}

Json to_json(const WeakPoincareVerdict& v) {
  return Json{{"lhs", v.lhs}, {"mean_var_T", v.mean_var_t}, {"rhs", num(v.rhs)}, {"p", num(v.p)},
              {"inv_q", v.inv_q}, {"satisfied", v.satisfied}};
}

Json to_json(const RunReport& r) {
  Json j{{"stage_steps", r.stage_steps}, {"total_updates", r.total_updates}, {"k_star", r.k_star},
         {"wall_seconds", r.wall_seconds}, {"ordering", r.ordering},
         {"final_configuration", configuration_to_json(r.final_config)}};
  if (r.tv) j["tv"] = *r.tv;
  return j;
}

Json to_json(const ValidationResult& v) {
  return Json{{"tv", v.tv}, {"stat_err", v.stat_err}, {"replicas", v.replicas}, {"k_star", v.k_star}};
}

Json to_json(const Calibration& c) {
  Json tried = Json::array();
  for (const auto& [k, tv] : c.tried) tried.push_back(Json{{"k_star", k}, {"tv", tv}});
  return Json{{"c_star", c.c_star}, {"k_star", c.k_star}, {"epsilon", c.epsilon}, {"reached", c.reached},
              {"tried", std::move(tried)}};
}

Json to_json(const WarmStartBound& b) {
  return Json{{"formula_id", "warm_start_tv_bound"}, {"value", num(b.value)}, {"warnings", b.warnings}};
}

std::string wsm_csv(const WsmReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << "vertex,radius,mean_delta,stderr\n";
  for (const auto& e : r.entries) os << e.vertex << ',' << e.radius << ',' << e.mean << ',' << e.std_err << '\n';
  return os.str();
}

std::string read_text_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw InputError("cannot open " + file.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::filesystem::path& file, const std::string& text) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error("cannot write " + file.string());
  out << text;
  if (!out) throw Error("write failed: " + file.string());
}

Json read_json_file(const std::filesystem::path& file) {
  const std::string text = read_text_file(file);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InputError(file.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& file, const Json& j) { write_text_file(file, j.dump(2) + "\n"); }

}  // namespace rfim
