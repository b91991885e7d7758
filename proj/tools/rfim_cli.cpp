// Command-line front end: rfim <group> <command> [options].
//
// Exit codes: 0 success, 2 validation failure, 3 capacity, 4 input error,
// 1 other errors.

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rfim/error.hpp"
#include "rfim/experiment.hpp"
#include "rfim/glauber.hpp"
#include "rfim/io.hpp"
#include "rfim/localization.hpp"
#include "rfim/oracle.hpp"
#include "rfim/percolation.hpp"
#include "rfim/sampler.hpp"
#include "rfim/sl_wsm.hpp"

using namespace rfim;

namespace {

struct Output {
  std::string path;

  void json(const Json& j) const {
    if (path.empty() || path == "-") {
      std::cout << j.dump(2) << '\n';
    } else {
      write_json_file(path, j);
    }
  }
  void text(const std::string& s) const {
    if (path.empty() || path == "-") {
      std::cout << s;
    } else {
      write_text_file(path, s);
    }
  }
};

struct FieldOpts {
  std::string kind = "two_point";
  double param = 5.0;

  void add(CLI::App* app) {
    app->add_option("--field-kind", kind, "gaussian, uniform_symmetric or two_point")->capture_default_str();
    app->add_option("--field-param", param, "sigma, M or a")->capture_default_str();
  }
  FieldDistribution get() const {
    if (kind == "gaussian") return FieldDistribution::gaussian(param);
    if (kind == "uniform_symmetric" || kind == "uniform") return FieldDistribution::uniform_symmetric(param);
    if (kind == "two_point") return FieldDistribution::two_point(param);
    throw InputError("--field-kind: unknown kind \"" + kind + "\"");
  }
};

struct GraphOpts {
  std::string kind = "path";
  int n = 8;
  int rows = 3;
  int cols = 3;
  int degree = 3;
  int depth = 2;
  std::uint64_t seed = 1;

  void add(CLI::App* app) {
    app->add_option("--kind", kind, "path, cycle, complete, grid, torus, tree, random_regular")->capture_default_str();
    app->add_option("--n", n, "vertex count")->capture_default_str();
    app->add_option("--rows", rows)->capture_default_str();
    app->add_option("--cols", cols)->capture_default_str();
    app->add_option("--degree", degree)->capture_default_str();
    app->add_option("--depth", depth)->capture_default_str();
    app->add_option("--graph-seed", seed)->capture_default_str();
  }
  Graph get() const {
    return graph_from_spec(Json{{"gen", kind}, {"n", n}, {"rows", rows}, {"cols", cols}, {"degree", degree},
                                {"depth", depth}, {"seed", seed}});
  }
};

/// A graph file if given, else a generated graph.
struct GraphSource {
  std::string file;
  GraphOpts gen;

  void add(CLI::App* app) {
    app->add_option("--graph", file, "graph file (edge list or JSON)");
    gen.add(app);
  }
  std::shared_ptr<const Graph> get() const {
    return std::make_shared<const Graph>(file.empty() ? gen.get() : load_graph(file));
  }
};

IsingModel load_model(const std::string& file) { return model_from_json(read_json_file(file)); }

std::vector<int> parse_int_list(const std::string& s, const char* what) {
  std::vector<int> out;
  if (s.empty()) return out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw InputError(std::string(what) + ": bad integer \"" + tok + "\"");
    }
  }
  return out;
}

SpinConfiguration initial_state(const IsingModel& m, const std::string& init) {
  if (init == "up") return m.constant_configuration(true);
  if (init == "down") return m.constant_configuration(false);
  throw InputError("--init must be up or down");
}

int run(int argc, char** argv) {
  CLI::App app{"Random-field Ising model toolkit"};
  app.require_subcommand(1);
  Output out;
  auto add_out = [&](CLI::App* c) { c->add_option("--out,-o", out.path, "output file (default stdout)"); };

  // graph
  auto* graph = app.add_subcommand("graph", "graph generation and inspection")->require_subcommand(1);
  GraphOpts g_gen;
  std::string g_format = "json";
  auto* graph_gen = graph->add_subcommand("gen", "generate a graph");
  g_gen.add(graph_gen);
  graph_gen->add_option("--format", g_format, "json or text")->capture_default_str();
  add_out(graph_gen);
  graph_gen->callback([&] {
    const Graph g = g_gen.get();
    if (g_format == "text") out.text(graph_to_text(g));
    else if (g_format == "json") out.json(graph_to_json(g));
    else throw InputError("--format must be json or text");
  });
  GraphSource g_info_src;
  double g_alpha = 0.5, g_calpha = 1.0;
  auto* graph_info = graph->add_subcommand("info", "size, degree, components and growth");
  g_info_src.add(graph_info);
  graph_info->add_option("--alpha", g_alpha)->capture_default_str();
  graph_info->add_option("--c-alpha", g_calpha)->capture_default_str();
  add_out(graph_info);
  graph_info->callback([&] {
    const auto g = g_info_src.get();
    const GrowthProfile gp = growth_profile(*g, g_alpha, g_calpha);
    out.json(Json{{"n", g->num_vertices()}, {"m", g->num_edges()}, {"max_degree", g->max_degree()},
                  {"components", connected_components(*g).size()}, {"connected", is_connected(*g)},
                  {"growth_satisfied", gp.satisfied}});
  });

  // model
  auto* model = app.add_subcommand("model", "model construction")->require_subcommand(1);
  GraphSource m_src;
  FieldOpts m_field;
  double m_beta = 0.3;
  std::uint64_t m_seed = 1;
  std::string m_conv = "pm";
  std::vector<std::string> m_pins;
  auto* model_make = model->add_subcommand("make", "graph + quenched field -> model JSON");
  m_src.add(model_make);
  m_field.add(model_make);
  model_make->add_option("--beta", m_beta)->capture_default_str();
  model_make->add_option("--seed", m_seed, "field seed")->capture_default_str();
  model_make->add_option("--convention", m_conv, "pm or 01")->capture_default_str();
  model_make->add_option("--pin", m_pins, "vertex:spin, spin in the chosen convention");
  add_out(model_make);
  model_make->callback([&] {
    const auto g = m_src.get();
    IsingModel mm(g, m_beta, sample_field(m_field.get(), g->num_vertices(), m_seed).values);
    if (m_conv == "01") mm = to_zero_one(mm);
    else if (m_conv != "pm") throw InputError("--convention must be pm or 01");
    Json j = model_to_json(mm);
    if (!m_pins.empty()) {
      Json pins = Json::object();
      for (const auto& p : m_pins) {
        const auto colon = p.find(':');
        if (colon == std::string::npos) throw InputError("--pin expects vertex:spin, got " + p);
        pins[p.substr(0, colon)] = std::stoi(p.substr(colon + 1));
      }
      j["pinning"] = pins;
      mm = model_from_json(j);
      j = model_to_json(mm);
    }
    out.json(j);
  });
  std::string t_model;
  double t_theta = -1.0;
  std::string t_revealed;
  auto* model_tilt = model->add_subcommand("tilt", "edge-field tilt (1-theta) with revealed edges pinned");
  model_tilt->add_option("--model", t_model)->required();
  model_tilt->add_option("--theta", t_theta, "tilt; default theta*");
  model_tilt->add_option("--revealed", t_revealed, "comma separated edge ids");
  add_out(model_tilt);
  model_tilt->callback([&] {
    IsingModel mm = load_model(t_model);
    if (mm.convention() == Convention::plus_minus) mm = to_zero_one(mm);
    const double th = t_theta < 0 ? theta_star(to_plus_minus(mm).beta_max()) : t_theta;
    out.json(model_to_json(posterior_model(mm, th, parse_int_list(t_revealed, "--revealed"))));
  });
  double a_p0 = 0.05, a_K = 4.0, a_beta = 0.3;
  int a_delta = 3;
  FieldOpts a_field;
  auto* model_assume = model->add_subcommand("assume", "percolation assumption parameters and field check");
  model_assume->add_option("--p0", a_p0)->capture_default_str();
  model_assume->add_option("--K", a_K)->capture_default_str();
  model_assume->add_option("--beta", a_beta)->capture_default_str();
  model_assume->add_option("--delta", a_delta)->capture_default_str();
  a_field.add(model_assume);
  add_out(model_assume);
  model_assume->callback([&] {
    const AssumptionParams a = assumption_params(a_p0, a_K, a_beta, a_delta);
    Json j = to_json(a);
    const FieldAssumptionCheck fc = check_field_assumption(a_field.get(), a_p0, a_K);
    j["field"] = to_json(a_field.get());
    j["field_mass_below_K"] = fc.mass;
    j["field_assumption_holds"] = fc.holds;
    out.json(j);
  });

  // oracle
  auto* oracle = app.add_subcommand("oracle", "exact enumeration")->require_subcommand(1);
  std::string o_model, o_binary;
  auto* oracle_table = oracle->add_subcommand("table", "Gibbs table");
  oracle_table->add_option("--model", o_model)->required();
  oracle_table->add_option("--binary", o_binary, "also write the little-endian binary table here");
  add_out(oracle_table);
  oracle_table->callback([&] {
    const GibbsTable t = gibbs_table(load_model(o_model));
    if (!o_binary.empty()) {
      std::ofstream os(o_binary, std::ios::binary);
      if (!os) throw Error("cannot write " + o_binary);
      write_table_binary(os, t);
    }
    out.json(table_to_json(t));
  });
  int o_mlsi = 0;
  std::uint64_t o_seed = 1;
  auto* oracle_gap = oracle->add_subcommand("gap", "spectral gap by two routes");
  oracle_gap->add_option("--model", o_model)->required();
  oracle_gap->add_option("--mlsi-restarts", o_mlsi, "also run the MLSI probe")->capture_default_str();
  oracle_gap->add_option("--seed", o_seed)->capture_default_str();
  add_out(oracle_gap);
  oracle_gap->callback([&] {
    const IsingModel mm = load_model(o_model);
    SpectralReport r = glauber_gap(mm);
    if (o_mlsi > 0) r.mlsi_lower_estimate = mlsi_lower_estimate(mm, o_mlsi, o_seed).ratio;
    out.json(to_json(r));
  });
  double o_theta = 0.0;
  auto* oracle_cor2 = oracle->add_subcommand("cor2", "second-order correlation matrix of the tilted model");
  oracle_cor2->add_option("--model", o_model)->required();
  oracle_cor2->add_option("--theta", o_theta)->capture_default_str();
  add_out(oracle_cor2);
  oracle_cor2->callback([&] {
    IsingModel mm = load_model(o_model);
    if (mm.convention() == Convention::plus_minus) mm = to_zero_one(mm);
    const Eigen::MatrixXd c = cor2_matrix(gibbs_table(edge_tilt(mm, o_theta, mm.pinning())));
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
      Json row = Json::array();
      for (Eigen::Index k = 0; k < c.cols(); ++k) row.push_back(c(i, k));
      rows.push_back(row);
    }
    out.json(Json{{"theta", o_theta}, {"matrix", rows}, {"norm", to_json(norm_interpolation_check(c))}});
  });
  std::vector<double> o_grid{0.0, 0.5};
  int o_samples = 0;
  auto* oracle_sweep = oracle->add_subcommand("sweep", "sup of Cor2 norms over pinnings and theta");
  oracle_sweep->add_option("--model", o_model)->required();
  oracle_sweep->add_option("--theta-grid", o_grid)->delimiter(',')->capture_default_str();
  oracle_sweep->add_option("--samples", o_samples, "random pinnings instead of all (0 = exhaustive)");
  oracle_sweep->add_option("--seed", o_seed)->capture_default_str();
  add_out(oracle_sweep);
  oracle_sweep->callback([&] {
    IsingModel mm = load_model(o_model);
    if (mm.convention() == Convention::plus_minus) mm = to_zero_one(mm);
    out.json(to_json(sup_cor2_over_pinnings(mm, o_grid, Exec::parallel,
                                            o_samples > 0 ? std::optional<int>(o_samples) : std::nullopt, o_seed)));
  });

  // mix
  auto* mix = app.add_subcommand("mix", "Glauber dynamics")->require_subcommand(1);
  std::string x_model, x_init = "down", x_final;
  std::uint64_t x_steps = 1000, x_seed = 1, x_thin = 1, x_replicas = 10000;
  auto* mix_run = mix->add_subcommand("run", "single chain; trajectory CSV (step, magnetization, energy)");
  mix_run->add_option("--model", x_model)->required();
  mix_run->add_option("--steps", x_steps)->capture_default_str();
  mix_run->add_option("--seed", x_seed)->capture_default_str();
  mix_run->add_option("--thin", x_thin)->capture_default_str();
  mix_run->add_option("--init", x_init, "up or down")->capture_default_str();
  mix_run->add_option("--final-state", x_final, "write the final state as model JSON");
  add_out(mix_run);
  mix_run->callback([&] {
    const IsingModel mm = load_model(x_model);
    const ChainRun r = run_chain(mm, initial_state(mm, x_init), x_steps, x_seed, x_thin);
    if (!x_final.empty()) write_json_file(x_final, model_to_json(mm, r.final_state.config));
    out.text(trajectory_csv(r.trajectory));
  });
  auto* mix_couple = mix->add_subcommand("couple", "monotone coupling from all-down and all-up");
  mix_couple->add_option("--model", x_model)->required();
  mix_couple->add_option("--steps", x_steps)->capture_default_str();
  mix_couple->add_option("--seed", x_seed)->capture_default_str();
  add_out(mix_couple);
  mix_couple->callback([&] {
    const IsingModel mm = load_model(x_model);
    const CouplingTrace t = monotone_coupled_run(mm, mm.constant_configuration(false), mm.constant_configuration(true),
                                                 x_steps, x_seed, true);
    Json j{{"steps", t.steps}, {"order_violations", t.order_violations}, {"disagreement", t.disagreement_set}};
    j["coalescence_step"] = t.coalescence_step ? Json(*t.coalescence_step) : Json(nullptr);
    out.json(j);
  });
  std::vector<std::uint64_t> x_grid{0, 10, 100, 1000};
  auto* mix_tv = mix->add_subcommand("tvcurve", "empirical TV to the exact law along a step grid");
  mix_tv->add_option("--model", x_model)->required();
  mix_tv->add_option("--steps", x_grid)->delimiter(',')->capture_default_str();
  mix_tv->add_option("--replicas", x_replicas)->capture_default_str();
  mix_tv->add_option("--seed", x_seed)->capture_default_str();
  mix_tv->add_option("--init", x_init)->capture_default_str();
  add_out(mix_tv);
  mix_tv->callback([&] {
    const IsingModel mm = load_model(x_model);
    std::ostringstream csv;
    csv << "step,tv,stat_err\n";
    for (const auto& p : empirical_tv_curve(mm, initial_state(mm, x_init), x_grid, x_replicas, x_seed))
      csv << p.step << ',' << p.tv << ',' << p.stat_err << '\n';
    out.text(csv.str());
  });

  // localize
  auto* loc = app.add_subcommand("localize", "edge-field localization")->require_subcommand(1);
  std::string l_model, l_revealed;
  double l_t = 0.5;
  std::uint64_t l_seed = 1, l_traces = 100000, l_min_hits = 500;
  auto as01 = [](IsingModel mm) { return mm.convention() == Convention::plus_minus ? to_zero_one(mm) : mm; };
  auto* loc_trace = loc->add_subcommand("trace", "one noising trace");
  loc_trace->add_option("--model", l_model)->required();
  loc_trace->add_option("--t", l_t)->capture_default_str();
  loc_trace->add_option("--seed", l_seed)->capture_default_str();
  add_out(loc_trace);
  loc_trace->callback([&] {
    const IsingModel mm = as01(load_model(l_model));
    const DenoisingTrace tr = sample_noising_trace(mm, TraceSampler{}, l_seed);
    out.json(Json{{"x", configuration_to_json(tr.x_sample)}, {"edge_uniforms", tr.edge_uniforms}, {"t", l_t},
                  {"revealed", tr.revealed(l_t)}});
  });
  auto* loc_post = loc->add_subcommand("posterior", "posterior table for a revealed set, checked against Bayes");
  loc_post->add_option("--model", l_model)->required();
  loc_post->add_option("--t", l_t)->capture_default_str();
  loc_post->add_option("--revealed", l_revealed, "comma separated edge ids");
  add_out(loc_post);
  loc_post->callback([&] {
    const IsingModel mm = as01(load_model(l_model));
    const auto s = parse_int_list(l_revealed, "--revealed");
    const GibbsTable t = gibbs_table(posterior_model(mm, l_t, s));
    const auto bayes = bayes_posterior(mm, l_t, s);
    Json j = table_to_json(t);
    if (bayes) {
      double d = 0.0;
      for (std::size_t x = 0; x < t.size(); ++x) d = std::max(d, std::abs((*bayes)[x] - t.probs[x]));
      j["bayes_max_abs_diff"] = d;
    } else {
      j["bayes_max_abs_diff"] = nullptr;
      j["note"] = "revealed set has probability zero";
    }
    out.json(j);
  });
  auto* loc_verify = loc->add_subcommand("verify", "Monte Carlo posterior check by revealed-set buckets");
  loc_verify->add_option("--model", l_model)->required();
  loc_verify->add_option("--t", l_t)->capture_default_str();
  loc_verify->add_option("--traces", l_traces)->capture_default_str();
  loc_verify->add_option("--min-hits", l_min_hits)->capture_default_str();
  loc_verify->add_option("--seed", l_seed)->capture_default_str();
  add_out(loc_verify);
  loc_verify->callback([&] {
    out.json(to_json(verify_posterior_by_simulation(as01(load_model(l_model)), l_t, l_traces, l_seed, l_min_hits)));
  });
  std::string c_kind = "variance";
  double c_theta = 0.5, c_rate = 1.0, c_eta = 2.0, c_klow = 1.0, c_beta = 0.3, c_M = 1.0, c_alpha = 0.8;
  int c_n = 10, c_delta = 3;
  auto* loc_cert = loc->add_subcommand("certificate", "conservation constant R");
  loc_cert->add_option("--kind", c_kind, "variance, entropy or instance")->capture_default_str();
  loc_cert->add_option("--theta", c_theta)->capture_default_str();
  loc_cert->add_option("--C", c_rate)->capture_default_str();
  loc_cert->add_option("--eta", c_eta)->capture_default_str();
  loc_cert->add_option("--k-low", c_klow)->capture_default_str();
  loc_cert->add_option("--n", c_n)->capture_default_str();
  loc_cert->add_option("--beta", c_beta)->capture_default_str();
  loc_cert->add_option("--delta", c_delta)->capture_default_str();
  loc_cert->add_option("--M", c_M)->capture_default_str();
  loc_cert->add_option("--alpha-star", c_alpha)->capture_default_str();
  add_out(loc_cert);
  loc_cert->callback([&] {
    if (c_kind == "variance") out.json(to_json(variance_conservation_R(c_rate, c_theta)));
    else if (c_kind == "entropy") out.json(to_json(entropy_conservation_R(c_eta, c_klow, c_theta)));
    else if (c_kind == "instance") out.json(to_json(entropy_conservation_instance(c_n, c_beta, c_delta, c_M, c_alpha)));
    else throw InputError("--kind must be variance, entropy or instance");
  });

  // certify
  auto* cert = app.add_subcommand("certify", "percolation certificates")->require_subcommand(1);
  int k_n = 10, k_delta = 3;
  double k_beta = 0.3, k_p0 = 0.05, k_K = 4.0, k_M = 1.0, k_L = -1.0;
  auto add_common = [&](CLI::App* c, bool with_n = true) {
    if (with_n) c->add_option("--n", k_n)->capture_default_str();
    c->add_option("--beta", k_beta)->capture_default_str();
    c->add_option("--delta", k_delta)->capture_default_str();
    c->add_option("--p0", k_p0)->capture_default_str();
    c->add_option("--K", k_K)->capture_default_str();
    add_out(c);
  };
  auto* cert_gap = cert->add_subcommand("gap", "spectral gap lower bound");
  add_common(cert_gap);
  cert_gap->add_option("--L", k_L, "also report the refined tail at this L");
  cert_gap->callback([&] {
    const AssumptionParams a = assumption_params(k_p0, k_K, k_beta, k_delta);
    Json j{{"assumption", to_json(a)}, {"certificate", to_json(gap_certificate(k_n, k_beta, k_delta, a.alpha_star))}};
    if (k_L >= 0) j["refined"] = to_json(refined_gap_tail(k_n, k_beta, k_delta, a.alpha_star, k_L));
    out.json(j);
  });
  auto* cert_mlsi = cert->add_subcommand("mlsi", "MLSI lower bound");
  add_common(cert_mlsi);
  cert_mlsi->add_option("--M", k_M, "field bound")->capture_default_str();
  cert_mlsi->callback([&] {
    const AssumptionParams a = assumption_params(k_p0, k_K, k_beta, k_delta);
    out.json(Json{{"assumption", to_json(a)},
                  {"certificate", to_json(mlsi_certificate(k_n, k_beta, k_delta, a.alpha_star, k_M))}});
  });
  GraphSource k_src;
  FieldOpts k_field;
  std::vector<double> k_theta{0.0, 0.5}, k_m{0.25, 0.5, 1.0, 2.0};
  std::uint64_t k_trials = 1000, k_seed = 1;
  auto* cert_tails = cert->add_subcommand("tails", "row/column-sum exceedance frequencies against the bound");
  k_src.add(cert_tails);
  k_field.add(cert_tails);
  add_common(cert_tails, false);
  cert_tails->add_option("--theta-grid", k_theta)->delimiter(',')->capture_default_str();
  cert_tails->add_option("--m-grid", k_m)->delimiter(',')->capture_default_str();
  cert_tails->add_option("--trials", k_trials)->capture_default_str();
  cert_tails->add_option("--seed", k_seed)->capture_default_str();
  cert_tails->callback([&] {
    TailConfig cfg;
    cfg.beta = k_beta;
    cfg.field = k_field.get();
    cfg.K = k_K;
    cfg.p0 = k_p0;
    cfg.delta = k_delta;
    cfg.theta_grid = k_theta;
    cfg.m_grid = k_m;
    cfg.trials = k_trials;
    cfg.seed = k_seed;
    const TailReport r = row_sum_tail_report(k_src.get(), cfg);
    out.json(to_json(r));
    if (!r.ok) throw ValidationError("tail frequencies exceed the bound");
  });
  std::string k_matrix;
  auto* cert_norm = cert->add_subcommand("norm", "operator norm against sqrt(rowmax * colmax)");
  cert_norm->add_option("--matrix", k_matrix, "JSON file holding an array of rows")->required();
  add_out(cert_norm);
  cert_norm->callback([&] {
    const Json j = read_json_file(k_matrix);
    if (!j.is_array() || j.empty() || !j[0].is_array()) throw InputError("$: expected an array of rows");
    Eigen::MatrixXd a(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(j[0].size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (!j[i].is_array() || j[i].size() != j[0].size()) throw InputError("$[" + std::to_string(i) + "]: ragged row");
      for (std::size_t k = 0; k < j[i].size(); ++k) a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = j[i][k].get<double>();
    }
    const NormCheck c = norm_interpolation_check(a);
    out.json(to_json(c));
    if (!c.ok) throw ValidationError("interpolation inequality violated");
  });
  auto* cert_perc = cert->add_subcommand("percolate", "one field-driven percolation realization");
  k_src.add(cert_perc);
  k_field.add(cert_perc);
  add_common(cert_perc, false);
  cert_perc->add_option("--seed", k_seed)->capture_default_str();
  cert_perc->callback([&] {
    const auto g = k_src.get();
    const auto h = sample_field(k_field.get(), g->num_vertices(), derive_seed(k_seed, 1)).values;
    const PercolationRealization r = percolate(g, h, k_K, k_p0, k_seed);
    Json clusters = Json::array();
    for (const Edge& e : g->edges()) clusters.push_back(Json{{"edge", {e.u, e.v}}, {"cluster_size", cluster_of_edge(r, e).size()}});
    out.json(Json{{"open", r.open_set()}, {"edge_clusters", clusters}, {"field", h}});
  });

  // sl
  auto* sl = app.add_subcommand("sl", "stochastic localization and spatial mixing")->require_subcommand(1);
  std::string s_model, s_csv;
  double s_t = 1.0;
  std::uint64_t s_seed = 1, s_steps = 0;
  auto* sl_boost_cmd = sl->add_subcommand("boost", "boosted model h + y_t");
  sl_boost_cmd->add_option("--model", s_model)->required();
  sl_boost_cmd->add_option("--t", s_t)->capture_default_str();
  sl_boost_cmd->add_option("--seed", s_seed)->capture_default_str();
  sl_boost_cmd->add_option("--glauber-steps", s_steps, "draw sigma* by Glauber instead of the oracle");
  add_out(sl_boost_cmd);
  sl_boost_cmd->callback([&] {
    const IsingModel mm = load_model(s_model);
    SlSampler smp;
    if (s_steps > 0) smp = SlSampler{SlSampler::Kind::glauber, s_steps};
    const SlRealization r = sl_boost(mm, s_t, smp, s_seed);
    Json j = model_to_json(r.boosted_model);
    j["sl"] = Json{{"t", r.t}, {"sigma_star", configuration_to_json(r.sigma_star)}, {"y", r.y}};
    out.json(j);
  });
  GraphSource s_src;
  FieldOpts s_field;
  WsmConfig s_wsm;
  std::string s_radii = "1,2,3,4", s_vertices;
  auto* sl_wsm = sl->add_subcommand("wsm", "weak spatial mixing estimate; JSON summary, optional CSV");
  s_src.add(sl_wsm);
  s_field.add(sl_wsm);
  sl_wsm->add_option("--beta", s_wsm.beta)->capture_default_str();
  sl_wsm->add_option("--radii", s_radii)->capture_default_str();
  sl_wsm->add_option("--vertices", s_vertices, "comma separated; default all");
  sl_wsm->add_option("--trials", s_wsm.field_trials)->capture_default_str();
  sl_wsm->add_option("--seed", s_wsm.seed)->capture_default_str();
  sl_wsm->add_option("--sl-time", s_wsm.sl_time)->capture_default_str();
  sl_wsm->add_option("--c-grid", s_wsm.c_grid)->delimiter(',');
  sl_wsm->add_option("--csv", s_csv, "write per-vertex rows here");
  add_out(sl_wsm);
  sl_wsm->callback([&] {
    s_wsm.field = s_field.get();
    s_wsm.radii = parse_int_list(s_radii, "--radii");
    s_wsm.vertices = parse_int_list(s_vertices, "--vertices");
    const WsmReport r = estimate_wsm(s_src.get(), s_wsm);
    if (!s_csv.empty()) write_text_file(s_csv, wsm_csv(r));
    out.json(to_json(r));
  });
  GraphSource p_src;
  std::string p_points;
  auto* sl_plan = sl->add_subcommand("plan", "separation plan for a point tuple");
  p_src.add(sl_plan);
  sl_plan->add_option("--points", p_points, "comma separated vertices")->required();
  add_out(sl_plan);
  sl_plan->callback([&] { out.json(to_json(build_separation_plan(*p_src.get(), parse_int_list(p_points, "--points")))); });
  int s_p = 1;
  std::vector<double> s_tgrid{0.0, 0.5, 2.0, 10.0};
  std::uint64_t s_real = 1000;
  auto* sl_probe = sl->add_subcommand("probe", "trace moments E Tr Cov^p along the SL path");
  sl_probe->add_option("--model", s_model)->required();
  sl_probe->add_option("--p", s_p)->capture_default_str();
  sl_probe->add_option("--t-grid", s_tgrid)->delimiter(',')->capture_default_str();
  sl_probe->add_option("--realizations", s_real)->capture_default_str();
  sl_probe->add_option("--seed", s_seed)->capture_default_str();
  add_out(sl_probe);
  sl_probe->callback([&] { out.json(to_json(trace_moment_probe(load_model(s_model), s_p, s_tgrid, s_real, s_seed))); });

  // sample
  auto* sample = app.add_subcommand("sample", "incremental warm-start sampler")->require_subcommand(1);
  std::string z_model, z_dir = "sample_out";
  SamplerConfig z_cfg;
  std::uint64_t z_validate = 0;
  double z_eps = 0.05;
  auto* sample_inc = sample->add_subcommand("incremental", "run the incremental sampler");
  sample_inc->add_option("--model", z_model)->required();
  sample_inc->add_option("--cstar", z_cfg.c_star)->capture_default_str();
  sample_inc->add_option("--seed", z_cfg.seed)->capture_default_str();
  sample_inc->add_option("--ordering-seed", z_cfg.ordering_seed)->capture_default_str();
  sample_inc->add_flag("--prefix-kstar", z_cfg.prefix_kstar, "k* from the prefix size");
  auto* vflag = sample_inc->add_option("--validate", z_validate, "replicas for a TV check against the oracle");
  vflag->expected(0, 1)->default_str("100000");
  sample_inc->add_option("--epsilon", z_eps, "TV target for --validate")->capture_default_str();
  sample_inc->add_option("--out-dir", z_dir)->capture_default_str();
  sample_inc->callback([&] {
    const IsingModel mm = load_model(z_model);
    auto [config, report] = incremental_sample(mm, z_cfg);
    std::optional<ValidationResult> v;
    if (vflag->count() > 0) {
      v = validate_incremental(mm, z_cfg, z_validate > 0 ? z_validate : 100000);
      report.tv = v->tv;
    }
    write_json_file(std::filesystem::path(z_dir) / "final_state.json", model_to_json(mm, config));
    std::ostringstream csv;
    csv << "stage,vertex,steps\n";
    for (std::size_t i = 0; i < report.stage_steps.size(); ++i)
      csv << i << ',' << report.ordering[i] << ',' << report.stage_steps[i] << '\n';
    write_text_file(std::filesystem::path(z_dir) / "report.csv", csv.str());
    Json man{{"version", library_version()}, {"seed", z_cfg.seed}, {"ordering_seed", z_cfg.ordering_seed},
             {"c_star", z_cfg.c_star}, {"model", z_model}, {"report", to_json(report)}};
    if (v) {
      man["validation"] = to_json(*v);
      man["validation"]["epsilon"] = z_eps;
    }
    write_json_file(std::filesystem::path(z_dir) / "manifest.json", man);
    std::cout << man.dump(2) << '\n';
    if (v && v->tv > z_eps) throw ValidationError("TV to the oracle exceeds epsilon");
  });
  double w_M = 1.0, w_A = 2.0, w_p = 1.0;
  std::uint64_t w_k = 1000;
  auto* sample_warm = sample->add_subcommand("warmstart", "warm-start TV bound");
  sample_warm->add_option("--M", w_M)->capture_default_str();
  sample_warm->add_option("--A", w_A)->capture_default_str();
  sample_warm->add_option("--p", w_p)->capture_default_str();
  sample_warm->add_option("--k", w_k)->capture_default_str();
  add_out(sample_warm);
  sample_warm->callback([&] { out.json(to_json(warm_start_tv_bound(w_M, w_A, w_p, w_k))); });

  // experiment
  auto* exp = app.add_subcommand("experiment", "config-driven pipelines")->require_subcommand(1);
  std::string e_config, e_dir = "experiment_out";
  auto* exp_run = exp->add_subcommand("run", "run a pipeline config");
  exp_run->add_option("--config", e_config)->required();
  exp_run->add_option("--out-dir", e_dir)->capture_default_str();
  exp_run->callback([&] {
    const ExperimentResult r = run_experiment(read_json_file(e_config), e_dir);
    std::cout << r.manifest.dump(2) << '\n';
    if (!r.all_passed) throw ValidationError("a pipeline step failed its check");
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 4;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ValidationError& e) {
    std::cerr << "validation failure: " << e.what() << '\n';
    return 2;
  } catch (const CapacityError& e) {
    std::cerr << "capacity: " << e.what() << '\n';
    return 3;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 4;
  } catch (const Json::exception& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
