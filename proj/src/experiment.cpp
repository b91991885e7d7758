#include "rfim/experiment.hpp"

#include <chrono>
#include <ctime>
#include <sstream>

#include "rfim/error.hpp"
#include "rfim/oracle.hpp"
#include "rfim/percolation.hpp"
#include "rfim/sampler.hpp"
#include "rfim/sl_wsm.hpp"

namespace rfim {

namespace {

std::string at(const std::string& path, const std::string& key) { return path + "." + key; }

int checked_int(const Json& j, const std::string& key, std::int64_t fallback, std::int64_t lo, std::int64_t hi,
                const std::string& path) {
  const std::int64_t v = json_int_or(j, key, fallback, path);
  if (v < lo || v > hi) {
    throw InputError(at(path, key) + ": must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return static_cast<int>(v);
}

std::vector<double> numbers_or(const Json& j, const std::string& key, std::vector<double> fallback,
                               const std::string& path) {
  if (!j.contains(key)) return fallback;
  const Json& a = j[key];
  if (!a.is_array()) throw InputError(at(path, key) + ": expected an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].is_number()) throw InputError(at(path, key) + "[" + std::to_string(i) + "]: expected a number");
    out.push_back(a[i].get<double>());
  }
  return out;
}

std::vector<int> ints_or(const Json& j, const std::string& key, std::vector<int> fallback, const std::string& path) {
  if (!j.contains(key)) return fallback;
  const Json& a = j[key];
  if (!a.is_array()) throw InputError(at(path, key) + ": expected an array");
  std::vector<int> out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].is_number_integer()) throw InputError(at(path, key) + "[" + std::to_string(i) + "]: expected an integer");
    out.push_back(a[i].get<int>());
  }
  return out;
}

FieldDistribution field_or(const Json& j, const FieldDistribution& fallback, const std::string& path) {
  return j.contains("field") ? field_distribution_from_json(j["field"], at(path, "field")) : fallback;
}

Exec exec_of(const Json& j, const std::string& path) {
  return json_bool_or(j, "parallel", true, path) ? Exec::parallel : Exec::serial;
}

std::string csv_number(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

struct StepContext {
  const Json& step;
  std::string path;
  std::uint64_t seed;
  std::filesystem::path dir;
  Exec exec;
  Json entry;
  std::vector<std::filesystem::path> files;
  bool passed = true;

  void write_json(const std::string& name, const Json& j) {
    write_json_file(dir / name, j);
    files.push_back(dir / name);
  }
  void write_text(const std::string& name, const std::string& text) {
    write_text_file(dir / name, text);
    files.push_back(dir / name);
  }
};

void gap_vs_exact(StepContext& c) {
  const Json& s = c.step;
  const int models = checked_int(s, "models", 20, 1, 100000, c.path);
  const int n = checked_int(s, "n", 8, 2, kGapCap, c.path);
  const int delta = checked_int(s, "delta", 3, 3, 64, c.path);
  const double beta = json_number_or(s, "beta", 0.3, c.path);
  const double p0 = json_number_or(s, "p0", 0.05, c.path);
  const double K = json_number_or(s, "K", 4.0, c.path);
  const FieldDistribution field = field_or(s, FieldDistribution::two_point(5.0), c.path);
  const AssumptionParams a = assumption_params(p0, K, beta, delta);
  const GapCertificate cert = gap_certificate(n, beta, delta, a.alpha_star);
  struct Row {
    double exact = 0;
  };
  const auto rows = map_indexed<Row>(
      static_cast<std::uint64_t>(models),
      [&](std::uint64_t i) {
        const std::uint64_t ms = derive_seed(c.seed, i);
        auto g = std::make_shared<const Graph>(gen::random_regular(n, delta, derive_seed(ms, 1)));
        const IsingModel m(g, beta, sample_field(field, n, derive_seed(ms, 2)).values);
        return Row{glauber_gap(m).gap};
      },
      c.exec);
  std::ostringstream csv;
  csv << "model,certificate,exact_gap,certificate_le_exact\n";
  Json out = Json::array();
  int ok = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const bool le = cert.gap_lower <= rows[i].exact;
    ok += le ? 1 : 0;
    csv << i << ',' << csv_number(cert.gap_lower) << ',' << csv_number(rows[i].exact) << ',' << (le ? 1 : 0) << '\n';
    out.push_back(Json{{"model", i}, {"certificate", cert.gap_lower}, {"exact_gap", rows[i].exact},
                       {"certificate_le_exact", le}});
  }
  c.passed = ok == models;
  c.write_text("gap_vs_exact.csv", csv.str());
  c.write_json("gap_vs_exact.json", Json{{"assumption", to_json(a)}, {"certificate", to_json(cert)}, {"rows", out},
                                          {"fraction_ok", static_cast<double>(ok) / models}});
}

void certificates(StepContext& c) {
  const Json& s = c.step;
  const int n = checked_int(s, "n", 10, 1, 1 << 30, c.path);
  const int delta = checked_int(s, "delta", 3, 3, 64, c.path);
  const double beta = json_number_or(s, "beta", 0.3, c.path);
  const double p0 = json_number_or(s, "p0", 0.05, c.path);
  const double K = json_number_or(s, "K", 4.0, c.path);
  const double M = json_number_or(s, "M", 1.0, c.path);
  const AssumptionParams a = assumption_params(p0, K, beta, delta);
  Json j{{"assumption", to_json(a)},
         {"gap", to_json(gap_certificate(n, beta, delta, a.alpha_star))},
         {"mlsi", to_json(mlsi_certificate(n, beta, delta, a.alpha_star, M))},
         {"entropy_conservation", to_json(entropy_conservation_instance(n, beta, delta, M, a.alpha_star))}};
  if (s.contains("L")) j["refined_gap_tail"] = to_json(refined_gap_tail(n, beta, delta, a.alpha_star, json_number(s, "L", c.path)));
  c.passed = a.valid;
  c.write_json("certificates.json", j);
}

void incremental(StepContext& c) {
  const Json& s = c.step;
  IsingModel model;
  if (s.contains("model")) {
    model = model_from_json(s["model"], at(c.path, "model"));
  } else {
    auto g = std::make_shared<const Graph>(graph_from_spec(s.contains("graph") ? s["graph"] : Json{{"gen", "path"}, {"n", 8}},
                                                           at(c.path, "graph")));
    const FieldDistribution field = field_or(s, FieldDistribution::gaussian(1.0), c.path);
    model = IsingModel(g, json_number_or(s, "beta", 0.3, c.path),
                       sample_field(field, g->num_vertices(), derive_seed(c.seed, 1)).values);
  }
  SamplerConfig cfg;
  cfg.c_star = json_number_or(s, "c_star", 2.0, c.path);
  cfg.seed = c.seed;
  cfg.ordering_seed = static_cast<std::uint64_t>(json_int_or(s, "ordering_seed", 0, c.path));
  cfg.prefix_kstar = json_bool_or(s, "prefix_kstar", false, c.path);
  auto [config, report] = incremental_sample(model, cfg);
  const auto validate = json_int_or(s, "validate", 0, c.path);
  Json extra = Json::object();
  if (validate > 0) {
    const ValidationResult v = validate_incremental(model, cfg, static_cast<std::uint64_t>(validate), c.exec);
    report.tv = v.tv;
    const double eps = json_number_or(s, "epsilon", 0.05, c.path);
    c.passed = v.tv <= eps;
    extra = to_json(v);
    extra["epsilon"] = eps;
  }
  c.entry["wall_seconds"] = report.wall_seconds;
  Json rj = to_json(report);
  rj.erase("wall_seconds");
  if (!extra.empty()) rj["validation"] = extra;
  c.write_json("incremental_report.json", rj);
  c.write_json("final_state.json", model_to_json(model, config));
  std::ostringstream csv;
  csv << "stage,vertex,steps\n";
  for (std::size_t i = 0; i < report.stage_steps.size(); ++i)
    csv << i << ',' << report.ordering[i] << ',' << report.stage_steps[i] << '\n';
  c.write_text("report.csv", csv.str());
}

void wsm(StepContext& c) {
  const Json& s = c.step;
  auto g = std::make_shared<const Graph>(graph_from_spec(s.contains("graph") ? s["graph"] : Json{{"gen", "cycle"}, {"n", 12}},
                                                         at(c.path, "graph")));
  WsmConfig cfg;
  cfg.beta = json_number_or(s, "beta", cfg.beta, c.path);
  cfg.field = field_or(s, cfg.field, c.path);
  cfg.radii = ints_or(s, "radii", cfg.radii, c.path);
  cfg.vertices = ints_or(s, "vertices", cfg.vertices, c.path);
  cfg.field_trials = static_cast<std::uint64_t>(checked_int(s, "field_trials", 100, 1, 1 << 30, c.path));
  cfg.seed = c.seed;
  cfg.sl_time = json_number_or(s, "sl_time", 0.0, c.path);
  cfg.c_grid = numbers_or(s, "c_grid", {}, c.path);
  const WsmReport r = estimate_wsm(g, cfg, c.exec);
  c.write_text("wsm.csv", wsm_csv(r));
  c.write_json("wsm.json", to_json(r));
}

void tails(StepContext& c) {
  const Json& s = c.step;
  auto g = std::make_shared<const Graph>(graph_from_spec(s.contains("graph") ? s["graph"] : Json{{"gen", "complete"}, {"n", 3}},
                                                         at(c.path, "graph")));
  TailConfig cfg;
  cfg.beta = json_number_or(s, "beta", cfg.beta, c.path);
  cfg.field = field_or(s, cfg.field, c.path);
  cfg.K = json_number_or(s, "K", cfg.K, c.path);
  cfg.p0 = json_number_or(s, "p0", cfg.p0, c.path);
  cfg.delta = checked_int(s, "delta", cfg.delta, 3, 64, c.path);
  cfg.theta_grid = numbers_or(s, "theta_grid", {0.0, 0.5}, c.path);
  cfg.m_grid = numbers_or(s, "m_grid", {0.25, 0.5, 1.0, 2.0}, c.path);
  cfg.trials = static_cast<std::uint64_t>(checked_int(s, "trials", 1000, 1, 1 << 30, c.path));
  cfg.seed = c.seed;
  const TailReport r = row_sum_tail_report(g, cfg, c.exec);
  c.passed = r.ok;
  c.write_json("tails.json", to_json(r));
}

std::string utc_timestamp() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string library_version() { return "1.0.0"; }

Graph graph_from_spec(const Json& j, const std::string& path) {
  if (!j.is_object()) throw InputError(path + ": expected a graph object");
  if (!j.contains("gen")) return graph_from_json(j, path);
  const std::string kind = json_string_or(j, "gen", "", path);
  auto n = [&] { return checked_int(j, "n", 0, 1, 1 << 24, path); };
  auto rows = [&] { return checked_int(j, "rows", 0, 1, 1 << 12, path); };
  auto cols = [&] { return checked_int(j, "cols", 0, 1, 1 << 12, path); };
  try {
    if (kind == "path") return gen::path(n());
    if (kind == "cycle") return gen::cycle(n());
    if (kind == "complete") return gen::complete(n());
    if (kind == "grid") return gen::grid(rows(), cols());
    if (kind == "torus") return gen::torus(rows(), cols());
    if (kind == "tree") return gen::regular_tree(checked_int(j, "degree", 3, 2, 64, path), checked_int(j, "depth", 0, 0, 20, path));
    if (kind == "random_regular") {
      return gen::random_regular(n(), checked_int(j, "degree", 3, 1, 64, path),
                                 static_cast<std::uint64_t>(json_int_or(j, "seed", 1, path)));
    }
  } catch (const InputError& e) {
    const std::string what = e.what();
    if (what.rfind(path, 0) == 0) throw;
    throw InputError(path + ": " + what);
  }
  throw InputError(at(path, "gen") + ": unknown generator \"" + kind + "\"");
}

ExperimentResult run_experiment(const Json& config, const std::filesystem::path& out_dir) {
  if (!config.is_object()) throw InputError("$: expected an object");
  const auto base_seed = static_cast<std::uint64_t>(json_int_or(config, "seed", 1, "$"));
  const Json pipeline = config.contains("pipeline") ? config["pipeline"] : Json::array();
  if (!pipeline.is_array()) throw InputError("$.pipeline: expected an array");

  // Validate step names before running anything.
  for (std::size_t i = 0; i < pipeline.size(); ++i) {
    const std::string p = "$.pipeline[" + std::to_string(i) + "]";
    const std::string name = json_string_or(pipeline[i], "step", "", p);
    if (name != "gap_vs_exact" && name != "certificates" && name != "incremental_sample" && name != "wsm" &&
        name != "tails") {
      throw InputError(p + ".step: unknown step \"" + name + "\"");
    }
  }

  ExperimentResult res;
  Json steps = Json::array();
  for (std::size_t i = 0; i < pipeline.size(); ++i) {
    const std::string p = "$.pipeline[" + std::to_string(i) + "]";
    const Json& step = pipeline[i];
    const std::string name = step["step"].get<std::string>();
    const auto seed = static_cast<std::uint64_t>(json_int_or(step, "seed", static_cast<std::int64_t>(derive_seed(base_seed, i) >> 1), p));
    StepContext ctx{step, p, seed, out_dir / (std::to_string(i) + "_" + name), exec_of(step, p), Json::object(), {}, true};
    if (name == "gap_vs_exact") gap_vs_exact(ctx);
    else if (name == "certificates") certificates(ctx);
    else if (name == "incremental_sample") incremental(ctx);
    else if (name == "wsm") wsm(ctx);
    else tails(ctx);
    Json entry = ctx.entry;
    entry["step"] = name;
    entry["seed"] = seed;
    entry["passed"] = ctx.passed;
    Json files = Json::array();
    for (const auto& f : ctx.files) files.push_back(std::filesystem::relative(f, out_dir).generic_string());
    entry["reports"] = std::move(files);
    steps.push_back(std::move(entry));
    res.files.insert(res.files.end(), ctx.files.begin(), ctx.files.end());
    res.all_passed = res.all_passed && ctx.passed;
  }
  res.manifest = Json{{"version", library_version()}, {"seed", base_seed}, {"threads", default_threads()},
                      {"created", utc_timestamp()}, {"steps", std::move(steps)}, {"config", config}};
  write_json_file(out_dir / "manifest.json", res.manifest);
  res.files.push_back(out_dir / "manifest.json");
  return res;
}

}  // namespace rfim
