#pragma once

// Text, JSON and binary formats for graphs, models, tables and reports.
//
// Graph text: first line "n m", then m lines "u v" (0-based).
// Graph JSON: {"n": n, "edges": [[u, v], ...]}.
// Model JSON: {"graph": <graph JSON>, "beta": b | "edge_couplings": [...],
//   "field": [...], "convention": "pm" | "01", "pinning": {"v": s, ...},
//   "configuration": [...]} where pins and spins are ±1 (pm) or 0/1 (01).
// Table binary (little-endian): magic "RFIMTBL1", u32 n, u32 f,
//   f × u32 free vertices, f64 log Z, 2^f × f64 probabilities.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rfim/graph.hpp"
#include "rfim/localization.hpp"
#include "rfim/model.hpp"
#include "rfim/oracle.hpp"
#include "rfim/percolation.hpp"
#include "rfim/sampler.hpp"
#include "rfim/sl_wsm.hpp"

namespace rfim {

using Json = nlohmann::json;

Graph parse_graph_text(const std::string& text);
std::string graph_to_text(const Graph& g);
Graph graph_from_json(const Json& j, const std::string& path = "$");
Json graph_to_json(const Graph& g);
/// JSON when the first non-blank character is '{', edge-list text otherwise.
Graph load_graph(const std::filesystem::path& file);

FieldDistribution field_distribution_from_json(const Json& j, const std::string& path = "$");
Json to_json(const FieldDistribution& d);

IsingModel model_from_json(const Json& j, const std::string& path = "$");
Json model_to_json(const IsingModel& m, const std::optional<SpinConfiguration>& config = std::nullopt);
/// The "configuration" block of a model JSON, if present.
std::optional<SpinConfiguration> configuration_from_json(const Json& j, const IsingModel& m,
                                                         const std::string& path = "$");
Json configuration_to_json(const SpinConfiguration& c);

struct TableFile {
  int n = 0;
  std::vector<int> free;
  double log_partition = 0;
  std::vector<double> probs;
};

void write_table_binary(std::ostream& os, const GibbsTable& t);
TableFile read_table_binary(std::istream& is);
Json table_to_json(const GibbsTable& t);

Json to_json(const AssumptionParams& a);
Json to_json(const SpectralReport& r);
Json to_json(const Cor2SweepReport& r);
Json to_json(const PosteriorReport& r);
Json to_json(const ConservationCertificate& c);
Json to_json(const EntropyInstantiation& e);
Json to_json(const GapCertificate& c);
Json to_json(const MlsiCertificate& c);
Json to_json(const RefinedGapTail& r);
Json to_json(const ClusterTailBound& b);
Json to_json(const TailReport& r);
Json to_json(const NormCheck& c);
Json to_json(const WsmReport& r);
Json to_json(const SeparationPlan& p);
Json to_json(const TraceMomentReport& r);
Json to_json(const WeakPoincareVerdict& v);
Json to_json(const RunReport& r);
Json to_json(const ValidationResult& v);
Json to_json(const Calibration& c);
Json to_json(const WarmStartBound& b);

/// CSV with header vertex,radius,mean_delta,stderr.
std::string wsm_csv(const WsmReport& r);

std::string read_text_file(const std::filesystem::path& file);
void write_text_file(const std::filesystem::path& file, const std::string& text);
Json read_json_file(const std::filesystem::path& file);
/// Two-space indented JSON with a trailing newline.
void write_json_file(const std::filesystem::path& file, const Json& j);

/// Typed field access that names the JSON path on failure.
double json_number(const Json& j, const std::string& key, const std::string& path);
double json_number_or(const Json& j, const std::string& key, double fallback, const std::string& path);
std::int64_t json_int(const Json& j, const std::string& key, const std::string& path);
std::int64_t json_int_or(const Json& j, const std::string& key, std::int64_t fallback, const std::string& path);
std::string json_string_or(const Json& j, const std::string& key, const std::string& fallback,
                           const std::string& path);
bool json_bool_or(const Json& j, const std::string& key, bool fallback, const std::string& path);

}  // namespace rfim
