#pragma once

// Config-driven pipelines.
//
// Config JSON: {"seed": s, "pipeline": [{"step": name, ...}, ...]} with
// steps gap_vs_exact, certificates, incremental_sample, wsm and tails.
// Each step writes its reports into the output directory; manifest.json
// lists every step with its seed and files. Reports carry no timestamps.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rfim/graph.hpp"
#include "rfim/io.hpp"

namespace rfim {

/// {"gen": "path"|"cycle"|"complete"|"grid"|"torus"|"tree"|"random_regular", ...}
/// or an explicit graph JSON.
Graph graph_from_spec(const Json& j, const std::string& path = "$");

struct ExperimentResult {
  Json manifest;
  std::vector<std::filesystem::path> files;
  bool all_passed = true;  ///< every step with a verdict passed
};

ExperimentResult run_experiment(const Json& config, const std::filesystem::path& out_dir);

std::string library_version();

}  // namespace rfim
