#pragma once

// Incremental warm-start sampling: vertices are added one at a time along a
// connected ordering, each new vertex drawn from its own field alone, and
// Glauber dynamics on the prefix's induced model repairs the joint law.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rfim/glauber.hpp"
#include "rfim/kernels.hpp"
#include "rfim/model.hpp"

namespace rfim {

struct SamplerConfig {
  double c_star = 2.0;              ///< k* = ceil(n^c_star)
  std::uint64_t seed = 0;
  std::uint64_t ordering_seed = 0;
  bool prefix_kstar = false;        ///< use the prefix size instead of n
  bool per_component = true;        ///< false: disconnected graphs are an error
  std::optional<int> start;         ///< first vertex of the ordering
};

/// k* for a given size; guards against overflow.
std::uint64_t k_star_for(int n, double c_star);

struct RunReport {
  std::vector<std::uint64_t> stage_steps;
  std::uint64_t total_updates = 0;
  std::uint64_t k_star = 0;
  double wall_seconds = 0;
  SpinConfiguration final_config;
  std::vector<int> ordering;
  std::optional<double> tv;
};

/// Orderings and per-stage Glauber kernels, built once and shared by replicas.
class IncrementalPlan {
 public:
  IncrementalPlan(const IsingModel& model, const SamplerConfig& cfg);

  const IsingModel& model() const { return model_; }
  const std::vector<int>& ordering() const { return ordering_; }
  std::uint64_t k_star() const { return k_star_; }
  std::size_t num_stages() const { return stages_.size(); }
  std::uint64_t total_updates() const;

  /// One run; all randomness from `seed`.
  SpinConfiguration sample(std::uint64_t seed, std::vector<std::uint64_t>* stage_steps = nullptr) const;

 private:
  struct Stage {
    int vertex = 0;                ///< vertex added at this stage
    std::vector<int> prefix;       ///< prefix of its component, in order
    std::uint64_t steps = 0;       ///< 0 for the first vertex of a component
    std::optional<GlauberKernel> kernel;
  };

  IsingModel model_;
  std::vector<int> ordering_;
  std::vector<Stage> stages_;
  std::uint64_t k_star_ = 0;
};

/// Exact draw of a lone vertex from its raw field.
bool draw_lone_vertex(const IsingModel& model, int v, double u);

std::pair<SpinConfiguration, RunReport> incremental_sample(const IsingModel& model, const SamplerConfig& cfg);

struct ValidationResult {
  double tv = 0;
  double stat_err = 0;  ///< ½ Σ_x sqrt(μ(x)(1−μ(x))/N)
  std::uint64_t replicas = 0;
  std::uint64_t k_star = 0;
  std::vector<std::uint64_t> counts;
};

/// Empirical TV between `replicas` independent runs and the exact table.
ValidationResult validate_incremental(const IsingModel& model, const SamplerConfig& cfg, std::uint64_t replicas,
                                      Exec exec = Exec::parallel);

struct Calibration {
  double c_star = 0;
  std::uint64_t k_star = 0;
  double epsilon = 0;
  std::vector<std::pair<std::uint64_t, double>> tried;  ///< (k*, tv)
  bool reached = false;
};

/// Smallest k* on a doubling grid whose empirical TV is ≤ epsilon.
Calibration calibrate_cstar(const IsingModel& model, const SamplerConfig& base, double epsilon,
                            std::uint64_t replicas, std::uint64_t k_max, Exec exec = Exec::parallel);

struct WarmStartBound {
  double value = 0;
  std::vector<std::string> warnings;
};

/// M (A^{2p} log k / k)^{1/(2p−1)}.
WarmStartBound warm_start_tv_bound(double m_warm, double a, double p, std::uint64_t k);

/// Density bound e^{4β e^{C_α}} of the warm start.
double warm_start_constant(double beta, double c_alpha);

}  // namespace rfim
