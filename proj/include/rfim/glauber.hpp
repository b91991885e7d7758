#pragma once

// Single-site heat-bath Glauber dynamics and its couplings.
//
// Step k of a chain reads block k of its (seed, stream) substream: words
// 0–1 choose the free vertex, words 2–3 give the uniform U, and the vertex
// is set up iff U ≤ P(up | rest). Chains that share a substream therefore
// share vertex choices and uniforms.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rfim/kernels.hpp"
#include "rfim/model.hpp"
#include "rfim/oracle.hpp"
#include "rfim/rng.hpp"

namespace rfim {

struct ChainState {
  SpinConfiguration config;
  std::uint64_t step = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream = stream_id(StreamKind::glauber, 0);
};

ChainState make_chain(SpinConfiguration init, std::uint64_t seed, std::uint64_t replica = 0);

/// Caches the free-vertex list of a model for repeated steps.
class GlauberKernel {
 public:
  explicit GlauberKernel(const IsingModel& model);
  const IsingModel& model() const { return model_; }
  const std::vector<int>& free() const { return free_; }

  /// One heat-bath update; returns the updated vertex.
  int step(ChainState& s) const;
  void run(ChainState& s, std::uint64_t steps) const;
  /// The vertex and uniform used at a given step of a substream.
  std::pair<int, double> draw(std::uint64_t seed, std::uint64_t stream, std::uint64_t step) const;

 private:
  IsingModel model_;
  std::vector<int> free_;
};

ChainState glauber_step(const IsingModel& model, ChainState state);

struct TrajectoryRow {
  std::uint64_t step = 0;
  double magnetization = 0;
  double energy = 0;
};

struct ChainRun {
  ChainState final_state;
  std::vector<TrajectoryRow> trajectory;
};

/// thin = 0 records nothing; otherwise every `thin` steps plus the endpoints.
ChainRun run_chain(const IsingModel& model, const SpinConfiguration& init, std::uint64_t steps, std::uint64_t seed,
                   std::uint64_t thin = 0);

std::string trajectory_csv(const std::vector<TrajectoryRow>& rows);

struct CouplingTrace {
  ChainState low;
  ChainState high;
  std::uint64_t steps = 0;
  std::uint64_t order_violations = 0;
  std::optional<std::uint64_t> coalescence_step;
  std::vector<int> disagreement_set;
};

/// Two chains driven by the same substream; requires ferromagnetic couplings
/// and low ≤ high. Checks the order after every step.
CouplingTrace monotone_coupled_run(const IsingModel& model, const SpinConfiguration& low,
                                   const SpinConfiguration& high, std::uint64_t steps, std::uint64_t seed,
                                   bool stop_at_coalescence = false);

/// Shared per-site uniform of the grand coupling and the percolation.
double site_uniform(std::uint64_t seed, int vertex);

struct GrandCoupling {
  std::vector<SpinConfiguration> states;
  std::vector<int> disagreement_set;  ///< vertices where some state differs from states[0]
};

/// Sequential exact sampling of every model along `order`: at vertex x each
/// model draws x from its conditional law given the already revealed
/// vertices, all using the shared uniform site_uniform(seed, x).
GrandCoupling grand_coupled_update(const std::vector<IsingModel>& models, const std::vector<int>& order,
                                   std::uint64_t seed);
/// Same with precomputed tables (one per model).
GrandCoupling grand_coupled_update(const std::vector<const GibbsTable*>& tables, const std::vector<int>& order,
                                   std::uint64_t seed);

/// Final-state counts over table indices of `replicas` independent chains.
std::vector<std::uint64_t> replica_histogram(const IsingModel& model, const SpinConfiguration& init,
                                             std::uint64_t steps, std::uint64_t replicas, std::uint64_t seed,
                                             Exec exec);

struct TvPoint {
  std::uint64_t step = 0;
  double tv = 0;
  double stat_err = 0;  ///< ½ Σ_x sqrt(μ(x)(1−μ(x))/N)
};

std::vector<TvPoint> empirical_tv_curve(const IsingModel& model, const SpinConfiguration& init,
                                        const std::vector<std::uint64_t>& steps, std::uint64_t replicas,
                                        std::uint64_t seed, Exec exec = Exec::parallel);

/// counts[x][y] of one-step moves from exact stationary starts.
std::vector<std::vector<std::uint64_t>> transition_counts(const IsingModel& model, std::uint64_t samples,
                                                          std::uint64_t seed, Exec exec = Exec::parallel);

}  // namespace rfim
