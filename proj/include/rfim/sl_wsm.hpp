#pragma once

// Stochastic-localization field boosting through its Bayesian form
// y = tσ* + √t Z, weak-spatial-mixing estimates, trace-moment probes, and
// separation plans for point tuples.

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "rfim/graph.hpp"
#include "rfim/kernels.hpp"
#include "rfim/model.hpp"
#include "rfim/oracle.hpp"

namespace rfim {

struct SlRealization {
  double t = 0;
  SpinConfiguration sigma_star;
  std::vector<double> noise;  ///< √t Z
  std::vector<double> y;
  IsingModel boosted_model;
};

struct SlSampler {
  enum class Kind { oracle, glauber };
  Kind kind = Kind::oracle;
  std::uint64_t glauber_steps = 0;
};

/// Plus-minus model; boosted field is h + y.
SlRealization sl_boost(const IsingModel& model, double t, const SlSampler& sampler, std::uint64_t seed);
/// Fast path: σ* drawn from a prebuilt table of the model.
SlRealization sl_boost(const TableSampler& sampler, double t, std::uint64_t seed);

/// TV between the marginals at u under all-up and all-down spins on the
/// sphere ∂B_ℓ(u) = {w : d(u, w) = ℓ}, computed on the model induced by
/// B_ℓ(u). One at ℓ = 0, zero when the sphere is empty.
double wsm_delta(const IsingModel& model, int u, int ell);

struct WsmEntry {
  int vertex = 0;
  int radius = 0;
  double mean = 0;
  double std_err = 0;
};

struct WsmConfig {
  double beta = 0.5;
  FieldDistribution field = FieldDistribution::two_point(5.0);
  std::vector<int> radii{1, 2, 3, 4};
  std::vector<int> vertices;  ///< empty: all vertices
  std::uint64_t field_trials = 100;
  std::uint64_t seed = 1;
  double sl_time = 0.0;       ///< > 0 boosts each field by one SL realization
  std::uint64_t sl_glauber_steps = 0;
  std::vector<double> c_grid;
};

struct WsmReport {
  std::vector<WsmEntry> entries;
  /// per field trial, per radius: mean δ over the vertices
  std::vector<std::vector<double>> trial_radius_means;
  std::vector<int> radii;
  std::optional<double> fitted_c;   ///< least squares of log mean δ_r against log C − r/C
  double minimal_c = 0;             ///< smallest C with every mean ≤ C e^{−r/C}
  std::vector<std::pair<double, bool>> satisfied;

  bool satisfied_at(double c) const;
};

WsmReport estimate_wsm(std::shared_ptr<const Graph> g, const WsmConfig& cfg, Exec exec = Exec::parallel);

struct SeparationPlan {
  std::vector<int> points;
  std::vector<double> r;    ///< +∞ for the first index
  std::vector<int> j;       ///< nearest earlier index, −1 for the first
  std::vector<std::pair<int, std::vector<int>>> q_buckets;
  int k_star = -1;
  std::vector<int> a_set;
  std::vector<double> ell;      ///< real ℓ_i on A, NaN elsewhere
  std::vector<int> ell_floor;   ///< integer ball radius on A, −1 elsewhere
  bool separation_ok = true;
};

/// Indices are 0-based. Buckets use floor(r_i) so Q_k = {i : ⌊r_i⌋ ∈ [2^k, 2^{k+1}−1]}.
SeparationPlan build_separation_plan(const Graph& g, const std::vector<int>& points);

struct TraceMomentPoint {
  double t = 0;
  double mean = 0;
  double std_err = 0;
};

struct TraceMomentReport {
  int p = 1;
  std::vector<TraceMomentPoint> points;
  double sup = 0;
  double fitted_c0 = 0;  ///< (sup/n)^{1/p}/p, fitted
};

/// E Tr(Cov(ν_t)^p) over SL realizations; realization r uses the same
/// (σ*, Z) at every t.
TraceMomentReport trace_moment_probe(const IsingModel& model, int p, const std::vector<double>& t_grid,
                                     std::uint64_t realizations, std::uint64_t seed, Exec exec = Exec::parallel);

struct WeakPoincareVerdict {
  double lhs = 0;       ///< Var_{ν0}(φ)
  double mean_var_t = 0;
  double rhs = 0;
  double p = 1;
  double inv_q = 0;
  bool satisfied = true;
};

/// Var_{ν0}(φ) ≤ (e^{−c0}|V|/δ)^{1/q} E[Var_{ν_T}(φ)]^{1/p} osc(φ)^{2/q},
/// p = e^{2T/c0}. Functions are given on table indices of the model.
std::vector<WeakPoincareVerdict> weak_poincare_probe(const IsingModel& model, double T, double delta,
                                                     const std::vector<std::vector<double>>& functions,
                                                     std::uint64_t realizations, std::uint64_t seed, double c0,
                                                     Exec exec = Exec::parallel);

/// c0 = 1/(e·C0) from a fitted trace-moment constant.
double c0_from_trace_moment(double fitted_c0);

std::vector<double> magnetization_function(const GibbsTable& table);
std::vector<double> spin_function(const GibbsTable& table, int v);

}  // namespace rfim
