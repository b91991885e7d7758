#pragma once

// Exact enumeration of small models.
//
// A GibbsTable indexes configurations of the model's free vertices in
// increasing vertex order: bit i of the index is the up bit of free[i].

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rfim/kernels.hpp"
#include "rfim/model.hpp"

namespace rfim {

constexpr int kTableCap = 24;
constexpr int kGapCap = 12;
constexpr int kMlsiCap = 10;
constexpr int kSweepCap = 10;

struct GibbsTable {
  IsingModel model;
  std::vector<int> free;
  std::vector<double> probs;
  std::vector<double> log_weights;  ///< H of each index, unnormalized
  double log_partition = 0.0;

  std::size_t size() const { return probs.size(); }
  /// Full configuration (pinned vertices at their pins) of table index x.
  SpinConfiguration configuration(std::uint64_t x) const;
  /// Table index of a configuration; pinned coordinates must agree.
  std::uint64_t index_of(const SpinConfiguration& config) const;
  double marginal_up(int v) const;
};

GibbsTable gibbs_table(const IsingModel& model, Exec exec = Exec::parallel);
GibbsTable conditional_table(const IsingModel& model, const Pinning& extra, Exec exec = Exec::parallel);

/// Inverse-CDF sampler over a table.
class TableSampler {
 public:
  explicit TableSampler(GibbsTable table);
  const GibbsTable& table() const { return table_; }
  std::uint64_t sample_index(double u) const;
  SpinConfiguration sample(double u) const { return table_.configuration(sample_index(u)); }

 private:
  GibbsTable table_;
  std::vector<double> cdf_;
};

struct Moments {
  Eigen::VectorXd mean;  ///< over table.free, in the table's convention
  Eigen::MatrixXd cov;
};

Moments mean_and_covariance(const GibbsTable& table);

/// Probability that both endpoints of each edge are up.
std::vector<double> edge_event_probs(const GibbsTable& table);

/// E×E matrix with entries μ(wz|uv) − μ(wz), rows of zero-probability
/// events identically zero. Requires the zero-one convention.
Eigen::MatrixXd cor2_matrix(const GibbsTable& table);

double tv_distance(const GibbsTable& a, const GibbsTable& b);
double tv_distance(const std::vector<double>& p, const std::vector<double>& q);

/// Heat-bath transition matrix with uniform choice among free vertices.
Eigen::MatrixXd transition_matrix(const GibbsTable& table);

/// The same kernel stored sparsely: flip[x*f + i] = P(x, x ^ (1<<i)).
struct HeatBathOperator {
  int f = 0;
  std::vector<double> flip;
  std::vector<double> stay;
  std::vector<double> apply(const std::vector<double>& v) const;
};

HeatBathOperator heat_bath_operator(const GibbsTable& table);

struct SpectralReport {
  int free = 0;
  double gap = 0;           ///< 1 − λ₂ of the transition matrix
  double gap_rayleigh = 0;  ///< min Dirichlet form / variance
  double at_variance_constant = 0;
  std::optional<double> mlsi_lower_estimate;
  std::string notes;
};

/// 1 − λ₂ from the symmetrized kernel only.
double heat_bath_gap(const IsingModel& model);
/// Both gap routes; NumericalError when they differ by more than 1e−9.
SpectralReport glauber_gap(const IsingModel& model);
/// sup Var(φ) / Σ_i E[Var(φ | rest_i)] as a generalized eigenproblem.
double at_variance_constant(const IsingModel& model);

struct MlsiEstimate {
  double ratio = 1.0;  ///< smallest (Ent f − Ent Pf)/Ent f found
  int restarts = 0;
};

/// Heuristic: multi-restart descent over f = e^g. Upper-estimates ρ_LS.
MlsiEstimate mlsi_lower_estimate(const IsingModel& model, int restarts, std::uint64_t seed,
                                 Exec exec = Exec::parallel);
/// (Ent f − Ent Pf)/Ent f for a given nonnegative f on table indices.
double mlsi_ratio(const GibbsTable& table, const HeatBathOperator& p, const std::vector<double>& f);

/// Ent_π[f] with 0·log 0 = 0.
double entropy(const std::vector<double>& pi, const std::vector<double>& f);

struct Cor2SweepReport {
  bool exact = true;
  std::uint64_t cells = 0;
  double max_row_sum = 0;
  double max_col_sum = 0;
  double max_opnorm = 0;
  std::vector<double> edge_row_sup;  ///< per edge uv: sup Σ_wz |Cor(uv,wz)|
  std::vector<double> edge_col_sup;  ///< per edge wz: sup Σ_uv |Cor(uv,wz)|
  std::uint64_t argmax_pinning = 0;  ///< ternary code of the opnorm argmax
  std::size_t argmax_theta = 0;
  std::uint64_t interpolation_violations = 0;
};

/// Ternary code over free vertices (first free vertex most significant):
/// digit 0 free, 1 pinned down, 2 pinned up.
Pinning decode_pinning(const std::vector<int>& vertices, std::uint64_t code);

/// sup of row sums, column sums and operator norm of Cor² over all pinnings
/// of the free vertices (exact) or `samples` random pinnings, and over
/// `theta_grid`.
Cor2SweepReport sup_cor2_over_pinnings(const IsingModel& model01, const std::vector<double>& theta_grid,
                                       Exec exec = Exec::parallel, std::optional<int> samples = std::nullopt,
                                       std::uint64_t seed = 0);

/// Largest singular value.
double operator_norm(const Eigen::MatrixXd& a);

}  // namespace rfim
