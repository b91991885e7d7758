#pragma once

// Field-driven site percolation, Galton–Watson cluster tails, and the gap
// and MLSI certificates built on them.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rfim/graph.hpp"
#include "rfim/kernels.hpp"
#include "rfim/model.hpp"

namespace rfim {

enum class SiteState : std::uint8_t { closed, field_open, uniform_open };

struct PercolationRealization {
  std::shared_ptr<const Graph> graph;
  std::vector<SiteState> provenance;
  std::uint64_t seed = 0;

  bool open(int v) const { return provenance[static_cast<std::size_t>(v)] != SiteState::closed; }
  VertexSet open_set() const;
};

/// Site x is open iff |h_x| ≤ K or min(U_x, 1−U_x) ≤ p0/4, with U_x the
/// shared site uniform of the grand coupling.
PercolationRealization percolate(std::shared_ptr<const Graph> g, const std::vector<double>& field, double K,
                                 double p0, std::uint64_t seed);

/// Open cluster of the edge with both endpoints forced open.
VertexSet cluster_of_edge(const PercolationRealization& r, Edge e);

struct DisagreementResult {
  std::vector<int> disagreement;
  VertexSet cluster;
  bool contained = true;
};

/// Couples ν = (1−θ)⊗μ^τ and ν(·|σ_u=σ_v=1) along BFS order from e, sharing
/// the site uniforms with percolate(field_pm, K, p0, seed).
DisagreementResult disagreement_experiment(const IsingModel& model01, Edge e, double theta, const Pinning& extra,
                                           const std::vector<double>& field_pm, double K, double p0,
                                           std::uint64_t seed);

/// P(T = x) = (2/x) P(Bin((Δ−1)x, p0) = x−2) for the two-root forest.
double otter_dwass_pmf(int delta, double p0, int x);
/// Σ_{x=m}^{x_max} otter_dwass_pmf.
double otter_dwass_tail(int delta, double p0, int m, int x_max = 5000);

struct ClusterTailBound {
  double xi_star = 0;
  double alpha_star = 0;
  double tail_bound = 0;        ///< P(|C| ≥ m) bound
  double exp_moment_bound = 0;  ///< E exp(α*|C|) bound
};

ClusterTailBound cluster_tail_bound(int delta, double p0, int m);

/// 2/((1−e^{−α*})(1−e^{−2α*})) e^{2γ*} e^{−α* m}.
double row_sum_tail_bound(const AssumptionParams& a, double m);

struct TailRow {
  double m = 0;
  double bound = 0;
  double slack = 0;          ///< one-sided 99% binomial allowance
  double max_row_freq = 0;   ///< max over edges of P(sup row ≥ Δm)
  double max_col_freq = 0;   ///< max over edges of P(sup col ≥ 2Δm)
  bool ok = true;
};

struct TailReport {
  AssumptionParams params;
  bool exact = true;
  std::uint64_t trials = 0;
  std::vector<TailRow> rows;
  bool ok = true;
};

struct TailConfig {
  double beta = 0.5;
  FieldDistribution field = FieldDistribution::two_point(5.0);
  double K = 4.0;
  double p0 = 0.05;
  int delta = 3;  ///< declared degree bound, at least the graph's
  std::vector<double> theta_grid;
  std::vector<double> m_grid;
  std::uint64_t trials = 1000;
  std::uint64_t seed = 1;
  std::optional<int> sampled_pinnings;
};

TailReport row_sum_tail_report(std::shared_ptr<const Graph> g, const TailConfig& cfg, Exec exec = Exec::parallel);

struct NormCheck {
  double opnorm = 0;
  double rowsum_max = 0;
  double colsum_max = 0;
  double bound = 0;
  bool ok = true;
};

NormCheck norm_interpolation_check(const Eigen::MatrixXd& a);

/// p0 ∈ (0, 1/(Δ−1)) with α*(p0) = alpha_star.
double p0_from_alpha(int delta, double alpha_star);

struct GapCertificate {
  int n = 0;
  double beta = 0;
  int delta = 0;
  double alpha_star = 0;
  double gap_lower = 0;
  double log_gap_lower = 0;
  double tmix_exponent = 0;  ///< 1 + 16βΔ/α*
  double failure_constant = 0;
  std::string failure_probability_note;

  /// n^{1+16βΔ/α*}(βΔn + ‖h‖₁ + log(1/ε)), unit constant.
  double tmix_upper(double eps, double field_l1) const;
};

GapCertificate gap_certificate(int n, double beta, int delta, double alpha_star);

struct MlsiCertificate {
  int n = 0;
  double beta = 0;
  int delta = 0;
  double alpha_star = 0;
  double m_bound = 0;
  double c_marginal = 0;
  double log_rho_lower = 0;
  double rho_lower = 0;  ///< may underflow to 0; log_rho_lower is exact
};

MlsiCertificate mlsi_certificate(int n, double beta, int delta, double alpha_star, double m_bound);

struct RefinedGapTail {
  double epsilon = 0;             ///< 16βΔ/√α*
  double log_gap_inverse = 0;     ///< ln n + εL
  double gap_lower = 0;           ///< 1/(n e^{εL})
  double failure = 0;             ///< e^{−2L}
  double l_threshold = 0;         ///< smallest L meeting the tail condition
  double kappa0 = 0;              ///< l_threshold / ln n
  bool threshold_met = false;
  double p0 = 0;
};

RefinedGapTail refined_gap_tail(int n, double beta, int delta, double alpha_star, double L);

}  // namespace rfim
