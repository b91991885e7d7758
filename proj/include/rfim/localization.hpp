#pragma once

// Edge-field noising/denoising: each edge uv with σ_u = σ_v = 1 carries an
// independent uniform U_uv and is revealed at time t once U_uv ≤ t. Given the
// revealed set S at time t, X follows the edge-tilted model with the
// endpoints of S pinned to 1.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rfim/model.hpp"
#include "rfim/oracle.hpp"

namespace rfim {

struct DenoisingTrace {
  IsingModel base_model;
  SpinConfiguration x_sample;
  std::vector<double> edge_uniforms;

  /// Edge ids with both endpoints up in x_sample and U_e ≤ t, increasing.
  std::vector<int> revealed(double t) const;
};

struct TraceSampler {
  enum class Kind { oracle, glauber };
  Kind kind = Kind::oracle;
  std::uint64_t glauber_steps = 0;
};

DenoisingTrace sample_noising_trace(const IsingModel& model01, const TraceSampler& sampler, std::uint64_t seed);
/// Fast path with a prebuilt table; trace `index` of the stream family.
DenoisingTrace sample_noising_trace(const TableSampler& sampler, std::uint64_t seed, std::uint64_t index);

/// The tilted model at time t with the endpoints of `revealed` pinned to 1.
IsingModel posterior_model(const IsingModel& model01, double t, const std::vector<int>& revealed);

/// Law(X | revealed(t) = S) by Bayes over the product of μ and the edge
/// uniforms, indexed like gibbs_table(posterior_model(model01, t, S)).
/// Returns nullopt when P(revealed(t) = S) = 0.
std::optional<std::vector<double>> bayes_posterior(const IsingModel& model01, double t, const std::vector<int>& revealed);

struct PosteriorBucket {
  std::vector<int> revealed;
  std::uint64_t hits = 0;
  double tv = 0;
  double stat_err = 0;
};

struct PosteriorReport {
  std::uint64_t traces = 0;
  std::uint64_t min_hits = 0;
  std::vector<PosteriorBucket> buckets;  ///< buckets with at least min_hits
  double max_tv = 0;
};

PosteriorReport verify_posterior_by_simulation(const IsingModel& model01, double t, std::uint64_t traces,
                                               std::uint64_t seed, std::uint64_t min_hits = 500);

struct ConservationCertificate {
  enum class Kind { variance, entropy };
  Kind kind = Kind::variance;
  double theta = 0;
  double rate_c = 0;   ///< variance kind
  double eta_op = 0;   ///< entropy kind
  double k_low = 0;    ///< entropy kind
  double L = 0;
  double ES = 0;
  double R = 1;       ///< +∞ when it overflows
  double log_R = 0;
  std::string formula_id;
};

/// R = (1−θ)^{−C}.
ConservationCertificate variance_conservation_R(double c, double theta);
/// L = (K_low+1)(η_op−1)+1, ES = L/(1−(1−θ)^L), R = 1 + ES/(L(1−θ)^L).
ConservationCertificate entropy_conservation_R(double eta_op, double k_low, double theta);

struct EntropyInstantiation {
  ConservationCertificate certificate;  ///< η_op = 4Δ ln n/α*, K_low = C_{Δ,M,β}, θ = θ*
  double rho_from_R = 0;                ///< 1/(R n)
  double log_rho_from_R = 0;
  double closed_form_R = 0;             ///< 3 exp(4β((C+1)η_op + 1))
  double closed_form_rho = 0;           ///< 1/(closed_form_R · n)
  double log_closed_form_rho = 0;
};

EntropyInstantiation entropy_conservation_instance(int n, double beta, int delta, double m_bound, double alpha_star);

/// C_{Δ,M,β} = (1 + e^{2(βΔ+M)})².
double marginal_constant(int delta, double m_bound, double beta);
/// 1 / C_{Δ,M,β}.
double marginal_lower_bound(int delta, double m_bound, double beta);

/// Table of the vertex-tilted law ∝ μ(σ) θ^{|σ|}, θ ∈ (0,1].
GibbsTable vertex_tilt_table(const IsingModel& model01, double theta);

/// All edge subsets of positive posterior probability at time t (m ≤ 20).
std::vector<std::vector<int>> feasible_revealed_sets(const IsingModel& model01, double t);

}  // namespace rfim
