#pragma once

// Random-field Ising models in the plus-minus and zero-one spin conventions.
//
// H(σ) = Σ_{(u,v)∈E} J_uv σ_u σ_v + Σ_u h_u σ_u and μ(σ) ∝ exp(H(σ)).
// A spin is stored as an "up" bit: +1 (plus-minus) or 1 (zero-one).

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rfim/graph.hpp"

namespace rfim {

enum class Convention { plus_minus, zero_one };

std::string to_string(Convention c);
Convention parse_convention(const std::string& s);

/// Spin value of an up/down bit in a convention: ±1 or 1/0.
inline int spin_value(bool up, Convention c) {
  return c == Convention::plus_minus ? (up ? 1 : -1) : (up ? 1 : 0);
}

class SpinConfiguration {
 public:
  SpinConfiguration() = default;
  SpinConfiguration(int n, Convention c, bool all_up = false);

  int size() const { return n_; }
  Convention convention() const { return convention_; }

  bool up(int v) const { return (words_[static_cast<std::size_t>(v) >> 6] >> (v & 63)) & 1u; }
  void set(int v, bool up) {
    const std::uint64_t mask = std::uint64_t{1} << (v & 63);
    auto& w = words_[static_cast<std::size_t>(v) >> 6];
    w = up ? (w | mask) : (w & ~mask);
  }
  int spin(int v) const { return spin_value(up(v), convention_); }
  int count_up() const;

  /// Same bits read in the other convention (σ' = (σ+1)/2 or its inverse).
  SpinConfiguration converted(Convention c) const;

  /// Build from spin values in the given convention.
  static SpinConfiguration from_spins(const std::vector<int>& spins, Convention c);
  std::vector<int> spins() const;

  const std::vector<std::uint64_t>& words() const { return words_; }

  friend bool operator==(const SpinConfiguration& a, const SpinConfiguration& b) {
    return a.n_ == b.n_ && a.convention_ == b.convention_ && a.words_ == b.words_;
  }
  /// Pointwise order on up bits.
  bool leq(const SpinConfiguration& other) const;

 private:
  int n_ = 0;
  Convention convention_ = Convention::plus_minus;
  std::vector<std::uint64_t> words_;
};

struct FieldDistribution {
  enum class Kind { gaussian, uniform_symmetric, two_point, shifted };
  Kind kind = Kind::gaussian;
  /// sigma (gaussian), M (uniform_symmetric) or a (two_point).
  double param = 1.0;
  /// shifted: per-vertex offsets added to draws from `base`.
  std::shared_ptr<const FieldDistribution> base;
  std::vector<double> offsets;

  static FieldDistribution gaussian(double sigma);
  static FieldDistribution uniform_symmetric(double m);
  static FieldDistribution two_point(double a);
  static FieldDistribution shifted(FieldDistribution base, std::vector<double> offsets);

  void validate() const;
  std::string describe() const;
};

struct QuenchedField {
  std::vector<double> values;
  FieldDistribution distribution;
  std::uint64_t seed = 0;
};

/// n i.i.d. draws; value v depends only on (seed, v, distribution).
QuenchedField sample_field(const FieldDistribution& dist, int n, std::uint64_t seed);

struct Pin {
  int vertex = 0;
  bool up = true;
};
using Pinning = std::vector<Pin>;

class IsingModel {
 public:
  IsingModel() = default;
  /// Uniform coupling beta on every edge.
  IsingModel(std::shared_ptr<const Graph> g, double beta, std::vector<double> field,
             Convention c = Convention::plus_minus);
  IsingModel(std::shared_ptr<const Graph> g, std::vector<double> couplings,
             std::vector<double> field, Convention c = Convention::plus_minus);

  const Graph& graph() const { return *graph_; }
  const std::shared_ptr<const Graph>& graph_ptr() const { return graph_; }
  int num_vertices() const { return graph_->num_vertices(); }
  Convention convention() const { return convention_; }

  const std::vector<double>& couplings() const { return couplings_; }
  double coupling(int e) const { return couplings_[static_cast<std::size_t>(e)]; }
  const std::vector<double>& field() const { return field_; }
  double field(int v) const { return field_[static_cast<std::size_t>(v)]; }

  double beta_max() const;
  bool ferromagnetic() const;
  void require_ferromagnetic(const char* what) const;

  /// -1 free, 0 pinned down, 1 pinned up.
  const std::vector<std::int8_t>& pin_state() const { return pins_; }
  bool is_pinned(int v) const { return pins_[static_cast<std::size_t>(v)] >= 0; }
  bool pinned_up(int v) const { return pins_[static_cast<std::size_t>(v)] == 1; }
  std::vector<int> free_vertices() const;
  int num_free() const;
  Pinning pinning() const;

  /// Adds pins; conflicting pins raise InfeasibleError.
  IsingModel with_pinning(const Pinning& extra) const;
  IsingModel without_pinning() const;
  IsingModel with_field(std::vector<double> field) const;
  IsingModel with_couplings(std::vector<double> couplings) const;

  /// H(σ with v up) − H(σ with v down), other spins as in `config`.
  double local_delta(int v, const SpinConfiguration& config) const;
  /// Heat-bath probability that v is up given the rest.
  double prob_up(int v, const SpinConfiguration& config) const;

  /// Configuration with every pinned vertex at its pin and free vertices up/down.
  SpinConfiguration constant_configuration(bool up) const;
  bool respects_pinning(const SpinConfiguration& config) const;

 private:
  void check_shapes();

  std::shared_ptr<const Graph> graph_;
  std::vector<double> couplings_;
  std::vector<double> field_;
  Convention convention_ = Convention::plus_minus;
  std::vector<std::int8_t> pins_;
};

/// Model on the subgraph induced by `vertices` (new id i ↔ vertices[i]);
/// couplings, fields and pins are restricted, outside vertices dropped.
IsingModel induced_model(const IsingModel& model, const std::vector<int>& vertices);

/// Numerically stable 1/(1+e^{-x}).
double logistic(double x);

double hamiltonian(const IsingModel& model, const SpinConfiguration& sigma);

/// Couplings ×4, h_u ↦ 2h_u − 2Σ_v β_uv; pinning carried over.
IsingModel to_zero_one(const IsingModel& model);
IsingModel to_plus_minus(const IsingModel& model);

/// Reweights μ by (1−θ)^{m(σ)}, m = number of edges with both endpoints 1,
/// and adds `pinning`. Couplings of free edges become J_uv + ln(1−θ).
IsingModel edge_tilt(const IsingModel& model01, double theta, const Pinning& pinning = {});

/// 1 − e^{−4β}: the tilt at which a uniform-β model becomes a product measure.
double theta_star(double beta);

struct AssumptionParams {
  double p0 = 0;
  double K = 0;
  double beta = 0;
  int delta = 0;
  double rho = 0;
  double xi_star = 0;
  double alpha_star = 0;
  double gamma_star = 0;
  bool valid = false;
};

AssumptionParams assumption_params(double p0, double K, double beta, int delta);

struct FieldAssumptionCheck {
  double mass = 0;  ///< P(|h| ≤ K)
  bool holds = false;  ///< mass < p0/2
};

FieldAssumptionCheck check_field_assumption(const FieldDistribution& dist, double p0, double K);

}  // namespace rfim
