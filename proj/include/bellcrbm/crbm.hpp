#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "bellcrbm/quantum_oracle.hpp"
#include "bellcrbm/random.hpp"
#include "bellcrbm/rbm.hpp"

namespace bellcrbm {

// The three one-hot conditioning groups, in storage order.
enum class Group : std::size_t { DetectorA = 0, DetectorB = 1, State = 2 };
inline constexpr std::size_t kGroupCount = 3;

/// Active unit of each one-hot group.
struct ConditionVector {
  std::size_t a = 0;
  std::size_t b = 0;
  std::size_t state = 0;

  std::size_t operator[](Group g) const;
  bool operator==(const ConditionVector&) const = default;
};

/// Setting angles of both detectors and the prepared states. Group sizes
/// follow from the table lengths.
struct ConditioningLayout {
  std::vector<double> angles_a;
  std::vector<double> angles_b;
  std::vector<TwoQubitState> states;
  std::vector<std::string> state_names;

  std::array<std::size_t, kGroupCount> group_sizes() const;
  std::size_t group_size(Group g) const { return group_sizes()[static_cast<std::size_t>(g)]; }

  // K_A * K_B * K_S
  std::size_t condition_count() const;

  // Flat index (state * K_A + a) * K_B + b.
  std::size_t index_of(const ConditionVector& u) const;
  ConditionVector condition_at(std::size_t index) const;
  std::vector<ConditionVector> conditions() const;

  bool contains(const ConditionVector& u) const;
  void check(const ConditionVector& u) const;

  // Throws InvalidInput for empty groups, non-finite angles, unnormalized
  // states or a state name table of the wrong length.
  void validate() const;

  // Index of the setting with exactly this angle (within 1e-12), or -1.
  int find_angle_a(double angle) const;
  int find_angle_b(double angle) const;

  OutcomeDistribution born_table(const ConditionVector& u) const;
};

/// Conditional RBM over the two outcome units. Each active conditioning
/// unit adds its weight row to the hidden biases; nothing else depends on
/// the condition.
struct CrbmParams {
  RbmParams base;                                // m = 2 visible units (x_A, x_B)
  std::array<Matrix, kGroupCount> cond_weights;  // K_l x n per group

  CrbmParams() = default;
  CrbmParams(const ConditioningLayout& layout, std::size_t hidden);

  std::size_t hidden() const { return base.hidden(); }
  const Matrix& group_weights(Group g) const { return cond_weights[static_cast<std::size_t>(g)]; }
  Matrix& group_weights(Group g) { return cond_weights[static_cast<std::size_t>(g)]; }

  void validate() const;
  void check_layout(const ConditioningLayout& layout) const;

  CrbmParams scaled(double factor) const;

  // Flat views over every parameter, in a fixed order: base weights,
  // visible biases, hidden biases, then the three conditioning matrices.
  std::size_t parameter_count() const;
  std::vector<double> flatten() const;
  void assign(const std::vector<double>& flat);

  bool operator==(const CrbmParams&) const = default;
};

inline constexpr std::size_t kOutcomeUnits = 2;

// v = (bit(x_A), bit(x_B)) for outcome index k in OutcomeDistribution order.
BinaryVector outcome_visible(std::size_t outcome_index);

std::vector<double> effective_hidden_biases(const CrbmParams& params, const ConditionVector& u);

// Plain RBM with the conditioning folded into its hidden biases.
RbmParams conditioned_rbm(const CrbmParams& params, const ConditionVector& u);

double conditional_energy(const CrbmParams& params, const BinaryVector& v, const ConditionVector& u,
                          const BinaryVector& h);

/// P(x_A, x_B | u), normalized over outcomes and hidden states at fixed u.
OutcomeDistribution conditional_table(const CrbmParams& params, const ConditionVector& u,
                                      Temperature temp = Temperature{1.0});

struct OutcomePair {
  Spin a = Spin::Up;
  Spin b = Spin::Up;
};

// Inverse-CDF draw from a 4-entry table.
std::size_t sample_index(const OutcomeDistribution& dist, Rng& rng);

OutcomePair sample_outcome(const CrbmParams& params, const ConditionVector& u, Temperature temp, Rng& rng);

}  // namespace bellcrbm
