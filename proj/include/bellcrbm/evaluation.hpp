#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "bellcrbm/crbm.hpp"
#include "bellcrbm/quantum_oracle.hpp"

namespace bellcrbm {

// Half the L1 distance.
double total_variation(const OutcomeDistribution& p, const OutcomeDistribution& q);

// KL(p || q); infinite when q vanishes where p does not.
double kl_divergence(const OutcomeDistribution& p, const OutcomeDistribution& q);

struct ConditionReport {
  ConditionVector condition;
  OutcomeDistribution target;
  OutcomeDistribution model;
  double tv = 0.0;
  double kl = 0.0;
};

struct ChshReport {
  ChshSettings settings;
  std::size_t state = 0;
  ChshScan scan;
};

struct EvaluationReport {
  double temperature = 1.0;
  std::string description;
  std::vector<ConditionReport> conditions;
  double mean_tv = 0.0;
  double max_tv = 0.0;
  double mean_kl = 0.0;
  std::optional<ChshReport> chsh;                // when the layout holds the CHSH settings
  std::optional<SignalingDeviation> signaling;  // when both detectors have >= 2 settings
};

/// Compare the model's conditional tables at `temp` with the Born-rule
/// tables of every condition.
EvaluationReport evaluate(const CrbmParams& params, const ConditioningLayout& layout, Temperature temp);

/// The model's tables for one prepared state, keyed [a index][b index].
OutcomeGrid model_grid(const CrbmParams& params, const ConditioningLayout& layout, Temperature temp,
                       std::size_t state = 0);

// settings.a etc. mapped to layout indices; throws InvalidInput if absent.
struct ChshIndices {
  std::size_t a, a_prime, b, b_prime;
};
ChshIndices locate_chsh_settings(const ConditioningLayout& layout, const ChshSettings& settings);

/// CHSH values of the model at the four settings, for all sign placements.
ChshScan model_chsh(const CrbmParams& params, const ConditioningLayout& layout, const ChshSettings& settings,
                    Temperature temp, std::size_t state = 0);

struct PrBoxDistance {
  PrBox box;
  std::array<double, 4> per_condition{};  // TV, indexed by ChshTerm
  double max = 0.0;
};

/// Nearest of the eight extremal boxes, judged by the largest per-condition
/// TV. `tables` is indexed by ChshTerm.
PrBoxDistance nearest_pr_box(const std::array<OutcomeDistribution, 4>& tables);

PrBoxDistance model_pr_box_distance(const CrbmParams& params, const ConditioningLayout& layout,
                                    const ChshSettings& settings, Temperature temp, std::size_t state = 0);

struct SweepRow {
  double temperature = 1.0;
  double s_max = 0.0;
  double pr_box_tv = 0.0;  // max per-condition TV to the nearest PR box
  double signaling = 0.0;
};

struct SweepResult {
  ChshSettings settings;
  std::vector<SweepRow> rows;
};

/// Evaluate fixed parameters at each temperature. Temperatures must be
/// positive and strictly decreasing.
SweepResult temperature_sweep(const CrbmParams& params, const ConditioningLayout& layout,
                              const std::vector<double>& temperatures, const ChshSettings& settings,
                              std::size_t state = 0);

// n evenly spaced temperatures from t_start down to t_end inclusive.
std::vector<double> temperature_ladder(double t_start, double t_end, int steps);

/// Largest signaling deviation over the prepared states. Throws InvalidInput
/// when a detector has fewer than two settings.
double signaling_deviation_model(const CrbmParams& params, const ConditioningLayout& layout, Temperature temp);
SignalingDeviation signaling_deviation_model_by_station(const CrbmParams& params, const ConditioningLayout& layout,
                                                        Temperature temp);

struct WeightProfileRow {
  char detector = 'A';
  std::size_t setting = 0;
  double angle = 0.0;
  std::size_t hidden_unit = 0;
  double weight = 0.0;
};

/// Conditioning weight of every (detector, setting, hidden unit) triple.
std::vector<WeightProfileRow> export_weight_profile(const CrbmParams& params, const ConditioningLayout& layout);

}  // namespace bellcrbm
