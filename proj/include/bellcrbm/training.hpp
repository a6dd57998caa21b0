#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "bellcrbm/crbm.hpp"
#include "bellcrbm/random.hpp"

namespace bellcrbm {

enum class TrainingMode { ExactKl, CdK, Pcd };

std::string to_string(TrainingMode mode);
TrainingMode training_mode_from_string(const std::string& name);

struct TrainingConfig {
  TrainingMode mode = TrainingMode::ExactKl;
  double learning_rate = 1.0;
  int epochs = 200000;
  int batch_size = 64;
  int gibbs_k = 1;
  int n_chains = 1;  // persistent chains per condition
  std::uint64_t seed = 7;
  double init_scale = 0.01;
  double target_tv = 0.001;
  // Probability of each condition (flat layout index). Empty means uniform.
  std::vector<double> condition_weights;

  // Defaults for sample-based training differ from the exact mode; see
  // defaults_for().
  static TrainingConfig defaults_for(TrainingMode mode);

  void validate(const ConditioningLayout& layout) const;

  // condition_weights, or the uniform table when empty.
  std::vector<double> resolved_weights(const ConditioningLayout& layout) const;
};

/// One simulated experimental run.
struct Trial {
  ConditionVector condition;
  Spin x_a = Spin::Up;
  Spin x_b = Spin::Up;

  bool operator==(const Trial&) const = default;
};

struct Dataset {
  std::vector<Trial> trials;
  std::uint64_t seed = 0;
  std::string provenance;
};

// Per-condition target tables, indexed like ConditioningLayout::index_of.
using TargetTables = std::vector<OutcomeDistribution>;

TargetTables oracle_targets(const ConditioningLayout& layout);

/// Relative outcome frequencies per condition. Conditions that never occur
/// get a uniform table and are reported through `counts`.
TargetTables empirical_targets(const Dataset& data, const ConditioningLayout& layout,
                               std::vector<std::size_t>* counts = nullptr);

/// Draw conditions from `condition_weights` (uniform when empty) and
/// outcomes from the Born rule.
Dataset simulate_dataset(const ConditioningLayout& layout, std::size_t n_trials, Rng& rng,
                         std::span<const double> condition_weights = {});

/// sum_u q(u) KL(target(.|u) || model(.|u)).
double kl_objective(const CrbmParams& params, const ConditioningLayout& layout, const TargetTables& targets,
                    std::span<const double> condition_weights);

/// Exact gradient of kl_objective with respect to every parameter, in the
/// same shape as the parameters.
CrbmParams exact_kl_gradient(const CrbmParams& params, const ConditioningLayout& layout, const TargetTables& targets,
                             std::span<const double> condition_weights);

/// Persistent negative-phase chains, `per_condition` of them for each
/// condition of the layout.
class ChainBank {
 public:
  ChainBank() = default;
  ChainBank(const ConditioningLayout& layout, std::size_t hidden, std::size_t per_condition, Rng& rng);

  std::size_t per_condition() const { return per_condition_; }
  std::size_t size() const { return chains_.size(); }

  // Next chain of the condition in round-robin order.
  GibbsState& next(std::size_t condition_index);

  const std::vector<GibbsState>& chains() const { return chains_; }

  void check(const ConditioningLayout& layout, std::size_t hidden) const;

  bool operator==(const ChainBank&) const = default;

 private:
  std::size_t per_condition_ = 0;
  std::vector<GibbsState> chains_;
  std::vector<std::size_t> cursor_;
};

/// Sampled estimate of exact_kl_gradient from a minibatch. The positive
/// phase uses the batch outcomes with hidden units summed out; the negative
/// phase advances one chain of the batch element's condition gibbs_k
/// sweeps. With persistent == false (CD-k) the chain is restarted from the
/// data first.
CrbmParams pcd_gradient(const CrbmParams& params, const ConditioningLayout& layout, std::span<const Trial> batch,
                        ChainBank& chains, int gibbs_k, Temperature temp, Rng& rng, bool persistent = true);

struct EpochRecord {
  int epoch = 0;
  double mean_tv = 0.0;
  double mean_kl = 0.0;
  double gradient_norm = 0.0;

  bool operator==(const EpochRecord&) const = default;
};

using TrainingHistory = std::vector<EpochRecord>;

using TrainingSource = std::variant<Dataset, TargetTables>;

struct TrainingResult {
  CrbmParams params;
  TrainingHistory history;
  bool converged = false;  // mean TV reached target_tv
};

// Zero-mean normal weights with std init_scale; biases zero.
CrbmParams initialize_params(const ConditioningLayout& layout, std::size_t hidden, double init_scale, Rng& rng);

/// Stochastic gradient descent on the conditional KL objective. Stops as
/// soon as the mean TV to the training targets drops to target_tv. Throws
/// DivergenceError if a parameter exceeds 1e6 in magnitude or the
/// objective becomes non-finite.
TrainingResult train(const ConditioningLayout& layout, std::size_t hidden, const TrainingConfig& config,
                     const TrainingSource& source);

// Continue training from given parameters.
TrainingResult train_from(CrbmParams params, const ConditioningLayout& layout, const TrainingConfig& config,
                          const TrainingSource& source);

}  // namespace bellcrbm
