#include "bellcrbm/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "bellcrbm/error.hpp"
#include "bellcrbm/evaluation.hpp"

namespace bellcrbm {

std::string to_string(TrainingMode mode) {
  switch (mode) {
    case TrainingMode::ExactKl: return "exact_kl";
    case TrainingMode::CdK: return "cd_k";
    case TrainingMode::Pcd: return "pcd";
  }
  return "?";
}

TrainingMode training_mode_from_string(const std::string& name) {
  if (name == "exact_kl" || name == "exact-kl" || name == "exact") return TrainingMode::ExactKl;
  if (name == "cd_k" || name == "cd-k" || name == "cd") return TrainingMode::CdK;
  if (name == "pcd") return TrainingMode::Pcd;
  throw InvalidInput("unknown training mode '" + name + "' (expected exact_kl, cd_k or pcd)");
}

TrainingConfig TrainingConfig::defaults_for(TrainingMode mode) {
  TrainingConfig c;
  c.mode = mode;
  if (mode != TrainingMode::ExactKl) {
    c.learning_rate = 0.005;
    c.epochs = 2000;
    c.n_chains = 16;
    c.target_tv = 0.01;
  }
  return c;
}

void TrainingConfig::validate(const ConditioningLayout& layout) const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) throw InvalidInput("learning rate must be >= 0");
  if (epochs < 1) throw InvalidInput("epochs must be >= 1");
  if (batch_size < 1) throw InvalidInput("batch size must be >= 1");
  if (gibbs_k < 1) throw InvalidInput("gibbs_k must be >= 1");
  if (n_chains < 1) throw InvalidInput("n_chains must be >= 1");
  if (!(init_scale >= 0.0) || !std::isfinite(init_scale)) throw InvalidInput("init_scale must be >= 0");
  if (!(target_tv >= 0.0)) throw InvalidInput("target_tv must be >= 0");
  if (!condition_weights.empty()) {
    if (condition_weights.size() != layout.condition_count()) {
      throw InvalidInput("condition weight table does not cover the layout");
    }
    double total = 0.0;
    for (double w : condition_weights) {
      if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidInput("condition weights must be non-negative");
      total += w;
    }
    if (std::abs(total - 1.0) > 1e-9) throw InvalidInput("condition weights must sum to 1");
  }
}

std::vector<double> TrainingConfig::resolved_weights(const ConditioningLayout& layout) const {
  if (!condition_weights.empty()) return condition_weights;
  const std::size_t n = layout.condition_count();
  return std::vector<double>(n, 1.0 / static_cast<double>(n));
}

TargetTables oracle_targets(const ConditioningLayout& layout) {
  layout.validate();
  TargetTables out;
  out.reserve(layout.condition_count());
  for (const auto& u : layout.conditions()) out.push_back(layout.born_table(u));
  return out;
}

TargetTables empirical_targets(const Dataset& data, const ConditioningLayout& layout,
                               std::vector<std::size_t>* counts) {
  const std::size_t n = layout.condition_count();
  std::vector<std::array<std::size_t, 4>> tally(n, {0, 0, 0, 0});
  for (const auto& t : data.trials) ++tally[layout.index_of(t.condition)][OutcomeDistribution::index(t.x_a, t.x_b)];

  TargetTables out(n, OutcomeDistribution::uniform());
  if (counts) counts->assign(n, 0);
  for (std::size_t c = 0; c < n; ++c) {
    const std::size_t total = std::accumulate(tally[c].begin(), tally[c].end(), std::size_t{0});
    if (counts) (*counts)[c] = total;
    if (total == 0) continue;
    for (std::size_t k = 0; k < 4; ++k) out[c].p[k] = static_cast<double>(tally[c][k]) / static_cast<double>(total);
  }
  return out;
}

namespace {

std::vector<double> cumulative(std::span<const double> w) {
  std::vector<double> cdf(w.size());
  std::partial_sum(w.begin(), w.end(), cdf.begin());
  return cdf;
}

std::size_t draw_from_cdf(const std::vector<double>& cdf, Rng& rng) {
  const double r = rng.uniform() * cdf.back();
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), r);
  return std::min(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
}

}  // namespace

Dataset simulate_dataset(const ConditioningLayout& layout, std::size_t n_trials, Rng& rng,
                         std::span<const double> condition_weights) {
  layout.validate();
  if (n_trials == 0) throw InvalidInput("dataset needs at least one trial");
  const std::size_t n = layout.condition_count();
  if (!condition_weights.empty() && condition_weights.size() != n) {
    throw InvalidInput("condition weight table does not cover the layout");
  }
  const TargetTables targets = oracle_targets(layout);
  const std::vector<double> cdf = condition_weights.empty() ? std::vector<double>{} : cumulative(condition_weights);

  Dataset data;
  data.seed = rng.seed();
  data.provenance = "born-rule oracle";
  data.trials.reserve(n_trials);
  for (std::size_t i = 0; i < n_trials; ++i) {
    const std::size_t c = cdf.empty() ? rng.index(n) : draw_from_cdf(cdf, rng);
    const std::size_t k = sample_index(targets[c], rng);
    data.trials.push_back({layout.condition_at(c), OutcomeDistribution::spin_a(k), OutcomeDistribution::spin_b(k)});
  }
  return data;
}

namespace {

void check_targets(const ConditioningLayout& layout, const TargetTables& targets, std::span<const double> weights) {
  if (weights.size() != layout.condition_count()) throw InvalidInput("condition weights do not cover the layout");
  if (targets.size() != layout.condition_count()) {
    throw InvalidInput("missing target tables: have " + std::to_string(targets.size()) + ", layout has " +
                       std::to_string(layout.condition_count()) + " conditions");
  }
}

double kl_term(const OutcomeDistribution& target, const OutcomeDistribution& model) {
  double kl = 0.0;
  for (std::size_t k = 0; k < 4; ++k) {
    if (target.p[k] > 0.0) kl += target.p[k] * std::log(target.p[k] / model.p[k]);
  }
  return kl;
}

// Adds scale * E_dist[-dE/dtheta | u] to `acc`, hidden units summed out.
void accumulate_statistics(CrbmParams& acc, const CrbmParams& params, const ConditionVector& u,
                           const std::vector<double>& hidden_bias, const BinaryVector& v, double scale) {
  const std::size_t n = params.hidden();
  for (std::size_t j = 0; j < n; ++j) {
    double input = hidden_bias[j];
    for (std::size_t i = 0; i < kOutcomeUnits; ++i) {
      if (v[i]) input += params.base.weights(i, j);
    }
    const double hj = scale * sigmoid(input);
    for (std::size_t i = 0; i < kOutcomeUnits; ++i) {
      if (v[i]) acc.base.weights(i, j) += hj;
    }
    acc.base.hidden_biases[j] += hj;
    for (std::size_t g = 0; g < kGroupCount; ++g) acc.cond_weights[g](u[static_cast<Group>(g)], j) += hj;
  }
  for (std::size_t i = 0; i < kOutcomeUnits; ++i) {
    if (v[i]) acc.base.visible_biases[i] += scale;
  }
}

// Applies f(a_i, b_i) to every matching pair of parameters, in flatten() order.
template <typename F>
void zip_params(CrbmParams& a, const CrbmParams& b, F&& f) {
  auto zip = [&](auto& xs, const auto& ys) {
    for (std::size_t i = 0; i < xs.size(); ++i) f(xs[i], ys[i]);
  };
  zip(a.base.weights.data(), b.base.weights.data());
  zip(a.base.visible_biases, b.base.visible_biases);
  zip(a.base.hidden_biases, b.base.hidden_biases);
  for (std::size_t g = 0; g < kGroupCount; ++g) zip(a.cond_weights[g].data(), b.cond_weights[g].data());
}

CrbmParams zeros_like(const CrbmParams& p) {
  CrbmParams z = p;
  zip_params(z, p, [](double& x, double) { x = 0.0; });
  return z;
}

}  // namespace

double kl_objective(const CrbmParams& params, const ConditioningLayout& layout, const TargetTables& targets,
                    std::span<const double> condition_weights) {
  check_targets(layout, targets, condition_weights);
  double total = 0.0;
  for (std::size_t c = 0; c < layout.condition_count(); ++c) {
    if (condition_weights[c] == 0.0) continue;
    total += condition_weights[c] * kl_term(targets[c], conditional_table(params, layout.condition_at(c)));
  }
  return total;
}

CrbmParams exact_kl_gradient(const CrbmParams& params, const ConditioningLayout& layout, const TargetTables& targets,
                             std::span<const double> condition_weights) {
  params.check_layout(layout);
  check_targets(layout, targets, condition_weights);
  CrbmParams grad = zeros_like(params);
  for (std::size_t c = 0; c < layout.condition_count(); ++c) {
    const double q = condition_weights[c];
    if (q == 0.0) continue;
    const ConditionVector u = layout.condition_at(c);
    const std::vector<double> bias = effective_hidden_biases(params, u);
    const OutcomeDistribution model = conditional_table(params, u);
    // dKL/dtheta = -(E_target[phi] - E_model[phi]) with phi = -dE/dtheta.
    for (std::size_t k = 0; k < 4; ++k) {
      const double diff = targets[c].p[k] - model.p[k];
      if (diff != 0.0) accumulate_statistics(grad, params, u, bias, outcome_visible(k), -q * diff);
    }
  }
  return grad;
}

ChainBank::ChainBank(const ConditioningLayout& layout, std::size_t hidden, std::size_t per_condition, Rng& rng)
    : per_condition_(per_condition), cursor_(layout.condition_count(), 0) {
  if (per_condition == 0) throw InvalidInput("need at least one chain per condition");
  chains_.resize(layout.condition_count() * per_condition);
  for (auto& chain : chains_) {
    chain.visible = {static_cast<std::uint8_t>(rng.bernoulli(0.5)), static_cast<std::uint8_t>(rng.bernoulli(0.5))};
    chain.hidden.resize(hidden);
    for (auto& h : chain.hidden) h = static_cast<std::uint8_t>(rng.bernoulli(0.5));
  }
}

GibbsState& ChainBank::next(std::size_t condition_index) {
  std::size_t& cur = cursor_.at(condition_index);
  GibbsState& chain = chains_[condition_index * per_condition_ + cur];
  cur = (cur + 1) % per_condition_;
  return chain;
}

void ChainBank::check(const ConditioningLayout& layout, std::size_t hidden) const {
  if (cursor_.size() != layout.condition_count() || chains_.size() != cursor_.size() * per_condition_) {
    throw DimensionMismatch("chain bank does not match the conditioning layout");
  }
  for (const auto& c : chains_) {
    if (c.hidden.size() != hidden || c.visible.size() != kOutcomeUnits) {
      throw DimensionMismatch("chain state does not match the model");
    }
  }
}

CrbmParams pcd_gradient(const CrbmParams& params, const ConditioningLayout& layout, std::span<const Trial> batch,
                        ChainBank& chains, int gibbs_k, Temperature temp, Rng& rng, bool persistent) {
  params.check_layout(layout);
  chains.check(layout, params.hidden());
  if (gibbs_k < 1) throw InvalidInput("gibbs_k must be >= 1");
  CrbmParams grad = zeros_like(params);
  if (batch.empty()) return grad;

  const double scale = 1.0 / static_cast<double>(batch.size());
  std::vector<std::vector<double>> biases(layout.condition_count());
  // Signed weight per (condition, outcome) pair: data minus chain counts.
  std::vector<double> tally(layout.condition_count() * 4, 0.0);
  for (const Trial& t : batch) {
    const std::size_t c = layout.index_of(t.condition);
    if (biases[c].empty()) biases[c] = effective_hidden_biases(params, t.condition);
    const BinaryVector data_v = {static_cast<std::uint8_t>(to_bit(t.x_a)), static_cast<std::uint8_t>(to_bit(t.x_b))};

    GibbsState& chain = chains.next(c);
    if (!persistent) chain.visible = data_v;
    for (int s = 0; s < gibbs_k; ++s) gibbs_sweep(params.base, biases[c], chain, temp, rng);

    tally[c * 4 + OutcomeDistribution::index(t.x_a, t.x_b)] += 1.0;
    tally[c * 4 + 2 * chain.visible[0] + chain.visible[1]] -= 1.0;
  }
  // Descent direction: -(positive - negative).
  for (std::size_t c = 0; c < biases.size(); ++c) {
    if (biases[c].empty()) continue;
    const ConditionVector u = layout.condition_at(c);
    for (std::size_t k = 0; k < 4; ++k) {
      if (tally[c * 4 + k] != 0.0) accumulate_statistics(grad, params, u, biases[c], outcome_visible(k), -scale * tally[c * 4 + k]);
    }
  }
  return grad;
}

CrbmParams initialize_params(const ConditioningLayout& layout, std::size_t hidden, double init_scale, Rng& rng) {
  if (hidden == 0) throw InvalidInput("need at least one hidden unit");
  CrbmParams p(layout, hidden);
  for (double& w : p.base.weights.data()) w = init_scale * rng.normal();
  for (auto& m : p.cond_weights) {
    for (double& w : m.data()) w = init_scale * rng.normal();
  }
  return p;
}

namespace {

constexpr double kDivergenceLimit = 1e6;

struct Fit {
  double mean_tv = 0.0;
  double mean_kl = 0.0;
};

Fit measure_fit(const CrbmParams& params, const ConditioningLayout& layout, const TargetTables& targets,
                const std::vector<double>& weights) {
  Fit fit;
  std::size_t active = 0;
  for (std::size_t c = 0; c < layout.condition_count(); ++c) {
    if (weights[c] == 0.0) continue;
    const OutcomeDistribution model = conditional_table(params, layout.condition_at(c));
    fit.mean_tv += total_variation(targets[c], model);
    fit.mean_kl += kl_term(targets[c], model);
    ++active;
  }
  fit.mean_tv /= static_cast<double>(active);
  fit.mean_kl /= static_cast<double>(active);
  return fit;
}

double norm(const CrbmParams& g) {
  double s = 0.0;
  for (double x : g.flatten()) s += x * x;
  return std::sqrt(s);
}

void descend(CrbmParams& params, const CrbmParams& grad, double lr, int epoch) {
  bool finite = true;
  zip_params(params, grad, [&](double& p, double g) {
    p -= lr * g;
    if (!std::isfinite(p) || std::abs(p) > kDivergenceLimit) finite = false;
  });
  if (!finite) {
    const std::vector<double> p = params.flatten();
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (std::isfinite(p[i]) && std::abs(p[i]) <= kDivergenceLimit) continue;
      std::ostringstream msg;
      msg << "training diverged at epoch " << epoch << ": parameter " << i << " = " << p[i];
      throw DivergenceError(msg.str());
    }
  }
}

void add_into(CrbmParams& acc, const CrbmParams& g) {
  zip_params(acc, g, [](double& a, double b) { a += b; });
}

}  // namespace

TrainingResult train_from(CrbmParams params, const ConditioningLayout& layout, const TrainingConfig& config,
                          const TrainingSource& source) {
  layout.validate();
  config.validate(layout);
  params.validate();
  params.check_layout(layout);

  const std::vector<double> weights = config.resolved_weights(layout);
  const Dataset* data = std::get_if<Dataset>(&source);
  const TargetTables targets = data ? empirical_targets(*data, layout) : std::get<TargetTables>(source);
  if (targets.size() != layout.condition_count()) throw InvalidInput("target tables do not cover the layout");
  for (const auto& t : targets) t.validate(1e-9);
  if (data) {
    if (data->trials.empty()) throw InvalidInput("dataset is empty");
    for (const auto& t : data->trials) layout.check(t.condition);
  }

  const Rng master(config.seed);
  Rng chain_rng = master.split(1);
  Rng batch_rng = master.split(2);
  Rng gibbs_rng = master.split(3);

  const bool sampled = config.mode != TrainingMode::ExactKl;
  ChainBank chains;
  if (sampled) chains = ChainBank(layout, params.hidden(), static_cast<std::size_t>(config.n_chains), chain_rng);
  const std::vector<double> cdf = cumulative(weights);
  std::vector<std::size_t> order;
  if (data) {
    order.resize(data->trials.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
  }

  TrainingResult result;
  const Temperature unit_temp{1.0};
  const std::size_t batch_size = static_cast<std::size_t>(config.batch_size);
  std::vector<Trial> batch;
  batch.reserve(batch_size);

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    CrbmParams epoch_grad = zeros_like(params);
    if (!sampled) {
      epoch_grad = exact_kl_gradient(params, layout, targets, weights);
      descend(params, epoch_grad, config.learning_rate, epoch);
    } else if (data) {
      // One pass over the shuffled trials.
      for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[batch_rng.index(i)]);
      std::size_t steps = 0;
      for (std::size_t start = 0; start < order.size(); start += batch_size) {
        batch.clear();
        for (std::size_t i = start; i < std::min(order.size(), start + batch_size); ++i) {
          batch.push_back(data->trials[order[i]]);
        }
        const CrbmParams g = pcd_gradient(params, layout, batch, chains, config.gibbs_k, unit_temp, gibbs_rng,
                                          config.mode == TrainingMode::Pcd);
        descend(params, g, config.learning_rate, epoch);
        add_into(epoch_grad, g);
        ++steps;
      }
      epoch_grad = epoch_grad.scaled(1.0 / static_cast<double>(steps));
    } else {
      // Table source: each epoch is one fresh minibatch drawn from the targets.
      batch.clear();
      for (std::size_t i = 0; i < batch_size; ++i) {
        const std::size_t c = draw_from_cdf(cdf, batch_rng);
        const std::size_t k = sample_index(targets[c], batch_rng);
        batch.push_back({layout.condition_at(c), OutcomeDistribution::spin_a(k), OutcomeDistribution::spin_b(k)});
      }
      epoch_grad = pcd_gradient(params, layout, batch, chains, config.gibbs_k, unit_temp, gibbs_rng,
                                config.mode == TrainingMode::Pcd);
      descend(params, epoch_grad, config.learning_rate, epoch);
    }

    const Fit fit = measure_fit(params, layout, targets, weights);
    if (!std::isfinite(fit.mean_kl) || !std::isfinite(fit.mean_tv)) {
      throw DivergenceError("training objective became non-finite at epoch " + std::to_string(epoch));
    }
    result.history.push_back({epoch, fit.mean_tv, fit.mean_kl, norm(epoch_grad)});
    if (fit.mean_tv <= config.target_tv) {
      result.converged = true;
      break;
    }
  }
  result.params = std::move(params);
  return result;
}

TrainingResult train(const ConditioningLayout& layout, std::size_t hidden, const TrainingConfig& config,
                     const TrainingSource& source) {
  layout.validate();
  config.validate(layout);
  Rng init_rng = Rng(config.seed).split(0);
  return train_from(initialize_params(layout, hidden, config.init_scale, init_rng), layout, config, source);
}

}  // namespace bellcrbm
