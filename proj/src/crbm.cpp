#include "bellcrbm/crbm.hpp"

#include <algorithm>
#include <cmath>

#include "bellcrbm/error.hpp"

namespace bellcrbm {

std::size_t ConditionVector::operator[](Group g) const {
  switch (g) {
    case Group::DetectorA: return a;
    case Group::DetectorB: return b;
    case Group::State: return state;
  }
  return 0;
}

std::array<std::size_t, kGroupCount> ConditioningLayout::group_sizes() const {
  return {angles_a.size(), angles_b.size(), states.size()};
}

std::size_t ConditioningLayout::condition_count() const { return angles_a.size() * angles_b.size() * states.size(); }

std::size_t ConditioningLayout::index_of(const ConditionVector& u) const {
  check(u);
  return (u.state * angles_a.size() + u.a) * angles_b.size() + u.b;
}

ConditionVector ConditioningLayout::condition_at(std::size_t index) const {
  if (index >= condition_count()) throw InvalidInput("condition index out of range");
  ConditionVector u;
  u.b = index % angles_b.size();
  index /= angles_b.size();
  u.a = index % angles_a.size();
  u.state = index / angles_a.size();
  return u;
}

std::vector<ConditionVector> ConditioningLayout::conditions() const {
  std::vector<ConditionVector> out;
  out.reserve(condition_count());
  for (std::size_t k = 0; k < condition_count(); ++k) out.push_back(condition_at(k));
  return out;
}

bool ConditioningLayout::contains(const ConditionVector& u) const {
  return u.a < angles_a.size() && u.b < angles_b.size() && u.state < states.size();
}

void ConditioningLayout::check(const ConditionVector& u) const {
  if (!contains(u)) {
    throw InvalidInput("condition (a=" + std::to_string(u.a) + ", b=" + std::to_string(u.b) +
                       ", state=" + std::to_string(u.state) + ") is outside the layout");
  }
}

void ConditioningLayout::validate() const {
  if (angles_a.empty() || angles_b.empty() || states.empty()) {
    throw InvalidInput("every conditioning group needs at least one unit");
  }
  for (const auto* angles : {&angles_a, &angles_b}) {
    for (double x : *angles) {
      if (!std::isfinite(x)) throw InvalidInput("detector angle is not finite");
    }
    for (std::size_t i = 0; i < angles->size(); ++i) {
      for (std::size_t j = i + 1; j < angles->size(); ++j) {
        if (std::abs((*angles)[i] - (*angles)[j]) <= 1e-12) throw InvalidInput("detector angle listed twice");
      }
    }
  }
  for (const auto& s : states) s.validate();
  if (!state_names.empty() && state_names.size() != states.size()) {
    throw InvalidInput("state name table does not match the state list");
  }
}

namespace {

int find_angle(const std::vector<double>& angles, double angle) {
  for (std::size_t k = 0; k < angles.size(); ++k) {
    if (std::abs(angles[k] - angle) <= 1e-12) return static_cast<int>(k);
  }
  return -1;
}

}  // namespace

int ConditioningLayout::find_angle_a(double angle) const { return find_angle(angles_a, angle); }
int ConditioningLayout::find_angle_b(double angle) const { return find_angle(angles_b, angle); }

OutcomeDistribution ConditioningLayout::born_table(const ConditionVector& u) const {
  check(u);
  return born_probabilities(states[u.state], angles_a[u.a], angles_b[u.b]);
}

CrbmParams::CrbmParams(const ConditioningLayout& layout, std::size_t hidden) : base(kOutcomeUnits, hidden) {
  const auto sizes = layout.group_sizes();
  for (std::size_t g = 0; g < kGroupCount; ++g) cond_weights[g] = Matrix(sizes[g], hidden);
}

void CrbmParams::validate() const {
  base.validate();
  if (base.visible() != kOutcomeUnits) throw DimensionMismatch("conditional RBM must have exactly 2 visible units");
  for (const auto& m : cond_weights) {
    if (m.rows() == 0) throw InvalidInput("conditioning group has no units");
    if (m.cols() != hidden()) throw DimensionMismatch("conditioning weights do not match the hidden layer");
    for (double x : m.data()) {
      if (!std::isfinite(x)) throw InvalidInput("conditioning weight is not finite");
    }
  }
}

void CrbmParams::check_layout(const ConditioningLayout& layout) const {
  const auto sizes = layout.group_sizes();
  for (std::size_t g = 0; g < kGroupCount; ++g) {
    if (cond_weights[g].rows() != sizes[g]) {
      throw DimensionMismatch("model conditioning group " + std::to_string(g) + " has " +
                              std::to_string(cond_weights[g].rows()) + " units, layout has " +
                              std::to_string(sizes[g]));
    }
  }
}

CrbmParams CrbmParams::scaled(double factor) const {
  CrbmParams out = *this;
  out.base = base.scaled(factor);
  for (auto& m : out.cond_weights) {
    for (double& x : m.data()) x *= factor;
  }
  return out;
}

std::size_t CrbmParams::parameter_count() const {
  std::size_t n = base.weights.data().size() + base.visible_biases.size() + base.hidden_biases.size();
  for (const auto& m : cond_weights) n += m.data().size();
  return n;
}

std::vector<double> CrbmParams::flatten() const {
  std::vector<double> out;
  out.reserve(parameter_count());
  auto append = [&out](const std::vector<double>& xs) { out.insert(out.end(), xs.begin(), xs.end()); };
  append(base.weights.data());
  append(base.visible_biases);
  append(base.hidden_biases);
  for (const auto& m : cond_weights) append(m.data());
  return out;
}

void CrbmParams::assign(const std::vector<double>& flat) {
  if (flat.size() != parameter_count()) throw DimensionMismatch("flat parameter vector has the wrong length");
  auto it = flat.begin();
  auto take = [&it](std::vector<double>& xs) {
    std::copy(it, it + static_cast<std::ptrdiff_t>(xs.size()), xs.begin());
    it += static_cast<std::ptrdiff_t>(xs.size());
  };
  take(base.weights.data());
  take(base.visible_biases);
  take(base.hidden_biases);
  for (auto& m : cond_weights) take(m.data());
}

BinaryVector outcome_visible(std::size_t outcome_index) {
  return {static_cast<std::uint8_t>((outcome_index >> 1) & 1U), static_cast<std::uint8_t>(outcome_index & 1U)};
}

std::vector<double> effective_hidden_biases(const CrbmParams& params, const ConditionVector& u) {
  std::vector<double> d = params.base.hidden_biases;
  for (std::size_t g = 0; g < kGroupCount; ++g) {
    const Matrix& w = params.cond_weights[g];
    const std::size_t k = u[static_cast<Group>(g)];
    if (k >= w.rows()) throw InvalidInput("active conditioning unit is outside its group");
    const auto row = w.row(k);
    for (std::size_t j = 0; j < d.size(); ++j) d[j] += row[j];
  }
  return d;
}

RbmParams conditioned_rbm(const CrbmParams& params, const ConditionVector& u) {
  RbmParams rbm = params.base;
  rbm.hidden_biases = effective_hidden_biases(params, u);
  return rbm;
}

double conditional_energy(const CrbmParams& params, const BinaryVector& v, const ConditionVector& u,
                          const BinaryVector& h) {
  return energy(conditioned_rbm(params, u), v, h);
}

OutcomeDistribution conditional_table(const CrbmParams& params, const ConditionVector& u, Temperature temp) {
  const RbmParams rbm = conditioned_rbm(params, u);
  std::array<double, 4> log_weight{};
  for (std::size_t k = 0; k < 4; ++k) log_weight[k] = -free_energy(rbm, outcome_visible(k), temp) / temp.value();
  const double top = *std::ranges::max_element(log_weight);
  OutcomeDistribution out;
  double z = 0.0;
  for (std::size_t k = 0; k < 4; ++k) {
    out.p[k] = std::exp(log_weight[k] - top);
    z += out.p[k];
  }
  for (double& x : out.p) x /= z;
  return out;
}

std::size_t sample_index(const OutcomeDistribution& dist, Rng& rng) {
  const double r = rng.uniform() * dist.total();
  double acc = 0.0;
  for (std::size_t k = 0; k < 3; ++k) {
    acc += dist.p[k];
    if (r < acc) return k;
  }
  // Trailing zero-probability entries are never chosen.
  for (std::size_t k = 4; k-- > 0;) {
    if (dist.p[k] > 0.0) return k;
  }
  return 3;
}

OutcomePair sample_outcome(const CrbmParams& params, const ConditionVector& u, Temperature temp, Rng& rng) {
  const std::size_t k = sample_index(conditional_table(params, u, temp), rng);
  return {OutcomeDistribution::spin_a(k), OutcomeDistribution::spin_b(k)};
}

}  // namespace bellcrbm
