#include "bellcrbm/rbm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bellcrbm/error.hpp"

namespace bellcrbm {

Temperature::Temperature(double t) : t_(t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw InvalidInput("temperature must be positive and finite");
}

void RbmParams::validate() const {
  if (visible() == 0 || hidden() == 0) throw InvalidInput("RBM needs at least one visible and one hidden unit");
  if (weights.rows() != visible() || weights.cols() != hidden()) {
    throw DimensionMismatch("weight matrix shape does not match the bias vectors");
  }
  auto finite = [](double x) { return std::isfinite(x); };
  if (!std::ranges::all_of(weights.data(), finite) || !std::ranges::all_of(visible_biases, finite) ||
      !std::ranges::all_of(hidden_biases, finite)) {
    throw InvalidInput("RBM parameters must be finite");
  }
}

RbmParams RbmParams::scaled(double factor) const {
  RbmParams out = *this;
  for (double& w : out.weights.data()) w *= factor;
  for (double& c : out.visible_biases) c *= factor;
  for (double& d : out.hidden_biases) d *= factor;
  return out;
}

BinaryVector bits_of(std::uint64_t index, std::size_t width) {
  BinaryVector bits(width);
  for (std::size_t i = 0; i < width; ++i) bits[i] = static_cast<std::uint8_t>((index >> i) & 1U);
  return bits;
}

namespace {

void check_layer(const BinaryVector& x, std::size_t expected, const char* name) {
  if (x.size() != expected) {
    throw DimensionMismatch(std::string(name) + " vector has " + std::to_string(x.size()) + " units, expected " +
                            std::to_string(expected));
  }
  for (auto b : x) {
    if (b > 1) throw InvalidInput(std::string(name) + " units must be 0 or 1");
  }
}

// d_j + sum_i w_ij v_i
double hidden_input(const RbmParams& p, std::span<const double> hidden_biases, const BinaryVector& v, std::size_t j) {
  double x = hidden_biases[j];
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i]) x += p.weights(i, j);
  }
  return x;
}

// c_i + sum_j w_ij h_j
double visible_input(const RbmParams& p, const BinaryVector& h, std::size_t i) {
  double x = p.visible_biases[i];
  for (std::size_t j = 0; j < h.size(); ++j) {
    if (h[j]) x += p.weights(i, j);
  }
  return x;
}

}  // namespace

double energy(const RbmParams& params, const BinaryVector& v, const BinaryVector& h) {
  check_layer(v, params.visible(), "visible");
  check_layer(h, params.hidden(), "hidden");
  double e = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i]) continue;
    e += params.visible_biases[i];
    for (std::size_t j = 0; j < h.size(); ++j) {
      if (h[j]) e += params.weights(i, j);
    }
  }
  for (std::size_t j = 0; j < h.size(); ++j) {
    if (h[j]) e += params.hidden_biases[j];
  }
  return -e;
}

double softplus(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double free_energy(const RbmParams& params, const BinaryVector& v, Temperature temp) {
  check_layer(v, params.visible(), "visible");
  const double t = temp.value();
  double f = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i]) f -= params.visible_biases[i];
  }
  for (std::size_t j = 0; j < params.hidden(); ++j) {
    f -= t * softplus(hidden_input(params, params.hidden_biases, v, j) / t);
  }
  return f;
}

std::vector<double> visible_distribution(const RbmParams& params, Temperature temp) {
  const std::size_t m = params.visible();
  if (m > kMaxEnumerableUnits) {
    throw InvalidInput("visible layer of " + std::to_string(m) + " units is too large to enumerate");
  }
  const std::size_t count = std::size_t{1} << m;
  std::vector<double> log_weight(count);
  for (std::size_t k = 0; k < count; ++k) log_weight[k] = -free_energy(params, bits_of(k, m), temp) / temp.value();

  const double top = *std::ranges::max_element(log_weight);
  double z = 0.0;
  for (double& w : log_weight) {
    w = std::exp(w - top);
    z += w;
  }
  for (double& w : log_weight) w /= z;
  return log_weight;
}

double unit_activation(double delta_e, Temperature temp) { return sigmoid(delta_e / temp.value()); }

void gibbs_sweep(const RbmParams& params, std::span<const double> hidden_biases, GibbsState& state, Temperature temp,
                 Rng& rng) {
  check_layer(state.visible, params.visible(), "visible");
  check_layer(state.hidden, params.hidden(), "hidden");
  if (hidden_biases.size() != params.hidden()) throw DimensionMismatch("hidden bias override has the wrong length");

  for (std::size_t j = 0; j < params.hidden(); ++j) {
    const double on = unit_activation(hidden_input(params, hidden_biases, state.visible, j), temp);
    state.hidden[j] = rng.bernoulli(on) ? 1 : 0;
  }
  for (std::size_t i = 0; i < params.visible(); ++i) {
    const double on = unit_activation(visible_input(params, state.hidden, i), temp);
    state.visible[i] = rng.bernoulli(on) ? 1 : 0;
  }
}

void gibbs_sweep(const RbmParams& params, GibbsState& state, Temperature temp, Rng& rng) {
  gibbs_sweep(params, params.hidden_biases, state, temp, rng);
}

}  // namespace bellcrbm
