#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "bellcrbm/random.hpp"

namespace bellcrbm {

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

using BinaryVector = std::vector<std::uint8_t>;

/// Positive temperature of the Boltzmann distribution.
class Temperature {
 public:
  explicit Temperature(double t = 1.0);
  double value() const { return t_; }

 private:
  double t_;
};

/// Weights and biases of a restricted Boltzmann machine with m visible and
/// n hidden binary {0,1} units. weights(i, j) couples visible i to hidden j.
///
/// Energy convention: E(v,h) = -(v'Wh + c'v + d'h), with no 1/2 on the
/// coupling term, so that flipping v_i from 0 to 1 lowers the energy by
/// c_i + sum_j w_ij h_j.
struct RbmParams {
  Matrix weights;
  std::vector<double> visible_biases;
  std::vector<double> hidden_biases;

  RbmParams() = default;
  RbmParams(std::size_t visible, std::size_t hidden)
      : weights(visible, hidden), visible_biases(visible, 0.0), hidden_biases(hidden, 0.0) {}

  std::size_t visible() const { return visible_biases.size(); }
  std::size_t hidden() const { return hidden_biases.size(); }

  // Throws InvalidInput on inconsistent sizes or non-finite entries.
  void validate() const;

  // Every parameter multiplied by `factor`.
  RbmParams scaled(double factor) const;

  bool operator==(const RbmParams&) const = default;
};

// Limit for exhaustive enumeration over a layer.
inline constexpr std::size_t kMaxEnumerableUnits = 20;

// Bits of `index`, least significant first, as a layer configuration.
BinaryVector bits_of(std::uint64_t index, std::size_t width);

double energy(const RbmParams& params, const BinaryVector& v, const BinaryVector& h);

/// Free energy at temperature t with the hidden layer summed out in closed
/// form: F(v) = -c'v - t * sum_j softplus((d_j + sum_i w_ij v_i) / t).
double free_energy(const RbmParams& params, const BinaryVector& v, Temperature temp = Temperature{1.0});

/// Visible marginal P(v) for all 2^m configurations; entry k is the
/// configuration bits_of(k, m).
std::vector<double> visible_distribution(const RbmParams& params, Temperature temp = Temperature{1.0});

/// Probability that a unit switches on when that lowers the energy by
/// delta_e: 1 / (1 + exp(-delta_e / t)).
double unit_activation(double delta_e, Temperature temp = Temperature{1.0});

// log(1 + e^x) without overflow.
double softplus(double x);

// Logistic function without overflow.
double sigmoid(double x);

struct GibbsState {
  BinaryVector visible;
  BinaryVector hidden;
};

/// One block-Gibbs sweep: all hidden units given v, then all visible units
/// given the new h.
void gibbs_sweep(const RbmParams& params, GibbsState& state, Temperature temp, Rng& rng);

// Same, but the hidden units see `hidden_biases` in place of params'.
void gibbs_sweep(const RbmParams& params, std::span<const double> hidden_biases, GibbsState& state, Temperature temp,
                 Rng& rng);

}  // namespace bellcrbm
