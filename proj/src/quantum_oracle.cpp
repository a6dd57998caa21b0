#include "bellcrbm/quantum_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bellcrbm/error.hpp"

namespace bellcrbm {

Spin spin_from_int(int x) {
  if (x == +1) return Spin::Up;
  if (x == -1) return Spin::Down;
  throw InvalidInput("spin outcome must be +1 or -1, got " + std::to_string(x));
}

TwoQubitState TwoQubitState::singlet() {
  const double r = 1.0 / std::numbers::sqrt2;
  return {{Complex{0.0}, Complex{r}, Complex{-r}, Complex{0.0}}};
}

TwoQubitState TwoQubitState::plus_minus() { return {{Complex{0.0}, Complex{1.0}, Complex{0.0}, Complex{0.0}}}; }

TwoQubitState TwoQubitState::minus_plus() { return {{Complex{0.0}, Complex{0.0}, Complex{1.0}, Complex{0.0}}}; }

double TwoQubitState::norm_squared() const {
  double s = 0.0;
  for (const auto& a : amplitudes) s += std::norm(a);
  return s;
}

bool TwoQubitState::is_normalized(double tol) const { return std::abs(norm_squared() - 1.0) <= tol; }

void TwoQubitState::validate() const {
  for (const auto& a : amplitudes) {
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) throw InvalidInput("state amplitude is not finite");
  }
  if (!is_normalized()) {
    throw InvalidInput("state is not normalized: sum |c_i|^2 = " + std::to_string(norm_squared()));
  }
}

double OutcomeDistribution::total() const { return p[0] + p[1] + p[2] + p[3]; }

double OutcomeDistribution::marginal_a(Spin a) const { return (*this)(a, Spin::Up) + (*this)(a, Spin::Down); }

double OutcomeDistribution::marginal_b(Spin b) const { return (*this)(Spin::Up, b) + (*this)(Spin::Down, b); }

bool OutcomeDistribution::is_valid(double tol) const {
  for (double x : p) {
    if (!std::isfinite(x) || x < -1e-15 || x > 1.0 + tol) return false;
  }
  return std::abs(total() - 1.0) <= tol;
}

void OutcomeDistribution::validate(double tol) const {
  if (!is_valid(tol)) throw InvalidInput("outcome table is not a probability distribution");
}

namespace {

// Eigenvector of sigma . (sin t, 0, cos t) for eigenvalue s, in the z basis.
std::array<double, 2> spin_eigenvector(double theta, Spin s) {
  const double c = std::cos(theta / 2.0);
  const double sn = std::sin(theta / 2.0);
  if (s == Spin::Up) return {c, sn};
  return {-sn, c};
}

}  // namespace

OutcomeDistribution born_probabilities(const TwoQubitState& state, double alpha, double beta) {
  state.validate();
  if (!std::isfinite(alpha) || !std::isfinite(beta)) throw InvalidInput("detector angle is not finite");

  OutcomeDistribution out;
  for (std::size_t k = 0; k < 4; ++k) {
    const auto ea = spin_eigenvector(alpha, OutcomeDistribution::spin_a(k));
    const auto eb = spin_eigenvector(beta, OutcomeDistribution::spin_b(k));
    // <ea (x) eb | psi>; the eigenvectors are real.
    Complex amp{0.0};
    for (std::size_t i = 0; i < 2; ++i) {
      for (std::size_t j = 0; j < 2; ++j) amp += ea[i] * eb[j] * state.amplitudes[2 * i + j];
    }
    out.p[k] = std::norm(amp);
  }
  return out;
}

double expectation(const OutcomeDistribution& dist) {
  if (!dist.is_valid(1e-9)) throw InvalidInput("expectation of a table that is not a distribution");
  double e = 0.0;
  for (std::size_t k = 0; k < 4; ++k) {
    e += value(OutcomeDistribution::spin_a(k)) * value(OutcomeDistribution::spin_b(k)) * dist.p[k];
  }
  return e;
}

std::string to_string(ChshTerm t) {
  switch (t) {
    case ChshTerm::AB: return "ab";
    case ChshTerm::ApB: return "a'b";
    case ChshTerm::ABp: return "ab'";
    case ChshTerm::ApBp: return "a'b'";
  }
  return "?";
}

ChshSettings ChshSettings::canonical() {
  using std::numbers::pi;
  return {0.0, pi / 2.0, pi / 4.0, 3.0 * pi / 4.0, ChshTerm::ApBp};
}

double chsh_from_correlators(const std::array<double, 4>& correlators, ChshTerm minus_on) {
  double s = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    s += (static_cast<std::size_t>(minus_on) == i ? -1.0 : 1.0) * correlators[i];
  }
  return std::abs(s);
}

namespace {

std::array<double, 4> correlators_at(const CorrelationSource& source, const ChshSettings& s) {
  return {expectation(source(s.a, s.b)), expectation(source(s.a_prime, s.b)), expectation(source(s.a, s.b_prime)),
          expectation(source(s.a_prime, s.b_prime))};
}

}  // namespace

double chsh(const CorrelationSource& source, const ChshSettings& settings) {
  return chsh_from_correlators(correlators_at(source, settings), settings.minus_on);
}

ChshScan chsh_scan(const std::array<double, 4>& correlators) {
  ChshScan scan;
  scan.max = -1.0;
  for (ChshTerm t : kAllChshTerms) {
    const double s = chsh_from_correlators(correlators, t);
    scan.by_placement[static_cast<std::size_t>(t)] = s;
    if (s > scan.max) {
      scan.max = s;
      scan.best = t;
    }
  }
  return scan;
}

ChshScan chsh_scan(const CorrelationSource& source, const ChshSettings& settings) {
  return chsh_scan(correlators_at(source, settings));
}

double chsh_max(const CorrelationSource& source, const ChshSettings& settings) {
  return chsh_scan(source, settings).max;
}

namespace {

int term_alpha(ChshTerm t) { return (t == ChshTerm::ApB || t == ChshTerm::ApBp) ? 1 : 0; }
int term_beta(ChshTerm t) { return (t == ChshTerm::ABp || t == ChshTerm::ApBp) ? 1 : 0; }

void check_box_index(int i) {
  if (i != 0 && i != 1) throw InvalidInput("PR box setting index must be 0 or 1, got " + std::to_string(i));
}

}  // namespace

OutcomeDistribution PrBox::table(int alpha_index, int beta_index) const {
  check_box_index(alpha_index);
  check_box_index(beta_index);
  const bool odd = alpha_index == term_alpha(odd_term) && beta_index == term_beta(odd_term);
  const bool same_outcome = odd != correlated;
  if (same_outcome) return {{0.5, 0.0, 0.0, 0.5}};
  return {{0.0, 0.5, 0.5, 0.0}};
}

OutcomeDistribution pr_box(int alpha_index, int beta_index) { return PrBox{}.table(alpha_index, beta_index); }

std::vector<PrBox> all_pr_boxes() {
  std::vector<PrBox> boxes;
  for (bool correlated : {false, true}) {
    for (ChshTerm t : kAllChshTerms) boxes.push_back({t, correlated});
  }
  return boxes;
}

SignalingDeviation signaling_deviation_by_station(const OutcomeGrid& grid) {
  if (grid.empty() || grid.front().empty()) throw InvalidInput("signaling check needs a non-empty settings grid");
  const std::size_t cols = grid.front().size();
  for (const auto& row : grid) {
    if (row.size() != cols) throw InvalidInput("signaling check needs a complete settings grid");
    for (const auto& d : row) d.validate(1e-9);
  }

  SignalingDeviation dev;
  for (const Spin x : {Spin::Up, Spin::Down}) {
    // A's marginal for fixed alpha must not depend on beta.
    for (const auto& row : grid) {
      const auto [lo, hi] = std::minmax_element(row.begin(), row.end(), [x](const auto& l, const auto& r) {
        return l.marginal_a(x) < r.marginal_a(x);
      });
      dev.station_a = std::max(dev.station_a, hi->marginal_a(x) - lo->marginal_a(x));
    }
    // B's marginal for fixed beta must not depend on alpha.
    for (std::size_t b = 0; b < cols; ++b) {
      double lo = grid.front()[b].marginal_b(x);
      double hi = lo;
      for (const auto& row : grid) {
        lo = std::min(lo, row[b].marginal_b(x));
        hi = std::max(hi, row[b].marginal_b(x));
      }
      dev.station_b = std::max(dev.station_b, hi - lo);
    }
  }
  return dev;
}

double signaling_deviation(const OutcomeGrid& grid) { return signaling_deviation_by_station(grid).max(); }

}  // namespace bellcrbm
