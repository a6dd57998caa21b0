#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace bellcrbm {

using Complex = std::complex<double>;

// Spin outcome of a single detector, +1 or -1.
enum class Spin : int { Up = +1, Down = -1 };

constexpr int value(Spin s) { return static_cast<int>(s); }

// Binary encoding used everywhere a spin outcome becomes a unit value:
// +1 maps to 0, -1 maps to 1.
constexpr int to_bit(Spin s) { return s == Spin::Up ? 0 : 1; }
constexpr Spin from_bit(int bit) { return bit == 0 ? Spin::Up : Spin::Down; }

Spin spin_from_int(int x);

/// Pure state of two spin-1/2 particles in the product basis
/// |++>, |+->, |-+>, |-->, where + and - refer to the z axis.
struct TwoQubitState {
  std::array<Complex, 4> amplitudes{};

  static TwoQubitState singlet();
  static TwoQubitState plus_minus();
  static TwoQubitState minus_plus();

  double norm_squared() const;
  bool is_normalized(double tol = 1e-12) const;

  // Throws InvalidInput when the amplitudes do not have unit norm.
  void validate() const;
};

/// Joint outcome probabilities P(x_A, x_B) for one pair of settings.
///
/// Entries are stored by outcome index 2*bit(x_A) + bit(x_B), i.e. in the
/// order (+,+), (+,-), (-,+), (-,-).
struct OutcomeDistribution {
  std::array<double, 4> p{};

  static constexpr std::size_t index(Spin a, Spin b) {
    return static_cast<std::size_t>(2 * to_bit(a) + to_bit(b));
  }
  static constexpr Spin spin_a(std::size_t idx) { return from_bit(static_cast<int>(idx >> 1)); }
  static constexpr Spin spin_b(std::size_t idx) { return from_bit(static_cast<int>(idx & 1)); }

  static OutcomeDistribution uniform() { return {{0.25, 0.25, 0.25, 0.25}}; }

  double operator()(Spin a, Spin b) const { return p[index(a, b)]; }
  double& operator()(Spin a, Spin b) { return p[index(a, b)]; }

  double total() const;
  double marginal_a(Spin a) const;
  double marginal_b(Spin b) const;

  // Entries in [0,1] (down to -1e-15) and summing to 1 within tol.
  bool is_valid(double tol = 1e-12) const;
  void validate(double tol = 1e-12) const;
};

/// Born-rule probabilities for measuring spin along (sin t, 0, cos t) on
/// each particle, t = alpha at station A and t = beta at station B.
OutcomeDistribution born_probabilities(const TwoQubitState& state, double alpha, double beta);

/// Correlator E = sum over outcomes of x_A * x_B * P(x_A, x_B).
double expectation(const OutcomeDistribution& dist);

// The four correlators of the CHSH sum, in the order
// E(a,b) + E(a',b) + E(a,b') + E(a',b'). The enumerator names the term
// that carries the single minus sign.
enum class ChshTerm : int { AB = 0, ApB = 1, ABp = 2, ApBp = 3 };

inline constexpr std::array<ChshTerm, 4> kAllChshTerms = {ChshTerm::AB, ChshTerm::ApB, ChshTerm::ABp,
                                                          ChshTerm::ApBp};

std::string to_string(ChshTerm t);

struct ChshSettings {
  double a = 0.0;
  double a_prime = 0.0;
  double b = 0.0;
  double b_prime = 0.0;
  ChshTerm minus_on = ChshTerm::ApBp;

  // (0, pi/2, pi/4, 3pi/4)
  static ChshSettings canonical();
};

using CorrelationSource = std::function<OutcomeDistribution(double alpha, double beta)>;

/// CHSH value from four correlators ordered as in ChshTerm.
double chsh_from_correlators(const std::array<double, 4>& correlators, ChshTerm minus_on);

/// |sum of the four correlators| with one minus sign at settings.minus_on.
double chsh(const CorrelationSource& source, const ChshSettings& settings);

struct ChshScan {
  std::array<double, 4> by_placement{};  // indexed by ChshTerm
  ChshTerm best = ChshTerm::AB;
  double max = 0.0;
};

ChshScan chsh_scan(const std::array<double, 4>& correlators);
ChshScan chsh_scan(const CorrelationSource& source, const ChshSettings& settings);

// Maximum over the four single-minus placements.
double chsh_max(const CorrelationSource& source, const ChshSettings& settings);

/// One of the eight extremal no-signaling boxes on 2x2 settings. Every
/// correlator is -1 except the one at odd_term which is +1; `correlated`
/// flips all of them.
struct PrBox {
  ChshTerm odd_term = ChshTerm::ApBp;
  bool correlated = false;

  OutcomeDistribution table(int alpha_index, int beta_index) const;
};

/// Reference PR box in the singlet-like (anticorrelated) convention:
/// anticorrelated on (0,0), (0,1), (1,0) and correlated on (1,1).
OutcomeDistribution pr_box(int alpha_index, int beta_index);

std::vector<PrBox> all_pr_boxes();

// Tables keyed by [alpha index][beta index].
using OutcomeGrid = std::vector<std::vector<OutcomeDistribution>>;

struct SignalingDeviation {
  double station_a = 0.0;  // A's marginal vs B's setting
  double station_b = 0.0;  // B's marginal vs A's setting
  double max() const { return station_a > station_b ? station_a : station_b; }
};

SignalingDeviation signaling_deviation_by_station(const OutcomeGrid& grid);

/// Largest change of one station's outcome marginal caused by switching the
/// other station's setting. Throws InvalidInput for an empty or ragged grid.
double signaling_deviation(const OutcomeGrid& grid);

}  // namespace bellcrbm
