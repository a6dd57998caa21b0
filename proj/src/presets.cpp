#include "bellcrbm/presets.hpp"

#include <numbers>

#include "bellcrbm/error.hpp"

namespace bellcrbm {

namespace {

using std::numbers::pi;

std::vector<double> eighths() {
  std::vector<double> angles;
  for (int k = 0; k < 8; ++k) angles.push_back(k * pi / 8.0);
  return angles;
}

}  // namespace

std::vector<std::string> preset_names() { return {"epr-2x2", "epr-8x8", "epr-8x8-3state"}; }

Preset preset(const std::string& name) {
  if (name == "epr-2x2") {
    return {name, {{0.0, pi / 2.0}, {pi / 4.0, 3.0 * pi / 4.0}, {TwoQubitState::singlet()}, {"singlet"}}, 3};
  }
  if (name == "epr-8x8") return {name, {eighths(), eighths(), {TwoQubitState::singlet()}, {"singlet"}}, 3};
  if (name == "epr-8x8-3state") {
    return {name,
            {eighths(),
             eighths(),
             {TwoQubitState::singlet(), TwoQubitState::plus_minus(), TwoQubitState::minus_plus()},
             {"singlet", "plus_minus", "minus_plus"}},
            8};
  }
  throw InvalidInput("unknown preset '" + name + "' (expected epr-2x2, epr-8x8 or epr-8x8-3state)");
}

}  // namespace bellcrbm
