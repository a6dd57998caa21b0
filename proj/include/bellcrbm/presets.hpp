#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "bellcrbm/crbm.hpp"

namespace bellcrbm {

/// The three experiment configurations: detector settings per station,
/// prepared states and hidden layer size.
///
///   epr-2x2         a, a' = 0, pi/2; b, b' = pi/4, 3pi/4; singlet; 3 hidden
///   epr-8x8         k pi/8, k = 0..7 on both detectors; singlet; 3 hidden
///   epr-8x8-3state  as epr-8x8 with singlet, |+->, |-+>; 8 hidden
struct Preset {
  std::string name;
  ConditioningLayout layout;
  std::size_t hidden = 3;
};

std::vector<std::string> preset_names();

// Throws InvalidInput for an unknown name.
Preset preset(const std::string& name);

}  // namespace bellcrbm
