#pragma once

#include <string>

#include "bellcrbm/crbm.hpp"
#include "bellcrbm/evaluation.hpp"

namespace bellcrbm::charts {

// Grouped bars, one group per condition: target and model probability for
// each of the four outcomes. Returns a standalone SVG document.
std::string condition_chart_svg(const EvaluationReport& report, const ConditioningLayout& layout,
                                const std::string& title);

// S_max and nearest-PR-box distance against temperature.
std::string sweep_chart_svg(const SweepResult& sweep, const std::string& title);

}  // namespace bellcrbm::charts
