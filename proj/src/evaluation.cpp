#include "bellcrbm/evaluation.hpp"

#include <cmath>
#include <limits>

#include "bellcrbm/error.hpp"

namespace bellcrbm {

double total_variation(const OutcomeDistribution& p, const OutcomeDistribution& q) {
  double s = 0.0;
  for (std::size_t k = 0; k < 4; ++k) s += std::abs(p.p[k] - q.p[k]);
  return 0.5 * s;
}

double kl_divergence(const OutcomeDistribution& p, const OutcomeDistribution& q) {
  double kl = 0.0;
  for (std::size_t k = 0; k < 4; ++k) {
    if (p.p[k] <= 0.0) continue;
    if (q.p[k] <= 0.0) return std::numeric_limits<double>::infinity();
    kl += p.p[k] * std::log(p.p[k] / q.p[k]);
  }
  return std::max(kl, 0.0);
}

OutcomeGrid model_grid(const CrbmParams& params, const ConditioningLayout& layout, Temperature temp,
                       std::size_t state) {
  if (state >= layout.states.size()) throw InvalidInput("state index outside the layout");
  OutcomeGrid grid(layout.angles_a.size(), std::vector<OutcomeDistribution>(layout.angles_b.size()));
  for (std::size_t a = 0; a < layout.angles_a.size(); ++a) {
    for (std::size_t b = 0; b < layout.angles_b.size(); ++b) grid[a][b] = conditional_table(params, {a, b, state}, temp);
  }
  return grid;
}

ChshIndices locate_chsh_settings(const ConditioningLayout& layout, const ChshSettings& settings) {
  const int a = layout.find_angle_a(settings.a);
  const int ap = layout.find_angle_a(settings.a_prime);
  const int b = layout.find_angle_b(settings.b);
  const int bp = layout.find_angle_b(settings.b_prime);
  if (a < 0 || ap < 0 || b < 0 || bp < 0) throw InvalidInput("CHSH setting is not one of the layout's detector angles");
  return {static_cast<std::size_t>(a), static_cast<std::size_t>(ap), static_cast<std::size_t>(b),
          static_cast<std::size_t>(bp)};
}

namespace {

// Tables at the four CHSH setting pairs, in ChshTerm order.
std::array<OutcomeDistribution, 4> chsh_tables(const CrbmParams& params, const ConditioningLayout& layout,
                                               const ChshSettings& settings, Temperature temp, std::size_t state) {
  const ChshIndices ix = locate_chsh_settings(layout, settings);
  if (state >= layout.states.size()) throw InvalidInput("state index outside the layout");
  return {conditional_table(params, {ix.a, ix.b, state}, temp),
          conditional_table(params, {ix.a_prime, ix.b, state}, temp),
          conditional_table(params, {ix.a, ix.b_prime, state}, temp),
          conditional_table(params, {ix.a_prime, ix.b_prime, state}, temp)};
}

ChshScan scan_tables(const std::array<OutcomeDistribution, 4>& tables) {
  return chsh_scan({expectation(tables[0]), expectation(tables[1]), expectation(tables[2]), expectation(tables[3])});
}

bool has_signaling_grid(const ConditioningLayout& layout) {
  return layout.angles_a.size() >= 2 && layout.angles_b.size() >= 2;
}

}  // namespace

ChshScan model_chsh(const CrbmParams& params, const ConditioningLayout& layout, const ChshSettings& settings,
                    Temperature temp, std::size_t state) {
  params.check_layout(layout);
  return scan_tables(chsh_tables(params, layout, settings, temp, state));
}

PrBoxDistance nearest_pr_box(const std::array<OutcomeDistribution, 4>& tables) {
  PrBoxDistance best;
  best.max = std::numeric_limits<double>::infinity();
  for (const PrBox& box : all_pr_boxes()) {
    PrBoxDistance d;
    d.box = box;
    for (ChshTerm t : kAllChshTerms) {
      const auto i = static_cast<std::size_t>(t);
      const int alpha = (t == ChshTerm::ApB || t == ChshTerm::ApBp) ? 1 : 0;
      const int beta = (t == ChshTerm::ABp || t == ChshTerm::ApBp) ? 1 : 0;
      d.per_condition[i] = total_variation(tables[i], box.table(alpha, beta));
      d.max = std::max(d.max, d.per_condition[i]);
    }
    if (d.max < best.max) best = d;
  }
  return best;
}

PrBoxDistance model_pr_box_distance(const CrbmParams& params, const ConditioningLayout& layout,
                                    const ChshSettings& settings, Temperature temp, std::size_t state) {
  params.check_layout(layout);
  return nearest_pr_box(chsh_tables(params, layout, settings, temp, state));
}

SignalingDeviation signaling_deviation_model_by_station(const CrbmParams& params, const ConditioningLayout& layout,
                                                        Temperature temp) {
  params.check_layout(layout);
  if (!has_signaling_grid(layout)) throw InvalidInput("signaling check needs at least two settings per detector");
  SignalingDeviation worst;
  for (std::size_t s = 0; s < layout.states.size(); ++s) {
    const SignalingDeviation d = signaling_deviation_by_station(model_grid(params, layout, temp, s));
    worst.station_a = std::max(worst.station_a, d.station_a);
    worst.station_b = std::max(worst.station_b, d.station_b);
  }
  return worst;
}

double signaling_deviation_model(const CrbmParams& params, const ConditioningLayout& layout, Temperature temp) {
  return signaling_deviation_model_by_station(params, layout, temp).max();
}

EvaluationReport evaluate(const CrbmParams& params, const ConditioningLayout& layout, Temperature temp) {
  layout.validate();
  params.validate();
  params.check_layout(layout);

  EvaluationReport report;
  report.temperature = temp.value();
  report.conditions.reserve(layout.condition_count());
  for (const auto& u : layout.conditions()) {
    ConditionReport c;
    c.condition = u;
    c.target = layout.born_table(u);
    c.model = conditional_table(params, u, temp);
    c.tv = total_variation(c.target, c.model);
    c.kl = kl_divergence(c.target, c.model);
    report.mean_tv += c.tv;
    report.mean_kl += c.kl;
    report.max_tv = std::max(report.max_tv, c.tv);
    report.conditions.push_back(c);
  }
  const auto n = static_cast<double>(report.conditions.size());
  report.mean_tv /= n;
  report.mean_kl /= n;

  const ChshSettings canonical = ChshSettings::canonical();
  if (layout.find_angle_a(canonical.a) >= 0 && layout.find_angle_a(canonical.a_prime) >= 0 &&
      layout.find_angle_b(canonical.b) >= 0 && layout.find_angle_b(canonical.b_prime) >= 0) {
    report.chsh = ChshReport{canonical, 0, model_chsh(params, layout, canonical, temp, 0)};
  }
  if (has_signaling_grid(layout)) report.signaling = signaling_deviation_model_by_station(params, layout, temp);
  return report;
}

SweepResult temperature_sweep(const CrbmParams& params, const ConditioningLayout& layout,
                              const std::vector<double>& temperatures, const ChshSettings& settings,
                              std::size_t state) {
  params.check_layout(layout);
  for (std::size_t i = 0; i < temperatures.size(); ++i) {
    if (!(temperatures[i] > 0.0)) throw InvalidInput("sweep temperatures must be positive");
    if (i > 0 && !(temperatures[i] < temperatures[i - 1])) {
      throw InvalidInput("sweep temperatures must be strictly decreasing");
    }
  }
  SweepResult result;
  result.settings = settings;
  for (double t : temperatures) {
    const Temperature temp{t};
    const auto tables = chsh_tables(params, layout, settings, temp, state);
    SweepRow row;
    row.temperature = t;
    row.s_max = scan_tables(tables).max;
    row.pr_box_tv = nearest_pr_box(tables).max;
    row.signaling = has_signaling_grid(layout) ? signaling_deviation_model(params, layout, temp) : 0.0;
    result.rows.push_back(row);
  }
  return result;
}

std::vector<double> temperature_ladder(double t_start, double t_end, int steps) {
  if (!(t_end > 0.0)) throw InvalidInput("final temperature must be positive");
  if (!(t_start > t_end)) throw InvalidInput("sweep must start above its final temperature");
  if (steps < 2) throw InvalidInput("sweep needs at least two steps");
  std::vector<double> ts(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    ts[static_cast<std::size_t>(i)] = (t_start * (steps - 1 - i) + t_end * i) / (steps - 1);
  }
  ts.back() = t_end;
  return ts;
}

std::vector<WeightProfileRow> export_weight_profile(const CrbmParams& params, const ConditioningLayout& layout) {
  params.check_layout(layout);
  std::vector<WeightProfileRow> rows;
  for (const auto& [detector, group, angles] :
       {std::tuple{'A', Group::DetectorA, &layout.angles_a}, std::tuple{'B', Group::DetectorB, &layout.angles_b}}) {
    const Matrix& w = params.group_weights(group);
    for (std::size_t k = 0; k < w.rows(); ++k) {
      for (std::size_t j = 0; j < w.cols(); ++j) rows.push_back({detector, k, (*angles)[k], j, w(k, j)});
    }
  }
  return rows;
}

}  // namespace bellcrbm
