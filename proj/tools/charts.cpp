#include "charts.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace bellcrbm::charts {
namespace {

constexpr const char* kOutcomeLabels[4] = {"++", "+-", "-+", "--"};
constexpr const char* kTargetColor = "#9db4d6";
constexpr const char* kModelColor = "#d9822b";

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

void open_svg(std::ostringstream& svg, double width, double height, const std::string& title) {
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\"" << num(height)
      << "\" font-family=\"sans-serif\" font-size=\"10\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << num(width / 2) << "\" y=\"18\" text-anchor=\"middle\" font-size=\"13\">" << escape(title)
      << "</text>\n";
}

void legend(std::ostringstream& svg, double x, double y, const char* a_color, const char* a_label,
            const char* b_color, const char* b_label) {
  svg << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"10\" height=\"10\" fill=\"" << a_color
      << "\"/><text x=\"" << num(x + 14) << "\" y=\"" << num(y + 9) << "\">" << a_label << "</text>\n";
  svg << "<rect x=\"" << num(x + 70) << "\" y=\"" << num(y) << "\" width=\"10\" height=\"10\" fill=\"" << b_color
      << "\"/><text x=\"" << num(x + 84) << "\" y=\"" << num(y + 9) << "\">" << b_label << "</text>\n";
}

}  // namespace

std::string condition_chart_svg(const EvaluationReport& report, const ConditioningLayout& layout,
                                const std::string& title) {
  const double bar = 5.0;
  const double group = 4 * 2 * bar + 14.0;
  const double left = 40.0, top = 40.0, plot_h = 160.0;
  const double width = left + group * static_cast<double>(report.conditions.size()) + 20.0;
  const double height = top + plot_h + 60.0;

  std::ostringstream svg;
  open_svg(svg, std::max(width, 260.0), height, title);
  legend(svg, left, 24, kTargetColor, "target", kModelColor, "model");

  for (int tick = 0; tick <= 4; ++tick) {
    const double y = top + plot_h * (1.0 - tick / 4.0);
    svg << "<line x1=\"" << num(left) << "\" x2=\"" << num(width - 10) << "\" y1=\"" << num(y) << "\" y2=\""
        << num(y) << "\" stroke=\"#ddd\"/>\n";
    svg << "<text x=\"" << num(left - 4) << "\" y=\"" << num(y + 3) << "\" text-anchor=\"end\">" << num(tick / 4.0)
        << "</text>\n";
  }

  for (std::size_t c = 0; c < report.conditions.size(); ++c) {
    const ConditionReport& cr = report.conditions[c];
    const double x0 = left + 7.0 + group * static_cast<double>(c);
    for (std::size_t k = 0; k < 4; ++k) {
      const double x = x0 + 2 * bar * static_cast<double>(k);
      const double ht = plot_h * cr.target.p[k];
      const double hm = plot_h * cr.model.p[k];
      svg << "<rect x=\"" << num(x) << "\" y=\"" << num(top + plot_h - ht) << "\" width=\"" << num(bar)
          << "\" height=\"" << num(ht) << "\" fill=\"" << kTargetColor << "\"><title>" << kOutcomeLabels[k]
          << " target " << num(cr.target.p[k]) << "</title></rect>\n";
      svg << "<rect x=\"" << num(x + bar) << "\" y=\"" << num(top + plot_h - hm) << "\" width=\"" << num(bar)
          << "\" height=\"" << num(hm) << "\" fill=\"" << kModelColor << "\"><title>" << kOutcomeLabels[k]
          << " model " << num(cr.model.p[k]) << "</title></rect>\n";
    }
    const double cx = x0 + 4 * bar;
    const double ty = top + plot_h + 12;
    svg << "<text x=\"" << num(cx) << "\" y=\"" << num(ty) << "\" text-anchor=\"middle\">"
        << num(layout.angles_a[cr.condition.a]) << "," << num(layout.angles_b[cr.condition.b]) << "</text>\n";
    if (layout.states.size() > 1) {
      svg << "<text x=\"" << num(cx) << "\" y=\"" << num(ty + 12) << "\" text-anchor=\"middle\">"
          << escape(layout.state_names[cr.condition.state]) << "</text>\n";
    }
  }
  svg << "<text x=\"" << num(left) << "\" y=\"" << num(height - 10) << "\">settings (alpha, beta) in radians; mean TV "
      << num(report.mean_tv) << " at T = " << num(report.temperature) << "</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

std::string sweep_chart_svg(const SweepResult& sweep, const std::string& title) {
  const double left = 50.0, top = 40.0, plot_w = 360.0, plot_h = 200.0;
  std::ostringstream svg;
  open_svg(svg, left + plot_w + 30, top + plot_h + 50, title);
  legend(svg, left, 24, kModelColor, "S_max / 4", kTargetColor, "PR-box TV");
  if (sweep.rows.empty()) {
    svg << "</svg>\n";
    return svg.str();
  }

  const double t_hi = sweep.rows.front().temperature;
  const double t_lo = sweep.rows.back().temperature;
  const double span = t_hi > t_lo ? t_hi - t_lo : 1.0;
  auto px = [&](double t) { return left + plot_w * (t - t_lo) / span; };
  auto py = [&](double v) { return top + plot_h * (1.0 - std::clamp(v, 0.0, 1.0)); };

  svg << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(plot_w) << "\" height=\""
      << num(plot_h) << "\" fill=\"none\" stroke=\"#999\"/>\n";
  for (auto [color, pick] : {std::pair{kModelColor, 0}, std::pair{kTargetColor, 1}}) {
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const SweepRow& r : sweep.rows) {
      const double v = pick == 0 ? r.s_max / 4.0 : r.pr_box_tv;
      svg << num(px(r.temperature)) << ',' << num(py(v)) << ' ';
    }
    svg << "\"/>\n";
  }
  svg << "<text x=\"" << num(left) << "\" y=\"" << num(top + plot_h + 14) << "\">T = " << num(t_lo) << "</text>\n";
  svg << "<text x=\"" << num(left + plot_w) << "\" y=\"" << num(top + plot_h + 14)
      << "\" text-anchor=\"end\">T = " << num(t_hi) << "</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace bellcrbm::charts
