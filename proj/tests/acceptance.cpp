// Acceptance run: one PASS/FAIL line per criterion, with the measured
// numbers and wall time. Exits non-zero if any criterion fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "bellcrbm/evaluation.hpp"
#include "bellcrbm/presets.hpp"
#include "bellcrbm/training.hpp"

using namespace bellcrbm;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

int failures = 0;

void report(int number, const std::string& name, double seconds, double budget, Verdict v) {
  const bool in_time = seconds < budget;
  const bool ok = v.pass && in_time;
  if (!ok) ++failures;
  std::printf("%s %d %s: %s; %.1fs (limit %.0fs)%s\n", ok ? "PASS" : "FAIL", number, name.c_str(), v.detail.c_str(),
              seconds, budget, in_time ? "" : ", over time");
  std::fflush(stdout);
}

template <class F>
double timed(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Trained {
  std::string label;
  ConditioningLayout layout;
  CrbmParams params;
  TrainingResult result;
};

Trained train_preset(const std::string& name, std::size_t hidden, const TrainingConfig& config,
                     const TrainingSource& source) {
  const Preset p = preset(name);
  TrainingResult r = train(p.layout, hidden, config, source);
  return {name, p.layout, r.params, std::move(r)};
}

OutcomeGrid oracle_grid(const ConditioningLayout& l, std::size_t state) {
  OutcomeGrid g(l.angles_a.size(), std::vector<OutcomeDistribution>(l.angles_b.size()));
  for (std::size_t a = 0; a < l.angles_a.size(); ++a) {
    for (std::size_t b = 0; b < l.angles_b.size(); ++b) {
      g[a][b] = born_probabilities(l.states[state], l.angles_a[a], l.angles_b[b]);
    }
  }
  return g;
}

}  // namespace

int main() {
  const double root8 = 2.0 * std::numbers::sqrt2;
  const TrainingConfig exact = TrainingConfig::defaults_for(TrainingMode::ExactKl);
  const Preset two = preset("epr-2x2");

  // 1. Oracle CHSH value on the singlet.
  {
    double s = 0.0;
    const double t = timed([&] {
      const auto source = [](double a, double b) { return born_probabilities(TwoQubitState::singlet(), a, b); };
      s = chsh_max(source, ChshSettings::canonical());
    });
    report(1, "oracle CHSH", t, 1.0,
           {std::abs(s - root8) <= 1e-10, "S_max " + fmt("%.15f", s) + ", |S - 2sqrt2| " + fmt("%.2e", std::abs(s - root8))});
  }

  // 2. Two-setting model, exact training with the default settings.
  std::optional<Trained> exact2;
  {
    const double t = timed([&] { exact2 = train_preset("epr-2x2", 3, exact, oracle_targets(two.layout)); });
    const EvaluationReport r = evaluate(exact2->params, two.layout, Temperature{});
    double worst = 0.0;
    for (const auto& c : r.conditions) {
      for (std::size_t k = 0; k < 4; ++k) worst = std::max(worst, std::abs(c.model.p[k] - c.target.p[k]));
    }
    report(2, "epr-2x2 exact fit", t, 60.0,
           {worst <= 0.01, "max |p_model - p_oracle| " + fmt("%.4f", worst) + " after " +
                               std::to_string(exact2->result.history.back().epoch) + " epochs"});
  }

  // 3. Same model through PCD on a simulated dataset.
  std::optional<Trained> pcd2;
  {
    TrainingConfig pcd = TrainingConfig::defaults_for(TrainingMode::Pcd);
    const double t = timed([&] {
      Rng data_rng = Rng(pcd.seed).split(4);
      const Dataset d = simulate_dataset(two.layout, 400000, data_rng);
      pcd2 = train_preset("epr-2x2", 3, pcd, d);
    });
    const EvaluationReport r = evaluate(pcd2->params, two.layout, Temperature{});
    double gap = 0.0;
    for (const auto& u : two.layout.conditions()) {
      gap = std::max(gap, total_variation(conditional_table(pcd2->params, u, Temperature{}),
                                          conditional_table(exact2->params, u, Temperature{})));
    }
    report(3, "epr-2x2 PCD fit", t, 300.0,
           {r.mean_tv <= 0.02 && gap <= 0.02,
            "mean TV " + fmt("%.4f", r.mean_tv) + ", max TV to exact model " + fmt("%.4f", gap) + " after " +
                std::to_string(pcd2->result.history.back().epoch) + " epochs"});
  }

  // 4. CHSH of the trained two-setting model.
  {
    double s = 0.0;
    const double t = timed([&] { s = model_chsh(exact2->params, two.layout, ChshSettings::canonical(), Temperature{}).max; });
    report(4, "trained CHSH", t, 1.0, {std::abs(s - root8) <= 0.05, "S_max " + fmt("%.4f", s)});
  }

  // 5. Eight settings, singlet only, three hidden units.
  std::optional<Trained> eight;
  {
    const Preset p = preset("epr-8x8");
    const double t = timed([&] { eight = train_preset("epr-8x8", 3, exact, oracle_targets(p.layout)); });
    const EvaluationReport r = evaluate(eight->params, p.layout, Temperature{});
    report(5, "epr-8x8 fit, 3 hidden", t, 600.0,
           {r.mean_tv <= 0.02, "mean TV " + fmt("%.4f", r.mean_tv) + ", max TV " + fmt("%.4f", r.max_tv) + " after " +
                                   std::to_string(eight->result.history.back().epoch) + " epochs"});
  }

  // 6. Eight settings, three states, eight hidden units.
  std::optional<Trained> three;
  {
    const Preset p = preset("epr-8x8-3state");
    const double t = timed([&] { three = train_preset("epr-8x8-3state", 8, exact, oracle_targets(p.layout)); });
    const EvaluationReport r = evaluate(three->params, p.layout, Temperature{});
    report(6, "epr-8x8-3state fit, 8 hidden", t, 1200.0,
           {r.mean_tv <= 0.02, "mean TV " + fmt("%.4f", r.mean_tv) + ", max TV " + fmt("%.4f", r.max_tv) + " after " +
                                   std::to_string(three->result.history.back().epoch) + " epochs"});
  }

  // 7. Cold two-setting model against the PR boxes.
  {
    double s = 0.0;
    PrBoxDistance d;
    const double t = timed([&] {
      s = model_chsh(exact2->params, two.layout, ChshSettings::canonical(), Temperature{0.2}).max;
      d = model_pr_box_distance(exact2->params, two.layout, ChshSettings::canonical(), Temperature{0.2});
    });
    report(7, "PR-box limit at T=0.2", t, 1.0,
           {s >= 3.8 && d.max <= 0.05, "S_max " + fmt("%.4f", s) + ", max TV to nearest PR box " + fmt("%.4f", d.max)});
  }

  // 8. No-signaling for every trained model and for the oracle.
  {
    std::string detail;
    bool ok = true;
    const double t = timed([&] {
      for (const Trained* m : {&*exact2, &*pcd2, &*eight, &*three}) {
        for (double temp : {1.0, 0.2}) {
          const double dev = signaling_deviation_model(m->params, m->layout, Temperature{temp});
          ok = ok && dev <= 0.02;
          detail += m->label + (m == &*pcd2 ? " pcd" : "") + " T=" + fmt("%g", temp) + " " + fmt("%.4f", dev) + ", ";
        }
      }
      double oracle_dev = 0.0;
      for (const char* name : {"epr-2x2", "epr-8x8", "epr-8x8-3state"}) {
        const ConditioningLayout l = preset(name).layout;
        for (std::size_t s = 0; s < l.states.size(); ++s) {
          oracle_dev = std::max(oracle_dev, signaling_deviation(oracle_grid(l, s)));
        }
      }
      ok = ok && oracle_dev <= 1e-12;
      detail += "oracle " + fmt("%.1e", oracle_dev);
    });
    report(8, "no-signaling", t, 1.0, {ok, detail});
  }

  // 9. Property suites.
  {
    int status = -1;
    const double t = timed([&] {
      status = std::system((std::string(PROPERTY_TESTS) + " --minimal > /dev/null 2>&1").c_str());
    });
    const bool ok = status != -1 && WIFEXITED(status) && WEXITSTATUS(status) == 0;
    report(9, "property suites", t, 600.0, {ok, ok ? "all properties held" : "property_tests reported failures"});
  }

  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
