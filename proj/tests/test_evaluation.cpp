#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bellcrbm/error.hpp"
#include "bellcrbm/evaluation.hpp"
#include "bellcrbm/presets.hpp"
#include "oracles.hpp"

using namespace bellcrbm;
using std::numbers::pi;

TEST_CASE("distances between tables") {
  const OutcomeDistribution a{{0.1, 0.2, 0.3, 0.4}};
  CHECK(total_variation(a, a) == 0.0);
  CHECK(kl_divergence(a, a) == 0.0);
  const auto target = born_probabilities(TwoQubitState::singlet(), 0.0, pi / 4);
  CHECK(std::abs(total_variation(OutcomeDistribution::uniform(), target) - 0.35355339059327373) < 1e-15);
  CHECK(std::isinf(kl_divergence(a, OutcomeDistribution{{0.0, 0.5, 0.5, 0.0}})));
  CHECK(kl_divergence(OutcomeDistribution{{0.5, 0.5, 0.0, 0.0}}, a) > 0.0);
}

TEST_CASE("model tables are strictly positive, so KL stays finite") {
  const ConditioningLayout l = preset("epr-8x8").layout;
  Rng rng(5);
  const CrbmParams p = oracle::random_crbm(rng, l, 3, 5.0);
  for (double t : {1.0, 0.2}) {
    const EvaluationReport r = evaluate(p, l, Temperature{t});
    for (const auto& c : r.conditions) {
      for (double x : c.model.p) CHECK(x > 0.0);
      CHECK(std::isfinite(c.kl));
    }
  }
}

TEST_CASE("evaluate on the two-setting layout") {
  const ConditioningLayout l = preset("epr-2x2").layout;
  const EvaluationReport r = evaluate(CrbmParams(l, 3), l, Temperature{});
  REQUIRE(r.conditions.size() == 4);
  for (const auto& c : r.conditions) CHECK(std::abs(c.tv - 0.35355339059327373) < 1e-12);
  CHECK(r.max_tv == doctest::Approx(r.mean_tv));
  REQUIRE(r.chsh.has_value());
  for (double s : r.chsh->scan.by_placement) CHECK(std::abs(s) < 1e-15);
  REQUIRE(r.signaling.has_value());
  CHECK(r.signaling->max() == 0.0);

  CHECK_THROWS_AS(evaluate(CrbmParams(preset("epr-8x8").layout, 3), l, Temperature{}), DimensionMismatch);
}

TEST_CASE("evaluate skips CHSH when the settings are missing") {
  ConditioningLayout l;
  l.angles_a = {0.0};
  l.angles_b = {0.1};
  l.states = {TwoQubitState::singlet()};
  l.state_names = {"singlet"};
  const EvaluationReport r = evaluate(CrbmParams(l, 2), l, Temperature{});
  CHECK_FALSE(r.chsh.has_value());
  CHECK_FALSE(r.signaling.has_value());
  CHECK_THROWS_AS(signaling_deviation_model(CrbmParams(l, 2), l, Temperature{}), InvalidInput);
  CHECK_THROWS_AS(model_chsh(CrbmParams(l, 2), l, ChshSettings::canonical(), Temperature{}), InvalidInput);
}

TEST_CASE("model CHSH with a deterministic equal-outcome model") {
  // A huge positive link from both outcome units to one hidden unit with a
  // bias that makes (+,+) and (-,-) the only probable outcomes.
  const ConditioningLayout l = preset("epr-2x2").layout;
  CrbmParams p(l, 1);
  p.base.weights(0, 0) = 40.0;
  p.base.weights(1, 0) = 40.0;
  p.base.visible_biases = {-20.0, -20.0};
  p.base.hidden_biases = {-60.0};
  const ChshScan s = model_chsh(p, l, ChshSettings::canonical(), Temperature{});
  CHECK(s.max == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("nearest PR box") {
  std::array<OutcomeDistribution, 4> tables = {pr_box(0, 0), pr_box(1, 0), pr_box(0, 1), pr_box(1, 1)};
  const PrBoxDistance d = nearest_pr_box(tables);
  CHECK(d.max == 0.0);
  CHECK(d.box.odd_term == ChshTerm::ApBp);
  CHECK_FALSE(d.box.correlated);

  SUBCASE("a correlated box with the odd term elsewhere is also found") {
    const PrBox other{ChshTerm::AB, true};
    tables = {other.table(0, 0), other.table(1, 0), other.table(0, 1), other.table(1, 1)};
    const PrBoxDistance e = nearest_pr_box(tables);
    CHECK(e.max == 0.0);
    CHECK(e.box.odd_term == ChshTerm::AB);
    CHECK(e.box.correlated);
  }
  SUBCASE("uniform tables sit half way from every box") {
    tables.fill(OutcomeDistribution::uniform());
    CHECK(nearest_pr_box(tables).max == doctest::Approx(0.5));
  }
}

TEST_CASE("temperature sweep") {
  const ConditioningLayout l = preset("epr-2x2").layout;
  Rng rng(7);
  const CrbmParams p = oracle::random_crbm(rng, l, 3, 2.0);

  SUBCASE("ladder") {
    const auto ts = temperature_ladder(1.0, 0.1, 10);
    REQUIRE(ts.size() == 10);
    CHECK(ts.front() == 1.0);
    CHECK(ts.back() == 0.1);
    for (std::size_t i = 1; i < ts.size(); ++i) CHECK(ts[i] < ts[i - 1]);
    CHECK_THROWS_AS(temperature_ladder(1.0, 0.0, 10), InvalidInput);
    CHECK_THROWS_AS(temperature_ladder(0.1, 1.0, 10), InvalidInput);
    CHECK_THROWS_AS(temperature_ladder(1.0, 0.1, 1), InvalidInput);
  }
  SUBCASE("the T = 1 row matches evaluate") {
    const SweepResult s = temperature_sweep(p, l, {1.0, 0.5}, ChshSettings::canonical());
    const EvaluationReport r = evaluate(p, l, Temperature{});
    CHECK(std::abs(s.rows[0].s_max - r.chsh->scan.max) <= 1e-12);
    CHECK(std::abs(s.rows[0].signaling - r.signaling->max()) <= 1e-12);
  }
  SUBCASE("very hot models flatten out") {
    const SweepResult s = temperature_sweep(p, l, {100.0}, ChshSettings::canonical());
    CHECK(s.rows[0].s_max <= 0.2);
    for (const auto& u : l.conditions()) {
      CHECK(total_variation(conditional_table(p, u, Temperature{100.0}), OutcomeDistribution::uniform()) <= 0.05);
    }
  }
  SUBCASE("temperatures must decrease and stay positive") {
    CHECK_THROWS_AS(temperature_sweep(p, l, {0.5, 1.0}, ChshSettings::canonical()), InvalidInput);
    CHECK_THROWS_AS(temperature_sweep(p, l, {1.0, 0.0}, ChshSettings::canonical()), InvalidInput);
  }
}

TEST_CASE("model signaling deviation") {
  const ConditioningLayout l = preset("epr-2x2").layout;
  SUBCASE("symmetric conditioning cannot signal") {
    CrbmParams p(l, 2);
    p.base.weights(0, 0) = 1.0;
    p.base.weights(1, 1) = -1.0;
    CHECK(signaling_deviation_model(p, l, Temperature{}) < 1e-15);
  }
  SUBCASE("a hidden unit driven by B's setting and wired to A's outcome signals") {
    CrbmParams p(l, 1);
    p.base.weights(0, 0) = 3.0;
    p.group_weights(Group::DetectorB)(1, 0) = 2.0;
    const auto dev = signaling_deviation_model_by_station(p, l, Temperature{});
    // P(A outcome bit 1) = (1 + e^(3+d)) / (2 + e^(3+d) + e^d) with d = 0 or 2.
    CHECK(std::abs(dev.station_a - 0.033472489068422706) < 1e-14);
    CHECK(dev.station_b < 1e-15);
  }
}

TEST_CASE("weight profile export") {
  const ConditioningLayout l = preset("epr-8x8").layout;
  SUBCASE("48 rows for three hidden units and eight settings per detector") {
    const auto rows = export_weight_profile(CrbmParams(l, 3), l);
    CHECK(rows.size() == 48);
    for (const auto& r : rows) CHECK(r.weight == 0.0);
  }
  SUBCASE("values are the conditioning weights") {
    Rng rng(17);
    const CrbmParams p = oracle::random_crbm(rng, l, 3, 1.0);
    for (const auto& r : export_weight_profile(p, l)) {
      const Group g = r.detector == 'A' ? Group::DetectorA : Group::DetectorB;
      CHECK(r.weight == p.group_weights(g)(r.setting, r.hidden_unit));
      CHECK(r.angle == (r.detector == 'A' ? l.angles_a : l.angles_b)[r.setting]);
    }
  }
}
