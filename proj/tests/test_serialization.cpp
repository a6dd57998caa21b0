#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "bellcrbm/error.hpp"
#include "bellcrbm/presets.hpp"
#include "bellcrbm/serialization.hpp"
#include "oracles.hpp"

using namespace bellcrbm;
using nlohmann::json;

TEST_CASE("doubles survive a text round trip") {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double x = std::ldexp(rng.normal(), static_cast<int>(rng.index(200)) - 100);
    CHECK(std::stod(format_double(x)) == x);
  }
  CHECK(format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("JSON writer") {
  CHECK(dump_json(json{{"x", 0.1}}, 0) == "{\"x\":0.10000000000000001}");
  CHECK(dump_json(json{{"x", std::numeric_limits<double>::infinity()}}, 0) == "{\"x\":null}");
}

TEST_CASE("model files round-trip bit for bit") {
  const ConditioningLayout l = preset("epr-8x8-3state").layout;
  Rng rng(2);
  ModelFile m{l, oracle::random_crbm(rng, l, 8, 3.0), 99, json{{"note", "test"}}};
  std::stringstream s;
  write_model(s, m);
  const std::string first = s.str();
  const ModelFile back = read_model(s);
  CHECK(back.params == m.params);
  CHECK(back.seed == 99);
  CHECK(back.layout.angles_a == l.angles_a);
  CHECK(back.layout.state_names == l.state_names);
  for (std::size_t i = 0; i < l.states.size(); ++i) CHECK(back.layout.states[i].amplitudes == l.states[i].amplitudes);
  std::stringstream again;
  write_model(again, back);
  CHECK(again.str() == first);
}

TEST_CASE("broken model files raise I/O errors") {
  SUBCASE("not JSON") {
    std::istringstream s("{ not json");
    CHECK_THROWS_AS(read_model(s), IoError);
  }
  SUBCASE("wrong format tag") {
    std::istringstream s(R"({"format": "other", "version": 1})");
    CHECK_THROWS_AS(read_model(s), IoError);
  }
  SUBCASE("missing parameters") {
    const ConditioningLayout l = preset("epr-2x2").layout;
    std::stringstream full;
    write_model(full, ModelFile{l, CrbmParams(l, 3), 1, json::object()});
    json doc = json::parse(full.str());
    doc.erase("params");
    std::istringstream s(doc.dump());
    CHECK_THROWS_AS(read_model(s), IoError);
  }
  SUBCASE("parameters that do not fit the layout") {
    const ConditioningLayout l = preset("epr-2x2").layout;
    std::stringstream full;
    write_model(full, ModelFile{l, CrbmParams(l, 3), 1, json::object()});
    json doc = json::parse(full.str());
    doc["layout"] = layout_to_json(preset("epr-8x8").layout);
    std::istringstream s(doc.dump());
    CHECK_THROWS_AS(read_model(s), IoError);
  }
  SUBCASE("missing file") { CHECK_THROWS_AS(load_model("/nonexistent/model.json"), IoError); }
}

TEST_CASE("layouts accept named states") {
  const json j = {{"angles_a", {0.0, 1.0}}, {"angles_b", {0.5}}, {"states", {"singlet", "+-"}}};
  const ConditioningLayout l = layout_from_json(j);
  CHECK(l.states.size() == 2);
  CHECK(l.states[1].amplitudes == TwoQubitState::plus_minus().amplitudes);
  CHECK_THROWS_AS(layout_from_json(json{{"angles_a", {0.0}}, {"angles_b", {0.0}}, {"states", {"bell"}}}),
                  InvalidInput);
}

TEST_CASE("training configs") {
  TrainingConfig c = TrainingConfig::defaults_for(TrainingMode::Pcd);
  c.seed = 12345678901234ULL;
  const TrainingConfig back = config_from_json(config_to_json(c));
  CHECK(back.mode == c.mode);
  CHECK(back.learning_rate == c.learning_rate);
  CHECK(back.seed == c.seed);
  CHECK(back.n_chains == c.n_chains);
  CHECK(config_from_json(json{{"epochs", 5}}).epochs == 5);
  CHECK_THROWS_AS(config_from_json(json{{"momentum", 0.9}}), InvalidInput);
  CHECK_THROWS_AS(config_from_json(json{{"epochs", "many"}}), InvalidInput);
}

TEST_CASE("datasets round-trip") {
  const ConditioningLayout l = preset("epr-8x8-3state").layout;
  Rng rng(3);
  const Dataset d = simulate_dataset(l, 2000, rng);
  std::stringstream s;
  write_dataset(s, d, l, {"extra: header"});
  const std::string text = s.str();
  const DatasetFile back = read_dataset(s);
  CHECK(back.data.trials == d.trials);
  CHECK(back.data.seed == d.seed);
  CHECK(back.layout.condition_count() == 192);
  std::stringstream again;
  write_dataset(again, back.data, back.layout, {"extra: header"});
  CHECK(again.str() == text);
}

TEST_CASE("malformed datasets report the offending line") {
  const ConditioningLayout l = preset("epr-2x2").layout;
  Rng rng(4);
  std::stringstream s;
  write_dataset(s, simulate_dataset(l, 3, rng), l);
  std::string text = s.str();

  SUBCASE("bad outcome") {
    text += "0,0,0,+1,0\n";
    std::istringstream in(text);
    CHECK_THROWS_WITH_AS(read_dataset(in), doctest::Contains("line"), IoError);
  }
  SUBCASE("setting index out of range") {
    text += "0,5,0,+1,-1\n";
    std::istringstream in(text);
    CHECK_THROWS_AS(read_dataset(in), IoError);
  }
  SUBCASE("no header") {
    std::istringstream in("0,0,0,+1,-1\n");
    CHECK_THROWS_AS(read_dataset(in), IoError);
  }
}

TEST_CASE("delimited exports name their columns") {
  const ConditioningLayout l = preset("epr-2x2").layout;
  std::stringstream s;
  write_targets(s, l, oracle_targets(l), {"tool: test"});
  const std::string text = s.str();
  CHECK(text.rfind("# tool: test\n", 0) == 0);
  CHECK(text.find("state_idx,a_idx,b_idx,alpha_rad,beta_rad,p_pp,p_pm,p_mp,p_mm\n") != std::string::npos);

  std::stringstream h;
  write_history(h, {{1, 0.5, 0.25, 1.0}});
  CHECK(h.str() == "epoch,mean_tv,mean_kl,gradient_norm\n1,0.5,0.25,1\n");
}
