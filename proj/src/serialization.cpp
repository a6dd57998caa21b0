#include "bellcrbm/serialization.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "bellcrbm/error.hpp"

namespace bellcrbm {

using nlohmann::json;

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

void dump_into(std::ostream& out, const json& j, int indent, int depth) {
  const std::string pad = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
  const std::string close = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
  const char* sep = indent > 0 ? ": " : ":";
  switch (j.type()) {
    case json::value_t::number_float: {
      const double x = j.get<double>();
      out << (std::isfinite(x) ? format_double(x) : "null");
      break;
    }
    case json::value_t::object: {
      if (j.empty()) {
        out << "{}";
        break;
      }
      out << '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        out << (first ? "" : ",") << pad << json(it.key()).dump() << sep;
        dump_into(out, it.value(), indent, depth + 1);
        first = false;
      }
      out << close << '}';
      break;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out << "[]";
        break;
      }
      // Arrays of scalars stay on one line.
      const bool flat = std::none_of(j.begin(), j.end(), [](const json& e) { return e.is_structured(); });
      out << '[';
      bool first = true;
      for (const auto& e : j) {
        out << (first ? "" : (flat ? ", " : ",")) << (flat ? "" : pad);
        dump_into(out, e, indent, depth + 1);
        first = false;
      }
      out << (flat ? "" : close) << ']';
      break;
    }
    default: out << j.dump();
  }
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    rows.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return rows;
}

Matrix matrix_from_json(const json& j, std::size_t cols, const char* name) {
  if (!j.is_array()) throw InvalidInput(std::string(name) + " must be an array of rows");
  Matrix m(j.size(), cols);
  for (std::size_t r = 0; r < j.size(); ++r) {
    const auto row = j[r].get<std::vector<double>>();
    if (row.size() != cols) throw DimensionMismatch(std::string(name) + " has a row of the wrong length");
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = row[c];
  }
  return m;
}

TwoQubitState named_state(const std::string& name) {
  if (name == "singlet") return TwoQubitState::singlet();
  if (name == "plus_minus" || name == "+-") return TwoQubitState::plus_minus();
  if (name == "minus_plus" || name == "-+") return TwoQubitState::minus_plus();
  throw InvalidInput("unknown state name '" + name + "'");
}

std::vector<std::string> header_lines(const std::vector<std::string>& header) {
  std::vector<std::string> out;
  for (const auto& h : header) out.push_back("# " + h);
  return out;
}

void write_header(std::ostream& out, const std::vector<std::string>& header) {
  for (const auto& line : header_lines(header)) out << line << '\n';
}

const char* spin_text(Spin s) { return s == Spin::Up ? "+1" : "-1"; }

}  // namespace

std::string dump_json(const json& j, int indent) {
  std::ostringstream out;
  dump_into(out, j, indent, 0);
  return out.str();
}

json layout_to_json(const ConditioningLayout& layout) {
  json states = json::array();
  for (std::size_t s = 0; s < layout.states.size(); ++s) {
    json amps = json::array();
    for (const auto& a : layout.states[s].amplitudes) amps.push_back({a.real(), a.imag()});
    json entry = {{"amplitudes", amps}};
    if (s < layout.state_names.size()) entry["name"] = layout.state_names[s];
    states.push_back(entry);
  }
  return {{"angles_a", layout.angles_a}, {"angles_b", layout.angles_b}, {"states", states}};
}

ConditioningLayout layout_from_json(const json& j) {
  try {
    ConditioningLayout layout;
    layout.angles_a = j.at("angles_a").get<std::vector<double>>();
    layout.angles_b = j.at("angles_b").get<std::vector<double>>();
    std::vector<std::string> names;
    for (const auto& s : j.at("states")) {
      if (s.is_string()) {
        names.push_back(s.get<std::string>());
        layout.states.push_back(named_state(names.back()));
        continue;
      }
      const auto& amps = s.at("amplitudes");
      if (amps.size() != 4) throw InvalidInput("a state needs exactly 4 amplitudes");
      TwoQubitState st;
      for (std::size_t i = 0; i < 4; ++i) st.amplitudes[i] = {amps[i].at(0).get<double>(), amps[i].at(1).get<double>()};
      layout.states.push_back(st);
      if (s.contains("name")) {
        names.push_back(s["name"].get<std::string>());
      } else {
        names.push_back("state" + std::to_string(layout.states.size() - 1));
      }
    }
    layout.state_names = names;
    layout.validate();
    return layout;
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("malformed layout: ") + e.what());
  }
}

json config_to_json(const TrainingConfig& config) {
  return {{"mode", to_string(config.mode)},
          {"learning_rate", config.learning_rate},
          {"epochs", config.epochs},
          {"batch_size", config.batch_size},
          {"gibbs_k", config.gibbs_k},
          {"n_chains", config.n_chains},
          {"seed", config.seed},
          {"init_scale", config.init_scale},
          {"target_tv", config.target_tv},
          {"condition_weights", config.condition_weights}};
}

TrainingConfig config_from_json(const json& j, TrainingConfig base) {
  if (!j.is_object()) throw InvalidInput("training config must be a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "mode") {
        base.mode = training_mode_from_string(value.get<std::string>());
      } else if (key == "learning_rate") {
        base.learning_rate = value.get<double>();
      } else if (key == "epochs") {
        base.epochs = value.get<int>();
      } else if (key == "batch_size") {
        base.batch_size = value.get<int>();
      } else if (key == "gibbs_k") {
        base.gibbs_k = value.get<int>();
      } else if (key == "n_chains") {
        base.n_chains = value.get<int>();
      } else if (key == "seed") {
        base.seed = value.get<std::uint64_t>();
      } else if (key == "init_scale") {
        base.init_scale = value.get<double>();
      } else if (key == "target_tv") {
        base.target_tv = value.get<double>();
      } else if (key == "condition_weights") {
        base.condition_weights = value.get<std::vector<double>>();
      } else {
        throw InvalidInput("unknown training config key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("malformed training config: ") + e.what());
  }
  return base;
}

json params_to_json(const CrbmParams& params) {
  return {{"hidden_units", params.hidden()},
          {"weights", matrix_to_json(params.base.weights)},
          {"visible_biases", params.base.visible_biases},
          {"hidden_biases", params.base.hidden_biases},
          {"cond_weights",
           {{"detector_a", matrix_to_json(params.group_weights(Group::DetectorA))},
            {"detector_b", matrix_to_json(params.group_weights(Group::DetectorB))},
            {"state", matrix_to_json(params.group_weights(Group::State))}}}};
}

CrbmParams params_from_json(const json& j) {
  try {
    const auto n = j.at("hidden_units").get<std::size_t>();
    CrbmParams p;
    p.base.weights = matrix_from_json(j.at("weights"), n, "weights");
    p.base.visible_biases = j.at("visible_biases").get<std::vector<double>>();
    p.base.hidden_biases = j.at("hidden_biases").get<std::vector<double>>();
    const auto& cw = j.at("cond_weights");
    p.group_weights(Group::DetectorA) = matrix_from_json(cw.at("detector_a"), n, "detector_a weights");
    p.group_weights(Group::DetectorB) = matrix_from_json(cw.at("detector_b"), n, "detector_b weights");
    p.group_weights(Group::State) = matrix_from_json(cw.at("state"), n, "state weights");
    p.validate();
    return p;
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("malformed parameters: ") + e.what());
  }
}

void write_model(std::ostream& out, const ModelFile& model) {
  const json doc = {
      {"format", "bellcrbm-model"},
      {"version", kModelFormatVersion},
      {"tool", kToolVersion},
      {"layout", layout_to_json(model.layout)},
      {"params", params_to_json(model.params)},
      {"seed_lineage",
       {{"seed", model.seed},
        {"streams", "mt19937_64; init=split(0) chains=split(1) batches=split(2) gibbs=split(3); "
                    "split(k) seeds splitmix64(seed ^ splitmix64(k + 1))"}}},
      {"provenance", model.provenance},
  };
  out << dump_json(doc) << '\n';
}

ModelFile read_model(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw IoError(std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    if (doc.at("format").get<std::string>() != "bellcrbm-model") throw IoError("not a bellcrbm model file");
    const int version = doc.at("version").get<int>();
    if (version != kModelFormatVersion) throw IoError("unsupported model format version " + std::to_string(version));
    ModelFile model;
    model.layout = layout_from_json(doc.at("layout"));
    model.params = params_from_json(doc.at("params"));
    model.params.check_layout(model.layout);
    model.seed = doc.at("seed_lineage").at("seed").get<std::uint64_t>();
    if (doc.contains("provenance")) model.provenance = doc["provenance"];
    return model;
  } catch (const json::exception& e) {
    throw IoError(std::string("model file is incomplete: ") + e.what());
  } catch (const InvalidInput& e) {
    throw IoError(std::string("model file is inconsistent: ") + e.what());
  }
}

void save_model(const std::filesystem::path& path, const ModelFile& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_model(out, model);
  if (!out) throw IoError("failed writing " + path.string());
}

ModelFile load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_model(in);
}

void write_dataset(std::ostream& out, const Dataset& data, const ConditioningLayout& layout,
                   const std::vector<std::string>& extra_header) {
  out << "# bellcrbm dataset v" << kDatasetFormatVersion << '\n';
  out << "# layout: " << dump_json(layout_to_json(layout), 0) << '\n';
  out << "# seed: " << data.seed << '\n';
  out << "# provenance: " << data.provenance << '\n';
  write_header(out, extra_header);
  out << "state_idx,a_idx,b_idx,x_a,x_b\n";
  for (const auto& t : data.trials) {
    out << t.condition.state << ',' << t.condition.a << ',' << t.condition.b << ',' << spin_text(t.x_a) << ','
        << spin_text(t.x_b) << '\n';
  }
}

DatasetFile read_dataset(std::istream& in) {
  DatasetFile file;
  bool have_layout = false;
  bool have_columns = false;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&line_no](const std::string& what) {
    return IoError("dataset line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.rfind("# layout: ", 0) == 0) {
        try {
          file.layout = layout_from_json(json::parse(line.substr(10)));
        } catch (const std::exception& e) {
          throw fail(std::string("bad layout header: ") + e.what());
        }
        have_layout = true;
      } else if (line.rfind("# seed: ", 0) == 0) {
        file.data.seed = std::stoull(line.substr(8));
      } else if (line.rfind("# provenance: ", 0) == 0) {
        file.data.provenance = line.substr(14);
      }
      continue;
    }
    if (!have_columns) {
      if (line != "state_idx,a_idx,b_idx,x_a,x_b") throw fail("unexpected column header");
      have_columns = true;
      continue;
    }
    if (!have_layout) throw fail("dataset has no layout header");
    std::istringstream row(line);
    std::string field;
    std::vector<long long> v;
    while (std::getline(row, field, ',')) {
      try {
        std::size_t used = 0;
        v.push_back(std::stoll(field, &used));
        if (used != field.size()) throw fail("trailing characters in '" + field + "'");
      } catch (const std::logic_error&) {
        throw fail("not an integer: '" + field + "'");
      }
    }
    if (v.size() != 5) throw fail("expected 5 fields");
    if (v[0] < 0 || v[1] < 0 || v[2] < 0) throw fail("negative index");
    Trial t;
    t.condition = {static_cast<std::size_t>(v[1]), static_cast<std::size_t>(v[2]), static_cast<std::size_t>(v[0])};
    if (!file.layout.contains(t.condition)) throw fail("condition outside the layout");
    try {
      t.x_a = spin_from_int(static_cast<int>(v[3]));
      t.x_b = spin_from_int(static_cast<int>(v[4]));
    } catch (const InvalidInput& e) {
      throw fail(e.what());
    }
    file.data.trials.push_back(t);
  }
  if (!have_layout || !have_columns) throw IoError("dataset is missing its header");
  return file;
}

void write_history(std::ostream& out, const TrainingHistory& history, const std::vector<std::string>& header) {
  write_header(out, header);
  out << "epoch,mean_tv,mean_kl,gradient_norm\n";
  for (const auto& r : history) {
    out << r.epoch << ',' << format_double(r.mean_tv) << ',' << format_double(r.mean_kl) << ','
        << format_double(r.gradient_norm) << '\n';
  }
}

void write_targets(std::ostream& out, const ConditioningLayout& layout, const TargetTables& tables,
                   const std::vector<std::string>& header) {
  write_header(out, header);
  out << "state_idx,a_idx,b_idx,alpha_rad,beta_rad,p_pp,p_pm,p_mp,p_mm\n";
  for (std::size_t c = 0; c < tables.size(); ++c) {
    const ConditionVector u = layout.condition_at(c);
    out << u.state << ',' << u.a << ',' << u.b << ',' << format_double(layout.angles_a[u.a]) << ','
        << format_double(layout.angles_b[u.b]);
    for (double p : tables[c].p) out << ',' << format_double(p);
    out << '\n';
  }
}

void write_condition_table(std::ostream& out, const ConditioningLayout& layout, const EvaluationReport& report,
                           const std::vector<std::string>& header) {
  write_header(out, header);
  out << "state_idx,a_idx,b_idx,alpha_rad,beta_rad,target_pp,target_pm,target_mp,target_mm,"
         "model_pp,model_pm,model_mp,model_mm,tv,kl\n";
  for (const auto& c : report.conditions) {
    const auto& u = c.condition;
    out << u.state << ',' << u.a << ',' << u.b << ',' << format_double(layout.angles_a[u.a]) << ','
        << format_double(layout.angles_b[u.b]);
    for (double p : c.target.p) out << ',' << format_double(p);
    for (double p : c.model.p) out << ',' << format_double(p);
    out << ',' << format_double(c.tv) << ',' << format_double(c.kl) << '\n';
  }
}

void write_sweep(std::ostream& out, const SweepResult& sweep, const std::vector<std::string>& header) {
  write_header(out, header);
  out << "temperature,s_max,pr_box_tv,signaling_deviation\n";
  for (const auto& r : sweep.rows) {
    out << format_double(r.temperature) << ',' << format_double(r.s_max) << ',' << format_double(r.pr_box_tv) << ','
        << format_double(r.signaling) << '\n';
  }
}

void write_weight_profile(std::ostream& out, const std::vector<WeightProfileRow>& rows,
                          const std::vector<std::string>& header) {
  write_header(out, header);
  out << "detector,setting_idx,angle_rad,hidden_unit,weight\n";
  for (const auto& r : rows) {
    out << r.detector << ',' << r.setting << ',' << format_double(r.angle) << ',' << r.hidden_unit << ','
        << format_double(r.weight) << '\n';
  }
}

json report_to_json(const EvaluationReport& report, const ConditioningLayout& layout) {
  json conditions = json::array();
  for (const auto& c : report.conditions) {
    conditions.push_back({{"state_idx", c.condition.state},
                          {"a_idx", c.condition.a},
                          {"b_idx", c.condition.b},
                          {"alpha_rad", layout.angles_a[c.condition.a]},
                          {"beta_rad", layout.angles_b[c.condition.b]},
                          {"target", c.target.p},
                          {"model", c.model.p},
                          {"tv", c.tv},
                          {"kl", c.kl}});
  }
  json doc = {{"temperature", report.temperature},
              {"description", report.description},
              {"outcome_order", {"++", "+-", "-+", "--"}},
              {"mean_tv", report.mean_tv},
              {"max_tv", report.max_tv},
              {"mean_kl", report.mean_kl},
              {"conditions", conditions}};
  if (report.chsh) {
    const auto& ch = *report.chsh;
    json placements = json::object();
    for (ChshTerm t : kAllChshTerms) placements[to_string(t)] = ch.scan.by_placement[static_cast<std::size_t>(t)];
    doc["chsh"] = {{"settings_rad", {ch.settings.a, ch.settings.a_prime, ch.settings.b, ch.settings.b_prime}},
                   {"state_idx", ch.state},
                   {"s_by_minus_sign_on", placements},
                   {"s_max", ch.scan.max},
                   {"best_minus_sign_on", to_string(ch.scan.best)}};
  }
  if (report.signaling) {
    doc["signaling"] = {{"station_a", report.signaling->station_a},
                        {"station_b", report.signaling->station_b},
                        {"max", report.signaling->max()}};
  }
  return doc;
}

}  // namespace bellcrbm
