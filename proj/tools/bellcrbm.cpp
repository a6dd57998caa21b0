// bellcrbm: command-line driver for the conditional-RBM EPR models.
//
//   bellcrbm oracle   --preset epr-2x2 --out dir
//   bellcrbm gen-data --preset epr-2x2 --n 400000 --seed 1 --out dir
//   bellcrbm train    --preset epr-2x2 [--mode pcd --data dir/dataset.csv] --out dir
//   bellcrbm eval     --model dir/model.json [--temp 0.2] --out dir
//   bellcrbm sweep    --model dir/model.json --t-start 1 --t-end 0.1 --steps 10 --out dir
//
// Exit codes: 0 ok, 1 usage, 2 I/O, 3 training hit the epoch limit before
// reaching target_tv, 4 numerical divergence.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bellcrbm/error.hpp"
#include "bellcrbm/evaluation.hpp"
#include "bellcrbm/presets.hpp"
#include "bellcrbm/serialization.hpp"
#include "bellcrbm/training.hpp"
#include "charts.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace bellcrbm;

namespace {

enum ExitCode : int { kOk = 0, kUsage = 1, kIo = 2, kNotConverged = 3, kDiverged = 4 };

struct Options {
  std::string preset;
  std::string layout_path;
  std::string config_path;
  std::optional<std::size_t> hidden;
  std::string out_dir = ".";
  bool charts = false;

  std::optional<std::string> mode;
  std::optional<double> lr;
  std::optional<int> epochs;
  std::optional<int> batch;
  std::optional<int> k;
  std::optional<int> chains;
  std::optional<std::uint64_t> seed;
  std::optional<double> init_scale;
  std::optional<double> target_tv;

  std::string data_path;
  std::optional<std::size_t> trials;
  std::string model_path;
  double temp = 1.0;
  double t_start = 1.0;
  double t_end = 0.1;
  int steps = 10;
};

json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw IoError(path + " is not valid JSON: " + e.what());
  }
}

std::ofstream open_output(const Options& opt, const std::string& name) {
  std::error_code ec;
  fs::create_directories(opt.out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + opt.out_dir + ": " + ec.message());
  const fs::path path = fs::path(opt.out_dir) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const std::string& name) {
  out.flush();
  if (!out) throw IoError("failed writing " + name);
}

struct Resolved {
  std::string preset;  // empty for an explicit layout
  ConditioningLayout layout;
  std::size_t hidden = 3;
  TrainingConfig config;
};

Resolved resolve(const Options& opt) {
  json file = json::object();
  if (!opt.config_path.empty()) {
    file = read_json_file(opt.config_path);
    if (!file.is_object()) throw InvalidInput("config file must hold a JSON object");
    for (const auto& [key, value] : file.items()) {
      if (key != "preset" && key != "layout" && key != "hidden_units" && key != "training") {
        throw InvalidInput("unknown config file key '" + key + "'");
      }
    }
  }

  Resolved r;
  std::string preset_name = opt.preset;
  if (preset_name.empty() && opt.layout_path.empty() && file.contains("preset")) {
    preset_name = file["preset"].get<std::string>();
  }
  if (!opt.layout_path.empty()) {
    r.layout = layout_from_json(read_json_file(opt.layout_path));
  } else if (preset_name.empty() && file.contains("layout")) {
    r.layout = layout_from_json(file["layout"]);
  } else {
    if (preset_name.empty()) preset_name = "epr-2x2";
    const Preset p = preset(preset_name);
    r.preset = p.name;
    r.layout = p.layout;
    r.hidden = p.hidden;
  }
  if (file.contains("hidden_units")) r.hidden = file["hidden_units"].get<std::size_t>();
  if (opt.hidden) r.hidden = *opt.hidden;
  if (r.hidden == 0) throw InvalidInput("need at least one hidden unit");
  r.layout.validate();

  const json training = file.value("training", json::object());
  std::string mode_name = to_string(TrainingMode::ExactKl);
  if (training.contains("mode")) mode_name = training["mode"].get<std::string>();
  if (opt.mode) mode_name = *opt.mode;
  r.config = config_from_json(training, TrainingConfig::defaults_for(training_mode_from_string(mode_name)));
  r.config.mode = training_mode_from_string(mode_name);
  if (opt.lr) r.config.learning_rate = *opt.lr;
  if (opt.epochs) r.config.epochs = *opt.epochs;
  if (opt.batch) r.config.batch_size = *opt.batch;
  if (opt.k) r.config.gibbs_k = *opt.k;
  if (opt.chains) r.config.n_chains = *opt.chains;
  if (opt.seed) r.config.seed = *opt.seed;
  if (opt.init_scale) r.config.init_scale = *opt.init_scale;
  if (opt.target_tv) r.config.target_tv = *opt.target_tv;
  r.config.validate(r.layout);
  return r;
}

json resolved_json(const Resolved& r) {
  json j = {{"layout", r.preset.empty() ? layout_to_json(r.layout) : json(r.preset)},
            {"hidden_units", r.hidden},
            {"training", config_to_json(r.config)}};
  return j;
}

std::vector<std::string> header(const std::string& command, const json& config, std::uint64_t seed) {
  return {std::string("tool: ") + kToolVersion, "command: " + command, "config: " + dump_json(config, 0),
          "seed: " + std::to_string(seed)};
}

void write_svg(const Options& opt, const std::string& name, const std::string& svg) {
  std::ofstream out = open_output(opt, name);
  out << svg;
  finish(out, name);
}

int cmd_oracle(const Options& opt) {
  const Resolved r = resolve(opt);
  const json cfg = {{"layout", r.preset.empty() ? layout_to_json(r.layout) : json(r.preset)}};
  std::ofstream out = open_output(opt, "targets.csv");
  write_targets(out, r.layout, oracle_targets(r.layout), header("oracle", cfg, 0));
  finish(out, "targets.csv");
  std::cout << "wrote " << r.layout.condition_count() << " target tables to "
            << (fs::path(opt.out_dir) / "targets.csv").string() << '\n';
  return kOk;
}

int cmd_gen_data(const Options& opt) {
  const Resolved r = resolve(opt);
  if (!opt.trials || *opt.trials == 0) throw InvalidInput("--n must be at least 1");
  Rng rng(r.config.seed);
  const Dataset data = simulate_dataset(r.layout, *opt.trials, rng, r.config.condition_weights);
  const json cfg = {{"layout", r.preset.empty() ? layout_to_json(r.layout) : json(r.preset)},
                    {"trials", *opt.trials},
                    {"condition_weights", r.config.condition_weights}};
  std::ofstream out = open_output(opt, "dataset.csv");
  std::vector<std::string> extra = header("gen-data", cfg, r.config.seed);
  extra.erase(extra.end() - 1);  // the dataset header already records the seed
  write_dataset(out, data, r.layout, extra);
  finish(out, "dataset.csv");
  std::cout << "wrote " << data.trials.size() << " trials to " << (fs::path(opt.out_dir) / "dataset.csv").string()
            << '\n';
  return kOk;
}

int cmd_train(const Options& opt) {
  Resolved r = resolve(opt);
  json source_info = {{"kind", "oracle tables"}};
  std::optional<Dataset> data;
  if (!opt.data_path.empty()) {
    std::ifstream in(opt.data_path, std::ios::binary);
    if (!in) throw IoError("cannot open " + opt.data_path);
    DatasetFile file = read_dataset(in);
    if (!opt.layout_path.empty() || !opt.preset.empty()) {
      if (!(layout_to_json(file.layout) == layout_to_json(r.layout))) {
        throw InvalidInput("dataset layout differs from the requested layout");
      }
    } else {
      r.layout = file.layout;
      r.preset.clear();
      r.config.validate(r.layout);
    }
    source_info = {{"kind", "dataset"}, {"trials", file.data.trials.size()}, {"data_seed", file.data.seed}};
    data = std::move(file.data);
  } else if (opt.trials) {
    if (*opt.trials == 0) throw InvalidInput("--n must be at least 1");
    Rng data_rng = Rng(r.config.seed).split(4);
    data = simulate_dataset(r.layout, *opt.trials, data_rng, r.config.condition_weights);
    source_info = {{"kind", "simulated dataset"}, {"trials", *opt.trials}, {"data_seed", data->seed}};
  }

  json cfg = resolved_json(r);
  cfg["source"] = source_info;
  const TrainingResult result =
      data ? train(r.layout, r.hidden, r.config, *data) : train(r.layout, r.hidden, r.config, oracle_targets(r.layout));

  const EpochRecord& last = result.history.back();
  ModelFile model{r.layout, result.params, r.config.seed,
                  json{{"command", "train"},
                       {"config", cfg},
                       {"converged", result.converged},
                       {"epochs_run", last.epoch},
                       {"final_mean_tv", last.mean_tv}}};
  {
    std::ofstream out = open_output(opt, "model.json");
    write_model(out, model);
    finish(out, "model.json");
  }
  {
    std::ofstream out = open_output(opt, "history.csv");
    write_history(out, result.history, header("train", cfg, r.config.seed));
    finish(out, "history.csv");
  }
  if (opt.charts) {
    const EvaluationReport report = evaluate(result.params, r.layout, Temperature{1.0});
    write_svg(opt, "conditions.svg", charts::condition_chart_svg(report, r.layout, "model vs target at T = 1"));
  }

  std::cout << "epochs: " << last.epoch << '\n'
            << "final mean TV: " << format_double(last.mean_tv) << '\n'
            << (result.converged ? "converged" : "epoch limit reached before target_tv") << '\n';
  return result.converged ? kOk : kNotConverged;
}

ModelFile load(const Options& opt) {
  if (opt.model_path.empty()) throw InvalidInput("--model is required");
  return load_model(opt.model_path);
}

int cmd_eval(const Options& opt) {
  const ModelFile model = load(opt);
  if (!(opt.temp > 0.0)) throw InvalidInput("--temp must be positive");
  EvaluationReport report = evaluate(model.params, model.layout, Temperature{opt.temp});
  report.description = "model from " + fs::path(opt.model_path).filename().string();
  const json cfg = {{"model", fs::path(opt.model_path).filename().string()}, {"temperature", opt.temp}};
  const auto head = header("eval", cfg, model.seed);

  json doc = report_to_json(report, model.layout);
  doc["header"] = head;
  {
    std::ofstream out = open_output(opt, "report.json");
    out << dump_json(doc) << '\n';
    finish(out, "report.json");
  }
  {
    std::ofstream out = open_output(opt, "conditions.csv");
    write_condition_table(out, model.layout, report, head);
    finish(out, "conditions.csv");
  }
  {
    std::ofstream out = open_output(opt, "weight_profile.csv");
    write_weight_profile(out, export_weight_profile(model.params, model.layout), head);
    finish(out, "weight_profile.csv");
  }
  if (opt.charts) {
    write_svg(opt, "conditions.svg",
              charts::condition_chart_svg(report, model.layout, "model vs target at T = " + format_double(opt.temp)));
  }

  std::cout << "temperature: " << format_double(opt.temp) << '\n'
            << "mean TV: " << format_double(report.mean_tv) << '\n'
            << "max TV: " << format_double(report.max_tv) << '\n';
  if (report.chsh) std::cout << "S_max: " << format_double(report.chsh->scan.max) << '\n';
  if (report.signaling) std::cout << "signaling deviation: " << format_double(report.signaling->max()) << '\n';
  return kOk;
}

int cmd_sweep(const Options& opt) {
  const ModelFile model = load(opt);
  const std::vector<double> temps = temperature_ladder(opt.t_start, opt.t_end, opt.steps);
  const SweepResult sweep = temperature_sweep(model.params, model.layout, temps, ChshSettings::canonical(), 0);
  const json cfg = {{"model", fs::path(opt.model_path).filename().string()},
                    {"t_start", opt.t_start},
                    {"t_end", opt.t_end},
                    {"steps", opt.steps}};
  std::ofstream out = open_output(opt, "sweep.csv");
  write_sweep(out, sweep, header("sweep", cfg, model.seed));
  finish(out, "sweep.csv");
  if (opt.charts) write_svg(opt, "sweep.svg", charts::sweep_chart_svg(sweep, "temperature sweep"));
  for (const SweepRow& row : sweep.rows) {
    std::cout << "T=" << format_double(row.temperature) << " S_max=" << format_double(row.s_max)
              << " pr_box_tv=" << format_double(row.pr_box_tv) << '\n';
  }
  return kOk;
}

void add_layout_flags(CLI::App* cmd, Options& opt) {
  cmd->add_option("--preset", opt.preset, "epr-2x2, epr-8x8 or epr-8x8-3state");
  cmd->add_option("--layout", opt.layout_path, "JSON file describing an explicit layout");
  cmd->add_option("--config", opt.config_path, "JSON config file; command-line flags win");
  cmd->add_option("--hidden", opt.hidden, "number of hidden units");
}

void add_output_flags(CLI::App* cmd, Options& opt) {
  cmd->add_option("--out", opt.out_dir, "output directory")->capture_default_str();
  cmd->add_flag("--charts", opt.charts, "also write SVG charts");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conditional RBM models of EPR correlations"};
  app.require_subcommand(1);
  Options opt;

  auto* oracle = app.add_subcommand("oracle", "write Born-rule target tables");
  add_layout_flags(oracle, opt);
  add_output_flags(oracle, opt);

  auto* gen = app.add_subcommand("gen-data", "simulate a dataset of measurement trials");
  add_layout_flags(gen, opt);
  add_output_flags(gen, opt);
  gen->add_option("--n,--trials", opt.trials, "number of trials")->required();
  gen->add_option("--seed", opt.seed, "RNG seed");

  auto* tr = app.add_subcommand("train", "train a model");
  add_layout_flags(tr, opt);
  add_output_flags(tr, opt);
  tr->add_option("--mode", opt.mode, "exact_kl, cd_k or pcd");
  tr->add_option("--lr", opt.lr, "learning rate");
  tr->add_option("--epochs", opt.epochs, "epoch limit");
  tr->add_option("--batch", opt.batch, "minibatch size (sampled modes)");
  tr->add_option("--k", opt.k, "Gibbs sweeps per negative sample");
  tr->add_option("--chains", opt.chains, "persistent chains per condition");
  tr->add_option("--seed", opt.seed, "RNG seed");
  tr->add_option("--init-scale", opt.init_scale, "standard deviation of initial weights");
  tr->add_option("--target-tv", opt.target_tv, "stop once mean TV reaches this");
  tr->add_option("--data", opt.data_path, "dataset file from gen-data");
  tr->add_option("--n,--trials", opt.trials, "simulate a dataset of this many trials");

  auto* ev = app.add_subcommand("eval", "evaluate a trained model");
  add_output_flags(ev, opt);
  ev->add_option("--model", opt.model_path, "model.json from train")->required();
  ev->add_option("--temp", opt.temp, "sampling temperature")->capture_default_str();

  auto* sw = app.add_subcommand("sweep", "CHSH and PR-box distance against temperature");
  add_output_flags(sw, opt);
  sw->add_option("--model", opt.model_path, "model.json from train")->required();
  sw->add_option("--t-start", opt.t_start, "first temperature")->capture_default_str();
  sw->add_option("--t-end", opt.t_end, "last temperature")->capture_default_str();
  sw->add_option("--steps", opt.steps, "number of temperatures")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*oracle) return cmd_oracle(opt);
    if (*gen) return cmd_gen_data(opt);
    if (*tr) return cmd_train(opt);
    if (*ev) return cmd_eval(opt);
    if (*sw) return cmd_sweep(opt);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const DivergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDiverged;
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
