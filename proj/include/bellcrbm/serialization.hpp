#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "bellcrbm/crbm.hpp"
#include "bellcrbm/evaluation.hpp"
#include "bellcrbm/training.hpp"

namespace bellcrbm {

inline constexpr const char* kToolVersion = "bellcrbm 1.0.0";
inline constexpr int kModelFormatVersion = 1;
inline constexpr int kDatasetFormatVersion = 1;

// 17 significant digits ("%.17g"); parses back to the same double.
std::string format_double(double x);

/// JSON text with every floating-point number written to 17 significant
/// digits. Non-finite numbers become null.
std::string dump_json(const nlohmann::json& j, int indent = 2);

nlohmann::json layout_to_json(const ConditioningLayout& layout);
ConditioningLayout layout_from_json(const nlohmann::json& j);

nlohmann::json config_to_json(const TrainingConfig& config);
// Overlays the keys present in j onto base; unknown keys are rejected.
TrainingConfig config_from_json(const nlohmann::json& j, TrainingConfig base = {});

nlohmann::json params_to_json(const CrbmParams& params);
CrbmParams params_from_json(const nlohmann::json& j);

/// Everything needed to rebuild a trained model.
struct ModelFile {
  ConditioningLayout layout;
  CrbmParams params;
  std::uint64_t seed = 0;
  nlohmann::json provenance = nlohmann::json::object();  // free-form
};

void write_model(std::ostream& out, const ModelFile& model);
ModelFile read_model(std::istream& in);
void save_model(const std::filesystem::path& path, const ModelFile& model);
ModelFile load_model(const std::filesystem::path& path);

// Delimited text, one trial per line: state_idx,a_idx,b_idx,x_a,x_b with
// outcomes written as +1/-1, after '#' header lines and a column header.
void write_dataset(std::ostream& out, const Dataset& data, const ConditioningLayout& layout,
                   const std::vector<std::string>& extra_header = {});
struct DatasetFile {
  ConditioningLayout layout;
  Dataset data;
};
DatasetFile read_dataset(std::istream& in);

void write_history(std::ostream& out, const TrainingHistory& history, const std::vector<std::string>& header = {});
void write_targets(std::ostream& out, const ConditioningLayout& layout, const TargetTables& tables,
                   const std::vector<std::string>& header = {});
void write_condition_table(std::ostream& out, const ConditioningLayout& layout, const EvaluationReport& report,
                           const std::vector<std::string>& header = {});
void write_sweep(std::ostream& out, const SweepResult& sweep, const std::vector<std::string>& header = {});
void write_weight_profile(std::ostream& out, const std::vector<WeightProfileRow>& rows,
                          const std::vector<std::string>& header = {});

nlohmann::json report_to_json(const EvaluationReport& report, const ConditioningLayout& layout);

}  // namespace bellcrbm
