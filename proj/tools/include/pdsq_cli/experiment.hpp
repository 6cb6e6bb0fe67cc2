#pragma once

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pdsq/harness.hpp"

namespace pdsq::cli {

inline constexpr int kSchemaVersion = 1;

/// Configuration problem detected before any computation. The message starts
/// with the offending field path (or the parse position).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OutputPaths {
  std::optional<std::filesystem::path> csv;
  std::optional<std::filesystem::path> jsonl;
  std::optional<std::filesystem::path> manifest;
  std::optional<std::filesystem::path> json;
};

struct GridAxis {
  std::string name;
  std::vector<double> values;
};

struct ExperimentFile {
  int schema_version = kSchemaVersion;
  TrialConfig base;
  std::vector<GridAxis> grid;  // cartesian product, first axis varies slowest
  OutputPaths output;
  LogBase log_base = LogBase::natural;
  nlohmann::json effective;  // merged document the configs were built from
};

/// Axis names accepted under "grid", in expansion order.
const std::vector<std::string>& grid_axis_names();

/// Parses JSON text; syntax errors become ConfigError with line and column.
nlohmann::json parse_document(const std::string& text, const std::string& source);
nlohmann::json load_document(const std::filesystem::path& path);

/// Rejects unknown keys and ill-typed values; every message names the field.
void check_schema(const nlohmann::json& doc);

/// Builds the experiment from a document (already merged with flag overrides).
/// Missing required fields name both the field and the flag that sets it.
ExperimentFile build_experiment(const nlohmann::json& doc);

/// One TrialConfig per grid point. An empty grid yields the base config.
std::vector<TrialConfig> expand_grid(const ExperimentFile& exp);

/// Relative output paths are resolved against PDSQ_OUTPUT_DIR when it is set.
std::filesystem::path resolve_output(const std::filesystem::path& p);

}  // namespace pdsq::cli
