#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "biaslab/types.hpp"

namespace biaslab {

inline constexpr const char* kLibraryVersion = "0.1.0";

enum class ExperimentKind {
  SparseRegressionSweep,
  AlphaThresholdVsN,
  DepthPotentials,
  ExplicitVsImplicit,
  WidthPhaseDiagram,
  LogisticMarginPath,
  OptimizerOracleTable,
};

const char* to_string(ExperimentKind kind);

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::DepthPotentials;
  std::filesystem::path output_dir;
  nlohmann::json params;

  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig from_file(const std::filesystem::path& path);
};

/// Pure validation; every violation is reported, none throws.
std::vector<std::string> validate(const nlohmann::json& config_json);

struct RunOptions {
  int workers = 1;
  /// Optional override of params.seeds with a single seed.
  std::optional<std::uint64_t> seed_override;
  /// Optional override of the config's output_dir.
  std::optional<std::filesystem::path> out_override;
};

struct RunManifest {
  nlohmann::json config_echo;
  std::string library_version;
  double wall_time_seconds = 0.0;
  std::vector<std::pair<std::string, std::string>> cell_status;
  std::vector<std::pair<std::string, std::string>> file_checksums;
  std::filesystem::path output_dir;

  nlohmann::json to_json() const;
};

/// Executes the configured experiment: cells run on a bounded worker pool
/// (deterministically keyed RNG, results ordered by cell coordinates, never
/// by schedule), CSVs and manifest.json are staged in a temp dir and renamed
/// into place atomically. Per-cell numerical failures are recorded in the
/// manifest and the run continues; validation failures throw ValidationError
/// listing every violation.
RunManifest run(const ExperimentConfig& config, const RunOptions& options = {});

/// Renders the experiment CSVs in `csv_dir` into deterministic SVGs
/// (line plots; a heatmap for the width phase diagram). Returns the files
/// written. Unknown CSVs are ignored; a malformed known CSV is an error.
std::vector<std::filesystem::path> render(const std::filesystem::path& csv_dir);

}  // namespace biaslab
