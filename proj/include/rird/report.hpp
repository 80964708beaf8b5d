#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rird/synth.hpp"

namespace rird {

/// snprintf %.12g; keeps CSV output byte-stable across runs.
std::string format_double(double v);

/// RFC-4180 field escaping (quotes fields containing comma, quote or newline).
std::string csv_escape(const std::string& field);

extern const char* const kRecordsCsvHeader;
extern const char* const kTrialsCsvHeader;
extern const char* const kEdcCsvHeader;
extern const char* const kBandsCsvHeader;

std::string records_csv(const std::vector<ExperimentRecord>& records);
std::string trials_csv(const std::vector<ExperimentRecord>& records);

/// Median DT60 relative error and median dynamic improvement per
/// (snr, factor, arm) cell, plus per-snr-per-arm aggregates over factors.
nlohmann::json sweep_summary(const std::vector<ExperimentRecord>& records);

/// Writes records.csv, trials.csv and summary.json into `dir`.
void write_sweep_outputs(const std::filesystem::path& dir,
                         const std::vector<ExperimentRecord>& records,
                         bool with_manifests, const nlohmann::json& manifest);

/// Sidecar metadata written next to every emitted artifact.
struct RunManifest {
  std::string command;
  nlohmann::json resolved_config;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::uint64_t seed = 0;
  std::string tool_version;
  std::string timestamp;  // ISO-8601 UTC

  nlohmann::json to_json() const;
  static RunManifest make(std::string command, nlohmann::json config,
                          std::uint64_t seed);
};

/// Writes `<artifact>.manifest.json`.
void write_manifest(const std::filesystem::path& artifact,
                    const RunManifest& manifest);

void write_text_file(const std::filesystem::path& path,
                     const std::string& content);

}  // namespace rird
