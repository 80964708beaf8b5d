#include "rird/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>

#include <nlohmann/json.hpp>

#include "rird/version.hpp"

namespace rird {

using nlohmann::json;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string quoted = "\"";
  for (char c : field) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

const char* const kRecordsCsvHeader =
    "factor,seed_index,noise_seed,snr_db,arm,band_hz,dt60_exact_s,"
    "dt60_est_s,dt60_rel_err,fit_upper_db,fit_lower_db,fit_r2,status";

const char* const kTrialsCsvHeader =
    "factor,seed_index,noise_seed,snr_db,arm,dynamic_improvement_db,"
    "env_x1,env_x2,env_x3,env_transition_samples,env_nsr,epsilon_fallback,"
    "dl_mean_support,dl_columns_unmet,status";

const char* const kEdcCsvHeader = "time_s,edc_db";

const char* const kBandsCsvHeader =
    "band_hz,dt60_s,fit_upper_db,fit_lower_db,fit_r2,status";

std::string records_csv(const std::vector<ExperimentRecord>& records) {
  std::string out = kRecordsCsvHeader;
  out += '\n';
  for (const ExperimentRecord& rec : records) {
    const std::string prefix =
        format_double(rec.factor) + "," + std::to_string(rec.seed_index) +
        "," + std::to_string(rec.noise_seed) + "," +
        format_double(rec.snr_db) + ",";
    if (!rec.error.empty()) {
      out += prefix + ",,,,,,,," + csv_escape("error: " + rec.error) + "\n";
      continue;
    }
    for (const ArmRecord& arm : rec.arms) {
      for (const BandRecord& band : arm.bands) {
        out += prefix + arm.arm + "," + format_double(band.center_hz) + "," +
               format_double(band.dt60_exact_s) + "," +
               format_double(band.dt60_est_s) + "," +
               format_double(band.rel_err) + "," +
               format_double(band.fit_range.upper_db) + "," +
               format_double(band.fit_range.lower_db) + "," +
               format_double(band.fit_r2) + "," + band.status + "\n";
      }
    }
  }
  return out;
}

std::string trials_csv(const std::vector<ExperimentRecord>& records) {
  std::string out = kTrialsCsvHeader;
  out += '\n';
  for (const ExperimentRecord& rec : records) {
    const std::string prefix =
        format_double(rec.factor) + "," + std::to_string(rec.seed_index) +
        "," + std::to_string(rec.noise_seed) + "," +
        format_double(rec.snr_db) + ",";
    if (!rec.error.empty()) {
      out += prefix + ",,,,,,,,," + csv_escape("error: " + rec.error) + "\n";
      continue;
    }
    for (const ArmRecord& arm : rec.arms) {
      out += prefix + arm.arm + "," +
             format_double(arm.dynamic_improvement_db) + "," +
             format_double(arm.env_x1) + "," + format_double(arm.env_x2) +
             "," + format_double(arm.env_x3) + "," +
             format_double(arm.env_transition_samples) + "," +
             format_double(arm.env_nsr) + "," +
             (arm.epsilon_fallback ? "1" : "0") + "," +
             format_double(arm.dl_mean_support) + "," +
             std::to_string(arm.dl_columns_unmet) + ",ok\n";
    }
  }
  return out;
}

namespace {

double median(std::vector<double> values) {
  if (values.empty()) return std::nan("");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  double m = values[mid];
  if (values.size() % 2 == 0) {
    m = 0.5 * (m + *std::max_element(values.begin(), values.begin() + mid));
  }
  return m;
}

json json_number(double v) {
  return std::isnan(v) ? json() : json(v);
}

}  // namespace

json sweep_summary(const std::vector<ExperimentRecord>& records) {
  struct Cell {
    std::vector<double> errors;
    std::vector<double> improvements;
  };
  // key: (snr, factor, arm)
  std::map<std::tuple<double, double, std::string>, Cell> cells;
  std::size_t failed = 0;
  for (const ExperimentRecord& rec : records) {
    if (!rec.error.empty()) {
      ++failed;
      continue;
    }
    for (const ArmRecord& arm : rec.arms) {
      Cell& cell = cells[{rec.snr_db, rec.factor, arm.arm}];
      for (const BandRecord& band : arm.bands) {
        // Failed estimates count as unbounded error so they cannot make an
        // arm look better than one that produced a value.
        cell.errors.push_back(std::isnan(band.rel_err)
                                  ? std::numeric_limits<double>::infinity()
                                  : band.rel_err);
      }
      cell.improvements.push_back(arm.dynamic_improvement_db);
    }
  }

  json rows = json::array();
  for (const auto& [key, cell] : cells) {
    const auto& [snr, factor, arm] = key;
    json row;
    row["snr_db"] = snr;
    row["factor"] = factor;
    row["arm"] = arm;
    const double med_err = median(cell.errors);
    row["median_dt60_rel_err"] =
        std::isinf(med_err) ? json("inf") : json_number(med_err);
    row["median_dynamic_improvement_db"] = json_number(median(cell.improvements));
    rows.push_back(row);
  }

  json summary;
  summary["schema_version"] = 1;
  summary["trials"] = records.size();
  summary["failed_trials"] = failed;
  summary["cells"] = rows;
  return summary;
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot create " + path.string());
  }
  out.write(content.data(),
            static_cast<std::streamsize>(content.size()));
  if (!out) {
    throw std::runtime_error("short write to " + path.string());
  }
}

void write_sweep_outputs(const std::filesystem::path& dir,
                         const std::vector<ExperimentRecord>& records,
                         bool with_manifests, const json& manifest) {
  std::filesystem::create_directories(dir);
  write_text_file(dir / "records.csv", records_csv(records));
  write_text_file(dir / "trials.csv", trials_csv(records));
  write_text_file(dir / "summary.json", sweep_summary(records).dump(2) + "\n");
  if (with_manifests) {
    for (const char* name : {"records.csv", "trials.csv", "summary.json"}) {
      write_text_file(dir / (std::string(name) + ".manifest.json"),
                      manifest.dump(2) + "\n");
    }
  }
}

json RunManifest::to_json() const {
  json j;
  j["schema_version"] = 1;
  j["command"] = command;
  j["config"] = resolved_config;
  j["inputs"] = inputs;
  j["outputs"] = outputs;
  j["seed"] = seed;
  j["tool_version"] = tool_version;
  j["timestamp"] = timestamp;
  return j;
}

RunManifest RunManifest::make(std::string command, json config,
                              std::uint64_t seed) {
  RunManifest m;
  m.command = std::move(command);
  m.resolved_config = std::move(config);
  m.seed = seed;
  m.tool_version = kVersion;
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  m.timestamp = buf;
  return m;
}

void write_manifest(const std::filesystem::path& artifact,
                    const RunManifest& manifest) {
  write_text_file(artifact.string() + ".manifest.json",
                  manifest.to_json().dump(2) + "\n");
}

}  // namespace rird
