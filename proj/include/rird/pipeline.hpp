#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include <nlohmann/json_fwd.hpp>

#include "rird/envelope.hpp"
#include "rird/signal.hpp"
#include "rird/threshold.hpp"
#include "rird/wavelet.hpp"

namespace rird {

enum class EpsilonDomain { approximation, fullrate };

std::string to_string(EpsilonDomain d);
EpsilonDomain epsilon_domain_from_string(const std::string& name);

struct PipelineConfig {
  std::string wavelet = "dmey";
  int levels = 8;
  BoundaryMode boundary = BoundaryMode::periodic;
  ThresholdPolicy threshold;
  bool threshold_enabled = true;
  int atoms = 8;
  double window_ratio = 0.5;  // d / N_{L-1}
  int dl_iterations = 20;
  bool dl_enabled = true;
  bool dl_exact_svd = false;
  EpsilonDomain epsilon_domain = EpsilonDomain::approximation;
  std::optional<EnvelopeBounds> envelope_bounds;
  std::optional<EnvelopeInit> envelope_init;
  std::uint64_t seed = 0;

  void validate() const;

  nlohmann::json to_json() const;
  static PipelineConfig from_json(const nlohmann::json& j);
  static PipelineConfig load(const std::string& path);
};

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct DenoiseReport {
  PipelineConfig config;                 // resolved configuration
  bool dl_enabled = false;               // false for the baseline arm
  std::size_t input_length = 0;
  std::size_t padded_length = 0;
  // Envelope fit on the scheduling domain (absent for the baseline arm).
  std::optional<EnvelopeModel> envelope;
  std::optional<double> transition_samples;
  std::optional<double> envelope_nsr;
  bool epsilon_fallback = false;         // constant schedule used
  std::vector<std::size_t> detail_nonzeros_before;
  std::vector<std::size_t> detail_nonzeros_after;
  int dl_iterations_run = 0;
  double dl_mean_support = 0.0;
  std::size_t dl_columns_unmet = 0;
  double dl_total_residual2 = 0.0;
  std::vector<StageTiming> timings;

  nlohmann::json to_json() const;
};

/// Full chain: DWT -> detail thresholding -> envelope fit -> error schedule
/// -> dictionary learning on the approximation -> overlap-average rebuild ->
/// inverse DWT. Output length equals input length.
std::pair<Signal, DenoiseReport> denoise(const Signal& signal,
                                         const PipelineConfig& config);

/// Same chain with the dictionary-learning stage disabled: the approximation
/// passes through untouched.
std::pair<Signal, DenoiseReport> denoise_baseline(const Signal& signal,
                                                  const PipelineConfig& config);

}  // namespace rird
