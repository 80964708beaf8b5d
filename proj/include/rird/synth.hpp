#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "rird/acoustics.hpp"
#include "rird/pipeline.hpp"
#include "rird/signal.hpp"

namespace rird {

struct Mode {
  double amplitude = 1.0;
  double alpha = 0.0;    // decay per sample, > 0
  double freq_hz = 0.0;  // < rate / 2
};

struct ModalSpec {
  std::vector<Mode> modes;
  std::size_t length = 0;
  double rate = 0.0;

  void validate() const;

  /// Third-octave centers 25..100 Hz, decay times spread over 1.2..3.0 s,
  /// 2^17 samples at 48 kHz.
  static ModalSpec defaults();

  nlohmann::json to_json() const;
  static ModalSpec from_json(const nlohmann::json& j);
};

/// h[n] = sum_k s_k exp(-alpha_k n) sin(2 pi f_k / rate * n).
Signal gen_modal(const ModalSpec& spec);

struct NoiseShape {
  double cutoff_hz = 150.0;  // low-pass
  int order = 4;

  nlohmann::json to_json() const;
  static NoiseShape from_json(const nlohmann::json& j);
};

/// Seeded white Gaussian noise through the shaping filter (a settling
/// stretch is generated and discarded so the output is stationary).
Signal gen_shaped_noise(std::size_t length, double rate, std::uint64_t seed,
                        const NoiseShape& shape = {});

/// clean + g * noise with g set so the clean-to-scaled-noise energy ratio is
/// exactly snr_db over the full length.
Signal mix_at_snr(const Signal& clean, const Signal& noise, double snr_db);

struct SweepPlan {
  std::vector<double> snr_levels_db;        // default: 5..50, step 5
  std::vector<std::uint64_t> noise_seeds;   // default: 10 seeds
  std::vector<double> decay_factors;        // default: 0.5, 1, 1.5, 2
  ModalSpec base;
  NoiseShape noise_shape;
  std::uint64_t seed = 0;  // manifest seed; trial sub-streams derive from it

  void validate() const;
  std::size_t trial_count() const;

  static SweepPlan defaults();

  nlohmann::json to_json() const;
  static SweepPlan from_json(const nlohmann::json& j);
  static SweepPlan load(const std::string& path);
};

struct BandRecord {
  double center_hz = 0.0;
  double dt60_exact_s = 0.0;
  double dt60_est_s = 0.0;  // NaN when estimation failed
  double rel_err = 0.0;     // NaN when estimation failed
  FitRange fit_range;
  double fit_r2 = 0.0;
  std::string status;  // ok | fallback | insufficient_decay
};

struct ArmRecord {
  std::string arm;  // noisy | baseline | proposed
  std::vector<BandRecord> bands;
  double dynamic_improvement_db = 0.0;
  double env_x1 = 0.0, env_x2 = 0.0, env_x3 = 0.0;
  double env_transition_samples = 0.0;  // NaN when none
  double env_nsr = 0.0;
  bool epsilon_fallback = false;
  double dl_mean_support = 0.0;
  std::size_t dl_columns_unmet = 0;
};

struct ExperimentRecord {
  double factor = 0.0;
  std::size_t seed_index = 0;
  std::uint64_t noise_seed = 0;
  double snr_db = 0.0;
  std::vector<ArmRecord> arms;
  std::string error;  // empty on success
};

/// Runs every (factor, seed, snr) trial: modal signal with scaled decays plus
/// shaped noise, both denoising arms, per-band decay estimates against the
/// exact references, and dynamic improvement. Trials are independent and the
/// record order is (factor, seed, snr) lexicographic regardless of `threads`.
/// Individual failures land in the record's `error`, never abort the sweep.
std::vector<ExperimentRecord> run_sweep(const SweepPlan& plan,
                                        const PipelineConfig& config,
                                        int threads = 1);

}  // namespace rird
