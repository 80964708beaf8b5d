#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "rird/signal.hpp"

namespace rird {

/// Thrown when a model has no decay-to-floor crossing (x3 >= x1 or x3 = 0).
struct NoTransition : std::domain_error {
  using std::domain_error::domain_error;
};

/// Componentwise box bounds on (x1, x2, x3).
struct EnvelopeBounds {
  std::array<double, 3> lower{};
  std::array<double, 3> upper{};

  /// Generous scale-aware defaults: x1 in [1e-6, 1e3] * peak,
  /// x2 in [1e-7, 1] per sample, x3 in [0, peak].
  static EnvelopeBounds defaults_for(std::span<const double> samples);
};

struct EnvelopeInit {
  double x1 = 0.0, x2 = 0.0, x3 = 0.0;
};

/// Decay-plus-floor amplitude model x1 * exp(-x2 n) + x3, n in samples of the
/// sequence the model was fit on.
struct EnvelopeModel {
  double x1 = 0.0;  // initial level, linear amplitude
  double x2 = 0.0;  // decay rate per sample
  double x3 = 0.0;  // stationary floor, linear amplitude
  double fit_residual = 0.0;
  double domain_rate = 0.0;  // Hz of the fitted sequence
  bool no_decay_detected = false;
};

inline constexpr std::size_t kEnvelopeBlock = 16;

/// Blockwise RMS (block = hop = `block` samples; a ragged final block is
/// included). Values are floored at 1e-12.
std::vector<double> rms_envelope(std::span<const double> samples,
                                 std::size_t block = kEnvelopeBlock);

/// Bounded Levenberg-Marquardt fit of the decay-plus-floor model to an
/// envelope sequence sampled at `positions`, minimizing
///   sum_n [log10(env[n]^2) - log10(x1^2 exp(-2 x2 t_n) + x3^2)]^2.
/// Bounds are enforced by clamping each trial step; accepted steps never
/// increase the objective (appended to `objective_trace` when given).
EnvelopeModel fit_decay_model(std::span<const double> env,
                              std::span<const double> positions,
                              const EnvelopeBounds& bounds,
                              const EnvelopeInit& init, double domain_rate,
                              std::vector<double>* objective_trace = nullptr);

/// Data-derived starting point: head-region max level, tail-region median
/// floor, log-envelope slope between them.
EnvelopeInit default_envelope_init(std::span<const double> env,
                                   std::span<const double> positions);

/// fit_decay_model on the blockwise RMS envelope of `signal`, with positions
/// at block centers so the recovered x2 is per input sample. Default bounds
/// and initializer are derived from the data.
EnvelopeModel fit_envelope(const Signal& signal,
                           std::optional<EnvelopeBounds> bounds = {},
                           std::optional<EnvelopeInit> init = {});

/// Noise-to-signal ratio x3 / x1.
double nsr(const EnvelopeModel& model);

/// Sample index where x1 exp(-x2 n) meets x3: ln(x1/x3) / x2.
/// Throws NoTransition when x3 >= x1, x3 = 0 or x2 <= 0.
double transition_time(const EnvelopeModel& model);

struct ErrorSchedule {
  std::vector<double> values;       // in [1e-4, 1)
  std::ptrdiff_t transition_index;  // floor(T_t), or length when none
  double nsr = 0.0;
};

inline constexpr double kEpsilonFloor = 1e-4;

/// Relative tolerance at index n: kEpsilonFloor up to floor(T_t), then
/// 1 - exp(-(x2/rate)(n - floor(T_t)) c_nsr) clamped below at kEpsilonFloor.
double epsilon_at(const EnvelopeModel& model, double rate, double t_t,
                  std::ptrdiff_t n);

ErrorSchedule error_schedule(const EnvelopeModel& model, double rate,
                             std::size_t length);

/// Fallback schedule: kEpsilonFloor everywhere (no usable transition).
ErrorSchedule constant_schedule(std::size_t length);

}  // namespace rird
