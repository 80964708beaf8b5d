#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rird/signal.hpp"

namespace rird {

/// Thrown when an energy decay curve never reaches the lower fit bound.
struct InsufficientDecay : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr double kEdcFloorDb = -300.0;

/// Backward-integrated energy decay, dB, normalized to 0 at n = 0 and floored
/// at kEdcFloorDb. Monotone nonincreasing by construction.
struct EnergyDecayCurve {
  std::vector<double> values_db;
  double sample_rate = 0.0;
};

EnergyDecayCurve schroeder_edc(const Signal& signal);

struct FitRange {
  double upper_db = -5.0;
  double lower_db = -25.0;
};

struct DecayEstimate {
  double dt60_seconds = 0.0;
  FitRange fit_range_db;
  double fit_r2 = 0.0;
};

/// Least-squares line through the EDC between the range crossings;
/// dt60 = 60 / |slope|. Throws InsufficientDecay when the curve never
/// reaches range.lower_db.
DecayEstimate estimate_dt60(const EnergyDecayCurve& edc, FitRange range = {});

/// Closed-form decay time of a mode exp(-alpha n): (3 / (alpha log10 e)) / rate.
double exact_mode_dt60(double alpha, double rate);

/// Noise-floor level difference in dB between `before` and `after`, both
/// floors taken as 20 log10(x3) of the fitted envelope. Positive means
/// improvement; capped at +-300 dB.
double dynamic_improvement(const Signal& before, const Signal& after);

struct ThirdOctaveBand {
  double center_hz;
  double lo_hz;
  double hi_hz;
};

/// Base-two third-octave edges, center * 2^(+-1/6).
std::vector<ThirdOctaveBand> third_octave_bands(std::span<const double> centers);

/// Zero-phase band-pass (Butterworth order 4 per direction).
Signal bandpass(const Signal& signal, const ThirdOctaveBand& band);

struct BandDecayEstimate {
  DecayEstimate estimate;
  bool fallback_used = false;  // range relaxed to `fallback`
  bool ok = false;             // false: both ranges failed
};

/// estimate_dt60 on the band-passed signal, retrying once with `fallback`
/// when the primary range is unreachable.
BandDecayEstimate band_dt60(const Signal& signal, const ThirdOctaveBand& band,
                            FitRange range = {},
                            FitRange fallback = {-5.0, -15.0});

}  // namespace rird
