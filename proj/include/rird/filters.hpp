#pragma once

#include <span>
#include <vector>

namespace rird {

/// One second-order section, direct form II transposed, a0 normalized to 1.
struct Biquad {
  double b0, b1, b2, a1, a2;
};

using Sos = std::vector<Biquad>;

/// Butterworth designs via bilinear transform with frequency prewarping.
/// `order` is the final filter order; bandpass requires an even order and
/// yields order/2 sections.
Sos butterworth_lowpass(int order, double cutoff_hz, double sample_rate);
Sos butterworth_bandpass(int order, double lo_hz, double hi_hz,
                         double sample_rate);

std::vector<double> sosfilt(const Sos& sos, std::span<const double> x);

/// Zero-phase forward-backward filtering with odd-reflection padding and
/// steady-state initial conditions.
std::vector<double> filtfilt(const Sos& sos, std::span<const double> x);

}  // namespace rird
