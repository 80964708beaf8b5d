#pragma once

#include <span>
#include <stdexcept>
#include <vector>

namespace rird {

/// A uniformly sampled real-valued time series.
struct Signal {
  std::vector<double> samples;
  double sample_rate = 0.0;  // Hz

  std::size_t size() const { return samples.size(); }
};

/// Throws std::invalid_argument if the signal is empty, has a non-positive
/// rate, or contains non-finite samples.
void validate(const Signal& signal);

double energy(std::span<const double> samples);
double peak_abs(std::span<const double> samples);

}  // namespace rird
