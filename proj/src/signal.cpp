#include "rird/signal.hpp"

#include <cmath>

namespace rird {

void validate(const Signal& signal) {
  if (signal.samples.empty()) {
    throw std::invalid_argument("signal: empty sample buffer");
  }
  if (!(signal.sample_rate > 0.0)) {
    throw std::invalid_argument("signal: sample_rate must be positive");
  }
  for (double v : signal.samples) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("signal: non-finite sample");
    }
  }
}

double energy(std::span<const double> samples) {
  double acc = 0.0;
  for (double v : samples) acc += v * v;
  return acc;
}

double peak_abs(std::span<const double> samples) {
  double peak = 0.0;
  for (double v : samples) peak = std::max(peak, std::abs(v));
  return peak;
}

}  // namespace rird
