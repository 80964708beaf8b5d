#pragma once

#include <span>
#include <string>
#include <vector>

#include "rird/wavelet.hpp"

namespace rird {

enum class ThresholdRule { soft, hard };
enum class ThresholdEstimator { universal, fixed };
enum class SigmaMethod { mad, provided };
enum class ThresholdScaling { per_level, single_level };

struct ThresholdPolicy {
  ThresholdRule rule = ThresholdRule::soft;
  ThresholdEstimator estimator = ThresholdEstimator::universal;
  SigmaMethod sigma_method = SigmaMethod::mad;
  ThresholdScaling scaling = ThresholdScaling::per_level;
  double fixed_value = -1.0;     // required iff estimator == fixed
  double provided_sigma = -1.0;  // required iff sigma_method == provided

  void validate() const;
};

std::string to_string(ThresholdRule r);
std::string to_string(ThresholdEstimator e);
std::string to_string(SigmaMethod m);
std::string to_string(ThresholdScaling s);

/// Robust noise scale: median(|coeffs|) / 0.6745.
double estimate_sigma(std::span<const double> coeffs);

/// Universal threshold sigma * sqrt(2 ln n), or the policy's fixed value.
double compute_threshold(double sigma, std::size_t n,
                         const ThresholdPolicy& policy);

std::vector<double> apply_threshold(std::span<const double> coeffs, double thr,
                                    ThresholdRule rule);

/// Thresholds every detail level; the approximation is passed through
/// untouched.
WaveletDecomposition denoise_details(const WaveletDecomposition& dec,
                                     const ThresholdPolicy& policy);

}  // namespace rird
