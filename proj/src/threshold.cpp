#include "rird/threshold.hpp"

#include <algorithm>
#include <cmath>

namespace rird {

void ThresholdPolicy::validate() const {
  if (estimator == ThresholdEstimator::fixed && !(fixed_value >= 0.0)) {
    throw std::invalid_argument(
        "threshold policy: fixed estimator requires fixed_value >= 0");
  }
  if (sigma_method == SigmaMethod::provided && !(provided_sigma >= 0.0)) {
    throw std::invalid_argument(
        "threshold policy: provided sigma requires provided_sigma >= 0");
  }
}

std::string to_string(ThresholdRule r) {
  return r == ThresholdRule::soft ? "soft" : "hard";
}
std::string to_string(ThresholdEstimator e) {
  return e == ThresholdEstimator::universal ? "universal" : "fixed";
}
std::string to_string(SigmaMethod m) {
  return m == SigmaMethod::mad ? "mad" : "provided";
}
std::string to_string(ThresholdScaling s) {
  return s == ThresholdScaling::per_level ? "per_level" : "single_level";
}

double estimate_sigma(std::span<const double> coeffs) {
  if (coeffs.empty()) {
    throw std::invalid_argument("estimate_sigma: empty coefficient sequence");
  }
  std::vector<double> mag(coeffs.size());
  std::transform(coeffs.begin(), coeffs.end(), mag.begin(),
                 [](double v) { return std::abs(v); });
  const std::size_t mid = mag.size() / 2;
  std::nth_element(mag.begin(), mag.begin() + mid, mag.end());
  double median = mag[mid];
  if (mag.size() % 2 == 0) {
    const double low = *std::max_element(mag.begin(), mag.begin() + mid);
    median = 0.5 * (low + median);
  }
  return median / 0.6745;
}

double compute_threshold(double sigma, std::size_t n,
                         const ThresholdPolicy& policy) {
  policy.validate();
  if (n < 1) {
    throw std::invalid_argument("compute_threshold: n must be >= 1");
  }
  if (policy.estimator == ThresholdEstimator::fixed) {
    return policy.fixed_value;
  }
  return sigma * std::sqrt(2.0 * std::log(static_cast<double>(n)));
}

std::vector<double> apply_threshold(std::span<const double> coeffs, double thr,
                                    ThresholdRule rule) {
  if (thr < 0.0) {
    throw std::invalid_argument("apply_threshold: threshold must be >= 0");
  }
  std::vector<double> out(coeffs.size());
  if (rule == ThresholdRule::hard) {
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
      out[i] = std::abs(coeffs[i]) > thr ? coeffs[i] : 0.0;
    }
  } else {
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
      const double mag = std::abs(coeffs[i]) - thr;
      out[i] = mag > 0.0 ? std::copysign(mag, coeffs[i]) : 0.0;
    }
  }
  return out;
}

WaveletDecomposition denoise_details(const WaveletDecomposition& dec,
                                     const ThresholdPolicy& policy) {
  policy.validate();
  WaveletDecomposition out = dec;

  double shared_sigma = 0.0;
  if (policy.scaling == ThresholdScaling::single_level && !dec.details.empty()) {
    shared_sigma = policy.sigma_method == SigmaMethod::provided
                       ? policy.provided_sigma
                       : estimate_sigma(dec.details.front());
  }

  for (std::size_t level = 0; level < dec.details.size(); ++level) {
    const auto& coeffs = dec.details[level];
    if (coeffs.empty()) continue;
    double sigma;
    if (policy.sigma_method == SigmaMethod::provided) {
      sigma = policy.provided_sigma;
    } else if (policy.scaling == ThresholdScaling::single_level) {
      sigma = shared_sigma;
    } else {
      sigma = estimate_sigma(coeffs);
    }
    const double thr = compute_threshold(sigma, coeffs.size(), policy);
    out.details[level] = apply_threshold(coeffs, thr, policy.rule);
  }
  return out;
}

}  // namespace rird
