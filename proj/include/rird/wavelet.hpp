#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rird/signal.hpp"

namespace rird {

enum class BoundaryMode { periodic, symmetric };

std::string to_string(BoundaryMode mode);
BoundaryMode boundary_mode_from_string(const std::string& name);

/// Orthogonal two-channel filter bank. Analysis high-pass is the alternating
/// flip of the low-pass, q[k] = (-1)^k g[F-1-k]; synthesis filters are the
/// time-reversed analysis filters.
struct WaveletFilterBank {
  std::string name;
  std::vector<double> analysis_low;
  std::vector<double> analysis_high;
  std::vector<double> synthesis_low;
  std::vector<double> synthesis_high;

  std::size_t length() const { return analysis_low.size(); }

  /// Builds the full bank from a scaling filter.
  static WaveletFilterBank from_scaling(std::string name,
                                        std::vector<double> scaling);

  /// One of: haar, db2..db10, dmey.
  static WaveletFilterBank named(const std::string& name);

  /// Plain text, four lines (analysis_low, analysis_high, synthesis_low,
  /// synthesis_high), space-separated decimals. Validated on load.
  static WaveletFilterBank load(const std::filesystem::path& path);

  static const std::vector<std::string>& shipped_names();

  /// Checks filter lengths, the QMF relation (1e-10 elementwise) and
  /// sum(analysis_low) = sqrt(2) (1e-8). Throws std::invalid_argument.
  void validate() const;
};

struct WaveletDecomposition {
  std::vector<std::vector<double>> details;  // d_0 .. d_{L-1}
  std::vector<double> approximation;         // a_{L-1}
  int levels = 0;
  BoundaryMode boundary = BoundaryMode::periodic;
  std::size_t original_length = 0;
  double sample_rate = 0.0;
  // Input length at each analysis level; needed to invert symmetric mode,
  // redundant (N / 2^l) in periodic mode.
  std::vector<std::size_t> level_lengths;
};

/// Largest feasible decomposition depth for a signal of the given length.
int max_levels(std::size_t length, BoundaryMode mode);

WaveletDecomposition decompose(const Signal& signal,
                               const WaveletFilterBank& bank, int levels,
                               BoundaryMode mode = BoundaryMode::periodic);

Signal reconstruct(const WaveletDecomposition& dec,
                   const WaveletFilterBank& bank);

/// Effective sampling rate of detail level l: sample_rate / 2^(l+1).
double effective_rate(const WaveletDecomposition& dec, int level);

/// Cutoff between thresholded and dictionary-processed content: fs / 2^L.
double cutoff_frequency(double sample_rate, int levels);

namespace detail {
// Single analysis/synthesis steps, exposed for tests.
void analysis_step(std::span<const double> input,
                   const WaveletFilterBank& bank, BoundaryMode mode,
                   std::vector<double>& approx, std::vector<double>& detail);
std::vector<double> synthesis_step(std::span<const double> approx,
                                   std::span<const double> detail,
                                   const WaveletFilterBank& bank,
                                   BoundaryMode mode,
                                   std::size_t output_length);
}  // namespace detail

}  // namespace rird
