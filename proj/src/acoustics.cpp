#include "rird/acoustics.hpp"

#include <algorithm>
#include <cmath>

#include "rird/envelope.hpp"
#include "rird/wavelet.hpp"
#include "rird/filters.hpp"

namespace rird {

EnergyDecayCurve schroeder_edc(const Signal& signal) {
  validate(signal);
  const std::size_t n = signal.size();
  // Reverse cumulative sum in extended precision; keeps the curve exactly
  // monotone even for long low-level tails.
  std::vector<long double> tail(n);
  long double acc = 0.0L;
  for (std::size_t i = n; i-- > 0;) {
    const long double v = signal.samples[i];
    acc += v * v;
    tail[i] = acc;
  }
  if (!(acc > 0.0L)) {
    throw std::invalid_argument("schroeder_edc: signal has no energy");
  }
  EnergyDecayCurve edc;
  edc.sample_rate = signal.sample_rate;
  edc.values_db.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double ratio = static_cast<double>(tail[i] / acc);
    edc.values_db[i] =
        ratio > 0.0
            ? std::max(10.0 * std::log10(ratio), kEdcFloorDb)
            : kEdcFloorDb;
  }
  edc.values_db[0] = 0.0;
  return edc;
}

DecayEstimate estimate_dt60(const EnergyDecayCurve& edc, FitRange range) {
  if (!(range.upper_db > range.lower_db) || range.upper_db > 0.0) {
    throw std::invalid_argument(
        "estimate_dt60: need lower < upper <= 0 in dB");
  }
  if (!(edc.sample_rate > 0.0) || edc.values_db.empty()) {
    throw std::invalid_argument("estimate_dt60: empty decay curve");
  }
  const auto& y = edc.values_db;
  std::size_t i_upper = y.size(), i_lower = y.size();
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (i_upper == y.size() && y[i] <= range.upper_db) i_upper = i;
    if (y[i] <= range.lower_db) {
      i_lower = i;
      break;
    }
  }
  if (i_lower == y.size()) {
    throw InsufficientDecay("estimate_dt60: curve never reaches " +
                            std::to_string(range.lower_db) + " dB");
  }
  if (i_lower <= i_upper + 1) {
    throw InsufficientDecay("estimate_dt60: fewer than two samples between "
                            "the fit bounds");
  }

  // Least-squares line over the crossing-to-crossing region, time in seconds.
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double count = static_cast<double>(i_lower - i_upper + 1);
  for (std::size_t i = i_upper; i <= i_lower; ++i) {
    const double t = static_cast<double>(i) / edc.sample_rate;
    sx += t;
    sy += y[i];
    sxx += t * t;
    sxy += t * y[i];
  }
  const double denom = count * sxx - sx * sx;
  const double slope = (count * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / count;
  if (!(slope < 0.0)) {
    throw InsufficientDecay("estimate_dt60: non-decaying fit region");
  }

  double ss_res = 0.0, ss_tot = 0.0;
  const double mean = sy / count;
  for (std::size_t i = i_upper; i <= i_lower; ++i) {
    const double t = static_cast<double>(i) / edc.sample_rate;
    const double e = y[i] - (intercept + slope * t);
    ss_res += e * e;
    ss_tot += (y[i] - mean) * (y[i] - mean);
  }

  DecayEstimate est;
  est.dt60_seconds = 60.0 / -slope;
  est.fit_range_db = range;
  est.fit_r2 = ss_tot > 0.0 ? std::max(0.0, 1.0 - ss_res / ss_tot) : 1.0;
  return est;
}

double exact_mode_dt60(double alpha, double rate) {
  if (!(alpha > 0.0)) {
    throw std::invalid_argument("exact_mode_dt60: alpha must be positive");
  }
  if (!(rate > 0.0)) {
    throw std::invalid_argument("exact_mode_dt60: rate must be positive");
  }
  return 3.0 / (alpha * std::log10(std::exp(1.0))) / rate;
}

double dynamic_improvement(const Signal& before, const Signal& after) {
  if (before.size() != after.size() ||
      before.sample_rate != after.sample_rate) {
    throw std::invalid_argument(
        "dynamic_improvement: signals must share length and rate");
  }
  // Floor definition matches the denoising pipeline: fit the decay model on
  // the approximation sequence (dmey, L = 8 where the length allows) and
  // read the floor from x3. Raw-rate RMS blocks oscillate with low-frequency
  // content and make the floor unidentifiable.
  const auto floor_db = [](const Signal& s) {
    int levels = 8;
    while (levels > 0 &&
           (s.size() >> levels) < kEnvelopeBlock * 4) {
      --levels;
    }
    Signal domain = s;
    if (levels > 0) {
      const std::size_t unit = std::size_t{1} << levels;
      const std::size_t padded = (s.size() + unit - 1) / unit * unit;
      Signal tmp = s;
      tmp.samples.resize(padded, 0.0);
      const WaveletDecomposition dec =
          decompose(tmp, WaveletFilterBank::named("dmey"), levels,
                    BoundaryMode::periodic);
      domain.samples = dec.approximation;
      domain.sample_rate = s.sample_rate / static_cast<double>(unit);
    }
    const EnvelopeModel model = fit_envelope(domain);
    return 20.0 * std::log10(std::max(model.x3, 1e-15));
  };
  const double gain = floor_db(before) - floor_db(after);
  return std::clamp(gain, -300.0, 300.0);
}

std::vector<ThirdOctaveBand> third_octave_bands(
    std::span<const double> centers) {
  const double half = std::pow(2.0, 1.0 / 6.0);
  std::vector<ThirdOctaveBand> bands;
  bands.reserve(centers.size());
  for (double c : centers) {
    bands.push_back({c, c / half, c * half});
  }
  return bands;
}

Signal bandpass(const Signal& signal, const ThirdOctaveBand& band) {
  const Sos sos =
      butterworth_bandpass(4, band.lo_hz, band.hi_hz, signal.sample_rate);
  return Signal{filtfilt(sos, signal.samples), signal.sample_rate};
}

BandDecayEstimate band_dt60(const Signal& signal, const ThirdOctaveBand& band,
                            FitRange range, FitRange fallback) {
  BandDecayEstimate out;
  Signal filtered = bandpass(signal, band);
  EnergyDecayCurve edc;
  try {
    edc = schroeder_edc(filtered);
  } catch (const std::invalid_argument&) {
    return out;  // nothing in the band
  }
  try {
    out.estimate = estimate_dt60(edc, range);
    out.ok = true;
    return out;
  } catch (const InsufficientDecay&) {
  }
  try {
    out.estimate = estimate_dt60(edc, fallback);
    out.ok = true;
    out.fallback_used = true;
  } catch (const InsufficientDecay&) {
  }
  return out;
}

}  // namespace rird
