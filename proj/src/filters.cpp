#include "rird/filters.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace rird {
namespace {

using cd = std::complex<double>;

// Left-half-plane Butterworth prototype poles, cutoff 1 rad/s.
std::vector<cd> prototype_poles(int order) {
  std::vector<cd> poles;
  poles.reserve(order);
  for (int k = 0; k < order; ++k) {
    const double theta = M_PI * (2.0 * k + order + 1.0) / (2.0 * order);
    poles.emplace_back(std::cos(theta), std::sin(theta));
  }
  return poles;
}

cd bilinear(cd s, double fs2) { return (fs2 + s) / (fs2 - s); }

double prewarp(double freq_hz, double sample_rate) {
  return 2.0 * sample_rate * std::tan(M_PI * freq_hz / sample_rate);
}

// Pairs complex-conjugate (or two real) poles into denominator coefficients.
std::vector<std::pair<double, double>> pair_poles(std::vector<cd> poles) {
  std::vector<std::pair<double, double>> sections;
  std::vector<bool> used(poles.size(), false);
  for (std::size_t i = 0; i < poles.size(); ++i) {
    if (used[i]) continue;
    used[i] = true;
    const cd p = poles[i];
    if (std::abs(p.imag()) > 1e-12) {
      // find the conjugate partner
      std::size_t match = poles.size();
      double best = 1e300;
      for (std::size_t j = i + 1; j < poles.size(); ++j) {
        if (used[j]) continue;
        const double dist = std::abs(poles[j] - std::conj(p));
        if (dist < best) {
          best = dist;
          match = j;
        }
      }
      if (match == poles.size()) {
        throw std::runtime_error("filter design: unpaired complex pole");
      }
      used[match] = true;
      sections.emplace_back(-2.0 * p.real(), std::norm(p));
    } else {
      // pair with the next real pole
      std::size_t match = poles.size();
      for (std::size_t j = i + 1; j < poles.size(); ++j) {
        if (!used[j] && std::abs(poles[j].imag()) <= 1e-12) {
          match = j;
          break;
        }
      }
      if (match == poles.size()) {
        throw std::runtime_error("filter design: odd real pole count");
      }
      used[match] = true;
      const double pr = p.real(), qr = poles[match].real();
      sections.emplace_back(-(pr + qr), pr * qr);
    }
  }
  return sections;
}

}  // namespace

Sos butterworth_lowpass(int order, double cutoff_hz, double sample_rate) {
  if (order < 2 || order % 2 != 0) {
    throw std::invalid_argument("butterworth_lowpass: order must be even >= 2");
  }
  if (!(cutoff_hz > 0.0) || !(cutoff_hz < sample_rate / 2.0)) {
    throw std::invalid_argument(
        "butterworth_lowpass: cutoff must lie in (0, rate/2)");
  }
  const double fs2 = 2.0 * sample_rate;
  const double wc = prewarp(cutoff_hz, sample_rate);

  std::vector<cd> analog = prototype_poles(order);
  cd gain_den(1.0, 0.0);
  std::vector<cd> digital;
  for (cd& p : analog) {
    p *= wc;
    gain_den *= (fs2 - p);
    digital.push_back(bilinear(p, fs2));
  }
  const double k = (std::pow(wc, order) * cd(1.0, 0.0) / gain_den).real();

  const int nsec = order / 2;
  const double gsec = std::pow(std::abs(k), 1.0 / nsec);
  Sos sos;
  for (const auto& [a1, a2] : pair_poles(std::move(digital))) {
    sos.push_back({gsec, 2.0 * gsec, gsec, a1, a2});
  }
  if (k < 0.0) {
    sos.front().b0 = -sos.front().b0;
    sos.front().b1 = -sos.front().b1;
    sos.front().b2 = -sos.front().b2;
  }
  return sos;
}

Sos butterworth_bandpass(int order, double lo_hz, double hi_hz,
                         double sample_rate) {
  if (order < 2 || order % 2 != 0) {
    throw std::invalid_argument("butterworth_bandpass: order must be even >= 2");
  }
  if (!(lo_hz > 0.0) || !(hi_hz > lo_hz) || !(hi_hz < sample_rate / 2.0)) {
    throw std::invalid_argument(
        "butterworth_bandpass: need 0 < lo < hi < rate/2");
  }
  const double fs2 = 2.0 * sample_rate;
  const double wlo = prewarp(lo_hz, sample_rate);
  const double whi = prewarp(hi_hz, sample_rate);
  const double bw = whi - wlo;
  const double w02 = wlo * whi;

  const int n_proto = order / 2;
  std::vector<cd> analog;
  for (cd p : prototype_poles(n_proto)) {
    const cd a = p * (bw / 2.0);
    const cd root = std::sqrt(a * a - w02);
    analog.push_back(a + root);
    analog.push_back(a - root);
  }
  cd gain_den(1.0, 0.0);
  std::vector<cd> digital;
  for (cd p : analog) {
    gain_den *= (fs2 - p);
    digital.push_back(bilinear(p, fs2));
  }
  // N analog zeros at s = 0 map to z = +1; the remaining N zeros to z = -1.
  const double k =
      (std::pow(bw * fs2, n_proto) * cd(1.0, 0.0) / gain_den).real();

  const double gsec = std::pow(std::abs(k), 1.0 / n_proto);
  Sos sos;
  for (const auto& [a1, a2] : pair_poles(std::move(digital))) {
    sos.push_back({gsec, 0.0, -gsec, a1, a2});
  }
  if (k < 0.0) {
    sos.front().b0 = -sos.front().b0;
    sos.front().b2 = -sos.front().b2;
  }
  return sos;
}

std::vector<double> sosfilt(const Sos& sos, std::span<const double> x) {
  std::vector<double> y(x.begin(), x.end());
  for (const Biquad& s : sos) {
    double s1 = 0.0, s2 = 0.0;
    for (double& v : y) {
      const double out = s.b0 * v + s1;
      s1 = s.b1 * v - s.a1 * out + s2;
      s2 = s.b2 * v - s.a2 * out;
      v = out;
    }
  }
  return y;
}

namespace {

// Steady-state section states for unit constant input (scaled by the actual
// head sample before use), transposed direct form II.
struct SectionState {
  double s1, s2, steady_gain;
};

std::vector<SectionState> steady_states(const Sos& sos) {
  std::vector<SectionState> states;
  double input_scale = 1.0;
  for (const Biquad& s : sos) {
    const double h = (s.b0 + s.b1 + s.b2) / (1.0 + s.a1 + s.a2);
    const double z2 = (s.b2 - s.a2 * h) * input_scale;
    const double z1 = (s.b1 - s.a1 * h) * input_scale + z2;
    states.push_back({z1, z2, h});
    input_scale *= h;
  }
  return states;
}

void sosfilt_zi_inplace(const Sos& sos, std::vector<double>& y, double x0) {
  const std::vector<SectionState> init = steady_states(sos);
  for (std::size_t i = 0; i < sos.size(); ++i) {
    const Biquad& s = sos[i];
    double s1 = init[i].s1 * x0;
    double s2 = init[i].s2 * x0;
    for (double& v : y) {
      const double out = s.b0 * v + s1;
      s1 = s.b1 * v - s.a1 * out + s2;
      s2 = s.b2 * v - s.a2 * out;
      v = out;
    }
  }
}

}  // namespace

std::vector<double> filtfilt(const Sos& sos, std::span<const double> x) {
  if (x.size() < 2) {
    return std::vector<double>(x.begin(), x.end());
  }
  const std::size_t n = x.size();
  std::size_t padlen = 3 * (2 * sos.size() + 1);
  padlen = std::min(padlen, n - 1);

  std::vector<double> ext;
  ext.reserve(n + 2 * padlen);
  for (std::size_t i = 0; i < padlen; ++i) {
    ext.push_back(2.0 * x[0] - x[padlen - i]);
  }
  ext.insert(ext.end(), x.begin(), x.end());
  for (std::size_t i = 0; i < padlen; ++i) {
    ext.push_back(2.0 * x[n - 1] - x[n - 2 - i]);
  }

  sosfilt_zi_inplace(sos, ext, ext.front());
  std::reverse(ext.begin(), ext.end());
  sosfilt_zi_inplace(sos, ext, ext.front());
  std::reverse(ext.begin(), ext.end());

  return std::vector<double>(ext.begin() + padlen, ext.begin() + padlen + n);
}

}  // namespace rird
