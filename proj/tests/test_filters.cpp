#include <doctest.h>

#include <cmath>
#include <complex>

#include "rird/filters.hpp"
#include "rird/rng.hpp"

using namespace rird;

namespace {

double magnitude_at(const Sos& sos, double freq_hz, double rate) {
  const std::complex<double> z =
      std::exp(std::complex<double>(0.0, 2.0 * M_PI * freq_hz / rate));
  std::complex<double> h(1.0, 0.0);
  for (const Biquad& s : sos) {
    h *= (s.b0 + s.b1 / z + s.b2 / (z * z)) /
         (1.0 + s.a1 / z + s.a2 / (z * z));
  }
  return std::abs(h);
}

}  // namespace

TEST_CASE("butterworth lowpass: DC gain 1, -3 dB at cutoff, 4th-order rolloff") {
  const Sos sos = butterworth_lowpass(4, 150.0, 48000.0);
  CHECK(sos.size() == 2);
  CHECK(magnitude_at(sos, 1e-9, 48000.0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(magnitude_at(sos, 150.0, 48000.0) ==
        doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-3));
  const double oct1 = magnitude_at(sos, 300.0, 48000.0);
  const double oct2 = magnitude_at(sos, 600.0, 48000.0);
  // 4th order: about 24 dB per octave in the stop band
  CHECK(20.0 * std::log10(oct1 / oct2) > 22.0);
  CHECK(20.0 * std::log10(oct1 / oct2) < 26.0);
}

TEST_CASE("butterworth bandpass: unit gain at center, -3 dB at the edges") {
  const double lo = 22.3, hi = 28.1, rate = 48000.0;
  const Sos sos = butterworth_bandpass(4, lo, hi, rate);
  CHECK(sos.size() == 2);
  const double center = std::sqrt(lo * hi);
  CHECK(magnitude_at(sos, center, rate) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(magnitude_at(sos, lo, rate) ==
        doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(2e-2));
  CHECK(magnitude_at(sos, hi, rate) ==
        doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(2e-2));
  CHECK(magnitude_at(sos, 4.0 * hi, rate) < 0.02);
  CHECK(magnitude_at(sos, lo / 4.0, rate) < 0.02);
}

TEST_CASE("design rejects bad parameters") {
  CHECK_THROWS_AS(butterworth_lowpass(3, 100.0, 1000.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(butterworth_lowpass(4, 600.0, 1000.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(butterworth_bandpass(4, 200.0, 100.0, 1000.0),
                  std::invalid_argument);
}

TEST_CASE("sosfilt on a steady sine reaches the design magnitude") {
  const double rate = 8000.0, freq = 100.0;
  const Sos sos = butterworth_bandpass(4, 80.0, 125.0, rate);
  std::vector<double> x(32768);
  for (std::size_t n = 0; n < x.size(); ++n) {
    x[n] = std::sin(2.0 * M_PI * freq / rate * static_cast<double>(n));
  }
  const std::vector<double> y = sosfilt(sos, x);
  // steady-state amplitude over the final quarter
  double peak = 0.0;
  for (std::size_t n = 3 * x.size() / 4; n < x.size(); ++n) {
    peak = std::max(peak, std::abs(y[n]));
  }
  CHECK(peak == doctest::Approx(magnitude_at(sos, freq, rate)).epsilon(2e-3));
}

TEST_CASE("filtfilt is zero-phase and squares the magnitude response") {
  const double rate = 8000.0, freq = 100.0;
  const Sos sos = butterworth_bandpass(4, 80.0, 125.0, rate);
  const std::size_t n = 32768;
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = std::sin(2.0 * M_PI * freq / rate * static_cast<double>(i));
  }
  const std::vector<double> y = filtfilt(sos, x);
  REQUIRE(y.size() == n);
  // compare against the analytically phase-free scaled input mid-signal
  const double expected =
      magnitude_at(sos, freq, rate) * magnitude_at(sos, freq, rate);
  for (std::size_t i = n / 2 - 50; i < n / 2 + 50; ++i) {
    CHECK(y[i] == doctest::Approx(expected * x[i]).epsilon(5e-3));
  }
}

TEST_CASE("filtfilt handles short inputs") {
  const Sos sos = butterworth_lowpass(4, 100.0, 1000.0);
  std::vector<double> x = {1.0};
  CHECK(filtfilt(sos, x).size() == 1);
  std::vector<double> x8(8, 1.0);
  CHECK(filtfilt(sos, x8).size() == 8);
}
