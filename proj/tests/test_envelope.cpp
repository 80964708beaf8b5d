#include <doctest.h>

#include <cmath>

#include "rird/envelope.hpp"
#include "rird/wavelet.hpp"
#include "rird/rng.hpp"

using namespace rird;

namespace {

// Signal whose blockwise RMS equals the fitted model's envelope
// sqrt(x1^2 exp(-2 x2 t) + x3^2) exactly: constant within each block at the
// model value taken at the block center. (Generating the additive form
// x1 exp(-x2 t) + x3 instead biases the recovered parameters by several
// percent, because the objective drops the cross term.)
Signal model_signal(double x1, double x2, double x3, std::size_t n,
                    double rate = 1000.0) {
  Signal s;
  s.sample_rate = rate;
  s.samples.resize(n);
  for (std::size_t start = 0; start < n; start += kEnvelopeBlock) {
    const std::size_t count = std::min(kEnvelopeBlock, n - start);
    const double center =
        static_cast<double>(start) + 0.5 * static_cast<double>(count - 1);
    const double decay = x1 * std::exp(-x2 * center);
    const double value = std::sqrt(decay * decay + x3 * x3);
    for (std::size_t i = 0; i < count; ++i) s.samples[start + i] = value;
  }
  return s;
}

}  // namespace

TEST_CASE("noise-free generative recovery within 1%") {
  const Signal s = model_signal(1.0, 0.01 / 16.0, 0.001, 4096 * 16);
  const EnvelopeModel m = fit_envelope(s);
  CHECK(m.x1 == doctest::Approx(1.0).epsilon(0.01));
  CHECK(m.x2 == doctest::Approx(0.01 / 16.0).epsilon(0.01));
  CHECK(m.x3 == doctest::Approx(0.001).epsilon(0.01));
  CHECK_FALSE(m.no_decay_detected);
}

TEST_CASE("pure constant signal: floor absorbs the level, decay flagged") {
  Signal s{std::vector<double>(2048, 0.5), 1000.0};
  const EnvelopeModel m = fit_envelope(s);
  CHECK(m.x3 == doctest::Approx(0.5).epsilon(0.02));
  CHECK(m.no_decay_detected);
}

TEST_CASE("all-zero signal is rejected") {
  Signal z{std::vector<double>(256, 0.0), 1000.0};
  CHECK_THROWS_AS(fit_envelope(z), std::invalid_argument);
}

TEST_CASE("objective is non-increasing across accepted steps") {
  CounterRng rng = CounterRng::derive(41, {0});
  std::vector<double> env(256), pos(256);
  for (std::size_t i = 0; i < env.size(); ++i) {
    pos[i] = static_cast<double>(i);
    env[i] = 2.0 * std::exp(-0.01 * pos[i]) + 0.02 +
             0.002 * std::abs(rng.gaussian());
  }
  EnvelopeBounds bounds{{1e-6, 1e-7, 0.0}, {1e3, 1.0, 10.0}};
  EnvelopeInit init{0.5, 1e-3, 1e-3};
  std::vector<double> trace;
  fit_decay_model(env, pos, bounds, init, 1000.0, &trace);
  REQUIRE(trace.size() > 2);
  for (std::size_t i = 1; i < trace.size(); ++i) {
    CHECK(trace[i] <= trace[i - 1]);
  }
}

TEST_CASE("fit respects bounds") {
  const Signal s = model_signal(1.0, 5e-4, 0.001, 4096);
  EnvelopeBounds bounds{{0.1, 1e-3, 0.0}, {10.0, 1.0, 1.0}};  // x2 >= 1e-3
  const EnvelopeModel m = fit_envelope(s, bounds);
  CHECK(m.x2 >= 1e-3);
  CHECK(m.x1 >= 0.1);
  CHECK(m.x1 <= 10.0);
}

TEST_CASE("nsr closed forms") {
  CHECK(nsr({.x1 = 1.0, .x2 = 1.0, .x3 = 0.0}) == 0.0);
  CHECK(nsr({.x1 = 2.0, .x2 = 1.0, .x3 = 0.2}) == doctest::Approx(0.1));
  CHECK(nsr({.x1 = 1.0, .x2 = 1.0, .x3 = 1.0}) == doctest::Approx(1.0));
}

TEST_CASE("transition time closed forms and failure modes") {
  EnvelopeModel m{.x1 = 1.0, .x2 = 0.01, .x3 = std::exp(-10.0)};
  CHECK(transition_time(m) == doctest::Approx(1000.0).epsilon(1e-12));

  EnvelopeModel e_case{.x1 = std::exp(1.0) * 0.3, .x2 = 0.25, .x3 = 0.3};
  CHECK(transition_time(e_case) == doctest::Approx(1.0 / 0.25).epsilon(1e-12));

  CounterRng rng = CounterRng::derive(17, {1});
  for (int i = 0; i < 50; ++i) {
    EnvelopeModel r;
    r.x1 = 0.5 + rng.uniform();
    r.x2 = 1e-4 + 1e-2 * rng.uniform();
    r.x3 = r.x1 * (1e-4 + 0.9 * rng.uniform());
    const double t = transition_time(r);
    CHECK(r.x1 * std::exp(-r.x2 * t) ==
          doctest::Approx(r.x3).epsilon(1e-12));
  }

  CHECK_THROWS_AS(transition_time({.x1 = 1.0, .x2 = 0.1, .x3 = 1.5}),
                  NoTransition);
  CHECK_THROWS_AS(transition_time({.x1 = 1.0, .x2 = 0.1, .x3 = 0.0}),
                  NoTransition);
  CHECK_THROWS_AS(transition_time({.x1 = 1.0, .x2 = 0.0, .x3 = 0.5}),
                  NoTransition);
}

TEST_CASE("error schedule: floor before the knee, closed form after") {
  EnvelopeModel m{.x1 = 1.0, .x2 = 0.0125, .x3 = 0.05};
  const double rate = 187.5;
  const double t_t = transition_time(m);
  const auto knee = static_cast<std::ptrdiff_t>(std::floor(t_t));
  const ErrorSchedule sched = error_schedule(m, rate, 512);
  REQUIRE(sched.transition_index == knee);
  for (std::ptrdiff_t n = 0; n <= knee; ++n) {
    CHECK(sched.values[static_cast<std::size_t>(n)] == kEpsilonFloor);
  }
  for (std::size_t n = static_cast<std::size_t>(knee) + 1; n < 512; ++n) {
    const double formula =
        1.0 - std::exp(-(m.x2 / rate) *
                       static_cast<double>(n - static_cast<std::size_t>(knee)) *
                       sched.nsr);
    CHECK(sched.values[n] ==
          doctest::Approx(std::max(formula, kEpsilonFloor)).epsilon(1e-14));
  }
}

TEST_CASE("error schedule example: x2/rate = 1e-3, nsr 0.5, offset 1000") {
  // pick x1, x3 with x3/x1 = 0.5 and x2/rate = 1e-3
  EnvelopeModel m{.x1 = 1.0, .x2 = 1e-3, .x3 = 0.5};
  const double rate = 1.0;
  const double t_t = transition_time(m);
  const std::ptrdiff_t knee = static_cast<std::ptrdiff_t>(std::floor(t_t));
  const double value = epsilon_at(m, rate, t_t, knee + 1000);
  CHECK(value == doctest::Approx(1.0 - std::exp(-0.5)).epsilon(1e-9));
}

TEST_CASE("schedule is monotone nondecreasing and bounded in [1e-4, 1)") {
  CounterRng rng = CounterRng::derive(33, {2});
  for (int trial = 0; trial < 20; ++trial) {
    EnvelopeModel m;
    m.x1 = 0.5 + 2.0 * rng.uniform();
    m.x2 = 1e-3 + 0.05 * rng.uniform();
    m.x3 = m.x1 * (0.01 + 0.5 * rng.uniform());
    const ErrorSchedule sched = error_schedule(m, 187.5, 2048);
    for (std::size_t n = 0; n < sched.values.size(); ++n) {
      CHECK(sched.values[n] >= kEpsilonFloor);
      CHECK(sched.values[n] < 1.0);
      if (n > 0) CHECK(sched.values[n] >= sched.values[n - 1]);
    }
  }
}

TEST_CASE("decaying sinusoid sum at 30 dB: x2 tracks the dominant decay") {
  // Two modes; the first carries ~40x the energy, so the fitted decay must
  // match its alpha. Fit in the decimated domain, as the pipeline does.
  const double rate = 48000.0;
  const std::size_t n = 1 << 17;
  const double alpha = 6e-5;
  Signal h{std::vector<double>(n, 0.0), rate};
  CounterRng rng = CounterRng::derive(99, {4});
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i);
    h.samples[i] = std::exp(-alpha * t) *
                       std::sin(2.0 * M_PI * 25.0 / rate * t) +
                   0.3 * std::exp(-4.0 * alpha * t) *
                       std::sin(2.0 * M_PI * 80.0 / rate * t);
  }
  const double signal_rms = std::sqrt(energy(h.samples) / n);
  for (double& v : h.samples) {
    v += signal_rms / std::pow(10.0, 1.5) * rng.gaussian();
  }
  const auto dec = decompose(h, WaveletFilterBank::named("dmey"), 8);
  const EnvelopeModel m =
      fit_envelope(Signal{dec.approximation, rate / 256.0});
  CHECK(m.x2 == doctest::Approx(alpha * 256.0).epsilon(0.10));
}

TEST_CASE("30 dB observation noise: x2 within 10% in at least 45/50 draws") {
  CounterRng rng = CounterRng::derive(7, {3});
  int good = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const double x1 = 0.5 + 1.5 * rng.uniform();
    const std::size_t n = 4096 * 16;
    // transition lands inside the observation window
    const double t_t = (8192.0 + 24576.0 * rng.uniform());  // samples
    const double ratio = std::pow(10.0, -(1.0 + 2.0 * rng.uniform()));
    const double x2 = -std::log(ratio) / t_t;  // per sample
    const double x3 = x1 * ratio;
    Signal s = model_signal(x1, x2, x3, n);
    const double rms = std::sqrt(energy(s.samples) / static_cast<double>(n));
    const double sigma = rms / std::pow(10.0, 1.5);  // 30 dB
    for (double& v : s.samples) v += sigma * rng.gaussian();
    const EnvelopeModel m = fit_envelope(s);
    if (std::abs(m.x2 - x2) <= 0.1 * x2) ++good;
  }
  CHECK(good >= 45);
}
