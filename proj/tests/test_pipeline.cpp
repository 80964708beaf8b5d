#include <doctest.h>

#include <cmath>

#include <nlohmann/json.hpp>

#include "rird/acoustics.hpp"
#include "rird/pipeline.hpp"
#include "rird/rng.hpp"
#include "rird/synth.hpp"

using namespace rird;

namespace {

Signal small_noisy_signal(double snr_db, std::uint64_t seed) {
  ModalSpec spec = ModalSpec::defaults();
  spec.length = 1 << 15;
  const Signal clean = gen_modal(spec);
  const Signal noise = gen_shaped_noise(spec.length, spec.rate, seed);
  return mix_at_snr(clean, noise, snr_db);
}

PipelineConfig small_config() {
  PipelineConfig config;
  config.levels = 6;  // keeps the decimated band meaningful at 2^15 samples
  return config;
}

}  // namespace

TEST_CASE("all-zero input is rejected by both arms") {
  Signal zero{std::vector<double>(1 << 12, 0.0), 48000.0};
  PipelineConfig config = small_config();
  CHECK_THROWS_AS(denoise(zero, config), std::invalid_argument);
  CHECK_THROWS_AS(denoise_baseline(zero, config), std::invalid_argument);
}

TEST_CASE("too-short input names the minimum") {
  Signal tiny{std::vector<double>(64, 1.0), 48000.0};
  PipelineConfig config;
  config.levels = 8;
  CHECK_THROWS_WITH_AS(denoise(tiny, config), doctest::Contains("2^(levels+2)"),
                       std::invalid_argument);
}

TEST_CASE("length preservation, including non-divisible lengths") {
  PipelineConfig config = small_config();
  for (std::size_t extra : {std::size_t{0}, std::size_t{37}}) {
    ModalSpec spec = ModalSpec::defaults();
    spec.length = (1 << 15) + extra;
    const Signal clean = gen_modal(spec);
    const Signal noise = gen_shaped_noise(spec.length, spec.rate, 3);
    const Signal noisy = mix_at_snr(clean, noise, 20.0);
    auto [out, report] = denoise(noisy, config);
    CHECK(out.size() == noisy.size());
    CHECK(out.sample_rate == noisy.sample_rate);
    CHECK(report.padded_length % (std::size_t{1} << config.levels) == 0);
    CHECK(report.padded_length > spec.length);  // guard pad present
  }
}

TEST_CASE("determinism: identical runs produce identical output") {
  const Signal noisy = small_noisy_signal(20.0, 9);
  PipelineConfig config = small_config();
  config.seed = 77;
  auto [a, ra] = denoise(noisy, config);
  auto [b, rb] = denoise(noisy, config);
  CHECK(a.samples == b.samples);  // bitwise
  CHECK(ra.dl_total_residual2 == rb.dl_total_residual2);
}

TEST_CASE("baseline never modifies the approximation") {
  const Signal noisy = small_noisy_signal(15.0, 4);
  PipelineConfig config = small_config();
  auto [out, report] = denoise_baseline(noisy, config);
  CHECK_FALSE(report.dl_enabled);

  // decompose input and output identically; approximations must match on
  // the unpadded region bit-for-bit is too strict after resynthesis, so
  // compare against the thresholded decomposition path instead
  Signal padded = noisy;
  const std::size_t unit = std::size_t{1} << config.levels;
  padded.samples.resize((noisy.size() + unit - 1) / unit * unit, 0.0);
  const auto bank = WaveletFilterBank::named(config.wavelet);
  const auto dec = decompose(padded, bank, config.levels);
  const auto thresholded = denoise_details(dec, config.threshold);
  const Signal expected = reconstruct(thresholded, bank);
  for (std::size_t i = 0; i < noisy.size(); ++i) {
    CHECK(out.samples[i] == doctest::Approx(expected.samples[i]).epsilon(1e-12));
  }
}

TEST_CASE("structural equivalence: denoise with dl disabled == baseline") {
  const Signal noisy = small_noisy_signal(18.0, 5);
  PipelineConfig config = small_config();
  config.dl_enabled = false;
  auto [a, ra] = denoise(noisy, config);
  auto [b, rb] = denoise_baseline(noisy, config);
  CHECK(a.samples == b.samples);  // bitwise
  CHECK_FALSE(ra.dl_enabled);
  CHECK_FALSE(rb.dl_enabled);
}

TEST_CASE("identity config reproduces the input") {
  const Signal noisy = small_noisy_signal(25.0, 6);
  PipelineConfig config = small_config();
  config.threshold_enabled = false;
  config.dl_enabled = false;
  auto [out, report] = denoise(noisy, config);
  double max_err = 0.0;
  for (std::size_t i = 0; i < noisy.size(); ++i) {
    max_err = std::max(max_err, std::abs(out.samples[i] - noisy.samples[i]));
  }
  CHECK(max_err < 1e-10);
}

TEST_CASE("clean single mode survives the full default chain within 5%") {
  ModalSpec spec;
  spec.rate = 48000.0;
  spec.length = 1 << 17;
  spec.modes = {{1.0, 3.0 / (2.0 * spec.rate * std::log10(std::exp(1.0))),
                 50.0}};
  const Signal clean = gen_modal(spec);
  PipelineConfig config;  // full defaults: dmey, L=8, K=8
  auto [out, report] = denoise(clean, config);
  const double before = estimate_dt60(schroeder_edc(clean)).dt60_seconds;
  const double after = estimate_dt60(schroeder_edc(out)).dt60_seconds;
  CHECK(after == doctest::Approx(before).epsilon(0.05));
  CHECK(report.epsilon_fallback);  // no noise floor -> constant schedule
}

TEST_CASE("fallback path: constant-plus-noise never aborts") {
  CounterRng rng = CounterRng::derive(123, {0});
  Signal flat{std::vector<double>(1 << 14), 48000.0};
  for (double& v : flat.samples) v = 0.5 + 0.01 * rng.gaussian();
  PipelineConfig config = small_config();
  auto [out, report] = denoise(flat, config);
  CHECK(report.epsilon_fallback);
  CHECK(out.size() == flat.size());
}

TEST_CASE("energy sanity: denoising removes energy from noisy input") {
  const Signal noisy = small_noisy_signal(15.0, 8);
  PipelineConfig config = small_config();
  auto [out, report] = denoise(noisy, config);
  CHECK(energy(out.samples) <= energy(noisy.samples) * (1.0 + 1e-6));
}

TEST_CASE("report: stage order, nonzero counts, seed echo") {
  const Signal noisy = small_noisy_signal(20.0, 10);
  PipelineConfig config = small_config();
  config.seed = 4242;
  auto [out, report] = denoise(noisy, config);
  std::vector<std::string> stages;
  for (const auto& t : report.timings) stages.push_back(t.stage);
  const std::vector<std::string> expected = {
      "dwt", "threshold", "envelope", "dictionary_learning", "rebuild",
      "idwt"};
  CHECK(stages == expected);
  REQUIRE(report.detail_nonzeros_before.size() ==
          static_cast<std::size_t>(config.levels));
  for (std::size_t l = 0; l < report.detail_nonzeros_after.size(); ++l) {
    CHECK(report.detail_nonzeros_after[l] <=
          report.detail_nonzeros_before[l]);
  }
  const auto j = report.to_json();
  CHECK(j["config"]["seed"] == 4242);
  CHECK(j["dl"]["iterations_run"].get<int>() >= 1);
}

TEST_CASE("config json roundtrip and validation") {
  PipelineConfig config;
  config.wavelet = "db6";
  config.levels = 5;
  config.atoms = 12;
  config.window_ratio = 0.25;
  config.threshold.rule = ThresholdRule::hard;
  config.epsilon_domain = EpsilonDomain::fullrate;
  config.seed = 99;
  const PipelineConfig parsed = PipelineConfig::from_json(config.to_json());
  CHECK(parsed.wavelet == "db6");
  CHECK(parsed.levels == 5);
  CHECK(parsed.atoms == 12);
  CHECK(parsed.window_ratio == 0.25);
  CHECK(parsed.threshold.rule == ThresholdRule::hard);
  CHECK(parsed.epsilon_domain == EpsilonDomain::fullrate);
  CHECK(parsed.seed == 99);

  PipelineConfig bad;
  bad.window_ratio = 1.5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  CHECK_THROWS_AS(PipelineConfig::from_json(
                      nlohmann::json{{"wavelet", "nosuch"}, {"levels", 0}}),
                  std::invalid_argument);
}

TEST_CASE("fullrate epsilon domain runs end to end") {
  const Signal noisy = small_noisy_signal(20.0, 11);
  PipelineConfig config = small_config();
  config.epsilon_domain = EpsilonDomain::fullrate;
  auto [out, report] = denoise(noisy, config);
  CHECK(out.size() == noisy.size());
  REQUIRE(report.envelope.has_value());
  CHECK(report.envelope->domain_rate == noisy.sample_rate);
}

TEST_CASE("high-frequency-only noise: arms differ only below the cutoff") {
  // clean LF modes plus noise strictly above the cutoff frequency
  ModalSpec spec = ModalSpec::defaults();
  spec.length = 1 << 15;
  const Signal clean = gen_modal(spec);
  CounterRng rng = CounterRng::derive(55, {1});
  Signal noisy = clean;
  const double rate = spec.rate;
  for (std::size_t n = 0; n < noisy.size(); ++n) {
    // narrowband noise at 6 kHz, far above f_c = 750 Hz for L = 6
    noisy.samples[n] += 0.01 * rng.gaussian() *
                        std::sin(2.0 * M_PI * 6000.0 / rate *
                                 static_cast<double>(n));
  }
  PipelineConfig config = small_config();
  auto [proposed, rp] = denoise(noisy, config);
  auto [baseline, rb] = denoise_baseline(noisy, config);
  // the two arms may only differ in the band below f_c; their difference
  // band-passed well above f_c must be negligible
  Signal diff{std::vector<double>(noisy.size()), rate};
  for (std::size_t n = 0; n < noisy.size(); ++n) {
    diff.samples[n] = proposed.samples[n] - baseline.samples[n];
  }
  const double total_diff = energy(diff.samples);
  if (total_diff > 0.0) {
    const Signal hf = bandpass(diff, {6000.0, 5000.0, 7000.0});
    CHECK(10.0 * std::log10(energy(hf.samples) / total_diff) < -60.0);
  }
}
