#include "rird/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "rird/filters.hpp"
#include "rird/rng.hpp"
#include "src/parallel.hpp"

namespace rird {

using nlohmann::json;

void ModalSpec::validate() const {
  if (modes.empty()) {
    throw std::invalid_argument("modal spec: needs at least one mode");
  }
  if (length < 1 || !(rate > 0.0)) {
    throw std::invalid_argument("modal spec: invalid length or rate");
  }
  for (const Mode& m : modes) {
    if (!(m.freq_hz >= 0.0) || m.freq_hz >= rate / 2.0) {
      throw std::invalid_argument(
          "modal spec: mode frequency must lie in [0, rate/2)");
    }
    if (!(m.alpha >= 0.0)) {
      throw std::invalid_argument("modal spec: decay must be >= 0");
    }
    if (!std::isfinite(m.amplitude)) {
      throw std::invalid_argument("modal spec: non-finite amplitude");
    }
  }
}

ModalSpec ModalSpec::defaults() {
  // Third-octave nominal centers 25..100 Hz; slower decays at lower bands.
  static const double centers[] = {25.0, 31.5, 40.0, 50.0, 63.0, 80.0, 100.0};
  static const double dt60_s[] = {3.0, 2.6, 2.3, 2.0, 1.7, 1.4, 1.2};
  ModalSpec spec;
  spec.length = std::size_t{1} << 17;
  spec.rate = 48000.0;
  const double log10e = std::log10(std::exp(1.0));
  for (std::size_t k = 0; k < std::size(centers); ++k) {
    Mode m;
    m.amplitude = 1.0;
    m.freq_hz = centers[k];
    m.alpha = 3.0 / (dt60_s[k] * spec.rate * log10e);
    spec.modes.push_back(m);
  }
  return spec;
}

json ModalSpec::to_json() const {
  json j;
  j["length"] = length;
  j["rate"] = rate;
  j["modes"] = json::array();
  for (const Mode& m : modes) {
    j["modes"].push_back({{"amplitude", m.amplitude},
                          {"alpha", m.alpha},
                          {"freq_hz", m.freq_hz}});
  }
  return j;
}

ModalSpec ModalSpec::from_json(const json& j) {
  ModalSpec spec;
  spec.length = j.at("length").get<std::size_t>();
  spec.rate = j.at("rate").get<double>();
  for (const auto& m : j.at("modes")) {
    spec.modes.push_back({m.at("amplitude").get<double>(),
                          m.at("alpha").get<double>(),
                          m.at("freq_hz").get<double>()});
  }
  spec.validate();
  return spec;
}

Signal gen_modal(const ModalSpec& spec) {
  spec.validate();
  Signal out;
  out.sample_rate = spec.rate;
  out.samples.assign(spec.length, 0.0);
  for (const Mode& m : spec.modes) {
    const double omega = 2.0 * M_PI * m.freq_hz / spec.rate;
    for (std::size_t n = 0; n < spec.length; ++n) {
      out.samples[n] += m.amplitude *
                        std::exp(-m.alpha * static_cast<double>(n)) *
                        std::sin(omega * static_cast<double>(n));
    }
  }
  return out;
}

json NoiseShape::to_json() const {
  return json{{"cutoff_hz", cutoff_hz}, {"order", order}};
}

NoiseShape NoiseShape::from_json(const json& j) {
  NoiseShape shape;
  shape.cutoff_hz = j.value("cutoff_hz", shape.cutoff_hz);
  shape.order = j.value("order", shape.order);
  return shape;
}

Signal gen_shaped_noise(std::size_t length, double rate, std::uint64_t seed,
                        const NoiseShape& shape) {
  Signal out;
  out.sample_rate = rate;
  if (length == 0) return out;

  // Extra settling samples are filtered and discarded so the kept stretch is
  // stationary.
  const std::size_t warmup = 4096;
  CounterRng rng = CounterRng::derive(seed, {0x6e6f6973});  // "nois"
  std::vector<double> white(length + warmup);
  for (double& v : white) v = rng.gaussian();
  const Sos sos = butterworth_lowpass(shape.order, shape.cutoff_hz, rate);
  std::vector<double> shaped = sosfilt(sos, white);
  out.samples.assign(shaped.begin() + static_cast<std::ptrdiff_t>(warmup),
                     shaped.end());
  return out;
}

Signal mix_at_snr(const Signal& clean, const Signal& noise, double snr_db) {
  validate(clean);
  validate(noise);
  if (clean.size() != noise.size() ||
      clean.sample_rate != noise.sample_rate) {
    throw std::invalid_argument(
        "mix_at_snr: signals must share length and rate");
  }
  const double clean_energy = energy(clean.samples);
  const double noise_energy = energy(noise.samples);
  if (!(clean_energy > 0.0) || !(noise_energy > 0.0)) {
    throw std::invalid_argument("mix_at_snr: zero-energy input");
  }
  const double gain =
      std::sqrt(clean_energy / (noise_energy * std::pow(10.0, snr_db / 10.0)));
  Signal out;
  out.sample_rate = clean.sample_rate;
  out.samples.resize(clean.size());
  for (std::size_t n = 0; n < clean.size(); ++n) {
    out.samples[n] = clean.samples[n] + gain * noise.samples[n];
  }
  return out;
}

void SweepPlan::validate() const {
  if (snr_levels_db.empty() || noise_seeds.empty() || decay_factors.empty()) {
    throw std::invalid_argument("sweep plan: empty snr/seed/factor grid");
  }
  for (double f : decay_factors) {
    if (!(f > 0.0)) {
      throw std::invalid_argument("sweep plan: decay factors must be > 0");
    }
  }
  base.validate();
}

std::size_t SweepPlan::trial_count() const {
  return snr_levels_db.size() * noise_seeds.size() * decay_factors.size();
}

SweepPlan SweepPlan::defaults() {
  SweepPlan plan;
  for (int i = 0; i < 10; ++i) {
    plan.snr_levels_db.push_back(5.0 + 5.0 * i);
    plan.noise_seeds.push_back(static_cast<std::uint64_t>(i + 1));
  }
  plan.decay_factors = {0.5, 1.0, 1.5, 2.0};
  plan.base = ModalSpec::defaults();
  plan.seed = 1;
  return plan;
}

json SweepPlan::to_json() const {
  json j;
  j["schema_version"] = 1;
  j["seed"] = seed;
  j["snr_levels_db"] = snr_levels_db;
  j["noise_seeds"] = noise_seeds;
  j["decay_factors"] = decay_factors;
  j["signal"] = base.to_json();
  j["noise_shape"] = noise_shape.to_json();
  return j;
}

SweepPlan SweepPlan::from_json(const json& j) {
  SweepPlan plan;
  plan.seed = j.value("seed", std::uint64_t{1});
  plan.snr_levels_db = j.at("snr_levels_db").get<std::vector<double>>();
  plan.noise_seeds = j.at("noise_seeds").get<std::vector<std::uint64_t>>();
  plan.decay_factors = j.at("decay_factors").get<std::vector<double>>();
  plan.base = ModalSpec::from_json(j.at("signal"));
  if (j.contains("noise_shape")) {
    plan.noise_shape = NoiseShape::from_json(j.at("noise_shape"));
  }
  plan.validate();
  return plan;
}

SweepPlan SweepPlan::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("sweep plan: cannot open " + path);
  }
  json j;
  in >> j;
  return from_json(j);
}

namespace {

ArmRecord evaluate_arm(const std::string& arm, const Signal& armed,
                       const Signal& noisy, const ModalSpec& spec,
                       const std::vector<ThirdOctaveBand>& bands) {
  ArmRecord record;
  record.arm = arm;
  for (std::size_t k = 0; k < bands.size(); ++k) {
    BandRecord band;
    band.center_hz = bands[k].center_hz;
    band.dt60_exact_s = exact_mode_dt60(spec.modes[k].alpha, spec.rate);
    const BandDecayEstimate est = band_dt60(armed, bands[k]);
    if (est.ok) {
      band.dt60_est_s = est.estimate.dt60_seconds;
      band.rel_err = std::abs(band.dt60_est_s - band.dt60_exact_s) /
                     band.dt60_exact_s;
      band.fit_range = est.estimate.fit_range_db;
      band.fit_r2 = est.estimate.fit_r2;
      band.status = est.fallback_used ? "fallback" : "ok";
    } else {
      band.dt60_est_s = std::nan("");
      band.rel_err = std::nan("");
      band.status = "insufficient_decay";
    }
    record.bands.push_back(band);
  }
  record.dynamic_improvement_db =
      arm == "noisy" ? 0.0 : dynamic_improvement(noisy, armed);
  return record;
}

ExperimentRecord run_trial(const SweepPlan& plan, const PipelineConfig& config,
                           std::size_t fi, std::size_t si, std::size_t ki) {
  ExperimentRecord record;
  record.factor = plan.decay_factors[fi];
  record.seed_index = si;
  record.noise_seed = plan.noise_seeds[si];
  record.snr_db = plan.snr_levels_db[ki];
  try {
    ModalSpec spec = plan.base;
    for (Mode& m : spec.modes) m.alpha *= record.factor;
    const Signal clean = gen_modal(spec);
    const Signal noise = gen_shaped_noise(spec.length, spec.rate,
                                          record.noise_seed, plan.noise_shape);
    const Signal noisy = mix_at_snr(clean, noise, record.snr_db);

    PipelineConfig trial_config = config;
    trial_config.seed = CounterRng::derive(plan.seed, {fi, si, ki}).next_u64();
    auto [proposed, proposed_report] = denoise(noisy, trial_config);
    auto [baseline, baseline_report] = denoise_baseline(noisy, trial_config);

    std::vector<double> centers;
    for (const Mode& m : spec.modes) centers.push_back(m.freq_hz);
    const std::vector<ThirdOctaveBand> bands = third_octave_bands(centers);

    record.arms.push_back(evaluate_arm("noisy", noisy, noisy, spec, bands));
    record.arms.push_back(
        evaluate_arm("baseline", baseline, noisy, spec, bands));
    record.arms.push_back(
        evaluate_arm("proposed", proposed, noisy, spec, bands));

    ArmRecord& prop = record.arms.back();
    if (proposed_report.envelope) {
      prop.env_x1 = proposed_report.envelope->x1;
      prop.env_x2 = proposed_report.envelope->x2;
      prop.env_x3 = proposed_report.envelope->x3;
      prop.env_nsr = proposed_report.envelope_nsr.value_or(0.0);
      prop.env_transition_samples =
          proposed_report.transition_samples.value_or(std::nan(""));
    }
    prop.epsilon_fallback = proposed_report.epsilon_fallback;
    prop.dl_mean_support = proposed_report.dl_mean_support;
    prop.dl_columns_unmet = proposed_report.dl_columns_unmet;
  } catch (const std::exception& e) {
    record.error = e.what();
    record.arms.clear();
  }
  return record;
}

}  // namespace

std::vector<ExperimentRecord> run_sweep(const SweepPlan& plan,
                                        const PipelineConfig& config,
                                        int threads) {
  plan.validate();
  config.validate();

  struct TrialKey {
    std::size_t fi, si, ki;
  };
  std::vector<TrialKey> keys;
  keys.reserve(plan.trial_count());
  for (std::size_t fi = 0; fi < plan.decay_factors.size(); ++fi) {
    for (std::size_t si = 0; si < plan.noise_seeds.size(); ++si) {
      for (std::size_t ki = 0; ki < plan.snr_levels_db.size(); ++ki) {
        keys.push_back({fi, si, ki});
      }
    }
  }

  std::vector<ExperimentRecord> records(keys.size());
  parallel_for(keys.size(), threads, [&](std::size_t i) {
    records[i] = run_trial(plan, config, keys[i].fi, keys[i].si, keys[i].ki);
  });
  return records;
}

}  // namespace rird
