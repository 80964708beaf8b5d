#include "rird/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "rird/sparsedl.hpp"

namespace rird {

using nlohmann::json;

namespace {

ThresholdRule rule_from_string(const std::string& s) {
  if (s == "soft") return ThresholdRule::soft;
  if (s == "hard") return ThresholdRule::hard;
  throw std::invalid_argument("config: unknown threshold rule: " + s);
}

ThresholdEstimator estimator_from_string(const std::string& s) {
  if (s == "universal") return ThresholdEstimator::universal;
  if (s == "fixed") return ThresholdEstimator::fixed;
  throw std::invalid_argument("config: unknown threshold estimator: " + s);
}

SigmaMethod sigma_from_string(const std::string& s) {
  if (s == "mad") return SigmaMethod::mad;
  if (s == "provided") return SigmaMethod::provided;
  throw std::invalid_argument("config: unknown sigma method: " + s);
}

ThresholdScaling scaling_from_string(const std::string& s) {
  if (s == "per_level") return ThresholdScaling::per_level;
  if (s == "single_level") return ThresholdScaling::single_level;
  throw std::invalid_argument("config: unknown threshold scaling: " + s);
}

class StageTimer {
 public:
  explicit StageTimer(std::vector<StageTiming>& out) : out_(out) {}
  template <typename Fn>
  auto run(const std::string& stage, Fn&& fn) {
    const auto start = std::chrono::steady_clock::now();
    if constexpr (std::is_void_v<decltype(fn())>) {
      fn();
      record(stage, start);
    } else {
      auto result = fn();
      record(stage, start);
      return result;
    }
  }

 private:
  void record(const std::string& stage,
              std::chrono::steady_clock::time_point start) {
    const std::chrono::duration<double> elapsed =
        std::chrono::steady_clock::now() - start;
    out_.push_back({stage, elapsed.count()});
  }
  std::vector<StageTiming>& out_;
};

WaveletFilterBank resolve_bank(const std::string& name) {
  const auto& shipped = WaveletFilterBank::shipped_names();
  if (std::find(shipped.begin(), shipped.end(), name) != shipped.end()) {
    return WaveletFilterBank::named(name);
  }
  if (std::filesystem::exists(name)) {
    return WaveletFilterBank::load(name);
  }
  throw std::invalid_argument("config: wavelet '" + name +
                              "' is neither a shipped bank nor a file");
}

std::size_t count_nonzeros(const std::vector<double>& v) {
  std::size_t count = 0;
  for (double x : v) count += x != 0.0;
  return count;
}

std::pair<Signal, DenoiseReport> run_pipeline(const Signal& signal,
                                              const PipelineConfig& config,
                                              bool dl_enabled) {
  config.validate();
  validate(signal);
  if (peak_abs(signal.samples) == 0.0) {
    throw std::invalid_argument("denoise: all-zero signal has no content");
  }
  const std::size_t min_length = std::size_t{1} << (config.levels + 2);
  if (signal.size() < min_length) {
    throw std::invalid_argument(
        "denoise: signal shorter than 2^(levels+2) = " +
        std::to_string(min_length) + " samples");
  }

  DenoiseReport report;
  report.config = config;
  report.dl_enabled = dl_enabled;
  report.input_length = signal.size();
  StageTimer timer(report.timings);

  const WaveletFilterBank bank = resolve_bank(config.wavelet);

  // Tail padding keeps the periodic length bookkeeping exact; RIR tails are
  // near-silent so zeros distort least. A guard stretch of one synthesis
  // kernel per level is added so that coefficient edits near the onset wrap
  // into samples that are stripped afterwards instead of corrupting the tail.
  Signal padded = signal;
  if (config.boundary == BoundaryMode::periodic) {
    const std::size_t unit = std::size_t{1} << config.levels;
    const std::size_t guard = dl_enabled ? bank.length() * unit : 0;
    const std::size_t target =
        (signal.size() + guard + unit - 1) / unit * unit;
    padded.samples.resize(target, 0.0);
  }
  report.padded_length = padded.size();

  WaveletDecomposition dec = timer.run("dwt", [&] {
    return decompose(padded, bank, config.levels, config.boundary);
  });

  for (const auto& level : dec.details) {
    report.detail_nonzeros_before.push_back(count_nonzeros(level));
  }
  if (config.threshold_enabled) {
    dec = timer.run("threshold",
                    [&] { return denoise_details(dec, config.threshold); });
  }
  for (const auto& level : dec.details) {
    report.detail_nonzeros_after.push_back(count_nonzeros(level));
  }

  if (dl_enabled) {
    const std::vector<double>& approx = dec.approximation;
    const std::size_t n_approx = approx.size();
    const double approx_rate =
        padded.sample_rate / static_cast<double>(std::size_t{1}
                                                 << config.levels);

    // Error schedule over approximation indices, from the envelope fit in
    // the configured domain. The fit sees only the unpadded stretch; the
    // schedule extends over the guard pad monotonically.
    const std::size_t fit_len = std::min<std::size_t>(
        n_approx,
        (signal.size() + (std::size_t{1} << config.levels) - 1) >>
            config.levels);
    ErrorSchedule schedule = timer.run("envelope", [&]() -> ErrorSchedule {
      const bool fullrate = config.epsilon_domain == EpsilonDomain::fullrate;
      const Signal fit_input =
          fullrate ? signal
                   : Signal{std::vector<double>(approx.begin(),
                                                approx.begin() +
                                                    static_cast<std::ptrdiff_t>(
                                                        fit_len)),
                            approx_rate};
      const EnvelopeModel model = fit_envelope(
          fit_input, config.envelope_bounds, config.envelope_init);
      report.envelope = model;
      if (model.no_decay_detected) {
        report.epsilon_fallback = true;
        return constant_schedule(n_approx);
      }
      try {
        const double t_t = transition_time(model);
        report.transition_samples = t_t;
        report.envelope_nsr = nsr(model);
        if (!fullrate) {
          return error_schedule(model, approx_rate, n_approx);
        }
        // Fit at full rate; evaluate at the approximation indices' full-rate
        // positions n_h = n_a * 2^L.
        ErrorSchedule sched;
        sched.nsr = nsr(model);
        sched.transition_index = static_cast<std::ptrdiff_t>(
            std::floor(t_t / static_cast<double>(std::size_t{1}
                                                 << config.levels)));
        sched.values.resize(n_approx);
        for (std::size_t n = 0; n < n_approx; ++n) {
          sched.values[n] = epsilon_at(
              model, padded.sample_rate, t_t,
              static_cast<std::ptrdiff_t>(n << config.levels));
        }
        return sched;
      } catch (const NoTransition&) {
        report.epsilon_fallback = true;
        return constant_schedule(n_approx);
      }
    });

    std::size_t window = static_cast<std::size_t>(
        std::llround(config.window_ratio * static_cast<double>(n_approx)));
    window = std::clamp<std::size_t>(window, 2, n_approx - 1);

    const PatchMatrix patches = build_patch_matrix(approx, window);
    std::vector<double> energies(static_cast<std::size_t>(patches.data.cols()));
    for (Eigen::Index j = 0; j < patches.data.cols(); ++j) {
      energies[static_cast<std::size_t>(j)] =
          patches.data.col(j).squaredNorm();
    }
    const std::vector<double> tolerances =
        column_tolerances(schedule, window, energies);

    LearnOptions options;
    options.iterations = config.dl_iterations;
    options.seed = config.seed;
    options.exact_svd = config.dl_exact_svd;
    const int atom_count = static_cast<int>(std::min<Eigen::Index>(
        config.atoms, patches.data.cols()));

    auto [dict, code, stats] = timer.run("dictionary_learning", [&] {
      return learn(patches, atom_count, tolerances, options);
    });
    report.dl_iterations_run = stats.iterations_run;
    report.dl_mean_support = stats.mean_support;
    report.dl_columns_unmet = stats.columns_unmet;
    report.dl_total_residual2 = stats.total_residual2;

    dec.approximation = timer.run("rebuild", [&] {
      return reconstruct_sequence(dict, code, n_approx, approx);
    });
  }

  Signal out = timer.run("idwt", [&] { return reconstruct(dec, bank); });
  out.samples.resize(signal.size());
  out.sample_rate = signal.sample_rate;
  return {std::move(out), std::move(report)};
}

}  // namespace

std::string to_string(EpsilonDomain d) {
  return d == EpsilonDomain::approximation ? "approximation" : "fullrate";
}

EpsilonDomain epsilon_domain_from_string(const std::string& name) {
  if (name == "approximation") return EpsilonDomain::approximation;
  if (name == "fullrate") return EpsilonDomain::fullrate;
  throw std::invalid_argument("config: unknown epsilon domain: " + name);
}

void PipelineConfig::validate() const {
  if (wavelet.empty()) {
    throw std::invalid_argument("config: wavelet name required");
  }
  if (levels < 1 || levels > 30) {
    throw std::invalid_argument("config: levels must lie in [1, 30]");
  }
  if (atoms < 1) {
    throw std::invalid_argument("config: atoms must be >= 1");
  }
  if (!(window_ratio > 0.0) || !(window_ratio < 1.0)) {
    throw std::invalid_argument("config: window_ratio must lie in (0, 1)");
  }
  if (dl_iterations < 1) {
    throw std::invalid_argument("config: dl_iterations must be >= 1");
  }
  threshold.validate();
}

json PipelineConfig::to_json() const {
  json t;
  t["rule"] = to_string(threshold.rule);
  t["estimator"] = to_string(threshold.estimator);
  t["sigma_method"] = to_string(threshold.sigma_method);
  t["scaling"] = to_string(threshold.scaling);
  if (threshold.estimator == ThresholdEstimator::fixed) {
    t["fixed_value"] = threshold.fixed_value;
  }
  if (threshold.sigma_method == SigmaMethod::provided) {
    t["provided_sigma"] = threshold.provided_sigma;
  }

  json j;
  j["schema_version"] = 1;
  j["wavelet"] = wavelet;
  j["levels"] = levels;
  j["boundary"] = to_string(boundary);
  j["threshold"] = t;
  j["threshold_enabled"] = threshold_enabled;
  j["atoms"] = atoms;
  j["window_ratio"] = window_ratio;
  j["dl_iterations"] = dl_iterations;
  j["dl_enabled"] = dl_enabled;
  j["dl_exact_svd"] = dl_exact_svd;
  j["epsilon_domain"] = to_string(epsilon_domain);
  j["seed"] = seed;
  if (envelope_bounds) {
    j["envelope_bounds"] = {{"lower", envelope_bounds->lower},
                            {"upper", envelope_bounds->upper}};
  }
  if (envelope_init) {
    j["envelope_init"] = {{"x1", envelope_init->x1},
                          {"x2", envelope_init->x2},
                          {"x3", envelope_init->x3}};
  }
  return j;
}

PipelineConfig PipelineConfig::from_json(const json& j) {
  PipelineConfig c;
  c.wavelet = j.value("wavelet", c.wavelet);
  c.levels = j.value("levels", c.levels);
  if (j.contains("boundary")) {
    c.boundary = boundary_mode_from_string(j.at("boundary").get<std::string>());
  }
  if (j.contains("threshold")) {
    const json& t = j.at("threshold");
    if (t.contains("rule")) {
      c.threshold.rule = rule_from_string(t.at("rule").get<std::string>());
    }
    if (t.contains("estimator")) {
      c.threshold.estimator =
          estimator_from_string(t.at("estimator").get<std::string>());
    }
    if (t.contains("sigma_method")) {
      c.threshold.sigma_method =
          sigma_from_string(t.at("sigma_method").get<std::string>());
    }
    if (t.contains("scaling")) {
      c.threshold.scaling =
          scaling_from_string(t.at("scaling").get<std::string>());
    }
    c.threshold.fixed_value = t.value("fixed_value", c.threshold.fixed_value);
    c.threshold.provided_sigma =
        t.value("provided_sigma", c.threshold.provided_sigma);
  }
  c.threshold_enabled = j.value("threshold_enabled", c.threshold_enabled);
  c.atoms = j.value("atoms", c.atoms);
  c.window_ratio = j.value("window_ratio", c.window_ratio);
  c.dl_iterations = j.value("dl_iterations", c.dl_iterations);
  c.dl_enabled = j.value("dl_enabled", c.dl_enabled);
  c.dl_exact_svd = j.value("dl_exact_svd", c.dl_exact_svd);
  if (j.contains("epsilon_domain")) {
    c.epsilon_domain =
        epsilon_domain_from_string(j.at("epsilon_domain").get<std::string>());
  }
  c.seed = j.value("seed", c.seed);
  if (j.contains("envelope_bounds")) {
    EnvelopeBounds b;
    b.lower = j.at("envelope_bounds").at("lower").get<std::array<double, 3>>();
    b.upper = j.at("envelope_bounds").at("upper").get<std::array<double, 3>>();
    c.envelope_bounds = b;
  }
  if (j.contains("envelope_init")) {
    EnvelopeInit init;
    init.x1 = j.at("envelope_init").at("x1").get<double>();
    init.x2 = j.at("envelope_init").at("x2").get<double>();
    init.x3 = j.at("envelope_init").at("x3").get<double>();
    c.envelope_init = init;
  }
  c.validate();
  return c;
}

PipelineConfig PipelineConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("config: cannot open " + path);
  }
  json j;
  in >> j;
  return from_json(j);
}

json DenoiseReport::to_json() const {
  json j;
  j["schema_version"] = 1;
  j["config"] = config.to_json();
  j["dl_enabled"] = dl_enabled;
  j["input_length"] = input_length;
  j["padded_length"] = padded_length;
  if (envelope) {
    j["envelope"] = {{"x1", envelope->x1},
                     {"x2", envelope->x2},
                     {"x3", envelope->x3},
                     {"fit_residual", envelope->fit_residual},
                     {"domain_rate", envelope->domain_rate},
                     {"no_decay_detected", envelope->no_decay_detected}};
    if (transition_samples) j["envelope"]["transition_samples"] = *transition_samples;
    if (envelope_nsr) j["envelope"]["nsr"] = *envelope_nsr;
  }
  j["epsilon_fallback"] = epsilon_fallback;
  j["detail_nonzeros_before"] = detail_nonzeros_before;
  j["detail_nonzeros_after"] = detail_nonzeros_after;
  j["dl"] = {{"iterations_run", dl_iterations_run},
             {"mean_support", dl_mean_support},
             {"columns_unmet", dl_columns_unmet},
             {"total_residual2", dl_total_residual2}};
  json stages = json::array();
  for (const StageTiming& t : timings) {
    stages.push_back({{"stage", t.stage}, {"seconds", t.seconds}});
  }
  j["timings"] = stages;
  return j;
}

std::pair<Signal, DenoiseReport> denoise(const Signal& signal,
                                         const PipelineConfig& config) {
  return run_pipeline(signal, config, config.dl_enabled);
}

std::pair<Signal, DenoiseReport> denoise_baseline(const Signal& signal,
                                                  const PipelineConfig& config) {
  return run_pipeline(signal, config, false);
}

}  // namespace rird
