// Command-line front end: denoise, evaluate, synth and sweep subcommands
// around the rird library. Exit codes: 0 success, 2 input error,
// 3 processing error, 4 degraded sweep (under 95% of trials succeeded).

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rird/acoustics.hpp"
#include "rird/pipeline.hpp"
#include "rird/report.hpp"
#include "rird/synth.hpp"
#include "rird/version.hpp"
#include "rird/wavio.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitProcessing = 3;
constexpr int kExitDegraded = 4;

int resolve_threads(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("RIRDENOISE_THREADS")) {
    const int parsed = std::atoi(env);
    if (parsed > 0) return parsed;
  }
  return static_cast<int>(
      std::max(1u, std::thread::hardware_concurrency()));
}

int fail_input(const std::string& message) {
  std::cerr << "error: " << message << "\n";
  return kExitInput;
}

int fail_processing(const std::string& message) {
  std::cerr << "error: " << message << "\n";
  return kExitProcessing;
}

struct DenoiseArgs {
  std::string input, output, config_path, emit_config;
  std::optional<std::uint64_t> seed;
  bool baseline = false;
};

int cmd_denoise(const DenoiseArgs& args) {
  if (!args.emit_config.empty()) {
    rird::write_text_file(args.emit_config,
                          rird::PipelineConfig{}.to_json().dump(2) + "\n");
    std::cout << "wrote " << args.emit_config << "\n";
    return kExitOk;
  }

  rird::PipelineConfig config;
  rird::WavFile wav;
  try {
    if (!args.config_path.empty()) {
      config = rird::PipelineConfig::load(args.config_path);
    }
    if (args.seed) config.seed = *args.seed;
    wav = rird::read_wav(args.input);
  } catch (const std::exception& e) {
    return fail_input(e.what());
  }

  try {
    auto [out, report] = args.baseline
                             ? rird::denoise_baseline(wav.signal, config)
                             : rird::denoise(wav.signal, config);
    rird::write_wav(args.output, out, wav.format);

    rird::RunManifest manifest = rird::RunManifest::make(
        args.baseline ? "denoise --baseline" : "denoise", config.to_json(),
        config.seed);
    manifest.inputs = {args.input};
    manifest.outputs = {args.output};
    rird::write_manifest(args.output, manifest);

    json report_json = report.to_json();
    rird::write_text_file(args.output + ".report.json",
                          report_json.dump(2) + "\n");
    std::cout << "wrote " << args.output << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    return fail_processing(e.what());
  }
}

struct EvaluateArgs {
  std::vector<std::string> inputs;
  std::string out_dir = ".";
  std::vector<double> bands = {25.0, 31.5, 40.0, 50.0, 63.0, 80.0, 100.0};
  double fit_upper = -5.0;
  double fit_lower = -25.0;
  std::size_t edc_stride = 1;
};

int cmd_evaluate(const EvaluateArgs& args) {
  if (args.inputs.empty() || args.inputs.size() > 2) {
    return fail_input("evaluate expects one or two WAV files");
  }
  std::vector<rird::WavFile> files;
  try {
    for (const std::string& path : args.inputs) {
      files.push_back(rird::read_wav(path));
    }
  } catch (const std::exception& e) {
    return fail_input(e.what());
  }

  try {
    fs::create_directories(args.out_dir);
    const rird::FitRange range{args.fit_upper, args.fit_lower};
    const auto bands = rird::third_octave_bands(args.bands);

    json config;
    config["bands_hz"] = args.bands;
    config["fit_range_db"] = {range.upper_db, range.lower_db};
    config["edc_stride"] = args.edc_stride;
    rird::RunManifest manifest =
        rird::RunManifest::make("evaluate", config, 0);
    manifest.inputs = args.inputs;

    for (std::size_t f = 0; f < files.size(); ++f) {
      const std::string stem = fs::path(args.inputs[f]).stem().string();
      const rird::EnergyDecayCurve edc = rird::schroeder_edc(files[f].signal);

      std::string edc_csv = rird::kEdcCsvHeader;
      edc_csv += '\n';
      for (std::size_t n = 0; n < edc.values_db.size(); n += args.edc_stride) {
        edc_csv += rird::format_double(static_cast<double>(n) /
                                       edc.sample_rate) +
                   "," + rird::format_double(edc.values_db[n]) + "\n";
      }
      const fs::path edc_path = fs::path(args.out_dir) / (stem + "_edc.csv");
      rird::write_text_file(edc_path, edc_csv);
      manifest.outputs.push_back(edc_path.string());

      std::string bands_csv = rird::kBandsCsvHeader;
      bands_csv += '\n';
      for (const auto& band : bands) {
        const rird::BandDecayEstimate est =
            rird::band_dt60(files[f].signal, band, range);
        bands_csv += rird::format_double(band.center_hz) + ",";
        if (est.ok) {
          bands_csv += rird::format_double(est.estimate.dt60_seconds) + "," +
                       rird::format_double(est.estimate.fit_range_db.upper_db) +
                       "," +
                       rird::format_double(est.estimate.fit_range_db.lower_db) +
                       "," + rird::format_double(est.estimate.fit_r2) + "," +
                       (est.fallback_used ? "fallback" : "ok") + "\n";
        } else {
          bands_csv += "nan,,,,insufficient_decay\n";
        }
      }
      const fs::path bands_path =
          fs::path(args.out_dir) / (stem + "_bands.csv");
      rird::write_text_file(bands_path, bands_csv);
      manifest.outputs.push_back(bands_path.string());
    }

    if (files.size() == 2) {
      const double gain =
          rird::dynamic_improvement(files[0].signal, files[1].signal);
      json improvement;
      improvement["before"] = args.inputs[0];
      improvement["after"] = args.inputs[1];
      improvement["dynamic_improvement_db"] = gain;
      const fs::path path = fs::path(args.out_dir) / "improvement.json";
      rird::write_text_file(path, improvement.dump(2) + "\n");
      manifest.outputs.push_back(path.string());
      std::cout << "dynamic improvement: " << gain << " dB\n";
    }

    for (const std::string& artifact : manifest.outputs) {
      rird::write_manifest(artifact, manifest);
    }
    return kExitOk;
  } catch (const std::exception& e) {
    return fail_processing(e.what());
  }
}

struct SynthArgs {
  std::string spec_path, plan_path, out_dir = ".";
  std::string emit_spec, emit_plan;
};

int cmd_synth(const SynthArgs& args) {
  if (!args.emit_spec.empty()) {
    rird::write_text_file(args.emit_spec,
                          rird::ModalSpec::defaults().to_json().dump(2) + "\n");
    std::cout << "wrote " << args.emit_spec << "\n";
    return kExitOk;
  }
  if (!args.emit_plan.empty()) {
    rird::write_text_file(args.emit_plan,
                          rird::SweepPlan::defaults().to_json().dump(2) + "\n");
    std::cout << "wrote " << args.emit_plan << "\n";
    return kExitOk;
  }
  if (args.spec_path.empty() == args.plan_path.empty()) {
    return fail_input("synth needs exactly one of --spec or --plan");
  }

  try {
    fs::create_directories(args.out_dir);
    if (!args.plan_path.empty()) {
      rird::SweepPlan plan;
      try {
        plan = rird::SweepPlan::load(args.plan_path);
      } catch (const std::exception& e) {
        return fail_input(std::string("invalid plan: ") + e.what());
      }
      std::size_t written = 0;
      for (std::size_t fi = 0; fi < plan.decay_factors.size(); ++fi) {
        rird::ModalSpec spec = plan.base;
        for (rird::Mode& m : spec.modes) m.alpha *= plan.decay_factors[fi];
        const rird::Signal clean = rird::gen_modal(spec);
        for (std::size_t si = 0; si < plan.noise_seeds.size(); ++si) {
          const rird::Signal noise =
              rird::gen_shaped_noise(spec.length, spec.rate,
                                     plan.noise_seeds[si], plan.noise_shape);
          for (std::size_t ki = 0; ki < plan.snr_levels_db.size(); ++ki) {
            const rird::Signal noisy =
                rird::mix_at_snr(clean, noise, plan.snr_levels_db[ki]);
            char name[96];
            std::snprintf(name, sizeof(name), "f%g_s%02zu_snr%g.wav",
                          plan.decay_factors[fi], si,
                          plan.snr_levels_db[ki]);
            const fs::path path = fs::path(args.out_dir) / name;
            rird::write_wav(path, noisy, rird::WavFormat::float32);
            rird::RunManifest manifest = rird::RunManifest::make(
                "synth --plan", plan.to_json(), plan.seed);
            manifest.resolved_config["trial"] = {
                {"factor", plan.decay_factors[fi]},
                {"seed_index", si},
                {"noise_seed", plan.noise_seeds[si]},
                {"snr_db", plan.snr_levels_db[ki]}};
            manifest.outputs = {path.string()};
            rird::write_manifest(path, manifest);
            ++written;
          }
        }
      }
      std::cout << "wrote " << written << " WAV files to " << args.out_dir
                << "\n";
      return kExitOk;
    }

    rird::ModalSpec spec;
    try {
      std::ifstream in(args.spec_path);
      if (!in) throw std::invalid_argument("cannot open " + args.spec_path);
      json j;
      in >> j;
      spec = rird::ModalSpec::from_json(j);
    } catch (const std::exception& e) {
      return fail_input(std::string("invalid spec: ") + e.what());
    }
    const rird::Signal clean = rird::gen_modal(spec);
    const fs::path path = fs::path(args.out_dir) / "modal.wav";
    rird::write_wav(path, clean, rird::WavFormat::float32);
    rird::RunManifest manifest =
        rird::RunManifest::make("synth --spec", spec.to_json(), 0);
    manifest.inputs = {args.spec_path};
    manifest.outputs = {path.string()};
    rird::write_manifest(path, manifest);
    std::cout << "wrote " << path.string() << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    return fail_processing(e.what());
  }
}

struct SweepArgs {
  std::string plan_path, config_path, out_dir = ".";
  bool default_plan = false;
  int threads = 0;
  std::optional<std::uint64_t> seed;
  std::vector<double> factors;
  std::vector<double> snrs;
  int max_seeds = 0;
};

int cmd_sweep(const SweepArgs& args) {
  rird::SweepPlan plan;
  rird::PipelineConfig config;
  try {
    if (args.default_plan == !args.plan_path.empty()) {
      return fail_input("sweep needs exactly one of --plan or --default-plan");
    }
    plan = args.default_plan ? rird::SweepPlan::defaults()
                             : rird::SweepPlan::load(args.plan_path);
    if (!args.config_path.empty()) {
      config = rird::PipelineConfig::load(args.config_path);
    }
    if (args.seed) plan.seed = *args.seed;
    if (!args.factors.empty()) plan.decay_factors = args.factors;
    if (!args.snrs.empty()) plan.snr_levels_db = args.snrs;
    if (args.max_seeds > 0 &&
        static_cast<std::size_t>(args.max_seeds) < plan.noise_seeds.size()) {
      plan.noise_seeds.resize(static_cast<std::size_t>(args.max_seeds));
    }
    plan.validate();
  } catch (const std::exception& e) {
    return fail_input(e.what());
  }

  try {
    const int threads = resolve_threads(args.threads);
    const std::vector<rird::ExperimentRecord> records =
        rird::run_sweep(plan, config, threads);

    rird::RunManifest manifest =
        rird::RunManifest::make("sweep", plan.to_json(), plan.seed);
    manifest.resolved_config["pipeline"] = config.to_json();
    manifest.outputs = {"records.csv", "trials.csv", "summary.json"};
    rird::write_sweep_outputs(args.out_dir, records, true,
                              manifest.to_json());

    std::size_t failed = 0;
    for (const auto& rec : records) failed += !rec.error.empty();
    std::cout << "sweep: " << records.size() - failed << "/" << records.size()
              << " trials succeeded; outputs in " << args.out_dir << "\n";
    if (failed * 20 > records.size()) {  // > 5% failed
      return kExitDegraded;
    }
    return kExitOk;
  } catch (const std::exception& e) {
    return fail_processing(e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Room impulse response denoising and decay-time evaluation"};
  app.set_version_flag("--version", rird::kVersion);
  app.require_subcommand(1);

  DenoiseArgs denoise_args;
  CLI::App* denoise = app.add_subcommand(
      "denoise", "Denoise a mono WAV room impulse response");
  denoise->add_option("input", denoise_args.input, "Input WAV");
  denoise->add_option("output", denoise_args.output, "Output WAV");
  denoise->add_option("--config", denoise_args.config_path,
                      "Pipeline config JSON");
  denoise->add_option("--seed", denoise_args.seed, "Override the config seed");
  denoise->add_flag("--baseline", denoise_args.baseline,
                    "Thresholding only, approximation untouched");
  denoise->add_option("--emit-default-config", denoise_args.emit_config,
                      "Write the default config JSON and exit");

  EvaluateArgs eval_args;
  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "Energy decay curve, per-band DT60 and dynamic improvement");
  evaluate->add_option("inputs", eval_args.inputs,
                       "One WAV (metrics) or two (before/after)");
  evaluate->add_option("--out", eval_args.out_dir, "Output directory");
  evaluate->add_option("--bands", eval_args.bands,
                       "Third-octave band centers in Hz");
  evaluate->add_option("--fit-upper", eval_args.fit_upper,
                       "Upper fit bound in dB");
  evaluate->add_option("--fit-lower", eval_args.fit_lower,
                       "Lower fit bound in dB");
  evaluate->add_option("--edc-stride", eval_args.edc_stride,
                       "Emit every Nth EDC sample");

  SynthArgs synth_args;
  CLI::App* synth =
      app.add_subcommand("synth", "Generate modal test signals");
  synth->add_option("--spec", synth_args.spec_path, "Modal spec JSON");
  synth->add_option("--plan", synth_args.plan_path,
                    "Sweep plan JSON (writes every noisy trial)");
  synth->add_option("--out", synth_args.out_dir, "Output directory");
  synth->add_option("--emit-default-spec", synth_args.emit_spec,
                    "Write the default modal spec JSON and exit");
  synth->add_option("--emit-default-plan", synth_args.emit_plan,
                    "Write the default sweep plan JSON and exit");

  SweepArgs sweep_args;
  CLI::App* sweep = app.add_subcommand(
      "sweep", "Run the synthetic experiment sweep (noisy/baseline/proposed)");
  sweep->add_option("--plan", sweep_args.plan_path, "Sweep plan JSON");
  sweep->add_flag("--default-plan", sweep_args.default_plan,
                  "Use the built-in default plan");
  sweep->add_option("--config", sweep_args.config_path,
                    "Pipeline config JSON");
  sweep->add_option("--out", sweep_args.out_dir, "Output directory");
  sweep->add_option("--threads", sweep_args.threads,
                    "Worker count (overrides RIRDENOISE_THREADS)");
  sweep->add_option("--seed", sweep_args.seed, "Override the plan seed");
  sweep->add_option("--factors", sweep_args.factors,
                    "Restrict decay factors");
  sweep->add_option("--snr", sweep_args.snrs, "Restrict SNR levels (dB)");
  sweep->add_option("--seeds", sweep_args.max_seeds,
                    "Use only the first N noise seeds");

  CLI11_PARSE(app, argc, argv);

  if (denoise->parsed()) {
    if (denoise_args.emit_config.empty() &&
        (denoise_args.input.empty() || denoise_args.output.empty())) {
      return fail_input("denoise needs input and output WAV paths");
    }
    return cmd_denoise(denoise_args);
  }
  if (evaluate->parsed()) return cmd_evaluate(eval_args);
  if (synth->parsed()) return cmd_synth(synth_args);
  if (sweep->parsed()) return cmd_sweep(sweep_args);
  return kExitInput;
}
