#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "rird/acoustics.hpp"
#include "rird/pipeline.hpp"
#include "rird/synth.hpp"
#include "rird/version.hpp"
#include "rird/wavelet.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

rird::Signal to_signal(const py::array_t<double>& samples, double rate) {
  auto buf = samples.request();
  if (buf.ndim != 1) {
    throw std::invalid_argument("expected a 1-d sample array");
  }
  rird::Signal s;
  s.sample_rate = rate;
  const double* data = static_cast<const double*>(buf.ptr);
  s.samples.assign(data, data + buf.shape[0]);
  return s;
}

py::array_t<double> to_array(const std::vector<double>& v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

rird::PipelineConfig config_from_str(const std::string& config_json) {
  if (config_json.empty()) return {};
  return rird::PipelineConfig::from_json(json::parse(config_json));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Room impulse response denoising core";
  m.attr("__version__") = rird::kVersion;

  m.def(
      "denoise",
      [](const py::array_t<double>& samples, double rate,
         const std::string& config_json) {
        auto [out, report] =
            rird::denoise(to_signal(samples, rate), config_from_str(config_json));
        return py::make_tuple(to_array(out.samples), report.to_json().dump());
      },
      py::arg("samples"), py::arg("rate"), py::arg("config_json") = "",
      "Full denoising chain; returns (samples, report_json).");

  m.def(
      "denoise_baseline",
      [](const py::array_t<double>& samples, double rate,
         const std::string& config_json) {
        auto [out, report] = rird::denoise_baseline(
            to_signal(samples, rate), config_from_str(config_json));
        return py::make_tuple(to_array(out.samples), report.to_json().dump());
      },
      py::arg("samples"), py::arg("rate"), py::arg("config_json") = "",
      "Thresholding-only chain; returns (samples, report_json).");

  m.def(
      "decompose",
      [](const py::array_t<double>& samples, double rate,
         const std::string& wavelet, int levels, const std::string& boundary) {
        const auto bank = rird::WaveletFilterBank::named(wavelet);
        const auto dec =
            rird::decompose(to_signal(samples, rate), bank, levels,
                            rird::boundary_mode_from_string(boundary));
        py::list details;
        for (const auto& d : dec.details) details.append(to_array(d));
        return py::make_tuple(details, to_array(dec.approximation));
      },
      py::arg("samples"), py::arg("rate"), py::arg("wavelet") = "dmey",
      py::arg("levels") = 8, py::arg("boundary") = "periodic",
      "Multi-level analysis; returns ([d_0..d_{L-1}], a_{L-1}).");

  m.def(
      "reconstruct",
      [](const py::list& details, const py::array_t<double>& approximation,
         double rate, const std::string& wavelet, std::size_t original_length,
         const std::string& boundary) {
        rird::WaveletDecomposition dec;
        dec.boundary = rird::boundary_mode_from_string(boundary);
        dec.levels = static_cast<int>(details.size());
        dec.sample_rate = rate;
        dec.original_length = original_length;
        std::size_t length = original_length;
        for (const auto& item : details) {
          auto arr = item.cast<py::array_t<double>>();
          dec.level_lengths.push_back(length);
          length = dec.boundary == rird::BoundaryMode::periodic
                       ? length / 2
                       : arr.size();
          dec.details.push_back(
              std::vector<double>(arr.data(), arr.data() + arr.size()));
        }
        dec.approximation.assign(approximation.data(),
                                 approximation.data() + approximation.size());
        const auto bank = rird::WaveletFilterBank::named(wavelet);
        return to_array(rird::reconstruct(dec, bank).samples);
      },
      py::arg("details"), py::arg("approximation"), py::arg("rate"),
      py::arg("wavelet"), py::arg("original_length"),
      py::arg("boundary") = "periodic");

  m.def(
      "schroeder_edc",
      [](const py::array_t<double>& samples, double rate) {
        return to_array(
            rird::schroeder_edc(to_signal(samples, rate)).values_db);
      },
      py::arg("samples"), py::arg("rate"),
      "Energy decay curve in dB, 0 at n = 0.");

  m.def(
      "estimate_dt60",
      [](const py::array_t<double>& edc_db, double rate, double upper_db,
         double lower_db) {
        rird::EnergyDecayCurve edc;
        edc.sample_rate = rate;
        edc.values_db.assign(edc_db.data(), edc_db.data() + edc_db.size());
        const auto est =
            rird::estimate_dt60(edc, rird::FitRange{upper_db, lower_db});
        return py::make_tuple(est.dt60_seconds, est.fit_r2);
      },
      py::arg("edc_db"), py::arg("rate"), py::arg("upper_db") = -5.0,
      py::arg("lower_db") = -25.0, "Returns (dt60_seconds, fit_r2).");

  m.def("exact_mode_dt60", &rird::exact_mode_dt60, py::arg("alpha"),
        py::arg("rate"));

  m.def(
      "dynamic_improvement",
      [](const py::array_t<double>& before, const py::array_t<double>& after,
         double rate) {
        return rird::dynamic_improvement(to_signal(before, rate),
                                         to_signal(after, rate));
      },
      py::arg("before"), py::arg("after"), py::arg("rate"));

  m.def(
      "fit_envelope",
      [](const py::array_t<double>& samples, double rate) {
        const auto model = rird::fit_envelope(to_signal(samples, rate));
        py::dict d;
        d["x1"] = model.x1;
        d["x2"] = model.x2;
        d["x3"] = model.x3;
        d["fit_residual"] = model.fit_residual;
        d["no_decay_detected"] = model.no_decay_detected;
        return d;
      },
      py::arg("samples"), py::arg("rate"));

  m.def(
      "gen_modal",
      [](const std::string& spec_json) {
        const auto spec = rird::ModalSpec::from_json(json::parse(spec_json));
        return to_array(rird::gen_modal(spec).samples);
      },
      py::arg("spec_json"));

  m.def(
      "default_modal_spec",
      [] { return rird::ModalSpec::defaults().to_json().dump(); },
      "Default modal spec as JSON.");

  m.def(
      "gen_shaped_noise",
      [](std::size_t length, double rate, std::uint64_t seed,
         double cutoff_hz, int order) {
        return to_array(rird::gen_shaped_noise(length, rate, seed,
                                               {cutoff_hz, order})
                            .samples);
      },
      py::arg("length"), py::arg("rate"), py::arg("seed"),
      py::arg("cutoff_hz") = 150.0, py::arg("order") = 4);

  m.def(
      "mix_at_snr",
      [](const py::array_t<double>& clean, const py::array_t<double>& noise,
         double rate, double snr_db) {
        return to_array(rird::mix_at_snr(to_signal(clean, rate),
                                         to_signal(noise, rate), snr_db)
                            .samples);
      },
      py::arg("clean"), py::arg("noise"), py::arg("rate"), py::arg("snr_db"));

  m.def(
      "default_config",
      [] { return rird::PipelineConfig{}.to_json().dump(); },
      "Default pipeline config as JSON.");
}
