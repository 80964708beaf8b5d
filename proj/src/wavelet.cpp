#include "rird/wavelet.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "src/wavelet_tables.hpp"

namespace rird {

std::string to_string(BoundaryMode mode) {
  return mode == BoundaryMode::periodic ? "periodic" : "symmetric";
}

BoundaryMode boundary_mode_from_string(const std::string& name) {
  if (name == "periodic") return BoundaryMode::periodic;
  if (name == "symmetric") return BoundaryMode::symmetric;
  throw std::invalid_argument("unknown boundary mode: " + name);
}

WaveletFilterBank WaveletFilterBank::from_scaling(std::string name,
                                                  std::vector<double> scaling) {
  WaveletFilterBank bank;
  bank.name = std::move(name);
  bank.analysis_low = std::move(scaling);
  const std::size_t f = bank.analysis_low.size();
  bank.analysis_high.resize(f);
  for (std::size_t k = 0; k < f; ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    bank.analysis_high[k] = sign * bank.analysis_low[f - 1 - k];
  }
  bank.synthesis_low.assign(bank.analysis_low.rbegin(),
                            bank.analysis_low.rend());
  bank.synthesis_high.assign(bank.analysis_high.rbegin(),
                             bank.analysis_high.rend());
  bank.validate();
  return bank;
}

WaveletFilterBank WaveletFilterBank::named(const std::string& name) {
  using Table = std::pair<const double*, std::size_t>;
  static const std::map<std::string, Table> banks = {
      {"haar", {tables::kHaar, 2}},   {"db2", {tables::kDb2, 4}},
      {"db3", {tables::kDb3, 6}},     {"db4", {tables::kDb4, 8}},
      {"db5", {tables::kDb5, 10}},    {"db6", {tables::kDb6, 12}},
      {"db7", {tables::kDb7, 14}},    {"db8", {tables::kDb8, 16}},
      {"db9", {tables::kDb9, 18}},    {"db10", {tables::kDb10, 20}},
      {"dmey", {tables::kDmey, 62}},
  };
  auto it = banks.find(name);
  if (it == banks.end()) {
    std::string known;
    for (const auto& [key, value] : banks) {
      known += known.empty() ? key : ", " + key;
    }
    throw std::invalid_argument("unknown wavelet '" + name + "' (shipped: " +
                                known + ")");
  }
  const auto [ptr, len] = it->second;
  return from_scaling(name, std::vector<double>(ptr, ptr + len));
}

const std::vector<std::string>& WaveletFilterBank::shipped_names() {
  static const std::vector<std::string> names = {
      "haar", "db2", "db3", "db4",  "db5", "db6",
      "db7",  "db8", "db9", "db10", "dmey"};
  return names;
}

WaveletFilterBank WaveletFilterBank::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open filter bank file: " +
                                path.string());
  }
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line) && rows.size() < 4) {
    std::istringstream ls(line);
    std::vector<double> row;
    double v;
    while (ls >> v) row.push_back(v);
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.size() != 4) {
    throw std::invalid_argument(
        "filter bank file must have four coefficient lines "
        "(analysis_low, analysis_high, synthesis_low, synthesis_high)");
  }
  WaveletFilterBank bank;
  bank.name = path.stem().string();
  bank.analysis_low = std::move(rows[0]);
  bank.analysis_high = std::move(rows[1]);
  bank.synthesis_low = std::move(rows[2]);
  bank.synthesis_high = std::move(rows[3]);
  bank.validate();
  return bank;
}

void WaveletFilterBank::validate() const {
  const std::size_t f = analysis_low.size();
  if (f < 2 || f % 2 != 0) {
    throw std::invalid_argument("filter bank '" + name +
                                "': length must be even and >= 2");
  }
  if (analysis_high.size() != f || synthesis_low.size() != f ||
      synthesis_high.size() != f) {
    throw std::invalid_argument("filter bank '" + name +
                                "': all four filters must have equal length");
  }
  for (const auto* filt :
       {&analysis_low, &analysis_high, &synthesis_low, &synthesis_high}) {
    for (double v : *filt) {
      if (!std::isfinite(v)) {
        throw std::invalid_argument("filter bank '" + name +
                                    "': non-finite coefficient");
      }
    }
  }
  for (std::size_t k = 0; k < f; ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    if (std::abs(analysis_high[k] - sign * analysis_low[f - 1 - k]) > 1e-10) {
      throw std::invalid_argument("filter bank '" + name +
                                  "': QMF relation violated");
    }
    if (std::abs(synthesis_low[k] - analysis_low[f - 1 - k]) > 1e-10 ||
        std::abs(synthesis_high[k] - analysis_high[f - 1 - k]) > 1e-10) {
      throw std::invalid_argument(
          "filter bank '" + name +
          "': synthesis filters must be time-reversed analysis filters");
    }
  }
  const double dc =
      std::accumulate(analysis_low.begin(), analysis_low.end(), 0.0);
  if (std::abs(dc - std::sqrt(2.0)) > 1e-8) {
    throw std::invalid_argument("filter bank '" + name +
                                "': sum(analysis_low) must be sqrt(2)");
  }
}

namespace detail {

namespace {

// Half-point symmetric extension of `input` by (F-1) samples per side,
// placed in a zero-padded buffer so convolution loops need no bounds checks.
// Layout: buffer[pad + p] == ext[p] for p in [0, n + 2(F-1)).
std::vector<double> symmetric_buffer(std::span<const double> input,
                                     std::size_t filter_len,
                                     std::size_t& pad_out) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(input.size());
  const std::ptrdiff_t f = static_cast<std::ptrdiff_t>(filter_len);
  const std::ptrdiff_t ne = n + 2 * (f - 1);
  const std::ptrdiff_t pad = f;
  std::vector<double> buf(static_cast<std::size_t>(ne + 2 * pad), 0.0);
  for (std::ptrdiff_t p = 0; p < ne; ++p) {
    std::ptrdiff_t q = p - (f - 1);
    while (q < 0 || q >= n) {
      q = (q < 0) ? -q - 1 : 2 * n - 1 - q;
    }
    buf[static_cast<std::size_t>(p + pad)] = input[static_cast<std::size_t>(q)];
  }
  pad_out = static_cast<std::size_t>(pad);
  return buf;
}

std::size_t symmetric_output_length(std::size_t n, std::size_t f) {
  // Largest o with window [2o+1-(F-1), 2o+1] overlapping [0, n + 2(F-1)).
  return (n + 3 * f - 3) / 2;
}

}  // namespace

void analysis_step(std::span<const double> input,
                   const WaveletFilterBank& bank, BoundaryMode mode,
                   std::vector<double>& approx, std::vector<double>& detail) {
  const auto& g = bank.analysis_low;
  const auto& q = bank.analysis_high;
  const std::size_t f = g.size();
  const std::size_t n = input.size();

  if (mode == BoundaryMode::periodic) {
    const std::size_t half = n / 2;
    approx.assign(half, 0.0);
    detail.assign(half, 0.0);
    for (std::size_t o = 0; o < half; ++o) {
      std::size_t idx = (2 * o + 1) % n;
      double sa = 0.0, sd = 0.0;
      for (std::size_t k = 0; k < f; ++k) {
        const double v = input[idx];
        sa += g[k] * v;
        sd += q[k] * v;
        idx = (idx == 0) ? n - 1 : idx - 1;
      }
      approx[o] = sa;
      detail[o] = sd;
    }
    return;
  }

  std::size_t pad = 0;
  const std::vector<double> buf = symmetric_buffer(input, f, pad);
  const std::size_t out_len = symmetric_output_length(n, f);
  approx.assign(out_len, 0.0);
  detail.assign(out_len, 0.0);
  for (std::size_t o = 0; o < out_len; ++o) {
    const double* base = buf.data() + pad + 2 * o + 1;
    double sa = 0.0, sd = 0.0;
    for (std::size_t k = 0; k < f; ++k) {
      const double v = base[-static_cast<std::ptrdiff_t>(k)];
      sa += g[k] * v;
      sd += q[k] * v;
    }
    approx[o] = sa;
    detail[o] = sd;
  }
}

std::vector<double> synthesis_step(std::span<const double> approx,
                                   std::span<const double> detail,
                                   const WaveletFilterBank& bank,
                                   BoundaryMode mode,
                                   std::size_t output_length) {
  if (approx.size() != detail.size()) {
    throw std::invalid_argument(
        "synthesis: approximation/detail length mismatch");
  }
  const std::size_t f = bank.length();
  // Adjoint of the analysis correlation uses the analysis filters, which for
  // a valid bank equal the reversed synthesis filters.
  std::vector<double> gr(f), qr(f);
  for (std::size_t k = 0; k < f; ++k) {
    gr[k] = bank.synthesis_low[f - 1 - k];
    qr[k] = bank.synthesis_high[f - 1 - k];
  }

  if (mode == BoundaryMode::periodic) {
    const std::size_t n = output_length;
    if (approx.size() != n / 2 || n % 2 != 0) {
      throw std::invalid_argument("synthesis: coefficient/length mismatch");
    }
    std::vector<double> out(n, 0.0);
    for (std::size_t o = 0; o < approx.size(); ++o) {
      std::size_t idx = (2 * o + 1) % n;
      const double av = approx[o];
      const double dv = detail[o];
      for (std::size_t k = 0; k < f; ++k) {
        out[idx] += av * gr[k] + dv * qr[k];
        idx = (idx == 0) ? n - 1 : idx - 1;
      }
    }
    return out;
  }

  const std::size_t n = output_length;
  if (approx.size() != symmetric_output_length(n, f)) {
    throw std::invalid_argument("synthesis: coefficient/length mismatch");
  }
  const std::size_t ne = n + 2 * (f - 1);
  const std::size_t pad = f;
  std::vector<double> acc(ne + 2 * pad, 0.0);
  for (std::size_t o = 0; o < approx.size(); ++o) {
    double* base = acc.data() + pad + 2 * o + 1;
    const double av = approx[o];
    const double dv = detail[o];
    for (std::size_t k = 0; k < f; ++k) {
      base[-static_cast<std::ptrdiff_t>(k)] += av * gr[k] + dv * qr[k];
    }
  }
  std::vector<double> out(n);
  for (std::size_t m = 0; m < n; ++m) {
    out[m] = acc[pad + (f - 1) + m];
  }
  return out;
}

}  // namespace detail

int max_levels(std::size_t length, BoundaryMode mode) {
  if (length < 2) return 0;
  if (mode == BoundaryMode::symmetric) return 32;
  int levels = 0;
  while (length % 2 == 0 && levels < 63) {
    length /= 2;
    ++levels;
  }
  return levels;
}

WaveletDecomposition decompose(const Signal& signal,
                               const WaveletFilterBank& bank, int levels,
                               BoundaryMode mode) {
  validate(signal);
  bank.validate();
  if (levels < 1) {
    throw std::invalid_argument("decompose: levels must be >= 1");
  }
  const std::size_t n = signal.size();
  const int feasible = max_levels(n, mode);
  if (levels > feasible) {
    throw std::invalid_argument(
        "decompose: " + std::to_string(levels) +
        " levels infeasible for length " + std::to_string(n) +
        " (max feasible level is " + std::to_string(feasible) + ")");
  }
  if (mode == BoundaryMode::periodic &&
      n % (std::size_t{1} << levels) != 0) {
    throw std::invalid_argument(
        "decompose: periodic mode requires length divisible by 2^levels; "
        "pad the signal to a multiple of " +
        std::to_string(std::size_t{1} << levels));
  }

  WaveletDecomposition dec;
  dec.levels = levels;
  dec.boundary = mode;
  dec.original_length = n;
  dec.sample_rate = signal.sample_rate;

  std::vector<double> current = signal.samples;
  for (int level = 0; level < levels; ++level) {
    dec.level_lengths.push_back(current.size());
    std::vector<double> approx, det;
    detail::analysis_step(current, bank, mode, approx, det);
    dec.details.push_back(std::move(det));
    current = std::move(approx);
  }
  dec.approximation = std::move(current);
  return dec;
}

Signal reconstruct(const WaveletDecomposition& dec,
                   const WaveletFilterBank& bank) {
  bank.validate();
  if (dec.levels < 1 ||
      dec.details.size() != static_cast<std::size_t>(dec.levels) ||
      dec.level_lengths.size() != static_cast<std::size_t>(dec.levels)) {
    throw std::invalid_argument("reconstruct: inconsistent decomposition");
  }
  std::vector<double> current = dec.approximation;
  for (int level = dec.levels - 1; level >= 0; --level) {
    current = detail::synthesis_step(current, dec.details[level], bank,
                                     dec.boundary, dec.level_lengths[level]);
  }
  if (current.size() != dec.original_length) {
    throw std::invalid_argument("reconstruct: length bookkeeping mismatch");
  }
  return Signal{std::move(current), dec.sample_rate};
}

double effective_rate(const WaveletDecomposition& dec, int level) {
  if (level < 0 || level >= dec.levels) {
    throw std::invalid_argument("effective_rate: level out of range [0, " +
                                std::to_string(dec.levels) + ")");
  }
  return dec.sample_rate / static_cast<double>(std::size_t{1} << (level + 1));
}

double cutoff_frequency(double sample_rate, int levels) {
  return sample_rate / static_cast<double>(std::size_t{1} << levels);
}

}  // namespace rird
