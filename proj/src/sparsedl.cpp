#include "rird/sparsedl.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "rird/rng.hpp"
#include "src/parallel.hpp"

namespace rird {

PatchMatrix build_patch_matrix(std::span<const double> source,
                               std::size_t window) {
  if (window < 2) {
    throw std::invalid_argument("build_patch_matrix: window must be >= 2");
  }
  if (source.size() <= window) {
    throw std::invalid_argument(
        "build_patch_matrix: source length must exceed the window (" +
        std::to_string(source.size()) + " <= " + std::to_string(window) + ")");
  }
  PatchMatrix patches;
  patches.window = window;
  patches.source_length = source.size();
  const std::size_t columns = source.size() - window;
  patches.data.resize(static_cast<Eigen::Index>(window),
                      static_cast<Eigen::Index>(columns));
  for (std::size_t j = 0; j < columns; ++j) {
    for (std::size_t i = 0; i < window; ++i) {
      patches.data(static_cast<Eigen::Index>(i),
                   static_cast<Eigen::Index>(j)) = source[j + i];
    }
  }
  return patches;
}

Eigen::VectorXd SparseCode::dense_column(Eigen::Index j) const {
  Eigen::VectorXd z = Eigen::VectorXd::Zero(atom_count);
  for (const Entry& e : columns[static_cast<std::size_t>(j)]) {
    z(e.atom) = e.value;
  }
  return z;
}

std::size_t SparseCode::total_support() const {
  std::size_t total = 0;
  for (const auto& column : columns) total += column.size();
  return total;
}

OmpResult omp_encode(const Dictionary& dict, const Eigen::VectorXd& column,
                     double tol, int max_support) {
  const Eigen::Index atoms = dict.atoms.cols();
  if (atoms < 1) {
    throw std::invalid_argument("omp_encode: dictionary has no atoms");
  }
  if (!(tol > 0.0)) {
    throw std::invalid_argument("omp_encode: tolerance must be positive");
  }
  if (!column.allFinite() || !dict.atoms.allFinite()) {
    throw std::invalid_argument("omp_encode: non-finite input");
  }

  OmpResult result;
  Eigen::VectorXd residual = column;
  double res2 = residual.squaredNorm();
  result.residual2 = res2;
  if (res2 <= tol) return result;  // the zero code is already feasible

  const int cap =
      std::min<Eigen::Index>(std::max(max_support, 0), atoms);
  std::vector<int> support;
  std::vector<char> selected(static_cast<std::size_t>(atoms), 0);
  Eigen::MatrixXd sub(dict.atoms.rows(), cap);
  Eigen::VectorXd coeffs;

  while (static_cast<int>(support.size()) < cap) {
    const Eigen::VectorXd corr = dict.atoms.transpose() * residual;
    int best = -1;
    double best_mag = 0.0;
    for (Eigen::Index k = 0; k < atoms; ++k) {
      if (selected[static_cast<std::size_t>(k)]) continue;
      const double mag = std::abs(corr(k));
      if (mag > best_mag) {
        best_mag = mag;
        best = static_cast<int>(k);
      }
    }
    if (best < 0 || best_mag <= 1e-13 * std::sqrt(res2)) break;

    selected[static_cast<std::size_t>(best)] = 1;
    sub.col(static_cast<Eigen::Index>(support.size())) = dict.atoms.col(best);
    support.push_back(best);
    const Eigen::Index s = static_cast<Eigen::Index>(support.size());

    // Full least-squares re-projection on the selected support.
    coeffs = sub.leftCols(s).colPivHouseholderQr().solve(column);
    residual = column - sub.leftCols(s) * coeffs;
    res2 = residual.squaredNorm();
    ++result.iterations;
    if (res2 <= tol) break;
  }

  result.entries.reserve(support.size());
  for (std::size_t i = 0; i < support.size(); ++i) {
    result.entries.push_back(
        {support[i], coeffs(static_cast<Eigen::Index>(i))});
  }
  result.residual2 = res2;
  return result;
}

namespace {

Eigen::VectorXd column_residual(const Eigen::MatrixXd& patches,
                                const Eigen::MatrixXd& atoms,
                                const SparseCode& code, Eigen::Index j) {
  Eigen::VectorXd r = patches.col(j);
  for (const SparseCode::Entry& e : code.columns[static_cast<std::size_t>(j)]) {
    r.noalias() -= e.value * atoms.col(e.atom);
  }
  return r;
}

}  // namespace

Dictionary ksvd_update(const Dictionary& dict, const Eigen::MatrixXd& patches,
                       SparseCode& code, const KsvdOptions& options) {
  const Eigen::Index atoms = dict.atoms.cols();
  const Eigen::Index columns = patches.cols();
  if (patches.rows() != dict.atoms.rows() ||
      code.columns.size() != static_cast<std::size_t>(columns) ||
      code.atom_count != atoms) {
    throw std::invalid_argument("ksvd_update: shape mismatch");
  }

  Eigen::MatrixXd updated = dict.atoms;

  // usage[j]: (column, entry index) pairs whose code uses atom j
  std::vector<std::vector<std::pair<Eigen::Index, std::size_t>>> usage(
      static_cast<std::size_t>(atoms));
  for (Eigen::Index j = 0; j < columns; ++j) {
    const auto& col = code.columns[static_cast<std::size_t>(j)];
    for (std::size_t e = 0; e < col.size(); ++e) {
      usage[static_cast<std::size_t>(col[e].atom)].emplace_back(j, e);
    }
  }

  std::vector<char> dead(static_cast<std::size_t>(atoms), 0);
  for (Eigen::Index a = 0; a < atoms; ++a) {
    const auto& users = usage[static_cast<std::size_t>(a)];
    if (users.empty()) {
      dead[static_cast<std::size_t>(a)] = 1;
      continue;
    }
    const Eigen::Index m = static_cast<Eigen::Index>(users.size());
    Eigen::VectorXd g(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      g(i) = code.columns[static_cast<std::size_t>(users[i].first)]
                         [users[i].second]
                 .value;
    }

    Eigen::VectorXd atom;
    Eigen::VectorXd g_new(m);
    if (options.exact_svd) {
      // Residual matrix without atom a, rank-1 factorization.
      Eigen::MatrixXd e_mat(patches.rows(), m);
      for (Eigen::Index i = 0; i < m; ++i) {
        const Eigen::Index col = users[i].first;
        e_mat.col(i) = column_residual(patches, updated, code, col) +
                       g(i) * updated.col(a);
      }
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(
          e_mat, Eigen::ComputeThinU | Eigen::ComputeThinV);
      atom = svd.matrixU().col(0);
      g_new = svd.singularValues()(0) * svd.matrixV().col(0);
    } else {
      // Single power-iteration step: atom <- E g / |E g|, row <- E^T atom,
      // with E g assembled column by column so E is never formed.
      atom = Eigen::VectorXd::Zero(patches.rows());
      for (Eigen::Index i = 0; i < m; ++i) {
        const Eigen::Index col = users[i].first;
        atom.noalias() +=
            g(i) * (column_residual(patches, updated, code, col) +
                    g(i) * updated.col(a));
      }
      const double norm = atom.norm();
      if (norm < 1e-12) {
        dead[static_cast<std::size_t>(a)] = 1;
        continue;
      }
      atom /= norm;
      for (Eigen::Index i = 0; i < m; ++i) {
        const Eigen::Index col = users[i].first;
        g_new(i) =
            (column_residual(patches, updated, code, col) +
             g(i) * updated.col(a))
                .dot(atom);
      }
    }
    // Deterministic sign: largest-magnitude component positive.
    Eigen::Index peak;
    atom.cwiseAbs().maxCoeff(&peak);
    if (atom(peak) < 0.0) {
      atom = -atom;
      g_new = -g_new;
    }
    updated.col(a) = atom;
    for (Eigen::Index i = 0; i < m; ++i) {
      code.columns[static_cast<std::size_t>(users[i].first)][users[i].second]
          .value = g_new(i);
    }
  }

  // Replacement pass: dead or over-coherent atoms take the currently
  // worst-reconstructed column.
  std::vector<double> residual2(static_cast<std::size_t>(columns));
  for (Eigen::Index j = 0; j < columns; ++j) {
    residual2[static_cast<std::size_t>(j)] =
        column_residual(patches, updated, code, j).squaredNorm();
  }
  std::vector<char> claimed(static_cast<std::size_t>(columns), 0);
  for (Eigen::Index a = 0; a < atoms; ++a) {
    bool replace = dead[static_cast<std::size_t>(a)] != 0;
    if (!replace && options.coherence_limit < 1.0) {
      for (Eigen::Index b = 0; b < a && !replace; ++b) {
        replace = std::abs(updated.col(a).dot(updated.col(b))) >
                  options.coherence_limit;
      }
    }
    if (!replace) continue;

    Eigen::Index worst = -1;
    double worst_res = -1.0;
    for (Eigen::Index j = 0; j < columns; ++j) {
      if (claimed[static_cast<std::size_t>(j)]) continue;
      if (patches.col(j).squaredNorm() < 1e-24) continue;
      if (residual2[static_cast<std::size_t>(j)] > worst_res) {
        worst_res = residual2[static_cast<std::size_t>(j)];
        worst = j;
      }
    }
    if (worst >= 0) {
      claimed[static_cast<std::size_t>(worst)] = 1;
      updated.col(a) = patches.col(worst).normalized();
    } else {
      updated.col(a).setZero();
      updated(a % patches.rows(), a) = 1.0;
    }
    if (!dead[static_cast<std::size_t>(a)]) {
      // Over-coherent atom: detach its stale activations.
      for (auto& column : code.columns) {
        std::erase_if(column, [a](const SparseCode::Entry& e) {
          return e.atom == static_cast<int>(a);
        });
      }
    }
  }

  return Dictionary{std::move(updated)};
}

namespace {

SparseCode encode_all(const Dictionary& dict, const Eigen::MatrixXd& patches,
                      std::span<const double> tolerances, int max_support,
                      int threads, std::vector<double>& residuals) {
  const Eigen::Index columns = patches.cols();
  SparseCode code;
  code.atom_count = dict.atoms.cols();
  code.columns.resize(static_cast<std::size_t>(columns));
  residuals.assign(static_cast<std::size_t>(columns), 0.0);
  parallel_for(static_cast<std::size_t>(columns), threads, [&](std::size_t j) {
    OmpResult r =
        omp_encode(dict, patches.col(static_cast<Eigen::Index>(j)),
                   tolerances[j], max_support);
    code.columns[j] = std::move(r.entries);
    residuals[j] = r.residual2;
  });
  return code;
}

}  // namespace

std::tuple<Dictionary, SparseCode, LearnStats> learn(
    const Eigen::MatrixXd& patches, int atom_count,
    std::span<const double> tolerances, const LearnOptions& options) {
  const Eigen::Index columns = patches.cols();
  const Eigen::Index rows = patches.rows();
  if (atom_count < 1) {
    throw std::invalid_argument("learn: need at least one atom");
  }
  if (tolerances.size() != static_cast<std::size_t>(columns)) {
    throw std::invalid_argument("learn: one tolerance per column required");
  }
  if (options.iterations < 1) {
    throw std::invalid_argument("learn: iterations must be >= 1");
  }

  // Initial atoms: energy-weighted seeded draw of distinct columns.
  std::vector<double> energies(static_cast<std::size_t>(columns));
  double total_energy = 0.0;
  for (Eigen::Index j = 0; j < columns; ++j) {
    energies[static_cast<std::size_t>(j)] = patches.col(j).squaredNorm();
    total_energy += energies[static_cast<std::size_t>(j)];
  }
  // Seeded energy-weighted draw of distinct columns; candidates nearly
  // parallel to an already chosen atom are rejected so duplicated content
  // cannot occupy two slots from the start.
  CounterRng rng = CounterRng::derive(options.seed, {0x6b737664});  // "ksvd"
  Dictionary dict;
  dict.atoms.resize(rows, atom_count);
  std::vector<char> taken(static_cast<std::size_t>(columns), 0);
  for (int a = 0; a < atom_count; ++a) {
    const auto acceptable = [&](Eigen::Index j, double coherence_limit) {
      if (taken[static_cast<std::size_t>(j)] ||
          energies[static_cast<std::size_t>(j)] <= 1e-24) {
        return false;
      }
      const Eigen::VectorXd candidate = patches.col(j).normalized();
      for (int b = 0; b < a; ++b) {
        if (std::abs(candidate.dot(dict.atoms.col(b))) > coherence_limit) {
          return false;
        }
      }
      return true;
    };
    Eigen::Index chosen = -1;
    for (int attempt = 0; attempt < 64 && total_energy > 0.0; ++attempt) {
      double u = rng.uniform() * total_energy;
      Eigen::Index candidate = columns - 1;
      for (Eigen::Index j = 0; j < columns; ++j) {
        u -= energies[static_cast<std::size_t>(j)];
        if (u <= 0.0) {
          candidate = j;
          break;
        }
      }
      // tolerate coherent picks once unique content runs out
      if (acceptable(candidate, attempt < 32 ? 0.99 : 1.1)) {
        chosen = candidate;
        break;
      }
    }
    if (chosen < 0) {
      for (Eigen::Index j = 0; j < columns; ++j) {
        if (acceptable(j, 1.1)) {
          chosen = j;
          break;
        }
      }
    }
    if (chosen >= 0) {
      taken[static_cast<std::size_t>(chosen)] = 1;
      dict.atoms.col(a) = patches.col(chosen).normalized();
    } else {
      Eigen::VectorXd v(rows);
      for (Eigen::Index i = 0; i < rows; ++i) v(i) = rng.gaussian();
      dict.atoms.col(a) = v.normalized();
    }
  }

  const int max_support = static_cast<int>(rows);
  KsvdOptions ksvd_opts;
  ksvd_opts.exact_svd = options.exact_svd;

  std::vector<double> residuals;
  SparseCode code =
      encode_all(dict, patches, tolerances, max_support, options.threads,
                 residuals);
  double prev_residual =
      std::accumulate(residuals.begin(), residuals.end(), 0.0);
  std::size_t prev_support = code.total_support();

  LearnStats stats;
  for (int it = 0; it < options.iterations; ++it) {
    dict = ksvd_update(dict, patches, code, ksvd_opts);
    code = encode_all(dict, patches, tolerances, max_support, options.threads,
                      residuals);
    stats.iterations_run = it + 1;

    const double residual =
        std::accumulate(residuals.begin(), residuals.end(), 0.0);
    const std::size_t support = code.total_support();
    const double res_change =
        std::abs(residual - prev_residual) / std::max(prev_residual, 1e-300);
    const double sup_change =
        std::abs(static_cast<double>(support) -
                 static_cast<double>(prev_support)) /
        std::max<double>(static_cast<double>(prev_support), 1.0);
    prev_residual = residual;
    prev_support = support;
    if (res_change < options.early_stop_rel &&
        sup_change < options.early_stop_rel) {
      break;
    }
  }

  stats.total_residual2 = prev_residual;
  stats.mean_support = columns > 0 ? static_cast<double>(prev_support) /
                                         static_cast<double>(columns)
                                   : 0.0;
  for (std::size_t j = 0; j < residuals.size(); ++j) {
    stats.max_residual2 = std::max(stats.max_residual2, residuals[j]);
    if (residuals[j] > tolerances[j]) ++stats.columns_unmet;
  }
  return {std::move(dict), std::move(code), stats};
}

std::tuple<Dictionary, SparseCode, LearnStats> learn(
    const PatchMatrix& patches, int atom_count,
    std::span<const double> tolerances, const LearnOptions& options) {
  return learn(patches.data, atom_count, tolerances, options);
}

std::vector<double> reconstruct_sequence(const Dictionary& dict,
                                         const SparseCode& code,
                                         std::size_t source_length,
                                         std::span<const double> passthrough) {
  if (passthrough.size() != source_length) {
    throw std::invalid_argument(
        "reconstruct_sequence: passthrough length mismatch");
  }
  const std::size_t window = static_cast<std::size_t>(dict.atoms.rows());
  std::vector<double> sums(source_length, 0.0);
  std::vector<std::uint32_t> counts(source_length, 0);
  Eigen::VectorXd column(dict.atoms.rows());
  for (std::size_t j = 0; j < code.columns.size(); ++j) {
    column.setZero();
    for (const SparseCode::Entry& e : code.columns[j]) {
      column.noalias() += e.value * dict.atoms.col(e.atom);
    }
    for (std::size_t i = 0; i < window && j + i < source_length; ++i) {
      sums[j + i] += column(static_cast<Eigen::Index>(i));
      counts[j + i] += 1;
    }
  }
  std::vector<double> out(source_length);
  for (std::size_t n = 0; n < source_length; ++n) {
    out[n] = counts[n] > 0 ? sums[n] / counts[n] : passthrough[n];
  }
  return out;
}

std::vector<double> column_tolerances(const ErrorSchedule& schedule,
                                      std::size_t window,
                                      std::span<const double> column_energies) {
  if (schedule.values.size() < column_energies.size() + window) {
    throw std::invalid_argument(
        "column_tolerances: schedule shorter than the source sequence");
  }
  std::vector<double> tols(column_energies.size());
  for (std::size_t j = 0; j < column_energies.size(); ++j) {
    tols[j] = std::max(schedule.values[j] * column_energies[j], 1e-12);
  }
  return tols;
}

nlohmann::json sparse_model_json(const Dictionary& dict,
                                 const SparseCode& code) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["window"] = dict.atoms.rows();
  j["atom_count"] = dict.atoms.cols();
  j["columns"] = code.columns.size();
  nlohmann::json atoms = nlohmann::json::array();
  for (Eigen::Index i = 0; i < dict.atoms.rows(); ++i) {
    for (Eigen::Index a = 0; a < dict.atoms.cols(); ++a) {
      atoms.push_back(dict.atoms(i, a));
    }
  }
  j["atoms"] = std::move(atoms);
  nlohmann::json triplets = nlohmann::json::array();
  for (std::size_t column = 0; column < code.columns.size(); ++column) {
    for (const SparseCode::Entry& e : code.columns[column]) {
      triplets.push_back({column, e.atom, e.value});
    }
  }
  j["code"] = std::move(triplets);
  return j;
}

}  // namespace rird
