#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "rird/envelope.hpp"

namespace rird {

/// Sliding-window matrix of a sequence: column j holds samples j .. j+d-1,
/// so entries are constant along anti-diagonals.
struct PatchMatrix {
  Eigen::MatrixXd data;  // d x M, M = source_length - d
  std::size_t window = 0;
  std::size_t source_length = 0;
};

PatchMatrix build_patch_matrix(std::span<const double> source,
                               std::size_t window);

struct Dictionary {
  Eigen::MatrixXd atoms;  // d x K, unit-norm columns
  Eigen::Index atom_count() const { return atoms.cols(); }
};

/// Column-sparse activation matrix (K x M).
struct SparseCode {
  struct Entry {
    int atom;
    double value;
  };
  std::vector<std::vector<Entry>> columns;
  Eigen::Index atom_count = 0;

  Eigen::VectorXd dense_column(Eigen::Index j) const;
  std::size_t total_support() const;
};

struct OmpResult {
  std::vector<SparseCode::Entry> entries;
  double residual2 = 0.0;
  int iterations = 0;
};

/// Greedy selection by max |correlation| with the residual, full least-squares
/// re-projection on the selected support each step. Stops when the squared
/// residual drops to `tol` or the support reaches max_support (capped at the
/// number of atoms).
OmpResult omp_encode(const Dictionary& dict, const Eigen::VectorXd& column,
                     double tol, int max_support);

struct KsvdOptions {
  bool exact_svd = false;          // rank-1 SVD update instead of the
                                   // single-pass approximate step
  double coherence_limit = 0.999;  // atoms more coherent than this with an
                                   // earlier atom are replaced
};

/// One dictionary-update sweep: every used atom is refreshed against the
/// residual without it and its code row re-fit by projection; unused or
/// over-coherent atoms are replaced by the worst-reconstructed column.
/// Updates `code` rows in place and returns the new dictionary.
Dictionary ksvd_update(const Dictionary& dict, const Eigen::MatrixXd& patches,
                       SparseCode& code, const KsvdOptions& options = {});

struct LearnOptions {
  int iterations = 20;
  std::uint64_t seed = 0;
  bool exact_svd = false;
  // Early stop when total support and total squared residual both move less
  // than this fraction between iterations.
  double early_stop_rel = 1e-3;
  int threads = 1;
};

struct LearnStats {
  int iterations_run = 0;
  double mean_support = 0.0;
  std::size_t columns_unmet = 0;  // tolerance missed even at full support
  double total_residual2 = 0.0;
  double max_residual2 = 0.0;
};

/// Error-constrained dictionary learning: alternates sparse coding (per-column
/// tolerances) with K-SVD updates, ending on a coding pass so the returned
/// code is consistent with the returned dictionary.
std::tuple<Dictionary, SparseCode, LearnStats> learn(
    const Eigen::MatrixXd& patches, int atom_count,
    std::span<const double> tolerances, const LearnOptions& options);

std::tuple<Dictionary, SparseCode, LearnStats> learn(
    const PatchMatrix& patches, int atom_count,
    std::span<const double> tolerances, const LearnOptions& options);

/// Overlap-average of D*Z along anti-diagonals; sample n is the mean of all
/// entries (i, j) with i + j = n. Indices no column covers (only the final
/// source sample) are copied from `passthrough`.
std::vector<double> reconstruct_sequence(const Dictionary& dict,
                                         const SparseCode& code,
                                         std::size_t source_length,
                                         std::span<const double> passthrough);

/// Per-column absolute squared-error tolerances: schedule value at the
/// column's first sample index times the column's squared norm, floored at
/// 1e-12.
std::vector<double> column_tolerances(const ErrorSchedule& schedule,
                                      std::size_t window,
                                      std::span<const double> column_energies);

/// Serializable learned model: atoms row-major under "atoms" (with "window"
/// rows x "atom_count" columns) and the code as column-sparse
/// [column, atom, value] triplets under "code".
nlohmann::json sparse_model_json(const Dictionary& dict,
                                 const SparseCode& code);

}  // namespace rird
