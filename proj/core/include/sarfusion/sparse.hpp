#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

namespace sarfusion {

/// One column of the shared code matrix: at most H0 (atom, coefficient) pairs,
/// in selection order.
struct SparseCode {
  std::vector<int> support;
  std::vector<double> coefficients;

  std::size_t size() const noexcept { return support.size(); }
  bool empty() const noexcept { return support.empty(); }

  /// Dense length-`atom_count` coefficient vector.
  Eigen::VectorXd to_dense(int atom_count) const;

  friend bool operator==(const SparseCode&, const SparseCode&) = default;
};

struct SparseCodeMatrix {
  std::vector<SparseCode> codes;  // one per patch column
  int atom_count = 0;

  std::size_t cols() const noexcept { return codes.size(); }
  Eigen::MatrixXd to_dense() const;

  friend bool operator==(const SparseCodeMatrix&, const SparseCodeMatrix&) = default;
};

struct OmpOptions {
  int max_atoms = 4;           // H0
  double residual_tol = 1e-8;  // absolute l2 norm
  /// Relative tolerance of the rank-revealing least-squares solve.
  double rank_tol = 1e-10;
};

/// Residual norm before the first selection and after every accepted atom.
struct OmpTrace {
  std::vector<double> residual_norms;
};

/// Orthogonal matching pursuit on a (possibly non-unit-norm) dictionary.
/// Atoms are selected by |<atom, r>| / ||atom||; coefficients are re-solved by
/// least squares on the whole support after every selection. A candidate that
/// would make the support rank-deficient is skipped.
SparseCode omp(const Eigen::MatrixXd& dictionary, const Eigen::VectorXd& signal,
               const OmpOptions& opts, OmpTrace* trace = nullptr);

/// Codes every column pair [x_ms; x_b] against [d_ms; d_b]. Columns are coded
/// independently; `threads` > 1 splits them into contiguous chunks.
SparseCodeMatrix joint_code(const Eigen::MatrixXd& d_ms, const Eigen::MatrixXd& d_b,
                            const Eigen::MatrixXd& x_ms, const Eigen::MatrixXd& x_b,
                            const OmpOptions& opts, int threads = 1);

/// Same as joint_code with the stacked dictionary and signals already built.
SparseCodeMatrix code_columns(const Eigen::MatrixXd& stacked_dictionary,
                              const Eigen::MatrixXd& stacked_signals,
                              const OmpOptions& opts, int threads = 1);

}  // namespace sarfusion
