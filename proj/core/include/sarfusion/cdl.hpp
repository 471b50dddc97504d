#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "sarfusion/sparse.hpp"

namespace sarfusion {

/// Paired dictionaries sharing one sparse code per sample. Both matrices are
/// p x A with unit-norm columns.
struct CoupledDictionary {
  Eigen::MatrixXd ms;
  Eigen::MatrixXd brovey;

  int atom_count() const noexcept { return static_cast<int>(ms.cols()); }
  int patch_dim() const noexcept { return static_cast<int>(ms.rows()); }

  /// Largest | ||atom|| - 1 | over both dictionaries.
  double max_norm_deviation() const;

  friend bool operator==(const CoupledDictionary& a, const CoupledDictionary& b) {
    return a.ms == b.ms && a.brovey == b.brovey;
  }
};

/// How the shared coefficient row is recomputed after the atom pair update.
enum class CoefficientScaling {
  /// Least-squares optimum for the updated pair: (d_ms^T E_ms + d_b^T E_b) / 2.
  kLeastSquares,
  /// Projection on the unit stacked direction [d_ms; d_b] / sqrt(2).
  kUnitStack,
};

struct TrainConfig {
  int atom_count = 256;
  int sparsity = 4;
  int rounds = 20;
  std::uint64_t seed = 42;
  double residual_tol = 1e-8;
  /// Replace atoms no code uses with the column mean of the residual.
  bool refresh_empty_atoms = true;
  CoefficientScaling scaling = CoefficientScaling::kLeastSquares;
  int threads = 1;

  OmpOptions omp_options() const { return {sparsity, residual_tol}; }
  void validate() const;
};

struct TrainTrace {
  /// Objective after the first coding pass, before any atom update.
  double initial_objective = 0.0;
  std::vector<double> objective;           // after each round's atom sweep
  std::vector<int> empty_atoms;            // atoms with empty support per round
  std::vector<int> degenerate_updates;     // zero-direction fallbacks per round
  std::vector<double> max_norm_deviation;  // after each round
  std::vector<double> seconds;             // wall time per round

  std::size_t rounds() const noexcept { return objective.size(); }
};

struct TrainResult {
  CoupledDictionary dictionary;
  SparseCodeMatrix codes;
  TrainTrace trace;
};

struct AtomUpdate {
  Eigen::VectorXd atom_ms;
  Eigen::VectorXd atom_b;
  Eigen::VectorXd coefficients;  // restricted row; empty for the empty branch
};

/// D_MS = D_B = D_0 built from `atom_count` distinct, l2-normalized columns of
/// (X_MS + X_B) / 2 drawn under `seed`. Missing candidates are filled with
/// seeded pseudo-random unit vectors.
CoupledDictionary init_dictionary(const Eigen::MatrixXd& x_ms, const Eigen::MatrixXd& x_b,
                                  const TrainConfig& cfg);

/// ||X_MS - D_MS L||_F^2 + ||X_B - D_B L||_F^2
double objective(const Eigen::MatrixXd& x_ms, const Eigen::MatrixXd& x_b,
                 const CoupledDictionary& dict, const SparseCodeMatrix& codes);

/// Columns whose code carries a non-zero coefficient on atom n.
std::vector<int> atom_support(const SparseCodeMatrix& codes, int n);

/// X_r - D_r L, dense p x q.
Eigen::MatrixXd full_error(const Eigen::MatrixXd& x, const Eigen::MatrixXd& d,
                           const SparseCodeMatrix& codes);

/// Error with atom n's contribution added back, restricted to `support`.
Eigen::MatrixXd restricted_error(const Eigen::MatrixXd& x, const Eigen::MatrixXd& d,
                                 const SparseCodeMatrix& codes, int n,
                                 const std::vector<int>& support);

/// Coefficients of atom n on `support`, in support order.
Eigen::VectorXd restricted_row(const SparseCodeMatrix& codes, int n,
                               const std::vector<int>& support);

/// One atom-pair update.
///
/// Non-empty branch: d_r = E_r * row, normalized per dictionary, then the row
/// is recomputed from the stacked error according to `scaling`. Throws
/// NumericalError when E_r * row vanishes for either dictionary.
///
/// Empty branch (`empty` set, E_r are the full error matrices): each atom is
/// the normalized mean of its error columns, or a unit pseudo-random vector
/// drawn from `reseed` when that mean is zero.
AtomUpdate update_atom_pair(const Eigen::MatrixXd& e_ms, const Eigen::MatrixXd& e_b,
                            const Eigen::VectorXd& row, bool empty,
                            CoefficientScaling scaling = CoefficientScaling::kLeastSquares,
                            std::uint64_t reseed = 0);

/// Non-incremental single atom step: recomputes the errors from scratch,
/// applies update_atom_pair to atom n and writes the result into `dict` and
/// `codes`. Returns true when the empty branch was taken.
bool atom_step(const Eigen::MatrixXd& x_ms, const Eigen::MatrixXd& x_b, CoupledDictionary& dict,
               SparseCodeMatrix& codes, int n, const TrainConfig& cfg);

/// Re-solves every code's coefficients by least squares on its current
/// support against the stacked dictionary. Supports are left unchanged.
void refit_coefficients(const Eigen::MatrixXd& x_ms, const Eigen::MatrixXd& x_b,
                        const CoupledDictionary& dict, SparseCodeMatrix& codes);

/// Alternating joint coding and sequential atom sweeps for `cfg.rounds` rounds.
/// Inputs are expected to be mean-centered patch matrices of equal shape.
TrainResult train(const Eigen::MatrixXd& x_ms, const Eigen::MatrixXd& x_b, const TrainConfig& cfg);

/// Unit vector with entries drawn uniformly from [-1, 1] under `seed`.
Eigen::VectorXd seeded_unit_vector(Eigen::Index length, std::uint64_t seed);

}  // namespace sarfusion
