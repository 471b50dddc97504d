#include "sarfusion/sparse.hpp"

#include <cmath>
#include <string>

#include <Eigen/QR>

#include "parallel.hpp"
#include "sarfusion/errors.hpp"

namespace sarfusion {

namespace {

Eigen::VectorXd inverse_atom_norms(const Eigen::MatrixXd& dictionary) {
  Eigen::VectorXd inv(dictionary.cols());
  for (Eigen::Index k = 0; k < dictionary.cols(); ++k) {
    const double n = dictionary.col(k).norm();
    if (!(n > 0.0) || !std::isfinite(n)) {
      throw InvalidArgument("dictionary atom " + std::to_string(k) + " has zero or non-finite norm");
    }
    inv[k] = 1.0 / n;
  }
  return inv;
}

SparseCode omp_impl(const Eigen::MatrixXd& dictionary, const Eigen::VectorXd& inv_norms,
                    const Eigen::Ref<const Eigen::VectorXd>& signal, const OmpOptions& opts,
                    OmpTrace* trace) {
  const Eigen::Index atoms = dictionary.cols();
  SparseCode code;
  Eigen::VectorXd residual = signal;
  double residual_norm = residual.norm();
  if (trace) trace->residual_norms.assign(1, residual_norm);

  // 0 = free, 1 = in support, 2 = rejected as linearly dependent
  std::vector<unsigned char> state(static_cast<std::size_t>(atoms), 0);
  Eigen::MatrixXd sub(dictionary.rows(), 0);
  Eigen::VectorXd corr(atoms);

  while (static_cast<int>(code.support.size()) < opts.max_atoms &&
         residual_norm > opts.residual_tol) {
    corr.noalias() = dictionary.transpose() * residual;
    Eigen::Index best = -1;
    double best_score = 0.0;
    for (Eigen::Index k = 0; k < atoms; ++k) {
      if (state[static_cast<std::size_t>(k)] != 0) continue;
      const double score = std::abs(corr[k]) * inv_norms[k];
      if (score > best_score) {
        best_score = score;
        best = k;
      }
    }
    if (best < 0) break;

    Eigen::MatrixXd candidate(dictionary.rows(), sub.cols() + 1);
    candidate << sub, dictionary.col(best);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(candidate);
    qr.setThreshold(opts.rank_tol);
    if (qr.rank() < candidate.cols()) {
      state[static_cast<std::size_t>(best)] = 2;
      continue;
    }
    Eigen::VectorXd coef = qr.solve(signal);
    if (!coef.allFinite()) {
      throw RankError("least-squares solve on support produced non-finite coefficients");
    }
    state[static_cast<std::size_t>(best)] = 1;
    code.support.push_back(static_cast<int>(best));
    sub = std::move(candidate);
    residual = signal - sub * coef;
    residual_norm = residual.norm();
    code.coefficients.assign(coef.data(), coef.data() + coef.size());
    if (trace) trace->residual_norms.push_back(residual_norm);
  }
  return code;
}

void check_options(const OmpOptions& opts) {
  if (opts.max_atoms < 1) throw InvalidArgument("sparsity H0 must be >= 1");
  if (!(opts.residual_tol >= 0.0)) throw InvalidArgument("residual tolerance must be >= 0");
}

}  // namespace

Eigen::VectorXd SparseCode::to_dense(int atom_count) const {
  Eigen::VectorXd dense = Eigen::VectorXd::Zero(atom_count);
  for (std::size_t k = 0; k < support.size(); ++k) dense[support[k]] = coefficients[k];
  return dense;
}

Eigen::MatrixXd SparseCodeMatrix::to_dense() const {
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(atom_count, static_cast<Eigen::Index>(codes.size()));
  for (std::size_t m = 0; m < codes.size(); ++m) {
    dense.col(static_cast<Eigen::Index>(m)) = codes[m].to_dense(atom_count);
  }
  return dense;
}

SparseCode omp(const Eigen::MatrixXd& dictionary, const Eigen::VectorXd& signal,
               const OmpOptions& opts, OmpTrace* trace) {
  check_options(opts);
  if (signal.size() != dictionary.rows()) {
    throw DimensionError("signal length " + std::to_string(signal.size()) +
                         " does not match dictionary rows " + std::to_string(dictionary.rows()));
  }
  return omp_impl(dictionary, inverse_atom_norms(dictionary), signal, opts, trace);
}

SparseCodeMatrix code_columns(const Eigen::MatrixXd& stacked_dictionary,
                              const Eigen::MatrixXd& stacked_signals, const OmpOptions& opts,
                              int threads) {
  check_options(opts);
  if (stacked_signals.rows() != stacked_dictionary.rows()) {
    throw DimensionError("signal rows do not match dictionary rows");
  }
  const Eigen::VectorXd inv_norms = inverse_atom_norms(stacked_dictionary);
  SparseCodeMatrix out;
  out.atom_count = static_cast<int>(stacked_dictionary.cols());
  out.codes.resize(static_cast<std::size_t>(stacked_signals.cols()));
  detail::parallel_chunks(out.codes.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t m = begin; m < end; ++m) {
      out.codes[m] = omp_impl(stacked_dictionary, inv_norms,
                              stacked_signals.col(static_cast<Eigen::Index>(m)), opts, nullptr);
    }
  });
  return out;
}

SparseCodeMatrix joint_code(const Eigen::MatrixXd& d_ms, const Eigen::MatrixXd& d_b,
                            const Eigen::MatrixXd& x_ms, const Eigen::MatrixXd& x_b,
                            const OmpOptions& opts, int threads) {
  if (d_ms.rows() != d_b.rows() || d_ms.cols() != d_b.cols()) {
    throw DimensionError("coupled dictionaries differ in shape");
  }
  if (x_ms.rows() != x_b.rows() || x_ms.cols() != x_b.cols()) {
    throw DimensionError("paired patch matrices differ in shape");
  }
  if (x_ms.rows() != d_ms.rows()) throw DimensionError("patch dimension does not match dictionary");
  Eigen::MatrixXd dictionary(2 * d_ms.rows(), d_ms.cols());
  dictionary << d_ms, d_b;
  Eigen::MatrixXd signals(2 * x_ms.rows(), x_ms.cols());
  signals << x_ms, x_b;
  return code_columns(dictionary, signals, opts, threads);
}

}  // namespace sarfusion
