#include "sarfusion/cdl.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <string>
#include <utility>

#include <Eigen/QR>

#include "sarfusion/errors.hpp"

namespace sarfusion {

namespace {

constexpr double kTinyNorm = 1e-12;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(seed ^ splitmix64(a)) ^ b);
}

void check_pair(const Eigen::MatrixXd& x_ms, const Eigen::MatrixXd& x_b) {
  if (x_ms.rows() != x_b.rows() || x_ms.cols() != x_b.cols()) {
    throw DimensionError("paired patch matrices differ in shape");
  }
}

void check_codes(const Eigen::MatrixXd& x, const Eigen::MatrixXd& d, const SparseCodeMatrix& codes) {
  if (x.rows() != d.rows()) throw DimensionError("patch dimension does not match dictionary");
  if (static_cast<Eigen::Index>(codes.cols()) != x.cols()) {
    throw DimensionError("code count does not match patch count");
  }
  if (codes.atom_count != d.cols()) throw DimensionError("code atom count does not match dictionary");
}

// residual -= D * code for one column
void subtract_code(Eigen::Ref<Eigen::VectorXd> residual, const Eigen::MatrixXd& d,
                   const SparseCode& code) {
  for (std::size_t k = 0; k < code.size(); ++k) {
    residual.noalias() -= code.coefficients[k] * d.col(code.support[k]);
  }
}

Eigen::VectorXd normalized_or_reseeded(const Eigen::VectorXd& v, std::uint64_t reseed) {
  const double n = v.norm();
  if (n > kTinyNorm && std::isfinite(n)) return v / n;
  return seeded_unit_vector(v.size(), reseed);
}

struct RowEntry {
  int column;
  int slot;
};

std::vector<std::vector<RowEntry>> build_rows(const SparseCodeMatrix& codes) {
  std::vector<std::vector<RowEntry>> rows(static_cast<std::size_t>(codes.atom_count));
  for (std::size_t m = 0; m < codes.codes.size(); ++m) {
    const auto& code = codes.codes[m];
    for (std::size_t k = 0; k < code.size(); ++k) {
      if (code.coefficients[k] != 0.0) {
        rows[static_cast<std::size_t>(code.support[k])].push_back(
            {static_cast<int>(m), static_cast<int>(k)});
      }
    }
  }
  return rows;
}

}  // namespace

double CoupledDictionary::max_norm_deviation() const {
  double worst = 0.0;
  for (const auto* d : {&ms, &brovey}) {
    for (Eigen::Index k = 0; k < d->cols(); ++k) {
      worst = std::max(worst, std::abs(d->col(k).norm() - 1.0));
    }
  }
  return worst;
}

void TrainConfig::validate() const {
  if (sparsity < 1) throw InvalidArgument("sparsity H0 must be >= 1");
  if (atom_count < sparsity) throw InvalidArgument("atom count must be >= sparsity H0");
  if (rounds < 1) throw InvalidArgument("rounds must be >= 1");
  if (!(residual_tol >= 0.0)) throw InvalidArgument("residual tolerance must be >= 0");
  if (threads < 1) throw InvalidArgument("threads must be >= 1");
}

Eigen::VectorXd seeded_unit_vector(Eigen::Index length, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Eigen::VectorXd v(length);
  for (;;) {
    for (Eigen::Index i = 0; i < length; ++i) {
      v[i] = static_cast<double>(rng() >> 11) * 0x1.0p-52 - 1.0;
    }
    const double n = v.norm();
    if (n > kTinyNorm) return v / n;
  }
}

CoupledDictionary init_dictionary(const Eigen::MatrixXd& x_ms, const Eigen::MatrixXd& x_b,
                                  const TrainConfig& cfg) {
  check_pair(x_ms, x_b);
  if (cfg.atom_count < 1) throw InvalidArgument("atom count must be >= 1");
  if (x_ms.rows() == 0) throw DataError("empty patch dimension");
  const Eigen::MatrixXd averaged = 0.5 * (x_ms + x_b);

  std::vector<Eigen::Index> candidates;
  for (Eigen::Index j = 0; j < averaged.cols(); ++j) {
    if (averaged.col(j).norm() > kTinyNorm) candidates.push_back(j);
  }
  if (candidates.empty()) throw DataError("no non-zero training column to seed the dictionary");

  // partial Fisher-Yates; mt19937_64 output is fully specified, so the draw
  // is reproducible across standard libraries
  std::mt19937_64 rng(cfg.seed);
  const std::size_t take = std::min<std::size_t>(candidates.size(),
                                                 static_cast<std::size_t>(cfg.atom_count));
  for (std::size_t i = 0; i < take; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng() % (candidates.size() - i));
    std::swap(candidates[i], candidates[j]);
  }

  Eigen::MatrixXd d0(x_ms.rows(), cfg.atom_count);
  for (int k = 0; k < cfg.atom_count; ++k) {
    const auto uk = static_cast<std::size_t>(k);
    if (uk < take) {
      d0.col(k) = averaged.col(candidates[uk]).normalized();
    } else {
      d0.col(k) = seeded_unit_vector(x_ms.rows(), mix_seed(cfg.seed, 0xD0, uk));
    }
  }
  return {d0, d0};
}

double objective(const Eigen::MatrixXd& x_ms, const Eigen::MatrixXd& x_b,
                 const CoupledDictionary& dict, const SparseCodeMatrix& codes) {
  check_pair(x_ms, x_b);
  check_codes(x_ms, dict.ms, codes);
  check_codes(x_b, dict.brovey, codes);
  double total = 0.0;
  Eigen::VectorXd r(x_ms.rows());
  for (Eigen::Index m = 0; m < x_ms.cols(); ++m) {
    const auto& code = codes.codes[static_cast<std::size_t>(m)];
    r = x_ms.col(m);
    subtract_code(r, dict.ms, code);
    total += r.squaredNorm();
    r = x_b.col(m);
    subtract_code(r, dict.brovey, code);
    total += r.squaredNorm();
  }
  return total;
}

std::vector<int> atom_support(const SparseCodeMatrix& codes, int n) {
  if (n < 0 || n >= codes.atom_count) throw InvalidArgument("atom index out of range");
  std::vector<int> support;
  for (std::size_t m = 0; m < codes.codes.size(); ++m) {
    const auto& code = codes.codes[m];
    for (std::size_t k = 0; k < code.size(); ++k) {
      if (code.support[k] == n && code.coefficients[k] != 0.0) {
        support.push_back(static_cast<int>(m));
        break;
      }
    }
  }
  return support;
}

Eigen::MatrixXd full_error(const Eigen::MatrixXd& x, const Eigen::MatrixXd& d,
                           const SparseCodeMatrix& codes) {
  check_codes(x, d, codes);
  Eigen::MatrixXd e = x;
  for (Eigen::Index m = 0; m < x.cols(); ++m) {
    subtract_code(e.col(m), d, codes.codes[static_cast<std::size_t>(m)]);
  }
  return e;
}

Eigen::VectorXd restricted_row(const SparseCodeMatrix& codes, int n, const std::vector<int>& support) {
  Eigen::VectorXd row = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(support.size()));
  for (std::size_t i = 0; i < support.size(); ++i) {
    const auto& code = codes.codes.at(static_cast<std::size_t>(support[i]));
    for (std::size_t k = 0; k < code.size(); ++k) {
      if (code.support[k] == n) row[static_cast<Eigen::Index>(i)] = code.coefficients[k];
    }
  }
  return row;
}

Eigen::MatrixXd restricted_error(const Eigen::MatrixXd& x, const Eigen::MatrixXd& d,
                                 const SparseCodeMatrix& codes, int n,
                                 const std::vector<int>& support) {
  check_codes(x, d, codes);
  if (n < 0 || n >= d.cols()) throw InvalidArgument("atom index out of range");
  if (support.empty()) throw InvalidArgument("restricted error needs a non-empty support");
  const Eigen::VectorXd row = restricted_row(codes, n, support);
  Eigen::MatrixXd e(x.rows(), static_cast<Eigen::Index>(support.size()));
  for (std::size_t i = 0; i < support.size(); ++i) {
    const int m = support[i];
    if (m < 0 || m >= x.cols()) throw DimensionError("support column out of range");
    auto col = e.col(static_cast<Eigen::Index>(i));
    col = x.col(m);
    subtract_code(col, d, codes.codes[static_cast<std::size_t>(m)]);
    col += row[static_cast<Eigen::Index>(i)] * d.col(n);
  }
  return e;
}

AtomUpdate update_atom_pair(const Eigen::MatrixXd& e_ms, const Eigen::MatrixXd& e_b,
                            const Eigen::VectorXd& row, bool empty, CoefficientScaling scaling,
                            std::uint64_t reseed) {
  if (e_ms.rows() != e_b.rows() || e_ms.cols() != e_b.cols()) {
    throw DimensionError("paired error matrices differ in shape");
  }
  AtomUpdate out;
  if (empty) {
    const Eigen::VectorXd mean_ms =
        e_ms.cols() > 0 ? Eigen::VectorXd(e_ms.rowwise().mean()) : Eigen::VectorXd::Zero(e_ms.rows());
    const Eigen::VectorXd mean_b =
        e_b.cols() > 0 ? Eigen::VectorXd(e_b.rowwise().mean()) : Eigen::VectorXd::Zero(e_b.rows());
    out.atom_ms = normalized_or_reseeded(mean_ms, splitmix64(reseed));
    out.atom_b = normalized_or_reseeded(mean_b, splitmix64(reseed ^ 0xB));
    return out;
  }

  if (row.size() == 0 || row.size() != e_ms.cols()) {
    throw DimensionError("coefficient row does not match restricted error width");
  }
  const Eigen::VectorXd dir_ms = e_ms * row;
  const Eigen::VectorXd dir_b = e_b * row;
  const double n_ms = dir_ms.norm();
  const double n_b = dir_b.norm();
  if (!(n_ms > kTinyNorm) || !(n_b > kTinyNorm) || !std::isfinite(n_ms) || !std::isfinite(n_b)) {
    throw NumericalError("atom update direction vanished");
  }
  out.atom_ms = dir_ms / n_ms;
  out.atom_b = dir_b / n_b;
  // stacked projection: [d_ms; d_b]^T [E_ms; E_b]
  const Eigen::VectorXd stacked =
      e_ms.transpose() * out.atom_ms + e_b.transpose() * out.atom_b;
  switch (scaling) {
    case CoefficientScaling::kLeastSquares:
      out.coefficients = 0.5 * stacked;
      break;
    case CoefficientScaling::kUnitStack:
      out.coefficients = stacked / std::sqrt(2.0);
      break;
  }
  return out;
}

bool atom_step(const Eigen::MatrixXd& x_ms, const Eigen::MatrixXd& x_b, CoupledDictionary& dict,
               SparseCodeMatrix& codes, int n, const TrainConfig& cfg) {
  const auto support = atom_support(codes, n);
  if (support.empty()) {
    if (!cfg.refresh_empty_atoms) return true;
    const auto upd = update_atom_pair(full_error(x_ms, dict.ms, codes),
                                      full_error(x_b, dict.brovey, codes), Eigen::VectorXd(), true,
                                      cfg.scaling, mix_seed(cfg.seed, 0xE0, static_cast<std::uint64_t>(n)));
    dict.ms.col(n) = upd.atom_ms;
    dict.brovey.col(n) = upd.atom_b;
    return true;
  }
  const Eigen::VectorXd row = restricted_row(codes, n, support);
  Eigen::VectorXd new_row;
  try {
    const auto upd = update_atom_pair(restricted_error(x_ms, dict.ms, codes, n, support),
                                      restricted_error(x_b, dict.brovey, codes, n, support), row,
                                      false, cfg.scaling);
    dict.ms.col(n) = upd.atom_ms;
    dict.brovey.col(n) = upd.atom_b;
    new_row = upd.coefficients;
  } catch (const NumericalError&) {
    new_row = Eigen::VectorXd::Zero(row.size());
  }
  for (std::size_t i = 0; i < support.size(); ++i) {
    auto& code = codes.codes[static_cast<std::size_t>(support[i])];
    for (std::size_t k = 0; k < code.size(); ++k) {
      if (code.support[k] == n) code.coefficients[k] = new_row[static_cast<Eigen::Index>(i)];
    }
  }
  return false;
}

void refit_coefficients(const Eigen::MatrixXd& x_ms, const Eigen::MatrixXd& x_b,
                        const CoupledDictionary& dict, SparseCodeMatrix& codes) {
  check_pair(x_ms, x_b);
  check_codes(x_ms, dict.ms, codes);
  const Eigen::Index p = x_ms.rows();
  Eigen::VectorXd signal(2 * p);
  for (Eigen::Index m = 0; m < x_ms.cols(); ++m) {
    auto& code = codes.codes[static_cast<std::size_t>(m)];
    if (code.empty()) continue;
    Eigen::MatrixXd sub(2 * p, static_cast<Eigen::Index>(code.size()));
    for (std::size_t k = 0; k < code.size(); ++k) {
      const auto kk = static_cast<Eigen::Index>(k);
      sub.col(kk).head(p) = dict.ms.col(code.support[k]);
      sub.col(kk).tail(p) = dict.brovey.col(code.support[k]);
    }
    signal << x_ms.col(m), x_b.col(m);
    const Eigen::VectorXd coef = sub.colPivHouseholderQr().solve(signal);
    code.coefficients.assign(coef.data(), coef.data() + coef.size());
  }
}

TrainResult train(const Eigen::MatrixXd& x_ms, const Eigen::MatrixXd& x_b, const TrainConfig& cfg) {
  cfg.validate();
  check_pair(x_ms, x_b);
  TrainResult result;
  result.dictionary = init_dictionary(x_ms, x_b, cfg);
  CoupledDictionary& dict = result.dictionary;
  const Eigen::Index p = x_ms.rows();
  const Eigen::Index q = x_ms.cols();

  Eigen::MatrixXd signals(2 * p, q);
  signals << x_ms, x_b;
  Eigen::MatrixXd stacked(2 * p, dict.atom_count());

  for (int round = 0; round < cfg.rounds; ++round) {
    const auto t0 = std::chrono::steady_clock::now();
    stacked << dict.ms, dict.brovey;
    result.codes = code_columns(stacked, signals, cfg.omp_options(), cfg.threads);
    SparseCodeMatrix& codes = result.codes;

    Eigen::MatrixXd res_ms = full_error(x_ms, dict.ms, codes);
    Eigen::MatrixXd res_b = full_error(x_b, dict.brovey, codes);
    if (round == 0) result.trace.initial_objective = res_ms.squaredNorm() + res_b.squaredNorm();

    const auto rows = build_rows(codes);
    int empty = 0;
    int degenerate = 0;
    for (int n = 0; n < dict.atom_count(); ++n) {
      const auto& entries = rows[static_cast<std::size_t>(n)];
      if (entries.empty()) {
        ++empty;
        if (!cfg.refresh_empty_atoms) continue;
        const auto upd = update_atom_pair(
            res_ms, res_b, Eigen::VectorXd(), true, cfg.scaling,
            mix_seed(cfg.seed, static_cast<std::uint64_t>(round) + 1, static_cast<std::uint64_t>(n)));
        dict.ms.col(n) = upd.atom_ms;
        dict.brovey.col(n) = upd.atom_b;
        continue;
      }

      const auto width = static_cast<Eigen::Index>(entries.size());
      Eigen::VectorXd row(width);
      Eigen::MatrixXd e_ms(p, width);
      Eigen::MatrixXd e_b(p, width);
      for (Eigen::Index i = 0; i < width; ++i) {
        const auto [m, slot] = entries[static_cast<std::size_t>(i)];
        row[i] = codes.codes[static_cast<std::size_t>(m)].coefficients[static_cast<std::size_t>(slot)];
        e_ms.col(i) = res_ms.col(m) + row[i] * dict.ms.col(n);
        e_b.col(i) = res_b.col(m) + row[i] * dict.brovey.col(n);
      }

      Eigen::VectorXd new_row;
      try {
        auto upd = update_atom_pair(e_ms, e_b, row, false, cfg.scaling);
        dict.ms.col(n) = upd.atom_ms;
        dict.brovey.col(n) = upd.atom_b;
        new_row = std::move(upd.coefficients);
      } catch (const NumericalError&) {
        ++degenerate;
        new_row = Eigen::VectorXd::Zero(width);
      }
      for (Eigen::Index i = 0; i < width; ++i) {
        const auto [m, slot] = entries[static_cast<std::size_t>(i)];
        codes.codes[static_cast<std::size_t>(m)].coefficients[static_cast<std::size_t>(slot)] = new_row[i];
        res_ms.col(m) = e_ms.col(i) - new_row[i] * dict.ms.col(n);
        res_b.col(m) = e_b.col(i) - new_row[i] * dict.brovey.col(n);
      }
    }

    const double value = objective(x_ms, x_b, dict, codes);
    if (!std::isfinite(value) || !dict.ms.allFinite() || !dict.brovey.allFinite()) {
      throw NumericalError("objective became non-finite in round " + std::to_string(round + 1) +
                           " (empty atoms " + std::to_string(empty) + ", degenerate updates " +
                           std::to_string(degenerate) + ")");
    }
    auto& trace = result.trace;
    trace.objective.push_back(value);
    trace.empty_atoms.push_back(empty);
    trace.degenerate_updates.push_back(degenerate);
    trace.max_norm_deviation.push_back(dict.max_norm_deviation());
    trace.seconds.push_back(
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return result;
}

}  // namespace sarfusion
