#include "sarfusion/fusion.hpp"

#include <string>

#include "sarfusion/errors.hpp"

namespace sarfusion {

namespace {

template <typename F>
auto run_stage(const char* stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (Error& e) {
    if (e.stage().empty()) e.set_stage(stage);
    throw;
  }
}

struct PreparedPatches {
  BroveyResult brovey;
  PatchGrid grid;
  PatchMatrix ms;
  PatchMatrix b;
};

PreparedPatches prepare(const MultiBandImage& ms, const MultiBandImage& sar, const FusionConfig& cfg) {
  run_stage("config", [&] { cfg.validate(); });
  PreparedPatches out;
  out.brovey = run_stage("brovey", [&] { return brovey_fuse(ms, sar, cfg.brovey); });
  out.grid = run_stage("patches", [&] {
    return build_patch_grid(ms.height(), ms.width(), cfg.patch_side, cfg.stride);
  });
  run_stage("patches", [&] {
    out.ms = center_patches(extract_patches(ms, out.grid));
    out.b = center_patches(extract_patches(out.brovey.image, out.grid));
  });
  return out;
}

FusionResult finish(PreparedPatches prep, const MultiBandImage& ms, CoupledDictionary dict,
                    const SparseCodeMatrix& codes, TrainTrace trace) {
  FusionResult r;
  r.labels = run_stage("select",
                       [&] { return select_patch_labels(dict, codes, prep.ms.values, prep.b.values); });
  r.mask = run_stage("mask", [&] { return build_mask(r.labels, prep.grid); });
  r.fused = run_stage("blend", [&] { return blend(ms, prep.brovey.image, r.mask); });
  r.trace = std::move(trace);
  r.brovey = std::move(prep.brovey);
  r.dictionary = std::move(dict);
  r.grid = std::move(prep.grid);
  return r;
}

}  // namespace

Eigen::MatrixXd stacked_dictionary(const CoupledDictionary& dict) {
  if (dict.ms.rows() != dict.brovey.rows() || dict.ms.cols() != dict.brovey.cols()) {
    throw DimensionError("coupled dictionaries differ in shape");
  }
  Eigen::MatrixXd d(2 * dict.ms.rows(), dict.ms.cols());
  d << dict.ms, dict.brovey;
  return d;
}

CoupledDictionary split_stacked(const Eigen::MatrixXd& stacked) {
  if (stacked.rows() % 2 != 0) throw DimensionError("stacked dictionary has an odd row count");
  const Eigen::Index p = stacked.rows() / 2;
  return {stacked.topRows(p), stacked.bottomRows(p)};
}

ReconstructionErrors reconstruction_errors(const Eigen::MatrixXd& stacked, const SparseCode& code,
                                           const Eigen::VectorXd& x_ms, const Eigen::VectorXd& x_b) {
  const Eigen::Index p = x_ms.size();
  if (x_b.size() != p || stacked.rows() != 2 * p) {
    throw DimensionError("patch vectors do not match the stacked dictionary");
  }
  Eigen::VectorXd recon = Eigen::VectorXd::Zero(2 * p);
  for (std::size_t k = 0; k < code.size(); ++k) {
    if (code.support[k] < 0 || code.support[k] >= stacked.cols()) {
      throw DimensionError("code references an atom outside the dictionary");
    }
    recon.noalias() += code.coefficients[k] * stacked.col(code.support[k]);
  }
  ReconstructionErrors e;
  e.ms = (recon.head(p) - x_b).squaredNorm() + (recon.tail(p) - x_ms).squaredNorm();
  e.brovey = (recon.head(p) - x_ms).squaredNorm() + (recon.tail(p) - x_b).squaredNorm();
  return e;
}

std::vector<PatchLabel> select_patch_labels(const CoupledDictionary& dict,
                                            const SparseCodeMatrix& codes,
                                            const Eigen::MatrixXd& x_ms,
                                            const Eigen::MatrixXd& x_b) {
  if (x_ms.rows() != x_b.rows() || x_ms.cols() != x_b.cols()) {
    throw DimensionError("paired patch matrices differ in shape");
  }
  if (static_cast<Eigen::Index>(codes.cols()) != x_ms.cols()) {
    throw DimensionError("code count does not match patch count");
  }
  const Eigen::MatrixXd d = stacked_dictionary(dict);
  std::vector<PatchLabel> labels(codes.cols());
  for (std::size_t m = 0; m < codes.cols(); ++m) {
    const auto mm = static_cast<Eigen::Index>(m);
    const auto e = reconstruction_errors(d, codes.codes[m], x_ms.col(mm), x_b.col(mm));
    labels[m] = e.ms < e.brovey ? PatchLabel::kMultispectral : PatchLabel::kBrovey;
  }
  return labels;
}

FusionMask build_mask(const std::vector<PatchLabel>& labels, const PatchGrid& grid) {
  std::vector<double> values(labels.size());
  for (std::size_t j = 0; j < labels.size(); ++j) values[j] = static_cast<double>(labels[j]);
  FusionMask mask{reassemble_scalar(values, grid)};
  mask.plane.array() -= 1.0;
  return mask;
}

MultiBandImage blend(const MultiBandImage& ms, const MultiBandImage& brovey, const FusionMask& mask) {
  if (ms.bands() != brovey.bands()) throw BandCountError("blend inputs differ in band count");
  if (!ms.same_extent(brovey) || mask.plane.rows() != ms.height() || mask.plane.cols() != ms.width()) {
    throw DimensionError("blend inputs differ in size");
  }
  if ((mask.plane.array() < 0.0).any() || (mask.plane.array() > 1.0).any()) {
    throw InvalidArgument("mask values must lie in [0, 1]");
  }
  std::vector<Plane> out;
  out.reserve(static_cast<std::size_t>(ms.bands()));
  for (int b = 0; b < ms.bands(); ++b) {
    Plane p = mask.plane.cwiseProduct(ms.band(b)) +
              (1.0 - mask.plane.array()).matrix().cwiseProduct(brovey.band(b));
    out.push_back(p.cwiseMax(0.0).cwiseMin(1.0));
  }
  return MultiBandImage(std::move(out), ms.bit_depth_origin());
}

void FusionConfig::validate() const {
  if (patch_side < 1) throw InvalidArgument("patch side must be >= 1");
  if (stride < 1 || stride > patch_side) throw InvalidArgument("stride must lie in [1, patch_side]");
  if (!(brovey.epsilon > 0.0)) throw InvalidArgument("brovey epsilon must be > 0");
  training.validate();
}

TrainResult train_on_images(const MultiBandImage& ms, const MultiBandImage& sar,
                            const FusionConfig& cfg) {
  auto prep = prepare(ms, sar, cfg);
  return run_stage("train", [&] { return train(prep.ms.values, prep.b.values, cfg.training); });
}

FusionResult fuse_pipeline(const MultiBandImage& ms, const MultiBandImage& sar,
                           const FusionConfig& cfg) {
  auto prep = prepare(ms, sar, cfg);
  auto trained = run_stage("train", [&] { return train(prep.ms.values, prep.b.values, cfg.training); });
  // the mask is built on the training image itself, so the final training
  // codes are reused
  return finish(std::move(prep), ms, std::move(trained.dictionary), trained.codes,
                std::move(trained.trace));
}

FusionResult fuse_with_dictionary(const MultiBandImage& ms, const MultiBandImage& sar,
                                  const CoupledDictionary& dict, const FusionConfig& cfg) {
  auto prep = prepare(ms, sar, cfg);
  if (dict.patch_dim() != prep.ms.dim()) {
    DimensionError e("dictionary patch dimension " + std::to_string(dict.patch_dim()) +
                     " does not match patches of dimension " + std::to_string(prep.ms.dim()));
    e.set_stage("code");
    throw e;
  }
  const auto codes = run_stage("code", [&] {
    return joint_code(dict.ms, dict.brovey, prep.ms.values, prep.b.values,
                      cfg.training.omp_options(), cfg.training.threads);
  });
  return finish(std::move(prep), ms, dict, codes, TrainTrace{});
}

}  // namespace sarfusion
