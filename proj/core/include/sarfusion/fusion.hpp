#pragma once

#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "sarfusion/brovey.hpp"
#include "sarfusion/cdl.hpp"
#include "sarfusion/image.hpp"
#include "sarfusion/sparse.hpp"

namespace sarfusion {

/// Per-patch source choice. The numeric values are the labels placed by P*.
enum class PatchLabel : int {
  kBrovey = 1,
  kMultispectral = 2,
};

/// Pixel-level blend weight of the multispectral image, in [0, 1].
struct FusionMask {
  Plane plane;
};

struct ReconstructionErrors {
  double ms = 0.0;
  double brovey = 0.0;
};

/// [D_MS; D_B]
Eigen::MatrixXd stacked_dictionary(const CoupledDictionary& dict);

/// Inverse of stacked_dictionary.
CoupledDictionary split_stacked(const Eigen::MatrixXd& stacked);

/// e_MS = ||D a - [x_B; x_MS]||^2 and e_B = ||D a - [x_MS; x_B]||^2.
ReconstructionErrors reconstruction_errors(const Eigen::MatrixXd& stacked, const SparseCode& code,
                                           const Eigen::VectorXd& x_ms, const Eigen::VectorXd& x_b);

/// Multispectral when e_MS < e_B, Brovey otherwise (ties included).
std::vector<PatchLabel> select_patch_labels(const CoupledDictionary& dict,
                                            const SparseCodeMatrix& codes,
                                            const Eigen::MatrixXd& x_ms,
                                            const Eigen::MatrixXd& x_b);

/// K = P*(labels) - 1
FusionMask build_mask(const std::vector<PatchLabel>& labels, const PatchGrid& grid);

/// I_F = K * I_MS + (1 - K) * I_B per band.
MultiBandImage blend(const MultiBandImage& ms, const MultiBandImage& brovey, const FusionMask& mask);

struct FusionConfig {
  int patch_side = 8;
  int stride = 4;
  BroveyConfig brovey;
  TrainConfig training;

  void validate() const;
};

/// Everything the pipeline produced, kept for inspection and persistence.
struct FusionResult {
  MultiBandImage fused;
  FusionMask mask;
  TrainTrace trace;
  BroveyResult brovey;
  CoupledDictionary dictionary;
  PatchGrid grid;
  std::vector<PatchLabel> labels;
};

/// Brovey pre-processing, coupled dictionary training on the centered patch
/// pairs, error-based patch labeling, mask placement and blending. Errors
/// carry the name of the stage that raised them.
FusionResult fuse_pipeline(const MultiBandImage& ms, const MultiBandImage& sar,
                           const FusionConfig& cfg);

/// Fusion with a dictionary trained elsewhere: patches are coded afresh
/// against `dict` instead of reusing training codes. The returned trace is
/// empty.
FusionResult fuse_with_dictionary(const MultiBandImage& ms, const MultiBandImage& sar,
                                  const CoupledDictionary& dict, const FusionConfig& cfg);

/// Training stage only: returns the dictionary and trace for the pair.
TrainResult train_on_images(const MultiBandImage& ms, const MultiBandImage& sar,
                            const FusionConfig& cfg);

}  // namespace sarfusion
