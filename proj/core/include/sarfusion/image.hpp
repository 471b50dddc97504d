#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace sarfusion {

/// One image band, row-major so that plane(r, c) addresses pixel (r, c).
using Plane = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// A 1-band (SAR) or 3-band (multispectral, Brovey, fused) image with
/// intensities normalized to [0, 1].
///
/// The constructor validates the invariants: band count in {1, 3}, equal
/// plane sizes, finite values inside [0, 1]. `bit_depth_origin` only records
/// the scale the data was loaded from (8 or 16) so it can be written back.
class MultiBandImage {
 public:
  MultiBandImage() = default;
  explicit MultiBandImage(std::vector<Plane> planes, int bit_depth_origin = 8);

  /// All bands filled with `value`.
  static MultiBandImage filled(int bands, int height, int width, double value,
                               int bit_depth_origin = 8);

  int bands() const noexcept { return static_cast<int>(planes_.size()); }
  int height() const noexcept { return planes_.empty() ? 0 : static_cast<int>(planes_[0].rows()); }
  int width() const noexcept { return planes_.empty() ? 0 : static_cast<int>(planes_[0].cols()); }
  int bit_depth_origin() const noexcept { return bit_depth_origin_; }

  const Plane& band(int b) const { return planes_.at(static_cast<std::size_t>(b)); }
  const std::vector<Plane>& planes() const noexcept { return planes_; }

  bool same_extent(const MultiBandImage& other) const noexcept {
    return height() == other.height() && width() == other.width();
  }

  friend bool operator==(const MultiBandImage& a, const MultiBandImage& b);

 private:
  std::vector<Plane> planes_;
  int bit_depth_origin_ = 8;
};

struct PatchOrigin {
  int row = 0;
  int col = 0;
  friend bool operator==(const PatchOrigin&, const PatchOrigin&) = default;
};

/// Square patch layout over an image: origins step by `stride` and the last
/// row/column of origins is clamped so that patches end on the border.
struct PatchGrid {
  int patch_side = 0;
  int stride = 0;
  int image_height = 0;
  int image_width = 0;
  std::vector<PatchOrigin> origins;  // row-major

  std::size_t size() const noexcept { return origins.size(); }

  /// Number of patches covering each pixel.
  Plane coverage() const;
};

/// Column-per-patch matrix (p x q). For 3-band images the band blocks of
/// s*s entries are stored contiguously in band order.
struct PatchMatrix {
  Eigen::MatrixXd values;
  int bands = 1;
  int patch_side = 0;
  /// DC offsets removed by center_patches, one per column.
  std::optional<Eigen::VectorXd> means;

  Eigen::Index dim() const noexcept { return values.rows(); }
  Eigen::Index count() const noexcept { return values.cols(); }
};

PatchGrid build_patch_grid(int height, int width, int patch_side, int stride);

PatchMatrix extract_patches(const MultiBandImage& image, const PatchGrid& grid);

/// Subtracts each column's mean and records it in `means` (accumulated when
/// means were already recorded).
PatchMatrix center_patches(PatchMatrix patches);

/// The placement operator: each pixel receives the mean label of the patches
/// covering it.
Plane reassemble_scalar(std::span<const double> labels, const PatchGrid& grid);

/// Places patch vectors back on the grid with uniform overlap averaging.
/// Recorded means are added back first; the result is clamped to [0, 1].
MultiBandImage reassemble_values(const PatchMatrix& patches, const PatchGrid& grid,
                                 int bit_depth_origin = 8);

}  // namespace sarfusion
