#include "sarfusion/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sarfusion/errors.hpp"

namespace sarfusion {

namespace {

std::vector<int> axis_origins(int extent, int side, int stride) {
  std::vector<int> out;
  const int last = extent - side;
  for (int o = 0; o < last; o += stride) out.push_back(o);
  out.push_back(last);
  return out;
}

void check_grid_matches(int height, int width, const PatchGrid& grid) {
  if (grid.image_height != height || grid.image_width != width) {
    throw DimensionError("grid built for " + std::to_string(grid.image_height) + "x" +
                         std::to_string(grid.image_width) + ", image is " +
                         std::to_string(height) + "x" + std::to_string(width));
  }
}

}  // namespace

MultiBandImage::MultiBandImage(std::vector<Plane> planes, int bit_depth_origin)
    : planes_(std::move(planes)), bit_depth_origin_(bit_depth_origin) {
  if (planes_.size() != 1 && planes_.size() != 3) {
    throw BandCountError("image must have 1 or 3 bands, got " +
                         std::to_string(planes_.size()));
  }
  if (bit_depth_origin_ != 8 && bit_depth_origin_ != 16) {
    throw InvalidArgument("bit depth must be 8 or 16");
  }
  const auto rows = planes_[0].rows();
  const auto cols = planes_[0].cols();
  for (const auto& p : planes_) {
    if (p.rows() != rows || p.cols() != cols) {
      throw DimensionError("bands differ in size");
    }
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      const double v = p.data()[i];
      if (!(v >= 0.0 && v <= 1.0)) {
        throw DataError("intensity outside [0, 1]: " + std::to_string(v));
      }
    }
  }
}

MultiBandImage MultiBandImage::filled(int bands, int height, int width, double value,
                                      int bit_depth_origin) {
  std::vector<Plane> planes(static_cast<std::size_t>(std::max(bands, 0)),
                            Plane::Constant(height, width, value));
  return MultiBandImage(std::move(planes), bit_depth_origin);
}

bool operator==(const MultiBandImage& a, const MultiBandImage& b) {
  if (a.bands() != b.bands() || !a.same_extent(b)) return false;
  for (int i = 0; i < a.bands(); ++i) {
    if (a.band(i) != b.band(i)) return false;
  }
  return true;
}

Plane PatchGrid::coverage() const {
  Plane count = Plane::Zero(image_height, image_width);
  for (const auto& o : origins) {
    count.block(o.row, o.col, patch_side, patch_side).array() += 1.0;
  }
  return count;
}

PatchGrid build_patch_grid(int height, int width, int patch_side, int stride) {
  if (patch_side < 1) throw InvalidArgument("patch side must be >= 1");
  if (patch_side > std::min(height, width)) {
    throw DimensionError("patch side " + std::to_string(patch_side) +
                         " exceeds image extent " + std::to_string(height) + "x" +
                         std::to_string(width));
  }
  if (stride < 1 || stride > patch_side) {
    throw InvalidArgument("stride must lie in [1, patch_side]");
  }
  PatchGrid grid{patch_side, stride, height, width, {}};
  const auto rows = axis_origins(height, patch_side, stride);
  const auto cols = axis_origins(width, patch_side, stride);
  grid.origins.reserve(rows.size() * cols.size());
  for (int r : rows) {
    for (int c : cols) grid.origins.push_back({r, c});
  }
  return grid;
}

PatchMatrix extract_patches(const MultiBandImage& image, const PatchGrid& grid) {
  check_grid_matches(image.height(), image.width(), grid);
  const int s = grid.patch_side;
  const int area = s * s;
  PatchMatrix out;
  out.bands = image.bands();
  out.patch_side = s;
  out.values.resize(static_cast<Eigen::Index>(area) * image.bands(),
                    static_cast<Eigen::Index>(grid.size()));
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const auto [r0, c0] = grid.origins[j];
    double* col = out.values.col(static_cast<Eigen::Index>(j)).data();
    for (int b = 0; b < image.bands(); ++b) {
      const Plane& plane = image.band(b);
      for (int r = 0; r < s; ++r) {
        for (int c = 0; c < s; ++c) {
          *col++ = plane(r0 + r, c0 + c);
        }
      }
    }
  }
  return out;
}

PatchMatrix center_patches(PatchMatrix patches) {
  const Eigen::Index q = patches.count();
  Eigen::VectorXd means(q);
  for (Eigen::Index j = 0; j < q; ++j) {
    means[j] = patches.dim() > 0 ? patches.values.col(j).mean() : 0.0;
    patches.values.col(j).array() -= means[j];
  }
  if (patches.means) {
    patches.means = *patches.means + means;
  } else {
    patches.means = std::move(means);
  }
  return patches;
}

Plane reassemble_scalar(std::span<const double> labels, const PatchGrid& grid) {
  if (labels.size() != grid.size()) {
    throw DimensionError("expected " + std::to_string(grid.size()) + " labels, got " +
                         std::to_string(labels.size()));
  }
  const int s = grid.patch_side;
  Plane sum = Plane::Zero(grid.image_height, grid.image_width);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    sum.block(grid.origins[j].row, grid.origins[j].col, s, s).array() += labels[j];
  }
  return sum.cwiseQuotient(grid.coverage());
}

MultiBandImage reassemble_values(const PatchMatrix& patches, const PatchGrid& grid,
                                 int bit_depth_origin) {
  const int s = grid.patch_side;
  const int area = s * s;
  if (patches.count() != static_cast<Eigen::Index>(grid.size())) {
    throw DimensionError("patch count does not match grid");
  }
  if (patches.bands < 1 || patches.dim() != static_cast<Eigen::Index>(area) * patches.bands) {
    throw DimensionError("patch dimension inconsistent with grid and band count");
  }
  if (patches.means && patches.means->size() != patches.count()) {
    throw DimensionError("means length does not match patch count");
  }
  const Plane coverage = grid.coverage();
  std::vector<Plane> planes(static_cast<std::size_t>(patches.bands),
                            Plane::Zero(grid.image_height, grid.image_width));
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const auto [r0, c0] = grid.origins[j];
    const auto jj = static_cast<Eigen::Index>(j);
    const double dc = patches.means ? (*patches.means)[jj] : 0.0;
    const double* col = patches.values.col(jj).data();
    for (int b = 0; b < patches.bands; ++b) {
      Plane& plane = planes[static_cast<std::size_t>(b)];
      for (int r = 0; r < s; ++r) {
        for (int c = 0; c < s; ++c) {
          plane(r0 + r, c0 + c) += *col++ + dc;
        }
      }
    }
  }
  for (auto& plane : planes) {
    plane = plane.cwiseQuotient(coverage).cwiseMax(0.0).cwiseMin(1.0);
  }
  return MultiBandImage(std::move(planes), bit_depth_origin);
}

}  // namespace sarfusion
