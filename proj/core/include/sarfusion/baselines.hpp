#pragma once

#include <array>

#include <Eigen/Core>

#include "sarfusion/image.hpp"

namespace sarfusion {

/// Principal axes of the pixel-wise band triples.
struct PcaBasis {
  Eigen::Vector3d means;
  /// Columns are orthonormal components, sorted by descending eigenvalue.
  /// Each column's entries sum to a non-negative value.
  Eigen::Matrix3d components;
  Eigen::Vector3d eigenvalues;
};

PcaBasis compute_pca_basis(const MultiBandImage& ms);

/// Component scores, one plane per component.
std::array<Plane, 3> pca_forward(const MultiBandImage& ms, const PcaBasis& basis);

/// Back-projection of component scores; not clipped.
std::array<Plane, 3> pca_inverse(const std::array<Plane, 3>& scores, const PcaBasis& basis);

struct PcaFuseOptions {
  /// Match the SAR band's mean/std to the first component before replacing it.
  bool match_statistics = true;
};

/// Replaces the first principal component by the SAR band and back-projects.
MultiBandImage pca_fuse(const MultiBandImage& ms, const MultiBandImage& sar,
                        const PcaFuseOptions& opts = {});

struct Hsv {
  double h = 0.0;  // degrees in [0, 360); 0 for achromatic pixels
  double s = 0.0;
  double v = 0.0;
};

Hsv rgb_to_hsv(double r, double g, double b);
std::array<double, 3> hsv_to_rgb(const Hsv& hsv);

/// Hexcone HSV substitution: V is replaced by the SAR intensity.
MultiBandImage hsv_fuse(const MultiBandImage& ms, const MultiBandImage& sar);

}  // namespace sarfusion
