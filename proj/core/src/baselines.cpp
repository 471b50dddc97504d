#include "sarfusion/baselines.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "sarfusion/errors.hpp"

namespace sarfusion {

namespace {

void check_inputs(const MultiBandImage& ms, const MultiBandImage& sar) {
  if (ms.bands() != 3) throw BandCountError("multispectral image must have 3 bands");
  if (sar.bands() != 1) throw BandCountError("SAR image must have 1 band");
  if (!ms.same_extent(sar)) throw DimensionError("multispectral and SAR sizes differ");
}

// sign of the component sum, falling back to the first non-zero entry
double orientation(const Eigen::Vector3d& v) {
  if (v.sum() != 0.0) return v.sum();
  for (int i = 0; i < 3; ++i) {
    if (v[i] != 0.0) return v[i];
  }
  return 0.0;
}

double plane_std(const Plane& p) {
  return std::sqrt((p.array() - p.mean()).square().mean());
}

}  // namespace

PcaBasis compute_pca_basis(const MultiBandImage& ms) {
  if (ms.bands() != 3) throw BandCountError("PCA needs a 3-band image");
  const Eigen::Index n = static_cast<Eigen::Index>(ms.height()) * ms.width();
  if (n == 0) throw DegenerateInput("empty image");
  Eigen::Matrix<double, Eigen::Dynamic, 3> samples(n, 3);
  for (int b = 0; b < 3; ++b) samples.col(b) = ms.band(b).reshaped<Eigen::RowMajor>();

  PcaBasis basis;
  basis.means = samples.colwise().mean().transpose();
  const Eigen::Matrix<double, Eigen::Dynamic, 3> centered = samples.rowwise() - basis.means.transpose();
  const Eigen::Matrix3d cov = (centered.transpose() * centered) / static_cast<double>(n);

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
  if (solver.info() != Eigen::Success) throw NumericalError("band covariance eigensolver failed");
  // ascending -> descending
  for (int k = 0; k < 3; ++k) {
    basis.eigenvalues[k] = std::max(solver.eigenvalues()[2 - k], 0.0);
    Eigen::Vector3d v = solver.eigenvectors().col(2 - k);
    if (orientation(v) < 0.0) v = -v;
    basis.components.col(k) = v;
  }
  if (!(basis.eigenvalues[0] > 1e-20)) throw DegenerateInput("band covariance has rank 0");
  return basis;
}

std::array<Plane, 3> pca_forward(const MultiBandImage& ms, const PcaBasis& basis) {
  if (ms.bands() != 3) throw BandCountError("PCA needs a 3-band image");
  std::array<Plane, 3> scores;
  for (int k = 0; k < 3; ++k) {
    Plane s = Plane::Zero(ms.height(), ms.width());
    for (int b = 0; b < 3; ++b) {
      s.array() += basis.components(b, k) * (ms.band(b).array() - basis.means[b]);
    }
    scores[static_cast<std::size_t>(k)] = std::move(s);
  }
  return scores;
}

std::array<Plane, 3> pca_inverse(const std::array<Plane, 3>& scores, const PcaBasis& basis) {
  std::array<Plane, 3> bands;
  for (int b = 0; b < 3; ++b) {
    Plane x = Plane::Constant(scores[0].rows(), scores[0].cols(), basis.means[b]);
    for (int k = 0; k < 3; ++k) {
      x.array() += basis.components(b, k) * scores[static_cast<std::size_t>(k)].array();
    }
    bands[static_cast<std::size_t>(b)] = std::move(x);
  }
  return bands;
}

MultiBandImage pca_fuse(const MultiBandImage& ms, const MultiBandImage& sar, const PcaFuseOptions& opts) {
  check_inputs(ms, sar);
  const PcaBasis basis = compute_pca_basis(ms);
  auto scores = pca_forward(ms, basis);
  const Plane& intensity = sar.band(0);
  if (opts.match_statistics) {
    const double target_mean = scores[0].mean();
    const double target_std = plane_std(scores[0]);
    const double sar_std = plane_std(intensity);
    if (sar_std > 0.0) {
      scores[0] = ((intensity.array() - intensity.mean()) * (target_std / sar_std) + target_mean).matrix();
    } else {
      scores[0].setConstant(target_mean);
    }
  } else {
    scores[0] = intensity;
  }
  auto bands = pca_inverse(scores, basis);
  std::vector<Plane> out;
  for (auto& b : bands) out.push_back(b.cwiseMax(0.0).cwiseMin(1.0));
  return MultiBandImage(std::move(out), ms.bit_depth_origin());
}

Hsv rgb_to_hsv(double r, double g, double b) {
  const double hi = std::max({r, g, b});
  const double lo = std::min({r, g, b});
  const double delta = hi - lo;
  Hsv out;
  out.v = hi;
  out.s = hi > 0.0 ? delta / hi : 0.0;
  if (delta <= 0.0) return out;
  double h;
  if (hi == r) {
    h = std::fmod((g - b) / delta, 6.0);
  } else if (hi == g) {
    h = (b - r) / delta + 2.0;
  } else {
    h = (r - g) / delta + 4.0;
  }
  h *= 60.0;
  if (h < 0.0) h += 360.0;
  if (h >= 360.0) h -= 360.0;
  out.h = h;
  return out;
}

std::array<double, 3> hsv_to_rgb(const Hsv& hsv) {
  const double c = hsv.v * hsv.s;
  const double hp = hsv.h / 60.0;
  const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
  const double m = hsv.v - c;
  double r = 0.0, g = 0.0, b = 0.0;
  switch (static_cast<int>(std::floor(hp)) % 6) {
    case 0: r = c; g = x; break;
    case 1: r = x; g = c; break;
    case 2: g = c; b = x; break;
    case 3: g = x; b = c; break;
    case 4: r = x; b = c; break;
    default: r = c; b = x; break;
  }
  return {r + m, g + m, b + m};
}

MultiBandImage hsv_fuse(const MultiBandImage& ms, const MultiBandImage& sar) {
  check_inputs(ms, sar);
  std::vector<Plane> out(3, Plane(ms.height(), ms.width()));
  for (int r = 0; r < ms.height(); ++r) {
    for (int c = 0; c < ms.width(); ++c) {
      const double v = std::max({ms.band(0)(r, c), ms.band(1)(r, c), ms.band(2)(r, c)});
      const double target = sar.band(0)(r, c);
      // hue and saturation fixed: every channel scales with V; black pixels
      // are achromatic and become gray
      const double gain = v > 0.0 ? target / v : 0.0;
      for (int b = 0; b < 3; ++b) {
        const double x = v > 0.0 ? ms.band(b)(r, c) * gain : target;
        out[static_cast<std::size_t>(b)](r, c) = std::clamp(x, 0.0, 1.0);
      }
    }
  }
  return MultiBandImage(std::move(out), ms.bit_depth_origin());
}

}  // namespace sarfusion
