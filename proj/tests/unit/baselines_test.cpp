#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sarfusion/baselines.hpp"
#include "sarfusion/errors.hpp"

namespace sarfusion {
namespace {

using testing::rng_for;

MultiBandImage pixel(double r, double g, double b) {
  return MultiBandImage({Plane::Constant(1, 1, r), Plane::Constant(1, 1, g), Plane::Constant(1, 1, b)});
}

TEST(Pca, HandCaseMatchesJacobi) {
  Plane r(2, 2), g(2, 2), b(2, 2);
  r << 0.1, 0.4, 0.7, 0.9;
  g << 0.2, 0.3, 0.8, 0.6;
  b << 0.5, 0.1, 0.2, 0.4;
  const MultiBandImage ms({r, g, b});
  const auto basis = compute_pca_basis(ms);

  std::array<double, 3> mean{};
  std::array<const Plane*, 3> bands{&r, &g, &b};
  for (int i = 0; i < 3; ++i) mean[static_cast<std::size_t>(i)] = bands[static_cast<std::size_t>(i)]->sum() / 4;
  std::array<std::array<double, 3>, 3> cov{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 4; ++k) {
        s += ((*bands[static_cast<std::size_t>(i)])(k / 2, k % 2) - mean[static_cast<std::size_t>(i)]) *
             ((*bands[static_cast<std::size_t>(j)])(k / 2, k % 2) - mean[static_cast<std::size_t>(j)]);
      }
      cov[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = s / 4;
    }
  }
  std::array<double, 3> values{};
  std::array<std::array<double, 3>, 3> vectors{};
  testing::jacobi_eigen3(cov, values, vectors);
  for (int k = 0; k < 3; ++k) {
    EXPECT_NEAR(basis.means[k], mean[static_cast<std::size_t>(k)], 1e-15);
    EXPECT_NEAR(basis.eigenvalues[k], std::max(values[static_cast<std::size_t>(k)], 0.0), 1e-12);
    double sum = 0.0;
    for (int i = 0; i < 3; ++i) sum += vectors[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
    const double sign = sum < 0 ? -1.0 : 1.0;
    for (int i = 0; i < 3; ++i) {
      EXPECT_NEAR(basis.components(i, k), sign * vectors[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)], 1e-9);
    }
  }
  EXPECT_LE((basis.components.transpose() * basis.components - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_GE(basis.eigenvalues[0], basis.eigenvalues[1]);
  EXPECT_GE(basis.eigenvalues[1], basis.eigenvalues[2]);
}

TEST(Pca, RoundTrip) {
  auto& rng = rng_for(1);
  const auto ms = testing::random_image(rng, 3, 13, 17);
  const auto basis = compute_pca_basis(ms);
  const auto back = pca_inverse(pca_forward(ms, basis), basis);
  for (int b = 0; b < 3; ++b) {
    EXPECT_LE((back[static_cast<std::size_t>(b)] - ms.band(b)).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Pca, SubstitutionIdentity) {
  const auto scene = testing::synthetic_scene(24, 24, 3);
  const auto basis = compute_pca_basis(scene.ms);
  const Plane pc1 = pca_forward(scene.ms, basis)[0];
  // an increasing affine image of the first component, inside [0, 1]
  const double lo = pc1.minCoeff(), hi = pc1.maxCoeff();
  const Plane sar = ((pc1.array() - lo) / (hi - lo)).matrix();
  const auto out = pca_fuse(scene.ms, MultiBandImage({sar}));
  for (int b = 0; b < 3; ++b) EXPECT_LE((out.band(b) - scene.ms.band(b)).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Pca, Errors) {
  EXPECT_THROW(compute_pca_basis(MultiBandImage::filled(3, 4, 4, 0.2)), DegenerateInput);
  EXPECT_THROW(pca_fuse(MultiBandImage::filled(3, 4, 4, 0.2), MultiBandImage::filled(1, 4, 3, 0.2)),
               DimensionError);
}

TEST(Pca, UnmatchedSubstitution) {
  const auto scene = testing::synthetic_scene(16, 16, 4);
  const auto matched = pca_fuse(scene.ms, scene.sar);
  const auto raw = pca_fuse(scene.ms, scene.sar, {false});
  EXPECT_FALSE(matched == raw);
}

TEST(Hsv, Conversion) {
  const auto h = rgb_to_hsv(1.0, 0.5, 0.0);
  EXPECT_DOUBLE_EQ(h.h, 30.0);
  EXPECT_DOUBLE_EQ(h.s, 1.0);
  EXPECT_DOUBLE_EQ(h.v, 1.0);
  const auto g = rgb_to_hsv(0.4, 0.4, 0.4);
  EXPECT_EQ(g.h, 0.0);
  EXPECT_EQ(g.s, 0.0);

  auto& rng = rng_for(2);
  for (int i = 0; i < 2000; ++i) {
    const double r = testing::uniform(rng), gg = testing::uniform(rng), b = testing::uniform(rng);
    const auto back = hsv_to_rgb(rgb_to_hsv(r, gg, b));
    EXPECT_NEAR(back[0], r, 1e-10);
    EXPECT_NEAR(back[1], gg, 1e-10);
    EXPECT_NEAR(back[2], b, 1e-10);
  }
}

TEST(Hsv, FuseExamples) {
  const auto out = hsv_fuse(pixel(1.0, 0.5, 0.0), MultiBandImage({Plane::Constant(1, 1, 0.5)}));
  EXPECT_DOUBLE_EQ(out.band(0)(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(out.band(1)(0, 0), 0.25);
  EXPECT_DOUBLE_EQ(out.band(2)(0, 0), 0.0);

  auto& rng = rng_for(3);
  const auto ms = testing::random_image(rng, 3, 10, 10);
  const Plane vmax = ms.band(0).cwiseMax(ms.band(1)).cwiseMax(ms.band(2));
  EXPECT_EQ(hsv_fuse(ms, MultiBandImage({vmax})), ms);

  const Plane g = testing::random_plane(rng, 10, 10);
  const auto sar = testing::random_image(rng, 1, 10, 10);
  const auto gray = hsv_fuse(MultiBandImage({g, g, g}), sar);
  for (int b = 0; b < 3; ++b) EXPECT_LE((gray.band(b) - sar.band(0)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Hsv, ArgmaxPreserved) {
  auto& rng = rng_for(4);
  const auto ms = testing::random_image(rng, 3, 12, 12, 0.05, 1.0);
  const auto sar = testing::random_image(rng, 1, 12, 12, 0.05, 1.0);
  const auto out = hsv_fuse(ms, sar);
  for (int r = 0; r < 12; ++r) {
    for (int c = 0; c < 12; ++c) {
      int in = 0, o = 0;
      for (int b = 1; b < 3; ++b) {
        if (ms.band(b)(r, c) > ms.band(in)(r, c)) in = b;
        if (out.band(b)(r, c) > out.band(o)(r, c)) o = b;
      }
      EXPECT_EQ(in, o);
    }
  }
}

}  // namespace
}  // namespace sarfusion
