#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sarfusion/errors.hpp"
#include "sarfusion/fusion.hpp"
#include "sarfusion/metrics.hpp"

namespace sarfusion {
namespace {

using testing::random_matrix;
using testing::rng_for;

FusionConfig small_config() {
  FusionConfig cfg;
  cfg.patch_side = 4;
  cfg.stride = 2;
  cfg.training.atom_count = 24;
  cfg.training.sparsity = 3;
  cfg.training.rounds = 3;
  return cfg;
}

double sq(const Eigen::VectorXd& v) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += v[i] * v[i];
  return s;
}

TEST(Stacking, Cases) {
  CoupledDictionary d{Eigen::MatrixXd::Constant(1, 1, 1.0), Eigen::MatrixXd::Constant(1, 1, -1.0)};
  EXPECT_EQ(stacked_dictionary(d), (Eigen::MatrixXd(2, 1) << 1, -1).finished());

  auto& rng = rng_for(1);
  CoupledDictionary r{random_matrix(rng, 5, 7), random_matrix(rng, 5, 7)};
  const auto s = stacked_dictionary(r);
  EXPECT_EQ(s.rows(), 10);
  EXPECT_EQ(s.cols(), 7);
  EXPECT_EQ(split_stacked(s), r);
  EXPECT_THROW(split_stacked(Eigen::MatrixXd::Zero(3, 2)), DimensionError);
}

TEST(ReconstructionErrors, Cases) {
  auto& rng = rng_for(2);
  const Eigen::MatrixXd d = random_matrix(rng, 8, 5);
  const Eigen::VectorXd xms = random_matrix(rng, 4, 1).col(0), xb = random_matrix(rng, 4, 1).col(0);
  const SparseCode code{{1, 4}, {0.3, -0.6}};

  const auto same = reconstruction_errors(d, code, xms, xms);
  EXPECT_EQ(same.ms, same.brovey);

  const auto zero = reconstruction_errors(d, SparseCode{}, xms, xb);
  EXPECT_NEAR(zero.ms, sq(xms) + sq(xb), 1e-14);
  EXPECT_NEAR(zero.brovey, sq(xms) + sq(xb), 1e-14);

  Eigen::VectorXd recon = 0.3 * d.col(1) - 0.6 * d.col(4);
  Eigen::VectorXd swapped(8), natural(8);
  swapped << xb, xms;
  natural << xms, xb;
  const auto e = reconstruction_errors(d, code, xms, xb);
  EXPECT_NEAR(e.ms, sq(recon - swapped), 1e-14);
  EXPECT_NEAR(e.brovey, sq(recon - natural), 1e-14);

  const auto flipped = reconstruction_errors(d, code, xb, xms);
  EXPECT_NEAR(flipped.ms, e.brovey, 1e-14);
  EXPECT_NEAR(flipped.brovey, e.ms, 1e-14);

  EXPECT_THROW(reconstruction_errors(d, code, xms, Eigen::VectorXd::Zero(3)), DimensionError);
}

TEST(SelectPatchLabels, TieGoesToBrovey) {
  auto& rng = rng_for(3);
  CoupledDictionary d{random_matrix(rng, 4, 6), random_matrix(rng, 4, 6)};
  d.ms.colwise().normalize();
  d.brovey.colwise().normalize();
  const Eigen::MatrixXd x = random_matrix(rng, 4, 10);
  const auto codes = joint_code(d.ms, d.brovey, x, x, {2, 1e-8});
  for (auto l : select_patch_labels(d, codes, x, x)) EXPECT_EQ(l, PatchLabel::kBrovey);
}

TEST(SelectPatchLabels, SwappedReconstructionPicksMultispectral) {
  // atom 0 stacks [x_B; x_MS], so coding with it reconstructs the swapped pair
  CoupledDictionary d;
  d.ms = (Eigen::MatrixXd(2, 2) << 0, 1, 1, 0).finished();
  d.brovey = (Eigen::MatrixXd(2, 2) << 1, 1, 0, 0).finished();
  const Eigen::Vector2d xms(1.0, 0.0), xb(0.0, 1.0);
  SparseCodeMatrix codes{{SparseCode{{0}, {1.0}}}, 2};
  const auto e = reconstruction_errors(stacked_dictionary(d), codes.codes[0], xms, xb);
  EXPECT_EQ(e.ms, 0.0);
  EXPECT_EQ(e.brovey, 4.0);
  const auto labels = select_patch_labels(d, codes, Eigen::MatrixXd(xms), Eigen::MatrixXd(xb));
  EXPECT_EQ(labels[0], PatchLabel::kMultispectral);
}

TEST(SelectPatchLabels, PermutesWithColumns) {
  auto& rng = rng_for(4);
  CoupledDictionary d{random_matrix(rng, 5, 8), random_matrix(rng, 5, 8)};
  const Eigen::MatrixXd xms = random_matrix(rng, 5, 12), xb = random_matrix(rng, 5, 12);
  const auto codes = joint_code(d.ms, d.brovey, xms, xb, {3, 1e-8});
  const auto labels = select_patch_labels(d, codes, xms, xb);
  Eigen::MatrixXd rms = xms.rowwise().reverse(), rb = xb.rowwise().reverse();
  SparseCodeMatrix rc = codes;
  std::reverse(rc.codes.begin(), rc.codes.end());
  auto reversed = select_patch_labels(d, rc, rms, rb);
  std::reverse(reversed.begin(), reversed.end());
  EXPECT_EQ(reversed, labels);
}

TEST(BuildMask, Cases) {
  const auto g = build_patch_grid(3, 3, 2, 1);
  const auto k = build_mask({PatchLabel::kMultispectral, PatchLabel::kBrovey, PatchLabel::kBrovey,
                             PatchLabel::kBrovey}, g);
  EXPECT_EQ(k.plane(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(k.plane(1, 1), 0.25);
  EXPECT_EQ(k.plane(2, 2), 0.0);

  const auto big = build_patch_grid(9, 7, 3, 2);
  EXPECT_TRUE(build_mask(std::vector<PatchLabel>(big.size(), PatchLabel::kMultispectral), big)
                  .plane.isApprox(Plane::Ones(9, 7)));
  EXPECT_TRUE(build_mask(std::vector<PatchLabel>(big.size(), PatchLabel::kBrovey), big).plane.isZero(0.0));

  auto& rng = rng_for(5);
  const auto tiles = build_patch_grid(8, 8, 4, 4);
  std::vector<PatchLabel> labels;
  for (std::size_t j = 0; j < tiles.size(); ++j) labels.push_back(rng() % 2 ? PatchLabel::kBrovey : PatchLabel::kMultispectral);
  const auto binary = build_mask(labels, tiles).plane;
  EXPECT_TRUE((binary.array() == 0.0 || binary.array() == 1.0).all());
  labels.pop_back();
  EXPECT_THROW(build_mask(labels, tiles), DimensionError);
}

TEST(Blend, Cases) {
  auto& rng = rng_for(6);
  const auto ms = testing::random_image(rng, 3, 6, 7);
  const auto b = testing::random_image(rng, 3, 6, 7);
  EXPECT_EQ(blend(ms, b, {Plane::Ones(6, 7)}), ms);
  EXPECT_EQ(blend(ms, b, {Plane::Zero(6, 7)}), b);
  const FusionMask k{testing::random_plane(rng, 6, 7)};
  const auto same = blend(ms, ms, k);
  for (int c = 0; c < 3; ++c) EXPECT_LE((same.band(c) - ms.band(c)).cwiseAbs().maxCoeff(), 1e-15);

  const auto f = blend(ms, b, k);
  for (int c = 0; c < 3; ++c) {
    EXPECT_TRUE(((f.band(c) - ms.band(c)).array().abs() <= (b.band(c) - ms.band(c)).array().abs() + 1e-15).all());
    EXPECT_TRUE(((f.band(c) - b.band(c)).array().abs() <= (ms.band(c) - b.band(c)).array().abs() + 1e-15).all());
  }
  EXPECT_LE(spectral_distortion(f.band(0), ms.band(0)), spectral_distortion(b.band(0), ms.band(0)) + 1e-9);

  EXPECT_THROW(blend(ms, b, {Plane::Constant(6, 7, 1.5)}), InvalidArgument);
  EXPECT_THROW(blend(ms, b, {Plane::Zero(5, 7)}), DimensionError);
}

TEST(Pipeline, SyntheticSceneContract) {
  const auto scene = testing::synthetic_scene(64, 64, 7);
  auto cfg = small_config();
  cfg.patch_side = 8;
  cfg.stride = 4;
  cfg.training.atom_count = 64;
  const auto r = fuse_pipeline(scene.ms, scene.sar, cfg);
  EXPECT_EQ(r.labels.size(), 15u * 15u);
  EXPECT_EQ(r.grid.size(), r.labels.size());
  EXPECT_EQ(r.trace.rounds(), 3u);
  EXPECT_TRUE((r.mask.plane.array() >= 0.0 && r.mask.plane.array() <= 1.0).all());
  EXPECT_LT(r.trace.objective.back(), r.trace.initial_objective);
  for (int b = 0; b < 3; ++b) {
    EXPECT_LE(spectral_distortion(r.fused.band(b), scene.ms.band(b)),
              spectral_distortion(r.brovey.image.band(b), scene.ms.band(b)) + 1e-9);
  }
  const auto again = fuse_pipeline(scene.ms, scene.sar, cfg);
  EXPECT_EQ(again.fused, r.fused);
  EXPECT_EQ(again.dictionary, r.dictionary);
}

TEST(Pipeline, WithDictionary) {
  const auto scene = testing::synthetic_scene(32, 32, 8);
  const auto cfg = small_config();
  const auto trained = train_on_images(scene.ms, scene.sar, cfg);
  const auto r = fuse_with_dictionary(scene.ms, scene.sar, trained.dictionary, cfg);
  EXPECT_EQ(r.trace.rounds(), 0u);
  EXPECT_EQ(r.labels.size(), r.grid.size());

  auto wrong = cfg;
  wrong.patch_side = 5;
  wrong.stride = 5;
  try {
    fuse_with_dictionary(scene.ms, scene.sar, trained.dictionary, wrong);
    FAIL();
  } catch (const DimensionError& e) {
    EXPECT_EQ(e.stage(), "code");
  }
}

TEST(Pipeline, StageTagging) {
  const auto scene = testing::synthetic_scene(16, 16, 9);
  auto cfg = small_config();
  cfg.stride = 9;
  try {
    fuse_pipeline(scene.ms, scene.sar, cfg);
    FAIL();
  } catch (const InvalidArgument& e) {
    EXPECT_EQ(e.stage(), "config");
  }
  try {
    fuse_pipeline(scene.ms, MultiBandImage::filled(1, 16, 15, 0.5), small_config());
    FAIL();
  } catch (const DimensionError& e) {
    EXPECT_EQ(e.stage(), "brovey");
  }
}

// bands equal to a third of the SAR band: Brovey reproduces the input, every
// patch pair ties and the blend falls back to I_B
TEST(Pipeline, SelfConsistentTie) {
  const auto scene = testing::synthetic_scene(32, 32, 10);
  // SAR on multiples of 3/256 keeps the thirds and their sum exact
  const Plane sar = (scene.sar.band(0).array() * 85.0).round().matrix() * (3.0 / 256.0);
  const Plane third = sar / 3.0;
  const MultiBandImage ms({third, third, third});
  const auto r = fuse_pipeline(ms, MultiBandImage({sar}), small_config());
  EXPECT_TRUE(r.mask.plane.isZero(0.0));
  EXPECT_EQ(r.fused, r.brovey.image);
  for (int b = 0; b < 3; ++b) EXPECT_LE(spectral_distortion(r.fused.band(b), ms.band(b)), 1e-6);
}

}  // namespace
}  // namespace sarfusion
