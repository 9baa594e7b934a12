#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ms4/catalog.hpp"
#include "ms4/monodromy.hpp"

using namespace ms4;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST(Monodromy, CliffordClosesAtQuarterTurns) {
  const SurfaceGeometry g = analyze_surface(clifford_torus(128, 128));
  const MaurerCartanFamily fam = assemble_family(g);
  ScanOptions opts;
  opts.n_theta = 720;
  const MonodromyProfile prof = scan_profile(g, fam, opts);
  EXPECT_EQ(prof.verdict, Verdict::finite);
  EXPECT_EQ(prof.generators, 2);
  ASSERT_EQ(prof.roots.size(), 4u);
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(prof.roots[k], k * kPi / 2, 1e-6);
  for (double d : prof.root_d) EXPECT_LT(d, 1e-6);

  double comm = 0.0;
  for (double c : prof.comm_defect) comm = std::max(comm, c);
  EXPECT_LT(comm, 1e-7);

  const std::vector<LoopPath> gens = deck_generators(g.patch(), {0, 0});
  const Mat5 F0 = frame_matrices(g)[0];
  EXPECT_GT(identity_distance(fam, gens, F0, kPi / 4), 0.1);
  EXPECT_LT(identity_distance(fam, gens, F0, 0.0), 1e-6);

  const DichotomyReport rep = dichotomy_report(prof);
  EXPECT_EQ(rep.verdict, Verdict::finite);
  EXPECT_EQ(rep.roots.size(), 4u);
}

TEST(Monodromy, ProfileIndependentOfBasePoint) {
  const SurfaceGeometry g = analyze_surface(clifford_torus(64, 64));
  const MaurerCartanFamily fam = assemble_family(g);
  const MatField frames = frame_matrices(g);
  const GridIndex other{17, 40};
  const auto g0 = deck_generators(g.patch(), {0, 0});
  const auto g1 = deck_generators(g.patch(), other);
  for (double t : {0.2, 0.9, 2.0}) {
    const double d0 = identity_distance(fam, g0, frames[0], t);
    const double d1 = identity_distance(fam, g1, frames(other.i, other.j), t);
    EXPECT_LT(std::abs(d0 - d1), 1e-8) << t;
  }
}

TEST(Monodromy, ConjugationByTheStartFrame) {
  // M = F_end F_start^T, so rotating the start frame by A conjugates M by A.
  const SurfaceGeometry g = analyze_surface(clifford_torus(64, 64));
  const MaurerCartanFamily fam = assemble_family(g);
  const OmegaSource om(fam, 0.7);
  const LoopPath loop = deck_generators(g.patch(), {0, 0}).front();
  const Mat5 F0 = frame_matrices(g)[0];
  Mat5 A = Mat5::Identity();
  A.block<2, 2>(0, 0) << std::cos(0.4), -std::sin(0.4), std::sin(0.4), std::cos(0.4);
  const Mat5 M = generator_monodromy(om, loop, F0);
  const Mat5 MA = generator_monodromy(om, loop, A * F0);
  EXPECT_LT((MA - A * M * A.transpose()).norm(), 1e-12);
}

TEST(Monodromy, VeroneseAndGeodesicSphereAreCircles) {
  ScanOptions opts;
  opts.n_theta = 72;
  opts.congruence_samples = 8;
  for (const ImmersionField& imm : {veronese_sphere(256, 256), geodesic_sphere(256, 256)}) {
    const SurfaceGeometry g = analyze_surface(imm);
    const MonodromyProfile prof = scan_profile(g, assemble_family(g), opts);
    EXPECT_EQ(prof.verdict, Verdict::circle) << imm.name << ": " << prof.invalid_reason;
    EXPECT_EQ(prof.generators, 1);
    for (const CongruenceSample& c : prof.congruence) EXPECT_LT(c.residual, 1e-4) << imm.name;
  }
}

TEST(Monodromy, NonMinimalInputIsInvalid) {
  const SurfaceGeometry g = analyze_surface(perturb_normal(clifford_torus(128, 128), 1e-3, 7));
  ScanOptions opts;
  opts.n_theta = 72;
  const MonodromyProfile prof = scan_profile(g, assemble_family(g), opts);
  EXPECT_EQ(prof.verdict, Verdict::invalid);
  EXPECT_FALSE(prof.invalid_reason.empty());
  EXPECT_GT(prof.flatness, prof.flatness_gate);
}
