#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fixtures.hpp"
#include "ms4/catalog.hpp"
#include "ms4/error.hpp"
#include "ms4/surface.hpp"

using namespace ms4;

namespace {

double max_dev(const RealField& f, double c) {
  double m = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) m = std::max(m, std::abs(f[k] - c));
  return m;
}

double max_diff(const RealField& a, const RealField& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

void expect_clifford(const ShapeReport& r, double tol) {
  EXPECT_LT(max_dev(r.K, 0.0), tol);
  EXPECT_LT(max_dev(r.KN, 0.0), tol);
  EXPECT_LT(max_dev(r.normB2, 2.0), 2 * tol);
  EXPECT_LT(max_dev(r.kappa, 1.0), tol);
  EXPECT_LT(max_dev(r.mu, 0.0), tol);
  EXPECT_LT(max_dev(r.a_plus, 1.0), tol);
  EXPECT_LT(max_dev(r.a_minus, 1.0), tol);
}

}  // namespace

TEST(Clifford, ClosedFormInvariantsWithAnalyticJets) {
  const SurfaceGeometry g = analyze_surface(clifford_torus(256, 256), JetPreference::analytic);
  EXPECT_EQ(g.jet_source, JetSource::analytic);
  expect_clifford(g.report, 1e-9);
  EXPECT_LT(minimality_residual(g.report), 1e-10);
}

TEST(Clifford, FiniteDifferenceJetsWithinSecondOrderBound) {
  const SurfaceGeometry g = analyze_surface(clifford_torus(256, 256), JetPreference::finite_difference);
  EXPECT_EQ(g.jet_source, JetSource::finite_difference);
  expect_clifford(g.report, 1e-5);
  EXPECT_EQ(g.report.jets, JetSource::finite_difference);
}

TEST(Clifford, FrameIsOrthonormalAndPositivelyOriented) {
  const SurfaceGeometry g = analyze_surface(clifford_torus(64, 64));
  const MatField F = frame_matrices(g);
  double orth = 0.0, det_min = 1.0;
  for (std::size_t k = 0; k < F.size(); ++k) {
    orth = std::max(orth, (F[k].transpose() * F[k] - Mat5::Identity()).norm());
    det_min = std::min(det_min, F[k].determinant());
  }
  EXPECT_LT(orth, 1e-12);
  EXPECT_GT(det_min, 0.99);
  EXPECT_FALSE(g.normal.nontrivial_holonomy);
}

TEST(Veronese, SuperminimalClosedForm) {
  for (SphereChart c : {SphereChart::a, SphereChart::b}) {
    const SurfaceGeometry g = analyze_surface(veronese_sphere(128, 128, c));
    const ShapeReport& r = g.report;
    EXPECT_LT(max_dev(r.K, 1.0 / 3.0), 1e-10);
    EXPECT_LT(max_dev(r.KN, 2.0 / 3.0), 1e-10);
    EXPECT_LT(max_abs(r.a_minus), 1e-8);
    EXPECT_LT(max_diff(r.kappa, r.mu), 1e-8);
    EXPECT_LT(minimality_residual(r), 1e-10);
  }
}

TEST(GeodesicSphere, TotallyGeodesic) {
  const SurfaceGeometry g = analyze_surface(geodesic_sphere(64, 64));
  EXPECT_LT(max_dev(g.report.normB2, 0.0), 1e-12);
  EXPECT_LT(max_dev(g.report.K, 1.0), 1e-12);
  EXPECT_LT(max_dev(g.report.KN, 0.0), 1e-12);
  EXPECT_LT(max_abs(g.report.a_plus), 1e-6);
  EXPECT_LT(max_abs(g.report.a_minus), 1e-6);
}

TEST(Lawson, GaussEquationAgainstIntrinsicCurvature) {
  const int m = 2, k = 1, n = 128;
  const SurfaceGeometry g = analyze_surface(fixtures::lawson_torus(m, k, n));
  EXPECT_LT(minimality_residual(g.report), 1e-10);
  EXPECT_LT(max_abs(g.report.KN), 1e-10);  // lies in a totally geodesic S^3
  EXPECT_LT(max_diff(g.report.a_plus, g.report.a_minus), 1e-8);
  double err = 0.0;
  const GridPatch& p = g.patch();
  for (int i = 0; i < p.nu(); ++i) {
    for (int j = 0; j < p.nv(); ++j) {
      err = std::max(err, std::abs(g.report.K(i, j) - fixtures::lawson_curvature(m, k, p.v(j))));
    }
  }
  EXPECT_LT(err, 1e-10);
}

TEST(Gauge, InvariantsIndependentOfFrameRotations) {
  const SurfaceGeometry g = analyze_surface(fixtures::lawson_torus(3, 2, 64));
  const GridPatch& p = g.patch();
  RealField t(p), s(p);
  for (int i = 0; i < p.nu(); ++i) {
    for (int j = 0; j < p.nv(); ++j) {
      t(i, j) = std::sin(p.u(i)) + 0.5 * std::cos(2 * p.v(j));
      s(i, j) = 1.3 * std::cos(p.u(i) - p.v(j));
    }
  }
  const TangentFrame tf = rotate_tangent_frame(g.tangent, t);
  const NormalFrameField nf = rotate_normal_gauge(g.normal, s);
  const ShapeReport r = shape_report_from(second_fundamental_components(g.jets, tf, nf), g.jet_source);
  EXPECT_LT(gauge_invariance_check(g.report, r), 1e-12);
  // H picks up exp(2i t) from the tangent rotation: |H| is unchanged but H itself is not.
  EXPECT_GT(std::abs(r.H3(5, 7) - g.report.H3(5, 7)) + std::abs(r.H4(5, 7) - g.report.H4(5, 7)), 1e-3);
}

TEST(Gauge, NormalOrientationFlipNegatesKN) {
  const SurfaceGeometry g = analyze_surface(veronese_sphere(64, 64));
  const NormalFrameField nf = flip_normal_orientation(g.normal);
  EXPECT_EQ(nf.orientation, -g.normal.orientation);
  const ShapeReport r = shape_report_from(second_fundamental_components(g.jets, g.tangent, nf), g.jet_source);
  EXPECT_LT(max_dev(r.KN, -2.0 / 3.0), 1e-10);
  EXPECT_LT(max_diff(r.a_plus, g.report.a_minus), 1e-8);
  EXPECT_LT(max_diff(r.a_minus, g.report.a_plus), 1e-8);
}

TEST(Report, TwoRoutesToApmAgree) {
  for (const ImmersionField& imm : {clifford_torus(64, 64), veronese_sphere(64, 64), fixtures::lawson_torus(2, 1, 64)}) {
    const SurfaceGeometry g = analyze_surface(imm);
    EXPECT_LT(g.report.radicand_defect, 1e-10) << imm.name;
  }
}

TEST(Immersion, ValidateRejectsOffSphereAndNonFinite) {
  ImmersionField imm = clifford_torus(32, 32);
  EXPECT_NO_THROW(imm.validate());
  imm.position(3, 4) *= 1.0 + 1e-5;
  EXPECT_THROW(imm.validate(), GeometryError);
  imm = clifford_torus(32, 32);
  imm.position(1, 1)(2) = std::nan("");
  EXPECT_THROW(imm.validate(), GeometryError);
}

TEST(Immersion, AnalyticJetsRequiredWhenRequested) {
  ImmersionField imm = clifford_torus(32, 32);
  imm.jets.reset();
  EXPECT_THROW(analyze_surface(imm, JetPreference::analytic), SourceError);
  EXPECT_EQ(analyze_surface(imm).jet_source, JetSource::finite_difference);
}

TEST(Immersion, DegenerateDifferentialRejected) {
  ImmersionField imm = clifford_torus(32, 32);
  imm.jets.reset();
  for (int i = 0; i < 32; ++i) {
    for (int j = 0; j < 32; ++j) imm.position(i, j) = imm.position(i, 0);
  }
  EXPECT_THROW(analyze_surface(imm), GeometryError);
}
