#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "fixtures.hpp"
#include "ms4/adapted.hpp"
#include "ms4/catalog.hpp"
#include "ms4/error.hpp"

using namespace ms4;

namespace {

constexpr double kPi = std::numbers::pi;

Mat2Field identity_coeff(const GridPatch& p) {
  Mat2Field c(p);
  for (std::size_t k = 0; k < p.size(); ++k) c[k] = Mat2::Identity();
  return c;
}

// Second fundamental form with H3 = 1 and H4 = i + g, g = sin u + i sin v,
// so that a_- = |H3 + i H4| = |g| vanishes at the four points (0|pi, 0|pi).
ShapeReport isolated_circle_report(int n) {
  const GridPatch p = fixtures::flat_torus(n);
  SecondFundamentalForm s{RealField(p, 1.0), RealField(p, 0.0), RealField(p, -1.0),
                          RealField(p),      RealField(p),      RealField(p)};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      s.h11_4(i, j) = std::sin(p.u(i));
      s.h22_4(i, j) = -std::sin(p.u(i));
      s.h12_4(i, j) = 1.0 + std::sin(p.v(j));
    }
  }
  return shape_report_from(s, JetSource::analytic);
}

}  // namespace

TEST(AdaptedFrame, CliffordFormsVanishAndAgree) {
  const SurfaceGeometry g = analyze_surface(clifford_torus(128, 128));
  const AdaptedFrameField a = build_adapted_frame(g);
  EXPECT_LT(adapted_alignment_residual(g, a), 1e-10);
  for (std::size_t k = 0; k < a.patch().size(); ++k) {
    ASSERT_NEAR(std::abs(a.kappa1[k]), 1.0, 1e-10);
    ASSERT_NEAR(a.mu1[k], 0.0, 1e-10);
  }
  const FormAgreement fa = connection_form_agreement(a);
  EXPECT_LT(fa.omega12, 1e-8);
  EXPECT_LT(fa.omega34, 1e-8);
  EXPECT_LT(frame_derivative_identity_residual(a), 1e-8);
}

TEST(AdaptedFrame, LawsonFormulaMatchesFrameDerivatives) {
  const SurfaceGeometry g = analyze_surface(fixtures::lawson_torus(2, 1, 128));
  const AdaptedFrameField a = build_adapted_frame(g);
  const double gate = 5.0 * std::pow(g.patch().max_spacing(), 2);
  EXPECT_LT(adapted_alignment_residual(g, a), 1e-8);
  // K_N = 0 in S^3, so mu1 = 0 and kappa1^2 = 1 - K.
  for (std::size_t k = 0; k < a.patch().size(); ++k) {
    ASSERT_NEAR(a.mu1[k], 0.0, 1e-8);
    ASSERT_NEAR(a.kappa1[k] * a.kappa1[k], 1.0 - g.report.K[k], 1e-8);
  }
  double w12 = 0.0;
  for (std::size_t k = 0; k < a.patch().size(); ++k) w12 = std::max(w12, std::abs(a.omega12_E[k]));
  EXPECT_GT(w12, 0.1);  // the check is not vacuous
  const FormAgreement fa = connection_form_agreement(a);
  EXPECT_LT(fa.omega12, gate);
  EXPECT_LT(fa.omega34, gate);
  EXPECT_LT(frame_derivative_identity_residual(a), gate);
}

TEST(ConnectionFormula, MatchesClosedFormOnFlatChart) {
  const fixtures::SyntheticForms s = fixtures::synthetic_forms(128);
  const GridPatch& p = s.kappa1.patch();
  const ConnectionForms cf = connection_forms_formula(s.kappa1, s.mu1, s.coeff, MaskField(p, 0));
  double e12 = 0.0, e34 = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    e12 = std::max(e12, std::abs(cf.omega12_E[k] - s.omega12_E[k]));
    e34 = std::max(e34, std::abs(cf.omega34_E[k] - s.omega34_E[k]));
  }
  const double gate = 5.0 * std::pow(p.max_spacing(), 2);
  EXPECT_LT(e12, gate);
  EXPECT_LT(e34, gate);
  EXPECT_GT(max_abs(s.omega12_E.map([](std::complex<double> c) { return std::abs(c); })), 0.1);
}

TEST(ConnectionFormula, MaskedPointsAreZero) {
  const GridPatch p = fixtures::flat_torus(32);
  MaskField mask(p, 0);
  mask(4, 9) = 1;
  const ConnectionForms cf =
      connection_forms_formula(RealField(p, 1.0), RealField(p, 0.2), identity_coeff(p), mask);
  EXPECT_EQ(cf.omega12_E(4, 9), std::complex<double>(0.0));
  EXPECT_EQ(cf.omega34_E(4, 9), std::complex<double>(0.0));
}

TEST(Superminimality, Verdicts) {
  EXPECT_EQ(superminimality_test(analyze_surface(veronese_sphere(64, 64)).report).verdict,
            SuperminimalVerdict::superminimal);
  EXPECT_EQ(superminimality_test(analyze_surface(clifford_torus(64, 64)).report).verdict,
            SuperminimalVerdict::generic);
  const SuperminimalityResult iso = superminimality_test(isolated_circle_report(64));
  EXPECT_EQ(iso.verdict, SuperminimalVerdict::isolated_circle_points);
  EXPECT_EQ(iso.circle_clusters, 4);
}

TEST(Superminimality, VeroneseHasNoAdaptedFrame) {
  EXPECT_THROW(build_adapted_frame(analyze_surface(veronese_sphere(64, 64))), SuperminimalPatch);
}

TEST(ZeroOrders, WindingOfKnownFields) {
  const GridPatch p = fixtures::flat_torus(64);
  ComplexField g(p);
  for (int i = 0; i < 64; ++i) {
    for (int j = 0; j < 64; ++j) g(i, j) = {std::sin(p.u(i)), std::sin(p.v(j))};
  }
  const std::vector<ZeroOrder> z = zero_orders(g, {{0.0, 0.0}, {kPi, 0.0}, {0.0, kPi}, {kPi, kPi}});
  ASSERT_EQ(z.size(), 4u);
  EXPECT_EQ(z[0].order, 1);
  EXPECT_EQ(z[1].order, -1);
  EXPECT_EQ(z[2].order, -1);
  EXPECT_EQ(z[3].order, 1);
  EXPECT_TRUE(z[1].non_positive);
  for (const ZeroOrder& o : z) EXPECT_LT(o.gap, 0.05);

  const GridPatch q(64, 64, {-1.0, 1.0}, {-1.0, 1.0}, false, false);
  ComplexField sq(q);
  for (int i = 0; i < 64; ++i) {
    for (int j = 0; j < 64; ++j) sq(i, j) = std::pow(std::complex<double>(q.u(i) - 0.1, q.v(j) + 0.2), 2);
  }
  const ZeroOrder o = zero_orders(sq, {{0.1, -0.2}}, 0.3).front();
  EXPECT_EQ(o.order, 2);
  EXPECT_FALSE(o.ambiguous);
}

TEST(Hopf, VanishesOnVeroneseAndIsConstantOnClifford) {
  const HopfField v = hopf_differential(analyze_surface(veronese_sphere(64, 64)));
  EXPECT_EQ(v.chart, HopfChart::superminimal_any);
  EXPECT_LT(max_abs(v.phi_coeff.map([](std::complex<double> c) { return std::abs(c); })), 1e-10);

  const HopfField c = hopf_differential(analyze_surface(clifford_torus(64, 64)));
  EXPECT_EQ(c.chart, HopfChart::conformal);
  EXPECT_LT(c.max_abs_defect, 1e-10);  // 4|phi| = a+ a-
  EXPECT_LT(max_abs(c.holo_residual), 1e-8);
  const std::complex<double> c0 = c.chart_coeff[0];
  EXPECT_GT(std::abs(c0), 0.1);
  for (std::size_t k = 0; k < c.chart_coeff.size(); ++k) ASSERT_LT(std::abs(c.chart_coeff[k] - c0), 1e-10);
  EXPECT_TRUE(c.zero_list.empty());
}

TEST(Hopf, NonConformalChartRejected) {
  EXPECT_THROW(hopf_differential(analyze_surface(fixtures::lawson_torus(2, 1, 64))), GeometryError);
}
