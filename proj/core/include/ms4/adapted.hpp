#pragma once

// Frames aligned with the axes of the curvature ellipse, the functions
// kappa1 and mu1, the connection forms w12 and w34 evaluated on
// E = e1 - i e2, the Hopf differential and winding orders of its zeros.

#include <string>
#include <vector>

#include "ms4/surface.hpp"

namespace ms4 {

struct AdaptedFrameField {
  VecField e1, e2, e3, e4;
  Mat2Field coeff;          // e_j = coeff(j,0) d/du + coeff(j,1) d/dv
  RealField tangent_angle;  // rotation from the surface-kernel tangent frame
  RealField normal_angle;   // rotation from the surface-kernel normal frame
  RealField kappa1, mu1;    // H3 = kappa1, H4 = i mu1 in this frame
  MaskField circle_mask;    // kappa - mu below the circle threshold
  Field<int> gauge_sign;    // +1 / -1: sign of e3 relative to the raw axis choice
  double circle_threshold = 0.0;

  // w12, w34 from the closed-form expressions in kappa1, mu1
  ComplexField omega12_E, omega34_E;
  // <D e1, e2> and <D e3, e4> from frame derivatives
  ComplexField omega12_E_direct, omega34_E_direct;
  // Points excluded from connection-form evaluation (circle mask dilated by
  // the stencil reach, plus kappa1^2 - mu1^2 < 1e-10).
  MaskField form_mask;

  const GridPatch& patch() const { return kappa1.patch(); }
};

// Throws SuperminimalPatch if every point is on the circle locus.
AdaptedFrameField build_adapted_frame(const SurfaceGeometry& g);

// Max over unmasked points of |Im(H3 conj(H4))| type misalignment, i.e. of
// |Re(H3' conj(H4'))| and |h12^3| in the adapted frame, recomputed from jets.
double adapted_alignment_residual(const SurfaceGeometry& g, const AdaptedFrameField& aff);

// omega(E) for the 1-form with parameter components (wu, wv).
ComplexField evaluate_on_E(const RealField& wu, const RealField& wv, const Mat2Field& coeff);
// E(g) for a scalar field.
ComplexField derivative_along_E(const RealField& g, const Mat2Field& coeff);

struct ConnectionForms {
  ComplexField omega12_E, omega34_E;
};

// w12 = -1/4 *d log(kappa1^2 - mu1^2), w34 = *(kappa1 dmu1 - mu1 dkappa1)/(kappa1^2 - mu1^2),
// evaluated on E. Masked points are set to zero.
ConnectionForms connection_forms_formula(const RealField& kappa1, const RealField& mu1,
                                         const Mat2Field& coeff, const MaskField& mask);
ConnectionForms connection_forms(const AdaptedFrameField& aff);

// Max over unmasked points of the two residuals
// |E(kappa1) + 2i kappa1 w12(E) - i mu1 w34(E)| and |E(mu1) + 2i mu1 w12(E) - i kappa1 w34(E)|.
double derivative_identity_residual(const RealField& kappa1, const RealField& mu1,
                                    const Mat2Field& coeff, const ComplexField& omega12_E,
                                    const ComplexField& omega34_E, const MaskField& mask);
// Uses the direct frame-derivative forms.
double frame_derivative_identity_residual(const AdaptedFrameField& aff);

// Max |formula - direct| for w12 and w34 over unmasked points.
struct FormAgreement {
  double omega12 = 0.0;
  double omega34 = 0.0;
};
FormAgreement connection_form_agreement(const AdaptedFrameField& aff);

enum class SuperminimalVerdict { superminimal, isolated_circle_points, generic };
const char* to_string(SuperminimalVerdict v);

struct SuperminimalityResult {
  SuperminimalVerdict verdict = SuperminimalVerdict::generic;
  double max_quarter_product = 0.0;  // max 1/4 a+ a-
  double threshold = 0.0;
  int circle_clusters = 0;
};

SuperminimalityResult superminimality_test(const ShapeReport& report, double eps_sup = 1e-6);

// Connected components of the circle locus (periodic axes wrap); the
// representative is the point of smallest kappa - mu.
struct CircleCluster {
  GridIndex representative;
  int size = 0;
};
std::vector<CircleCluster> circle_clusters(const ShapeReport& report, double threshold);

struct ZeroOrder {
  double u = 0.0, v = 0.0;
  double winding = 0.0;  // raw (1/2pi) sum of arg increments
  int order = 0;         // rounded winding
  double gap = 0.0;      // |winding - order|
  bool ambiguous = false;  // gap > 0.2: order not reported
  bool non_positive = false;  // rounded order <= 0
};

struct ParamPoint {
  double u = 0.0, v = 0.0;
};

// Winding of arg(field) on a circle of radius `radius` (default 4 max(hu,hv))
// with 64 bilinear samples around each candidate.
std::vector<ZeroOrder> zero_orders(const ComplexField& field, const std::vector<ParamPoint>& candidates,
                                   double radius = 0.0);

enum class HopfChart { conformal, superminimal_any };

struct HopfField {
  ComplexField phi_coeff;    // 1/4 (conj(H3)^2 + conj(H4)^2) against phi^4
  ComplexField chart_coeff;  // coefficient of dz^4 in the chart
  RealField holo_residual;   // |d chart_coeff / d zbar|
  std::vector<ZeroOrder> zero_list;
  HopfChart chart = HopfChart::conformal;
  double max_abs_defect = 0.0;  // max | 4|phi| - a+ a- |
};

// The chart must be conformal (E = G, F = 0 within `conformal_tol`) unless
// the surface is superminimal, in which case the coefficient vanishes in any
// chart. Other charts raise GeometryError.
HopfField hopf_differential(const SurfaceGeometry& g, double conformal_tol = 1e-8);

}  // namespace ms4
