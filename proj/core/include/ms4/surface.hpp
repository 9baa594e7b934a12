#pragma once

// Local invariants of an immersed surface in the unit sphere S^4 of R^5:
// tangent and normal frames, second fundamental form, Gaussian and normal
// curvature, curvature ellipse semi-axes and the functions a_+ and a_-.

#include <optional>
#include <string>

#include "ms4/calculus.hpp"
#include "ms4/grid.hpp"

namespace ms4 {

enum class JetSource { analytic, finite_difference };
enum class JetPreference { automatic, analytic, finite_difference };

const char* to_string(JetSource s);

// Parameter derivatives of the position: first (fu, fv) and second
// (fuu, fuv, fvv) jets.
struct ImmersionJets {
  VecField fu, fv, fuu, fuv, fvv;
};

struct ImmersionField {
  std::string name;
  GridPatch patch;
  VecField position;
  std::optional<ImmersionJets> jets;
  // +1 when (d/du, d/dv) is positively oriented on M, -1 otherwise.
  int orientation = 1;

  const GridPatch& grid() const { return patch; }
  // Throws GeometryError unless |f| = 1 within `norm_tol` and all samples
  // are finite.
  void validate(double norm_tol = 1e-12) const;
};

// Analytic jets when present and allowed, else finite differences.
std::pair<ImmersionJets, JetSource> resolve_jets(const ImmersionField& imm, JetPreference pref);

struct TangentFrame {
  VecField e1, e2;
  MetricField metric;
  // e_j = coeff(j,0) d/du + coeff(j,1) d/dv
  Mat2Field coeff;
};

// Oriented Gram-Schmidt of (f_u, f_v).
TangentFrame tangent_frame(const ImmersionField& imm, const ImmersionJets& jets);
// e1' = cos(a) e1 + sin(a) e2, e2' = -sin(a) e1 + cos(a) e2.
TangentFrame rotate_tangent_frame(const TangentFrame& tf, const RealField& angle);

struct NormalFrameField {
  VecField e3, e4;
  int orientation = 1;  // +1: det(f, e1, e2, e3, e4) > 0
  // Seam mismatch angles removed by spreading a linear rotation along each
  // periodic direction (radians, before spreading).
  double seam_angle_u = 0.0;
  RealField seam_angle_v;  // per u-index, length nu (first row only)
  // Set when the spread corrections do not close up around the u-seam, i.e.
  // no continuous global frame exists on the chart. The mask marks the seam
  // column where the frame is discontinuous.
  bool nontrivial_holonomy = false;
  MaskField holonomy_mask;
};

// Smooth oriented orthonormal normal frame. Seeded at the grid origin by
// projecting fixed ambient axes, then propagated by projecting the
// neighbour frame along grid lines. The remaining freedom is an SO(2)
// rotation per point (see rotate_normal_gauge).
NormalFrameField normal_frame(const ImmersionField& imm, const TangentFrame& tf);
NormalFrameField rotate_normal_gauge(const NormalFrameField& nf, const RealField& angle);
// e4 -> -e4: reverses the orientation of the normal bundle.
NormalFrameField flip_normal_orientation(const NormalFrameField& nf);

// Components h^alpha_jk = <B(e_j, e_k), e_alpha>.
struct SecondFundamentalForm {
  RealField h11_3, h12_3, h22_3;
  RealField h11_4, h12_4, h22_4;
};

struct ShapeReport {
  ComplexField H3, H4;  // H_a = h^a_11 + i h^a_12
  RealField normB2;     // |B|^2 = 2(|H3|^2 + |H4|^2)
  RealField K;          // 1 - |B|^2 / 2
  RealField KN;         // i(H3 conj(H4) - conj(H3) H4)
  RealField kappa, mu;  // semi-axes of the curvature ellipse
  RealField a_plus, a_minus;
  RealField minimality;  // max_a |h^a_11 + h^a_22|
  JetSource jets = JetSource::analytic;
  // max |a_pm^2 - (1 - K pm KN)|, the consistency of the two routes to a_pm
  double radicand_defect = 0.0;

  const GridPatch& patch() const { return K.patch(); }
};

SecondFundamentalForm second_fundamental_components(const ImmersionJets& jets,
                                                    const TangentFrame& tf,
                                                    const NormalFrameField& nf);
ShapeReport second_fundamental_form(const ImmersionJets& jets, const TangentFrame& tf,
                                    const NormalFrameField& nf, JetSource source);
// Builds the report from given components (used by the kernel and by tests
// that fabricate second fundamental forms).
ShapeReport shape_report_from(const SecondFundamentalForm& sff, JetSource source);

double minimality_residual(const ShapeReport& report);

// Max discrepancy of the frame-independent fields K, KN, kappa, mu, a_pm,
// |B|^2 between two reports of the same immersion.
double gauge_invariance_check(const ShapeReport& a, const ShapeReport& b);

// Everything the downstream modules need from one immersion.
struct SurfaceGeometry {
  ImmersionField immersion;
  ImmersionJets jets;
  JetSource jet_source = JetSource::analytic;
  TangentFrame tangent;
  NormalFrameField normal;
  SecondFundamentalForm sff;
  ShapeReport report;

  const GridPatch& patch() const { return immersion.patch; }
  const MetricField& metric() const { return tangent.metric; }
};

SurfaceGeometry analyze_surface(const ImmersionField& imm,
                                JetPreference pref = JetPreference::automatic);

// Frame matrix (f | e1 e2 e3 e4) at every grid point.
MatField frame_matrices(const SurfaceGeometry& g);

}  // namespace ms4
