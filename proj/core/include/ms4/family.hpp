#pragma once

// The associated family: connection matrices of the moving frame
// F = (f | e1 e2 e3 e4) with the second fundamental form rotated by theta,
// their flatness, frame integration and congruence fitting.
//
// Convention: dF = F * Omega, Omega_ab(X) = <e_a, D_X e_b> (indices 0..4 for
// f, e1, e2, e3, e4). The rotated form has H_a -> exp(-2i theta) H_a.

#include <optional>

#include "ms4/surface.hpp"

namespace ms4 {

// Omega_theta(d/da) = P_a + cos(2 theta) Q_a + sin(2 theta) S_a at every
// grid point; P holds the coframe, w12 and w34, Q and S the h-block.
struct MaurerCartanFamily {
  GridPatch patch;
  MatField Pu, Qu, Su;
  MatField Pv, Qv, Sv;

  Mat5 omega(std::size_t k, Axis a, double c2, double s2) const {
    return a == Axis::u ? Mat5(Pu[k] + c2 * Qu[k] + s2 * Su[k])
                        : Mat5(Pv[k] + c2 * Qv[k] + s2 * Sv[k]);
  }
};

MaurerCartanFamily assemble_family(const SurfaceGeometry& g);
// Copy with w34 multiplied by `factor` (breaks the Ricci equation unless 1).
MaurerCartanFamily scale_normal_connection(const MaurerCartanFamily& fam, double factor);

struct MaurerCartanField {
  double theta = 0.0;
  MatField Ou, Ov;
  const GridPatch& patch() const { return Ou.patch(); }
};

MaurerCartanField assemble_maurer_cartan(const MaurerCartanFamily& fam, double theta);

// F^T dF/da by finite differences of a frame field (for the theta = 0 check).
MaurerCartanField frame_connection(const MatField& frames);

// Per-plaquette |d_u Omega_v - d_v Omega_u + [Omega_u, Omega_v]|_F, stored at
// the lower-left corner of each cell. Cells past an open edge hold 0.
RealField flatness_residual(const MaurerCartanField& mc);
double max_flatness(const MaurerCartanField& mc);
// 5 max(hu, hv)^2
double flatness_gate(const GridPatch& patch);

// Reads Omega at grid points, either from a family at fixed theta or from an
// assembled field.
class OmegaSource {
 public:
  OmegaSource(const MaurerCartanFamily& fam, double theta);
  explicit OmegaSource(const MaurerCartanField& mc);
  const GridPatch& patch() const { return *patch_; }
  Mat5 operator()(int i, int j, Axis a) const;
  // Omega at every grid point.
  MaurerCartanField field() const;

 private:
  const GridPatch* patch_;
  const MaurerCartanFamily* fam_ = nullptr;
  const MaurerCartanField* field_ = nullptr;
  double c2_ = 1.0, s2_ = 0.0;
};

// Nearest orthogonal matrix (polar factor): Newton-Schulz with SVD fallback.
Mat5 polar(const Mat5& x);

// One RK4 step of F' = F Omega along `axis` from grid node (i, j) (indices
// may be unwrapped) in direction dir = +-1. Omega at the half step comes
// from 4-point Lagrange interpolation along the grid line.
Mat5 rk4_step(const OmegaSource& omega, const Mat5& F, int i, int j, Axis axis, int dir);

// Transports F_start along the loop; returns F_end.
Mat5 transport(const OmegaSource& omega, const LoopPath& loop, const Mat5& F_start);

struct DeformedPatch {
  double theta = 0.0;
  GridPatch domain;  // unwrapped, open in both axes
  MatField frame;
  VecField position;
  double flatness = 0.0;         // max plaquette residual of the input
  double stokes_bound = 0.0;     // sum of plaquette residual * cell area
  double path_dependence = 0.0;  // max |F_rows-first - F_columns-first|_F
  double orthogonality = 0.0;    // max |F^T F - I|_F
};

struct IntegrationOptions {
  double path_tol = 1e-4;
  bool check_path = true;
};

// Integrates over the unwrapped fundamental domain from `seed` at the grid
// origin: along u at j = 0, then along v for every i. The opposite order is
// the path-dependence diagnostic. With check_path, throws IntegrabilityBroken
// when the flatness exceeds flatness_gate or the path dependence exceeds
// path_tol + stokes_bound (more than the measured curvature accounts for).
DeformedPatch integrate_frame(const OmegaSource& omega, const Mat5& seed,
                              const IntegrationOptions& opts = {});

// Immersion on the unwrapped domain for re-analysis (finite-difference jets).
ImmersionField deformed_immersion(const DeformedPatch& d, int orientation = 1);

// Restriction of a field on a (possibly periodic) patch to its unwrapped
// domain, duplicating seam samples.
template <class T>
Field<T> unwrap_field(const Field<T>& f) {
  const GridPatch& p = f.patch();
  Field<T> out(p.unwrapped());
  for (int i = 0; i < out.patch().nu(); ++i) {
    for (int j = 0; j < out.patch().nv(); ++j) out(i, j) = f(p.wrap_u(i), p.wrap_v(j));
  }
  return out;
}

struct CongruenceResult {
  Mat5 isometry = Mat5::Identity();
  double residual = 0.0;  // RMS of |A fA - fB|
  double determinant = 1.0;
  int rank = 5;           // numerical rank of the cross-covariance
  bool degenerate = false;
};

// Orthogonal Procrustes fit over O(5): A minimizes sum |A fA - fB|^2.
CongruenceResult congruence_test(const VecField& a, const VecField& b);
// Fit and residual over the points where `mask` is set.
CongruenceResult congruence_test(const VecField& a, const VecField& b, const MaskField& mask);

}  // namespace ms4
