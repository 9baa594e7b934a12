#include "ms4/family.hpp"

#include <cmath>
#include <sstream>

#include "ms4/error.hpp"
#include "ms4/parallel.hpp"

namespace ms4 {

namespace {

// Antisymmetric 5x5 with the lower-triangle entry (a, b) set to x.
void put(Mat5& m, int a, int b, double x) {
  m(a, b) = x;
  m(b, a) = -x;
}

}  // namespace

MaurerCartanFamily assemble_family(const SurfaceGeometry& g) {
  const GridPatch& p = g.patch();
  const ImmersionJets& J = g.jets;
  const auto de3 = first_partials(g.normal.e3);
  MaurerCartanFamily fam;
  fam.patch = p;
  for (MatField* m : {&fam.Pu, &fam.Qu, &fam.Su, &fam.Pv, &fam.Qv, &fam.Sv}) {
    *m = MatField(p, Mat5::Zero());
  }
  for (std::size_t k = 0; k < p.size(); ++k) {
    const Vec5& e1 = g.tangent.e1[k];
    const Vec5& e2 = g.tangent.e2[k];
    const Vec5& e4 = g.normal.e4[k];
    const double sE = std::sqrt(g.metric().E[k]);
    const Vec5* fa[2] = {&J.fu[k], &J.fv[k]};
    const Vec5* fua[2] = {&J.fuu[k], &J.fuv[k]};
    const Vec5* e3a[2] = {&de3.du[k], &de3.dv[k]};
    const double h3[2][2] = {{g.sff.h11_3[k], g.sff.h12_3[k]}, {g.sff.h12_3[k], g.sff.h22_3[k]}};
    const double h4[2][2] = {{g.sff.h11_4[k], g.sff.h12_4[k]}, {g.sff.h12_4[k], g.sff.h22_4[k]}};
    // rotated part: H -> -i H, i.e. (h11, h12) -> (h12, -h11)
    const double r3[2][2] = {{g.sff.h12_3[k], -g.sff.h11_3[k]}, {-g.sff.h11_3[k], -g.sff.h12_3[k]}};
    const double r4[2][2] = {{g.sff.h12_4[k], -g.sff.h11_4[k]}, {-g.sff.h11_4[k], -g.sff.h12_4[k]}};
    for (int a = 0; a < 2; ++a) {
      MatField& P = a == 0 ? fam.Pu : fam.Pv;
      MatField& Q = a == 0 ? fam.Qu : fam.Qv;
      MatField& S = a == 0 ? fam.Su : fam.Sv;
      const double w[2] = {fa[a]->dot(e1), fa[a]->dot(e2)};
      put(P[k], 1, 0, w[0]);
      put(P[k], 2, 0, w[1]);
      // <D e1, e2>: e1 = f_u / sqrt(E) up to terms along f and f_u
      put(P[k], 2, 1, fua[a]->dot(e2) / sE);
      put(P[k], 4, 3, e3a[a]->dot(e4));
      for (int j = 0; j < 2; ++j) {
        put(Q[k], 3, 1 + j, h3[j][0] * w[0] + h3[j][1] * w[1]);
        put(Q[k], 4, 1 + j, h4[j][0] * w[0] + h4[j][1] * w[1]);
        put(S[k], 3, 1 + j, r3[j][0] * w[0] + r3[j][1] * w[1]);
        put(S[k], 4, 1 + j, r4[j][0] * w[0] + r4[j][1] * w[1]);
      }
    }
  }
  return fam;
}

MaurerCartanFamily scale_normal_connection(const MaurerCartanFamily& fam, double factor) {
  MaurerCartanFamily out = fam;
  for (MatField* m : {&out.Pu, &out.Pv}) {
    for (auto& x : m->values()) {
      x(4, 3) *= factor;
      x(3, 4) *= factor;
    }
  }
  return out;
}

MaurerCartanField assemble_maurer_cartan(const MaurerCartanFamily& fam, double theta) {
  const double c2 = std::cos(2.0 * theta), s2 = std::sin(2.0 * theta);
  MaurerCartanField mc;
  mc.theta = theta;
  mc.Ou = MatField(fam.patch);
  mc.Ov = MatField(fam.patch);
  for (std::size_t k = 0; k < fam.patch.size(); ++k) {
    mc.Ou[k] = fam.omega(k, Axis::u, c2, s2);
    mc.Ov[k] = fam.omega(k, Axis::v, c2, s2);
  }
  return mc;
}

MaurerCartanField frame_connection(const MatField& frames) {
  const auto d = first_partials(frames);
  MaurerCartanField mc;
  mc.Ou = MatField(frames.patch());
  mc.Ov = MatField(frames.patch());
  for (std::size_t k = 0; k < frames.size(); ++k) {
    mc.Ou[k] = frames[k].transpose() * d.du[k];
    mc.Ov[k] = frames[k].transpose() * d.dv[k];
  }
  return mc;
}

RealField flatness_residual(const MaurerCartanField& mc) {
  const GridPatch& p = mc.patch();
  RealField out(p, 0.0);
  const double hu = p.hu(), hv = p.hv();
  for (int i = 0; i < p.nu(); ++i) {
    if (!p.periodic_u() && i == p.nu() - 1) continue;
    const int i1 = p.wrap_u(i + 1);
    for (int j = 0; j < p.nv(); ++j) {
      if (!p.periodic_v() && j == p.nv() - 1) continue;
      const int j1 = p.wrap_v(j + 1);
      const Mat5 dvOu = 0.5 * ((mc.Ou(i, j1) + mc.Ou(i1, j1)) - (mc.Ou(i, j) + mc.Ou(i1, j))) / hv;
      const Mat5 duOv = 0.5 * ((mc.Ov(i1, j) + mc.Ov(i1, j1)) - (mc.Ov(i, j) + mc.Ov(i, j1))) / hu;
      const Mat5 Ou = 0.25 * (mc.Ou(i, j) + mc.Ou(i1, j) + mc.Ou(i, j1) + mc.Ou(i1, j1));
      const Mat5 Ov = 0.25 * (mc.Ov(i, j) + mc.Ov(i1, j) + mc.Ov(i, j1) + mc.Ov(i1, j1));
      out(i, j) = (duOv - dvOu + Ou * Ov - Ov * Ou).norm();
    }
  }
  return out;
}

double max_flatness(const MaurerCartanField& mc) { return max_abs(flatness_residual(mc)); }

double flatness_gate(const GridPatch& patch) {
  const double h = patch.max_spacing();
  return 5.0 * h * h;
}

OmegaSource::OmegaSource(const MaurerCartanFamily& fam, double theta)
    : patch_(&fam.patch), fam_(&fam), c2_(std::cos(2.0 * theta)), s2_(std::sin(2.0 * theta)) {}

OmegaSource::OmegaSource(const MaurerCartanField& mc) : patch_(&mc.Ou.patch()), field_(&mc) {}

Mat5 OmegaSource::operator()(int i, int j, Axis a) const {
  const std::size_t k = patch_->index(patch_->wrap_u(i), patch_->wrap_v(j));
  if (fam_) return fam_->omega(k, a, c2_, s2_);
  return a == Axis::u ? field_->Ou[k] : field_->Ov[k];
}

MaurerCartanField OmegaSource::field() const {
  if (field_) return *field_;
  MaurerCartanField mc;
  mc.Ou = MatField(*patch_);
  mc.Ov = MatField(*patch_);
  for (std::size_t k = 0; k < patch_->size(); ++k) {
    mc.Ou[k] = fam_->omega(k, Axis::u, c2_, s2_);
    mc.Ov[k] = fam_->omega(k, Axis::v, c2_, s2_);
  }
  return mc;
}

Mat5 polar(const Mat5& x) {
  Mat5 y = x;
  double err = (y.transpose() * y - Mat5::Identity()).norm();
  if (!(err < 0.1)) {
    Eigen::JacobiSVD<Mat5> svd(x, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return svd.matrixU() * svd.matrixV().transpose();
  }
  for (int it = 0; it < 6 && err > 1e-14; ++it) {
    y = 0.5 * y * (3.0 * Mat5::Identity() - y.transpose() * y);
    err = (y.transpose() * y - Mat5::Identity()).norm();
  }
  return y;
}

namespace {

Mat5 midpoint_omega(const OmegaSource& omega, int i, int j, Axis axis, int m) {
  const GridPatch& p = omega.patch();
  const int n = p.count(axis);
  auto at = [&](int t) { return axis == Axis::u ? omega(t, j, axis) : omega(i, t, axis); };
  if (p.periodic(axis) || (m - 1 >= 0 && m + 2 <= n - 1)) {
    return (-at(m - 1) + 9.0 * at(m) + 9.0 * at(m + 1) - at(m + 2)) / 16.0;
  }
  if (m - 1 < 0) return (5.0 * at(m) + 15.0 * at(m + 1) - 5.0 * at(m + 2) + at(m + 3)) / 16.0;
  return (at(m - 2) - 5.0 * at(m - 1) + 15.0 * at(m) + 5.0 * at(m + 1)) / 16.0;
}

}  // namespace

Mat5 rk4_step(const OmegaSource& omega, const Mat5& F, int i, int j, Axis axis, int dir) {
  const GridPatch& p = omega.patch();
  const double s = dir * p.spacing(axis);
  const int t = axis == Axis::u ? i : j;
  const int m = dir > 0 ? t : t - 1;
  const Mat5 Oa = omega(i, j, axis);
  const Mat5 Ob = axis == Axis::u ? omega(i + dir, j, axis) : omega(i, j + dir, axis);
  const Mat5 Om = midpoint_omega(omega, i, j, axis, m);
  const Mat5 k1 = s * F * Oa;
  const Mat5 k2 = s * (F + 0.5 * k1) * Om;
  const Mat5 k3 = s * (F + 0.5 * k2) * Om;
  const Mat5 k4 = s * (F + k3) * Ob;
  return polar(F + (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0);
}

Mat5 transport(const OmegaSource& omega, const LoopPath& loop, const Mat5& F_start) {
  Mat5 F = F_start;
  for (std::size_t s = 1; s < loop.points.size(); ++s) {
    const GridIndex a = loop.points[s - 1], b = loop.points[s];
    const int di = b.i - a.i, dj = b.j - a.j;
    if (std::abs(di) + std::abs(dj) != 1) throw GeometryError("loop steps must join grid neighbours");
    if (di != 0) {
      F = rk4_step(omega, F, a.i, a.j, Axis::u, di);
    } else {
      F = rk4_step(omega, F, a.i, a.j, Axis::v, dj);
    }
  }
  return F;
}

namespace {

MatField integrate_order(const OmegaSource& omega, const GridPatch& dom, const Mat5& seed,
                         bool rows_first) {
  MatField F(dom);
  F(0, 0) = seed;
  if (rows_first) {
    for (int i = 0; i + 1 < dom.nu(); ++i) F(i + 1, 0) = rk4_step(omega, F(i, 0), i, 0, Axis::u, 1);
    parallel_for(static_cast<std::size_t>(dom.nu()), [&](std::size_t ii) {
      const int i = static_cast<int>(ii);
      for (int j = 0; j + 1 < dom.nv(); ++j) F(i, j + 1) = rk4_step(omega, F(i, j), i, j, Axis::v, 1);
    });
  } else {
    for (int j = 0; j + 1 < dom.nv(); ++j) F(0, j + 1) = rk4_step(omega, F(0, j), 0, j, Axis::v, 1);
    parallel_for(static_cast<std::size_t>(dom.nv()), [&](std::size_t jj) {
      const int j = static_cast<int>(jj);
      for (int i = 0; i + 1 < dom.nu(); ++i) F(i + 1, j) = rk4_step(omega, F(i, j), i, j, Axis::u, 1);
    });
  }
  return F;
}

}  // namespace

DeformedPatch integrate_frame(const OmegaSource& omega, const Mat5& seed,
                              const IntegrationOptions& opts) {
  DeformedPatch d;
  d.domain = omega.patch().unwrapped();
  d.frame = integrate_order(omega, d.domain, seed, true);
  d.position = VecField(d.domain);
  for (std::size_t k = 0; k < d.domain.size(); ++k) {
    d.position[k] = d.frame[k].col(0);
    d.orthogonality =
        std::max(d.orthogonality, (d.frame[k].transpose() * d.frame[k] - Mat5::Identity()).norm());
  }
  const GridPatch& p = omega.patch();
  const RealField flat = flatness_residual(omega.field());
  d.flatness = max_abs(flat);
  d.stokes_bound = pairwise_sum(flat.values()) * p.hu() * p.hv();
  if (opts.check_path) {
    if (d.flatness > flatness_gate(p)) {
      std::ostringstream os;
      os << "Maurer-Cartan flatness residual " << d.flatness << " exceeds the gate " << flatness_gate(p);
      throw IntegrabilityBroken(os.str());
    }
    const MatField other = integrate_order(omega, d.domain, seed, false);
    for (std::size_t k = 0; k < d.domain.size(); ++k) {
      d.path_dependence = std::max(d.path_dependence, (d.frame[k] - other[k]).norm());
    }
    if (d.path_dependence > opts.path_tol + d.stokes_bound) {
      std::ostringstream os;
      os << "frame integration is path dependent: max discrepancy " << d.path_dependence
         << " exceeds " << opts.path_tol << " + " << d.stokes_bound;
      throw IntegrabilityBroken(os.str());
    }
  }
  return d;
}

ImmersionField deformed_immersion(const DeformedPatch& d, int orientation) {
  ImmersionField imm;
  imm.name = "deformed";
  imm.patch = d.domain;
  imm.position = d.position;
  for (auto& x : imm.position.values()) x.normalize();
  imm.orientation = orientation;
  return imm;
}

CongruenceResult congruence_test(const VecField& a, const VecField& b) {
  return congruence_test(a, b, MaskField(a.patch(), 1));
}

CongruenceResult congruence_test(const VecField& a, const VecField& b, const MaskField& mask) {
  if (a.patch() != b.patch() || a.patch() != mask.patch()) {
    throw GeometryError("congruence test needs fields on the same grid");
  }
  Mat5 C = Mat5::Zero();
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (mask[k]) C += b[k] * a[k].transpose();
  }
  Eigen::JacobiSVD<Mat5> svd(C, Eigen::ComputeFullU | Eigen::ComputeFullV);
  CongruenceResult r;
  r.isometry = svd.matrixU() * svd.matrixV().transpose();
  r.determinant = r.isometry.determinant();
  const auto& sv = svd.singularValues();
  r.rank = 0;
  for (int i = 0; i < 5; ++i) {
    if (sv(i) > 1e-9 * sv(0)) ++r.rank;
  }
  r.degenerate = r.rank < 5;
  std::vector<double> sq;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (mask[k]) sq.push_back((r.isometry * a[k] - b[k]).squaredNorm());
  }
  if (sq.empty()) throw GeometryError("congruence test over an empty mask");
  r.residual = std::sqrt(pairwise_sum(sq) / static_cast<double>(sq.size()));
  return r;
}

}  // namespace ms4
