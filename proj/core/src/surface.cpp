#include "ms4/surface.hpp"

#include <algorithm>
#include <array>
#include <numbers>
#include <sstream>

#include "ms4/error.hpp"
#include "ms4/parallel.hpp"

namespace ms4 {

const char* to_string(JetSource s) {
  return s == JetSource::analytic ? "analytic" : "finite_difference";
}

void ImmersionField::validate(double norm_tol) const {
  if (position.patch() != patch) throw GeometryError("position field does not match the patch");
  require_finite(position, "position");
  for (std::size_t k = 0; k < patch.size(); ++k) {
    const double drift = std::abs(position[k].norm() - 1.0);
    if (drift > norm_tol) {
      const GridIndex g = patch.unflatten(k);
      std::ostringstream os;
      os << "|f| deviates from 1 by " << drift << " at grid point (" << g.i << ", " << g.j << ")";
      throw GeometryError(os.str());
    }
  }
  if (jets) {
    for (const VecField* f : {&jets->fu, &jets->fv, &jets->fuu, &jets->fuv, &jets->fvv}) {
      if (f->patch() != patch) throw GeometryError("jet field does not match the patch");
      require_finite(*f, "jet");
    }
  }
}

std::pair<ImmersionJets, JetSource> resolve_jets(const ImmersionField& imm, JetPreference pref) {
  if (pref == JetPreference::analytic && !imm.jets) {
    throw SourceError("analytic jets requested but the surface has none");
  }
  if (imm.jets && pref != JetPreference::finite_difference) {
    return {*imm.jets, JetSource::analytic};
  }
  auto d = second_partials(imm.position);
  ImmersionJets j{std::move(d.du), std::move(d.dv), std::move(d.duu), std::move(d.duv),
                  std::move(d.dvv)};
  return {std::move(j), JetSource::finite_difference};
}

TangentFrame tangent_frame(const ImmersionField& imm, const ImmersionJets& jets) {
  const GridPatch& p = imm.patch;
  RealField E(p), F(p), G(p);
  for (std::size_t k = 0; k < p.size(); ++k) {
    E[k] = jets.fu[k].squaredNorm();
    F[k] = jets.fu[k].dot(jets.fv[k]);
    G[k] = jets.fv[k].squaredNorm();
  }
  TangentFrame tf;
  tf.metric = MetricField::from_coefficients(std::move(E), std::move(F), std::move(G));
  tf.e1 = VecField(p);
  tf.e2 = VecField(p);
  tf.coeff = Mat2Field(p);
  const double orient = imm.orientation < 0 ? -1.0 : 1.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const Vec5& f = imm.position[k];
    const Vec5 fu = jets.fu[k] - f.dot(jets.fu[k]) * f;
    const Vec5 fv = jets.fv[k] - f.dot(jets.fv[k]) * f;
    const double Ek = tf.metric.E[k];
    const double Fk = tf.metric.F[k];
    const double sE = std::sqrt(Ek);
    const double s = tf.metric.dA[k] / sE;
    tf.e1[k] = fu / sE;
    tf.e2[k] = orient * (fv - (Fk / Ek) * fu) / s;
    Mat2 c;
    c << 1.0 / sE, 0.0, orient * (-Fk / (Ek * s)), orient / s;
    tf.coeff[k] = c;
  }
  return tf;
}

TangentFrame rotate_tangent_frame(const TangentFrame& tf, const RealField& angle) {
  TangentFrame out = tf;
  for (std::size_t k = 0; k < angle.size(); ++k) {
    const double c = std::cos(angle[k]), s = std::sin(angle[k]);
    out.e1[k] = c * tf.e1[k] + s * tf.e2[k];
    out.e2[k] = -s * tf.e1[k] + c * tf.e2[k];
    out.coeff[k].row(0) = c * tf.coeff[k].row(0) + s * tf.coeff[k].row(1);
    out.coeff[k].row(1) = -s * tf.coeff[k].row(0) + c * tf.coeff[k].row(1);
  }
  return out;
}

namespace {

struct LocalBasis {
  Vec5 f, e1, e2;
  Vec5 project(const Vec5& x) const {
    return x - f.dot(x) * f - e1.dot(x) * e1 - e2.dot(x) * e2;
  }
};

double frame_det(const LocalBasis& b, const Vec5& e3, const Vec5& e4) {
  Mat5 m;
  m << b.f, b.e1, b.e2, e3, e4;
  return m.determinant();
}

// Normal pair at a point closest to a given pair (e3, e4) from a neighbour,
// with e4 fixed by the orientation rule.
std::pair<Vec5, Vec5> transport(const LocalBasis& b, const Vec5& e3, const Vec5& e4) {
  Vec5 n3 = b.project(e3);
  double l = n3.norm();
  if (!(l > 1e-3)) throw GeometryError("normal frame propagation lost rank");
  n3 /= l;
  Vec5 n4 = b.project(e4);
  n4 -= n3.dot(n4) * n3;
  l = n4.norm();
  if (!(l > 1e-3)) throw GeometryError("normal frame propagation lost rank");
  n4 /= l;
  if (frame_det(b, n3, n4) < 0.0) n4 = -n4;
  return {n3, n4};
}

std::pair<Vec5, Vec5> rotated(const Vec5& e3, const Vec5& e4, double a) {
  const double c = std::cos(a), s = std::sin(a);
  return {c * e3 + s * e4, -s * e3 + c * e4};
}

// Angle a with transported e3 = cos(a) e3 + sin(a) e4 in the target frame.
double mismatch(const Vec5& transported, const Vec5& e3, const Vec5& e4) {
  return std::atan2(transported.dot(e4), transported.dot(e3));
}

double unwrap_near(double a, double ref) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  return a + two_pi * std::round((ref - a) / two_pi);
}

}  // namespace

NormalFrameField normal_frame(const ImmersionField& imm, const TangentFrame& tf) {
  const GridPatch& p = imm.patch;
  const int nu = p.nu(), nv = p.nv();
  auto basis = [&](int i, int j) {
    const std::size_t k = p.index(i, j);
    return LocalBasis{imm.position[k], tf.e1[k], tf.e2[k]};
  };

  NormalFrameField nf;
  nf.e3 = VecField(p);
  nf.e4 = VecField(p);
  nf.seam_angle_v = RealField(p, 0.0);
  nf.holonomy_mask = MaskField(p, 0);

  // Seed from ambient axis pairs, preferring the last two coordinates.
  {
    const LocalBasis b = basis(0, 0);
    static constexpr std::array<std::array<int, 2>, 10> pairs{
        {{3, 4}, {2, 4}, {1, 4}, {0, 4}, {2, 3}, {1, 3}, {0, 3}, {1, 2}, {0, 2}, {0, 1}}};
    bool seeded = false;
    for (const auto& pr : pairs) {
      Vec5 a = b.project(Vec5::Unit(pr[0]));
      if (a.norm() < 0.3) continue;
      a.normalize();
      Vec5 c = b.project(Vec5::Unit(pr[1]));
      c -= a.dot(c) * a;
      if (c.norm() < 0.3) continue;
      c.normalize();
      if (frame_det(b, a, c) < 0.0) c = -c;
      nf.e3(0, 0) = a;
      nf.e4(0, 0) = c;
      seeded = true;
      break;
    }
    if (!seeded) throw GeometryError("could not seed the normal frame at the grid origin");
  }

  // First column (j = 0) along u.
  for (int i = 1; i < nu; ++i) {
    std::tie(nf.e3(i, 0), nf.e4(i, 0)) = transport(basis(i, 0), nf.e3(i - 1, 0), nf.e4(i - 1, 0));
  }
  if (p.periodic_u()) {
    const auto [t3, t4] = transport(basis(0, 0), nf.e3(nu - 1, 0), nf.e4(nu - 1, 0));
    (void)t4;
    const double alpha = mismatch(t3, nf.e3(0, 0), nf.e4(0, 0));
    nf.seam_angle_u = alpha;
    for (int i = 1; i < nu; ++i) {
      std::tie(nf.e3(i, 0), nf.e4(i, 0)) =
          rotated(nf.e3(i, 0), nf.e4(i, 0), -alpha * static_cast<double>(i) / nu);
    }
  }

  // Each u-index propagates independently along v.
  std::vector<double> alpha(nu, 0.0);
  parallel_for(static_cast<std::size_t>(nu), [&](std::size_t ii) {
    const int i = static_cast<int>(ii);
    for (int j = 1; j < nv; ++j) {
      std::tie(nf.e3(i, j), nf.e4(i, j)) = transport(basis(i, j), nf.e3(i, j - 1), nf.e4(i, j - 1));
    }
    if (p.periodic_v()) {
      const auto [t3, t4] = transport(basis(i, 0), nf.e3(i, nv - 1), nf.e4(i, nv - 1));
      (void)t4;
      alpha[i] = mismatch(t3, nf.e3(i, 0), nf.e4(i, 0));
    }
  });

  if (p.periodic_v()) {
    for (int i = 1; i < nu; ++i) alpha[i] = unwrap_near(alpha[i], alpha[i - 1]);
    if (p.periodic_u()) {
      const double closing = unwrap_near(alpha[0], alpha[nu - 1]);
      if (std::abs(closing - alpha[0]) > std::numbers::pi) {
        nf.nontrivial_holonomy = true;
        for (int j = 0; j < nv; ++j) {
          nf.holonomy_mask(0, j) = 1;
          nf.holonomy_mask(nu - 1, j) = 1;
        }
      }
    }
    for (int i = 0; i < nu; ++i) {
      for (int j = 0; j < nv; ++j) {
        nf.seam_angle_v(i, j) = alpha[i];
        if (j == 0) continue;
        std::tie(nf.e3(i, j), nf.e4(i, j)) =
            rotated(nf.e3(i, j), nf.e4(i, j), -alpha[i] * static_cast<double>(j) / nv);
      }
    }
  }
  return nf;
}

NormalFrameField rotate_normal_gauge(const NormalFrameField& nf, const RealField& angle) {
  NormalFrameField out = nf;
  for (std::size_t k = 0; k < angle.size(); ++k) {
    std::tie(out.e3[k], out.e4[k]) = rotated(nf.e3[k], nf.e4[k], angle[k]);
  }
  return out;
}

NormalFrameField flip_normal_orientation(const NormalFrameField& nf) {
  NormalFrameField out = nf;
  for (auto& v : out.e4.values()) v = -v;
  out.orientation = -nf.orientation;
  return out;
}

SecondFundamentalForm second_fundamental_components(const ImmersionJets& jets,
                                                    const TangentFrame& tf,
                                                    const NormalFrameField& nf) {
  const GridPatch& p = tf.e1.patch();
  SecondFundamentalForm s{RealField(p), RealField(p), RealField(p),
                          RealField(p), RealField(p), RealField(p)};
  for (std::size_t k = 0; k < p.size(); ++k) {
    const Mat2& c = tf.coeff[k];
    auto h = [&](const Vec5& n) {
      Mat2 m;
      m << jets.fuu[k].dot(n), jets.fuv[k].dot(n), jets.fuv[k].dot(n), jets.fvv[k].dot(n);
      return Mat2(c * m * c.transpose());
    };
    const Mat2 h3 = h(nf.e3[k]);
    const Mat2 h4 = h(nf.e4[k]);
    s.h11_3[k] = h3(0, 0);
    s.h12_3[k] = h3(0, 1);
    s.h22_3[k] = h3(1, 1);
    s.h11_4[k] = h4(0, 0);
    s.h12_4[k] = h4(0, 1);
    s.h22_4[k] = h4(1, 1);
  }
  return s;
}

ShapeReport shape_report_from(const SecondFundamentalForm& sff, JetSource source) {
  const GridPatch& p = sff.h11_3.patch();
  ShapeReport r;
  r.jets = source;
  r.H3 = ComplexField(p);
  r.H4 = ComplexField(p);
  r.normB2 = RealField(p);
  r.K = RealField(p);
  r.KN = RealField(p);
  r.kappa = RealField(p);
  r.mu = RealField(p);
  r.a_plus = RealField(p);
  r.a_minus = RealField(p);
  r.minimality = RealField(p);
  double defect = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const cplx H3(sff.h11_3[k], sff.h12_3[k]);
    const cplx H4(sff.h11_4[k], sff.h12_4[k]);
    r.H3[k] = H3;
    r.H4[k] = H4;
    r.normB2[k] = 2.0 * (std::norm(H3) + std::norm(H4));
    r.K[k] = 1.0 - 0.5 * r.normB2[k];
    r.KN[k] = -2.0 * (H3 * std::conj(H4)).imag();
    const cplx i(0.0, 1.0);
    const double ap = std::abs(std::conj(H3) + i * std::conj(H4));
    const double am = std::abs(std::conj(H3) - i * std::conj(H4));
    for (const double sign : {1.0, -1.0}) {
      const double radicand = 1.0 - r.K[k] + sign * r.KN[k];
      if (radicand < -1e-8) {
        const GridIndex g = p.unflatten(k);
        std::ostringstream os;
        os << "negative radicand " << radicand << " for a" << (sign > 0 ? "+" : "-")
           << " at grid point (" << g.i << ", " << g.j << ")";
        throw GeometryError(os.str());
      }
      const double a = sign > 0 ? ap : am;
      defect = std::max(defect, std::abs(a * a - std::max(radicand, 0.0)));
    }
    r.a_plus[k] = ap;
    r.a_minus[k] = am;
    r.kappa[k] = 0.5 * (ap + am);
    r.mu[k] = 0.5 * std::abs(ap - am);
    r.minimality[k] = std::max(std::abs(sff.h11_3[k] + sff.h22_3[k]),
                               std::abs(sff.h11_4[k] + sff.h22_4[k]));
  }
  r.radicand_defect = defect;
  return r;
}

ShapeReport second_fundamental_form(const ImmersionJets& jets, const TangentFrame& tf,
                                    const NormalFrameField& nf, JetSource source) {
  return shape_report_from(second_fundamental_components(jets, tf, nf), source);
}

double minimality_residual(const ShapeReport& report) { return max_abs(report.minimality); }

double gauge_invariance_check(const ShapeReport& a, const ShapeReport& b) {
  double m = 0.0;
  const std::array<std::pair<const RealField*, const RealField*>, 7> pairs{{
      {&a.K, &b.K},
      {&a.KN, &b.KN},
      {&a.kappa, &b.kappa},
      {&a.mu, &b.mu},
      {&a.a_plus, &b.a_plus},
      {&a.a_minus, &b.a_minus},
      {&a.normB2, &b.normB2},
  }};
  for (const auto& [x, y] : pairs) {
    if (x->patch() != y->patch()) throw GeometryError("reports live on different patches");
    for (std::size_t k = 0; k < x->size(); ++k) m = std::max(m, std::abs((*x)[k] - (*y)[k]));
  }
  return m;
}

SurfaceGeometry analyze_surface(const ImmersionField& imm, JetPreference pref) {
  imm.validate();
  SurfaceGeometry g;
  g.immersion = imm;
  std::tie(g.jets, g.jet_source) = resolve_jets(imm, pref);
  g.tangent = tangent_frame(imm, g.jets);
  g.normal = normal_frame(imm, g.tangent);
  g.sff = second_fundamental_components(g.jets, g.tangent, g.normal);
  g.report = shape_report_from(g.sff, g.jet_source);
  return g;
}

MatField frame_matrices(const SurfaceGeometry& g) {
  MatField out(g.patch());
  for (std::size_t k = 0; k < out.size(); ++k) {
    Mat5 m;
    m << g.immersion.position[k], g.tangent.e1[k], g.tangent.e2[k], g.normal.e3[k], g.normal.e4[k];
    out[k] = m;
  }
  return out;
}

}  // namespace ms4
