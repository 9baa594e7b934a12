#include "ms4/adapted.hpp"

#include <algorithm>
#include <deque>
#include <numbers>
#include <sstream>

#include "ms4/error.hpp"

namespace ms4 {

namespace {

constexpr double kPi = std::numbers::pi;

// M = R(beta) diag(p, q) R(gamma) with p >= |q|, R(t) the rotation by t.
struct SignedSvd2 {
  double p, q, beta, gamma;
};

SignedSvd2 signed_svd(double a, double b, double c, double d) {
  const double E = 0.5 * (a + d), F = 0.5 * (a - d);
  const double G = 0.5 * (c + b), H = 0.5 * (c - b);
  const double Q = std::hypot(E, H), R = std::hypot(F, G);
  const double sum = std::atan2(H, E), diff = std::atan2(G, F);
  return {Q + R, Q - R, 0.5 * (sum + diff), 0.5 * (sum - diff)};
}

struct Frame4 {
  Vec5 e1, e2, e3, e4;
};

Frame4 candidate(const Frame4& f, int k) {
  // tangent rotated by k*pi/2, normal by k*pi
  Frame4 out;
  switch (k & 3) {
    case 0: out = f; break;
    case 1: out = {f.e2, -f.e1, -f.e3, -f.e4}; break;
    case 2: out = {-f.e1, -f.e2, f.e3, f.e4}; break;
    default: out = {-f.e2, f.e1, -f.e3, -f.e4}; break;
  }
  return out;
}

int best_candidate(const Frame4& f, const Frame4& ref) {
  int best = 0;
  double best_d = 1e300;
  for (int k = 0; k < 4; ++k) {
    const Frame4 c = candidate(f, k);
    const double d = (c.e1 - ref.e1).squaredNorm() + (c.e3 - ref.e3).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  return best;
}

std::vector<std::size_t> neighbours(const GridPatch& p, std::size_t k) {
  const GridIndex g = p.unflatten(k);
  std::vector<std::size_t> out;
  const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
  for (int n = 0; n < 4; ++n) {
    int i = g.i + di[n], j = g.j + dj[n];
    if (p.periodic_u()) i = GridPatch::mod(i, p.nu());
    if (p.periodic_v()) j = GridPatch::mod(j, p.nv());
    if (i < 0 || i >= p.nu() || j < 0 || j >= p.nv()) continue;
    out.push_back(p.index(i, j));
  }
  return out;
}

int tap_index(const GridPatch& p, Axis axis, int idx) {
  return p.periodic(axis) ? GridPatch::mod(idx, p.count(axis)) : idx;
}

cplx on_E(double wu, double wv, const Mat2& c) {
  return cplx(c(0, 0), -c(1, 0)) * wu + cplx(c(0, 1), -c(1, 1)) * wv;
}

}  // namespace

AdaptedFrameField build_adapted_frame(const SurfaceGeometry& g) {
  const GridPatch& p = g.patch();
  const SecondFundamentalForm& s = g.sff;
  const ShapeReport& r = g.report;
  AdaptedFrameField a;
  a.kappa1 = RealField(p);
  a.mu1 = RealField(p);
  a.tangent_angle = RealField(p);
  a.normal_angle = RealField(p);
  a.circle_mask = MaskField(p, 0);
  a.gauge_sign = Field<int>(p, 1);

  a.circle_threshold = 1e-4 * max_abs(r.kappa);
  std::size_t masked = 0;
  std::vector<Frame4> raw(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) {
    const SignedSvd2 d = signed_svd(s.h11_3[k], s.h12_3[k], s.h11_4[k], s.h12_4[k]);
    a.kappa1[k] = d.p;
    a.mu1[k] = d.q;
    a.normal_angle[k] = d.beta;
    a.tangent_angle[k] = -0.5 * d.gamma;
    if (r.kappa[k] - r.mu[k] <= a.circle_threshold) {
      a.circle_mask[k] = 1;
      ++masked;
    }
    const double cp = std::cos(a.tangent_angle[k]), sp = std::sin(a.tangent_angle[k]);
    const double cn = std::cos(a.normal_angle[k]), sn = std::sin(a.normal_angle[k]);
    raw[k] = {cp * g.tangent.e1[k] + sp * g.tangent.e2[k], -sp * g.tangent.e1[k] + cp * g.tangent.e2[k],
              cn * g.normal.e3[k] + sn * g.normal.e4[k], -sn * g.normal.e3[k] + cn * g.normal.e4[k]};
  }
  if (masked == p.size()) {
    throw SuperminimalPatch("every grid point lies on the circle locus (kappa = mu)");
  }

  // Breadth-first continuity propagation of the discrete gauge choice.
  std::vector<int> choice(p.size(), -1);
  for (std::size_t seed = 0; seed < p.size(); ++seed) {
    if (a.circle_mask[seed] || choice[seed] >= 0) continue;
    choice[seed] = 0;
    std::deque<std::size_t> queue{seed};
    while (!queue.empty()) {
      const std::size_t k = queue.front();
      queue.pop_front();
      const Frame4 ref = candidate(raw[k], choice[k]);
      for (std::size_t q : neighbours(p, k)) {
        if (a.circle_mask[q] || choice[q] >= 0) continue;
        choice[q] = best_candidate(raw[q], ref);
        queue.push_back(q);
      }
    }
  }

  a.e1 = VecField(p);
  a.e2 = VecField(p);
  a.e3 = VecField(p);
  a.e4 = VecField(p);
  a.coeff = Mat2Field(p);
  for (std::size_t k = 0; k < p.size(); ++k) {
    const int c = std::max(choice[k], 0);
    const Frame4 f = candidate(raw[k], c);
    a.e1[k] = f.e1;
    a.e2[k] = f.e2;
    a.e3[k] = f.e3;
    a.e4[k] = f.e4;
    a.tangent_angle[k] += c * 0.5 * kPi;
    a.normal_angle[k] += c * kPi;
    a.gauge_sign[k] = c % 2 == 0 ? 1 : -1;
    const double t = a.tangent_angle[k];
    const Mat2& c0 = g.tangent.coeff[k];
    Mat2 m;
    m.row(0) = std::cos(t) * c0.row(0) + std::sin(t) * c0.row(1);
    m.row(1) = -std::sin(t) * c0.row(0) + std::cos(t) * c0.row(1);
    a.coeff[k] = m;
  }

  // Points whose derivative stencils touch the circle locus or where
  // kappa1^2 - mu1^2 is tiny.
  a.form_mask = MaskField(p, 0);
  for (int i = 0; i < p.nu(); ++i) {
    for (int j = 0; j < p.nv(); ++j) {
      const std::size_t k = p.index(i, j);
      bool bad = a.kappa1[k] * a.kappa1[k] - a.mu1[k] * a.mu1[k] < 1e-10;
      const StencilTaps su = derivative_stencil(p, Axis::u, i);
      const StencilTaps sv = derivative_stencil(p, Axis::v, j);
      for (int t = 0; t < su.taps && !bad; ++t) {
        bad = a.circle_mask(tap_index(p, Axis::u, i + su.start + t), j) != 0;
      }
      for (int t = 0; t < sv.taps && !bad; ++t) {
        bad = a.circle_mask(i, tap_index(p, Axis::v, j + sv.start + t)) != 0;
      }
      a.form_mask[k] = bad ? 1 : 0;
    }
  }

  const ConnectionForms formula =
      connection_forms_formula(a.kappa1, a.mu1, a.coeff, a.form_mask);
  a.omega12_E = formula.omega12_E;
  a.omega34_E = formula.omega34_E;
  const ConnectionForms direct = connection_forms(a);
  a.omega12_E_direct = direct.omega12_E;
  a.omega34_E_direct = direct.omega34_E;
  return a;
}

double adapted_alignment_residual(const SurfaceGeometry& g, const AdaptedFrameField& aff) {
  TangentFrame tf = g.tangent;
  tf.e1 = aff.e1;
  tf.e2 = aff.e2;
  tf.coeff = aff.coeff;
  NormalFrameField nf = g.normal;
  nf.e3 = aff.e3;
  nf.e4 = aff.e4;
  const SecondFundamentalForm s = second_fundamental_components(g.jets, tf, nf);
  double m = 0.0;
  for (std::size_t k = 0; k < s.h11_3.size(); ++k) {
    if (aff.circle_mask[k]) continue;
    const double re = s.h11_3[k] * s.h11_4[k] + s.h12_3[k] * s.h12_4[k];
    m = std::max({m, std::abs(re), std::abs(s.h12_3[k]), std::abs(s.h11_4[k]),
                  std::abs(s.h11_3[k] - aff.kappa1[k]), std::abs(s.h12_4[k] - aff.mu1[k])});
  }
  return m;
}

ComplexField evaluate_on_E(const RealField& wu, const RealField& wv, const Mat2Field& coeff) {
  ComplexField out(wu.patch());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = on_E(wu[k], wv[k], coeff[k]);
  return out;
}

ComplexField derivative_along_E(const RealField& g, const Mat2Field& coeff) {
  return evaluate_on_E(derivative(g, Axis::u), derivative(g, Axis::v), coeff);
}

ConnectionForms connection_forms_formula(const RealField& kappa1, const RealField& mu1,
                                         const Mat2Field& coeff, const MaskField& mask) {
  const ComplexField Ek = derivative_along_E(kappa1, coeff);
  const ComplexField Em = derivative_along_E(mu1, coeff);
  const GridPatch& p = kappa1.patch();
  ConnectionForms out{ComplexField(p, 0.0), ComplexField(p, 0.0)};
  const cplx I(0.0, 1.0);
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (mask[k]) continue;
    const double D = kappa1[k] * kappa1[k] - mu1[k] * mu1[k];
    out.omega12_E[k] = 0.5 * I * (kappa1[k] * Ek[k] - mu1[k] * Em[k]) / D;
    out.omega34_E[k] = -I * (kappa1[k] * Em[k] - mu1[k] * Ek[k]) / D;
  }
  return out;
}

ConnectionForms connection_forms(const AdaptedFrameField& aff) {
  const GridPatch& p = aff.patch();
  ConnectionForms out{ComplexField(p, 0.0), ComplexField(p, 0.0)};
  for (int i = 0; i < p.nu(); ++i) {
    for (int j = 0; j < p.nv(); ++j) {
      const std::size_t k = p.index(i, j);
      if (aff.form_mask[k]) continue;
      const Frame4 centre{aff.e1[k], aff.e2[k], aff.e3[k], aff.e4[k]};
      double w12[2] = {0.0, 0.0}, w34[2] = {0.0, 0.0};
      for (const Axis axis : {Axis::u, Axis::v}) {
        const int idx = axis == Axis::u ? i : j;
        const StencilTaps st = derivative_stencil(p, axis, idx);
        Vec5 d1 = Vec5::Zero(), d3 = Vec5::Zero();
        for (int t = 0; t < st.taps; ++t) {
          const int q = tap_index(p, axis, idx + st.start + t);
          const std::size_t kk = axis == Axis::u ? p.index(q, j) : p.index(i, q);
          const Frame4 nb{aff.e1[kk], aff.e2[kk], aff.e3[kk], aff.e4[kk]};
          const Frame4 aligned = candidate(nb, best_candidate(nb, centre));
          d1 += st.w[t] * aligned.e1;
          d3 += st.w[t] * aligned.e3;
        }
        const int slot = axis == Axis::u ? 0 : 1;
        w12[slot] = d1.dot(centre.e2);
        w34[slot] = d3.dot(centre.e4);
      }
      out.omega12_E[k] = on_E(w12[0], w12[1], aff.coeff[k]);
      out.omega34_E[k] = on_E(w34[0], w34[1], aff.coeff[k]);
    }
  }
  return out;
}

double derivative_identity_residual(const RealField& kappa1, const RealField& mu1,
                                    const Mat2Field& coeff, const ComplexField& omega12_E,
                                    const ComplexField& omega34_E, const MaskField& mask) {
  const ComplexField Ek = derivative_along_E(kappa1, coeff);
  const ComplexField Em = derivative_along_E(mu1, coeff);
  const cplx I(0.0, 1.0);
  double m = 0.0;
  for (std::size_t k = 0; k < kappa1.size(); ++k) {
    if (mask[k]) continue;
    const cplx r1 = Ek[k] + 2.0 * I * kappa1[k] * omega12_E[k] - I * mu1[k] * omega34_E[k];
    const cplx r2 = Em[k] + 2.0 * I * mu1[k] * omega12_E[k] - I * kappa1[k] * omega34_E[k];
    m = std::max({m, std::abs(r1), std::abs(r2)});
  }
  return m;
}

double frame_derivative_identity_residual(const AdaptedFrameField& aff) {
  return derivative_identity_residual(aff.kappa1, aff.mu1, aff.coeff, aff.omega12_E_direct,
                                      aff.omega34_E_direct, aff.form_mask);
}

FormAgreement connection_form_agreement(const AdaptedFrameField& aff) {
  FormAgreement f;
  for (std::size_t k = 0; k < aff.omega12_E.size(); ++k) {
    if (aff.form_mask[k]) continue;
    f.omega12 = std::max(f.omega12, std::abs(aff.omega12_E[k] - aff.omega12_E_direct[k]));
    f.omega34 = std::max(f.omega34, std::abs(aff.omega34_E[k] - aff.omega34_E_direct[k]));
  }
  return f;
}

const char* to_string(SuperminimalVerdict v) {
  switch (v) {
    case SuperminimalVerdict::superminimal: return "superminimal";
    case SuperminimalVerdict::isolated_circle_points: return "isolated-circle-points";
    default: return "generic";
  }
}

std::vector<CircleCluster> circle_clusters(const ShapeReport& report, double threshold) {
  const GridPatch& p = report.patch();
  std::vector<int> label(p.size(), -1);
  std::vector<CircleCluster> out;
  auto on_locus = [&](std::size_t k) { return report.kappa[k] - report.mu[k] <= threshold; };
  for (std::size_t seed = 0; seed < p.size(); ++seed) {
    if (!on_locus(seed) || label[seed] >= 0) continue;
    CircleCluster c;
    double best = 1e300;
    label[seed] = static_cast<int>(out.size());
    std::deque<std::size_t> queue{seed};
    while (!queue.empty()) {
      const std::size_t k = queue.front();
      queue.pop_front();
      ++c.size;
      const double gap = report.kappa[k] - report.mu[k];
      if (gap < best) {
        best = gap;
        c.representative = p.unflatten(k);
      }
      for (std::size_t q : neighbours(p, k)) {
        if (label[q] >= 0 || !on_locus(q)) continue;
        label[q] = label[seed];
        queue.push_back(q);
      }
    }
    out.push_back(c);
  }
  return out;
}

SuperminimalityResult superminimality_test(const ShapeReport& report, double eps_sup) {
  SuperminimalityResult res;
  double maxB2 = 0.0;
  for (std::size_t k = 0; k < report.K.size(); ++k) {
    res.max_quarter_product =
        std::max(res.max_quarter_product, 0.25 * report.a_plus[k] * report.a_minus[k]);
    maxB2 = std::max(maxB2, report.normB2[k]);
  }
  res.threshold = eps_sup * std::max(maxB2, 1e-12);
  if (res.max_quarter_product <= res.threshold) {
    res.verdict = SuperminimalVerdict::superminimal;
    return res;
  }
  res.circle_clusters =
      static_cast<int>(circle_clusters(report, 1e-4 * max_abs(report.kappa)).size());
  res.verdict = res.circle_clusters > 0 ? SuperminimalVerdict::isolated_circle_points
                                        : SuperminimalVerdict::generic;
  return res;
}

std::vector<ZeroOrder> zero_orders(const ComplexField& field, const std::vector<ParamPoint>& candidates,
                                   double radius) {
  const GridPatch& p = field.patch();
  if (radius <= 0.0) radius = 4.0 * p.max_spacing();
  constexpr int kSamples = 64;
  std::vector<ZeroOrder> out;
  for (const ParamPoint& c : candidates) {
    ZeroOrder z;
    z.u = c.u;
    z.v = c.v;
    double total = 0.0;
    cplx prev = interpolate(field, c.u + radius, c.v);
    for (int s = 1; s <= kSamples; ++s) {
      const double t = 2.0 * kPi * s / kSamples;
      const cplx cur = interpolate(field, c.u + radius * std::cos(t), c.v + radius * std::sin(t));
      if (std::abs(prev) == 0.0 || std::abs(cur) == 0.0) {
        throw GeometryError("winding circle passes through a zero of the field");
      }
      total += std::arg(cur / prev);
      prev = cur;
    }
    z.winding = total / (2.0 * kPi);
    z.order = static_cast<int>(std::lround(z.winding));
    z.gap = std::abs(z.winding - z.order);
    z.ambiguous = z.gap > 0.2;
    z.non_positive = z.order <= 0;
    out.push_back(z);
  }
  return out;
}

HopfField hopf_differential(const SurfaceGeometry& g, double conformal_tol) {
  const GridPatch& p = g.patch();
  const ShapeReport& r = g.report;
  HopfField h;
  h.phi_coeff = ComplexField(p);
  for (std::size_t k = 0; k < p.size(); ++k) {
    const cplx c3 = std::conj(r.H3[k]), c4 = std::conj(r.H4[k]);
    h.phi_coeff[k] = 0.25 * (c3 * c3 + c4 * c4);
    h.max_abs_defect =
        std::max(h.max_abs_defect, std::abs(4.0 * std::abs(h.phi_coeff[k]) - r.a_plus[k] * r.a_minus[k]));
  }
  const SuperminimalityResult sm = superminimality_test(r);
  if (sm.verdict == SuperminimalVerdict::superminimal) {
    h.chart = HopfChart::superminimal_any;
    h.chart_coeff = ComplexField(p, 0.0);
    h.holo_residual = RealField(p, 0.0);
    return h;
  }

  const MetricField& m = g.metric();
  double scale = 0.0, dev = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    scale = std::max(scale, m.E[k]);
    dev = std::max({dev, std::abs(m.E[k] - m.G[k]), std::abs(m.F[k])});
  }
  if (dev > conformal_tol * scale) {
    std::ostringstream os;
    os << "parameter chart is not conformal (max |E-G|, |F| = " << dev
       << "); use a catalog surface with a conformal chart";
    throw GeometryError(os.str());
  }
  h.chart = HopfChart::conformal;
  h.chart_coeff = ComplexField(p);
  for (std::size_t k = 0; k < p.size(); ++k) h.chart_coeff[k] = h.phi_coeff[k] * m.E[k] * m.E[k];
  const ComplexField cu = derivative(h.chart_coeff, Axis::u);
  const ComplexField cv = derivative(h.chart_coeff, Axis::v);
  const double orient = g.immersion.orientation < 0 ? -1.0 : 1.0;
  h.holo_residual = RealField(p);
  for (std::size_t k = 0; k < p.size(); ++k) {
    h.holo_residual[k] = std::abs(0.5 * (cu[k] + cplx(0.0, orient) * cv[k]));
  }

  std::vector<ParamPoint> candidates;
  for (const CircleCluster& c : circle_clusters(r, 1e-4 * max_abs(r.kappa))) {
    candidates.push_back({p.u(c.representative.i), p.v(c.representative.j)});
  }
  h.zero_list = zero_orders(h.chart_coeff, candidates);
  return h;
}

}  // namespace ms4
