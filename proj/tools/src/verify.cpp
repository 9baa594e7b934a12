#include <cmath>
#include <filesystem>
#include <numbers>

#include "common.hpp"
#include "ms4/adapted.hpp"
#include "ms4/family.hpp"
#include "ms4/monodromy.hpp"
#include "ms4/topology.hpp"

namespace ms4::cli {

using namespace detail;

const char* to_string(Check::Status s) {
  switch (s) {
    case Check::Status::pass: return "pass";
    case Check::Status::fail: return "fail";
    default: return "skipped";
  }
}

namespace {

constexpr double kPi = std::numbers::pi;
const double kDeformThetas[] = {0.3, kPi / 4.0, 1.2};

class Suite {
 public:
  void add(const std::string& name, const std::string& ref, double value, double tol,
           const std::string& note = "") {
    Check c{name, ref, value, tol, Check::Status::pass, note};
    c.status = std::isfinite(value) && value <= tol ? Check::Status::pass : Check::Status::fail;
    checks_.push_back(c);
  }
  void fail(const std::string& name, const std::string& ref, double tol, const std::string& note) {
    checks_.push_back({name, ref, std::nan(""), tol, Check::Status::fail, note});
  }
  void skip(const std::string& name, const std::string& ref, double tol, const std::string& note) {
    checks_.push_back({name, ref, std::nan(""), tol, Check::Status::skipped, note});
  }
  std::vector<Check> take() { return std::move(checks_); }

 private:
  std::vector<Check> checks_;
};

double unit_norm_defect(const ImmersionField& imm) {
  double m = 0.0;
  for (std::size_t k = 0; k < imm.position.size(); ++k) {
    m = std::max(m, std::abs(imm.position[k].norm() - 1.0));
  }
  return m;
}

RealField smooth_angle(const GridPatch& p, double a, double b) {
  RealField out(p);
  const double ku = 2.0 * kPi / p.u_range().length(), kv = 2.0 * kPi / p.v_range().length();
  for (int i = 0; i < p.nu(); ++i) {
    for (int j = 0; j < p.nv(); ++j) {
      out(i, j) = a * std::sin(ku * (p.u(i) - p.u_range().lo)) + b * std::cos(kv * (p.v(j) - p.v_range().lo));
    }
  }
  return out;
}

// Max over the chart domain of |x_theta - x| for the metric and the
// curvatures of a deformed patch re-analysed with finite-difference jets.
struct DeformedDefects {
  double metric = 0.0;
  double curvature = 0.0;
};

DeformedDefects deformed_defects(const SurfaceGeometry& g, const SurfaceGeometry& gd, const MaskField& domain) {
  DeformedDefects d;
  const GridPatch& p = g.patch();
  const MetricField& m0 = g.metric();
  const MetricField& m1 = gd.metric();
  for (int i = 0; i < p.nu(); ++i) {
    for (int j = 0; j < p.nv(); ++j) {
      if (!domain(i, j)) continue;
      d.metric = std::max({d.metric, std::abs(m0.E(i, j) - m1.E(i, j)), std::abs(m0.F(i, j) - m1.F(i, j)),
                           std::abs(m0.G(i, j) - m1.G(i, j))});
      d.curvature = std::max({d.curvature, std::abs(g.report.K(i, j) - gd.report.K(i, j)),
                              std::abs(g.report.KN(i, j) - gd.report.KN(i, j))});
    }
  }
  return d;
}

}  // namespace

std::vector<Check> verify_suite(const RunConfig& cfg) {
  const LoadedSurface s = load_surface(cfg);
  const std::vector<ChartView> views = chart_views(s, cfg.jets);
  const SurfaceGeometry& g0 = views.front().geometry;
  const bool analytic = g0.jet_source == JetSource::analytic;
  const double gate = flatness_gate(g0.patch());
  const double pointwise_tol = analytic ? 1e-8 : gate;
  Suite suite;

  double norm = 0.0, minimal = 0.0, gauss = 0.0, radicand = 0.0, lap_p = 0.0, lap_m = 0.0, gauge = 0.0;
  for (const ChartView& v : views) {
    const SurfaceGeometry& g = v.geometry;
    norm = std::max(norm, unit_norm_defect(g.immersion));
    minimal = std::max(minimal, masked_max(g.report.minimality, v.domain));
    RealField diff = g.report.K;
    const RealField intrinsic = intrinsic_gaussian_curvature(g.metric());
    for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = std::abs(diff[k] - intrinsic[k]);
    gauss = std::max(gauss, masked_max(diff, v.domain));
    radicand = std::max(radicand, g.report.radicand_defect);
    lap_p = std::max(lap_p, laplace_identity_residual(g.report, g.metric(), Branch::plus, v.domain).max);
    lap_m = std::max(lap_m, laplace_identity_residual(g.report, g.metric(), Branch::minus, v.domain).max);
    const TangentFrame tf = rotate_tangent_frame(g.tangent, smooth_angle(g.patch(), 0.4, 0.3));
    const NormalFrameField nf = rotate_normal_gauge(g.normal, smooth_angle(g.patch(), -0.5, 0.8));
    const ShapeReport r2 = shape_report_from(second_fundamental_components(g.jets, tf, nf), g.jet_source);
    gauge = std::max(gauge, gauge_invariance_check(g.report, r2));
  }
  suite.add("unit_norm", "immersion into S^4: |f| = 1", norm, 1e-12);
  suite.add("minimality", "minimal immersion: trace B = 0", minimal, analytic ? 1e-8 : 1e-5);
  suite.add("gauss_relation", "Gauss equation: 1 - |B|^2/2 equals the intrinsic curvature", gauss, gate);
  suite.add("ellipse_radicand", "a_pm^2 = 1 - K pm K_N", radicand, 1e-10);
  suite.add("laplace_log_a_plus", "Delta log a_+ = 2K - K_N", lap_p, pointwise_tol);
  suite.add("laplace_log_a_minus", "Delta log a_- = 2K + K_N", lap_m, pointwise_tol);
  suite.add("gauge_invariance", "K, K_N, kappa, mu independent of the frame", gauge, 1e-10);

  const std::string forms_ref = "connection forms of the ellipse-adapted frame from kappa1, mu1";
  try {
    double align = 0.0, w12 = 0.0, w34 = 0.0, ident = 0.0;
    for (const ChartView& v : views) {
      const AdaptedFrameField aff = build_adapted_frame(v.geometry);
      align = std::max(align, adapted_alignment_residual(v.geometry, aff));
      const FormAgreement fa = connection_form_agreement(aff);
      w12 = std::max(w12, fa.omega12);
      w34 = std::max(w34, fa.omega34);
      ident = std::max(ident, frame_derivative_identity_residual(aff));
    }
    suite.add("adapted_frame_alignment", "frame aligned with the curvature ellipse axes", align, 1e-8);
    suite.add("connection_form_w12", forms_ref, w12, gate);
    suite.add("connection_form_w34", forms_ref, w34, gate);
    suite.add("adapted_derivative_identity", "derivatives of kappa1, mu1 along E", ident, gate);
  } catch (const SuperminimalPatch&) {
    for (const char* n : {"adapted_frame_alignment", "connection_form_w12", "connection_form_w34",
                          "adapted_derivative_identity"}) {
      suite.skip(n, forms_ref, gate, "skipped: superminimal");
    }
  }

  double flat = 0.0;
  for (const ChartView& v : views) flat = std::max(flat, family_flatness(assemble_family(v.geometry)));
  suite.add("flatness", "Maurer-Cartan equation of the associated family", flat, gate);

  {
    const MaurerCartanFamily fam = assemble_family(g0);
    const Mat5 seed = frame_matrices(g0)(0, 0);
    const VecField original = unwrap_field(g0.immersion.position);
    const std::string recon_ref = "structure equations determine f up to congruence";
    const std::string iso_ref = "f_theta is isometric to f with the same normal curvature";
    try {
      const DeformedPatch d0 = integrate_frame(OmegaSource(fam, 0.0), seed);
      const MaskField domain = unwrap_field(views.front().domain);
      suite.add("reconstruction_theta0", recon_ref, congruence_test(original, d0.position, domain).residual,
                s.atlas ? 1e-4 : 1e-6);
    } catch (const Error& e) {
      suite.fail("reconstruction_theta0", recon_ref, s.atlas ? 1e-4 : 1e-6, e.what());
    }
    try {
      DeformedDefects worst;
      for (double theta : kDeformThetas) {
        const DeformedPatch d = integrate_frame(OmegaSource(fam, theta), seed);
        const SurfaceGeometry gd =
            analyze_surface(deformed_immersion(d, g0.immersion.orientation), JetPreference::finite_difference);
        const DeformedDefects dd = deformed_defects(g0, gd, views.front().domain);
        worst.metric = std::max(worst.metric, dd.metric);
        worst.curvature = std::max(worst.curvature, dd.curvature);
      }
      suite.add("deformed_metric", iso_ref, worst.metric, 1e-4, "theta in {0.3, pi/4, 1.2}");
      suite.add("deformed_curvatures", iso_ref, worst.curvature, 1e-4, "theta in {0.3, pi/4, 1.2}");
    } catch (const Error& e) {
      suite.fail("deformed_metric", iso_ref, 1e-4, e.what());
      suite.fail("deformed_curvatures", iso_ref, 1e-4, e.what());
    }
  }

  const std::string gb_ref = "Gauss-Bonnet: (1/2pi) int K dA is an integer";
  const std::string ne_ref = "normal Euler number: (1/2pi) int K_N dA is an integer";
  std::optional<EulerNumbers> euler;
  double euler_tol = 1e-6;
  if (s.atlas) {
    std::vector<WeightedChart> wc;
    for (const ChartView& v : views) wc.push_back({&v.geometry.report, &v.geometry.metric(), v.weight});
    euler = euler_numbers(wc);
    euler_tol = 0.02;
  } else if (g0.patch().closed()) {
    euler = euler_numbers(g0.report, g0.metric());
  }
  if (euler) {
    suite.add("gauss_bonnet", gb_ref, euler->chi_M.gap, euler_tol,
              "chi_M = " + std::to_string(euler->chi_M.rounded));
    suite.add("normal_euler_number", ne_ref, euler->chi_Nf.gap, euler_tol,
              "chi_Nf = " + std::to_string(euler->chi_Nf.rounded));
  } else {
    suite.skip("gauss_bonnet", gb_ref, euler_tol, "skipped: open patch");
    suite.skip("normal_euler_number", ne_ref, euler_tol, "skipped: open patch");
  }

  const std::string zm_ref = "2 chi_M + chi_Nf + N(a_-) = 0";
  const std::string zp_ref = "2 chi_M - chi_Nf + N(a_+) = 0";
  const bool superminimal = superminimality_test(g0.report).verdict == SuperminimalVerdict::superminimal;
  if (superminimal) {
    suite.skip("zero_relation_minus", zm_ref, 0.05, "skipped: superminimal");
    suite.skip("zero_relation_plus", zp_ref, 0.05, "skipped: superminimal");
  } else if (!g0.patch().closed() || !euler) {
    suite.skip("zero_relation_minus", zm_ref, 0.05, "skipped: zero counts need a doubly periodic patch");
    suite.skip("zero_relation_plus", zp_ref, 0.05, "skipped: zero counts need a doubly periodic patch");
  } else {
    auto count = [&](const RealField& a) {
      return zero_count_excised(a, g0.metric(), zero_candidates(a, 0.05 * max_abs(a))).N.value;
    };
    try {
      const ZeroRelation l = zero_relation_check(euler->chi_M.value, euler->chi_Nf.value, count(g0.report.a_plus),
                                      count(g0.report.a_minus), false);
      suite.add("zero_relation_minus", zm_ref, l.residual_minus, 0.05);
      suite.add("zero_relation_plus", zp_ref, l.residual_plus, 0.05);
    } catch (const GeometryError& e) {
      suite.fail("zero_relation_minus", zm_ref, 0.05, e.what());
      suite.fail("zero_relation_plus", zp_ref, 0.05, e.what());
    }
  }
  return suite.take();
}

int cmd_verify(const RunConfig& cfg) {
  const std::vector<Check> checks = verify_suite(cfg);
  json rep;
  rep["config"] = config_json(cfg);
  json items = json::array();
  json failed = json::array();
  for (const Check& c : checks) {
    json j;
    j["name"] = c.name;
    j["ref"] = c.ref;
    j["value"] = c.value;
    j["tolerance"] = c.tolerance;
    j["status"] = to_string(c.status);
    if (!c.note.empty()) j["note"] = c.note;
    items.push_back(j);
    if (c.status == Check::Status::fail) failed.push_back(c.name);
  }
  rep["checks"] = items;
  rep["failed"] = failed;
  rep["passed"] = failed.empty();
  std::filesystem::create_directories(cfg.out);
  write_json(cfg.out / "report.json", rep);
  return failed.empty() ? kPass : kVerifyFailed;
}

}  // namespace ms4::cli
