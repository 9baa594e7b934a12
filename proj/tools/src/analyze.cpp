#include <filesystem>

#include "common.hpp"
#include "ms4/adapted.hpp"
#include "ms4/topology.hpp"

namespace ms4::cli {

using namespace detail;

namespace {

json range_json(const RealField& f, const MaskField& domain, const std::string& ref) {
  json j;
  j["min"] = quantity(masked_min(f, domain), std::nullopt, ref);
  j["max"] = quantity(masked_max(f, domain), std::nullopt, ref);
  return j;
}

}  // namespace

int cmd_analyze(const RunConfig& cfg) {
  const LoadedSurface s = load_surface(cfg);
  const std::vector<ChartView> views = chart_views(s, cfg.jets);
  const SurfaceGeometry& g = views.front().geometry;
  const ShapeReport& r = g.report;
  const MaskField all(g.patch(), 1);

  json rep;
  rep["config"] = config_json(cfg);
  rep["surface"] = surface_json(s, g);

  json q;
  q["K"] = range_json(r.K, all, "Gauss equation K = 1 - |B|^2/2");
  q["K_N"] = range_json(r.KN, all, "normal curvature K_N");
  q["normB2"] = range_json(r.normB2, all, "second fundamental form");
  q["kappa"] = range_json(r.kappa, all, "curvature ellipse semi-axes");
  q["mu"] = range_json(r.mu, all, "curvature ellipse semi-axes");
  q["a_plus"] = range_json(r.a_plus, all, "a_pm = sqrt(1 - K pm K_N)");
  q["a_minus"] = range_json(r.a_minus, all, "a_pm = sqrt(1 - K pm K_N)");
  q["minimality"] = quantity(minimality_residual(r), g.jet_source == JetSource::analytic ? 1e-8 : 1e-5,
                             "minimal immersion: trace B = 0");
  q["radicand_defect"] = quantity(r.radicand_defect, 1e-10, "a_pm^2 = 1 - K pm K_N");

  const SuperminimalityResult sup = superminimality_test(r);
  rep["superminimal"] = sup.verdict == SuperminimalVerdict::superminimal;
  rep["superminimality"] = {{"verdict", to_string(sup.verdict)},
                            {"max_quarter_product",
                             quantity(sup.max_quarter_product, sup.threshold, "curvature ellipse is a circle")},
                            {"circle_clusters", sup.circle_clusters}};

  std::optional<RealField> hopf_abs;
  try {
    const HopfField h = hopf_differential(g);
    hopf_abs = abs(h.chart_coeff);
    rep["hopf"] = {{"chart", h.chart == HopfChart::conformal ? "conformal" : "any (superminimal)"},
                   {"max_abs", quantity(max_abs(h.chart_coeff), std::nullopt, "Hopf differential")},
                   {"max_dzbar", quantity(max_abs(h.holo_residual), std::nullopt,
                                          "Hopf differential is holomorphic")},
                   {"max_abs_defect", quantity(h.max_abs_defect, std::nullopt, "4|Phi| = a+ a-")},
                   {"zeros", h.zero_list.size()}};
  } catch (const GeometryError& e) {
    rep["hopf"] = {{"unavailable", e.what()}};
  }

  std::optional<EulerNumbers> euler;
  if (s.atlas) {
    std::vector<WeightedChart> wc;
    for (const ChartView& v : views) wc.push_back({&v.geometry.report, &v.geometry.metric(), v.weight});
    euler = euler_numbers(wc);
  } else if (g.patch().closed()) {
    euler = euler_numbers(r, g.metric());
  }
  if (euler) {
    q["chi_M"] = quantity(euler->chi_M.value, std::nullopt, "Gauss-Bonnet: (1/2pi) int K dA");
    q["chi_Nf"] = quantity(euler->chi_Nf.value, std::nullopt, "normal Euler number: (1/2pi) int K_N dA");
  }
  rep["quantities"] = q;

  std::filesystem::create_directories(cfg.out);
  write_field_csv(cfg.out / "K.csv", r.K);
  write_field_csv(cfg.out / "K_N.csv", r.KN);
  write_field_csv(cfg.out / "kappa.csv", r.kappa);
  write_field_csv(cfg.out / "mu.csv", r.mu);
  write_field_csv(cfg.out / "a_plus.csv", r.a_plus);
  write_field_csv(cfg.out / "a_minus.csv", r.a_minus);
  if (hopf_abs) write_field_csv(cfg.out / "hopf_abs.csv", *hopf_abs);
  write_json(cfg.out / "report.json", rep);
  return kPass;
}

}  // namespace ms4::cli
