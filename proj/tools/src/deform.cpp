#include <filesystem>

#include "common.hpp"
#include "ms4/family.hpp"

namespace ms4::cli {

using namespace detail;

namespace {
constexpr double kCongruentTol = 1e-4;
}

int cmd_deform(const RunConfig& cfg) {
  if (!cfg.theta) throw ConfigError("E_CONFIG", "deform needs --theta");
  const LoadedSurface s = load_surface(cfg);
  const SurfaceGeometry g = analyze_surface(s.primary, cfg.jets);
  const MaurerCartanFamily fam = assemble_family(g);
  const MatField frames = frame_matrices(g);
  const DeformedPatch d = integrate_frame(OmegaSource(fam, *cfg.theta), frames(0, 0));
  const CongruenceResult c = congruence_test(unwrap_field(g.immersion.position), d.position);

  std::filesystem::create_directories(cfg.out);
  ImmersionField out_imm = deformed_immersion(d, g.immersion.orientation);
  out_imm.name = s.primary.name + "_theta";
  const std::filesystem::path manifest = export_manifest(out_imm, cfg.out, "deformed");

  const double gate = flatness_gate(g.patch());
  json rep;
  rep["config"] = config_json(cfg);
  rep["surface"] = surface_json(s, g);
  rep["deformed_manifest"] = manifest.filename().string();
  json q;
  q["flatness"] = quantity(d.flatness, gate, "Maurer-Cartan equation of the associated family");
  q["stokes_bound"] = quantity(d.stokes_bound, std::nullopt, "path dependence explained by the measured curvature");
  q["path_dependence"] = quantity(d.path_dependence, IntegrationOptions{}.path_tol + d.stokes_bound,
                                  "integrability: frame independent of the integration path");
  q["orthogonality"] = quantity(d.orthogonality, 1e-12, "frame stays in O(5)");
  q["congruence_residual"] =
      quantity(c.residual, kCongruentTol, "f_theta congruent to f (RMS after Procrustes fit)");
  q["congruence_determinant"] = quantity(c.determinant, std::nullopt, "orientation of the fitted isometry");
  rep["quantities"] = q;
  rep["congruent"] = c.residual <= kCongruentTol;
  rep["noncongruent"] = c.residual > kCongruentTol;
  rep["congruence_rank"] = c.rank;
  rep["congruence_degenerate"] = c.degenerate;
  write_json(cfg.out / "report.json", rep);
  return kPass;
}

}  // namespace ms4::cli
