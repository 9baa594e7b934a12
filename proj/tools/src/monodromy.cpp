#include <cstdio>
#include <filesystem>
#include <fstream>

#include "common.hpp"
#include "ms4/monodromy.hpp"

namespace ms4::cli {

using namespace detail;

int cmd_monodromy(const RunConfig& cfg) {
  const LoadedSurface s = load_surface(cfg);
  const SurfaceGeometry g = analyze_surface(s.primary, cfg.jets);
  const MaurerCartanFamily fam = assemble_family(g);
  ScanOptions opts;
  opts.n_theta = cfg.scan;
  opts.tol_close = cfg.tol_close;
  const MonodromyProfile prof = scan_profile(g, fam, opts);
  if (prof.verdict == Verdict::invalid) throw IntegrabilityBroken(prof.invalid_reason);
  const DichotomyReport dr = dichotomy_report(prof);

  std::filesystem::create_directories(cfg.out);
  {
    std::ofstream csv(cfg.out / "profile.csv");
    if (!csv) throw SourceError("cannot write profile.csv");
    csv << "theta,d,comm_defect\n";
    char line[96];
    for (std::size_t k = 0; k < prof.thetas.size(); ++k) {
      std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g\n", prof.thetas[k], prof.d[k],
                    prof.comm_defect[k]);
      csv << line;
    }
  }

  json roots;
  roots["verdict"] = to_string(prof.verdict);
  roots["tol_close"] = prof.tol_close;
  roots["roots"] = prof.roots;
  roots["d_at_roots"] = prof.root_d;
  write_json(cfg.out / "roots.json", roots);

  double max_cong = 0.0;
  for (const CongruenceSample& c : prof.congruence) max_cong = std::max(max_cong, c.residual);
  json rep;
  rep["config"] = config_json(cfg);
  rep["surface"] = surface_json(s, g);
  rep["verdict"] = to_string(prof.verdict);
  rep["roots"] = prof.roots;
  rep["generators"] = prof.generators;
  rep["superminimal"] = prof.superminimal;
  json q;
  q["tol_close"] = quantity(prof.tol_close, std::nullopt, "closing tolerance on d(theta)");
  q["flatness"] = quantity(prof.flatness, prof.flatness_gate, "Maurer-Cartan equation of the associated family");
  q["closed_fraction"] = quantity(dr.closed_fraction, std::nullopt, "finite or circle dichotomy");
  q["max_comm_defect"] = quantity(dr.max_comm_defect, 1e-7, "monodromy is a homomorphism of an abelian group");
  q["max_orthogonality"] = quantity(prof.max_orthogonality, 1e-12, "monodromy lies in O(5)");
  if (!prof.congruence.empty()) {
    q["max_congruence_residual"] =
        quantity(max_cong, 1e-4, "superminimal: f_theta congruent to f for every theta");
  }
  rep["quantities"] = q;
  rep["note"] = dr.note;
  write_json(cfg.out / "report.json", rep);
  return kPass;
}

}  // namespace ms4::cli
