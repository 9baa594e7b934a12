#include "common.hpp"

#include <cstdio>
#include <fstream>

namespace ms4::cli::detail {

LoadedSurface load_surface(const RunConfig& cfg) {
  LoadedSurface s;
  if (!cfg.catalog.empty()) {
    s.source = "catalog";
    s.jets_in_input = true;
    if (is_sphere_surface(cfg.catalog)) {
      s.atlas = sphere_atlas(cfg.catalog, cfg.n);
      s.primary = s.atlas->chart_a;
    } else {
      s.primary = catalog_surface(cfg.catalog, cfg.n);
    }
  } else {
    s.source = "manifest";
    IngestResult r = ingest(cfg.manifest);
    s.primary = std::move(r.immersion);
    s.jets_in_input = r.jets_present;
    s.renormalized = r.renormalized;
  }
  if (cfg.perturb > 0.0) {
    s.primary = perturb_normal(s.primary, cfg.perturb, cfg.seed);
    s.atlas.reset();
  }
  return s;
}

std::vector<ChartView> chart_views(const LoadedSurface& s, JetPreference pref) {
  std::vector<ChartView> out;
  if (s.atlas) {
    for (int c = 0; c < 2; ++c) {
      const ImmersionField& imm = c == 0 ? s.atlas->chart_a : s.atlas->chart_b;
      const RealField& w = c == 0 ? s.atlas->weight_a : s.atlas->weight_b;
      out.push_back({analyze_surface(imm, pref), owned_region(w), w});
    }
  } else {
    const GridPatch& p = s.primary.patch;
    out.push_back({analyze_surface(s.primary, pref), MaskField(p, 1), RealField(p, 1.0)});
  }
  return out;
}

json quantity(double value, std::optional<double> tolerance, const std::string& ref) {
  json j;
  j["value"] = value;
  j["tolerance"] = tolerance ? json(*tolerance) : json(nullptr);
  j["ref"] = ref;
  return j;
}

json config_json(const RunConfig& cfg) {
  json j;
  j["command"] = cfg.command;
  if (!cfg.catalog.empty()) {
    j["catalog"] = cfg.catalog;
    j["n"] = cfg.n;
  } else {
    j["manifest"] = cfg.manifest.filename().string();
  }
  if (cfg.theta) j["theta"] = *cfg.theta;
  if (cfg.command == "monodromy") {
    j["scan"] = cfg.scan;
    j["tol_close"] = cfg.tol_close;
  }
  if (cfg.perturb > 0.0) {
    j["perturb"] = cfg.perturb;
    j["seed"] = cfg.seed;
  }
  j["jets"] = cfg.jets == JetPreference::analytic           ? "analytic"
              : cfg.jets == JetPreference::finite_difference ? "fd"
                                                             : "auto";
  return j;
}

json surface_json(const LoadedSurface& s, const SurfaceGeometry& g) {
  const GridPatch& p = g.patch();
  json j;
  j["name"] = s.primary.name;
  j["source"] = s.source;
  j["nu"] = p.nu();
  j["nv"] = p.nv();
  j["periodic_u"] = p.periodic_u();
  j["periodic_v"] = p.periodic_v();
  j["jet_source"] = to_string(g.jet_source);
  j["jets_in_input"] = s.jets_in_input;
  j["renormalized_points"] = s.renormalized;
  j["charts"] = s.atlas ? 2 : 1;
  j["normal_frame_holonomy"] = g.normal.nontrivial_holonomy;
  return j;
}

double masked_max(const RealField& f, const MaskField& domain) {
  double m = -1e300;
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (domain[k]) m = std::max(m, f[k]);
  }
  return m;
}

double masked_min(const RealField& f, const MaskField& domain) {
  double m = 1e300;
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (domain[k]) m = std::min(m, f[k]);
  }
  return m;
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw SourceError("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

void write_field_csv(const std::filesystem::path& path, const RealField& f) {
  std::ofstream out(path);
  if (!out) throw SourceError("cannot write " + path.string());
  out << "u,v,value\n";
  const GridPatch& p = f.patch();
  char line[96];
  for (int i = 0; i < p.nu(); ++i) {
    for (int j = 0; j < p.nv(); ++j) {
      std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g\n", p.u(i), p.v(j), f(i, j));
      out << line;
    }
  }
}

}  // namespace ms4::cli::detail
