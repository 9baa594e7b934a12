#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ms4/catalog.hpp"
#include "ms4/topology.hpp"
#include "ms4cli/cli.hpp"

namespace ms4::cli::detail {

using nlohmann::json;

// The surface named by a RunConfig. Sphere surfaces from the catalog carry
// their two-chart atlas; `primary` is chart A.
struct LoadedSurface {
  ImmersionField primary;
  std::optional<SphereAtlas> atlas;
  std::string source;  // "catalog" or "manifest"
  bool jets_in_input = false;
  std::size_t renormalized = 0;
};

LoadedSurface load_surface(const RunConfig& cfg);

// A chart with the region on which its pointwise checks are reported.
struct ChartView {
  SurfaceGeometry geometry;
  MaskField domain;
  RealField weight;  // partition of unity; all ones without an atlas
};

std::vector<ChartView> chart_views(const LoadedSurface& s, JetPreference pref);

// {"value": x, "tolerance": t or null, "ref": "..."}
json quantity(double value, std::optional<double> tolerance, const std::string& ref);

json config_json(const RunConfig& cfg);
json surface_json(const LoadedSurface& s, const SurfaceGeometry& g);

double masked_max(const RealField& f, const MaskField& domain);
double masked_min(const RealField& f, const MaskField& domain);

void write_json(const std::filesystem::path& path, const json& j);
// Header "u,v,value", one row per grid point in storage order.
void write_field_csv(const std::filesystem::path& path, const RealField& f);

}  // namespace ms4::cli::detail
