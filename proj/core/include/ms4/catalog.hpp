#pragma once

// Closed-form test surfaces with exact jets, a two-chart atlas of the
// sphere, a seeded normal perturbation and the sampled-immersion file format.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ms4/surface.hpp"

namespace ms4 {

// (1/sqrt2)(cos sqrt2 u, sin sqrt2 u, cos sqrt2 v, sin sqrt2 v, 0) on the
// unit-speed square lattice [0, sqrt2 pi)^2. Flat, in the hyperplane x5 = 0.
ImmersionField clifford_torus(int nu, int nv);

// Lat-long charts of S^2. Chart A has poles +-z, chart B poles +-x (a cyclic
// permutation of the axes, so both are positively oriented). The polar angle
// axis is open with half-step offsets, the azimuth periodic.
enum class SphereChart { a, b };

// Degree-2 harmonic map of the radius-sqrt3 sphere: K = 1/3, K_N = 2/3.
ImmersionField veronese_sphere(int n_lat, int n_lon, SphereChart chart = SphereChart::a);
// Equatorial S^2 in the first three coordinates: B = 0.
ImmersionField geodesic_sphere(int n_lat, int n_lon, SphereChart chart = SphereChart::a);

// Partition-of-unity weight of a chart: s_self / (s_A + s_B) with
// s_A = (1 - z^2)^2, s_B = (1 - x^2)^2 at the domain point.
RealField sphere_chart_weight(const GridPatch& patch, SphereChart chart);

struct SphereAtlas {
  ImmersionField chart_a, chart_b;
  RealField weight_a, weight_b;
};
SphereAtlas sphere_atlas(const std::string& name, int n);

// Known names: clifford, veronese, geodesic (and the long forms
// clifford_torus, veronese_sphere, geodesic_sphere).
bool is_catalog_name(const std::string& name);
bool is_sphere_surface(const std::string& name);
std::string canonical_name(const std::string& name);
ImmersionField catalog_surface(const std::string& name, int n);

// f + amp (phi3 e3 + phi4 e4) reprojected to S^4, with phi random Fourier
// modes of order <= 3 normalized to max |phi| = 1. Jets are dropped.
ImmersionField perturb_normal(const ImmersionField& imm, double amp, std::uint64_t seed);

struct IngestResult {
  ImmersionField immersion;
  bool jets_present = false;
  std::size_t renormalized = 0;  // points with drift in (1e-12, 1e-6]
  double max_drift = 0.0;
};

// Reads a manifest
//   {kind: "sampled", grid: {nu, nv, u_range: [lo, hi], v_range, periodic_u, periodic_v},
//    position: PATH, jets: {first: PATH, second: PATH} (optional),
//    endianness: "little", layout: "row-major, v fastest"}
// with raw float64 data: 5 values per point for the position, 10 (f_u, f_v)
// and 15 (f_uu, f_uv, f_vv) for the jets. Paths are relative to the
// manifest. Throws SourceError on any rejection.
IngestResult ingest(const std::filesystem::path& manifest);

// Writes <dir>/<stem>.json plus .position.bin (and jet files when present);
// returns the manifest path.
std::filesystem::path export_manifest(const ImmersionField& imm, const std::filesystem::path& dir,
                                      const std::string& stem);

}  // namespace ms4
