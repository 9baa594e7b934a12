#include "ms4/catalog.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include <json.hpp>

#include "ms4/error.hpp"

namespace ms4 {

namespace {

constexpr double kPi = std::numbers::pi;
const double kSqrt2 = std::sqrt(2.0);
const double kSqrt3 = std::sqrt(3.0);

ImmersionJets empty_jets(const GridPatch& p) {
  return {VecField(p), VecField(p), VecField(p), VecField(p), VecField(p)};
}

// Domain point of a sphere chart and its parameter derivatives.
struct SpherePoint {
  Eigen::Vector3d p, pu, pv, puu, puv, pvv;
};

Eigen::Vector3d permute(const Eigen::Vector3d& a, SphereChart chart) {
  return chart == SphereChart::a ? a : Eigen::Vector3d(a.z(), a.x(), a.y());
}

SpherePoint sphere_point(double t, double f, SphereChart chart) {
  const double st = std::sin(t), ct = std::cos(t), sf = std::sin(f), cf = std::cos(f);
  SpherePoint s;
  s.p = permute({st * cf, st * sf, ct}, chart);
  s.pu = permute({ct * cf, ct * sf, -st}, chart);
  s.pv = permute({-st * sf, st * cf, 0.0}, chart);
  s.puu = permute({-st * cf, -st * sf, -ct}, chart);
  s.puv = permute({-ct * sf, ct * cf, 0.0}, chart);
  s.pvv = permute({-st * cf, -st * sf, 0.0}, chart);
  return s;
}

GridPatch sphere_patch(int n_lat, int n_lon) {
  const double off = 0.5 * kPi / n_lat;
  return GridPatch(n_lat, n_lon, {off, kPi - off}, {0.0, 2.0 * kPi}, false, true);
}

// Symmetric bilinear form of the Veronese map, V(p) = Q(p, p).
Vec5 veronese_q(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  Vec5 out;
  out << 0.5 * kSqrt3 * (a.x() * b.y() + a.y() * b.x()), 0.5 * kSqrt3 * (a.x() * b.z() + a.z() * b.x()),
      0.5 * kSqrt3 * (a.y() * b.z() + a.z() * b.y()), 0.5 * kSqrt3 * (a.x() * b.x() - a.y() * b.y()),
      0.5 * (a.x() * b.x() + a.y() * b.y() - 2.0 * a.z() * b.z());
  return out;
}

template <class Map>
ImmersionField sphere_surface(const std::string& name, int n_lat, int n_lon, SphereChart chart,
                              Map&& map) {
  ImmersionField imm;
  imm.name = name;
  imm.patch = sphere_patch(n_lat, n_lon);
  imm.position = VecField(imm.patch);
  ImmersionJets j = empty_jets(imm.patch);
  for (int i = 0; i < n_lat; ++i) {
    for (int k = 0; k < n_lon; ++k) {
      const SpherePoint s = sphere_point(imm.patch.u(i), imm.patch.v(k), chart);
      map(s, imm.position(i, k), j.fu(i, k), j.fv(i, k), j.fuu(i, k), j.fuv(i, k), j.fvv(i, k));
    }
  }
  imm.jets = std::move(j);
  return imm;
}

double uniform_pm1(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0;
}

}  // namespace

ImmersionField clifford_torus(int nu, int nv) {
  if (nu < 16 || nv < 16) throw SourceError("clifford torus needs at least 16 points per axis");
  ImmersionField imm;
  imm.name = "clifford";
  const double L = kSqrt2 * kPi;
  imm.patch = GridPatch(nu, nv, {0.0, L}, {0.0, L}, true, true);
  imm.position = VecField(imm.patch);
  ImmersionJets j = empty_jets(imm.patch);
  for (int i = 0; i < nu; ++i) {
    const double a = kSqrt2 * imm.patch.u(i);
    for (int k = 0; k < nv; ++k) {
      const double b = kSqrt2 * imm.patch.v(k);
      imm.position(i, k) << std::cos(a) / kSqrt2, std::sin(a) / kSqrt2, std::cos(b) / kSqrt2,
          std::sin(b) / kSqrt2, 0.0;
      j.fu(i, k) << -std::sin(a), std::cos(a), 0.0, 0.0, 0.0;
      j.fv(i, k) << 0.0, 0.0, -std::sin(b), std::cos(b), 0.0;
      j.fuu(i, k) << -kSqrt2 * std::cos(a), -kSqrt2 * std::sin(a), 0.0, 0.0, 0.0;
      j.fuv(i, k).setZero();
      j.fvv(i, k) << 0.0, 0.0, -kSqrt2 * std::cos(b), -kSqrt2 * std::sin(b), 0.0;
    }
  }
  imm.jets = std::move(j);
  return imm;
}

ImmersionField veronese_sphere(int n_lat, int n_lon, SphereChart chart) {
  return sphere_surface("veronese", n_lat, n_lon, chart,
                        [](const SpherePoint& s, Vec5& f, Vec5& fu, Vec5& fv, Vec5& fuu, Vec5& fuv,
                           Vec5& fvv) {
                          f = veronese_q(s.p, s.p);
                          fu = 2.0 * veronese_q(s.p, s.pu);
                          fv = 2.0 * veronese_q(s.p, s.pv);
                          fuu = 2.0 * (veronese_q(s.pu, s.pu) + veronese_q(s.p, s.puu));
                          fuv = 2.0 * (veronese_q(s.pu, s.pv) + veronese_q(s.p, s.puv));
                          fvv = 2.0 * (veronese_q(s.pv, s.pv) + veronese_q(s.p, s.pvv));
                        });
}

ImmersionField geodesic_sphere(int n_lat, int n_lon, SphereChart chart) {
  auto lift = [](const Eigen::Vector3d& x) {
    Vec5 v;
    v << x, 0.0, 0.0;
    return v;
  };
  return sphere_surface("geodesic", n_lat, n_lon, chart,
                        [&](const SpherePoint& s, Vec5& f, Vec5& fu, Vec5& fv, Vec5& fuu, Vec5& fuv,
                            Vec5& fvv) {
                          f = lift(s.p);
                          fu = lift(s.pu);
                          fv = lift(s.pv);
                          fuu = lift(s.puu);
                          fuv = lift(s.puv);
                          fvv = lift(s.pvv);
                        });
}

RealField sphere_chart_weight(const GridPatch& patch, SphereChart chart) {
  RealField w(patch);
  for (int i = 0; i < patch.nu(); ++i) {
    for (int k = 0; k < patch.nv(); ++k) {
      const Eigen::Vector3d p = sphere_point(patch.u(i), patch.v(k), chart).p;
      const double sa = std::pow(1.0 - p.z() * p.z(), 2);
      const double sb = std::pow(1.0 - p.x() * p.x(), 2);
      w(i, k) = (chart == SphereChart::a ? sa : sb) / (sa + sb);
    }
  }
  return w;
}

SphereAtlas sphere_atlas(const std::string& name, int n) {
  const std::string c = canonical_name(name);
  SphereAtlas atlas;
  if (c == "veronese") {
    atlas.chart_a = veronese_sphere(n, n, SphereChart::a);
    atlas.chart_b = veronese_sphere(n, n, SphereChart::b);
  } else if (c == "geodesic") {
    atlas.chart_a = geodesic_sphere(n, n, SphereChart::a);
    atlas.chart_b = geodesic_sphere(n, n, SphereChart::b);
  } else {
    throw SourceError("no sphere atlas for surface '" + name + "'");
  }
  atlas.weight_a = sphere_chart_weight(atlas.chart_a.patch, SphereChart::a);
  atlas.weight_b = sphere_chart_weight(atlas.chart_b.patch, SphereChart::b);
  return atlas;
}

std::string canonical_name(const std::string& name) {
  if (name == "clifford" || name == "clifford_torus") return "clifford";
  if (name == "veronese" || name == "veronese_sphere") return "veronese";
  if (name == "geodesic" || name == "geodesic_sphere") return "geodesic";
  return "";
}

bool is_catalog_name(const std::string& name) { return !canonical_name(name).empty(); }

bool is_sphere_surface(const std::string& name) {
  const std::string c = canonical_name(name);
  return c == "veronese" || c == "geodesic";
}

ImmersionField catalog_surface(const std::string& name, int n) {
  const std::string c = canonical_name(name);
  if (c == "clifford") return clifford_torus(n, n);
  if (c == "veronese") return veronese_sphere(n, n);
  if (c == "geodesic") return geodesic_sphere(n, n);
  throw SourceError("unknown catalog surface '" + name + "'");
}

ImmersionField perturb_normal(const ImmersionField& imm, double amp, std::uint64_t seed) {
  const SurfaceGeometry g = analyze_surface(imm);
  const GridPatch& p = imm.patch;
  std::mt19937_64 rng(seed);
  struct Mode {
    int mu, mv;
    double c3, s3, c4, s4;
  };
  std::vector<Mode> modes;
  for (int mu = -3; mu <= 3; ++mu) {
    for (int mv = -3; mv <= 3; ++mv) {
      Mode m{mu, mv, 0, 0, 0, 0};
      m.c3 = uniform_pm1(rng);
      m.s3 = uniform_pm1(rng);
      m.c4 = uniform_pm1(rng);
      m.s4 = uniform_pm1(rng);
      modes.push_back(m);
    }
  }
  RealField phi3(p, 0.0), phi4(p, 0.0);
  double peak = 0.0;
  for (int i = 0; i < p.nu(); ++i) {
    const double x = (p.u(i) - p.u_range().lo) / p.u_range().length();
    for (int k = 0; k < p.nv(); ++k) {
      const double y = (p.v(k) - p.v_range().lo) / p.v_range().length();
      for (const Mode& m : modes) {
        const double arg = 2.0 * kPi * (m.mu * x + m.mv * y);
        phi3(i, k) += m.c3 * std::cos(arg) + m.s3 * std::sin(arg);
        phi4(i, k) += m.c4 * std::cos(arg) + m.s4 * std::sin(arg);
      }
      peak = std::max(peak, std::hypot(phi3(i, k), phi4(i, k)));
    }
  }
  ImmersionField out;
  out.name = imm.name + "+perturbed";
  out.patch = p;
  out.orientation = imm.orientation;
  out.position = VecField(p);
  for (std::size_t k = 0; k < p.size(); ++k) {
    const Vec5 x = imm.position[k] + (amp / peak) * (phi3[k] * g.normal.e3[k] + phi4[k] * g.normal.e4[k]);
    out.position[k] = x.normalized();
  }
  return out;
}

namespace {

using nlohmann::json;

void require_little_endian() {
  if constexpr (std::endian::native != std::endian::little) {
    throw SourceError("only little-endian hosts are supported");
  }
}

std::vector<double> read_doubles(const std::filesystem::path& path, std::size_t expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SourceError("cannot open data file " + path.string());
  in.seekg(0, std::ios::end);
  const auto bytes = static_cast<std::size_t>(in.tellg());
  if (bytes != expected * sizeof(double)) {
    std::ostringstream os;
    os << "data file " << path.string() << " has " << bytes << " bytes, expected "
       << expected * sizeof(double);
    throw SourceError(os.str());
  }
  in.seekg(0);
  std::vector<double> data(expected);
  in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(bytes));
  if (!in) throw SourceError("short read from " + path.string());
  return data;
}

void write_doubles(const std::filesystem::path& path, const std::vector<double>& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SourceError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size() * sizeof(double)));
}

void check_finite(const std::vector<double>& data, int per_point, const GridPatch& p,
                  const std::string& what) {
  std::ostringstream bad;
  int count = 0;
  for (std::size_t k = 0; k < data.size(); ++k) {
    if (std::isfinite(data[k])) continue;
    if (count < 10) {
      const GridIndex g = p.unflatten(k / per_point);
      bad << " (" << g.i << ", " << g.j << ")";
    }
    ++count;
  }
  if (count > 0) {
    std::ostringstream os;
    os << what << ": " << count << " non-finite values at" << bad.str();
    throw SourceError(os.str());
  }
}

VecField unpack(const std::vector<double>& data, int per_point, int slot, const GridPatch& p) {
  VecField f(p);
  for (std::size_t k = 0; k < p.size(); ++k) {
    for (int c = 0; c < 5; ++c) f[k](c) = data[k * per_point + slot * 5 + c];
  }
  return f;
}

void pack(std::vector<double>& data, int per_point, int slot, const VecField& f) {
  for (std::size_t k = 0; k < f.size(); ++k) {
    for (int c = 0; c < 5; ++c) data[k * per_point + slot * 5 + c] = f[k](c);
  }
}

}  // namespace

IngestResult ingest(const std::filesystem::path& manifest) {
  require_little_endian();
  std::ifstream in(manifest);
  if (!in) throw SourceError("cannot open manifest " + manifest.string());
  json m;
  try {
    in >> m;
  } catch (const std::exception& e) {
    throw SourceError("manifest is not valid JSON: " + std::string(e.what()));
  }
  IngestResult res;
  try {
    if (m.value("kind", "") != "sampled") throw SourceError("manifest kind must be \"sampled\"");
    if (m.value("endianness", "little") != "little") throw SourceError("endianness must be \"little\"");
    if (m.value("layout", "row-major, v fastest") != "row-major, v fastest") {
      throw SourceError("layout must be \"row-major, v fastest\"");
    }
    const json& g = m.at("grid");
    const auto ur = g.at("u_range").get<std::vector<double>>();
    const auto vr = g.at("v_range").get<std::vector<double>>();
    if (ur.size() != 2 || vr.size() != 2) throw SourceError("ranges must be [lo, hi] pairs");
    GridPatch p;
    try {
      p = GridPatch(g.at("nu").get<int>(), g.at("nv").get<int>(), {ur[0], ur[1]}, {vr[0], vr[1]},
                    g.at("periodic_u").get<bool>(), g.at("periodic_v").get<bool>());
    } catch (const GeometryError& e) {
      throw SourceError(e.what());
    }
    const std::filesystem::path base = manifest.parent_path();
    const auto pos = read_doubles(base / m.at("position").get<std::string>(), p.size() * 5);
    check_finite(pos, 5, p, "position");

    ImmersionField& imm = res.immersion;
    imm.name = manifest.stem().string();
    imm.patch = p;
    imm.position = unpack(pos, 5, 0, p);
    for (std::size_t k = 0; k < p.size(); ++k) {
      const double drift = std::abs(imm.position[k].norm() - 1.0);
      res.max_drift = std::max(res.max_drift, drift);
      if (drift > 1e-6) {
        const GridIndex gi = p.unflatten(k);
        std::ostringstream os;
        os << "|f| deviates from 1 by " << drift << " at grid point (" << gi.i << ", " << gi.j << ")";
        throw SourceError(os.str());
      }
      if (drift > 1e-12) {
        imm.position[k].normalize();
        ++res.renormalized;
      }
    }

    if (m.contains("jets") && !m.at("jets").is_null()) {
      const json& jj = m.at("jets");
      if (!jj.contains("first") || !jj.contains("second")) {
        throw SourceError("jets need both \"first\" and \"second\" files");
      }
      const auto first = read_doubles(base / jj.at("first").get<std::string>(), p.size() * 10);
      const auto second = read_doubles(base / jj.at("second").get<std::string>(), p.size() * 15);
      check_finite(first, 10, p, "first jets");
      check_finite(second, 15, p, "second jets");
      imm.jets = ImmersionJets{unpack(first, 10, 0, p), unpack(first, 10, 1, p), unpack(second, 15, 0, p),
                               unpack(second, 15, 1, p), unpack(second, 15, 2, p)};
      res.jets_present = true;
    }

    try {
      const auto [jets, src] = resolve_jets(imm, JetPreference::automatic);
      (void)src;
      tangent_frame(imm, jets);
    } catch (const GeometryError& e) {
      throw SourceError(std::string("not an immersion: ") + e.what());
    }
  } catch (const json::exception& e) {
    throw SourceError("malformed manifest: " + std::string(e.what()));
  }
  return res;
}

std::filesystem::path export_manifest(const ImmersionField& imm, const std::filesystem::path& dir,
                                      const std::string& stem) {
  require_little_endian();
  std::filesystem::create_directories(dir);
  const GridPatch& p = imm.patch;
  std::vector<double> pos(p.size() * 5);
  pack(pos, 5, 0, imm.position);
  const std::string pos_name = stem + ".position.bin";
  write_doubles(dir / pos_name, pos);
  json m;
  m["kind"] = "sampled";
  m["grid"] = {{"nu", p.nu()},
               {"nv", p.nv()},
               {"u_range", {p.u_range().lo, p.u_range().hi}},
               {"v_range", {p.v_range().lo, p.v_range().hi}},
               {"periodic_u", p.periodic_u()},
               {"periodic_v", p.periodic_v()}};
  m["position"] = pos_name;
  if (imm.jets) {
    std::vector<double> first(p.size() * 10), second(p.size() * 15);
    pack(first, 10, 0, imm.jets->fu);
    pack(first, 10, 1, imm.jets->fv);
    pack(second, 15, 0, imm.jets->fuu);
    pack(second, 15, 1, imm.jets->fuv);
    pack(second, 15, 2, imm.jets->fvv);
    write_doubles(dir / (stem + ".jets1.bin"), first);
    write_doubles(dir / (stem + ".jets2.bin"), second);
    m["jets"] = {{"first", stem + ".jets1.bin"}, {"second", stem + ".jets2.bin"}};
  }
  m["endianness"] = "little";
  m["layout"] = "row-major, v fastest";
  const std::filesystem::path path = dir / (stem + ".json");
  std::ofstream out(path);
  if (!out) throw SourceError("cannot write " + path.string());
  out << m.dump(2) << "\n";
  return path;
}

}  // namespace ms4
