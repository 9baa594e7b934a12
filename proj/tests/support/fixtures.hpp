#pragma once

// Test-only surfaces with closed-form jets.

#include <cmath>
#include <complex>
#include <numbers>

#include "ms4/surface.hpp"

namespace ms4::fixtures {

// Lawson's minimal torus in the totally geodesic S^3 = {x5 = 0}:
// (cos mx cos y, sin mx cos y, cos kx sin y, sin kx sin y, 0) on [0, 2pi)^2.
// Metric du^2 (m^2 cos^2 y + k^2 sin^2 y) + dy^2.
inline ImmersionField lawson_torus(int m, int k, int n) {
  const double tp = 2.0 * std::numbers::pi;
  ImmersionField imm;
  imm.name = "lawson";
  imm.patch = GridPatch(n, n, {0.0, tp}, {0.0, tp}, true, true);
  const GridPatch& p = imm.patch;
  imm.position = VecField(p);
  ImmersionJets j{VecField(p), VecField(p), VecField(p), VecField(p), VecField(p)};
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const double x = p.u(a), y = p.v(b);
      const double cm = std::cos(m * x), sm = std::sin(m * x), ck = std::cos(k * x), sk = std::sin(k * x);
      const double cy = std::cos(y), sy = std::sin(y);
      imm.position(a, b) << cm * cy, sm * cy, ck * sy, sk * sy, 0.0;
      j.fu(a, b) << -m * sm * cy, m * cm * cy, -k * sk * sy, k * ck * sy, 0.0;
      j.fv(a, b) << -cm * sy, -sm * sy, ck * cy, sk * cy, 0.0;
      j.fuu(a, b) << -m * m * cm * cy, -m * m * sm * cy, -k * k * ck * sy, -k * k * sk * sy, 0.0;
      j.fuv(a, b) << m * sm * sy, -m * cm * sy, -k * sk * cy, k * ck * cy, 0.0;
      j.fvv(a, b) = -imm.position(a, b);
    }
  }
  imm.jets = std::move(j);
  return imm;
}

// Gaussian curvature of du^2 E(y) + dy^2 with E = m^2 cos^2 y + k^2 sin^2 y:
// K = -s''/s for s = sqrt(E).
inline double lawson_curvature(int m, int k, double y) {
  const double c = static_cast<double>(k * k - m * m);
  const double E = m * m * std::cos(y) * std::cos(y) + k * k * std::sin(y) * std::sin(y);
  const double E1 = c * std::sin(2 * y);
  const double E2 = 2 * c * std::cos(2 * y);
  // s'' / s = E''/(2E) - E'^2/(4E^2)
  return -(E2 / (2 * E) - E1 * E1 / (4 * E * E));
}

inline GridPatch flat_torus(int n) {
  const double tp = 2.0 * std::numbers::pi;
  return GridPatch(n, n, {0.0, tp}, {0.0, tp}, true, true);
}

// kappa1 = 2 + cos u, mu1 = sin(v)/2 on the flat torus with e1 = d/du,
// e2 = d/dv, and the connection forms evaluated on E = e1 - i e2 in closed
// form: w12 = -1/4 *dL with L = log(kappa1^2 - mu1^2),
// w34 = *(kappa1 dmu1 - mu1 dkappa1)/(kappa1^2 - mu1^2), where
// (*w)_u = -w_v, (*w)_v = w_u and w(E) = w_u - i w_v.
struct SyntheticForms {
  RealField kappa1, mu1;
  Mat2Field coeff;
  ComplexField omega12_E, omega34_E;
};

inline SyntheticForms synthetic_forms(int n) {
  const GridPatch p = flat_torus(n);
  SyntheticForms s{RealField(p), RealField(p), Mat2Field(p), ComplexField(p), ComplexField(p)};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double u = p.u(i), v = p.v(j);
      const double k = 2.0 + std::cos(u), ku = -std::sin(u);
      const double m = 0.5 * std::sin(v), mv = 0.5 * std::cos(v);
      const double D = k * k - m * m;
      const double Lu = 2 * k * ku / D, Lv = -2 * m * mv / D;
      const double au = -m * ku, av = k * mv;
      s.kappa1(i, j) = k;
      s.mu1(i, j) = m;
      s.coeff(i, j) = Mat2::Identity();
      s.omega12_E(i, j) = {Lv / 4, Lu / 4};
      s.omega34_E(i, j) = {-av / D, -au / D};
    }
  }
  return s;
}

// a = |c|^m (2 + cos u) with c = cos(u/2) + i cos(v/2): a single zero of
// order m at (pi, pi), where c^m winds m times.
struct ZeroOracle {
  RealField a;
  ComplexField c;
};

inline ZeroOracle zero_oracle(int m, int n) {
  const GridPatch p = flat_torus(n);
  ZeroOracle z{RealField(p), ComplexField(p)};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const std::complex<double> c(std::cos(p.u(i) / 2), std::cos(p.v(j) / 2));
      z.a(i, j) = std::pow(std::abs(c), m) * (2.0 + std::cos(p.u(i)));
      z.c(i, j) = std::pow(c, m);
    }
  }
  return z;
}

// sqrt(s1 s2) (2 + cos u), s1 = sin^2(u/2) + sin^2(v/2), s2 = cos^2(u/2) + cos^2(v/2):
// simple zeros at (0, 0) and (pi, pi).
inline RealField two_zero_field(int n) {
  const GridPatch p = flat_torus(n);
  RealField a(p);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double u = p.u(i), v = p.v(j);
      const double s1 = std::pow(std::sin(u / 2), 2) + std::pow(std::sin(v / 2), 2);
      const double s2 = std::pow(std::cos(u / 2), 2) + std::pow(std::cos(v / 2), 2);
      a(i, j) = std::sqrt(s1 * s2) * (2.0 + std::cos(u));
    }
  }
  return a;
}

}  // namespace ms4::fixtures
