#pragma once

// Finite-difference exterior calculus on GridPatch fields.
//
// Derivatives use 4th-order central stencils wherever the 5-point stencil
// fits (always on periodic axes) and 4th-order off-centred stencils in the
// two samples nearest an open boundary. Every stencil is exact on
// polynomials of degree <= 4.

#include <array>
#include <utility>

#include "ms4/grid.hpp"

namespace ms4 {

template <class T>
Field<T> derivative(const Field<T>& f, Axis axis, int order = 1);

// Taps of the stencil used by `derivative` at index `idx` along `axis`,
// already scaled by 1/h^order. Tap t sits at index idx + start + t (wrapped
// on periodic axes).
struct StencilTaps {
  int start = 0;
  int taps = 0;
  std::array<double, 6> w{};
};
StencilTaps derivative_stencil(const GridPatch& patch, Axis axis, int idx, int order = 1);

template <class T>
struct FirstPartials {
  Field<T> du, dv;
};

template <class T>
struct SecondPartials {
  Field<T> du, dv, duu, duv, dvv;
};

template <class T>
FirstPartials<T> first_partials(const Field<T>& f);

template <class T>
SecondPartials<T> second_partials(const Field<T>& f);

// First fundamental form in parameter coordinates with precomputed area
// element and inverse metric.
struct MetricField {
  RealField E, F, G;
  RealField dA;                  // sqrt(EG - F^2)
  RealField inv11, inv12, inv22; // g^{ij}

  const GridPatch& patch() const { return E.patch(); }

  // Throws GeometryError unless E > 0, G > 0 and EG - F^2 > 1e-12 max(E, G)^2
  // pointwise.
  static MetricField from_coefficients(RealField E, RealField F, RealField G);
  static MetricField flat(const GridPatch& patch);
};

// Hodge star on a 1-form given by its components in an oriented orthonormal
// coframe: *w1 = w2, *w2 = -w1.
inline std::pair<double, double> hodge_star_oneform(double a1, double a2) { return {-a2, a1}; }
std::pair<RealField, RealField> hodge_star_oneform(const RealField& a1, const RealField& a2);

// (1/sqrt g) d_i (sqrt g g^{ij} d_j f).
RealField laplace_beltrami(const RealField& f, const MetricField& metric);

// Per-axis quadrature weights: trapezoid on periodic axes, composite
// Simpson (with a 3/8 tail for an even sample count) on open axes.
std::vector<double> quadrature_weights(const GridPatch& patch, Axis axis);

// sum field * dA * w_u * w_v, summed pairwise in fixed order.
double integrate(const RealField& field, const MetricField& metric);
// Same with an extra pointwise weight (partition of unity, masks).
double integrate_weighted(const RealField& field, const MetricField& metric,
                          const RealField& weight);

// Gaussian curvature of the metric alone (Brioschi formula on FD
// derivatives of E, F, G).
RealField intrinsic_gaussian_curvature(const MetricField& metric);

// Bilinear interpolation at a parameter point; periodic axes wrap.
template <class T>
T interpolate(const Field<T>& f, double u, double v);

}  // namespace ms4
