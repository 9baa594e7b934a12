#include "ms4/calculus.hpp"

#include <algorithm>
#include <sstream>

#include "ms4/error.hpp"

namespace ms4 {

namespace {

struct Stencil {
  int start = 0;  // offset of the first tap relative to the evaluation index
  int taps = 0;
  std::array<double, 6> w{};
};

constexpr Stencil kCentral1{-2, 5, {1.0 / 12, -8.0 / 12, 0.0, 8.0 / 12, -1.0 / 12, 0.0}};
constexpr Stencil kCentral2{-2, 5, {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12, 0.0}};
constexpr Stencil kEdge1{0, 5, {-25.0 / 12, 48.0 / 12, -36.0 / 12, 16.0 / 12, -3.0 / 12, 0.0}};
constexpr Stencil kNearEdge1{-1, 5, {-3.0 / 12, -10.0 / 12, 18.0 / 12, -6.0 / 12, 1.0 / 12, 0.0}};
constexpr Stencil kEdge2{0, 6, {45.0 / 12, -154.0 / 12, 214.0 / 12, -156.0 / 12, 61.0 / 12, -10.0 / 12}};
constexpr Stencil kNearEdge2{-1, 6, {10.0 / 12, -15.0 / 12, -4.0 / 12, 14.0 / 12, -6.0 / 12, 1.0 / 12}};

// Mirror a left-edge stencil onto the right edge. Odd derivatives flip sign.
Stencil mirrored(const Stencil& s, int order) {
  Stencil m;
  m.taps = s.taps;
  m.start = -(s.start + s.taps - 1);
  const double sign = order == 1 ? -1.0 : 1.0;
  for (int t = 0; t < s.taps; ++t) m.w[t] = sign * s.w[s.taps - 1 - t];
  return m;
}

Stencil stencil_for(int idx, int n, bool periodic, int order) {
  if (periodic || (idx >= 2 && idx <= n - 3)) return order == 1 ? kCentral1 : kCentral2;
  if (idx == 0) return order == 1 ? kEdge1 : kEdge2;
  if (idx == 1) return order == 1 ? kNearEdge1 : kNearEdge2;
  if (idx == n - 1) return mirrored(order == 1 ? kEdge1 : kEdge2, order);
  return mirrored(order == 1 ? kNearEdge1 : kNearEdge2, order);
}

}  // namespace

StencilTaps derivative_stencil(const GridPatch& patch, Axis axis, int idx, int order) {
  const int n = patch.count(axis);
  if (!patch.periodic(axis) && n < 6) throw GeometryError("open axis needs at least 6 samples");
  const Stencil s = stencil_for(idx, n, patch.periodic(axis), order);
  const double h = patch.spacing(axis);
  const double scale = order == 1 ? 1.0 / h : 1.0 / (h * h);
  StencilTaps out{s.start, s.taps, {}};
  for (int t = 0; t < s.taps; ++t) out.w[t] = scale * s.w[t];
  return out;
}

template <class T>
Field<T> derivative(const Field<T>& f, Axis axis, int order) {
  if (order != 1 && order != 2) throw GeometryError("derivative order must be 1 or 2");
  const GridPatch& p = f.patch();
  const int n = p.count(axis);
  const bool periodic = p.periodic(axis);
  if (!periodic && n < 6) throw GeometryError("open axis needs at least 6 samples");
  require_finite(f, "derivative input");
  const double h = p.spacing(axis);
  const double scale = order == 1 ? 1.0 / h : 1.0 / (h * h);

  std::vector<Stencil> stencils(n);
  for (int idx = 0; idx < n; ++idx) stencils[idx] = stencil_for(idx, n, periodic, order);

  Field<T> out(p);
  for (int i = 0; i < p.nu(); ++i) {
    for (int j = 0; j < p.nv(); ++j) {
      const int idx = axis == Axis::u ? i : j;
      const Stencil& s = stencils[idx];
      auto sample = [&](int t) -> const T& {
        const int q = idx + s.start + t;
        const int qq = periodic ? GridPatch::mod(q, n) : q;
        return axis == Axis::u ? f(qq, j) : f(i, qq);
      };
      T acc = s.w[0] * sample(0);
      for (int t = 1; t < s.taps; ++t) {
        if (s.w[t] != 0.0) acc += s.w[t] * sample(t);
      }
      out(i, j) = scale * acc;
    }
  }
  return out;
}

template <class T>
FirstPartials<T> first_partials(const Field<T>& f) {
  return {derivative(f, Axis::u, 1), derivative(f, Axis::v, 1)};
}

template <class T>
SecondPartials<T> second_partials(const Field<T>& f) {
  SecondPartials<T> s;
  s.du = derivative(f, Axis::u, 1);
  s.dv = derivative(f, Axis::v, 1);
  s.duu = derivative(f, Axis::u, 2);
  s.dvv = derivative(f, Axis::v, 2);
  s.duv = derivative(s.du, Axis::v, 1);
  return s;
}

template Field<double> derivative(const Field<double>&, Axis, int);
template Field<cplx> derivative(const Field<cplx>&, Axis, int);
template Field<Vec5> derivative(const Field<Vec5>&, Axis, int);
template Field<Mat5> derivative(const Field<Mat5>&, Axis, int);
template FirstPartials<double> first_partials(const Field<double>&);
template FirstPartials<cplx> first_partials(const Field<cplx>&);
template FirstPartials<Vec5> first_partials(const Field<Vec5>&);
template FirstPartials<Mat5> first_partials(const Field<Mat5>&);
template SecondPartials<double> second_partials(const Field<double>&);
template SecondPartials<Vec5> second_partials(const Field<Vec5>&);

namespace {
// Smallest admissible det / max(E, G)^2, i.e. squared ratio of the principal
// stretches of the differential.
constexpr double kDegenerateRatio = 1e-12;
}  // namespace

MetricField MetricField::from_coefficients(RealField E, RealField F, RealField G) {
  const GridPatch& p = E.patch();
  MetricField m;
  m.dA = RealField(p);
  m.inv11 = RealField(p);
  m.inv12 = RealField(p);
  m.inv22 = RealField(p);
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double det = E[k] * G[k] - F[k] * F[k];
    const double scale = std::max(E[k], G[k]);
    if (!(E[k] > 0.0) || !(G[k] > 0.0) || !(det > kDegenerateRatio * scale * scale)) {
      const GridIndex g = p.unflatten(k);
      std::ostringstream os;
      os << "degenerate metric at grid point (" << g.i << ", " << g.j << "): E=" << E[k]
         << " F=" << F[k] << " G=" << G[k];
      throw GeometryError(os.str());
    }
    m.dA[k] = std::sqrt(det);
    m.inv11[k] = G[k] / det;
    m.inv12[k] = -F[k] / det;
    m.inv22[k] = E[k] / det;
  }
  m.E = std::move(E);
  m.F = std::move(F);
  m.G = std::move(G);
  return m;
}

MetricField MetricField::flat(const GridPatch& patch) {
  return from_coefficients(RealField(patch, 1.0), RealField(patch, 0.0), RealField(patch, 1.0));
}

std::pair<RealField, RealField> hodge_star_oneform(const RealField& a1, const RealField& a2) {
  RealField b1(a1.patch()), b2(a1.patch());
  for (std::size_t k = 0; k < a1.size(); ++k) {
    std::tie(b1[k], b2[k]) = hodge_star_oneform(a1[k], a2[k]);
  }
  return {std::move(b1), std::move(b2)};
}

RealField laplace_beltrami(const RealField& f, const MetricField& metric) {
  const GridPatch& p = f.patch();
  const RealField fu = derivative(f, Axis::u);
  const RealField fv = derivative(f, Axis::v);
  RealField flux_u(p), flux_v(p);
  for (std::size_t k = 0; k < p.size(); ++k) {
    flux_u[k] = metric.dA[k] * (metric.inv11[k] * fu[k] + metric.inv12[k] * fv[k]);
    flux_v[k] = metric.dA[k] * (metric.inv12[k] * fu[k] + metric.inv22[k] * fv[k]);
  }
  const RealField div_u = derivative(flux_u, Axis::u);
  const RealField div_v = derivative(flux_v, Axis::v);
  RealField out(p);
  for (std::size_t k = 0; k < p.size(); ++k) out[k] = (div_u[k] + div_v[k]) / metric.dA[k];
  return out;
}

std::vector<double> quadrature_weights(const GridPatch& patch, Axis axis) {
  const int n = patch.count(axis);
  const double h = patch.spacing(axis);
  std::vector<double> w(n, 0.0);
  if (patch.periodic(axis)) {
    std::fill(w.begin(), w.end(), h);
    return w;
  }
  // Simpson over the first `m` samples (m odd), 3/8 rule over the rest.
  const int m = n % 2 == 1 ? n : n - 3;
  for (int k = 0; k + 2 < m; k += 2) {
    w[k] += h / 3.0;
    w[k + 1] += 4.0 * h / 3.0;
    w[k + 2] += h / 3.0;
  }
  if (m != n) {
    const int s = n - 4;
    w[s] += 3.0 * h / 8.0;
    w[s + 1] += 9.0 * h / 8.0;
    w[s + 2] += 9.0 * h / 8.0;
    w[s + 3] += 3.0 * h / 8.0;
  }
  return w;
}

double integrate_weighted(const RealField& field, const MetricField& metric,
                          const RealField& weight) {
  const GridPatch& p = field.patch();
  const auto wu = quadrature_weights(p, Axis::u);
  const auto wv = quadrature_weights(p, Axis::v);
  std::vector<double> terms(p.size());
  for (int i = 0; i < p.nu(); ++i) {
    for (int j = 0; j < p.nv(); ++j) {
      const std::size_t k = p.index(i, j);
      terms[k] = field[k] * weight[k] * metric.dA[k] * wu[i] * wv[j];
    }
  }
  return pairwise_sum(terms);
}

double integrate(const RealField& field, const MetricField& metric) {
  return integrate_weighted(field, metric, RealField(field.patch(), 1.0));
}

RealField intrinsic_gaussian_curvature(const MetricField& m) {
  const auto e = second_partials(m.E);
  const auto f = second_partials(m.F);
  const auto g = second_partials(m.G);
  const GridPatch& p = m.patch();
  RealField K(p);
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double E = m.E[k], F = m.F[k], G = m.G[k];
    Eigen::Matrix3d A, B;
    A << -0.5 * e.dvv[k] + f.duv[k] - 0.5 * g.duu[k], 0.5 * e.du[k], f.du[k] - 0.5 * e.dv[k],
        f.dv[k] - 0.5 * g.du[k], E, F,
        0.5 * g.dv[k], F, G;
    B << 0.0, 0.5 * e.dv[k], 0.5 * g.du[k],
        0.5 * e.dv[k], E, F,
        0.5 * g.du[k], F, G;
    const double det = E * G - F * F;
    K[k] = (A.determinant() - B.determinant()) / (det * det);
  }
  return K;
}

template <class T>
T interpolate(const Field<T>& f, double u, double v) {
  const GridPatch& p = f.patch();
  double x = (u - p.u_range().lo) / p.hu();
  double y = (v - p.v_range().lo) / p.hv();
  int i0 = static_cast<int>(std::floor(x));
  int j0 = static_cast<int>(std::floor(y));
  if (!p.periodic_u()) i0 = std::clamp(i0, 0, p.nu() - 2);
  if (!p.periodic_v()) j0 = std::clamp(j0, 0, p.nv() - 2);
  const double tx = x - i0;
  const double ty = y - j0;
  const int i1 = p.wrap_u(i0 + 1), j1 = p.wrap_v(j0 + 1);
  const int ia = p.wrap_u(i0), ja = p.wrap_v(j0);
  return (1 - tx) * (1 - ty) * f(ia, ja) + tx * (1 - ty) * f(i1, ja) + (1 - tx) * ty * f(ia, j1) +
         tx * ty * f(i1, j1);
}

template double interpolate(const Field<double>&, double, double);
template cplx interpolate(const Field<cplx>&, double, double);

}  // namespace ms4
