#include "ms4/topology.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <sstream>

#include "ms4/error.hpp"

namespace ms4 {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

RealField safe_log(const RealField& a) {
  return a.map([](double x) { return std::log(std::max(x, 1e-300)); });
}

double periodic_offset(double x, double centre, const Interval& range, bool periodic) {
  const double d = x - centre;
  return periodic ? std::remainder(d, range.length()) : d;
}

}  // namespace

IntegerEstimate IntegerEstimate::of(double x) {
  IntegerEstimate e;
  e.value = x;
  e.rounded = std::lround(x);
  e.gap = std::abs(x - static_cast<double>(e.rounded));
  return e;
}

EulerNumbers euler_numbers(const ShapeReport& report, const MetricField& metric) {
  if (!report.patch().closed()) {
    throw GeometryError("Euler numbers need a closed surface: a doubly periodic patch or an atlas");
  }
  return {IntegerEstimate::of(integrate(report.K, metric) / kTwoPi),
          IntegerEstimate::of(integrate(report.KN, metric) / kTwoPi)};
}

EulerNumbers euler_numbers(const std::vector<WeightedChart>& atlas) {
  if (atlas.empty()) throw GeometryError("empty atlas");
  std::vector<double> k, kn;
  for (const WeightedChart& c : atlas) {
    k.push_back(integrate_weighted(c.report->K, *c.metric, c.weight));
    kn.push_back(integrate_weighted(c.report->KN, *c.metric, c.weight));
  }
  return {IntegerEstimate::of(pairwise_sum(k) / kTwoPi), IntegerEstimate::of(pairwise_sum(kn) / kTwoPi)};
}

ZeroCount zero_count_excised(const RealField& a, const MetricField& metric,
                             const std::vector<ParamPoint>& zeros, double radius) {
  const GridPatch& p = a.patch();
  if (!p.closed()) throw GeometryError("zero counting needs a closed (doubly periodic) patch");
  if (radius <= 0.0) radius = 6.0 * p.max_spacing();
  for (std::size_t x = 0; x < zeros.size(); ++x) {
    for (std::size_t y = x + 1; y < zeros.size(); ++y) {
      const double du = periodic_offset(zeros[x].u, zeros[y].u, p.u_range(), true);
      const double dv = periodic_offset(zeros[x].v, zeros[y].v, p.v_range(), true);
      if (std::hypot(du, dv) < 2.0 * radius) throw GeometryError("excision discs overlap");
    }
  }

  const RealField lap = laplace_beltrami(safe_log(a), metric);
  RealField keep(p, 1.0), inside(p, 0.0);
  for (int i = 0; i < p.nu(); ++i) {
    for (int j = 0; j < p.nv(); ++j) {
      for (const ParamPoint& z : zeros) {
        const double du = periodic_offset(p.u(i), z.u, p.u_range(), true);
        const double dv = periodic_offset(p.v(j), z.v, p.v_range(), true);
        if (std::hypot(du, dv) < radius) {
          keep(i, j) = 0.0;
          inside(i, j) = 1.0;
        }
      }
      if (keep(i, j) > 0.0 && !(a(i, j) > 0.0)) {
        std::ostringstream os;
        os << "zero of the field at grid point (" << i << ", " << j << ") outside every excision disc";
        throw GeometryError(os.str());
      }
    }
  }

  ZeroCount out;
  out.discs = static_cast<int>(zeros.size());
  std::vector<double> parts{integrate_weighted(lap, metric, keep)};
  for (const ParamPoint& z : zeros) {
    RealField one_disc(p, 0.0);
    for (int i = 0; i < p.nu(); ++i) {
      for (int j = 0; j < p.nv(); ++j) {
        const double du = periodic_offset(p.u(i), z.u, p.u_range(), true);
        const double dv = periodic_offset(p.v(j), z.v, p.v_range(), true);
        if (std::hypot(du, dv) < radius) one_disc(i, j) = 1.0;
      }
    }
    const double area = integrate_weighted(RealField(p, 1.0), metric, one_disc);
    constexpr int kSamples = 64;
    std::vector<double> ring(kSamples);
    for (int s = 0; s < kSamples; ++s) {
      const double t = kTwoPi * s / kSamples;
      ring[s] = interpolate(lap, z.u + radius * std::cos(t), z.v + radius * std::sin(t));
    }
    parts.push_back(area * pairwise_sum(ring) / kSamples);
    out.excised_area += area;
  }
  out.N = IntegerEstimate::of(-pairwise_sum(parts) / kTwoPi);
  return out;
}

std::vector<ParamPoint> zero_candidates(const RealField& a, double threshold) {
  const GridPatch& p = a.patch();
  std::vector<int> label(p.size(), -1);
  std::vector<ParamPoint> out;
  for (std::size_t start = 0; start < p.size(); ++start) {
    if (label[start] >= 0 || !(a[start] < threshold)) continue;
    const int id = static_cast<int>(out.size());
    std::size_t best = start;
    std::deque<std::size_t> queue{start};
    label[start] = id;
    while (!queue.empty()) {
      const std::size_t k = queue.front();
      queue.pop_front();
      if (a[k] < a[best]) best = k;
      const GridIndex g = p.unflatten(k);
      const GridIndex nbrs[4] = {{g.i + 1, g.j}, {g.i - 1, g.j}, {g.i, g.j + 1}, {g.i, g.j - 1}};
      for (GridIndex n : nbrs) {
        n.i = p.wrap_u(n.i);
        n.j = p.wrap_v(n.j);
        if (n.i < 0 || n.i >= p.nu() || n.j < 0 || n.j >= p.nv()) continue;
        const std::size_t m = p.index(n.i, n.j);
        if (label[m] >= 0 || !(a[m] < threshold)) continue;
        label[m] = id;
        queue.push_back(m);
      }
    }
    const GridIndex g = p.unflatten(best);
    out.push_back({p.u(g.i), p.v(g.j)});
  }
  return out;
}

ZeroRelation zero_relation_check(double chi_M, double chi_Nf, double N_a_plus, double N_a_minus,
                      bool superminimal) {
  ZeroRelation r;
  if (superminimal) {
    r.skipped = true;
    r.reason = "superminimal";
    return r;
  }
  r.residual_minus = std::abs(2.0 * chi_M + chi_Nf + N_a_minus);
  r.residual_plus = std::abs(2.0 * chi_M - chi_Nf + N_a_plus);
  return r;
}

namespace {

PointwiseResidual residual_where(const RealField& lhs, const RealField& rhs, const MaskField& where) {
  PointwiseResidual r;
  r.residual = RealField(lhs.patch(), 0.0);
  r.evaluated = where;
  for (std::size_t k = 0; k < lhs.size(); ++k) {
    if (!where[k]) continue;
    r.residual[k] = std::abs(lhs[k] - rhs[k]);
    r.max = std::max(r.max, r.residual[k]);
    ++r.count;
  }
  return r;
}

}  // namespace

PointwiseResidual laplace_identity_residual(const ShapeReport& report, const MetricField& metric,
                                            Branch branch) {
  return laplace_identity_residual(report, metric, branch, MaskField(report.patch(), 1));
}

MaskField owned_region(const RealField& weight) {
  return weight.map([](double w) -> std::uint8_t { return w >= 0.5 ? 1 : 0; });
}

PointwiseResidual laplace_identity_residual(const ShapeReport& report, const MetricField& metric,
                                            Branch branch, const MaskField& domain) {
  const RealField& a = branch == Branch::plus ? report.a_plus : report.a_minus;
  const double sign = branch == Branch::plus ? -1.0 : 1.0;
  const double threshold = std::max(0.1 * max_abs(a), 1e-6);
  const GridPatch& p = a.patch();
  MaskField where(p, 0);
  RealField rhs(p);
  for (std::size_t k = 0; k < p.size(); ++k) {
    where[k] = domain[k] && a[k] > threshold ? 1 : 0;
    rhs[k] = 2.0 * report.K[k] + sign * report.KN[k];
  }
  return residual_where(laplace_beltrami(safe_log(a), metric), rhs, where);
}

PointwiseResidual ricci_condition_residual(const ShapeReport& report, const MetricField& metric,
                                           double eps) {
  const GridPatch& p = report.patch();
  RealField one_minus_K(p), rhs(p);
  MaskField where(p, 0);
  for (std::size_t k = 0; k < p.size(); ++k) {
    one_minus_K[k] = 1.0 - report.K[k];
    where[k] = one_minus_K[k] > eps ? 1 : 0;
    rhs[k] = 4.0 * report.K[k];
  }
  return residual_where(laplace_beltrami(safe_log(one_minus_K), metric), rhs, where);
}

double ratio_spread(const AdaptedFrameField& aff) {
  double lo = 1e300, hi = -1e300;
  for (std::size_t k = 0; k < aff.kappa1.size(); ++k) {
    if (aff.circle_mask[k]) continue;
    const double r = aff.mu1[k] / aff.kappa1[k];
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  return hi >= lo ? hi - lo : 0.0;
}

}  // namespace ms4
