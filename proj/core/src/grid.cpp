#include "ms4/grid.hpp"

#include <algorithm>
#include <sstream>

#include "ms4/error.hpp"

namespace ms4 {

GridPatch::GridPatch(int nu, int nv, Interval u_range, Interval v_range, bool periodic_u,
                     bool periodic_v)
    : nu_(nu),
      nv_(nv),
      u_range_(u_range),
      v_range_(v_range),
      periodic_u_(periodic_u),
      periodic_v_(periodic_v) {
  if (nu < 8 || nv < 8) {
    std::ostringstream os;
    os << "grid needs at least 8 points per axis, got " << nu << "x" << nv;
    throw GeometryError(os.str());
  }
  if (!(u_range.length() > 0.0) || !(v_range.length() > 0.0)) {
    throw GeometryError("grid ranges must have positive length");
  }
  hu_ = u_range.length() / (periodic_u ? nu : nu - 1);
  hv_ = v_range.length() / (periodic_v ? nv : nv - 1);
}

GridPatch GridPatch::unwrapped() const {
  const int nu = periodic_u_ ? nu_ + 1 : nu_;
  const int nv = periodic_v_ ? nv_ + 1 : nv_;
  return GridPatch(nu, nv, u_range_, v_range_, false, false);
}

template <class T>
void require_finite(const Field<T>& f, const std::string& what) {
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (!is_finite(f[k])) {
      const GridIndex g = f.patch().unflatten(k);
      std::ostringstream os;
      os << what << ": non-finite value at grid point (" << g.i << ", " << g.j << ")";
      throw GeometryError(os.str());
    }
  }
}

template void require_finite(const Field<double>&, const std::string&);
template void require_finite(const Field<cplx>&, const std::string&);
template void require_finite(const Field<Vec5>&, const std::string&);
template void require_finite(const Field<Mat5>&, const std::string&);

double max_abs(const RealField& f) {
  double m = 0.0;
  for (double x : f.values()) m = std::max(m, std::abs(x));
  return m;
}

double max_abs(const ComplexField& f) {
  double m = 0.0;
  for (const cplx& z : f.values()) m = std::max(m, std::abs(z));
  return m;
}

double max_abs_masked(const RealField& f, const MaskField& exclude) {
  double m = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (!exclude[k]) m = std::max(m, std::abs(f[k]));
  }
  return m;
}

RealField abs(const ComplexField& f) {
  return f.map([](const cplx& z) { return std::abs(z); });
}

LoopPath LoopPath::u_generator(const GridPatch& patch, GridIndex base) {
  if (!patch.periodic_u()) throw GeometryError("u-generator needs a periodic u axis");
  LoopPath loop;
  loop.winding_u = 1;
  for (int s = 0; s <= patch.nu(); ++s) loop.points.push_back({base.i + s, base.j});
  return loop;
}

LoopPath LoopPath::v_generator(const GridPatch& patch, GridIndex base) {
  if (!patch.periodic_v()) throw GeometryError("v-generator needs a periodic v axis");
  LoopPath loop;
  loop.winding_v = 1;
  for (int s = 0; s <= patch.nv(); ++s) loop.points.push_back({base.i, base.j + s});
  return loop;
}

LoopPath LoopPath::rectangle(const GridPatch&, GridIndex base, int du, int dv) {
  LoopPath loop;
  GridIndex p = base;
  loop.points.push_back(p);
  for (int s = 0; s < du; ++s) loop.points.push_back(p = {p.i + 1, p.j});
  for (int s = 0; s < dv; ++s) loop.points.push_back(p = {p.i, p.j + 1});
  for (int s = 0; s < du; ++s) loop.points.push_back(p = {p.i - 1, p.j});
  for (int s = 0; s < dv; ++s) loop.points.push_back(p = {p.i, p.j - 1});
  return loop;
}

LoopPath LoopPath::then(const LoopPath& next) const {
  LoopPath out = *this;
  const GridIndex end = points.back();
  const GridIndex start = next.points.front();
  for (std::size_t s = 1; s < next.points.size(); ++s) {
    const GridIndex q = next.points[s];
    out.points.push_back({end.i + (q.i - start.i), end.j + (q.j - start.j)});
  }
  out.winding_u += next.winding_u;
  out.winding_v += next.winding_v;
  return out;
}

void LoopPath::validate(const GridPatch& patch) const {
  if (points.size() < 2) throw GeometryError("loop needs at least two points");
  const GridIndex a = points.front();
  const GridIndex b = points.back();
  const int di = b.i - a.i;
  const int dj = b.j - a.j;
  const bool closed_u = patch.periodic_u() ? di == winding_u * patch.nu() : di == 0;
  const bool closed_v = patch.periodic_v() ? dj == winding_v * patch.nv() : dj == 0;
  if (!closed_u || !closed_v) throw GeometryError("loop does not close modulo periods");
  const double limit = 2.0 * patch.max_spacing();
  for (std::size_t s = 1; s < points.size(); ++s) {
    const double du = (points[s].i - points[s - 1].i) * patch.hu();
    const double dv = (points[s].j - points[s - 1].j) * patch.hv();
    if (std::hypot(du, dv) >= limit) throw GeometryError("loop step exceeds 2*max(hu,hv)");
    const int i = patch.wrap_u(points[s].i);
    const int j = patch.wrap_v(points[s].j);
    if (i < 0 || i >= patch.nu() || j < 0 || j >= patch.nv()) {
      throw GeometryError("loop leaves the patch");
    }
  }
}

double pairwise_sum(const double* data, std::size_t n) {
  if (n <= 16) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += data[k];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

}  // namespace ms4
