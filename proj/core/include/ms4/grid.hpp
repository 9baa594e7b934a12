#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace ms4 {

using Vec5 = Eigen::Matrix<double, 5, 1>;
using Mat5 = Eigen::Matrix<double, 5, 5>;
using Mat2 = Eigen::Matrix2d;
using cplx = std::complex<double>;

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  double length() const { return hi - lo; }
  bool operator==(const Interval&) const = default;
};

struct GridIndex {
  int i = 0;
  int j = 0;
  bool operator==(const GridIndex&) const = default;
};

enum class Axis { u, v };

// Rectangular parameter domain. A periodic axis stores no duplicate seam
// sample: index n is identified with index 0.
class GridPatch {
 public:
  GridPatch() = default;
  GridPatch(int nu, int nv, Interval u_range, Interval v_range, bool periodic_u,
            bool periodic_v);

  int nu() const { return nu_; }
  int nv() const { return nv_; }
  std::size_t size() const { return static_cast<std::size_t>(nu_) * nv_; }
  int count(Axis a) const { return a == Axis::u ? nu_ : nv_; }

  const Interval& u_range() const { return u_range_; }
  const Interval& v_range() const { return v_range_; }
  bool periodic_u() const { return periodic_u_; }
  bool periodic_v() const { return periodic_v_; }
  bool periodic(Axis a) const { return a == Axis::u ? periodic_u_ : periodic_v_; }
  bool closed() const { return periodic_u_ && periodic_v_; }

  double hu() const { return hu_; }
  double hv() const { return hv_; }
  double spacing(Axis a) const { return a == Axis::u ? hu_ : hv_; }
  double max_spacing() const { return std::max(hu_, hv_); }

  double u(int i) const { return u_range_.lo + hu_ * i; }
  double v(int j) const { return v_range_.lo + hv_ * j; }

  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * nv_ + static_cast<std::size_t>(j);
  }
  GridIndex unflatten(std::size_t k) const {
    return {static_cast<int>(k / nv_), static_cast<int>(k % nv_)};
  }

  // Modular index on periodic axes; identity on open axes.
  int wrap_u(int i) const { return periodic_u_ ? mod(i, nu_) : i; }
  int wrap_v(int j) const { return periodic_v_ ? mod(j, nv_) : j; }

  // The simply connected domain used for frame integration: each periodic
  // axis gains an explicit seam sample and becomes open.
  GridPatch unwrapped() const;

  bool operator==(const GridPatch&) const = default;

  static int mod(int a, int n) {
    const int r = a % n;
    return r < 0 ? r + n : r;
  }

 private:
  int nu_ = 0;
  int nv_ = 0;
  Interval u_range_;
  Interval v_range_;
  bool periodic_u_ = false;
  bool periodic_v_ = false;
  double hu_ = 0.0;
  double hv_ = 0.0;
};

template <class T>
class Field {
 public:
  using value_type = T;

  Field() = default;
  explicit Field(GridPatch patch) : patch_(std::move(patch)), values_(patch_.size()) {}
  Field(GridPatch patch, const T& fill)
      : patch_(std::move(patch)), values_(patch_.size(), fill) {}

  const GridPatch& patch() const { return patch_; }
  std::size_t size() const { return values_.size(); }

  T& operator()(int i, int j) { return values_[patch_.index(i, j)]; }
  const T& operator()(int i, int j) const { return values_[patch_.index(i, j)]; }
  T& operator[](std::size_t k) { return values_[k]; }
  const T& operator[](std::size_t k) const { return values_[k]; }

  std::vector<T>& values() { return values_; }
  const std::vector<T>& values() const { return values_; }

  template <class F>
  auto map(F&& f) const {
    using R = std::decay_t<decltype(f(values_[0]))>;
    Field<R> out(patch_);
    for (std::size_t k = 0; k < values_.size(); ++k) out[k] = f(values_[k]);
    return out;
  }

 private:
  GridPatch patch_;
  std::vector<T> values_;
};

using RealField = Field<double>;
using ComplexField = Field<cplx>;
using VecField = Field<Vec5>;
using MatField = Field<Mat5>;
using Mat2Field = Field<Mat2>;
using MaskField = Field<std::uint8_t>;

inline bool is_finite(double x) { return std::isfinite(x); }
inline bool is_finite(const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }
template <class Derived>
bool is_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

// Throws GeometryError naming the first non-finite sample.
template <class T>
void require_finite(const Field<T>& f, const std::string& what);

double max_abs(const RealField& f);
double max_abs(const ComplexField& f);
double max_abs_masked(const RealField& f, const MaskField& exclude);
RealField abs(const ComplexField& f);

// Closed lattice loop on a patch, stored as grid indices (unwrapped, so a
// u-generator runs i = i0 .. i0+nu). Winding numbers count traversals of
// each periodic axis.
struct LoopPath {
  std::vector<GridIndex> points;
  int winding_u = 0;
  int winding_v = 0;

  static LoopPath u_generator(const GridPatch& patch, GridIndex base);
  static LoopPath v_generator(const GridPatch& patch, GridIndex base);
  // Rectangle of size (du, dv) cells traversed counter-clockwise; contractible.
  static LoopPath rectangle(const GridPatch& patch, GridIndex base, int du, int dv);
  // This loop followed by `next`; both must start at the same base point.
  LoopPath then(const LoopPath& next) const;

  // Throws GeometryError if the path is not closed modulo periods or takes
  // a step longer than 2*max(hu, hv).
  void validate(const GridPatch& patch) const;
};

// Fixed-order pairwise summation; results do not depend on threading.
double pairwise_sum(const double* data, std::size_t n);
inline double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()); }

}  // namespace ms4
