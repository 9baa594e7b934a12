#pragma once

// Global integral identities: Gauss-Bonnet, the normal Euler number, zero
// counts of absolute-value-type functions, the relations between them and
// the Ricci condition.

#include <optional>
#include <string>
#include <vector>

#include "ms4/adapted.hpp"

namespace ms4 {

// A real value that should be an integer, reported with its rounding.
struct IntegerEstimate {
  double value = 0.0;
  long rounded = 0;
  double gap = 0.0;
  static IntegerEstimate of(double x);
};

// One chart of an atlas with a partition-of-unity weight.
struct WeightedChart {
  const ShapeReport* report = nullptr;
  const MetricField* metric = nullptr;
  RealField weight;
};

struct EulerNumbers {
  IntegerEstimate chi_M;   // (1/2pi) int K dA
  IntegerEstimate chi_Nf;  // (1/2pi) int K_N dA
};

// Requires a closed (doubly periodic) patch.
EulerNumbers euler_numbers(const ShapeReport& report, const MetricField& metric);
// Sum over charts of the weighted integrals.
EulerNumbers euler_numbers(const std::vector<WeightedChart>& atlas);

struct ZeroCount {
  IntegerEstimate N;
  double excised_area = 0.0;
  int discs = 0;
};

// N(a) = -(1/2pi) [int_{M minus discs} lap log a dA + sum_D area(D) mean_{dD} lap log a],
// discs of radius `radius` (default 6 max(hu, hv)) around the given zeros on
// a closed patch. Throws GeometryError if discs overlap.
ZeroCount zero_count_excised(const RealField& a, const MetricField& metric,
                             const std::vector<ParamPoint>& zeros, double radius = 0.0);

// Connected components of {a < threshold} (periodic axes wrap), each
// represented by its smallest sample. Candidates for the zeros of a.
std::vector<ParamPoint> zero_candidates(const RealField& a, double threshold);

struct ZeroRelation {
  bool skipped = false;
  std::string reason;
  double residual_minus = 0.0;  // |2 chi_M + chi_Nf + N(a-)|
  double residual_plus = 0.0;   // |2 chi_M - chi_Nf + N(a+)|
};

ZeroRelation zero_relation_check(double chi_M, double chi_Nf, double N_a_plus, double N_a_minus,
                      bool superminimal);

enum class Branch { plus, minus };

struct PointwiseResidual {
  RealField residual;     // 0 where not evaluated
  MaskField evaluated;
  double max = 0.0;
  std::size_t count = 0;  // number of evaluated points
};

// |lap log a_pm - (2K -+ K_N)| where a_pm > max(0.1 max a_pm, 1e-6).
PointwiseResidual laplace_identity_residual(const ShapeReport& report, const MetricField& metric,
                                            Branch branch);
// Same, further restricted to `domain` (e.g. the half of a sphere chart its
// partition-of-unity weight assigns to it, away from the chart poles).
PointwiseResidual laplace_identity_residual(const ShapeReport& report, const MetricField& metric,
                                            Branch branch, const MaskField& domain);
// Points where weight >= 1/2.
MaskField owned_region(const RealField& weight);

// |lap log(1 - K) - 4K| where 1 - K > eps.
PointwiseResidual ricci_condition_residual(const ShapeReport& report, const MetricField& metric,
                                           double eps = 1e-6);

// mu1 / kappa1 spread (max - min) off the circle locus; zero for surfaces in
// a totally geodesic S^3.
double ratio_spread(const AdaptedFrameField& aff);

}  // namespace ms4
