#pragma once

// Monodromy of the associated family along deck-group generators, the
// identity-distance profile d(theta) and the closing set.

#include <string>
#include <vector>

#include "ms4/adapted.hpp"
#include "ms4/family.hpp"

namespace ms4 {

// M = F_end F_start^T for the frame transported once around `loop`.
Mat5 generator_monodromy(const OmegaSource& omega, const LoopPath& loop, const Mat5& F_start);

// Generator loops of the patch at `base`: the u-loop if u is periodic, then
// the v-loop if v is periodic.
std::vector<LoopPath> deck_generators(const GridPatch& patch, GridIndex base);

enum class Verdict { finite, circle, invalid };
const char* to_string(Verdict v);

struct ScanOptions {
  int n_theta = 720;
  double tol_close = 1e-6;
  // With finite-difference jets, use max(tol_close, 10 * measured flatness).
  bool scale_tol_with_flatness = true;
  GridIndex base{0, 0};
  double refine_width = 1e-8;
  double circle_fraction = 0.9;
  // Full-patch congruence checks for superminimal input (0 disables).
  int congruence_samples = 64;
};

struct CongruenceSample {
  double theta = 0.0;
  double residual = 0.0;
};

struct MonodromyProfile {
  std::vector<double> thetas;
  std::vector<std::vector<Mat5>> M;  // per theta, one matrix per generator
  std::vector<double> d;
  std::vector<double> comm_defect;   // 0 when there is a single generator
  std::vector<double> roots;
  std::vector<double> root_d;
  double max_orthogonality = 0.0;
  double tol_close = 0.0;
  double flatness = 0.0;
  double flatness_gate = 0.0;
  int generators = 0;
  bool superminimal = false;
  std::vector<CongruenceSample> congruence;
  Verdict verdict = Verdict::invalid;
  std::string invalid_reason;
};

// Max plaquette flatness over theta in {k pi / 8 : k = 0..7} (Omega_theta
// has period pi).
double family_flatness(const MaurerCartanFamily& fam);

MonodromyProfile scan_profile(const SurfaceGeometry& g, const MaurerCartanFamily& fam,
                              const ScanOptions& opts = {});

// d(theta) = max_i |M_i(theta) - I|_F for the given family and base.
double identity_distance(const MaurerCartanFamily& fam, const std::vector<LoopPath>& gens,
                         const Mat5& F_start, double theta);

struct DichotomyReport {
  Verdict verdict = Verdict::invalid;
  std::vector<double> roots;
  double closed_fraction = 0.0;
  double max_comm_defect = 0.0;
  double max_congruence_residual = 0.0;
  std::string note;
};

DichotomyReport dichotomy_report(const MonodromyProfile& profile);

}  // namespace ms4
