#include "ms4/monodromy.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "ms4/error.hpp"
#include "ms4/parallel.hpp"

namespace ms4 {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

Mat5 generator_monodromy(const OmegaSource& omega, const LoopPath& loop, const Mat5& F_start) {
  loop.validate(omega.patch());
  const Mat5 F_end = transport(omega, loop, F_start);
  return F_end * F_start.transpose();
}

std::vector<LoopPath> deck_generators(const GridPatch& patch, GridIndex base) {
  std::vector<LoopPath> out;
  if (patch.periodic_u()) out.push_back(LoopPath::u_generator(patch, base));
  if (patch.periodic_v()) out.push_back(LoopPath::v_generator(patch, base));
  return out;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::finite: return "FINITE";
    case Verdict::circle: return "CIRCLE";
    default: return "INVALID";
  }
}

double family_flatness(const MaurerCartanFamily& fam) {
  double m = 0.0;
  for (int k = 0; k < 8; ++k) {
    m = std::max(m, max_flatness(assemble_maurer_cartan(fam, k * std::numbers::pi / 8.0)));
  }
  return m;
}

double identity_distance(const MaurerCartanFamily& fam, const std::vector<LoopPath>& gens,
                         const Mat5& F_start, double theta) {
  const OmegaSource omega(fam, theta);
  double d = 0.0;
  for (const LoopPath& g : gens) {
    d = std::max(d, (generator_monodromy(omega, g, F_start) - Mat5::Identity()).norm());
  }
  return d;
}

namespace {

std::pair<double, double> golden_section(const std::function<double(double)>& f, double a, double b,
                                         double width) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > width) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  const double x = 0.5 * (a + b);
  return {x, f(x)};
}

}  // namespace

MonodromyProfile scan_profile(const SurfaceGeometry& g, const MaurerCartanFamily& fam,
                              const ScanOptions& opts) {
  const GridPatch& p = g.patch();
  MonodromyProfile prof;
  prof.superminimal = superminimality_test(g.report).verdict == SuperminimalVerdict::superminimal;
  prof.flatness = family_flatness(fam);
  prof.flatness_gate = flatness_gate(p);
  if (!(prof.flatness <= prof.flatness_gate)) {
    std::ostringstream os;
    os << "Maurer-Cartan flatness residual " << prof.flatness << " exceeds the gate "
       << prof.flatness_gate << "; the input is not a minimal immersion at this resolution";
    prof.invalid_reason = os.str();
    prof.verdict = Verdict::invalid;
    return prof;
  }
  prof.tol_close = opts.tol_close;
  if (g.jet_source == JetSource::finite_difference && opts.scale_tol_with_flatness) {
    prof.tol_close = std::max(opts.tol_close, 10.0 * prof.flatness);
  }

  const std::vector<LoopPath> gens = deck_generators(p, opts.base);
  if (gens.empty()) throw GeometryError("monodromy needs at least one periodic axis");
  prof.generators = static_cast<int>(gens.size());
  const MatField frames = frame_matrices(g);
  const Mat5 F_start = frames(opts.base.i, opts.base.j);

  const int n = opts.n_theta;
  prof.thetas.resize(n);
  prof.M.assign(n, {});
  prof.d.assign(n, 0.0);
  prof.comm_defect.assign(n, 0.0);
  std::vector<double> orth(n, 0.0);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t k) {
    const double theta = kTwoPi * static_cast<double>(k) / n;
    prof.thetas[k] = theta;
    const OmegaSource omega(fam, theta);
    for (const LoopPath& loop : gens) {
      const Mat5 M = generator_monodromy(omega, loop, F_start);
      prof.M[k].push_back(M);
      prof.d[k] = std::max(prof.d[k], (M - Mat5::Identity()).norm());
      orth[k] = std::max(orth[k], (M.transpose() * M - Mat5::Identity()).norm());
    }
    if (prof.M[k].size() == 2) {
      prof.comm_defect[k] = (prof.M[k][0] * prof.M[k][1] - prof.M[k][1] * prof.M[k][0]).norm();
    }
  });
  prof.max_orthogonality = *std::max_element(orth.begin(), orth.end());

  const auto closed = std::count_if(prof.d.begin(), prof.d.end(),
                                    [&](double x) { return x < prof.tol_close; });
  if (static_cast<double>(closed) >= opts.circle_fraction * n) {
    prof.verdict = Verdict::circle;
  } else {
    prof.verdict = Verdict::finite;
    const double step = kTwoPi / n;
    auto f = [&](double t) { return identity_distance(fam, gens, F_start, t); };
    std::vector<std::pair<double, double>> found;
    for (int k = 0; k < n; ++k) {
      const double dm = prof.d[(k + n - 1) % n], dk = prof.d[k], dp = prof.d[(k + 1) % n];
      if (!(dk <= dm && dk < dp)) continue;
      const double t = prof.thetas[k];
      auto [x, fx] = golden_section(f, t - step, t + step, opts.refine_width);
      if (!(fx < prof.tol_close)) continue;
      x = std::fmod(x, kTwoPi);
      if (x < 0.0) x += kTwoPi;
      if (kTwoPi - x < 1e-6) x -= kTwoPi;
      found.emplace_back(x, fx);
    }
    std::sort(found.begin(), found.end());
    for (const auto& [x, fx] : found) {
      if (!prof.roots.empty() && std::abs(x - prof.roots.back()) < 1e-6) continue;
      prof.roots.push_back(x);
      prof.root_d.push_back(fx);
    }
  }

  if (prof.superminimal && opts.congruence_samples > 0) {
    const VecField original = unwrap_field(g.immersion.position);
    const Mat5 seed = frames(0, 0);
    prof.congruence.resize(opts.congruence_samples);
    for (int k = 0; k < opts.congruence_samples; ++k) {
      const double theta = kTwoPi * k / opts.congruence_samples;
      IntegrationOptions io;
      io.check_path = false;
      const DeformedPatch d = integrate_frame(OmegaSource(fam, theta), seed, io);
      prof.congruence[k] = {theta, congruence_test(original, d.position).residual};
    }
  }
  return prof;
}

DichotomyReport dichotomy_report(const MonodromyProfile& profile) {
  DichotomyReport r;
  r.verdict = profile.verdict;
  r.roots = profile.roots;
  if (profile.verdict == Verdict::invalid) {
    r.note = profile.invalid_reason;
    return r;
  }
  const auto closed = std::count_if(profile.d.begin(), profile.d.end(),
                                    [&](double x) { return x < profile.tol_close; });
  r.closed_fraction = profile.d.empty() ? 0.0 : static_cast<double>(closed) / profile.d.size();
  for (double c : profile.comm_defect) r.max_comm_defect = std::max(r.max_comm_defect, c);
  for (const auto& c : profile.congruence) {
    r.max_congruence_residual = std::max(r.max_congruence_residual, c.residual);
  }
  r.note =
      "d(theta) = max_i |M_i - I|_F does not depend on the base point: "
      "|A M A^-1 - I|_F = |M - I|_F for orthogonal A";
  return r;
}

}  // namespace ms4
