// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <json.hpp>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "ms4/catalog.hpp"
#include "ms4/monodromy.hpp"
#include "ms4/topology.hpp"
#include "ms4cli/cli.hpp"

using namespace ms4;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kN = 256;

// Collects the individual conditions of one criterion.
class Criterion {
 public:
  void require(bool ok, const std::string& what, double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", value);
    if (!ok) {
      pass_ = false;
      failures_.push_back(what + " = " + buf);
    }
    summary_.push_back(what + " = " + buf);
  }
  void below(const std::string& what, double value, double tol) { require(value < tol, what + " < " + fmt(tol), value); }
  void above(const std::string& what, double value, double bound) {
    require(value > bound, what + " > " + fmt(bound), value);
  }
  bool pass() const { return pass_; }
  std::string detail() const {
    const std::vector<std::string>& src = pass_ ? summary_ : failures_;
    std::string out;
    for (const std::string& s : src) out += (out.empty() ? "" : "; ") + s;
    return out;
  }

 private:
  static std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
  }
  bool pass_ = true;
  std::vector<std::string> summary_, failures_;
};

double max_dev(const RealField& f, double c) {
  double m = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) m = std::max(m, std::abs(f[k] - c));
  return m;
}

double max_abs_c(const ComplexField& f) {
  double m = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) m = std::max(m, std::abs(f[k]));
  return m;
}

double clifford_error(const ShapeReport& r) {
  return std::max({max_dev(r.K, 0.0), max_dev(r.KN, 0.0), max_dev(r.normB2, 2.0), max_dev(r.kappa, 1.0),
                   max_dev(r.mu, 0.0), max_dev(r.a_plus, 1.0), max_dev(r.a_minus, 1.0)});
}

double gate_of(const GridPatch& p) { return 5.0 * p.max_spacing() * p.max_spacing(); }

struct VerifyRun {
  int code = -1;
  std::string report;
  nlohmann::json json;
};

VerifyRun run_verify(std::vector<std::string> args, const fs::path& out) {
  args.insert(args.begin(), {"ms4", "verify"});
  args.push_back("--out");
  args.push_back(out.string());
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream so, se;
  VerifyRun r;
  r.code = cli::run(static_cast<int>(argv.size()), argv.data(), so, se);
  std::ifstream in(out / "report.json", std::ios::binary);
  r.report.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  if (!r.report.empty()) r.json = nlohmann::json::parse(r.report);
  return r;
}

double check_value(const VerifyRun& r, const std::string& name) {
  for (const auto& c : r.json.at("checks")) {
    if (c.at("name") == name) return c.at("value").get<double>();
  }
  return std::nan("");
}

Criterion clifford_invariants() {
  Criterion c;
  const ImmersionField imm = clifford_torus(kN, kN);
  c.below("analytic max error", clifford_error(analyze_surface(imm, JetPreference::analytic).report), 1e-9);
  c.below("FD max error", clifford_error(analyze_surface(imm, JetPreference::finite_difference).report), 1e-5);
  return c;
}

Criterion veronese_invariants() {
  Criterion c;
  for (SphereChart chart : {SphereChart::a, SphereChart::b}) {
    const std::string tag = chart == SphereChart::a ? "chart A " : "chart B ";
    const SurfaceGeometry g = analyze_surface(veronese_sphere(kN, kN, chart));
    c.below(tag + "|K - 1/3|", max_dev(g.report.K, 1.0 / 3.0), 1e-9);
    c.below(tag + "||K_N| - 2/3|", max_dev(g.report.KN.map([](double x) { return std::abs(x); }), 2.0 / 3.0), 1e-9);
    c.require(superminimality_test(g.report).verdict == SuperminimalVerdict::superminimal, tag + "superminimal", 1.0);
    c.below(tag + "max Hopf", max_abs_c(hopf_differential(g).phi_coeff), 1e-8);
    c.below(tag + "max a_-", max_abs(g.report.a_minus), 1e-8);
  }
  return c;
}

Criterion laplace_identity() {
  Criterion c;
  const SurfaceGeometry cl = analyze_surface(clifford_torus(kN, kN));
  c.below("Clifford a_+", laplace_identity_residual(cl.report, cl.metric(), Branch::plus).max, 1e-8);
  c.below("Clifford a_-", laplace_identity_residual(cl.report, cl.metric(), Branch::minus).max, 1e-8);

  const SphereAtlas atlas = sphere_atlas("veronese", kN);
  double worst = 0.0, flipped = 0.0;
  for (int side = 0; side < 2; ++side) {
    const SurfaceGeometry g = analyze_surface(side == 0 ? atlas.chart_a : atlas.chart_b);
    const MaskField owned = owned_region(side == 0 ? atlas.weight_a : atlas.weight_b);
    worst = std::max(worst, laplace_identity_residual(g.report, g.metric(), Branch::plus, owned).max);
    ShapeReport wrong = g.report;
    for (std::size_t k = 0; k < wrong.KN.size(); ++k) wrong.KN[k] = -wrong.KN[k];
    flipped = std::max(flipped, laplace_identity_residual(wrong, g.metric(), Branch::plus, owned).max);
  }
  c.below("Veronese a_+", worst, 1e-8);
  c.above("Veronese with sign-flipped K_N", flipped, 1.0);
  return c;
}

Criterion connection_forms_check() {
  Criterion c;
  const SurfaceGeometry g = analyze_surface(clifford_torus(kN, kN));
  const FormAgreement fa = connection_form_agreement(build_adapted_frame(g));
  const double gate = gate_of(g.patch());
  c.below("Clifford w12", fa.omega12, gate);
  c.below("Clifford w34", fa.omega34, gate);

  const fixtures::SyntheticForms s = fixtures::synthetic_forms(kN);
  const GridPatch& p = s.kappa1.patch();
  const ConnectionForms f = connection_forms_formula(s.kappa1, s.mu1, s.coeff, MaskField(p, 0));
  double e12 = 0.0, e34 = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    e12 = std::max(e12, std::abs(f.omega12_E[k] - s.omega12_E[k]));
    e34 = std::max(e34, std::abs(f.omega34_E[k] - s.omega34_E[k]));
  }
  c.below("synthetic w12", e12, gate_of(p));
  c.below("synthetic w34", e34, gate_of(p));
  return c;
}

Criterion flatness_and_reconstruction() {
  Criterion c;
  const SurfaceGeometry g = analyze_surface(clifford_torus(kN, kN));
  const MaurerCartanFamily fam = assemble_family(g);
  const Mat5 seed = frame_matrices(g)[0];
  const double gate = gate_of(g.patch());
  double flat = 0.0, metric = 0.0, curv = 0.0;
  const RealField K0 = unwrap_field(g.report.K), KN0 = unwrap_field(g.report.KN);
  for (double t : {0.0, 0.3, kPi / 4, 1.2, kPi}) {
    flat = std::max(flat, max_flatness(assemble_maurer_cartan(fam, t)));
    const DeformedPatch d = integrate_frame(OmegaSource(fam, t), seed);
    if (t == 0.0) {
      c.below("theta=0 reconstruction RMS", congruence_test(d.position, unwrap_field(g.immersion.position)).residual,
              1e-6);
    }
    const SurfaceGeometry h = analyze_surface(deformed_immersion(d));
    const MetricField& m = h.metric();
    for (std::size_t k = 0; k < m.E.size(); ++k) {
      metric = std::max({metric, std::abs(m.E[k] - 1.0), std::abs(m.F[k]), std::abs(m.G[k] - 1.0)});
      curv = std::max({curv, std::abs(h.report.K[k] - K0[k]), std::abs(h.report.KN[k] - KN0[k])});
    }
  }
  c.below("max flatness / gate", flat / gate, 1.0);
  c.below("f_theta metric deviation", metric, 1e-4);
  c.below("f_theta (K, K_N) deviation", curv, 1e-4);
  return c;
}

Criterion monodromy_dichotomy() {
  Criterion c;
  const SurfaceGeometry g = analyze_surface(clifford_torus(kN, kN));
  const MaurerCartanFamily fam = assemble_family(g);
  ScanOptions opts;
  opts.n_theta = 720;
  opts.tol_close = 1e-6;
  const MonodromyProfile prof = scan_profile(g, fam, opts);
  c.require(prof.verdict == Verdict::finite, "Clifford verdict FINITE", prof.verdict == Verdict::finite);
  c.require(prof.roots.size() == 4, "Clifford root count 4", static_cast<double>(prof.roots.size()));
  double root_err = prof.roots.size() == 4 ? 0.0 : 1.0;
  for (std::size_t k = 0; k < prof.roots.size() && k < 4; ++k) {
    root_err = std::max(root_err, std::abs(prof.roots[k] - k * kPi / 2));
  }
  c.below("root offset", root_err, 1e-6);
  const std::vector<LoopPath> gens = deck_generators(g.patch(), {0, 0});
  c.above("d(pi/4)", identity_distance(fam, gens, frame_matrices(g)[0], kPi / 4), 0.1);
  double comm = 0.0;
  for (double x : prof.comm_defect) comm = std::max(comm, x);
  c.below("max commutator defect", comm, 1e-7);

  ScanOptions shifted = opts;
  shifted.base = {kN / 3, 2 * kN / 3};
  const MonodromyProfile other = scan_profile(g, fam, shifted);
  double shift = 0.0;
  for (std::size_t k = 0; k < prof.d.size(); ++k) shift = std::max(shift, std::abs(prof.d[k] - other.d[k]));
  c.below("base-point shift of d", shift, 1e-8);

  const SurfaceGeometry v = analyze_surface(veronese_sphere(kN, kN));
  ScanOptions vo;
  vo.n_theta = 720;
  vo.congruence_samples = 64;
  const MonodromyProfile vp = scan_profile(v, assemble_family(v), vo);
  c.require(vp.verdict == Verdict::circle, "Veronese verdict CIRCLE", vp.verdict == Verdict::circle);
  double cong = vp.congruence.empty() ? 1.0 : 0.0;
  for (const CongruenceSample& s : vp.congruence) cong = std::max(cong, s.residual);
  c.below("Veronese max congruence residual", cong, 1e-4);
  return c;
}

Criterion topology_suite() {
  Criterion c;
  const SurfaceGeometry cl = analyze_surface(clifford_torus(kN, kN));
  const EulerNumbers ce = euler_numbers(cl.report, cl.metric());
  c.below("Clifford |chi_M|", std::abs(ce.chi_M.value), 1e-6);
  c.below("Clifford |chi_Nf|", std::abs(ce.chi_Nf.value), 1e-6);

  const SphereAtlas atlas = sphere_atlas("veronese", kN);
  const SurfaceGeometry a = analyze_surface(atlas.chart_a);
  const SurfaceGeometry b = analyze_surface(atlas.chart_b);
  const EulerNumbers ve =
      euler_numbers({{&a.report, &a.metric(), atlas.weight_a}, {&b.report, &b.metric(), atlas.weight_b}});
  c.below("Veronese |chi_M - 2|", std::abs(ve.chi_M.value - 2.0), 0.02);

  const MetricField& m = cl.metric();
  auto count = [&](const RealField& f) {
    return zero_count_excised(f, m, zero_candidates(f, 0.05 * max_abs(f))).N.value;
  };
  const ZeroRelation l = zero_relation_check(ce.chi_M.value, ce.chi_Nf.value, count(cl.report.a_plus),
                                  count(cl.report.a_minus), false);
  c.below("Clifford zero relation a_-", l.residual_minus, 0.05);
  c.below("Clifford zero relation a_+", l.residual_plus, 0.05);
  const bool super = superminimality_test(a.report).verdict == SuperminimalVerdict::superminimal;
  const ZeroRelation vs = zero_relation_check(ve.chi_M.value, ve.chi_Nf.value, 0.0, 0.0, super);
  c.require(vs.skipped, "Veronese zero relation skipped", vs.skipped);

  bool exact = true;
  for (int order : {1, 2, 3}) {
    const fixtures::ZeroOracle z = fixtures::zero_oracle(order, kN);
    const std::vector<ParamPoint> zeros = zero_candidates(z.a, 0.05 * max_abs(z.a));
    const ZeroCount N = zero_count_excised(z.a, MetricField::flat(z.a.patch()), zeros);
    const std::vector<ZeroOrder> w = zero_orders(z.c, zeros);
    long winding = 0;
    for (const ZeroOrder& o : w) winding += o.order;
    exact = exact && N.N.rounded == order && winding == N.N.rounded;
  }
  const RealField two = fixtures::two_zero_field(kN);
  exact = exact &&
          zero_count_excised(two, MetricField::flat(two.patch()), zero_candidates(two, 0.05 * max_abs(two))).N.rounded ==
              2;
  c.require(exact, "zero-count oracles N in {1, 2, 3} (+ two-zero field) match winding", exact);
  return c;
}

Criterion falsification(const fs::path& work) {
  Criterion c;
  const VerifyRun base = run_verify({"--catalog", "clifford", "--n", "256", "--jets", "fd"}, work / "baseline");
  const VerifyRun bad =
      run_verify({"--catalog", "clifford", "--n", "256", "--perturb", "1e-3", "--seed", "7"}, work / "perturbed");
  c.require(base.code == 0, "unperturbed FD verify exit 0", base.code);
  c.require(bad.code == 1, "perturbed verify exit 1", bad.code);
  if (bad.report.empty() || base.report.empty()) return c;
  c.above("minimality residual", check_value(bad, "minimality"), 1e-4);
  c.above("flatness / baseline", check_value(bad, "flatness") / check_value(base, "flatness"), 10.0);
  return c;
}

Criterion determinism(const fs::path& work) {
  Criterion c;
  const VerifyRun a = run_verify({"--catalog", "clifford", "--n", "256"}, work / "det");
  const VerifyRun b = run_verify({"--catalog", "clifford", "--n", "256"}, work / "det");
  c.require(!a.report.empty() && a.report == b.report, "byte-identical reports", a.report == b.report);
  return c;
}

}  // namespace

int main() {
  const fs::path work = fs::temp_directory_path() / "ms4_acceptance";
  fs::remove_all(work);

  const std::vector<std::pair<std::string, std::function<Criterion()>>> criteria = {
      {"Clifford invariants", clifford_invariants},
      {"Veronese invariants", veronese_invariants},
      {"Laplace identity for log a_pm", laplace_identity},
      {"connection forms: formula vs direct", connection_forms_check},
      {"flatness and reconstruction", flatness_and_reconstruction},
      {"monodromy dichotomy", monodromy_dichotomy},
      {"topology suite", topology_suite},
      {"falsification", [&] { return falsification(work); }},
      {"determinism", [&] { return determinism(work); }},
  };

  int failed = 0;
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    Criterion c;
    try {
      c = criteria[k].second();
    } catch (const std::exception& e) {
      c.require(false, std::string("exception: ") + e.what(), 0.0);
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %zu %s (%.1fs): %s\n", c.pass() ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(), secs,
                c.detail().c_str());
    std::fflush(stdout);
    if (!c.pass()) ++failed;
  }
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%d of %zu criteria passed in %.1fs\n", static_cast<int>(criteria.size()) - failed, criteria.size(),
              total);
  fs::remove_all(work);
  return failed;
}
