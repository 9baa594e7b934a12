#include "ms4cli/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ms4/catalog.hpp"
#include "ms4/parallel.hpp"

namespace ms4::cli {

void RunConfig::validate() const {
  if (catalog.empty() == manifest.empty()) {
    throw ConfigError("E_CONFIG", "give exactly one of --catalog NAME or --manifest PATH");
  }
  if (!catalog.empty() && !is_catalog_name(catalog)) {
    throw SourceError("unknown catalog surface '" + catalog + "'");
  }
  if (n < 32 || n > 1024 || (n & (n - 1)) != 0) {
    throw ConfigError("E_CONFIG", "--n must be a power of two between 32 and 1024");
  }
  if (command == "monodromy" && scan < 64) {
    throw ConfigError("E_SCAN_TOO_COARSE", "--scan must be at least 64, got " + std::to_string(scan));
  }
  if (!(tol_close > 0.0) || !std::isfinite(tol_close)) {
    throw ConfigError("E_CONFIG", "--tol-close must be positive");
  }
  if (!(perturb >= 0.0) || !std::isfinite(perturb)) {
    throw ConfigError("E_CONFIG", "--perturb must be a non-negative number");
  }
  if (theta && !std::isfinite(*theta)) throw ConfigError("E_CONFIG", "--theta must be finite");
}

namespace {

void add_options(CLI::App& sub, RunConfig& cfg, std::string& jets) {
  auto* cat = sub.add_option("--catalog", cfg.catalog, "catalog surface: clifford, veronese, geodesic");
  auto* man = sub.add_option("--manifest", cfg.manifest, "sampled-immersion manifest (JSON)");
  cat->excludes(man);
  sub.add_option("--n", cfg.n, "catalog resolution (power of two, 32..1024)");
  sub.add_option("--theta", cfg.theta, "associated-family parameter");
  sub.add_option("--scan", cfg.scan, "number of theta samples in [0, 2pi)");
  sub.add_option("--tol-close", cfg.tol_close, "closing tolerance on d(theta)");
  sub.add_option("--perturb", cfg.perturb, "amplitude of a seeded normal perturbation");
  sub.add_option("--seed", cfg.seed, "perturbation seed");
  sub.add_option("--out", cfg.out, "output directory");
  sub.add_option("--jets", jets, "jet source override")->check(CLI::IsMember({"analytic", "fd"}));
  sub.add_option("--threads", cfg.threads, "worker threads (0: all cores)");
}

void report_error(const std::string& code, const std::string& message, const RunConfig& cfg,
                  std::ostream& err) {
  nlohmann::json j;
  j["error"] = {{"code", code}, {"message", message}};
  err << j.dump(2) << "\n";
  std::error_code ec;
  std::filesystem::create_directories(cfg.out, ec);
  if (!ec) {
    std::ofstream f(cfg.out / "error.json");
    if (f) f << j.dump(2) << "\n";
  }
}

int exit_code_for(const std::string& code) {
  if (code == "E_INTEGRABILITY" || code == "E_SUPERMINIMAL") return kIntegrity;
  return kUsage;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Minimal surfaces in S^4: local invariants, associated family, monodromy", "ms4"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string jets;
  for (const char* name : {"analyze", "deform", "monodromy", "verify"}) {
    CLI::App* sub = app.add_subcommand(name);
    add_options(*sub, cfg, jets);
  }
  app.get_subcommand("analyze")->description("local invariants, field CSVs and report.json");
  app.get_subcommand("deform")->description("integrate f_theta, export it and test congruence with f");
  app.get_subcommand("monodromy")->description("scan d(theta) over [0, 2pi) and locate the closing set");
  app.get_subcommand("verify")->description("run the invariant suite; exit 1 if any item fails");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    report_error("E_CONFIG", e.what(), cfg, err);
    return kUsage;
  }
  cfg.command = app.get_subcommands().front()->get_name();
  if (jets == "analytic") cfg.jets = JetPreference::analytic;
  if (jets == "fd") cfg.jets = JetPreference::finite_difference;

  try {
    cfg.validate();
    if (cfg.threads > 0) set_worker_count(cfg.threads);
    if (cfg.command == "analyze") return cmd_analyze(cfg);
    if (cfg.command == "deform") return cmd_deform(cfg);
    if (cfg.command == "monodromy") return cmd_monodromy(cfg);
    const int rc = cmd_verify(cfg);
    if (rc != kPass) {
      out << "verification failed; see " << (cfg.out / "report.json").string() << "\n";
    }
    return rc;
  } catch (const Error& e) {
    report_error(e.code(), e.what(), cfg, err);
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    report_error("E_INTERNAL", e.what(), cfg, err);
    return kIntegrity;
  }
}

}  // namespace ms4::cli
