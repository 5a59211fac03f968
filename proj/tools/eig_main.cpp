// SPDX-License-Identifier: MIT
//
// eig: mixed finite element solver for the Stokes eigenvalue problem in
// pseudostress form.  `eig run` executes a convergence study over a mesh
// ladder, compares the fitted orders and extrapolated eigenvalues against
// the embedded reference tables, and writes CSV and JSON artifacts.
//
// Exit codes: 0 success, 1 execution or configuration error, 2 finished but
// disagreed with the reference data.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Core>

#include "stokeseig/config.hpp"

namespace {

using namespace stokeseig;

struct CliFlags {
  std::string preset, config, domain, family, formulation, solver, output;
  int k = -1, nev = -1;
  double mu = -1;
  std::vector<int> levels;
};

int run_command(const CliFlags& fl) {
  std::vector<RunConfig> runs;
  std::vector<std::string> warnings;

  if (!fl.preset.empty() && !fl.config.empty()) {
    std::cerr << "eig: choose either --preset or --config, not both\n";
    return 1;
  }
  if (!fl.preset.empty()) {
    runs = preset_runs(fl.preset);
    if (runs.empty()) {
      std::cerr << "eig: unknown preset \"" << fl.preset
                << "\" (expected table1..table7)\n";
      return 1;
    }
  } else if (!fl.config.empty()) {
    try {
      runs.push_back(load_config_file(fl.config));
    } catch (const ConfigError& e) {
      std::cerr << "eig: " << e.what() << "\n";
      return 1;
    }
  } else {
    runs.emplace_back();  // defaults, to be filled from flags
  }

  ConfigOverrides o;
  std::vector<std::string> flag_errors;
  if (!fl.domain.empty()) {
    if (auto d = parse_domain(fl.domain))
      o.domain = *d;
    else
      flag_errors.push_back("--domain must be square, lshape or disk");
  }
  if (!fl.family.empty()) {
    if (auto f = parse_family(fl.family))
      o.family = *f;
    else
      flag_errors.push_back("--family must be rt or bdm");
  }
  if (!fl.formulation.empty()) {
    if (auto f = parse_formulation(fl.formulation))
      o.formulation = *f;
    else
      flag_errors.push_back("--formulation must be full or reduced");
  }
  if (!fl.solver.empty()) {
    if (auto s = parse_solver(fl.solver))
      o.solver = *s;
    else
      flag_errors.push_back("--solver must be auto, dense or shiftinvert");
  }
  if (fl.k >= 0) o.k = fl.k;
  if (fl.nev >= 0) o.nev = fl.nev;
  if (fl.mu >= 0) o.mu = fl.mu;
  if (!fl.levels.empty()) o.levels = fl.levels;
  if (!fl.output.empty()) o.output_dir = fl.output;
  if (!flag_errors.empty()) {
    std::cerr << "eig: invalid flags:\n";
    for (const auto& e : flag_errors) std::cerr << "  - " << e << "\n";
    return 1;
  }
  // only a preset or config file can be "overridden"; a flags-only run just
  // fills in the defaults
  const bool started_from_preset = !fl.preset.empty() || !fl.config.empty();
  std::vector<std::string> ignored;
  apply_overrides(runs, o, started_from_preset ? warnings : ignored);
  for (const auto& w : warnings) std::cerr << "eig: warning: " << w << "\n";

  std::vector<std::string> validation;
  for (const auto& run : runs)
    for (const auto& e : validate(run))
      validation.push_back(scheme_slug(run.study) + ": " + e);
  if (!validation.empty()) {
    std::cerr << "eig: invalid configuration:\n";
    for (const auto& e : validation) std::cerr << "  - " << e << "\n";
    return 1;
  }

  bool comparison_failed = false;
  for (const auto& run : runs) {
    ConvergenceReport rep;
    try {
      rep = run_convergence_study(run.study);
    } catch (const std::exception& e) {
      std::cerr << "eig: " << scheme_slug(run.study) << ": " << e.what()
                << "\n";
      return 1;
    }

    const ReferenceBlock* ref =
        find_reference(run.study.domain, run.study.family, run.study.k,
                       run.study.formulation);
    CompareOutcome cmp;
    const bool have_ref = ref != nullptr;
    if (have_ref) cmp = compare_reference(rep, *ref, resolve_tolerances(run));

    const std::string slug = scheme_slug(run.study);
    try {
      std::filesystem::create_directories(run.output_dir);
      const auto base = std::filesystem::path(run.output_dir) / slug;
      std::ofstream csv(base.string() + ".csv");
      write_csv(rep, csv);
      std::ofstream js(base.string() + ".json");
      js << summary_json(rep, have_ref ? &cmp : nullptr).dump(2) << "\n";
      if (!csv || !js) throw std::runtime_error("write failed");
    } catch (const std::exception& e) {
      std::cerr << "eig: " << slug << ": cannot write artifacts to \""
                << run.output_dir << "\": " << e.what() << "\n";
      return 1;
    }

    std::cout << slug << ": " << rep.levels.size() << " levels";
    if (!rep.fits.empty() && std::isfinite(rep.fits[0].order)) {
      char buf[96];
      std::snprintf(buf, sizeof buf, ", mode 1 order %.2f extrapolated %.5f",
                    rep.fits[0].order, rep.fits[0].extrapolated);
      std::cout << buf;
    }
    if (!have_ref) {
      std::cout << ", no reference data\n";
    } else if (cmp.passed) {
      std::cout << ", reference comparison passed";
      if (!cmp.advisories.empty())
        std::cout << " (" << cmp.advisories.size() << " advisory notes)";
      std::cout << "\n";
    } else {
      comparison_failed = true;
      std::cout << ", reference comparison FAILED\n";
      for (const auto& f : cmp.failures) std::cout << "    " << f << "\n";
    }
    for (const auto& w : rep.warnings)
      std::cerr << "eig: warning: " << slug << ": " << w << "\n";
  }
  return comparison_failed ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* threads = std::getenv("EIG_THREADS")) {
    const int n = std::atoi(threads);
    if (n >= 1)
      Eigen::setNbThreads(n);
    else
      std::cerr << "eig: warning: ignoring invalid EIG_THREADS value\n";
  }

  CLI::App app{"Stokes eigenvalue studies with H(div) mixed elements"};
  app.require_subcommand(1);
  CliFlags fl;
  CLI::App* run = app.add_subcommand("run", "run a convergence study");
  run->add_option("--preset", fl.preset,
                  "reproduce a published study (table1..table7)");
  run->add_option("--config", fl.config, "flat JSON config file");
  run->add_option("--domain", fl.domain, "square, lshape or disk");
  run->add_option("--family", fl.family, "rt or bdm");
  run->add_option("--k", fl.k, "polynomial degree (0, 1 or 2)");
  run->add_option("--formulation", fl.formulation, "full or reduced");
  run->add_option("--levels", fl.levels, "mesh resolutions, comma separated")
      ->delimiter(',');
  run->add_option("--nev", fl.nev, "number of eigenvalues to track");
  run->add_option("--mu", fl.mu, "viscosity");
  run->add_option("--solver", fl.solver, "auto, dense or shiftinvert");
  run->add_option("--output", fl.output, "artifact directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  try {
    return run_command(fl);
  } catch (const std::exception& e) {
    std::cerr << "eig: " << e.what() << "\n";
    return 1;
  }
}
