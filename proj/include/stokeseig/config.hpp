// SPDX-License-Identifier: MIT
#pragma once

#include <fstream>
#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "stokeseig/study.hpp"

namespace stokeseig {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One CLI invocation: a study plus artifact destination and optional
// tolerance overrides for the reference comparison (values <= 0 keep the
// domain defaults).
struct RunConfig {
  StudyConfig study;
  std::string output_dir = "eig_out";
  double tol_extr = -1;
  double tol_order = -1;
  double tol_level = -1;
};

inline CompareTolerances resolve_tolerances(const RunConfig& cfg) {
  CompareTolerances tol = default_tolerances(cfg.study.domain);
  if (cfg.tol_extr > 0) tol.tol_extr = cfg.tol_extr;
  if (cfg.tol_order > 0) tol.tol_order = cfg.tol_order;
  if (cfg.tol_level > 0) tol.tol_level = cfg.tol_level;
  return tol;
}

inline const char* solver_name(SolverKind s) {
  switch (s) {
    case SolverKind::dense: return "dense";
    case SolverKind::krylov: return "shiftinvert";
    default: return "auto";
  }
}

inline std::optional<Domain> parse_domain(const std::string& s) {
  if (s == "square") return Domain::square;
  if (s == "lshape") return Domain::lshape;
  if (s == "disk" || s == "circle") return Domain::disk;
  return std::nullopt;
}

inline std::optional<Family> parse_family(const std::string& s) {
  if (s == "rt") return Family::rt;
  if (s == "bdm") return Family::bdm;
  return std::nullopt;
}

inline std::optional<Formulation> parse_formulation(const std::string& s) {
  if (s == "full") return Formulation::full;
  if (s == "reduced") return Formulation::reduced;
  return std::nullopt;
}

inline std::optional<SolverKind> parse_solver(const std::string& s) {
  if (s == "auto") return SolverKind::automatic;
  if (s == "dense") return SolverKind::dense;
  if (s == "shiftinvert") return SolverKind::krylov;
  return std::nullopt;
}

// Semantic validation; returns every problem so the caller can report one
// aggregated diagnostic instead of failing field by field.
inline std::vector<std::string> validate(const RunConfig& cfg) {
  std::vector<std::string> errs;
  if (cfg.study.k < 0 || cfg.study.k > 2)
    errs.push_back("k must be 0, 1 or 2");
  if (cfg.study.levels.empty()) {
    errs.push_back("levels must be a non-empty list");
  } else {
    for (int N : cfg.study.levels)
      if (N < 1) {
        errs.push_back("levels must be positive integers");
        break;
      }
    std::set<int> uniq(cfg.study.levels.begin(), cfg.study.levels.end());
    if (uniq.size() != cfg.study.levels.size())
      errs.push_back("levels must be distinct");
  }
  if (cfg.study.nev < 1) errs.push_back("nev must be >= 1");
  if (!(cfg.study.mu > 0)) errs.push_back("mu must be positive");
  if (cfg.output_dir.empty()) errs.push_back("output_dir must not be empty");
  return errs;
}

// Flat JSON object with exactly the RunConfig fields; unknown keys are
// rejected so typos cannot silently fall back to defaults.
inline RunConfig load_config(std::istream& in, const std::string& origin) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError(origin + ": expected a JSON object");

  RunConfig cfg;
  std::vector<std::string> errs;
  auto bad_type = [&errs](const std::string& key, const char* want) {
    errs.push_back("key \"" + key + "\" must be " + want);
  };
  for (const auto& [key, val] : j.items()) {
    if (key == "domain" || key == "family" || key == "formulation" ||
        key == "solver" || key == "output_dir") {
      if (!val.is_string()) {
        bad_type(key, "a string");
        continue;
      }
      const std::string s = val.get<std::string>();
      if (key == "domain") {
        if (auto d = parse_domain(s))
          cfg.study.domain = *d;
        else
          errs.push_back("domain must be square, lshape or disk");
      } else if (key == "family") {
        if (auto f = parse_family(s))
          cfg.study.family = *f;
        else
          errs.push_back("family must be rt or bdm");
      } else if (key == "formulation") {
        if (auto f = parse_formulation(s))
          cfg.study.formulation = *f;
        else
          errs.push_back("formulation must be full or reduced");
      } else if (key == "solver") {
        if (auto sv = parse_solver(s))
          cfg.study.solver = *sv;
        else
          errs.push_back("solver must be auto, dense or shiftinvert");
      } else {
        cfg.output_dir = s;
      }
    } else if (key == "k" || key == "nev") {
      if (!val.is_number_integer()) {
        bad_type(key, "an integer");
        continue;
      }
      (key == "k" ? cfg.study.k : cfg.study.nev) = val.get<int>();
    } else if (key == "levels") {
      if (!val.is_array()) {
        bad_type(key, "an array of integers");
        continue;
      }
      bool ok = true;
      for (const auto& e : val) ok &= e.is_number_integer();
      if (!ok) {
        bad_type(key, "an array of integers");
        continue;
      }
      cfg.study.levels = val.get<std::vector<int>>();
    } else if (key == "mu" || key == "tol_extr" || key == "tol_order" ||
               key == "tol_level") {
      if (!val.is_number()) {
        bad_type(key, "a number");
        continue;
      }
      const double x = val.get<double>();
      if (key == "mu")
        cfg.study.mu = x;
      else if (key == "tol_extr")
        cfg.tol_extr = x;
      else if (key == "tol_order")
        cfg.tol_order = x;
      else
        cfg.tol_level = x;
    } else {
      errs.push_back("unknown key \"" + key + "\"");
    }
  }
  for (auto& e : validate(cfg)) errs.push_back(std::move(e));
  if (!errs.empty()) {
    std::string msg = origin + ": invalid config:";
    for (const auto& e : errs) msg += "\n  - " + e;
    throw ConfigError(msg);
  }
  return cfg;
}

inline RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  return load_config(in, path);
}

// Presets mirror the published 2D studies one-to-one: the square ladders at
// N = {10,20,30,40} for k = 0,1,2 in both formulations and families, the
// disk ladders at N = {20,30,40,50}, and the L-shape ladder at
// N = {9,15,20,35} for both families at k = 0.
inline std::vector<RunConfig> preset_runs(const std::string& name) {
  auto make = [](Domain d, Family f, int k, Formulation form,
                 std::vector<int> levels) {
    RunConfig cfg;
    cfg.study.domain = d;
    cfg.study.family = f;
    cfg.study.k = k;
    cfg.study.formulation = form;
    cfg.study.levels = std::move(levels);
    return cfg;
  };
  const std::vector<int> square{10, 20, 30, 40};
  const std::vector<int> disk{20, 30, 40, 50};
  const std::vector<int> lshape{9, 15, 20, 35};
  std::vector<RunConfig> runs;
  if (name == "table1" || name == "table2") {
    const auto form =
        name == "table1" ? Formulation::full : Formulation::reduced;
    for (int k = 0; k <= 2; ++k)
      runs.push_back(make(Domain::square, Family::rt, k, form, square));
  } else if (name == "table3" || name == "table4") {
    const auto form =
        name == "table3" ? Formulation::full : Formulation::reduced;
    for (int k = 0; k <= 2; ++k)
      runs.push_back(make(Domain::square, Family::bdm, k, form, square));
  } else if (name == "table5") {
    for (int k = 0; k <= 2; ++k)
      runs.push_back(make(Domain::disk, Family::rt, k, Formulation::full, disk));
  } else if (name == "table6") {
    for (int k = 0; k <= 2; ++k)
      runs.push_back(make(Domain::disk, Family::bdm, k, Formulation::full, disk));
  } else if (name == "table7") {
    runs.push_back(make(Domain::lshape, Family::rt, 0, Formulation::full, lshape));
    runs.push_back(make(Domain::lshape, Family::bdm, 0, Formulation::full, lshape));
  }
  return runs;
}

// Explicit flags; set fields win over preset or config-file values.
struct ConfigOverrides {
  std::optional<Domain> domain;
  std::optional<Family> family;
  std::optional<int> k;
  std::optional<Formulation> formulation;
  std::optional<std::vector<int>> levels;
  std::optional<int> nev;
  std::optional<double> mu;
  std::optional<SolverKind> solver;
  std::optional<std::string> output_dir;
};

inline void apply_overrides(std::vector<RunConfig>& runs,
                            const ConfigOverrides& o,
                            std::vector<std::string>& warnings) {
  auto apply = [&](auto member, const auto& value, const char* flag) {
    bool clashed = false;
    for (auto& run : runs) {
      if (std::invoke(member, run) != value) clashed = true;
      std::invoke(member, run) = value;
    }
    if (clashed)
      warnings.push_back(std::string(flag) + " overrides the preset value");
  };
  if (o.domain) apply([](RunConfig& c) -> Domain& { return c.study.domain; },
                      *o.domain, "--domain");
  if (o.family) apply([](RunConfig& c) -> Family& { return c.study.family; },
                      *o.family, "--family");
  if (o.k) apply([](RunConfig& c) -> int& { return c.study.k; }, *o.k, "--k");
  if (o.formulation)
    apply([](RunConfig& c) -> Formulation& { return c.study.formulation; },
          *o.formulation, "--formulation");
  if (o.levels)
    apply([](RunConfig& c) -> std::vector<int>& { return c.study.levels; },
          *o.levels, "--levels");
  if (o.nev) apply([](RunConfig& c) -> int& { return c.study.nev; }, *o.nev,
                   "--nev");
  if (o.mu) apply([](RunConfig& c) -> double& { return c.study.mu; }, *o.mu,
                  "--mu");
  if (o.solver)
    apply([](RunConfig& c) -> SolverKind& { return c.study.solver; }, *o.solver,
          "--solver");
  // the artifact directory is not a study parameter, so replacing it is
  // never worth a warning
  if (o.output_dir)
    for (auto& run : runs) run.output_dir = *o.output_dir;

  // overriding a field can collapse distinct preset entries into duplicates
  std::vector<RunConfig> unique;
  auto key = [](const RunConfig& c) {
    return std::make_tuple(c.study.domain, c.study.family, c.study.k,
                           c.study.formulation, c.study.levels, c.study.nev,
                           c.study.mu, c.study.solver);
  };
  for (auto& run : runs) {
    bool seen = false;
    for (const auto& u : unique) seen |= key(u) == key(run);
    if (!seen) unique.push_back(std::move(run));
  }
  runs = std::move(unique);
}

}  // namespace stokeseig
