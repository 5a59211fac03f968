// SPDX-License-Identifier: MIT
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "stokeseig/eigsolve.hpp"
#include "stokeseig/reference_tables.hpp"

namespace stokeseig {

// ---------------------------------------------------------------------------
// least-squares order fit
// ---------------------------------------------------------------------------

struct OrderFit {
  double order = 0;          // t, or +inf when the data is exactly constant
  double extrapolated = 0;   // fitted h -> 0 limit
  double residual = 0;       // sum of squared deviations at the optimum
};

// Fit lambda(h) = extr + C h^t by least squares: a deterministic outer search
// on t in [0.25, 10] (coarse grid, then golden-section refinement to well
// below the 1e-4 contract tolerance) around an inner closed-form linear fit
// for (extr, C).
inline OrderFit fit_order(const std::vector<std::pair<double, double>>& levels) {
  const int n = static_cast<int>(levels.size());
  if (n < 3) throw std::invalid_argument("fit_order: need at least 3 levels");
  {
    std::vector<double> hs;
    for (auto& [h, lam] : levels) {
      if (!(h > 0)) throw std::invalid_argument("fit_order: h must be positive");
      hs.push_back(h);
    }
    std::sort(hs.begin(), hs.end());
    if (std::adjacent_find(hs.begin(), hs.end()) != hs.end())
      throw std::invalid_argument("fit_order: levels must have distinct h");
  }

  bool all_equal = true;
  for (auto& [h, lam] : levels) all_equal &= lam == levels.front().second;
  if (all_equal)
    return {std::numeric_limits<double>::infinity(), levels.front().second, 0.0};

  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) y(i) = levels[i].second;

  Eigen::Vector2d beta;
  auto sse = [&](double t) {
    Eigen::MatrixXd X(n, 2);
    for (int i = 0; i < n; ++i) {
      X(i, 0) = 1.0;
      X(i, 1) = std::pow(levels[i].first, t);
    }
    beta = X.colPivHouseholderQr().solve(y);
    return (X * beta - y).squaredNorm();
  };

  constexpr double tlo = 0.25, thi = 10.0;
  constexpr int ngrid = 2001;
  int best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  for (int i = 0; i < ngrid; ++i) {
    const double t = tlo + (thi - tlo) * i / (ngrid - 1);
    const double v = sse(t);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  double a = tlo + (thi - tlo) * std::max(0, best - 1) / (ngrid - 1);
  double b = tlo + (thi - tlo) * std::min(ngrid - 1, best + 1) / (ngrid - 1);
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  while (b - a > 1e-6) {
    if (sse(c) < sse(d)) {
      b = d;
      d = c;
      c = b - gr * (b - a);
    } else {
      a = c;
      c = d;
      d = a + gr * (b - a);
    }
  }
  OrderFit fit;
  fit.order = 0.5 * (a + b);
  fit.residual = sse(fit.order);
  fit.extrapolated = beta(0);
  return fit;
}

// ---------------------------------------------------------------------------
// pressure recovery
// ---------------------------------------------------------------------------

// Elementwise L2 projection of -tr(sigma_h)/2 onto the discontinuous
// pressure space.  With the orthonormal reference basis the cell mass matrix
// is detJ/2 times identity, so the projection is two weighted sums per basis
// function and the Jacobian cancels.
inline Eigen::VectorXd recover_pressure(const Eigen::VectorXd& sigma_coef,
                                        const FeSpace& sigma,
                                        const FeSpace& pressure) {
  if (sigma.kind != FeSpace::Kind::pseudostress)
    throw std::invalid_argument("recover_pressure: first space must hold the tensor");
  if (pressure.kind != FeSpace::Kind::pressure)
    throw std::invalid_argument("recover_pressure: second space must be scalar");
  if (sigma.mesh != pressure.mesh)
    throw std::invalid_argument("recover_pressure: spaces on different meshes");
  if (sigma_coef.size() != sigma.ndof)
    throw std::invalid_argument("recover_pressure: coefficient size mismatch");
  if (sigma.basis.rule.size() != pressure.basis.rule.size())
    throw std::invalid_argument("recover_pressure: spaces must share a quadrature rule");

  const Mesh& mesh = *sigma.mesh;
  const auto& rule = sigma.basis.rule;
  const int dim = sigma.basis.dim;
  const int pdim = pressure.basis.dim;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(pressure.ndof);
  for (int cell = 0; cell < mesh.num_cells(); ++cell) {
    auto phys = piola_push(mesh.cell_coords(cell), sigma.basis);
    const auto& sdofs = sigma.cell_dofs[cell];
    for (int q = 0; q < rule.size(); ++q) {
      double trace = 0;
      for (int r = 0; r < 2; ++r)
        for (int b = 0; b < dim; ++b) {
          const auto& [g, sign] = sdofs[r * dim + b];
          trace += sign * sigma_coef(g) * phys.values[q][b][r];
        }
      const double f = -0.5 * trace;
      for (int j = 0; j < pdim; ++j)
        out(pressure.cell_dofs[cell][j].first) +=
            2.0 * rule.weights[q] * f * pressure.basis.scalar_values[q][j];
    }
  }
  return out;
}

// L2 norm of a discontinuous scalar field; diagonal mass, detJ/2 per entry.
inline double scalar_l2_norm(const FeSpace& space, const Eigen::VectorXd& coef) {
  if (coef.size() != space.ndof)
    throw std::invalid_argument("scalar_l2_norm: coefficient size mismatch");
  const Mesh& mesh = *space.mesh;
  double acc = 0;
  for (int cell = 0; cell < mesh.num_cells(); ++cell) {
    const double w = signed_area(mesh.cell_coords(cell));  // = detJ / 2
    for (const auto& [g, sign] : space.cell_dofs[cell]) acc += w * coef(g) * coef(g);
  }
  return std::sqrt(acc);
}

// ---------------------------------------------------------------------------
// convergence studies
// ---------------------------------------------------------------------------

struct StudyConfig {
  Domain domain = Domain::square;
  Family family = Family::rt;
  int k = 0;
  Formulation formulation = Formulation::full;
  std::vector<int> levels;
  int nev = 5;
  double mu = 0.5;
  SolverKind solver = SolverKind::automatic;
};

struct StudyLevel {
  int N = 0;
  double h = 0;
  std::vector<double> lambdas;
};

struct ConvergenceReport {
  StudyConfig config;
  std::vector<StudyLevel> levels;              // sorted by decreasing h
  std::vector<OrderFit> fits;                  // one per eigenvalue index
  std::vector<std::vector<double>> rel_errors; // [level][index], vs our extr
  std::vector<std::string> warnings;
};

inline Mesh make_domain_mesh(Domain domain, int N) {
  switch (domain) {
    case Domain::square: return unit_square_mesh(N);
    case Domain::lshape: return lshape_mesh(N);
    default: return disk_mesh(N);
  }
}

inline const char* family_slug(Family f) { return f == Family::rt ? "rt" : "bdm"; }

inline std::string scheme_slug(const StudyConfig& cfg) {
  std::string s = domain_name(cfg.domain);
  s += '_';
  s += family_slug(cfg.family);
  s += "_k" + std::to_string(cfg.k) + "_";
  s += formulation_name(cfg.formulation);
  return s;
}

inline ConvergenceReport run_convergence_study(const StudyConfig& cfg) {
  if (cfg.levels.empty())
    throw std::invalid_argument("study: at least one level required");
  if (cfg.nev < 1) throw std::invalid_argument("study: nev must be >= 1");
  if (!(cfg.mu > 0)) throw std::invalid_argument("study: mu must be positive");

  ConvergenceReport rep;
  rep.config = cfg;
  std::vector<int> Ns = cfg.levels;
  std::sort(Ns.begin(), Ns.end());
  if (Ns.front() <= 0)
    throw std::invalid_argument("study: levels must be positive");
  if (std::adjacent_find(Ns.begin(), Ns.end()) != Ns.end())
    throw std::invalid_argument("study: levels must be distinct");
  rep.config.levels = Ns;

  for (int N : Ns) {
    Mesh mesh = make_domain_mesh(cfg.domain, N);
    EigSystem sys =
        build_eig_system(mesh, cfg.family, cfg.k, cfg.formulation, cfg.mu);
    Spectrum sp;
    try {
      sp = solve_generalized(sys, cfg.nev, cfg.solver);
    } catch (const std::exception& e) {
      throw std::runtime_error("study: level N=" + std::to_string(N) + ": " +
                               e.what());
    }
    if (sp.nev_converged < cfg.nev)
      throw std::runtime_error(
          "study: level N=" + std::to_string(N) + ": only " +
          std::to_string(sp.nev_converged) + " of " +
          std::to_string(cfg.nev) + " eigenvalues converged");
    StudyLevel lev;
    lev.N = N;
    lev.h = 1.0 / N;
    lev.lambdas.assign(sp.eigenvalues.begin(),
                       sp.eigenvalues.begin() + cfg.nev);
    rep.levels.push_back(std::move(lev));
    for (const auto& w : sp.warnings)
      rep.warnings.push_back("N=" + std::to_string(N) + ": " + w);
  }

  const bool can_fit = rep.levels.size() >= 3;
  if (!can_fit) rep.warnings.push_back("fewer than 3 levels: orders not fitted");
  for (int i = 0; i < cfg.nev; ++i) {
    OrderFit fit;
    if (can_fit) {
      std::vector<std::pair<double, double>> pts;
      for (const auto& lev : rep.levels) pts.emplace_back(lev.h, lev.lambdas[i]);
      fit = fit_order(pts);
    } else {
      fit.order = std::numeric_limits<double>::quiet_NaN();
      fit.extrapolated = rep.levels.back().lambdas[i];
    }
    rep.fits.push_back(fit);
  }
  for (const auto& lev : rep.levels) {
    std::vector<double> errs(cfg.nev);
    for (int i = 0; i < cfg.nev; ++i)
      errs[i] = std::abs(lev.lambdas[i] - rep.fits[i].extrapolated) /
                std::abs(rep.fits[i].extrapolated);
    rep.rel_errors.push_back(std::move(errs));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// reference comparison
// ---------------------------------------------------------------------------

struct CompareTolerances {
  double tol_extr = 0.002;  // relative, binding for every mode
  double tol_order = 0.3;   // absolute, binding for the headline mode
  double tol_level = 0.01;  // relative, advisory (mesh-dependent values)
};

inline CompareTolerances default_tolerances(Domain domain) {
  CompareTolerances tol;
  // the published extrapolations on the corner-singular domain disagree with
  // each other at the half-percent scale, so the band is wider there
  if (domain == Domain::lshape) tol.tol_extr = 0.01;
  return tol;
}

struct CompareOutcome {
  bool passed = true;                   // binding checks only
  std::vector<std::string> failures;    // binding mismatches
  std::vector<std::string> advisories;  // per-level and informational diffs
};

namespace detail {

inline std::string fmtf(const char* fmt, double a, double b, double c) {
  char buf[160];
  std::snprintf(buf, sizeof buf, fmt, a, b, c);
  return buf;
}

}  // namespace detail

// Binding checks: extrapolated values for every tracked mode, and the fitted
// order of the first mode on the convex domains at k <= 1.  Everything else
// (orders of higher modes, orders at k = 2, orders on the corner-singular
// domain, per-level raw values on meshes the reference does not record)
// is reported informationally.
inline CompareOutcome compare_reference(const ConvergenceReport& rep,
                                        const ReferenceBlock& ref,
                                        CompareTolerances tol) {
  CompareOutcome out;
  const int nmodes =
      std::min<int>(static_cast<int>(rep.fits.size()), ref.rows.size());
  for (int i = 0; i < nmodes; ++i) {
    const auto& row = ref.rows[i];
    const double extr_diff =
        std::abs(rep.fits[i].extrapolated - row.extr) / std::abs(row.extr);
    if (extr_diff > tol.tol_extr) {
      out.passed = false;
      out.failures.push_back(
          "mode " + std::to_string(i + 1) +
          detail::fmtf(": extrapolated %.6f vs reference %.6f (rel %.2e)",
                       rep.fits[i].extrapolated, row.extr, extr_diff));
    }
    const bool order_binding = i == 0 && rep.config.domain != Domain::lshape &&
                               rep.config.k <= 1;
    const double order_diff = std::abs(rep.fits[i].order - row.order);
    if (!(order_diff <= tol.tol_order)) {  // NaN-safe: 2-level reports fail
      std::string msg =
          "mode " + std::to_string(i + 1) +
          detail::fmtf(": order %.3f vs reference %.3f (diff %.3f)",
                       rep.fits[i].order, row.order, order_diff);
      if (order_binding) {
        out.passed = false;
        out.failures.push_back(std::move(msg));
      } else {
        out.advisories.push_back("informational " + std::move(msg));
      }
    }
  }
  for (const auto& lev : rep.levels) {
    const auto* pos = std::find(ref.levels.begin(), ref.levels.end(), lev.N);
    if (pos == ref.levels.end()) continue;
    const int col = static_cast<int>(pos - ref.levels.begin());
    for (int i = 0; i < nmodes; ++i) {
      const double refval = ref.rows[i].lambda[col];
      const double diff = std::abs(lev.lambdas[i] - refval) / std::abs(refval);
      if (diff > tol.tol_level)
        out.advisories.push_back(
            "level N=" + std::to_string(lev.N) + " mode " +
            std::to_string(i + 1) +
            detail::fmtf(": %.6f vs reference %.6f (rel %.2e)", lev.lambdas[i],
                         refval, diff));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// spectral inclusion check
// ---------------------------------------------------------------------------

struct SpuriousCheck {
  bool ok = true;
  std::string detail;
};

// True iff the computed values below Lambda and the reference values below
// Lambda match one-to-one (sorted, with multiplicity) within tol relative.
inline SpuriousCheck check_spurious_free(std::vector<double> computed,
                                         std::vector<double> reference,
                                         double Lambda, double tol) {
  auto trim = [Lambda](std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::find_if(v.begin(), v.end(),
                         [Lambda](double x) { return x >= Lambda; }),
            v.end());
  };
  trim(computed);
  trim(reference);

  SpuriousCheck res;
  std::size_t i = 0, j = 0;
  char buf[128];
  while (i < computed.size() && j < reference.size()) {
    if (std::abs(computed[i] - reference[j]) <= tol * std::abs(reference[j])) {
      ++i;
      ++j;
      continue;
    }
    res.ok = false;
    if (computed[i] < reference[j])
      std::snprintf(buf, sizeof buf,
                    "computed value %.6g matches no reference entry", computed[i]);
    else
      std::snprintf(buf, sizeof buf,
                    "reference value %.6g has no computed partner", reference[j]);
    res.detail = buf;
    return res;
  }
  if (i < computed.size()) {
    res.ok = false;
    std::snprintf(buf, sizeof buf,
                  "extra computed value %.6g below the cutoff", computed[i]);
    res.detail = buf;
  } else if (j < reference.size()) {
    res.ok = false;
    std::snprintf(buf, sizeof buf,
                  "reference value %.6g was not computed", reference[j]);
    res.detail = buf;
  }
  return res;
}

// ---------------------------------------------------------------------------
// artifacts: CSV rows and JSON summary
// ---------------------------------------------------------------------------

inline void write_csv(const ConvergenceReport& rep, std::ostream& os) {
  os << "domain,family,k,formulation,N,h,i,lambda_h\n";
  char buf[192];
  const auto& cfg = rep.config;
  for (const auto& lev : rep.levels)
    for (std::size_t i = 0; i < lev.lambdas.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%s,%s,%d,%s,%d,%.17g,%zu,%.17g\n",
                    domain_name(cfg.domain), family_slug(cfg.family), cfg.k,
                    formulation_name(cfg.formulation), lev.N, lev.h, i + 1,
                    lev.lambdas[i]);
      os << buf;
    }
}

inline nlohmann::json summary_json(const ConvergenceReport& rep,
                                   const CompareOutcome* cmp) {
  nlohmann::json j;
  const auto& cfg = rep.config;
  j["scheme"] = {{"domain", domain_name(cfg.domain)},
                 {"family", family_slug(cfg.family)},
                 {"k", cfg.k},
                 {"formulation", formulation_name(cfg.formulation)},
                 {"mu", cfg.mu},
                 {"nev", cfg.nev}};
  j["levels"] = nlohmann::json::array();
  for (const auto& lev : rep.levels)
    j["levels"].push_back({{"N", lev.N}, {"h", lev.h}, {"lambda", lev.lambdas}});
  j["fits"] = nlohmann::json::array();
  for (const auto& f : rep.fits) {
    nlohmann::json jf = {{"extrapolated", f.extrapolated},
                         {"residual", f.residual}};
    if (std::isfinite(f.order))
      jf["order"] = f.order;
    else
      jf["order"] = "inf";
    j["fits"].push_back(std::move(jf));
  }
  j["relative_errors"] = rep.rel_errors;
  j["warnings"] = rep.warnings;
  if (cmp) {
    j["comparison"] = {{"status", cmp->passed ? "pass" : "fail"},
                       {"failures", cmp->failures},
                       {"advisories", cmp->advisories}};
  } else {
    j["comparison"] = {{"status", "none"}};
  }
  return j;
}

}  // namespace stokeseig
