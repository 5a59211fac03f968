// SPDX-License-Identifier: MIT
#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "stokeseig/quadrature.hpp"

namespace stokeseig {

namespace detail {

// Monomials x^a y^b of total degree <= D in degree-major order:
// 1, x, y, x^2, xy, y^2, ...  index(a,b) = (a+b)(a+b+1)/2 + b.
inline int nmono(int D) { return (D + 1) * (D + 2) / 2; }
inline int mono_index(int a, int b) {
  int L = a + b;
  return L * (L + 1) / 2 + b;
}

inline void mono_exponents(int D, std::vector<std::array<int, 2>>& out) {
  out.clear();
  for (int L = 0; L <= D; ++L)
    for (int b = 0; b <= L; ++b) out.push_back({L - b, b});
}

inline Eigen::VectorXd mono_values(int D, double x, double y) {
  Eigen::VectorXd v(nmono(D));
  std::vector<std::array<int, 2>> exps;
  mono_exponents(D, exps);
  for (int m = 0; m < v.size(); ++m) {
    double t = 1.0;
    for (int i = 0; i < exps[m][0]; ++i) t *= x;
    for (int i = 0; i < exps[m][1]; ++i) t *= y;
    v(m) = t;
  }
  return v;
}

// coefficient vector of the x- (c=0) or y- (c=1) derivative, one degree lower
inline Eigen::VectorXd mono_derivative(const Eigen::VectorXd& coef, int D,
                                       int c) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(nmono(D - 1 >= 0 ? D - 1 : 0));
  std::vector<std::array<int, 2>> exps;
  mono_exponents(D, exps);
  for (int m = 0; m < coef.size(); ++m) {
    auto [a, b] = exps[m];
    if (c == 0 && a > 0) out(mono_index(a - 1, b)) += a * coef(m);
    if (c == 1 && b > 0) out(mono_index(a, b - 1)) += b * coef(m);
  }
  return out;
}

// exact integral over the reference triangle of the product of two
// polynomials given by monomial coefficients
inline double poly_product_integral(const Eigen::VectorXd& f, int Df,
                                    const Eigen::VectorXd& g, int Dg) {
  std::vector<std::array<int, 2>> fe, ge;
  mono_exponents(Df, fe);
  mono_exponents(Dg, ge);
  double s = 0;
  for (int i = 0; i < f.size(); ++i) {
    if (f(i) == 0.0) continue;
    for (int j = 0; j < g.size(); ++j) {
      if (g(j) == 0.0) continue;
      s += f(i) * g(j) * monomial_integral(fe[i][0] + ge[j][0],
                                           fe[i][1] + ge[j][1]);
    }
  }
  return s;
}

inline Eigen::VectorXd poly_multiply(const Eigen::VectorXd& f, int Df,
                                     const Eigen::VectorXd& g, int Dg) {
  std::vector<std::array<int, 2>> fe, ge;
  mono_exponents(Df, fe);
  mono_exponents(Dg, ge);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(nmono(Df + Dg));
  for (int i = 0; i < f.size(); ++i)
    for (int j = 0; j < g.size(); ++j)
      out(mono_index(fe[i][0] + ge[j][0], fe[i][1] + ge[j][1])) +=
          f(i) * g(j);
  return out;
}

}  // namespace detail

// Shifted Legendre polynomial P~_j on [0,1]; orthogonal family used for the
// edge moments.  P~_j(1-s) = (-1)^j P~_j(s).
inline double legendre_shifted(int j, double s) {
  double t = 2.0 * s - 1.0;
  double p0 = 1.0, p1 = t;
  if (j == 0) return p0;
  if (j == 1) return p1;
  for (int n = 1; n < j; ++n) {
    double p2 = ((2 * n + 1) * t * p1 - n * p0) / (n + 1);
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

// Reference-triangle vertices and the canonical (low local index -> high)
// direction of each local edge; local edge i is opposite vertex i.
inline constexpr std::array<std::array<double, 2>, 3> ref_vertices = {
    {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}};
inline constexpr std::array<std::array<int, 2>, 3> ref_edge_ends = {
    {{1, 2}, {0, 2}, {0, 1}}};

struct DofMeta {
  enum class Kind { edge_moment, interior_moment };
  Kind kind = Kind::edge_moment;
  int edge = -1;    // local edge index (edge moments)
  int moment = -1;  // Legendre moment order along the edge
  int index = -1;   // ordinal among interior moments
};

// Nodal basis on the reference triangle, tabulated at quadrature points and
// carried as monomial coefficients for evaluation at arbitrary points.
struct ReferenceBasis {
  enum class Family { pk_scalar, rt, bdm };
  Family family = Family::pk_scalar;
  int degree = 0;  // polynomial degree parameter of the family
  int dim = 0;
  QuadRule rule;

  std::vector<std::vector<double>> scalar_values;          // [q][i], pk only
  std::vector<std::vector<std::array<double, 2>>> values;  // [q][i], H(div)
  std::vector<std::vector<double>> divs;                   // [q][i], H(div)
  std::vector<DofMeta> dof_meta;

  Eigen::MatrixXd coef_scalar;          // dim x nmono(degree)
  Eigen::MatrixXd coef_x, coef_y;       // dim x nmono(comp_degree)
  Eigen::MatrixXd coef_div;             // dim x nmono(comp_degree-1)
  int comp_degree = 0;                  // polynomial degree of components
  double functional_condition = 1.0;

  // monomial coefficients of the interior moment test fields, kept so that
  // interpolation operators can apply the defining functionals
  std::vector<std::array<Eigen::VectorXd, 2>> interior_tests;

  int n_edge_dofs() const {
    int n = 0;
    for (const auto& m : dof_meta)
      if (m.kind == DofMeta::Kind::edge_moment) ++n;
    return n;
  }

  Eigen::VectorXd eval_scalar(double x, double y) const {
    return coef_scalar * detail::mono_values(degree, x, y);
  }
  Eigen::Vector2d eval_interior_test(int m, double x, double y) const {
    const auto& t = interior_tests[m];
    const int d = static_cast<int>(
        std::round((std::sqrt(8.0 * t[0].size() + 1) - 3) / 2));
    Eigen::VectorXd mv = detail::mono_values(d, x, y);
    return {t[0].dot(mv), t[1].dot(mv)};
  }
  void eval_hdiv(double x, double y, Eigen::MatrixX2d& vals,
                 Eigen::VectorXd& div) const {
    Eigen::VectorXd m = detail::mono_values(comp_degree, x, y);
    vals.resize(dim, 2);
    vals.col(0) = coef_x * m;
    vals.col(1) = coef_y * m;
    div = coef_div * detail::mono_values(comp_degree - 1, x, y);
  }
};

// Orthogonal basis of P_k on the reference triangle, normalized so that
// int phi_i phi_j = delta_ij / 2; the first function is the constant 1,
// which makes physical mass matrices diagonal with entries |T|.
inline ReferenceBasis pk_basis(int k, const QuadRule& rule) {
  if (k < 0 || k > 3) throw std::invalid_argument("pk_basis: k must be in [0,3]");
  const int dim = detail::nmono(k);
  std::vector<std::array<int, 2>> exps;
  detail::mono_exponents(k, exps);

  Eigen::MatrixXd gram(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      gram(i, j) = monomial_integral(exps[i][0] + exps[j][0],
                                     exps[i][1] + exps[j][1]);
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("pk_basis: monomial Gram not SPD");
  Eigen::MatrixXd L = llt.matrixL();
  Eigen::MatrixXd coef = (1.0 / std::sqrt(2.0)) *
                         L.triangularView<Eigen::Lower>().solve(
                             Eigen::MatrixXd::Identity(dim, dim));

  ReferenceBasis basis;
  basis.family = ReferenceBasis::Family::pk_scalar;
  basis.degree = k;
  basis.dim = dim;
  basis.rule = rule;
  basis.coef_scalar = coef;
  basis.scalar_values.resize(rule.size());
  for (int q = 0; q < rule.size(); ++q) {
    Eigen::VectorXd v = basis.eval_scalar(rule.points[q][0], rule.points[q][1]);
    basis.scalar_values[q].assign(v.data(), v.data() + dim);
  }
  basis.dof_meta.resize(dim);
  for (int i = 0; i < dim; ++i)
    basis.dof_meta[i] = {DofMeta::Kind::interior_moment, -1, -1, i};
  return basis;
}

namespace detail {

// Applies the unnormalized edge flux moment
//   v |-> int_0^1 v(gamma(s)) . rot(T_e) Legendre_j(s) ds
// to a vector polynomial given by component coefficients.  gamma walks local
// edge `e` in its canonical direction and rot(T) = (T_y, -T_x); this choice
// makes the moment invariant under the contravariant Piola map, which is
// what allows interior edges to be glued with a plain sign.
inline double edge_flux_moment(const Eigen::VectorXd& cx,
                               const Eigen::VectorXd& cy, int comp_degree,
                               int edge, int j,
                               const std::vector<double>& gl_nodes,
                               const std::vector<double>& gl_weights) {
  const auto& A = ref_vertices[ref_edge_ends[edge][0]];
  const auto& B = ref_vertices[ref_edge_ends[edge][1]];
  const double Tx = B[0] - A[0], Ty = B[1] - A[1];
  double acc = 0;
  for (std::size_t q = 0; q < gl_nodes.size(); ++q) {
    const double s = gl_nodes[q];
    const double x = A[0] + s * Tx, y = A[1] + s * Ty;
    Eigen::VectorXd m = mono_values(comp_degree, x, y);
    const double vx = cx.dot(m), vy = cy.dot(m);
    acc += gl_weights[q] * (vx * Ty - vy * Tx) * legendre_shifted(j, s);
  }
  return acc;
}

struct SpanField {
  Eigen::VectorXd cx, cy;   // components over nmono(comp_degree)
  Eigen::VectorXd cdiv;     // over nmono(comp_degree-1)
};

inline ReferenceBasis build_hdiv_basis(ReferenceBasis::Family family, int k,
                                       const QuadRule& rule,
                                       const std::vector<SpanField>& span,
                                       int comp_degree) {
  const int dim = static_cast<int>(span.size());

  // defining functionals: per-edge Legendre flux moments of order 0..k,
  // then the family's interior moments
  std::vector<double> gl_nodes, gl_weights;
  gauss_legendre_01(comp_degree + 2, gl_nodes, gl_weights);

  ReferenceBasis basis;
  basis.family = family;
  basis.degree = k;
  basis.dim = dim;
  basis.rule = rule;
  basis.comp_degree = comp_degree;

  Eigen::MatrixXd D(dim, dim);
  int row = 0;
  for (int e = 0; e < 3; ++e)
    for (int j = 0; j <= k; ++j, ++row) {
      for (int s = 0; s < dim; ++s)
        D(row, s) = edge_flux_moment(span[s].cx, span[s].cy, comp_degree, e,
                                     j, gl_nodes, gl_weights);
      basis.dof_meta.push_back({DofMeta::Kind::edge_moment, e, j, -1});
    }

  std::vector<SpanField> tests;  // interior moment test fields
  if (family == ReferenceBasis::Family::rt) {
    if (k >= 1) {
      ReferenceBasis pkm1 = pk_basis(k - 1, rule);
      for (int c = 0; c < 2; ++c)
        for (int a = 0; a < pkm1.dim; ++a) {
          SpanField t;
          t.cx = Eigen::VectorXd::Zero(nmono(k - 1));
          t.cy = Eigen::VectorXd::Zero(nmono(k - 1));
          (c == 0 ? t.cx : t.cy) = pkm1.coef_scalar.row(a).transpose();
          tests.push_back(std::move(t));
        }
    }
  } else {
    // gradients of the nonconstant P_{k-1} functions...
    if (k >= 2) {
      ReferenceBasis pkm1 = pk_basis(k - 1, rule);
      for (int a = 1; a < pkm1.dim; ++a) {
        SpanField t;
        Eigen::VectorXd f = pkm1.coef_scalar.row(a).transpose();
        t.cx = mono_derivative(f, k - 1, 0);
        t.cy = mono_derivative(f, k - 1, 1);
        tests.push_back(std::move(t));
      }
    }
    // ...complemented by curls of the bubble times P_{k-2}
    if (k >= 2) {
      Eigen::VectorXd bubble = Eigen::VectorXd::Zero(nmono(3));
      bubble(mono_index(1, 1)) = 1.0;   // xy(1-x-y)
      bubble(mono_index(2, 1)) = -1.0;
      bubble(mono_index(1, 2)) = -1.0;
      ReferenceBasis pkm2 = pk_basis(k - 2, rule);
      for (int a = 0; a < pkm2.dim; ++a) {
        Eigen::VectorXd bq = poly_multiply(
            bubble, 3, pkm2.coef_scalar.row(a).transpose(), k - 2);
        SpanField t;
        t.cx = mono_derivative(bq, k + 1, 1);          // curl q = (dq/dy,
        t.cy = -mono_derivative(bq, k + 1, 0);         //          -dq/dx)
        tests.push_back(std::move(t));
      }
    }
  }
  for (std::size_t a = 0; a < tests.size(); ++a, ++row) {
    const int Dt = static_cast<int>(
        std::round((std::sqrt(8.0 * tests[a].cx.size() + 1) - 3) / 2));
    for (int s = 0; s < dim; ++s)
      D(row, s) =
          poly_product_integral(span[s].cx, comp_degree, tests[a].cx, Dt) +
          poly_product_integral(span[s].cy, comp_degree, tests[a].cy, Dt);
    basis.dof_meta.push_back({DofMeta::Kind::interior_moment, -1, -1,
                              static_cast<int>(a)});
    basis.interior_tests.push_back({tests[a].cx, tests[a].cy});
  }
  if (row != dim)
    throw std::runtime_error("hdiv basis: functional count mismatch");

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(D);
  const double cond = svd.singularValues()(0) /
                      svd.singularValues()(svd.singularValues().size() - 1);
  basis.functional_condition = cond;
  if (!std::isfinite(cond) || cond > 1e12) {
    std::ostringstream oss;
    oss << "hdiv basis: singular functional matrix, condition " << cond;
    throw std::runtime_error(oss.str());
  }
  Eigen::MatrixXd N = D.fullPivLu().inverse();  // column i = nodal basis i

  basis.coef_x.setZero(dim, nmono(comp_degree));
  basis.coef_y.setZero(dim, nmono(comp_degree));
  basis.coef_div.setZero(dim, nmono(comp_degree - 1));
  for (int i = 0; i < dim; ++i)
    for (int s = 0; s < dim; ++s) {
      if (N(s, i) == 0.0) continue;
      basis.coef_x.row(i) += N(s, i) * span[s].cx.transpose();
      basis.coef_y.row(i) += N(s, i) * span[s].cy.transpose();
      basis.coef_div.row(i) += N(s, i) * span[s].cdiv.transpose();
    }

  basis.values.resize(rule.size());
  basis.divs.resize(rule.size());
  Eigen::MatrixX2d vals;
  Eigen::VectorXd dv;
  for (int q = 0; q < rule.size(); ++q) {
    basis.eval_hdiv(rule.points[q][0], rule.points[q][1], vals, dv);
    basis.values[q].resize(dim);
    basis.divs[q].assign(dv.data(), dv.data() + dim);
    for (int i = 0; i < dim; ++i)
      basis.values[q][i] = {vals(i, 0), vals(i, 1)};
  }
  return basis;
}

}  // namespace detail

// Nodal basis of RT_k = [P_k]^2 + P~_k (x,y), dual to the per-edge Legendre
// flux moments of order <= k and interior moments against [P_{k-1}]^2.
inline ReferenceBasis rt_basis(int k, const QuadRule& rule) {
  if (k < 0 || k > 2) throw std::invalid_argument("rt_basis: k must be in [0,2]");
  using detail::mono_index;
  using detail::nmono;
  const int comp_degree = k + 1;
  std::vector<detail::SpanField> span;
  std::vector<std::array<int, 2>> exps;
  detail::mono_exponents(k, exps);
  for (int c = 0; c < 2; ++c)
    for (const auto& [a, b] : exps) {
      detail::SpanField f;
      f.cx = Eigen::VectorXd::Zero(nmono(comp_degree));
      f.cy = Eigen::VectorXd::Zero(nmono(comp_degree));
      f.cdiv = Eigen::VectorXd::Zero(nmono(comp_degree - 1));
      (c == 0 ? f.cx : f.cy)(mono_index(a, b)) = 1.0;
      if (c == 0 && a > 0) f.cdiv(mono_index(a - 1, b)) = a;
      if (c == 1 && b > 0) f.cdiv(mono_index(a, b - 1)) = b;
      span.push_back(std::move(f));
    }
  for (int b = 0; b <= k; ++b) {  // homogeneous x^a y^b (x, y), a+b = k
    const int a = k - b;
    detail::SpanField f;
    f.cx = Eigen::VectorXd::Zero(nmono(comp_degree));
    f.cy = Eigen::VectorXd::Zero(nmono(comp_degree));
    f.cdiv = Eigen::VectorXd::Zero(nmono(comp_degree - 1));
    f.cx(mono_index(a + 1, b)) = 1.0;
    f.cy(mono_index(a, b + 1)) = 1.0;
    f.cdiv(mono_index(a, b)) = a + b + 2.0;
    span.push_back(std::move(f));
  }
  return detail::build_hdiv_basis(ReferenceBasis::Family::rt, k, rule, span,
                                  comp_degree);
}

// Nodal basis of BDM_k = [P_k]^2, dual to the per-edge Legendre flux moments
// of order <= k, interior moments against gradients of nonconstant P_{k-1}
// and against curls of the cubic bubble times P_{k-2}.
inline ReferenceBasis bdm_basis(int k, const QuadRule& rule) {
  if (k < 1 || k > 3) throw std::invalid_argument("bdm_basis: k must be in [1,3]");
  using detail::mono_index;
  using detail::nmono;
  const int comp_degree = k;
  std::vector<detail::SpanField> span;
  std::vector<std::array<int, 2>> exps;
  detail::mono_exponents(k, exps);
  for (int c = 0; c < 2; ++c)
    for (const auto& [a, b] : exps) {
      detail::SpanField f;
      f.cx = Eigen::VectorXd::Zero(nmono(comp_degree));
      f.cy = Eigen::VectorXd::Zero(nmono(comp_degree));
      f.cdiv = Eigen::VectorXd::Zero(nmono(comp_degree - 1));
      (c == 0 ? f.cx : f.cy)(mono_index(a, b)) = 1.0;
      if (c == 0 && a > 0) f.cdiv(mono_index(a - 1, b)) = a;
      if (c == 1 && b > 0) f.cdiv(mono_index(a, b - 1)) = b;
      span.push_back(std::move(f));
    }
  return detail::build_hdiv_basis(ReferenceBasis::Family::bdm, k, rule, span,
                                  comp_degree);
}

// Per-cell push-forward of a reference H(div) basis through the
// contravariant Piola map v -> (1/det J) J v o F^{-1}.
struct PhysBasis {
  Eigen::Matrix2d J;
  double detJ = 0;
  std::array<double, 2> origin{};
  std::vector<std::array<double, 2>> points;               // mapped rule pts
  std::vector<std::vector<std::array<double, 2>>> values;  // [q][i]
  std::vector<std::vector<double>> divs;                   // [q][i]
};

inline PhysBasis piola_push(const std::array<std::array<double, 2>, 3>& coords,
                            const ReferenceBasis& ref) {
  PhysBasis phys;
  phys.origin = coords[0];
  phys.J << coords[1][0] - coords[0][0], coords[2][0] - coords[0][0],
      coords[1][1] - coords[0][1], coords[2][1] - coords[0][1];
  phys.detJ = phys.J.determinant();
  if (!(std::abs(phys.detJ) > 1e-14))
    throw std::invalid_argument("piola_push: degenerate cell");

  const int nq = ref.rule.size();
  phys.points.resize(nq);
  phys.values.resize(nq);
  phys.divs.resize(nq);
  const double inv_det = 1.0 / phys.detJ;
  for (int q = 0; q < nq; ++q) {
    const auto& xq = ref.rule.points[q];
    phys.points[q] = {
        coords[0][0] + phys.J(0, 0) * xq[0] + phys.J(0, 1) * xq[1],
        coords[0][1] + phys.J(1, 0) * xq[0] + phys.J(1, 1) * xq[1]};
    phys.values[q].resize(ref.dim);
    phys.divs[q].resize(ref.dim);
    for (int i = 0; i < ref.dim; ++i) {
      const auto& v = ref.values[q][i];
      phys.values[q][i] = {
          inv_det * (phys.J(0, 0) * v[0] + phys.J(0, 1) * v[1]),
          inv_det * (phys.J(1, 0) * v[0] + phys.J(1, 1) * v[1])};
      phys.divs[q][i] = inv_det * ref.divs[q][i];
    }
  }
  return phys;
}

}  // namespace stokeseig
