// SPDX-License-Identifier: MIT
#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace stokeseig {

// Quadrature rule on the reference triangle conv{(0,0),(1,0),(0,1)}.
struct QuadRule {
  int degree = 0;
  std::vector<std::array<double, 2>> points;
  std::vector<double> weights;  // positive, summing to 1/2

  int size() const { return static_cast<int>(points.size()); }
};

namespace detail {

// Gauss-Legendre nodes and weights on [0,1] via the Golub-Welsch
// eigendecomposition of the Jacobi matrix.
inline void gauss_legendre_01(int n, std::vector<double>& nodes,
                              std::vector<double>& weights) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    double b = i / std::sqrt(4.0 * i * i - 1.0);
    J(i, i - 1) = J(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    nodes[i] = 0.5 * (es.eigenvalues()(i) + 1.0);
    double v0 = es.eigenvectors()(0, i);
    weights[i] = v0 * v0;  // 2*v0^2 on [-1,1], halved by the interval map
  }
}

}  // namespace detail

// Symmetric rule exact for polynomials up to `degree` (0 <= degree <= 10).
// Degrees <= 2 use the classical centroid and edge-midpoint-barycentric
// rules; higher degrees use a collapsed-coordinate product rule averaged
// over the three cyclic vertex rotations, which keeps the rule symmetric
// and its weights positive.
inline QuadRule quadrature_rule(int degree) {
  if (degree < 0 || degree > 10)
    throw std::invalid_argument("quadrature degree must be in [0,10]");
  QuadRule rule;
  rule.degree = degree;
  if (degree <= 1) {
    rule.points = {{1.0 / 3.0, 1.0 / 3.0}};
    rule.weights = {0.5};
    return rule;
  }
  if (degree == 2) {
    rule.points = {{1.0 / 6.0, 1.0 / 6.0},
                   {2.0 / 3.0, 1.0 / 6.0},
                   {1.0 / 6.0, 2.0 / 3.0}};
    rule.weights = {1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0};
    return rule;
  }

  // x = u, y = v(1-u) maps [0,1]^2 onto the triangle with Jacobian (1-u);
  // the integrand x^a y^b becomes degree a+b+1 in u and b in v.
  const int nu = (degree + 3) / 2, nv = (degree + 2) / 2;
  std::vector<double> un, uw, vn, vw;
  detail::gauss_legendre_01(nu, un, uw);
  detail::gauss_legendre_01(nv, vn, vw);

  std::vector<std::array<double, 2>> base_pts;
  std::vector<double> base_w;
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j < nv; ++j) {
      base_pts.push_back({un[i], vn[j] * (1.0 - un[i])});
      base_w.push_back(uw[i] * vw[j] * (1.0 - un[i]));
    }

  for (int rot = 0; rot < 3; ++rot)
    for (std::size_t q = 0; q < base_pts.size(); ++q) {
      double x = base_pts[q][0], y = base_pts[q][1];
      std::array<double, 2> p;
      if (rot == 0)
        p = {x, y};
      else if (rot == 1)
        p = {y, 1.0 - x - y};
      else
        p = {1.0 - x - y, x};
      rule.points.push_back(p);
      rule.weights.push_back(base_w[q] / 3.0);
    }
  return rule;
}

// Exact integral of x^a y^b over the reference triangle:
// a! b! / (a+b+2)!, computed without overflow.
inline double monomial_integral(int a, int b) {
  double r = 1.0;
  for (int i = 1; i <= b; ++i) r *= static_cast<double>(i) / (a + i);
  r /= (a + b + 1);
  r /= (a + b + 2);
  return r;
}

}  // namespace stokeseig
