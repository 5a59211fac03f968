// SPDX-License-Identifier: MIT
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "stokeseig/interpolate.hpp"
#include "stokeseig/space.hpp"

using namespace stokeseig;

namespace {

Mesh single_triangle() {
  Mesh m;
  m.vertices = {{0, 0}, {1, 0}, {0, 1}};
  m.cells = {{0, 1, 2}};
  build_edge_topology(m);
  return m;
}

std::vector<std::vector<int>> edge_cells_map(const Mesh& m) {
  std::vector<std::vector<int>> ec(m.num_edges());
  for (int c = 0; c < m.num_cells(); ++c)
    for (const auto& [e, sgn] : m.cell_edges[c]) ec[e].push_back(c);
  return ec;
}

double interp_l2_error(const FeSpace& sp, const Eigen::VectorXd& x,
                       const std::function<Eigen::Matrix2d(double, double)>& f) {
  double err2 = 0;
  for (int c = 0; c < sp.mesh->num_cells(); ++c) {
    const CellMap cm = cell_map(*sp.mesh, c);
    for (int q = 0; q < sp.basis.rule.size(); ++q) {
      const double xh = sp.basis.rule.points[q][0];
      const double yh = sp.basis.rule.points[q][1];
      const auto p = cm.to_physical(xh, yh);
      const Eigen::Matrix2d d = eval_tensor_field(sp, x, c, xh, yh) - f(p[0], p[1]);
      err2 += sp.basis.rule.weights[q] * cm.detJ * d.squaredNorm();
    }
  }
  return std::sqrt(err2);
}

}  // namespace

TEST_CASE("global dof counts", "[space]") {
  auto sq = unit_square_mesh(4);
  CHECK(build_pseudostress_space(sq, Family::rt, 0).ndof == 112);
  CHECK(build_pseudostress_space(sq, Family::bdm, 0).ndof == 224);
  CHECK(build_velocity_space(sq, 0).ndof == 64);
  CHECK(build_pressure_space(sq, 0).ndof == 32);
  CHECK(build_velocity_space(sq, 1).ndof == 192);

  auto tri = single_triangle();
  CHECK(build_pseudostress_space(tri, Family::rt, 1).ndof == 16);

  auto dk = disk_mesh(1);
  CHECK(build_pressure_space(dk, 0).ndof == 6);

  // closed-form counts on a less structured mesh
  auto ls = lshape_mesh(2);
  for (int k = 0; k <= 2; ++k) {
    const int E = ls.num_edges(), C = ls.num_cells();
    CHECK(build_pseudostress_space(ls, Family::rt, k).ndof ==
          2 * (E * (k + 1) + C * k * (k + 1)));
    const int m = k + 1;
    CHECK(build_pseudostress_space(ls, Family::bdm, k).ndof ==
          2 * (E * (m + 1) + C * (m - 1) * (m + 1)));
  }

  CHECK_THROWS(build_pseudostress_space(sq, Family::rt, 3));
  CHECK_THROWS(build_pseudostress_space(sq, Family::bdm, 3));
  CHECK_THROWS(build_velocity_space(sq, 3));
  CHECK_THROWS(build_pressure_space(sq, -1));
}

TEST_CASE("normal traces are continuous across interior edges", "[space]") {
  std::mt19937 rng(77);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  auto check_space = [&](const Mesh& mesh, Family fam, int k) {
    auto sp = build_pseudostress_space(mesh, fam, k);
    auto ec = edge_cells_map(mesh);
    for (int trial = 0; trial < 20; ++trial) {
      Eigen::VectorXd x(sp.ndof);
      for (int i = 0; i < sp.ndof; ++i) x(i) = U(rng);
      for (int e = 0; e < mesh.num_edges(); ++e) {
        if (ec[e].size() != 2) continue;
        const auto& lo = mesh.vertices[mesh.edges[e][0]];
        const auto& hi = mesh.vertices[mesh.edges[e][1]];
        const double tx = hi[0] - lo[0], ty = hi[1] - lo[1];
        const double len = std::hypot(tx, ty);
        const double nx = ty / len, ny = -tx / len;
        for (double s : {0.21, 0.5, 0.83}) {
          const double px = lo[0] + s * tx, py = lo[1] + s * ty;
          Eigen::Vector2d tr[2];
          for (int side = 0; side < 2; ++side) {
            const int c = ec[e][side];
            const auto ref = cell_map(mesh, c).to_reference(px, py);
            const Eigen::Matrix2d M = eval_tensor_field(sp, x, c, ref[0], ref[1]);
            tr[side] = M * Eigen::Vector2d(nx, ny);
          }
          REQUIRE((tr[0] - tr[1]).lpNorm<Eigen::Infinity>() < 1e-10);
        }
      }
    }
  };
  auto sq = unit_square_mesh(3);
  check_space(sq, Family::rt, 0);
  check_space(sq, Family::rt, 1);
  check_space(sq, Family::rt, 2);
  check_space(sq, Family::bdm, 0);
  check_space(sq, Family::bdm, 1);
  auto dk = disk_mesh(2);
  check_space(dk, Family::rt, 1);
  auto ls = lshape_mesh(2);
  check_space(ls, Family::bdm, 0);
}

TEST_CASE("interpolation reproduces polynomial tensors", "[space]") {
  auto mesh = unit_square_mesh(2);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (auto fam : {Family::rt, Family::bdm})
    for (int k = 0; k <= 2; ++k) {
      auto sp = build_pseudostress_space(mesh, fam, k);
      const int deg = fam == Family::rt ? k : k + 1;
      // random polynomial rows of total degree <= deg
      std::vector<std::array<int, 2>> exps;
      detail::mono_exponents(deg, exps);
      Eigen::MatrixXd coef(4, exps.size());
      for (int i = 0; i < coef.size(); ++i) coef(i) = U(rng);
      auto f = [&](double x, double y) {
        Eigen::Matrix2d M;
        for (int i = 0; i < 4; ++i) {
          double v = 0;
          for (std::size_t m = 0; m < exps.size(); ++m)
            v += coef(i, m) * std::pow(x, exps[m][0]) * std::pow(y, exps[m][1]);
          M(i / 2, i % 2) = v;
        }
        return M;
      };
      Eigen::VectorXd x = interp_hdiv(sp, f);
      CHECK(interp_l2_error(sp, x, f) < 1e-10);
    }
}

TEST_CASE("interpolation commutes with the divergence", "[space]") {
  // polynomial rows of degree k+3: not reproduced by the space, but all
  // moment integrands are integrated exactly, so div(Pi_h tau) must equal
  // the elementwise L2 projection of div(tau) to roundoff
  auto mesh = unit_square_mesh(2);
  std::mt19937 rng(29);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (auto fam : {Family::rt, Family::bdm})
    for (int k = 0; k <= 1; ++k) {
      const int deg = k + 3;
      std::vector<std::array<int, 2>> exps;
      detail::mono_exponents(deg, exps);
      Eigen::MatrixXd coef(4, exps.size());
      for (int i = 0; i < coef.size(); ++i) coef(i) = U(rng);
      auto tau = [&](double x, double y) {
        Eigen::Matrix2d M = Eigen::Matrix2d::Zero();
        for (int i = 0; i < 4; ++i)
          for (std::size_t m = 0; m < exps.size(); ++m)
            M(i / 2, i % 2) +=
                coef(i, m) * std::pow(x, exps[m][0]) * std::pow(y, exps[m][1]);
        return M;
      };
      auto div_tau = [&](double x, double y) {
        Eigen::Vector2d v = Eigen::Vector2d::Zero();
        for (int r = 0; r < 2; ++r)
          for (std::size_t m = 0; m < exps.size(); ++m) {
            const int a = exps[m][0], b = exps[m][1];
            if (a > 0)
              v(r) += coef(2 * r, m) * a * std::pow(x, a - 1) * std::pow(y, b);
            if (b > 0)
              v(r) += coef(2 * r + 1, m) * b * std::pow(x, a) * std::pow(y, b - 1);
          }
        return v;
      };
      auto sp = build_pseudostress_space(mesh, fam, k);
      auto vp = build_velocity_space(mesh, k, sp.basis.rule.degree);
      Eigen::VectorXd x = interp_hdiv(sp, tau);
      Eigen::VectorXd pd = l2_project(vp, div_tau);
      for (int c = 0; c < mesh.num_cells(); ++c)
        for (auto [xh, yh] : {std::pair{0.2, 0.3}, {0.6, 0.1}, {0.25, 0.55}}) {
          Eigen::Vector2d lhs = eval_tensor_div(sp, x, c, xh, yh);
          Eigen::Vector2d rhs = eval_velocity_field(vp, pd, c, xh, yh);
          REQUIRE((lhs - rhs).lpNorm<Eigen::Infinity>() < 1e-10);
        }
    }
}

TEST_CASE("interpolation error decays at the expected rate", "[space]") {
  auto f = [](double x, double y) {
    Eigen::Matrix2d M;
    M << std::sin(x + y), std::cos(x - y), std::exp(0.3 * x) * y,
        std::sin(2 * x) * std::cos(y);
    return M;
  };
  auto rate_for = [&](Family fam, int k) {
    std::vector<double> errs;
    for (int N : {2, 4, 8}) {
      auto mesh = unit_square_mesh(N);
      auto sp = build_pseudostress_space(mesh, fam, k);
      errs.push_back(interp_l2_error(sp, interp_hdiv(sp, f), f));
    }
    return std::log2(errs[1] / errs[2]);
  };
  CHECK_THAT(rate_for(Family::rt, 0), Catch::Matchers::WithinAbs(1.0, 0.3));
  CHECK_THAT(rate_for(Family::rt, 1), Catch::Matchers::WithinAbs(2.0, 0.3));
  CHECK_THAT(rate_for(Family::bdm, 0), Catch::Matchers::WithinAbs(2.0, 0.3));
}

TEST_CASE("l2 projection: averages, exactness, decay", "[space]") {
  auto mesh = unit_square_mesh(3);
  // constant field exact for any k
  for (int k = 0; k <= 2; ++k) {
    auto pp = build_pressure_space(mesh, k);
    Eigen::VectorXd x = l2_project(pp, [](double, double) { return 3.25; });
    for (int c = 0; c < mesh.num_cells(); ++c)
      CHECK_THAT(eval_pressure_field(pp, x, c, 0.31, 0.22),
                 Catch::Matchers::WithinAbs(3.25, 1e-12));
  }
  // linear field, k=0: cell averages (= value at centroid for affine cells)
  {
    auto pp = build_pressure_space(mesh, 0);
    auto f = [](double x, double y) { return 2 * x - 3 * y + 1; };
    Eigen::VectorXd x = l2_project(pp, f);
    for (int c = 0; c < mesh.num_cells(); ++c) {
      auto co = mesh.cell_coords(c);
      const double cx = (co[0][0] + co[1][0] + co[2][0]) / 3;
      const double cy = (co[0][1] + co[1][1] + co[2][1]) / 3;
      CHECK_THAT(eval_pressure_field(pp, x, c, 0.1, 0.7),
                 Catch::Matchers::WithinAbs(f(cx, cy), 1e-12));
    }
  }
  // smooth scalar: O(h^{k+1})
  for (int k = 0; k <= 1; ++k) {
    auto f = [](double x, double y) { return std::sin(x) * std::cos(2 * y); };
    std::vector<double> errs;
    for (int N : {2, 4, 8}) {
      auto m = unit_square_mesh(N);
      auto pp = build_pressure_space(m, k);
      Eigen::VectorXd x = l2_project(pp, f);
      double err2 = 0;
      for (int c = 0; c < m.num_cells(); ++c) {
        const CellMap cm = cell_map(m, c);
        for (int q = 0; q < pp.basis.rule.size(); ++q) {
          const double xh = pp.basis.rule.points[q][0];
          const double yh = pp.basis.rule.points[q][1];
          const auto p = cm.to_physical(xh, yh);
          const double d = eval_pressure_field(pp, x, c, xh, yh) - f(p[0], p[1]);
          err2 += pp.basis.rule.weights[q] * cm.detJ * d * d;
        }
      }
      errs.push_back(std::sqrt(err2));
    }
    CHECK_THAT(std::log2(errs[1] / errs[2]),
               Catch::Matchers::WithinAbs(k + 1.0, 0.25));
  }
}

TEST_CASE("trace constraint vector", "[space]") {
  auto mesh = unit_square_mesh(3);
  auto sp = build_pseudostress_space(mesh, Family::rt, 0);
  Eigen::VectorXd t = build_trace_constraint(sp);

  // interpolant of the identity tensor: integral of tr(I) = 2|Omega| = 8
  Eigen::VectorXd xi = interp_hdiv(sp, [](double, double) {
    return Eigen::Matrix2d::Identity().eval();
  });
  CHECK_THAT(t.dot(xi), Catch::Matchers::WithinAbs(8.0, 1e-10));

  // zero coefficients
  CHECK(t.dot(Eigen::VectorXd::Zero(sp.ndof)) == 0.0);

  // a divergence-free, trace-free linear field
  auto sp1 = build_pseudostress_space(mesh, Family::rt, 1);
  Eigen::VectorXd t1 = build_trace_constraint(sp1);
  Eigen::VectorXd xdf = interp_hdiv(sp1, [](double x, double y) {
    Eigen::Matrix2d M;
    M << x, -y, y, -x;
    return M;
  });
  CHECK_THAT(t1.dot(xdf), Catch::Matchers::WithinAbs(0.0, 1e-10));

  // t.x equals the quadrature value of the assembled trace for random x
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::VectorXd x(sp1.ndof);
    for (int i = 0; i < sp1.ndof; ++i) x(i) = U(rng);
    double quad = 0;
    for (int c = 0; c < mesh.num_cells(); ++c) {
      const CellMap cm = cell_map(mesh, c);
      for (int q = 0; q < sp1.basis.rule.size(); ++q) {
        const Eigen::Matrix2d M = eval_tensor_field(
            sp1, x, c, sp1.basis.rule.points[q][0], sp1.basis.rule.points[q][1]);
        quad += sp1.basis.rule.weights[q] * cm.detJ * M.trace();
      }
    }
    REQUIRE_THAT(t1.dot(x), Catch::Matchers::WithinAbs(quad, 1e-9));
  }
}

TEST_CASE("rt and bdm spaces nest", "[space]") {
  auto mesh = unit_square_mesh(2);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int k = 0; k <= 1; ++k) {
    auto rt = build_pseudostress_space(mesh, Family::rt, k);
    auto bdm = build_pseudostress_space(mesh, Family::bdm, k);
    Eigen::VectorXd x(rt.ndof);
    for (int i = 0; i < rt.ndof; ++i) x(i) = U(rng);
    Eigen::VectorXd up = interp_between(rt, x, bdm);
    Eigen::VectorXd back = interp_between(bdm, up, rt);
    REQUIRE((x - back).lpNorm<Eigen::Infinity>() < 1e-10);
  }
}

TEST_CASE("space construction is deterministic", "[space]") {
  auto mesh = lshape_mesh(2);
  auto a = build_pseudostress_space(mesh, Family::bdm, 1);
  auto b = build_pseudostress_space(mesh, Family::bdm, 1);
  REQUIRE(a.ndof == b.ndof);
  REQUIRE(a.cell_dofs == b.cell_dofs);
  Eigen::VectorXd ta = build_trace_constraint(a);
  Eigen::VectorXd tb = build_trace_constraint(b);
  REQUIRE((ta - tb).lpNorm<Eigen::Infinity>() == 0.0);
}
