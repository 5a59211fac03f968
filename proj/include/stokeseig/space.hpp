// SPDX-License-Identifier: MIT
#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <utility>
#include <vector>

#include "stokeseig/mesh.hpp"
#include "stokeseig/refelem.hpp"

namespace stokeseig {

enum class Family { rt, bdm };

inline const char* family_name(Family f) {
  return f == Family::rt ? "RT" : "BDM";
}

// Global finite element space with a per-cell DOF map.  The pseudostress
// space treats the tensor as two independent H(div) rows; velocity and
// pressure are fully discontinuous piecewise polynomials.
//
// cell_dofs[c] lists (global index, sign) pairs in local order
// r * basis.dim + b for tensor row r and reference basis function b.
struct FeSpace {
  enum class Kind { pseudostress, velocity, pressure };
  Kind kind = Kind::velocity;
  const Mesh* mesh = nullptr;
  Family family = Family::rt;  // pseudostress only
  int k = 0;                   // scheme parameter (velocity degree)
  int rows = 1;
  int ndof = 0;
  int row_ndof = 0;  // DOFs per tensor row / scalar component
  ReferenceBasis basis;
  std::vector<std::vector<std::pair<int, double>>> cell_dofs;

  int num_cells() const { return mesh->num_cells(); }
};

inline int default_quad_degree(int k) { return 2 * (k + 2); }

// Shared edge DOFs are glued with a single sign.  A cell whose local edge
// walk runs against the canonical (low -> high vertex) direction sees the
// moment functional flipped and the order-j Legendre weight reversed, which
// multiplies the coefficient by (-1)^(j+1).
inline double edge_dof_sign(int va, int vb, int moment) {
  if (va < vb) return 1.0;
  return moment % 2 == 1 ? 1.0 : -1.0;
}

inline FeSpace build_pseudostress_space(const Mesh& mesh, Family family,
                                        int k, int quad_degree = -1) {
  if (quad_degree < 0) quad_degree = default_quad_degree(k);
  auto rule = quadrature_rule(quad_degree);

  FeSpace sp;
  sp.kind = FeSpace::Kind::pseudostress;
  sp.mesh = &mesh;
  sp.family = family;
  sp.k = k;
  sp.rows = 2;
  sp.basis =
      family == Family::rt ? rt_basis(k, rule) : bdm_basis(k + 1, rule);

  const int nem = sp.basis.n_edge_dofs() / 3;  // moments per edge
  const int nint = sp.basis.dim - sp.basis.n_edge_dofs();
  sp.row_ndof = mesh.num_edges() * nem + mesh.num_cells() * nint;
  sp.ndof = 2 * sp.row_ndof;

  sp.cell_dofs.resize(mesh.num_cells());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    auto& dofs = sp.cell_dofs[c];
    dofs.reserve(2 * sp.basis.dim);
    for (int r = 0; r < 2; ++r)
      for (int b = 0; b < sp.basis.dim; ++b) {
        const auto& meta = sp.basis.dof_meta[b];
        int g;
        double sign = 1.0;
        if (meta.kind == DofMeta::Kind::edge_moment) {
          const int e = mesh.cell_edges[c][meta.edge].first;
          const int va = mesh.cells[c][local_edge_vertices[meta.edge][0]];
          const int vb = mesh.cells[c][local_edge_vertices[meta.edge][1]];
          g = e * nem + meta.moment;
          sign = edge_dof_sign(va, vb, meta.moment);
        } else {
          g = mesh.num_edges() * nem + c * nint + meta.index;
        }
        dofs.emplace_back(r * sp.row_ndof + g, sign);
      }
  }
  return sp;
}

inline FeSpace build_scalar_space(const Mesh& mesh, int k, int rows,
                                  FeSpace::Kind kind, int quad_degree) {
  if (k < 0 || k > 2)
    throw std::invalid_argument("scalar space: k must be in [0,2]");
  if (quad_degree < 0) quad_degree = default_quad_degree(k);
  auto rule = quadrature_rule(quad_degree);

  FeSpace sp;
  sp.kind = kind;
  sp.mesh = &mesh;
  sp.k = k;
  sp.rows = rows;
  sp.basis = pk_basis(k, rule);
  sp.row_ndof = mesh.num_cells() * sp.basis.dim;
  sp.ndof = rows * sp.row_ndof;

  sp.cell_dofs.resize(mesh.num_cells());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    auto& dofs = sp.cell_dofs[c];
    dofs.reserve(rows * sp.basis.dim);
    for (int r = 0; r < rows; ++r)
      for (int b = 0; b < sp.basis.dim; ++b)
        dofs.emplace_back((c * rows + r) * sp.basis.dim + b, 1.0);
  }
  return sp;
}

inline FeSpace build_velocity_space(const Mesh& mesh, int k,
                                    int quad_degree = -1) {
  return build_scalar_space(mesh, k, 2, FeSpace::Kind::velocity, quad_degree);
}

inline FeSpace build_pressure_space(const Mesh& mesh, int k,
                                    int quad_degree = -1) {
  return build_scalar_space(mesh, k, 1, FeSpace::Kind::pressure, quad_degree);
}

// Affine geometry of one cell.
struct CellMap {
  Eigen::Matrix2d J, Jinv;
  double detJ = 0;
  std::array<double, 2> origin{};

  std::array<double, 2> to_physical(double xh, double yh) const {
    return {origin[0] + J(0, 0) * xh + J(0, 1) * yh,
            origin[1] + J(1, 0) * xh + J(1, 1) * yh};
  }
  std::array<double, 2> to_reference(double x, double y) const {
    const double dx = x - origin[0], dy = y - origin[1];
    return {Jinv(0, 0) * dx + Jinv(0, 1) * dy,
            Jinv(1, 0) * dx + Jinv(1, 1) * dy};
  }
};

inline CellMap cell_map(const Mesh& mesh, int cell) {
  auto co = mesh.cell_coords(cell);
  CellMap m;
  m.origin = co[0];
  m.J << co[1][0] - co[0][0], co[2][0] - co[0][0], co[1][1] - co[0][1],
      co[2][1] - co[0][1];
  m.detJ = m.J.determinant();
  m.Jinv = m.J.inverse();
  return m;
}

// Tensor value of a pseudostress coefficient field at a reference point of
// one cell (row r of the result is the r-th H(div) row field).
inline Eigen::Matrix2d eval_tensor_field(const FeSpace& sp,
                                         const Eigen::VectorXd& x, int cell,
                                         double xh, double yh) {
  const CellMap cm = cell_map(*sp.mesh, cell);
  Eigen::MatrixX2d vals;
  Eigen::VectorXd div;
  sp.basis.eval_hdiv(xh, yh, vals, div);
  Eigen::Matrix2d out = Eigen::Matrix2d::Zero();
  const auto& dofs = sp.cell_dofs[cell];
  for (int r = 0; r < 2; ++r)
    for (int b = 0; b < sp.basis.dim; ++b) {
      const auto& [g, sign] = dofs[r * sp.basis.dim + b];
      const double y = sign * x(g);
      out(r, 0) += y * vals(b, 0);
      out(r, 1) += y * vals(b, 1);
    }
  // contravariant Piola applied row-wise
  return out * (cm.J.transpose() / cm.detJ);
}

// Row-wise divergence vector of a pseudostress coefficient field.
inline Eigen::Vector2d eval_tensor_div(const FeSpace& sp,
                                       const Eigen::VectorXd& x, int cell,
                                       double xh, double yh) {
  const CellMap cm = cell_map(*sp.mesh, cell);
  Eigen::MatrixX2d vals;
  Eigen::VectorXd div;
  sp.basis.eval_hdiv(xh, yh, vals, div);
  Eigen::Vector2d out = Eigen::Vector2d::Zero();
  const auto& dofs = sp.cell_dofs[cell];
  for (int r = 0; r < 2; ++r)
    for (int b = 0; b < sp.basis.dim; ++b) {
      const auto& [g, sign] = dofs[r * sp.basis.dim + b];
      out(r) += sign * x(g) * div(b) / cm.detJ;
    }
  return out;
}

inline Eigen::Vector2d eval_velocity_field(const FeSpace& sp,
                                           const Eigen::VectorXd& x, int cell,
                                           double xh, double yh) {
  Eigen::VectorXd phi = sp.basis.eval_scalar(xh, yh);
  Eigen::Vector2d out = Eigen::Vector2d::Zero();
  const auto& dofs = sp.cell_dofs[cell];
  for (int r = 0; r < 2; ++r)
    for (int b = 0; b < sp.basis.dim; ++b)
      out(r) += x(dofs[r * sp.basis.dim + b].first) * phi(b);
  return out;
}

inline double eval_pressure_field(const FeSpace& sp, const Eigen::VectorXd& x,
                                  int cell, double xh, double yh) {
  Eigen::VectorXd phi = sp.basis.eval_scalar(xh, yh);
  double out = 0;
  for (int b = 0; b < sp.basis.dim; ++b)
    out += x(sp.cell_dofs[cell][b].first) * phi(b);
  return out;
}

// Vector t with t_i = integral of tr(phi_i) over the domain; t . x is the
// mean trace constraint value of the assembled field with coefficients x.
inline Eigen::VectorXd build_trace_constraint(const FeSpace& sp) {
  if (sp.kind != FeSpace::Kind::pseudostress)
    throw std::invalid_argument("trace constraint needs a pseudostress space");
  const Mesh& mesh = *sp.mesh;
  const auto& rule = sp.basis.rule;
  Eigen::VectorXd t = Eigen::VectorXd::Zero(sp.ndof);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    auto phys = piola_push(mesh.cell_coords(c), sp.basis);
    const auto& dofs = sp.cell_dofs[c];
    for (int r = 0; r < 2; ++r)
      for (int b = 0; b < sp.basis.dim; ++b) {
        double acc = 0;
        for (int q = 0; q < rule.size(); ++q)
          acc += rule.weights[q] * phys.values[q][b][r];
        const auto& [g, sign] = dofs[r * sp.basis.dim + b];
        t(g) += sign * phys.detJ * acc;
      }
  }
  return t;
}

}  // namespace stokeseig
