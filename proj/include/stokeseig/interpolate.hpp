// SPDX-License-Identifier: MIT
#pragma once

#include <Eigen/Dense>
#include <type_traits>
#include <vector>

#include "stokeseig/space.hpp"

namespace stokeseig {

// Canonical interpolation into a pseudostress space: apply the defining DOF
// functionals (edge flux moments in the canonical low -> high edge walk,
// interior moments of the inverse Piola pullback) row by row.  The local
// field is sampled per cell as lf(cell, xhat, yhat) -> 2x2 tensor at the
// physical image of (xhat, yhat); edge DOFs are written once per adjacent
// cell, which is consistent whenever the field has continuous normal traces.
//
// Edge moments use a Gauss rule with comp_degree + 3 points, which is exact
// for the polynomial fields of the space itself and spectrally accurate for
// smooth data; interior moments reuse the space's triangle rule.
template <class LocalField>
Eigen::VectorXd interp_hdiv_cellwise(const FeSpace& sp, LocalField&& lf) {
  const Mesh& mesh = *sp.mesh;
  const auto& rule = sp.basis.rule;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(sp.ndof);

  std::vector<double> gn, gw;
  detail::gauss_legendre_01(sp.basis.comp_degree + 3, gn, gw);

  for (int c = 0; c < mesh.num_cells(); ++c) {
    const CellMap cm = cell_map(mesh, c);
    const auto& dofs = sp.cell_dofs[c];
    for (int b = 0; b < sp.basis.dim; ++b) {
      const auto& meta = sp.basis.dof_meta[b];
      double m0 = 0, m1 = 0;
      if (meta.kind == DofMeta::Kind::edge_moment) {
        const int e = mesh.cell_edges[c][meta.edge].first;
        const auto& lo = mesh.vertices[mesh.edges[e][0]];
        const auto& hi = mesh.vertices[mesh.edges[e][1]];
        const double tx = hi[0] - lo[0], ty = hi[1] - lo[1];
        for (std::size_t q = 0; q < gn.size(); ++q) {
          const double s = gn[q];
          const auto ref =
              cm.to_reference(lo[0] + s * tx, lo[1] + s * ty);
          const Eigen::Matrix2d M = lf(c, ref[0], ref[1]);
          const double w = gw[q] * legendre_shifted(meta.moment, s);
          m0 += w * (M(0, 0) * ty - M(0, 1) * tx);
          m1 += w * (M(1, 0) * ty - M(1, 1) * tx);
        }
      } else {
        for (int q = 0; q < rule.size(); ++q) {
          const double xh = rule.points[q][0], yh = rule.points[q][1];
          const Eigen::Matrix2d M = lf(c, xh, yh);
          const Eigen::Vector2d wt =
              sp.basis.eval_interior_test(meta.index, xh, yh);
          const Eigen::Vector2d v0 = cm.detJ * (cm.Jinv * M.row(0).transpose());
          const Eigen::Vector2d v1 = cm.detJ * (cm.Jinv * M.row(1).transpose());
          m0 += rule.weights[q] * v0.dot(wt);
          m1 += rule.weights[q] * v1.dot(wt);
        }
      }
      x(dofs[b].first) = m0;
      x(dofs[sp.basis.dim + b].first) = m1;
    }
  }
  return x;
}

// Interpolate a globally defined tensor field f(x, y) -> 2x2 tensor.
template <class Field>
Eigen::VectorXd interp_hdiv(const FeSpace& sp, Field&& f) {
  return interp_hdiv_cellwise(sp, [&](int c, double xh, double yh) {
    const auto p = cell_map(*sp.mesh, c).to_physical(xh, yh);
    return f(p[0], p[1]);
  });
}

template <class Field>
Eigen::VectorXd interp_hdiv(const Mesh& mesh, Family family, int k,
                            Field&& f) {
  FeSpace sp = build_pseudostress_space(mesh, family, k);
  return interp_hdiv(sp, std::forward<Field>(f));
}

// Re-expand a coefficient field of one pseudostress space in another one on
// the same mesh (used for the RT_k <-> BDM_{k+1} nesting checks).
inline Eigen::VectorXd interp_between(const FeSpace& src,
                                      const Eigen::VectorXd& x,
                                      const FeSpace& dst) {
  return interp_hdiv_cellwise(dst, [&](int c, double xh, double yh) {
    return eval_tensor_field(src, x, c, xh, yh);
  });
}

// Elementwise L2 projection onto the velocity or pressure space.  The
// reference basis is orthonormal with mass delta_ij/2, so the physical cell
// mass is |T| I and each coefficient is 2 * sum_q w_q f(F(x_q)) phi_b(x_q).
template <class Field>
Eigen::VectorXd l2_project(const FeSpace& sp, Field&& f) {
  const Mesh& mesh = *sp.mesh;
  const auto& rule = sp.basis.rule;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(sp.ndof);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const CellMap cm = cell_map(mesh, c);
    const auto& dofs = sp.cell_dofs[c];
    for (int q = 0; q < rule.size(); ++q) {
      const auto p = cm.to_physical(rule.points[q][0], rule.points[q][1]);
      const auto fv = f(p[0], p[1]);
      const Eigen::VectorXd phi =
          sp.basis.eval_scalar(rule.points[q][0], rule.points[q][1]);
      for (int b = 0; b < sp.basis.dim; ++b) {
        const double wphi = 2.0 * rule.weights[q] * phi(b);
        if constexpr (std::is_convertible_v<decltype(fv), double>) {
          x(dofs[b].first) += wphi * fv;
        } else {
          for (int r = 0; r < sp.rows; ++r)
            x(dofs[r * sp.basis.dim + b].first) += wphi * fv(r);
        }
      }
    }
  }
  return x;
}

}  // namespace stokeseig
