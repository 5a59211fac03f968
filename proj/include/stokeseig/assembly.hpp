// SPDX-License-Identifier: MIT
#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "stokeseig/space.hpp"

namespace stokeseig {

using SpMat = Eigen::SparseMatrix<double>;

enum class Formulation { full, reduced };

inline const char* formulation_name(Formulation f) {
  return f == Formulation::full ? "full" : "reduced";
}

namespace detail {

// Scatter the upper triangle of a symmetric local matrix; the global matrix
// is completed with selfadjointView so K = K^T holds exactly.
inline void scatter_symmetric(
    const Eigen::MatrixXd& local,
    const std::vector<std::pair<int, double>>& dofs,
    std::vector<Eigen::Triplet<double>>& trips) {
  const int n = static_cast<int>(dofs.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const int gi = dofs[i].first, gj = dofs[j].first;
      if (gi > gj) continue;
      if (gi == gj && i != j)
        throw std::logic_error("scatter: duplicate global dof inside a cell");
      trips.emplace_back(gi, gj, dofs[i].second * dofs[j].second * local(i, j));
    }
}

inline SpMat from_upper(int n, std::vector<Eigen::Triplet<double>>& trips) {
  SpMat upper(n, n);
  upper.setFromTriplets(trips.begin(), trips.end());
  SpMat full;
  full = upper.selfadjointView<Eigen::Upper>();
  return full;
}

}  // namespace detail

// a0(xi, tau) = (1/2mu) int dev(xi) : dev(tau), with
// dev(tau) : dev(xi) = tau : xi - (tr tau)(tr xi)/2 in 2D.
inline SpMat assemble_a0(const FeSpace& sigma, double mu) {
  if (mu <= 0) throw std::invalid_argument("assemble_a0: mu must be positive");
  const Mesh& mesh = *sigma.mesh;
  const auto& rule = sigma.basis.rule;
  const int dim = sigma.basis.dim;
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(mesh.num_cells()) * 2 * dim * dim);
  Eigen::MatrixXd local(2 * dim, 2 * dim);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    auto phys = piola_push(mesh.cell_coords(c), sigma.basis);
    local.setZero();
    for (int q = 0; q < rule.size(); ++q) {
      const double w = rule.weights[q] * phys.detJ / (2.0 * mu);
      for (int r = 0; r < 2; ++r)
        for (int b = 0; b < dim; ++b) {
          const int i = r * dim + b;
          const auto& vi = phys.values[q][b];
          for (int r2 = 0; r2 < 2; ++r2)
            for (int b2 = 0; b2 < dim; ++b2) {
              const int j = r2 * dim + b2;
              if (j > i) continue;
              const auto& vj = phys.values[q][b2];
              double val = -0.5 * vi[r] * vj[r2];
              if (r == r2) val += vi[0] * vj[0] + vi[1] * vj[1];
              local(i, j) += w * val;
            }
        }
    }
    local = local.selfadjointView<Eigen::Lower>();
    detail::scatter_symmetric(local, sigma.cell_dofs[c], trips);
  }
  return detail::from_upper(sigma.ndof, trips);
}

// Full first block a((xi,r),(tau,q)) = a0(xi,tau)
//   + (gamma/mu) int (r + tr xi / 2)(q + tr tau / 2)
// over the combined (sigma, p) dofs; sigma dofs first, then pressure.
inline SpMat assemble_a_full(const FeSpace& sigma, const FeSpace& pressure,
                             double mu, double gamma = 1.0) {
  if (mu <= 0) throw std::invalid_argument("assemble_a_full: mu must be positive");
  if (sigma.mesh != pressure.mesh)
    throw std::invalid_argument("assemble_a_full: spaces on different meshes");
  const Mesh& mesh = *sigma.mesh;
  const auto& rule = sigma.basis.rule;
  const int dim = sigma.basis.dim;
  const int pdim = pressure.basis.dim;
  const int nloc = 2 * dim + pdim;
  const int n = sigma.ndof + pressure.ndof;

  std::vector<Eigen::Triplet<double>> trips;
  Eigen::MatrixXd local(nloc, nloc);
  std::vector<std::pair<int, double>> dofs(nloc);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    auto phys = piola_push(mesh.cell_coords(c), sigma.basis);
    local.setZero();
    for (int q = 0; q < rule.size(); ++q) {
      const double w = rule.weights[q] * phys.detJ;
      // trace factors: tr(phi) for a row-r tensor dof is the r-th component;
      // the pressure shape enters with weight 1
      for (int i = 0; i < nloc; ++i) {
        const double ti =
            i < 2 * dim
                ? 0.5 * phys.values[q][i % dim][i / dim]
                : pressure.basis.scalar_values[q][i - 2 * dim];
        for (int j = 0; j <= i; ++j) {
          const double tj =
              j < 2 * dim
                  ? 0.5 * phys.values[q][j % dim][j / dim]
                  : pressure.basis.scalar_values[q][j - 2 * dim];
          double val = (gamma / mu) * ti * tj;
          if (i < 2 * dim && j < 2 * dim) {
            const int r = i / dim, r2 = j / dim;
            const auto& vi = phys.values[q][i % dim];
            const auto& vj = phys.values[q][j % dim];
            double a0 = -0.5 * vi[r] * vj[r2];
            if (r == r2) a0 += vi[0] * vj[0] + vi[1] * vj[1];
            val += a0 / (2.0 * mu);
          }
          local(i, j) += w * val;
        }
      }
    }
    local = local.selfadjointView<Eigen::Lower>();
    for (int i = 0; i < 2 * dim; ++i) dofs[i] = sigma.cell_dofs[c][i];
    for (int i = 0; i < pdim; ++i) {
      dofs[2 * dim + i] = pressure.cell_dofs[c][i];
      dofs[2 * dim + i].first += sigma.ndof;
    }
    detail::scatter_symmetric(local, dofs, trips);
  }
  return detail::from_upper(n, trips);
}

// b(xi, v) = int v . div(xi), div taken row-wise.  Returns the rectangular
// matrix B with B(v dof, sigma dof); the Piola factors cancel so entries
// reduce to reference-cell integrals.
inline SpMat assemble_b(const FeSpace& sigma, const FeSpace& velocity) {
  if (sigma.mesh != velocity.mesh)
    throw std::invalid_argument("assemble_b: spaces on different meshes");
  if (sigma.basis.rule.degree != velocity.basis.rule.degree)
    throw std::invalid_argument("assemble_b: spaces must share a quadrature rule");
  const Mesh& mesh = *sigma.mesh;
  const auto& rule = sigma.basis.rule;
  const int dim = sigma.basis.dim;
  const int vdim = velocity.basis.dim;
  // the Piola and pullback Jacobian factors cancel, so the local matrix is
  // one reference-cell integral shared by every cell
  Eigen::MatrixXd local = Eigen::MatrixXd::Zero(vdim, dim);
  for (int q = 0; q < rule.size(); ++q)
    for (int a = 0; a < vdim; ++a)
      for (int b = 0; b < dim; ++b)
        local(a, b) += rule.weights[q] * velocity.basis.scalar_values[q][a] *
                       sigma.basis.divs[q][b];
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(mesh.num_cells()) * 2 * dim * vdim);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto& sdofs = sigma.cell_dofs[c];
    const auto& vdofs = velocity.cell_dofs[c];
    for (int r = 0; r < 2; ++r)
      for (int b = 0; b < dim; ++b) {
        const auto& [gs, sign] = sdofs[r * dim + b];
        for (int a = 0; a < vdim; ++a)
          trips.emplace_back(vdofs[r * vdim + a].first, gs, sign * local(a, b));
      }
  }
  SpMat B(velocity.ndof, sigma.ndof);
  B.setFromTriplets(trips.begin(), trips.end());
  return B;
}

// Velocity mass matrix; with the orthonormal reference basis it is diagonal
// with the cell area repeated per local shape function and component.
inline SpMat assemble_mass_u(const FeSpace& velocity) {
  const Mesh& mesh = *velocity.mesh;
  const auto& rule = velocity.basis.rule;
  const int dim = velocity.basis.dim;
  std::vector<Eigen::Triplet<double>> trips;
  Eigen::MatrixXd local(dim, dim);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const double detJ = 2.0 * signed_area(mesh.cell_coords(c));
    local.setZero();
    for (int q = 0; q < rule.size(); ++q)
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j <= i; ++j)
          local(i, j) += rule.weights[q] * detJ *
                         velocity.basis.scalar_values[q][i] *
                         velocity.basis.scalar_values[q][j];
    local = local.selfadjointView<Eigen::Lower>();
    const auto& dofs = velocity.cell_dofs[c];
    for (int r = 0; r < 2; ++r)
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
          const int gi = dofs[r * dim + i].first, gj = dofs[r * dim + j].first;
          if (gi <= gj) trips.emplace_back(gi, gj, local(i, j));
        }
  }
  return detail::from_upper(velocity.ndof, trips);
}

// Row-wise H(div) inner product int xi : tau + int div xi . div tau,
// used to normalize inf-sup estimates.
inline SpMat assemble_hdiv_gram(const FeSpace& sigma) {
  const Mesh& mesh = *sigma.mesh;
  const auto& rule = sigma.basis.rule;
  const int dim = sigma.basis.dim;
  std::vector<Eigen::Triplet<double>> trips;
  Eigen::MatrixXd local(2 * dim, 2 * dim);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    auto phys = piola_push(mesh.cell_coords(c), sigma.basis);
    local.setZero();
    for (int q = 0; q < rule.size(); ++q) {
      const double w = rule.weights[q] * phys.detJ;
      for (int r = 0; r < 2; ++r)
        for (int b = 0; b < dim; ++b)
          for (int b2 = 0; b2 < dim; ++b2) {
            const int i = r * dim + b, j = r * dim + b2;
            if (j > i) continue;
            const auto& vi = phys.values[q][b];
            const auto& vj = phys.values[q][b2];
            local(i, j) += w * (vi[0] * vj[0] + vi[1] * vj[1] +
                                phys.divs[q][b] * phys.divs[q][b2]);
          }
    }
    local = local.selfadjointView<Eigen::Lower>();
    detail::scatter_symmetric(local, sigma.cell_dofs[c], trips);
  }
  return detail::from_upper(sigma.ndof, trips);
}

struct BlockLayout {
  int sigma_offset = 0, sigma_size = 0;
  int p_offset = -1, p_size = 0;  // full formulation only
  int u_offset = 0, u_size = 0;
  int mult_offset = 0;  // single zero-mean-trace multiplier
  int total = 0;
};

// Generalized eigenproblem K z = lambda C z.  K is the symmetric
// saddle-point matrix over (sigma, [p,] u, multiplier) and C is -M on the
// velocity block; finite positive eigenvalues are the discrete Stokes
// eigenvalues.  The single multiplier row carries the zero-mean-trace
// constraint, without which K would be singular (sigma = c I, u = 0).
struct EigSystem {
  SpMat K, C;
  BlockLayout layout;
  Formulation formulation = Formulation::reduced;
  double mu = 0.5;
  double gamma = 1.0;
  FeSpace sigma_space, pressure_space, velocity_space;
  SpMat mass_u;
};

inline EigSystem build_eig_system(const Mesh& mesh, Family family, int k,
                                  Formulation formulation, double mu = 0.5,
                                  double gamma = 1.0) {
  EigSystem sys;
  sys.formulation = formulation;
  sys.mu = mu;
  sys.gamma = gamma;
  const int qd = default_quad_degree(k);
  sys.sigma_space = build_pseudostress_space(mesh, family, k, qd);
  sys.velocity_space = build_velocity_space(mesh, k, qd);

  BlockLayout& L = sys.layout;
  L.sigma_offset = 0;
  L.sigma_size = sys.sigma_space.ndof;
  int off = L.sigma_size;
  SpMat A;
  if (formulation == Formulation::full) {
    sys.pressure_space = build_pressure_space(mesh, k, qd);
    L.p_offset = off;
    L.p_size = sys.pressure_space.ndof;
    off += L.p_size;
    A = assemble_a_full(sys.sigma_space, sys.pressure_space, mu, gamma);
  } else {
    A = assemble_a0(sys.sigma_space, mu);
  }
  L.u_offset = off;
  L.u_size = sys.velocity_space.ndof;
  off += L.u_size;
  L.mult_offset = off;
  L.total = off + 1;

  SpMat B = assemble_b(sys.sigma_space, sys.velocity_space);
  sys.mass_u = assemble_mass_u(sys.velocity_space);
  Eigen::VectorXd t = build_trace_constraint(sys.sigma_space);

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(A.nonZeros()) + 2 * B.nonZeros() +
                2 * sys.sigma_space.ndof);
  for (int col = 0; col < A.outerSize(); ++col)
    for (SpMat::InnerIterator it(A, col); it; ++it)
      if (it.row() <= it.col()) trips.emplace_back(it.row(), it.col(), it.value());
  for (int col = 0; col < B.outerSize(); ++col)
    for (SpMat::InnerIterator it(B, col); it; ++it)
      trips.emplace_back(it.col(), L.u_offset + it.row(), it.value());
  for (int i = 0; i < sys.sigma_space.ndof; ++i)
    if (t(i) != 0.0) trips.emplace_back(i, L.mult_offset, t(i));
  sys.K = detail::from_upper(L.total, trips);

  std::vector<Eigen::Triplet<double>> ctrips;
  ctrips.reserve(sys.mass_u.nonZeros());
  for (int col = 0; col < sys.mass_u.outerSize(); ++col)
    for (SpMat::InnerIterator it(sys.mass_u, col); it; ++it)
      if (it.row() <= it.col())
        ctrips.emplace_back(L.u_offset + it.row(), L.u_offset + it.col(),
                            -it.value());
  sys.C = detail::from_upper(L.total, ctrips);
  return sys;
}

// Coordinate text export, 0-based "row col value" triplets.
inline void write_coordinate(std::ostream& os, const SpMat& m) {
  os << m.rows() << " " << m.cols() << " " << m.nonZeros() << "\n";
  char buf[64];
  for (int col = 0; col < m.outerSize(); ++col)
    for (SpMat::InnerIterator it(m, col); it; ++it) {
      std::snprintf(buf, sizeof(buf), "%d %d %.17g\n",
                    static_cast<int>(it.row()), static_cast<int>(it.col()),
                    it.value());
      os << buf;
    }
}

}  // namespace stokeseig
