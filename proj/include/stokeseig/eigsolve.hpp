// SPDX-License-Identifier: MIT
#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "stokeseig/assembly.hpp"

namespace stokeseig {

struct Spectrum {
  std::vector<double> eigenvalues;  // finite positive, ascending
  std::vector<Eigen::VectorXd> eigenvectors;
  std::vector<double> residuals;  // ||K z - lambda C z|| / ||K z||
  int nev_requested = 0;
  int nev_converged = 0;
  std::vector<std::string> warnings;
};

enum class SolverKind { automatic, dense, krylov };

// Map shift-invert values mu of S = K^-1 C to finite eigenvalues:
// |mu| <= max(tol_inf * max|mu|, 1e-13) encodes lambda = infinity and is
// dropped, as are negative mu; the rest become lambda = 1/mu, ascending.
// The absolute floor catches the case where every mu is roundoff noise from
// the infinite cluster (physical mu = 1/lambda sits many orders above it).
inline std::vector<double> filter_spectrum(const std::vector<double>& mu,
                                           double tol_inf = 1e-10,
                                           std::string* advisory = nullptr) {
  double mumax = 0;
  for (double m : mu) mumax = std::max(mumax, std::abs(m));
  const double cut = std::max(tol_inf * mumax, 1e-13);
  std::vector<double> lambdas;
  for (double m : mu) {
    if (std::abs(m) <= cut) continue;
    if (m < 0) continue;
    lambdas.push_back(1.0 / m);
  }
  std::sort(lambdas.begin(), lambdas.end());
  if (lambdas.empty() && advisory)
    *advisory =
        "no finite positive eigenvalues found; raise the Krylov subspace "
        "size or the requested count";
  return lambdas;
}

namespace detail {

constexpr double kTolInf = 1e-10;    // relative infinite-cluster cutoff
constexpr double kTolRitz = 1e-11;   // relative Ritz residual target
constexpr int kMaxIters = 400;

struct ShiftInvertOperator {
  const EigSystem* sys = nullptr;
  Eigen::SparseLU<SpMat>* lu = nullptr;
  SpMat M;  // velocity mass (= -C on the u block)

  int usize() const { return sys->layout.u_size; }

  // v -> -(K^-1)_{uu} M v, the action of K^-1 C restricted to the u block
  Eigen::VectorXd apply(const Eigen::VectorXd& v) const {
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(sys->layout.total);
    rhs.segment(sys->layout.u_offset, usize()) = M * v;
    Eigen::VectorXd x = lu->solve(rhs);
    return -x.segment(sys->layout.u_offset, usize());
  }

  // full eigenvector from a converged u-block vector: z = -(1/mu) K^-1 E_u M u
  Eigen::VectorXd lift(const Eigen::VectorXd& u, double mu) const {
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(sys->layout.total);
    rhs.segment(sys->layout.u_offset, usize()) = M * u;
    return -(1.0 / mu) * lu->solve(rhs);
  }
};

// Append one finished pair (lambda = 1/mu) to the spectrum: normalize the
// velocity block in the mass norm and record the true system residual.
// Pairs must arrive in ascending lambda order.
inline void finalize_pair(Spectrum& out, const ShiftInvertOperator& op,
                          double mu, Eigen::VectorXd z) {
  const auto& L = op.sys->layout;
  Eigen::VectorXd zu = z.segment(L.u_offset, L.u_size);
  const double unorm = std::sqrt(zu.dot(op.M * zu));
  if (unorm > 0) z /= unorm;
  const double lambda = 1.0 / mu;
  Eigen::VectorXd kz = op.sys->K * z;
  Eigen::VectorXd res = kz - lambda * (op.sys->C * z);
  out.eigenvalues.push_back(lambda);
  out.eigenvectors.push_back(std::move(z));
  out.residuals.push_back(res.norm() / kz.norm());
}

inline Spectrum solve_dense(const EigSystem& sys, int nev,
                            Eigen::SparseLU<SpMat>& lu) {
  const auto& L = sys.layout;
  ShiftInvertOperator op{&sys, &lu,
                         SpMat(-sys.C.block(L.u_offset, L.u_offset, L.u_size,
                                            L.u_size))};

  // factor M = V D V^T and keep the numerically positive part, so that
  // W = -D^1/2 V^T (K^-1)_{uu} V D^1/2 is symmetric with the nonzero
  // spectrum of K^-1 C
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> mes{Eigen::MatrixXd(op.M)};
  const Eigen::VectorXd d = mes.eigenvalues();
  const double dmax = d.maxCoeff();
  std::vector<int> keep;
  for (int i = 0; i < d.size(); ++i)
    if (d(i) > 1e-12 * dmax) keep.push_back(i);
  const int r = static_cast<int>(keep.size());

  Eigen::MatrixXd VD(L.u_size, r);  // V_+ D_+^1/2
  for (int j = 0; j < r; ++j)
    VD.col(j) = mes.eigenvectors().col(keep[j]) * std::sqrt(d(keep[j]));

  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(L.total, r);
  rhs.middleRows(L.u_offset, L.u_size) = VD;
  Eigen::MatrixXd X = lu.solve(rhs);
  Eigen::MatrixXd W =
      -(VD.transpose() * X.middleRows(L.u_offset, L.u_size));
  W = 0.5 * (W + W.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> wes(W);
  const Eigen::VectorXd theta = wes.eigenvalues();  // ascending
  double thmax = 0;
  for (int i = 0; i < r; ++i) thmax = std::max(thmax, std::abs(theta(i)));

  Spectrum out;
  out.nev_requested = nev;
  // largest positive mu first = ascending lambda; the lifted eigenvector is
  // z = -(1/mu) K^-1 E_u M u = -(1/mu) X w
  for (int i = r - 1; i >= 0 && out.nev_converged < nev; --i) {
    if (theta(i) <= std::max(kTolInf * thmax, 1e-13)) break;
    Eigen::VectorXd z = -(1.0 / theta(i)) * (X * wes.eigenvectors().col(i));
    finalize_pair(out, op, theta(i), std::move(z));
    ++out.nev_converged;
  }
  if (out.nev_converged < nev)
    out.warnings.push_back(
        "fewer finite positive eigenvalues than requested");
  return out;
}

// Rayleigh-Ritz subspace iteration on the velocity-block operator, expanded
// each sweep with the residuals of the leading unconverged Ritz pairs.  The
// residual of an unconverged pair cannot vanish, so progress never stalls,
// and pairs are accepted only as a contiguous prefix of the finite spectrum,
// so an interior eigenvalue can never be skipped silently.
inline Spectrum solve_krylov(const EigSystem& sys, int nev,
                             Eigen::SparseLU<SpMat>& lu) {
  const auto& L = sys.layout;
  ShiftInvertOperator op{&sys, &lu,
                         SpMat(-sys.C.block(L.u_offset, L.u_offset, L.u_size,
                                            L.u_size))};
  const int n = L.u_size;
  const int bsize = std::min(n, std::max(2, std::min(nev, 4)));
  const int mmax = std::min(n, std::max(4 * nev + 8, 48));
  const int nkeep = std::min(mmax - bsize, std::max(2 * nev + 2, 2 * bsize));

  Eigen::MatrixXd Q(n, mmax), MQ(n, mmax), Z(n, mmax);
  int ncols = 0;
  int applied = 0;

  auto fresh_column = [&](int seed) {
    Eigen::VectorXd v(n);
    if (seed == 0)
      v.setOnes();
    else
      for (int i = 0; i < n; ++i) v(i) = std::sin(0.7 * seed * (i + 1.0));
    return v;
  };

  int seed_counter = 0;
  // full reorthogonalization in the M inner product, two passes
  auto push_column = [&](Eigen::VectorXd v) -> bool {
    const double norm0 = std::sqrt(v.dot(op.M * v));
    for (int attempt = 0; attempt < 5; ++attempt) {
      for (int pass = 0; pass < 2; ++pass)
        if (ncols > 0)
          v -= Q.leftCols(ncols) * (MQ.leftCols(ncols).transpose() * v);
      Eigen::VectorXd mv = op.M * v;
      const double norm = std::sqrt(v.dot(mv));
      if (norm > std::max(1e-13 * norm0, 1e-300)) {
        Q.col(ncols) = v / norm;
        MQ.col(ncols) = mv / norm;
        ++ncols;
        return true;
      }
      v = fresh_column(++seed_counter);  // breakdown: substitute direction
    }
    return false;
  };

  Spectrum out;
  out.nev_requested = nev;

  const int nstart = std::min(std::min(n, mmax), std::max(nev + 2, bsize + 2));
  for (int j = 0; j < nstart; ++j) push_column(fresh_column(j));
  if (ncols == 0)
    throw std::runtime_error("eigensolver: mass inner product degenerate");

  Eigen::VectorXd theta;
  Eigen::MatrixXd ritz;
  std::vector<int> cand;                 // Ritz indices, mu descending
  std::vector<double> rnorm;             // their residual M-norms
  std::vector<Eigen::VectorXd> rvecs;    // their residual vectors
  int prefix = 0;                        // leading converged candidates

  auto emit_prefix = [&](int count) {
    for (int j = 0; j < count && out.nev_converged < nev; ++j) {
      const int i = cand[j];
      Eigen::VectorXd u = Q.leftCols(ncols) * ritz.col(i);
      finalize_pair(out, op, theta(i), op.lift(u, theta(i)));
      ++out.nev_converged;
    }
    if (out.nev_converged < nev)
      out.warnings.push_back(
          "fewer finite positive eigenvalues than requested");
  };

  for (int iter = 0; iter < kMaxIters; ++iter) {
    for (; applied < ncols; ++applied)
      Z.col(applied) = op.apply(Q.col(applied));

    Eigen::MatrixXd T = MQ.leftCols(ncols).transpose() * Z.leftCols(ncols);
    T = 0.5 * (T + T.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    theta = es.eigenvalues();  // ascending
    ritz = es.eigenvectors();
    const double thmax = theta.cwiseAbs().maxCoeff();
    const double cut = std::max(kTolInf * thmax, 1e-13);

    cand.clear();
    rnorm.clear();
    rvecs.clear();
    for (int i = ncols - 1;
         i >= 0 && static_cast<int>(cand.size()) < nev; --i) {
      if (theta(i) <= cut) break;  // infinite cluster or nonphysical sign
      Eigen::VectorXd s = ritz.col(i);
      Eigen::VectorXd rv =
          Z.leftCols(ncols) * s - theta(i) * (Q.leftCols(ncols) * s);
      cand.push_back(i);
      rnorm.push_back(std::sqrt(rv.dot(op.M * rv)));
      rvecs.push_back(std::move(rv));
    }
    prefix = 0;
    while (prefix < static_cast<int>(cand.size()) &&
           rnorm[prefix] <= kTolRitz * thmax)
      ++prefix;

    const bool whole_space = ncols == n;
    if (prefix >= nev ||
        (whole_space && prefix == static_cast<int>(cand.size()))) {
      emit_prefix(prefix);
      return out;
    }
    if (whole_space) {
      // exact extraction on the full space: residual floor is roundoff
      out.warnings.push_back("subspace reached the operator dimension");
      emit_prefix(prefix);
      return out;
    }

    // grow the subspace, compressing to the leading Ritz vectors first when
    // the cap would be exceeded (images transform consistently: Z = S Q is
    // linear in the columns and the Ritz transform is orthonormal)
    if (ncols + bsize > mmax) {
      const int keep = std::min(nkeep, ncols);
      Eigen::MatrixXd S(ncols, keep);
      for (int j = 0; j < keep; ++j) S.col(j) = ritz.col(ncols - 1 - j);
      Q.leftCols(keep) = (Q.leftCols(ncols) * S).eval();
      MQ.leftCols(keep) = (MQ.leftCols(ncols) * S).eval();
      Z.leftCols(keep) = (Z.leftCols(ncols) * S).eval();
      ncols = keep;
      applied = keep;
      continue;  // re-extract on the compressed basis, then expand
    }

    const int before = ncols;
    for (int j = prefix;
         j < static_cast<int>(cand.size()) && ncols - before < bsize; ++j) {
      if (rnorm[j] <= kTolRitz * thmax) continue;
      push_column(rvecs[j]);
    }
    if (static_cast<int>(cand.size()) < nev)  // reveal further candidates
      while (ncols - before < bsize && push_column(fresh_column(++seed_counter)))
        ;
    if (ncols == before) {
      out.warnings.push_back("eigensolver stagnated before convergence");
      emit_prefix(prefix);
      return out;
    }
  }

  out.warnings.push_back("eigensolver hit the iteration limit");
  emit_prefix(prefix);
  return out;
}

}  // namespace detail

// Shift-invert solve at theta = 0: factor K once with sparse LU, iterate on
// the velocity-block operator -(K^-1)_{uu} M whose nonzero eigenvalues are
// the reciprocals 1/lambda of the finite spectrum.  Dense reduction is used
// automatically for systems up to 1500 unknowns and on request.
inline Spectrum solve_generalized(const EigSystem& sys, int nev,
                                  SolverKind kind = SolverKind::automatic) {
  if (nev < 1) throw std::invalid_argument("solve_generalized: nev must be >= 1");
  Eigen::SparseLU<SpMat> lu;
  lu.compute(sys.K);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error("singular saddle-point system");
  if (kind == SolverKind::automatic)
    kind = sys.K.rows() <= 1500 ? SolverKind::dense : SolverKind::krylov;
  return kind == SolverKind::dense ? detail::solve_dense(sys, nev, lu)
                                   : detail::solve_krylov(sys, nev, lu);
}

}  // namespace stokeseig
