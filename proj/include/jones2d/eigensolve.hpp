#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <vector>

#include "jones2d/assembly.hpp"
#include "jones2d/common.hpp"
#include "jones2d/constraints.hpp"
#include "jones2d/material.hpp"
#include "jones2d/mesh.hpp"
#include "jones2d/rigid_motions.hpp"

namespace jones {

enum class ShiftMode { automatic, on, off };

inline const char* to_string(ShiftMode s) {
  switch (s) {
    case ShiftMode::automatic: return "automatic";
    case ShiftMode::on: return "on";
    default: return "off";
  }
}

/// Solver configuration for the constrained eigenproblem.
struct SolveConfig {
  ConstraintKind kind = ConstraintKind::normal_zero;
  ShiftMode shift = ShiftMode::automatic;
  int k = 6;
  double tol = 1e-10;
  int max_dense = 6000;
  int max_iterations = 300;
  CornerPolicy corner;
  double c_geo = 1.0;  // scales the h^2 zero-classification band on curved sigma
  unsigned seed = 0x6a6f6e65;
};

struct PencilSolution {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // B-orthonormal columns
  bool dense_path = false;
  int iterations = 0;
};

namespace detail {

inline Eigen::MatrixXd seeded_gaussian(int rows, int cols, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> dist;
  Eigen::MatrixXd X(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) X(i, j) = dist(rng);
  return X;
}

/// B-orthonormalizes the columns of X, replacing numerically dependent
/// directions with fresh seeded ones.
inline void b_orthonormalize(Eigen::MatrixXd& X, const SpMat& B, unsigned seed) {
  for (int round = 0; round < 4; ++round) {
    const Eigen::MatrixXd S = X.transpose() * (B * X);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        0.5 * (S + S.transpose()));
    const double smax = es.eigenvalues().maxCoeff();
    require(smax > 0.0, "eigensolver: zero subspace in B-orthonormalization");
    const int b = static_cast<int>(X.cols());
    int kept = 0;
    Eigen::MatrixXd Y(X.rows(), b);
    for (int i = b - 1; i >= 0; --i) {
      if (es.eigenvalues()[i] > 1e-13 * smax) {
        Y.col(kept++) =
            X * es.eigenvectors().col(i) / std::sqrt(es.eigenvalues()[i]);
      }
    }
    if (kept == b) {
      X = Y;
      return;
    }
    for (int i = kept; i < b; ++i)
      Y.col(i) = seeded_gaussian(static_cast<int>(X.rows()), 1,
                                 seed + 7919 * (round + 1) + i);
    X = Y;
  }
  fail("eigensolver: B-orthonormalization failed to reach full rank");
}

}  // namespace detail

/// k smallest eigenpairs of the symmetric pencil A z = lambda B z with
/// B positive definite. Below the dense cap this is a direct dense
/// symmetric-definite solve (the reference path); above it, blocked
/// shift-invert subspace iteration on (A - sigma B)^{-1} B with
/// Rayleigh-Ritz extraction, which resolves multiple eigenvalues
/// without special casing. sigma must lie strictly below the smallest
/// eigenvalue.
inline PencilSolution smallest_eigenpairs(const SpMat& A, const SpMat& B, int k,
                                          double sigma, double tol,
                                          int max_dense, int max_iterations,
                                          unsigned seed) {
  const int n = static_cast<int>(A.rows());
  require(B.rows() == n && B.cols() == n, "pencil dimension mismatch");
  require(k >= 1 && k <= n, "requested eigenpair count out of range");
  PencilSolution sol;
  if (n <= max_dense) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es{
        Eigen::MatrixXd(A), Eigen::MatrixXd(B)};
    require(es.info() == Eigen::Success, "dense generalized eigensolve failed");
    sol.values = es.eigenvalues().head(k);
    sol.vectors = es.eigenvectors().leftCols(k);
    sol.dense_path = true;
    return sol;
  }

  SpMat C = A - sigma * B;
  Eigen::SimplicialLDLT<SpMat> factor(C);
  require(factor.info() == Eigen::Success,
          "factorization of the shifted operator failed");

  const int block = std::min(n, std::max(2 * k, k + 8));
  Eigen::MatrixXd X = detail::seeded_gaussian(n, block, seed);
  detail::b_orthonormalize(X, B, seed);

  Eigen::VectorXd theta;
  for (int iter = 1; iter <= max_iterations; ++iter) {
    const Eigen::MatrixXd AX = A * X;
    const Eigen::MatrixXd BX = B * X;
    const Eigen::MatrixXd Ap = X.transpose() * AX;
    const Eigen::MatrixXd Bp = X.transpose() * BX;
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> rr(
        0.5 * (Ap + Ap.transpose()), 0.5 * (Bp + Bp.transpose()));
    require(rr.info() == Eigen::Success, "Rayleigh-Ritz solve failed");
    theta = rr.eigenvalues();
    const Eigen::MatrixXd W = rr.eigenvectors();
    const Eigen::MatrixXd Xr = X * W;
    const Eigen::MatrixXd AXr = AX * W;
    const Eigen::MatrixXd BXr = BX * W;

    bool converged = true;
    for (int i = 0; i < k && converged; ++i) {
      const double rnorm = (AXr.col(i) - theta[i] * BXr.col(i)).norm();
      converged = rnorm <= tol * std::max(1.0, std::abs(theta[i])) *
                               std::max(BXr.col(i).norm(), 1e-300);
    }
    if (converged) {
      sol.values = theta.head(k);
      sol.vectors = Xr.leftCols(k);
      sol.iterations = iter;
      return sol;
    }
    X = factor.solve(BXr);
    require(factor.info() == Eigen::Success, "shift-invert solve failed");
    detail::b_orthonormalize(X, B, seed + iter);
  }
  fail("eigensolver did not converge within " +
       std::to_string(max_iterations) + " subspace iterations");
}

/// Largest pencil eigenvalue estimate (power iteration on B^{-1}A),
/// used only to scale tolerance thresholds.
inline double pencil_lambda_max(const SpMat& A, const SpMat& B) {
  Eigen::SimplicialLDLT<SpMat> bfac(B);
  require(bfac.info() == Eigen::Success, "mass factorization failed");
  Eigen::VectorXd z = Eigen::VectorXd::Ones(A.rows()).normalized();
  double lambda = 0.0;
  for (int it = 0; it < 30; ++it) {
    const Eigen::VectorXd w = bfac.solve(A * z);
    lambda = z.dot(A * z) / z.dot(B * z);
    const double nw = w.norm();
    if (nw == 0.0) break;
    z = w / nw;
  }
  return std::abs(lambda);
}

/// Eigenpairs of the reduced problem with residuals, classification,
/// and the lifted full-space modes (B-orthonormal).
struct SpectralResult {
  Eigen::VectorXd eigenvalues;      // omega^2, ascending
  Eigen::MatrixXd modes;            // full nodal fields, one column per pair
  Eigen::VectorXd residuals;        // ||A u - w^2 B u|| / ||B u||, reduced
  Eigen::VectorXd rayleigh;         // a(u,u)/b(u,u) per mode
  std::vector<int> cluster;         // multiplicity cluster id per eigenvalue
  bool shift_used = false;
  bool dense_path = false;
  int iterations = 0;
  int k_requested = 0;
  bool k_clamped = false;
  int kernel_dim = 0;
  double lambda_max_est = 0.0;
  double eps_zero = 0.0;
  int zero_count = 0;
  double b_orthonormality_defect = 0.0;
  double h = 0.0;
  bool curved_sigma = false;
  std::shared_ptr<ConstraintReduction> reduction;
};

namespace detail {

inline std::vector<int> cluster_eigenvalues(const Eigen::VectorXd& vals,
                                            double floor_scale) {
  std::vector<int> ids(vals.size(), 0);
  for (int i = 1; i < vals.size(); ++i) {
    const double gap = vals[i] - vals[i - 1];
    const double scale =
        std::max({std::abs(vals[i]), std::abs(vals[i - 1]), floor_scale});
    ids[i] = ids[i - 1] + (gap > 1e-6 * scale ? 1 : 0);
  }
  return ids;
}

}  // namespace detail

/// Residual of one full-space pair against the reduced pencil:
/// ||P'(A u - w^2 B u)|| / ||P'(B u)||; with no reduction the full
/// residual is used.
inline double pair_residual(const SpMat& A, const SpMat& B,
                            const Eigen::VectorXd& u, double omega2,
                            const ConstraintReduction* red = nullptr) {
  Eigen::VectorXd rA = A * u - omega2 * (B * u);
  Eigen::VectorXd rB = B * u;
  if (red != nullptr) {
    rA = red->restrict(rA);
    rB = red->restrict(rB);
  }
  return rA.norm() / std::max(rB.norm(), 1e-300);
}

/// Recomputes all per-pair residuals independently of the solver path.
inline Eigen::VectorXd residual_report(const SpectralResult& result,
                                       const SpMat& A, const SpMat& B) {
  Eigen::VectorXd res(result.eigenvalues.size());
  for (int i = 0; i < res.size(); ++i)
    res[i] = pair_residual(A, B, result.modes.col(i), result.eigenvalues[i],
                           result.reduction.get());
  return res;
}

/// Solves the constrained eigenproblem a(u,v) = w^2 b(u,v) on the
/// admissible subspace for the requested trace constraint. With
/// shift=automatic the pencil is shifted to (a + b, b) whenever
/// admissible rigid motions exist, and the reported eigenvalues are
/// mapped back by w^2 = (shifted value) - 1.
inline SpectralResult solve_eigen(const Mesh2D& mesh, const MaterialParams& params,
                                  const SigmaSelector& sel, const SolveConfig& cfg) {
  validate(params, mesh);
  auto red = std::make_shared<ConstraintReduction>(
      build_reduction(mesh, sel, cfg.kind, cfg.corner));
  const SpMat A = assemble_stiffness(mesh, params);
  const SpMat B = assemble_mass(mesh, params);
  const SpMat Ar = reduce_matrix(A, *red);
  const SpMat Br = reduce_matrix(B, *red);

  const KernelResult kern = kernel_dimension(mesh, sel, cfg.kind);
  const bool shifted = cfg.shift == ShiftMode::on ||
                       (cfg.shift == ShiftMode::automatic && kern.dim > 0);

  SpectralResult out;
  out.k_requested = cfg.k;
  const int M = red->reduced_dim;
  require(M >= 1, "constraint reduction left no free degrees of freedom");
  int k = cfg.k;
  if (k > M) {
    k = M;
    out.k_clamped = true;
  }

  PencilSolution sol;
  if (shifted) {
    const SpMat At = Ar + Br;
    sol = smallest_eigenpairs(At, Br, k, 0.0, cfg.tol, cfg.max_dense,
                              cfg.max_iterations, cfg.seed);
    sol.values.array() -= 1.0;
  } else {
    sol = smallest_eigenpairs(Ar, Br, k, -1.0, cfg.tol, cfg.max_dense,
                              cfg.max_iterations, cfg.seed);
  }

  out.shift_used = shifted;
  out.dense_path = sol.dense_path;
  out.iterations = sol.iterations;
  out.kernel_dim = kern.dim;
  out.eigenvalues = sol.values;
  out.modes.resize(red->full_dim, k);
  for (int i = 0; i < k; ++i) out.modes.col(i) = red->lift(sol.vectors.col(i));
  out.reduction = red;
  out.h = red->h;
  out.curved_sigma = red->curved_sigma;

  out.residuals = residual_report(out, A, B);
  out.rayleigh.resize(k);
  for (int i = 0; i < k; ++i) {
    const Eigen::VectorXd& z = sol.vectors.col(i);
    out.rayleigh[i] = z.dot(Ar * z) / z.dot(Br * z);
  }
  const Eigen::MatrixXd gram =
      sol.vectors.transpose() * (Br * sol.vectors);
  out.b_orthonormality_defect =
      (gram - Eigen::MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff();

  out.lambda_max_est = pencil_lambda_max(Ar, Br);
  out.eps_zero = std::max(1e-9 * out.lambda_max_est,
                          red->curved_sigma ? cfg.c_geo * red->h * red->h : 0.0);
  for (int i = 0; i < k; ++i)
    if (out.eigenvalues[i] <= out.eps_zero) ++out.zero_count;
  out.cluster = detail::cluster_eigenvalues(out.eigenvalues, out.eps_zero);
  return out;
}

/// Discrete solution operator u = T(f) of the source problem
/// a(u,v) = b(f,v) on the admissible subspace. Requires a coercive
/// configuration unless `shifted` selects the form a + b instead.
inline Eigen::VectorXd solve_source(const Mesh2D& mesh,
                                    const MaterialParams& params,
                                    const SigmaSelector& sel, ConstraintKind kind,
                                    const Eigen::VectorXd& f,
                                    bool shifted = false,
                                    CornerPolicy corner = {}) {
  validate(params, mesh);
  const ConstraintReduction red = build_reduction(mesh, sel, kind, corner);
  require(f.size() == red.full_dim, "source field has wrong dimension");
  if (!shifted) {
    const KernelResult kern = kernel_dimension(mesh, sel, kind);
    require(kern.dim == 0,
            "reduced stiffness is singular (admissible rigid motions present); "
            "solve with the shifted form a + b instead");
  }
  const SpMat A = assemble_stiffness(mesh, params);
  const SpMat B = assemble_mass(mesh, params);
  const SpMat Ar = reduce_matrix(A, red);
  const SpMat Br = reduce_matrix(B, red);
  const SpMat K = shifted ? SpMat(Ar + Br) : Ar;

  Eigen::SimplicialLDLT<SpMat> factor(K);
  require(factor.info() == Eigen::Success,
          "source solve factorization failed; the configuration may need the "
          "shifted form a + b");
  const Eigen::VectorXd rhs = red.restrict(B * f);
  Eigen::VectorXd z = factor.solve(rhs);
  // Iterative refinement down to the contract tolerance.
  const double rhs_norm = std::max(rhs.norm(), 1e-300);
  for (int it = 0; it < 4; ++it) {
    const Eigen::VectorXd r = rhs - K * z;
    if (r.norm() <= 1e-12 * rhs_norm) break;
    z += factor.solve(r);
  }
  require((rhs - K * z).norm() <= 1e-10 * rhs_norm,
          "source solve did not reach the requested tolerance");
  return red.lift(z);
}

}  // namespace jones
