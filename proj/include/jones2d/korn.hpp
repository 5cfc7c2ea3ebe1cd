#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <memory>

#include "jones2d/assembly.hpp"
#include "jones2d/constraints.hpp"
#include "jones2d/eigensolve.hpp"
#include "jones2d/mesh.hpp"
#include "jones2d/rigid_motions.hpp"

namespace jones {

/// Discrete Korn estimate: theta_min is the smallest eigenvalue of
/// the strain Gram against the H1 Gram on the admissible subspace,
/// i.e. the minimum of ||eps(u)||^2 / ||u||_1^2, and the Korn constant
/// is theta_min^{-1/2} (finite exactly when no admissible rigid
/// motion exists).
struct KornEstimate {
  double theta_min = 0.0;
  double korn_constant = std::numeric_limits<double>::infinity();
  ConstraintKind kind = ConstraintKind::normal_zero;
  double h = 0.0;
  bool curved_sigma = false;
  Eigen::VectorXd minimizer;     // full-space nodal field
  double rayleigh_defect = 0.0;  // |theta_min - Rayleigh(minimizer)| consistency
  bool dense_path = true;
};

struct KornOptions {
  int max_dense = 6000;
  double tol = 1e-11;
  int max_iterations = 400;
  CornerPolicy corner;
  unsigned seed = 0x6b6f726e;
};

inline KornEstimate estimate_korn(const Mesh2D& mesh, const SigmaSelector& sel,
                                  ConstraintKind kind, KornOptions opts = {}) {
  const ConstraintReduction red = build_reduction(mesh, sel, kind, opts.corner);
  const SpMat Ke = reduce_matrix(assemble_strain_gram(mesh), red);
  const SpMat M1 = reduce_matrix(assemble_h1_gram(mesh), red);

  // Exact pencil shift by a tiny multiple of M1 keeps the factorized
  // operator definite when theta_min is an exact zero.
  double m1_trace = 0.0;
  for (int i = 0; i < M1.rows(); ++i) m1_trace += M1.coeff(i, i);
  const double reg = 1e-14 * m1_trace;
  const SpMat Kreg = Ke + reg * M1;

  const PencilSolution sol =
      smallest_eigenpairs(Kreg, M1, 1, -1e-2, opts.tol, opts.max_dense,
                          opts.max_iterations, opts.seed);
  KornEstimate est;
  est.theta_min = sol.values[0] - reg;
  est.kind = kind;
  est.h = red.h;
  est.curved_sigma = red.curved_sigma;
  est.dense_path = sol.dense_path;
  est.minimizer = red.lift(sol.vectors.col(0));
  const Eigen::VectorXd& z = sol.vectors.col(0);
  const double rq = z.dot(Ke * z) / z.dot(M1 * z);
  est.rayleigh_defect = std::abs(est.theta_min - rq);
  if (est.theta_min > 0.0) est.korn_constant = 1.0 / std::sqrt(est.theta_min);
  return est;
}

/// Zero threshold for theta_min, h^2-aware on polygonalized curved
/// boundaries for the same reason as the eigenvalue classification.
inline double korn_zero_threshold(const KornEstimate& est) {
  return est.curved_sigma ? std::max(1e-12, est.h * est.h) : 1e-12;
}

struct KornCrossCheck {
  bool consistent = false;
  int kernel_dim = 0;
  double theta_min = 0.0;
  double threshold = 0.0;
};

/// Verifies that the Korn quotient degenerates exactly when the
/// rigid-motion kernel is non-trivial.
inline KornCrossCheck korn_cross_check(const Mesh2D& mesh,
                                       const SigmaSelector& sel,
                                       ConstraintKind kind,
                                       KornOptions opts = {}) {
  const KernelResult kern = kernel_dimension(mesh, sel, kind);
  const KornEstimate est = estimate_korn(mesh, sel, kind, opts);
  KornCrossCheck chk;
  chk.kernel_dim = kern.dim;
  chk.theta_min = est.theta_min;
  chk.threshold = korn_zero_threshold(est);
  const bool korn_holds = est.theta_min > chk.threshold;
  chk.consistent = (kern.dim == 0) == korn_holds;
  return chk;
}

}  // namespace jones
