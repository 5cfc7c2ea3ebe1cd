#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdio>
#include <ostream>
#include <vector>

#include "jones2d/common.hpp"
#include "jones2d/material.hpp"
#include "jones2d/mesh.hpp"

namespace jones {

using SpMat = Eigen::SparseMatrix<double>;

/// Nodal degree-of-freedom numbering: DOF 2i is the x-component at
/// vertex i, DOF 2i+1 the y-component.
struct DofMap {
  int vertex_count = 0;
  int dof_count() const { return 2 * vertex_count; }
  static int x(int v) { return 2 * v; }
  static int y(int v) { return 2 * v + 1; }
};

inline DofMap dof_map(const Mesh2D& m) { return DofMap{m.vertex_count()}; }

namespace detail {

/// Constant gradients of the three barycentric shape functions on an
/// affine triangle (columns), and the triangle area.
inline Eigen::Matrix<double, 2, 3> shape_gradients(const Mesh2D& m, int t,
                                                   double& area) {
  const auto& tri = m.triangles[t];
  Eigen::Matrix2d J;
  J.col(0) = m.vertices[tri[1]] - m.vertices[tri[0]];
  J.col(1) = m.vertices[tri[2]] - m.vertices[tri[0]];
  const double det = J.determinant();
  require(det > 0.0, "degenerate element " + std::to_string(t));
  area = 0.5 * det;
  Eigen::Matrix<double, 2, 3> ref;
  ref << -1, 1, 0, -1, 0, 1;
  return J.inverse().transpose() * ref;
}

/// Strain-displacement matrix in Voigt order (e11, e22, 2*e12) for the
/// interleaved element DOFs (x0,y0,x1,y1,x2,y2).
inline Eigen::Matrix<double, 3, 6> strain_matrix(
    const Eigen::Matrix<double, 2, 3>& G) {
  Eigen::Matrix<double, 3, 6> B = Eigen::Matrix<double, 3, 6>::Zero();
  for (int k = 0; k < 3; ++k) {
    B(0, 2 * k) = G(0, k);
    B(1, 2 * k + 1) = G(1, k);
    B(2, 2 * k) = G(1, k);
    B(2, 2 * k + 1) = G(0, k);
  }
  return B;
}

/// Assembles one symmetric 6x6 element matrix per triangle into a
/// global sparse matrix, inserting (i,j) and (j,i) from the same value
/// so the result is symmetric exactly.
template <class ElementFn>
SpMat assemble(const Mesh2D& m, ElementFn&& element_matrix) {
  const DofMap dm = dof_map(m);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(36 * m.triangle_count());
  for (int t = 0; t < m.triangle_count(); ++t) {
    const Eigen::Matrix<double, 6, 6> Ke = element_matrix(t);
    const auto& tri = m.triangles[t];
    int dof[6];
    for (int k = 0; k < 3; ++k) {
      dof[2 * k] = DofMap::x(tri[k]);
      dof[2 * k + 1] = DofMap::y(tri[k]);
    }
    for (int a = 0; a < 6; ++a) {
      trips.emplace_back(dof[a], dof[a], Ke(a, a));
      for (int b = a + 1; b < 6; ++b) {
        trips.emplace_back(dof[a], dof[b], Ke(a, b));
        trips.emplace_back(dof[b], dof[a], Ke(a, b));
      }
    }
  }
  SpMat M(dm.dof_count(), dm.dof_count());
  M.setFromTriplets(trips.begin(), trips.end());
  M.makeCompressed();
  return M;
}

}  // namespace detail

/// Strain tensor of a P1 field on one element: constant, the
/// symmetric part of the displacement gradient.
inline Eigen::Matrix2d strain(const Mesh2D& m, int t,
                              const Eigen::VectorXd& nodal) {
  double area;
  const auto G = detail::shape_gradients(m, t, area);
  Eigen::Matrix2d grad = Eigen::Matrix2d::Zero();
  const auto& tri = m.triangles[t];
  for (int k = 0; k < 3; ++k) {
    const Vec2 u(nodal[DofMap::x(tri[k])], nodal[DofMap::y(tri[k])]);
    grad += u * G.col(k).transpose();
  }
  return 0.5 * (grad + grad.transpose());
}

/// Cauchy stress sigma = 2 mu eps + lambda tr(eps) I.
inline Eigen::Matrix2d stress(const Eigen::Matrix2d& eps,
                              const MaterialParams& p) {
  return 2.0 * p.mu * eps + p.lambda * eps.trace() * Eigen::Matrix2d::Identity();
}

/// Stiffness matrix A with v'Au = integral of sigma(u):eps(v), exact
/// for P1 fields. Without constraints its null space is the span of
/// the three discrete rigid motions.
inline SpMat assemble_stiffness(const Mesh2D& m, const MaterialParams& p) {
  Eigen::Matrix3d D;
  D << 2 * p.mu + p.lambda, p.lambda, 0,
       p.lambda, 2 * p.mu + p.lambda, 0,
       0, 0, p.mu;
  return detail::assemble(m, [&](int t) -> Eigen::Matrix<double, 6, 6> {
    double area;
    const auto B = detail::strain_matrix(detail::shape_gradients(m, t, area));
    return area * B.transpose() * D * B;
  });
}

/// Gram matrix of the strain inner product (eps(u), eps(v)); equals
/// the stiffness with mu = 1/2, lambda = 0.
inline SpMat assemble_strain_gram(const Mesh2D& m) {
  Eigen::Matrix3d D;
  D << 1, 0, 0, 0, 1, 0, 0, 0, 0.5;
  return detail::assemble(m, [&](int t) -> Eigen::Matrix<double, 6, 6> {
    double area;
    const auto B = detail::strain_matrix(detail::shape_gradients(m, t, area));
    return area * B.transpose() * D * B;
  });
}

/// Mass matrix B with v'Bu = integral of rho u.v, integrated exactly
/// for piecewise-constant rho (consistent P1 mass per component).
inline SpMat assemble_mass(const Mesh2D& m, const MaterialParams& p) {
  Eigen::Matrix3d mref;
  mref << 2, 1, 1, 1, 2, 1, 1, 1, 2;
  return detail::assemble(m, [&](int t) -> Eigen::Matrix<double, 6, 6> {
    double area;
    detail::shape_gradients(m, t, area);
    const Eigen::Matrix3d ml = (p.rho.at(t) * area / 12.0) * mref;
    Eigen::Matrix<double, 6, 6> Me = Eigen::Matrix<double, 6, 6>::Zero();
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        Me(2 * a, 2 * b) = ml(a, b);
        Me(2 * a + 1, 2 * b + 1) = ml(a, b);
      }
    return Me;
  });
}

/// H1 Gram matrix M1 with v'M1u = integral of u.v + grad(u):grad(v).
inline SpMat assemble_h1_gram(const Mesh2D& m) {
  Eigen::Matrix3d mref;
  mref << 2, 1, 1, 1, 2, 1, 1, 1, 2;
  return detail::assemble(m, [&](int t) -> Eigen::Matrix<double, 6, 6> {
    double area;
    const auto G = detail::shape_gradients(m, t, area);
    const Eigen::Matrix3d grad = area * G.transpose() * G;
    const Eigen::Matrix3d ml = (area / 12.0) * mref + grad;
    Eigen::Matrix<double, 6, 6> Me = Eigen::Matrix<double, 6, 6>::Zero();
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        Me(2 * a, 2 * b) = ml(a, b);
        Me(2 * a + 1, 2 * b + 1) = ml(a, b);
      }
    return Me;
  });
}

/// Coordinate-format text dump: one "i j value" line per stored entry,
/// 0-based indices.
inline void dump_matrix(const SpMat& M, std::ostream& os) {
  char buf[96];
  for (int k = 0; k < M.outerSize(); ++k)
    for (SpMat::InnerIterator it(M, k); it; ++it) {
      std::snprintf(buf, sizeof buf, "%ld %ld %.17g", long(it.row()),
                    long(it.col()), it.value());
      os << buf << "\n";
    }
}

}  // namespace jones
