#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "jones2d/assembly.hpp"
#include "jones2d/common.hpp"
#include "jones2d/constraints.hpp"
#include "jones2d/mesh.hpp"

namespace jones {

/// The rigid-motion basis in 2D: translations t1, t2 and the rotation
/// about the origin r(x) = (-x2, x1). Rotations about any other
/// center are linear combinations of these three.
inline Vec2 rigid_motion_value(int j, const Vec2& x) {
  switch (j) {
    case 0: return Vec2(1.0, 0.0);
    case 1: return Vec2(0.0, 1.0);
    default: return Vec2(-x.y(), x.x());
  }
}

/// Nodal interpolants of the three rigid motions (exactly represented
/// by P1 elements, hence exactly in the stiffness null space).
inline std::array<Eigen::VectorXd, 3> rigid_basis_fields(const Mesh2D& m) {
  std::array<Eigen::VectorXd, 3> fields;
  const int n = dof_map(m).dof_count();
  for (int j = 0; j < 3; ++j) {
    fields[j].resize(n);
    for (int v = 0; v < m.vertex_count(); ++v) {
      const Vec2 w = rigid_motion_value(j, m.vertices[v]);
      fields[j][DofMap::x(v)] = w.x();
      fields[j][DofMap::y(v)] = w.y();
    }
  }
  return fields;
}

namespace detail {

/// Two-point Gauss rule on a segment, exact for quadratics; the rigid
/// traces are linear along straight facets so their products are
/// integrated exactly.
template <class Fn>
double facet_integral(const Vec2& p, const Vec2& q, Fn&& f) {
  const double len = (q - p).norm();
  const Vec2 mid = 0.5 * (p + q);
  const Vec2 half = 0.5 * (q - p);
  const double s = 1.0 / std::sqrt(3.0);
  return 0.5 * len * (f(mid - s * half) + f(mid + s * half));
}

}  // namespace detail

/// 3x3 Gram matrix of the constrained trace of the rigid basis over
/// the selected facets: G_jk = integral over Sigma of (w_j.d)(w_k.d)
/// with d the facet normal (normal_zero) or tangent (tangential_zero).
inline Eigen::Matrix3d boundary_gram(const Mesh2D& m, const SigmaSelector& sel,
                                     ConstraintKind kind) {
  sigma_measure(m, sel);  // validates the selection
  Eigen::Matrix3d G = Eigen::Matrix3d::Zero();
  for (int f = 0; f < m.facet_count(); ++f) {
    const auto& bf = m.boundary[f];
    if (!facet_selected(bf, sel)) continue;
    const Vec2 d = kind == ConstraintKind::normal_zero
                       ? bf.normal
                       : Vec2(-bf.normal.y(), bf.normal.x());
    for (int j = 0; j < 3; ++j)
      for (int k = j; k < 3; ++k) {
        const double v = detail::facet_integral(
            m.vertices[bf.a], m.vertices[bf.b], [&](const Vec2& x) {
              return rigid_motion_value(j, x).dot(d) *
                     rigid_motion_value(k, x).dot(d);
            });
        G(j, k) = G(k, j) = G(j, k) + v;
      }
  }
  return G;
}

struct KernelResult {
  int dim = 0;
  Eigen::Matrix3d gram = Eigen::Matrix3d::Zero();
  Eigen::Vector3d eigenvalues = Eigen::Vector3d::Zero();
  std::vector<Eigen::Vector3d> basis;  // coefficients in {t1, t2, r}
  double tolerance = 0.0;
  bool curved_sigma = false;
};

/// Dimension of the rigid motions admissible under the trace
/// constraint, computed as the numerical null space of the boundary
/// Gram. The cutoff is 1e-10 * trace for straight subsets; on
/// polygonalized curved ones a rigid motion tangent to the underlying
/// smooth curve leaves the exact facet-wise residual
/// sum_f L_f^3 / 12 (an O(h^2) quantity), so the cutoff is that sum
/// with a 4x margin.
inline KernelResult kernel_dimension(const Mesh2D& m, const SigmaSelector& sel,
                                     ConstraintKind kind) {
  const SigmaInfo info = sigma_info(m, sel);
  KernelResult res;
  res.gram = boundary_gram(m, sel, kind);
  res.curved_sigma = info.curved;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(res.gram);
  res.eigenvalues = es.eigenvalues();
  double cubes = 0.0;
  for (int f = 0; f < m.facet_count(); ++f)
    if (facet_selected(m.boundary[f], sel))
      cubes += std::pow(m.facet_length(f), 3);
  res.tolerance = std::max(1e-10 * res.gram.trace(),
                           info.curved ? cubes / 3.0 : 0.0);
  for (int i = 0; i < 3; ++i)
    if (res.eigenvalues[i] < res.tolerance) {
      ++res.dim;
      res.basis.push_back(es.eigenvectors().col(i));
    }
  return res;
}

struct BoundarySegment {
  Vec2 p, q;
  Vec2 normal;
};

inline std::vector<BoundarySegment> boundary_segments(const Mesh2D& m) {
  std::vector<BoundarySegment> segs;
  segs.reserve(m.facet_count());
  for (const auto& f : m.boundary)
    segs.push_back({m.vertices[f.a], m.vertices[f.b], f.normal});
  return segs;
}

struct AxisymmetryResult {
  bool axisymmetric = false;
  bool line_degenerate = false;
  Vec2 center = Vec2::Zero();
  double misfit = 0.0;       // F(c*) / (|Gamma| * mean_radius^2)
  double mean_radius = 0.0;  // mean distance from c* to the boundary
  double tolerance = 0.0;
};

/// Fits the rotation center by minimizing F(c) = integral over the
/// boundary of |((x - c) rotated 90).n|^2 ds, a quadratic in c solved
/// by one symmetric 2x2 system. The domain is axisymmetric when the
/// normalized misfit falls below max(1e-10, (h / mean_radius)^2).
inline AxisymmetryResult detect_axisymmetry(
    const std::vector<BoundarySegment>& segs, double h) {
  require(!segs.empty(), "axisymmetry fit needs a boundary");
  Eigen::Matrix2d M = Eigen::Matrix2d::Zero();
  Vec2 rhs = Vec2::Zero();
  double g2 = 0.0, total_len = 0.0;
  for (const auto& s : segs) {
    const Vec2 mdir(s.normal.y(), -s.normal.x());  // coefficient of c in c_perp.n
    const double len = (s.q - s.p).norm();
    total_len += len;
    M += detail::facet_integral(s.p, s.q, [&](const Vec2&) { return 1.0; }) *
         (mdir * mdir.transpose());
    const auto g = [&](const Vec2& x) {
      return Vec2(-x.y(), x.x()).dot(s.normal);
    };
    rhs += Vec2(detail::facet_integral(s.p, s.q,
                                       [&](const Vec2& x) { return g(x) * mdir.x(); }),
                detail::facet_integral(s.p, s.q,
                                       [&](const Vec2& x) { return g(x) * mdir.y(); }));
    g2 += detail::facet_integral(s.p, s.q,
                                 [&](const Vec2& x) { return g(x) * g(x); });
  }
  AxisymmetryResult res;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(M);
  if (es.eigenvalues()[0] < 1e-12 * std::max(M.trace(), 1e-300)) {
    res.line_degenerate = true;  // boundary contained in a single line
    return res;
  }
  res.center = M.ldlt().solve(rhs);
  const double fmin = std::max(0.0, g2 - rhs.dot(res.center));
  double rbar = 0.0;
  for (const auto& s : segs)
    rbar += detail::facet_integral(
        s.p, s.q, [&](const Vec2& x) { return (x - res.center).norm(); });
  rbar /= total_len;
  res.mean_radius = rbar;
  res.misfit = fmin / (total_len * rbar * rbar);
  res.tolerance = std::max(1e-10, (h / rbar) * (h / rbar));
  res.axisymmetric = res.misfit <= res.tolerance;
  return res;
}

inline AxisymmetryResult detect_axisymmetry(const Mesh2D& m) {
  return detect_axisymmetry(boundary_segments(m), m.h_max());
}

struct CircleFit {
  bool ok = false;
  Vec2 center = Vec2::Zero();
  double radius = 0.0;
  double residual = 0.0;
};

struct LineFit {
  bool ok = false;
  Vec2 point = Vec2::Zero();
  Vec2 direction = Vec2::Zero();
  double residual = 0.0;
};

struct SurvivingMotion {
  std::string description;
  Eigen::Vector3d coefficients;  // in the {t1, t2, r} basis
};

struct ShapeFitReport {
  CircleFit circle;
  LineFit line;
  std::vector<SurvivingMotion> survivors_normal;
  std::vector<SurvivingMotion> survivors_tangential;
};

/// Fits the two shapes a planar boundary subset can take when it
/// supports an admissible rigid motion: a circular arc (a rotation
/// about its center keeps zero normal trace) or a straight segment (a
/// translation along it for the normal constraint, across it for the
/// tangential one). Sample normals enter the residuals so that a fit
/// also certifies the orientation field.
inline ShapeFitReport verify_shape_theorem(const std::vector<Vec2>& points,
                                           const std::vector<Vec2>& normals) {
  require(points.size() >= 3, "shape fit needs at least 3 sample points");
  require(points.size() == normals.size(),
          "shape fit needs one normal per sample point");
  const int n = static_cast<int>(points.size());
  ShapeFitReport rep;

  double scale = 0.0;
  Vec2 centroid = Vec2::Zero();
  for (const auto& p : points) centroid += p;
  centroid /= n;
  for (const auto& p : points) scale = std::max(scale, (p - centroid).norm());
  scale = std::max(scale, 1e-300);

  {  // circle: linear least squares in (center, radius^2 - |center|^2)
    Eigen::MatrixXd A(n, 3);
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i) {
      A(i, 0) = 2.0 * points[i].x();
      A(i, 1) = 2.0 * points[i].y();
      A(i, 2) = 1.0;
      b[i] = points[i].squaredNorm();
    }
    const Eigen::Vector3d sol =
        A.colPivHouseholderQr().solve(b);
    const Vec2 c(sol[0], sol[1]);
    const double r2 = sol[2] + c.squaredNorm();
    if (r2 > 0.0) {
      const double r = std::sqrt(r2);
      double res = 0.0;
      for (int i = 0; i < n; ++i) {
        const Vec2 radial = points[i] - c;
        res = std::max(res, std::abs(radial.norm() - r) / r);
        if (radial.norm() > 0.0)
          res = std::max(res, 1.0 - std::abs(normals[i].dot(radial.normalized())));
      }
      rep.circle = {res < 1e-8, c, r, res};
    }
  }

  {  // line: principal direction through the centroid
    Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
    for (const auto& p : points) {
      const Vec2 d = p - centroid;
      cov += d * d.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov);
    const Vec2 dir = es.eigenvectors().col(1);
    const Vec2 nrm(-dir.y(), dir.x());
    double res = 0.0;
    for (int i = 0; i < n; ++i) {
      res = std::max(res, std::abs((points[i] - centroid).dot(nrm)) / scale);
      res = std::max(res, std::abs(normals[i].dot(dir)));
    }
    rep.line = {res < 1e-8, centroid, dir, res};
  }

  if (rep.circle.ok) {
    const Vec2 c = rep.circle.center;
    rep.survivors_normal.push_back(
        {"rotation about (" + std::to_string(c.x()) + ", " +
             std::to_string(c.y()) + ")",
         Eigen::Vector3d(c.y(), -c.x(), 1.0)});
  }
  if (rep.line.ok) {
    const Vec2 d = rep.line.direction;
    rep.survivors_normal.push_back(
        {"translation along the line", Eigen::Vector3d(d.x(), d.y(), 0.0)});
    rep.survivors_tangential.push_back(
        {"translation across the line", Eigen::Vector3d(-d.y(), d.x(), 0.0)});
  }
  return rep;
}

inline ShapeFitReport verify_shape_theorem(const Mesh2D& m,
                                           const SigmaSelector& sel) {
  std::vector<Vec2> pts, nrm;
  for (int f = 0; f < m.facet_count(); ++f)
    if (facet_selected(m.boundary[f], sel)) {
      pts.push_back(m.facet_midpoint(f));
      nrm.push_back(m.boundary[f].normal);
    }
  return verify_shape_theorem(pts, nrm);
}

/// Full rigid-motion classification of a mesh and boundary subset.
struct RigidMotionReport {
  Eigen::Matrix3d gram_normal;
  Eigen::Matrix3d gram_tangential;
  KernelResult kernel_normal;
  KernelResult kernel_tangential;
  AxisymmetryResult axisymmetry;
  ShapeFitReport shape;
};

inline RigidMotionReport rigid_motion_report(const Mesh2D& m,
                                             const SigmaSelector& sel) {
  RigidMotionReport rep;
  rep.kernel_normal = kernel_dimension(m, sel, ConstraintKind::normal_zero);
  rep.kernel_tangential =
      kernel_dimension(m, sel, ConstraintKind::tangential_zero);
  rep.gram_normal = rep.kernel_normal.gram;
  rep.gram_tangential = rep.kernel_tangential.gram;
  rep.axisymmetry = detect_axisymmetry(m);
  rep.shape = verify_shape_theorem(m, sel);
  return rep;
}

}  // namespace jones
