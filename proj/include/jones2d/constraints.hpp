#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cmath>
#include <map>
#include <vector>

#include "jones2d/assembly.hpp"
#include "jones2d/common.hpp"
#include "jones2d/mesh.hpp"

namespace jones {

/// Which trace component vanishes on the selected boundary subset.
enum class ConstraintKind { normal_zero, tangential_zero };

inline const char* to_string(ConstraintKind k) {
  return k == ConstraintKind::normal_zero ? "normal_zero" : "tangential_zero";
}

/// Treatment of a node whose two adjacent selected facets disagree on
/// the constrained direction. Directions that differ by less than
/// `threshold` are merged into a single constraint along their
/// normalized average; at or above it both are imposed (pinning the
/// node when they are independent). threshold = 0 reproduces the
/// always-pin branch.
struct CornerPolicy {
  double threshold = kCornerAngle;

  static CornerPolicy merge() { return CornerPolicy{kCornerAngle}; }
  static CornerPolicy pin() { return CornerPolicy{0.0}; }
};

struct NodeConstraintRecord {
  int node = -1;
  Vec2 position = Vec2::Zero();
  std::vector<Vec2> directions;  // imposed unit directions (1 or 2)
  bool pinned = false;
  bool merged = false;
  double facet_angle = 0.0;  // angle between the two adjacent facet directions
};

/// Orthonormal prolongation P from the free (reduced) coordinates to
/// the full nodal space. Columns are supported on single nodes, so
/// P'P is the identity exactly and every lifted vector satisfies the
/// discrete trace condition at each constrained node exactly.
struct ConstraintReduction {
  SpMat P;
  int full_dim = 0;
  int reduced_dim = 0;
  std::vector<NodeConstraintRecord> records;
  ConstraintKind kind = ConstraintKind::normal_zero;
  bool curved_sigma = false;
  double h = 0.0;
  double sigma_length = 0.0;

  Eigen::VectorXd lift(const Eigen::VectorXd& z) const {
    require(z.size() == reduced_dim, "lift: dimension mismatch");
    return P * z;
  }

  Eigen::VectorXd restrict(const Eigen::VectorXd& x) const {
    require(x.size() == full_dim, "restrict: dimension mismatch");
    return P.transpose() * x;
  }
};

/// Builds the reduction realizing the discrete zero-normal-trace or
/// zero-tangential-trace subspace on the selected facets. Each
/// selected facet contributes the constraint u.d = 0 at both of its
/// endpoints, with d the facet normal (normal_zero) or tangent
/// (tangential_zero); the corner policy decides whether two distinct
/// directions at one node pin it or merge.
inline ConstraintReduction build_reduction(const Mesh2D& mesh,
                                           const SigmaSelector& sel,
                                           ConstraintKind kind,
                                           CornerPolicy policy = {}) {
  const SigmaInfo info = sigma_info(mesh, sel);  // checks |Sigma| > 0
  const DofMap dm = dof_map(mesh);

  std::map<int, std::vector<Vec2>> directions;
  for (int f = 0; f < mesh.facet_count(); ++f) {
    const auto& bf = mesh.boundary[f];
    if (!facet_selected(bf, sel)) continue;
    const Vec2 d = kind == ConstraintKind::normal_zero
                       ? bf.normal
                       : Vec2(-bf.normal.y(), bf.normal.x());
    directions[bf.a].push_back(d);
    directions[bf.b].push_back(d);
  }

  ConstraintReduction red;
  red.kind = kind;
  red.full_dim = dm.dof_count();
  red.curved_sigma = info.curved;
  red.h = mesh.h_max();
  red.sigma_length = info.length;

  // Per node: none, one constrained direction, or pinned.
  std::map<int, NodeConstraintRecord> constrained;
  for (const auto& [node, dirs] : directions) {
    NodeConstraintRecord rec;
    rec.node = node;
    rec.position = mesh.vertices[node];
    if (dirs.size() == 1) {
      rec.directions = {dirs[0]};
    } else {
      const Vec2 d0 = dirs[0], d1 = dirs[1];
      const double angle =
          std::atan2(std::abs(d0.x() * d1.y() - d0.y() * d1.x()), d0.dot(d1));
      rec.facet_angle = angle;
      Eigen::Matrix2d stacked;
      stacked.row(0) = d0;
      stacked.row(1) = d1;
      const double smin =
          stacked.jacobiSvd().singularValues().minCoeff();
      if (angle < policy.threshold) {
        Vec2 avg = d0 + d1;
        rec.directions = {avg.norm() > 1e-12 ? Vec2(avg.normalized()) : d0};
        rec.merged = true;
      } else if (smin >= 1e-8) {
        rec.directions = {d0, d1};
        rec.pinned = true;
      } else {
        rec.directions = {d0};  // dependent constraints collapse to one
      }
    }
    constrained.emplace(node, std::move(rec));
  }

  std::vector<Eigen::Triplet<double>> trips;
  int col = 0;
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    const auto it = constrained.find(v);
    if (it == constrained.end()) {
      trips.emplace_back(DofMap::x(v), col++, 1.0);
      trips.emplace_back(DofMap::y(v), col++, 1.0);
      continue;
    }
    if (it->second.pinned) continue;
    const Vec2 d = it->second.directions[0];
    const Vec2 free(-d.y(), d.x());
    trips.emplace_back(DofMap::x(v), col, free.x());
    trips.emplace_back(DofMap::y(v), col, free.y());
    ++col;
  }
  red.reduced_dim = col;
  red.P = SpMat(red.full_dim, red.reduced_dim);
  red.P.setFromTriplets(trips.begin(), trips.end());
  red.P.makeCompressed();
  red.records.reserve(constrained.size());
  for (auto& [node, rec] : constrained) red.records.push_back(std::move(rec));
  return red;
}

/// Galerkin restriction P'KP onto the admissible subspace, kept
/// symmetric exactly.
inline SpMat reduce_matrix(const SpMat& K, const ConstraintReduction& red) {
  require(K.rows() == red.full_dim && K.cols() == red.full_dim,
          "reduce_matrix: dimension mismatch");
  SpMat R = red.P.transpose() * K * red.P;
  SpMat Rt = SpMat(R.transpose());
  SpMat S = 0.5 * (R + Rt);
  S.makeCompressed();
  return S;
}

}  // namespace jones
