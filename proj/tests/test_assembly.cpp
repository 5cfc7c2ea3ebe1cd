#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <random>
#include <sstream>

#include "jones2d/assembly.hpp"
#include "jones2d/mesh.hpp"
#include "jones2d/rigid_motions.hpp"

using namespace jones;
using Catch::Matchers::WithinAbs;

namespace {

Mesh2D reference_triangle() {
  std::istringstream is(
      "mesh2d 1\nvertices 3\n0 0\n1 0\n0 1\ntriangles 1\n0 1 2\nboundary 3\n"
      "0 1 1\n1 2 2\n2 0 3\n");
  return load_mesh(is);
}

Eigen::VectorXd nodal_field(const Mesh2D& m, Vec2 (*f)(const Vec2&)) {
  Eigen::VectorXd u(dof_map(m).dof_count());
  for (int v = 0; v < m.vertex_count(); ++v) {
    const Vec2 val = f(m.vertices[v]);
    u[DofMap::x(v)] = val.x();
    u[DofMap::y(v)] = val.y();
  }
  return u;
}

}  // namespace

TEST_CASE("strain of elementary fields") {
  const Mesh2D m = reference_triangle();
  const Eigen::VectorXd c =
      nodal_field(m, +[](const Vec2&) { return Vec2(3.0, -2.0); });
  REQUIRE(strain(m, 0, c).norm() == 0.0);

  const Eigen::VectorXd rot =
      nodal_field(m, +[](const Vec2& x) { return Vec2(-x.y(), x.x()); });
  REQUIRE(strain(m, 0, rot).norm() <= 1e-15);

  const Eigen::VectorXd stretch =
      nodal_field(m, +[](const Vec2& x) { return Vec2(x.x(), 0.0); });
  Eigen::Matrix2d expect;
  expect << 1, 0, 0, 0;
  REQUIRE((strain(m, 0, stretch) - expect).norm() <= 1e-15);
}

TEST_CASE("stress constitutive law") {
  const MaterialParams p{1.0, 0.5, DensityField(1.0)};
  REQUIRE(stress(Eigen::Matrix2d::Zero(), p).norm() == 0.0);
  // 2 mu I + lambda tr(I) I = (2 + 0.5 * 2) I = 3 I
  REQUIRE((stress(Eigen::Matrix2d::Identity(), p) -
           3.0 * Eigen::Matrix2d::Identity())
              .norm() <= 1e-15);
  Eigen::Matrix2d shear;
  shear << 0, 1, 1, 0;
  const MaterialParams q{1.0, 7.0, DensityField(1.0)};
  REQUIRE((stress(shear, q) - 2.0 * shear).norm() == 0.0);
}

TEST_CASE("stiffness energy on the reference triangle") {
  const Mesh2D m = reference_triangle();
  const MaterialParams p{1.0, 0.0, DensityField(1.0)};
  const SpMat A = assemble_stiffness(m, p);
  const Eigen::VectorXd u =
      nodal_field(m, +[](const Vec2& x) { return Vec2(x.x(), 0.0); });
  REQUIRE_THAT(u.dot(A * u), WithinAbs(1.0, 1e-14));
}

TEST_CASE("assembled matrices are exactly symmetric") {
  const Mesh2D m = generate_disk(1.0, 16, 2);
  const MaterialParams p{1.3, 0.7, DensityField(2.0)};
  for (const SpMat& M : {assemble_stiffness(m, p), assemble_mass(m, p),
                         assemble_h1_gram(m), assemble_strain_gram(m)}) {
    REQUIRE((SpMat(M.transpose()) - M).norm() == 0.0);
  }
}

TEST_CASE("stiffness annihilates the rigid basis") {
  for (const Mesh2D& m :
       {generate_rectangle(1, 1, 6, 6), generate_disk(1, 24, 3),
        generate_annulus(0.5, 1.0, 16, 2)}) {
    const MaterialParams p{1.0, 0.5, DensityField(1.0)};
    const SpMat A = assemble_stiffness(m, p);
    double norm_a = 0.0;
    for (int k = 0; k < A.outerSize(); ++k) {
      double row = 0.0;
      for (SpMat::InnerIterator it(A, k); it; ++it) row += std::abs(it.value());
      norm_a = std::max(norm_a, row);
    }
    for (const auto& r : rigid_basis_fields(m)) {
      REQUIRE((A * r).lpNorm<Eigen::Infinity>() <=
              1e-12 * norm_a * r.lpNorm<Eigen::Infinity>());
    }
  }
}

TEST_CASE("unconstrained stiffness has rank deficiency exactly 3") {
  const Mesh2D m = generate_rectangle(1, 1, 5, 4);
  const MaterialParams p{1.0, 0.5, DensityField(1.0)};
  const Eigen::MatrixXd A = Eigen::MatrixXd(assemble_stiffness(m, p));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  const double cutoff = 1e-10 * es.eigenvalues().maxCoeff();
  int below = 0;
  for (int i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()[i] < cutoff) ++below;
  REQUIRE(below == 3);
}

TEST_CASE("coercivity bound against the strain Gram") {
  const Mesh2D m = generate_rectangle(1, 1, 4, 4);
  const MaterialParams p{1.0, 0.5, DensityField(1.0)};
  const SpMat A = assemble_stiffness(m, p);
  const SpMat Ke = assemble_strain_gram(m);
  const double c = coercivity_coefficient(p);
  std::mt19937 rng(7);
  std::normal_distribution<double> dist;
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd u(A.rows());
    for (int i = 0; i < u.size(); ++i) u[i] = dist(rng);
    const double lhs = u.dot(A * u);
    const double rhs = c * u.dot(Ke * u);
    REQUIRE(lhs >= rhs - 1e-12 * std::abs(lhs));
  }
}

TEST_CASE("mass matrix integrates exactly") {
  const Mesh2D m = generate_rectangle(1, 1, 4, 4);
  const MaterialParams p{1.0, 0.5, DensityField(1.0)};
  const SpMat B = assemble_mass(m, p);
  const Eigen::VectorXd ex =
      nodal_field(m, +[](const Vec2&) { return Vec2(1.0, 0.0); });
  REQUIRE_THAT(ex.dot(B * ex), WithinAbs(1.0, 1e-14));

  const MaterialParams p2{1.0, 0.5, DensityField(2.0)};
  const SpMat B2 = assemble_mass(m, p2);
  REQUIRE((B2 - 2.0 * B).norm() <= 1e-16 * B.norm());
}

TEST_CASE("piecewise density mass") {
  const Mesh2D m = generate_rectangle(1, 1, 2, 2);
  std::vector<double> rho(m.triangle_count());
  for (int t = 0; t < m.triangle_count(); ++t)
    rho[t] = m.centroid(t).x() < 0.5 ? 1.0 : 2.0;
  const MaterialParams p{1.0, 0.5, DensityField(rho)};
  const SpMat B = assemble_mass(m, p);
  const Eigen::VectorXd ex =
      nodal_field(m, +[](const Vec2&) { return Vec2(1.0, 0.0); });
  REQUIRE_THAT(ex.dot(B * ex), WithinAbs(1.5, 1e-14));
}

TEST_CASE("H1 Gram values and positivity") {
  const Mesh2D m = generate_rectangle(1, 1, 4, 4);
  const SpMat M1 = assemble_h1_gram(m);
  const Eigen::VectorXd ex =
      nodal_field(m, +[](const Vec2&) { return Vec2(1.0, 0.0); });
  REQUIRE_THAT(ex.dot(M1 * ex), WithinAbs(1.0, 1e-14));
  const Eigen::VectorXd lin =
      nodal_field(m, +[](const Vec2& x) { return Vec2(x.x(), 0.0); });
  REQUIRE_THAT(lin.dot(M1 * lin), WithinAbs(4.0 / 3.0, 1e-14));

  const SpMat B = assemble_mass(m, MaterialParams{1.0, 0.0, DensityField(1.0)});
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(M1 - B));
  REQUIRE(es.eigenvalues().minCoeff() >= -1e-12);
}

TEST_CASE("coordinate dump format") {
  const Mesh2D m = reference_triangle();
  const SpMat B = assemble_mass(m, MaterialParams{1.0, 0.0, DensityField(1.0)});
  std::ostringstream os;
  dump_matrix(B, os);
  std::istringstream is(os.str());
  long i, j;
  double v;
  double sum = 0.0;
  int entries = 0;
  while (is >> i >> j >> v) {
    REQUIRE(i >= 0);
    REQUIRE(j >= 0);
    REQUIRE(i < 6);
    REQUIRE(j < 6);
    sum += v;
    ++entries;
  }
  REQUIRE(entries == B.nonZeros());
  // Row sums of the mass blocks integrate the constant field: total 2 * area.
  REQUIRE_THAT(sum, WithinAbs(1.0, 1e-14));
}
