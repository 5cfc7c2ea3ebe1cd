#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <sstream>

#include "jones2d/mesh.hpp"

using namespace jones;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("rectangle generator counts") {
  const Mesh2D m1 = generate_rectangle(1, 1, 1, 1);
  REQUIRE(m1.vertex_count() == 4);
  REQUIRE(m1.triangle_count() == 2);
  REQUIRE(m1.facet_count() == 4);

  const Mesh2D m2 = generate_rectangle(1, 1, 2, 2);
  REQUIRE(m2.vertex_count() == 9);
  REQUIRE(m2.triangle_count() == 8);
  REQUIRE(m2.facet_count() == 8);

  const Mesh2D m3 = generate_rectangle(2, 1, 4, 2);
  REQUIRE_THAT(sigma_measure(m3, {{1}}), WithinAbs(2.0, 1e-15));
}

TEST_CASE("rectangle generator rejects bad input") {
  REQUIRE_THROWS_AS(generate_rectangle(-1, 1, 2, 2), Error);
  REQUIRE_THROWS_AS(generate_rectangle(1, 0, 2, 2), Error);
  REQUIRE_THROWS_AS(generate_rectangle(1, 1, 0, 2), Error);
}

TEST_CASE("rectangle tags and axis-aligned normals") {
  const Mesh2D m = generate_rectangle(1, 1, 4, 4);
  for (int f = 0; f < m.facet_count(); ++f) {
    const auto& bf = m.boundary[f];
    const Vec2 mid = m.facet_midpoint(f);
    Vec2 expect;
    switch (bf.tag) {
      case 1: expect = {0, -1}; REQUIRE(mid.y() == 0.0); break;
      case 2: expect = {1, 0};  REQUIRE(mid.x() == 1.0); break;
      case 3: expect = {0, 1};  REQUIRE(mid.y() == 1.0); break;
      case 4: expect = {-1, 0}; REQUIRE(mid.x() == 0.0); break;
      default: FAIL("unexpected tag");
    }
    REQUIRE((bf.normal - expect).norm() == 0.0);
  }
}

TEST_CASE("disk generator basics") {
  const Mesh2D m = generate_disk(1, 8, 1);
  REQUIRE(m.facet_count() == 8);
  double perim = 0.0;
  for (int f = 0; f < m.facet_count(); ++f) perim += m.facet_length(f);
  REQUIRE(perim < 2 * pi);
  REQUIRE_THROWS_AS(generate_disk(1, 4, 1), Error);
  REQUIRE_THROWS_AS(generate_disk(1, 64, 0), Error);
}

TEST_CASE("disk facet midpoints sit at the chord radius") {
  const Mesh2D m = generate_disk(1, 256, 16);
  const double chord_radius = std::cos(pi / 256);
  for (int f = 0; f < m.facet_count(); ++f) {
    const double len2 = m.facet_length(f) * m.facet_length(f);
    REQUIRE(std::abs(m.facet_midpoint(f).norm() - chord_radius) <= len2);
  }
}

TEST_CASE("disk facet normals are radial up to the chord angle") {
  const Mesh2D m = generate_disk(1, 64, 8);
  const double bound = (pi / 64) * (pi / 64);
  for (int f = 0; f < m.facet_count(); ++f) {
    const Vec2 mid = m.facet_midpoint(f);
    REQUIRE(std::abs(m.boundary[f].normal.dot(mid) / mid.norm() - 1.0) <= bound);
  }
}

TEST_CASE("annulus generator orientation and counts") {
  const Mesh2D m = generate_annulus(0.5, 1.0, 64, 4);
  for (int f = 0; f < m.facet_count(); ++f) {
    const auto& bf = m.boundary[f];
    const double radial = bf.normal.dot(m.facet_midpoint(f).normalized());
    if (bf.tag == 1) REQUIRE(radial < 0.0);
    else REQUIRE(radial > 0.0);
  }
  REQUIRE(generate_annulus(0.5, 1.0, 8, 1).facet_count() == 16);
  REQUIRE_THROWS_AS(generate_annulus(1.0, 0.5, 64, 4), Error);
}

TEST_CASE("annulus boundary lengths approximate both circles") {
  const Mesh2D m = generate_annulus(0.25, 1.0, 128, 8);
  const double inner = sigma_measure(m, {{1}});
  const double outer = sigma_measure(m, {{2}});
  REQUIRE_THAT(inner, WithinRel(2 * pi * 0.25, 0.01));
  REQUIRE_THAT(outer, WithinRel(2 * pi * 1.0, 0.01));
}

TEST_CASE("euler characteristic per generator") {
  REQUIRE(generate_rectangle(1, 1, 5, 3).euler_characteristic() == 1);
  REQUIRE(generate_disk(1, 32, 3).euler_characteristic() == 1);
  // The annulus is not simply connected; its characteristic is 0.
  REQUIRE(generate_annulus(0.5, 1.0, 32, 2).euler_characteristic() == 0);
}

TEST_CASE("facet normals follow the left-of-edge convention") {
  for (const Mesh2D& m :
       {generate_rectangle(2, 1, 3, 4), generate_disk(1, 32, 4),
        generate_annulus(0.5, 1.5, 24, 3)}) {
    for (int f = 0; f < m.facet_count(); ++f) {
      const auto& bf = m.boundary[f];
      const Vec2 e = m.vertices[bf.b] - m.vertices[bf.a];
      const Vec2 expect = Vec2(e.y(), -e.x()) / e.norm();
      REQUIRE((bf.normal - expect).norm() <= 1e-15);
      // Adjacent triangle lies left of a -> b.
      const Vec2 to_centroid = m.centroid(bf.tri) - m.vertices[bf.a];
      REQUIRE(e.x() * to_centroid.y() - e.y() * to_centroid.x() > 0.0);
    }
  }
}

TEST_CASE("disk perimeter increases monotonically toward 2 pi r") {
  double prev = 0.0;
  for (int nb : {16, 32, 64, 128, 256}) {
    const Mesh2D m = generate_disk(1.0, nb, 2);
    const double perim = sigma_measure(m, {{1}});
    REQUIRE(perim > prev);
    REQUIRE(perim < 2 * pi);
    prev = perim;
  }
}

TEST_CASE("mesh file round trip is exact") {
  const Mesh2D m = generate_rectangle(1, 1, 2, 2);
  std::stringstream ss;
  save_mesh(m, ss);
  const Mesh2D r = load_mesh(ss);
  REQUIRE(r.vertex_count() == m.vertex_count());
  REQUIRE(r.triangle_count() == m.triangle_count());
  REQUIRE(r.facet_count() == m.facet_count());
  for (int v = 0; v < m.vertex_count(); ++v) {
    REQUIRE(r.vertices[v].x() == m.vertices[v].x());
    REQUIRE(r.vertices[v].y() == m.vertices[v].y());
  }
  for (int t = 0; t < m.triangle_count(); ++t)
    REQUIRE(r.triangles[t] == m.triangles[t]);
  for (int f = 0; f < m.facet_count(); ++f) {
    REQUIRE(r.boundary[f].a == m.boundary[f].a);
    REQUIRE(r.boundary[f].b == m.boundary[f].b);
    REQUIRE(r.boundary[f].tag == m.boundary[f].tag);
  }

  // Irrational coordinates survive the text format bit-exactly.
  const Mesh2D d = generate_disk(std::sqrt(2.0), 16, 2);
  std::stringstream ds;
  save_mesh(d, ds);
  const Mesh2D dr = load_mesh(ds);
  for (int v = 0; v < d.vertex_count(); ++v)
    REQUIRE(d.vertices[v] == dr.vertices[v]);
}

TEST_CASE("loader reports the offending line") {
  const std::string good =
      "mesh2d 1\nvertices 3\n0 0\n1 0\n0 1\ntriangles 1\n0 1 2\nboundary 3\n"
      "0 1 1\n1 2 1\n2 0 1\n";
  {
    std::istringstream is(good);
    REQUIRE_NOTHROW(load_mesh(is));
  }
  {
    std::istringstream is(
        "mesh2d 1\nvertices 3\n0 0\n1 0\n0 1\ntriangles 1\n0 1 3\nboundary 3\n"
        "0 1 1\n1 2 1\n2 0 1\n");
    REQUIRE_THROWS_WITH(load_mesh(is),
                        ContainsSubstring("line 7") &&
                            ContainsSubstring("out of range"));
  }
  {
    std::istringstream is("mesh2d 1\nvertices 3\n0 0\n1 0\n0 1\ntriangles 0\n");
    REQUIRE_THROWS_WITH(load_mesh(is), ContainsSubstring("no elements"));
  }
  {
    std::istringstream is("mesh 7\n");
    REQUIRE_THROWS_WITH(load_mesh(is), ContainsSubstring("mesh2d 1"));
  }
  {
    // Edge (0,2) of the square's interior diagonal listed as boundary.
    std::istringstream is(
        "mesh2d 1\nvertices 4\n0 0\n1 0\n1 1\n0 1\ntriangles 2\n0 1 2\n0 2 3\n"
        "boundary 4\n0 1 1\n1 2 1\n2 3 1\n0 2 1\n");
    REQUIRE_THROWS_WITH(load_mesh(is), ContainsSubstring("interior"));
  }
  {
    // Comments and blank lines are ignored.
    std::istringstream is("# header comment\nmesh2d 1\n\nvertices 3\n0 0\n1 0\n# x\n0 1\n"
                          "triangles 1\n0 1 2\nboundary 3\n0 1 1\n1 2 1\n2 0 1\n");
    REQUIRE_NOTHROW(load_mesh(is));
  }
}

TEST_CASE("sigma measure validates the selection") {
  const Mesh2D m = generate_rectangle(1, 1, 8, 8);
  REQUIRE_THAT(sigma_measure(m, {{1}}), WithinAbs(1.0, 1e-15));
  REQUIRE_THAT(sigma_measure(m, {{1, 4}}), WithinAbs(2.0, 1e-15));
  REQUIRE_THROWS_WITH(sigma_measure(m, {{9}}), ContainsSubstring("tag 9"));
  REQUIRE_THROWS_AS(sigma_measure(m, SigmaSelector{}), Error);

  const Mesh2D d = generate_disk(1, 256, 2);
  REQUIRE_THAT(sigma_measure(d, {{1}}),
               WithinRel(2 * 256 * std::sin(pi / 256), 1e-13));
}

TEST_CASE("sigma info distinguishes straight and polygonalized subsets") {
  const Mesh2D sq = generate_rectangle(1, 1, 8, 8);
  REQUIRE_FALSE(sigma_info(sq, {{1}}).curved);
  REQUIRE_FALSE(sigma_info(sq, {{1, 2, 3, 4}}).curved);  // corners, no smooth turn

  const Mesh2D d = generate_disk(1, 64, 4);
  const SigmaInfo info = sigma_info(d, {{1}});
  REQUIRE(info.curved);
  REQUIRE_THAT(info.max_smooth_turn, WithinRel(2 * pi / 64, 1e-6));
}
