#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "jones2d/common.hpp"

namespace jones {

using Vec2 = Eigen::Vector2d;

/// Boundary facet: directed edge (a -> b) ordered so the adjacent
/// triangle lies on its left, which makes the outward unit normal
/// rotate(b - a, -90deg) / |b - a|.
struct BoundaryFacet {
  int a = -1;
  int b = -1;
  int tri = -1;
  int tag = 0;
  Vec2 normal = Vec2::Zero();
};

/// Conforming triangulation of a planar domain with tagged boundary
/// facets. Immutable after construction; all triangles are
/// counterclockwise and every boundary edge belongs to exactly one
/// triangle.
struct Mesh2D {
  static constexpr int dimension = 2;

  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<BoundaryFacet> boundary;

  int vertex_count() const { return static_cast<int>(vertices.size()); }
  int triangle_count() const { return static_cast<int>(triangles.size()); }
  int facet_count() const { return static_cast<int>(boundary.size()); }

  double signed_area(int t) const {
    const auto& tri = triangles[t];
    const Vec2 e1 = vertices[tri[1]] - vertices[tri[0]];
    const Vec2 e2 = vertices[tri[2]] - vertices[tri[0]];
    return 0.5 * (e1.x() * e2.y() - e1.y() * e2.x());
  }

  Vec2 centroid(int t) const {
    const auto& tri = triangles[t];
    return (vertices[tri[0]] + vertices[tri[1]] + vertices[tri[2]]) / 3.0;
  }

  double facet_length(int f) const {
    return (vertices[boundary[f].b] - vertices[boundary[f].a]).norm();
  }

  Vec2 facet_midpoint(int f) const {
    return 0.5 * (vertices[boundary[f].a] + vertices[boundary[f].b]);
  }

  /// Mesh size: maximum edge length over all triangles.
  double h_max() const {
    double h = 0.0;
    for (const auto& tri : triangles)
      for (int e = 0; e < 3; ++e)
        h = std::max(h, (vertices[tri[(e + 1) % 3]] - vertices[tri[e]]).norm());
    return h;
  }

  /// Undirected edge count (interior + boundary).
  int edge_count() const {
    std::set<std::pair<int, int>> edges;
    for (const auto& tri : triangles)
      for (int e = 0; e < 3; ++e)
        edges.insert(std::minmax(tri[e], tri[(e + 1) % 3]));
    return static_cast<int>(edges.size());
  }

  int euler_characteristic() const {
    return vertex_count() - edge_count() + triangle_count();
  }

  std::set<int> tags() const {
    std::set<int> t;
    for (const auto& f : boundary) t.insert(f.tag);
    return t;
  }
};

namespace detail {

inline Vec2 outward_normal(const Mesh2D& m, int a, int b) {
  const Vec2 e = m.vertices[b] - m.vertices[a];
  const double len = e.norm();
  require(len > 0.0, "degenerate boundary facet (zero length)");
  return Vec2(e.y(), -e.x()) / len;  // rotate(e, -90deg)
}

/// Derives the boundary facet list from triangle connectivity: edges
/// used by exactly one triangle, directed as the triangle traverses
/// them (CCW), tagged by a caller-provided rule on the midpoint.
template <class TagFn>
void finalize_boundary(Mesh2D& m, TagFn&& tag_of_midpoint) {
  std::map<std::pair<int, int>, std::pair<int, int>> count;  // edge -> (count, tri)
  for (int t = 0; t < m.triangle_count(); ++t) {
    const auto& tri = m.triangles[t];
    for (int e = 0; e < 3; ++e) {
      auto key = std::minmax(tri[e], tri[(e + 1) % 3]);
      auto [it, fresh] = count.try_emplace(key, 0, t);
      it->second.first += 1;
      if (!fresh) it->second.second = -1;
    }
  }
  m.boundary.clear();
  for (int t = 0; t < m.triangle_count(); ++t) {
    const auto& tri = m.triangles[t];
    for (int e = 0; e < 3; ++e) {
      const int a = tri[e], b = tri[(e + 1) % 3];
      const auto& c = count.at(std::minmax(a, b));
      if (c.first == 1) {
        BoundaryFacet f;
        f.a = a;
        f.b = b;
        f.tri = t;
        f.normal = outward_normal(m, a, b);
        f.tag = tag_of_midpoint(0.5 * (m.vertices[a] + m.vertices[b]), f.normal);
        m.boundary.push_back(f);
      }
    }
  }
}

/// Triangulates the annular band between two concentric vertex rings
/// (inner ring `ring_a`, outer `ring_b`, both listed CCW from angle 0)
/// by advancing whichever ring has the smaller next angle.
inline void stitch_rings(Mesh2D& m, const std::vector<int>& ring_a,
                         const std::vector<int>& ring_b) {
  const int p = static_cast<int>(ring_a.size());
  const int q = static_cast<int>(ring_b.size());
  const double two_pi = 2.0 * std::numbers::pi;
  int i = 0, k = 0;
  while (i < p || k < q) {
    const double next_a = two_pi * (i + 1) / p;
    const double next_b = two_pi * (k + 1) / q;
    const bool advance_outer = (k < q) && (i == p || next_b <= next_a);
    if (advance_outer) {
      m.triangles.push_back({ring_a[i % p], ring_b[k % q], ring_b[(k + 1) % q]});
      ++k;
    } else {
      m.triangles.push_back({ring_a[i % p], ring_b[k % q], ring_a[(i + 1) % p]});
      ++i;
    }
  }
}

}  // namespace detail

/// Structural validation shared by generators and the loader. Throws
/// with the offending index when a triangle is degenerate or the
/// boundary is inconsistent with the connectivity.
inline void validate_mesh(const Mesh2D& m) {
  require(!m.vertices.empty(), "mesh has no vertices");
  require(!m.triangles.empty(), "mesh has no elements");
  for (int t = 0; t < m.triangle_count(); ++t) {
    for (int v : m.triangles[t])
      require(v >= 0 && v < m.vertex_count(),
              "triangle " + std::to_string(t) + " references vertex " +
                  std::to_string(v) + " out of range");
    require(m.signed_area(t) > 0.0,
            "triangle " + std::to_string(t) + " has non-positive area");
  }
  std::map<std::pair<int, int>, int> count;
  for (const auto& tri : m.triangles)
    for (int e = 0; e < 3; ++e) count[std::minmax(tri[e], tri[(e + 1) % 3])]++;
  for (const auto& [edge, c] : count)
    require(c <= 2, "non-manifold edge (" + std::to_string(edge.first) + "," +
                        std::to_string(edge.second) + ") shared by " +
                        std::to_string(c) + " triangles");
  std::set<std::pair<int, int>> boundary_edges;
  for (const auto& [edge, c] : count)
    if (c == 1) boundary_edges.insert(edge);
  require(boundary_edges.size() == static_cast<std::size_t>(m.facet_count()),
          "boundary facet list does not match connectivity");
  for (int f = 0; f < m.facet_count(); ++f) {
    const auto& bf = m.boundary[f];
    require(boundary_edges.count(std::minmax(bf.a, bf.b)) == 1,
            "facet " + std::to_string(f) + " is not a boundary edge");
    require(std::abs(bf.normal.norm() - 1.0) < 1e-12,
            "facet " + std::to_string(f) + " normal is not unit length");
  }
}

/// Structured triangulation of the rectangle [0,a] x [0,b] with
/// 2*nx*ny triangles. Boundary tags: bottom=1, right=2, top=3, left=4.
inline Mesh2D generate_rectangle(double a, double b, int nx, int ny) {
  require(a > 0.0 && b > 0.0, "rectangle sides must be positive");
  require(nx >= 1 && ny >= 1, "rectangle subdivision counts must be >= 1");
  Mesh2D m;
  const auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      m.vertices.emplace_back(a * i / nx, b * j / ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int v00 = id(i, j), v10 = id(i + 1, j);
      const int v01 = id(i, j + 1), v11 = id(i + 1, j + 1);
      m.triangles.push_back({v00, v10, v11});
      m.triangles.push_back({v00, v11, v01});
    }
  detail::finalize_boundary(m, [&](const Vec2& mid, const Vec2&) {
    if (mid.y() == 0.0) return 1;
    if (mid.x() == a) return 2;
    if (mid.y() == b) return 3;
    return 4;
  });
  validate_mesh(m);
  return m;
}

/// Polygonal disk of the given radius centered at the origin, built
/// from concentric vertex rings whose counts grow proportionally to
/// the radius so element aspect ratios stay bounded. The outermost
/// ring carries n_boundary vertices; the single boundary tag is 1.
inline Mesh2D generate_disk(double radius, int n_boundary, int n_rings) {
  require(radius > 0.0, "disk radius must be positive");
  require(n_boundary >= 8, "disk needs n_boundary >= 8");
  require(n_rings >= 1, "disk needs n_rings >= 1");
  Mesh2D m;
  m.vertices.emplace_back(0.0, 0.0);
  std::vector<int> prev = {0};
  const double two_pi = 2.0 * std::numbers::pi;
  for (int j = 1; j <= n_rings; ++j) {
    int nj = static_cast<int>(std::lround(double(n_boundary) * j / n_rings));
    nj = std::clamp(nj, 6, n_boundary);
    if (j == n_rings) nj = n_boundary;
    const double rj = radius * j / n_rings;
    std::vector<int> ring(nj);
    for (int i = 0; i < nj; ++i) {
      ring[i] = m.vertex_count();
      const double phi = two_pi * i / nj;
      m.vertices.emplace_back(rj * std::cos(phi), rj * std::sin(phi));
    }
    if (j == 1) {
      for (int i = 0; i < nj; ++i)
        m.triangles.push_back({0, ring[i], ring[(i + 1) % nj]});
    } else {
      detail::stitch_rings(m, prev, ring);
    }
    prev = std::move(ring);
  }
  detail::finalize_boundary(m, [](const Vec2&, const Vec2&) { return 1; });
  validate_mesh(m);
  return m;
}

/// Annulus r_in < |x| < r_out with uniform rings of n_boundary
/// vertices. Tags: inner circle = 1 (normals point toward the
/// origin), outer circle = 2.
inline Mesh2D generate_annulus(double r_in, double r_out, int n_boundary,
                               int n_rings) {
  require(r_in > 0.0 && r_in < r_out, "annulus needs 0 < r_in < r_out");
  require(n_boundary >= 8, "annulus needs n_boundary >= 8");
  require(n_rings >= 1, "annulus needs n_rings >= 1");
  Mesh2D m;
  const double two_pi = 2.0 * std::numbers::pi;
  std::vector<int> prev;
  for (int j = 0; j <= n_rings; ++j) {
    const double rj = r_in + (r_out - r_in) * j / n_rings;
    std::vector<int> ring(n_boundary);
    for (int i = 0; i < n_boundary; ++i) {
      ring[i] = m.vertex_count();
      const double phi = two_pi * i / n_boundary;
      m.vertices.emplace_back(rj * std::cos(phi), rj * std::sin(phi));
    }
    if (j > 0) detail::stitch_rings(m, prev, ring);
    prev = std::move(ring);
  }
  const double r_mid = 0.5 * (r_in + r_out);
  detail::finalize_boundary(m, [r_mid](const Vec2& mid, const Vec2&) {
    return mid.norm() < r_mid ? 1 : 2;
  });
  validate_mesh(m);
  return m;
}

/// Writes the line-oriented text format:
///   mesh2d 1
///   vertices <V>   followed by V lines "x y"
///   triangles <T>  followed by T lines "i j k"
///   boundary <F>   followed by F lines "i j tag"
/// Coordinates are printed with 17 significant digits so a reload
/// reproduces them bit-exactly.
inline void save_mesh(const Mesh2D& m, std::ostream& os) {
  os << "mesh2d 1\n";
  os << "vertices " << m.vertex_count() << "\n";
  char buf[64];
  for (const auto& v : m.vertices) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g", v.x(), v.y());
    os << buf << "\n";
  }
  os << "triangles " << m.triangle_count() << "\n";
  for (const auto& t : m.triangles)
    os << t[0] << " " << t[1] << " " << t[2] << "\n";
  os << "boundary " << m.facet_count() << "\n";
  for (const auto& f : m.boundary) os << f.a << " " << f.b << " " << f.tag << "\n";
}

inline void save_mesh(const Mesh2D& m, const std::string& path) {
  std::ofstream os(path);
  require(os.good(), "cannot open '" + path + "' for writing");
  save_mesh(m, os);
  require(os.good(), "write to '" + path + "' failed");
}

namespace detail {

class LineReader {
 public:
  explicit LineReader(std::istream& is) : is_(is) {}

  /// Next non-empty, non-comment line. Returns false at end of input.
  bool next(std::string& line) {
    while (std::getline(is_, line)) {
      ++lineno_;
      const auto pos = line.find_first_not_of(" \t\r");
      if (pos == std::string::npos || line[pos] == '#') continue;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail_here(const std::string& what) const {
    fail("mesh parse error at line " + std::to_string(lineno_) + ": " + what);
  }

  int lineno() const { return lineno_; }

 private:
  std::istream& is_;
  int lineno_ = 0;
};

}  // namespace detail

/// Parses the text format written by save_mesh. Errors carry the line
/// number; the boundary section is cross-checked against the triangle
/// connectivity (indices in range, manifold, facets on the boundary).
inline Mesh2D load_mesh(std::istream& is) {
  detail::LineReader rd(is);
  std::string line;
  if (!rd.next(line)) fail("mesh parse error: empty input");
  {
    std::istringstream ss(line);
    std::string magic;
    int version = 0;
    if (!(ss >> magic >> version) || magic != "mesh2d" || version != 1)
      rd.fail_here("expected header 'mesh2d 1'");
  }
  const auto read_section = [&](const char* name) {
    if (!rd.next(line)) rd.fail_here(std::string("missing '") + name + "' section");
    std::istringstream ss(line);
    std::string key;
    long n = -1;
    if (!(ss >> key >> n) || key != name || n < 0)
      rd.fail_here(std::string("expected '") + name + " <count>'");
    return n;
  };

  Mesh2D m;
  const long nv = read_section("vertices");
  if (nv == 0) rd.fail_here("no vertices");
  for (long i = 0; i < nv; ++i) {
    if (!rd.next(line)) rd.fail_here("unexpected end of vertex list");
    std::istringstream ss(line);
    double x, y;
    if (!(ss >> x >> y)) rd.fail_here("malformed vertex line");
    m.vertices.emplace_back(x, y);
  }
  const long nt = read_section("triangles");
  if (nt == 0) rd.fail_here("no elements");
  for (long i = 0; i < nt; ++i) {
    if (!rd.next(line)) rd.fail_here("unexpected end of triangle list");
    std::istringstream ss(line);
    int a, b, c;
    if (!(ss >> a >> b >> c)) rd.fail_here("malformed triangle line");
    for (int v : {a, b, c})
      if (v < 0 || v >= nv)
        rd.fail_here("vertex index " + std::to_string(v) + " out of range [0," +
                     std::to_string(nv - 1) + "]");
    m.triangles.push_back({a, b, c});
  }
  const long nf = read_section("boundary");
  if (nf == 0) rd.fail_here("no boundary facets");

  // Directed CCW edge -> triangle, for adjacency and orientation.
  std::map<std::pair<int, int>, int> directed;
  for (int t = 0; t < m.triangle_count(); ++t) {
    const auto& tri = m.triangles[t];
    for (int e = 0; e < 3; ++e)
      directed[{tri[e], tri[(e + 1) % 3]}] = t;
  }
  for (long i = 0; i < nf; ++i) {
    if (!rd.next(line)) rd.fail_here("unexpected end of boundary list");
    std::istringstream ss(line);
    int a, b, tag;
    if (!(ss >> a >> b >> tag)) rd.fail_here("malformed boundary line");
    for (int v : {a, b})
      if (v < 0 || v >= nv)
        rd.fail_here("vertex index " + std::to_string(v) + " out of range [0," +
                     std::to_string(nv - 1) + "]");
    const bool fwd = directed.count({a, b}) > 0;
    const bool rev = directed.count({b, a}) > 0;
    if (fwd && rev)
      rd.fail_here("edge (" + std::to_string(a) + "," + std::to_string(b) +
                   ") is interior, not boundary");
    if (!fwd && !rev)
      rd.fail_here("edge (" + std::to_string(a) + "," + std::to_string(b) +
                   ") is not an edge of any triangle");
    BoundaryFacet f;
    f.a = fwd ? a : b;
    f.b = fwd ? b : a;
    f.tri = fwd ? directed.at({a, b}) : directed.at({b, a});
    f.tag = tag;
    f.normal = detail::outward_normal(m, f.a, f.b);
    m.boundary.push_back(f);
  }
  try {
    validate_mesh(m);
  } catch (const Error& e) {
    fail(std::string("mesh parse error: ") + e.what());
  }
  return m;
}

inline Mesh2D load_mesh(const std::string& path) {
  std::ifstream is(path);
  require(is.good(), "cannot open mesh file '" + path + "'");
  return load_mesh(is);
}

/// Selects the constrained boundary subset as a union of facet tags.
struct SigmaSelector {
  std::set<int> tags;
};

inline bool facet_selected(const BoundaryFacet& f, const SigmaSelector& sel) {
  return sel.tags.count(f.tag) > 0;
}

/// Total length of the selected boundary subset. Every requested tag
/// must exist and the selection must have positive measure.
inline double sigma_measure(const Mesh2D& m, const SigmaSelector& sel) {
  require(!sel.tags.empty(), "sigma selector is empty");
  const auto present = m.tags();
  for (int t : sel.tags)
    require(present.count(t) > 0, "tag " + std::to_string(t) + " not in mesh");
  double len = 0.0;
  for (int f = 0; f < m.facet_count(); ++f)
    if (facet_selected(m.boundary[f], sel)) len += m.facet_length(f);
  require(len > 0.0, "selected boundary subset has zero measure");
  return len;
}

/// Geometric summary of the selected boundary used by the mesh-aware
/// tolerance policies: a subset is "curved" when some node joins two
/// selected facets whose normals turn by a small nonzero angle, the
/// signature of a polygonalized smooth arc (a genuine corner turns by
/// at least kCornerAngle and does not count).
struct SigmaInfo {
  double length = 0.0;
  double max_facet_length = 0.0;
  bool curved = false;
  double max_smooth_turn = 0.0;  // largest below-corner turn angle seen
};

inline constexpr double kCornerAngle = std::numbers::pi / 4.0;

inline SigmaInfo sigma_info(const Mesh2D& m, const SigmaSelector& sel) {
  SigmaInfo info;
  info.length = sigma_measure(m, sel);
  std::map<int, std::vector<int>> at_node;
  for (int f = 0; f < m.facet_count(); ++f) {
    if (!facet_selected(m.boundary[f], sel)) continue;
    info.max_facet_length = std::max(info.max_facet_length, m.facet_length(f));
    at_node[m.boundary[f].a].push_back(f);
    at_node[m.boundary[f].b].push_back(f);
  }
  for (const auto& [node, facets] : at_node) {
    if (facets.size() != 2) continue;
    const Vec2 n0 = m.boundary[facets[0]].normal;
    const Vec2 n1 = m.boundary[facets[1]].normal;
    const double angle =
        std::atan2(std::abs(n0.x() * n1.y() - n0.y() * n1.x()), n0.dot(n1));
    if (angle > 1e-9 && angle < kCornerAngle) {
      info.curved = true;
      info.max_smooth_turn = std::max(info.max_smooth_turn, angle);
    }
  }
  return info;
}

}  // namespace jones
