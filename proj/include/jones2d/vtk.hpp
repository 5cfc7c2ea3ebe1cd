#pragma once

#include <Eigen/Dense>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "jones2d/assembly.hpp"
#include "jones2d/common.hpp"
#include "jones2d/mesh.hpp"

namespace jones {

/// Legacy ASCII VTK writer: the triangulation as an unstructured grid
/// plus one 3-component point vector array per named nodal field
/// (z padded with zero).
inline void write_vtk(const Mesh2D& m,
                      const std::vector<std::pair<std::string, Eigen::VectorXd>>& fields,
                      std::ostream& os, const std::string& title = "jones2d") {
  os << "# vtk DataFile Version 3.0\n";
  os << title << "\n";
  os << "ASCII\n";
  os << "DATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << m.vertex_count() << " double\n";
  char buf[96];
  for (const auto& v : m.vertices) {
    std::snprintf(buf, sizeof buf, "%.12g %.12g 0", v.x(), v.y());
    os << buf << "\n";
  }
  os << "CELLS " << m.triangle_count() << " " << 4 * m.triangle_count() << "\n";
  for (const auto& t : m.triangles)
    os << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
  os << "CELL_TYPES " << m.triangle_count() << "\n";
  for (int t = 0; t < m.triangle_count(); ++t) os << "5\n";
  if (fields.empty()) return;
  os << "POINT_DATA " << m.vertex_count() << "\n";
  for (const auto& [name, u] : fields) {
    require(u.size() == 2 * m.vertex_count(),
            "vtk field '" + name + "' has wrong dimension");
    os << "VECTORS " << name << " double\n";
    for (int v = 0; v < m.vertex_count(); ++v) {
      std::snprintf(buf, sizeof buf, "%.12g %.12g 0", u[DofMap::x(v)],
                    u[DofMap::y(v)]);
      os << buf << "\n";
    }
  }
}

inline void write_vtk(const Mesh2D& m,
                      const std::vector<std::pair<std::string, Eigen::VectorXd>>& fields,
                      const std::string& path) {
  std::ofstream os(path);
  require(os.good(), "cannot open '" + path + "' for writing");
  write_vtk(m, fields, os);
  require(os.good(), "write to '" + path + "' failed");
}

}  // namespace jones
