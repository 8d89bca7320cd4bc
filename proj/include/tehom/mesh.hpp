#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "tehom/error.hpp"

namespace tehom {

using Vec2 = Eigen::Vector2d;
using Tri = std::array<int, 3>;

struct TriangleMesh {
  std::vector<Vec2> vertices;
  std::vector<Tri> triangles;  // counterclockwise
  std::vector<int> boundary;  // geometric boundary vertices, ascending
  std::vector<char> on_boundary;
  // periodic_map[v] is the master of v's identification class; empty when
  // the mesh is not periodic. dof[v] numbers the classes (or the vertices).
  std::vector<int> periodic_map;
  std::vector<int> dof;
  int num_dofs = 0;
  double h = 0.0;
  int grid_divisions = 0;  // > 0 for the structured square layouts
  Vec2 grid_lo = Vec2::Zero();
  double grid_size = 0.0;

  bool periodic() const { return !periodic_map.empty(); }
  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }
};

inline double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

inline double triangle_area(const TriangleMesh& mesh, int t) {
  const auto& tri = mesh.triangles[t];
  return signed_area(mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]);
}

inline double total_area(const TriangleMesh& mesh) {
  double s = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) s += triangle_area(mesh, t);
  return s;
}

namespace detail {

inline double max_diameter(const TriangleMesh& mesh) {
  double h = 0.0;
  for (const auto& t : mesh.triangles) {
    for (int e = 0; e < 3; ++e) {
      h = std::max(h, (mesh.vertices[t[e]] - mesh.vertices[t[(e + 1) % 3]]).norm());
    }
  }
  return h;
}

inline std::map<std::pair<int, int>, int> edge_counts(const TriangleMesh& mesh) {
  std::map<std::pair<int, int>, int> count;
  for (const auto& t : mesh.triangles) {
    for (int e = 0; e < 3; ++e) {
      const int a = t[e], b = t[(e + 1) % 3];
      ++count[{std::min(a, b), std::max(a, b)}];
    }
  }
  return count;
}

// Boundary vertices are those on edges used by a single triangle.
inline void mark_boundary(TriangleMesh& mesh) {
  mesh.on_boundary.assign(mesh.vertices.size(), 0);
  for (const auto& [edge, c] : edge_counts(mesh)) {
    if (c == 1) mesh.on_boundary[edge.first] = mesh.on_boundary[edge.second] = 1;
  }
  mesh.boundary.clear();
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (mesh.on_boundary[v]) mesh.boundary.push_back(v);
  }
}

inline void identity_dofs(TriangleMesh& mesh) {
  mesh.dof.resize(mesh.vertices.size());
  for (int v = 0; v < mesh.num_vertices(); ++v) mesh.dof[v] = v;
  mesh.num_dofs = mesh.num_vertices();
}

// Union-jack triangulation of [lo, lo + size]^2: the diagonal of square
// (i, j) runs SW-NE when i + j is even and SE-NW otherwise.
inline TriangleMesh grid_mesh(const Vec2& lo, double size, int div) {
  TriangleMesh mesh;
  const double step = size / div;
  auto id = [div](int i, int j) { return j * (div + 1) + i; };
  for (int j = 0; j <= div; ++j) {
    for (int i = 0; i <= div; ++i) {
      const double x = i == div ? lo.x() + size : lo.x() + i * step;
      const double y = j == div ? lo.y() + size : lo.y() + j * step;
      mesh.vertices.emplace_back(x, y);
    }
  }
  for (int j = 0; j < div; ++j) {
    for (int i = 0; i < div; ++i) {
      const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      if ((i + j) % 2 == 0) {
        mesh.triangles.push_back({a, b, c});
        mesh.triangles.push_back({a, c, d});
      } else {
        mesh.triangles.push_back({a, b, d});
        mesh.triangles.push_back({b, c, d});
      }
    }
  }
  mesh.grid_divisions = div;
  mesh.grid_lo = lo;
  mesh.grid_size = size;
  mark_boundary(mesh);
  identity_dofs(mesh);
  mesh.h = max_diameter(mesh);
  return mesh;
}

}  // namespace detail

inline TriangleMesh square_mesh(double lo, double hi, int divisions) {
  require(hi > lo, ErrorKind::InvalidParameter, "square_mesh needs hi > lo");
  require(divisions >= 2, ErrorKind::InvalidParameter, "square_mesh needs divisions >= 2");
  return detail::grid_mesh(Vec2(lo, lo), hi - lo, divisions);
}

/// Unit cell [0,1]^2; with `periodic` the opposite faces are identified and
/// the four corners collapse into one class, leaving divisions^2 dofs.
inline TriangleMesh unit_cell_mesh(int divisions, bool periodic) {
  require(divisions >= 2, ErrorKind::InvalidParameter, "unit_cell_mesh needs divisions >= 2");
  TriangleMesh mesh = detail::grid_mesh(Vec2::Zero(), 1.0, divisions);
  if (!periodic) return mesh;
  const int d = divisions;
  mesh.periodic_map.resize(mesh.vertices.size());
  for (int j = 0; j <= d; ++j) {
    for (int i = 0; i <= d; ++i) {
      const int v = j * (d + 1) + i;
      const int master = (j % d) * (d + 1) + (i % d);
      mesh.periodic_map[v] = master;
      mesh.dof[v] = (j % d) * d + (i % d);
    }
  }
  mesh.num_dofs = d * d;
  return mesh;
}

/// Disk of radius R from `rings` concentric hexagonal rings mapped onto
/// circles; ring j carries 6j vertices, the mesh has 6 rings^2 triangles.
inline TriangleMesh disk_mesh_rings(double radius, int rings) {
  require(radius > 0.0, ErrorKind::InvalidParameter, "disk_mesh needs radius > 0");
  require(rings >= 1, ErrorKind::InvalidParameter, "disk_mesh needs at least one ring");
  const int n = rings;
  TriangleMesh mesh;
  // lattice point (a, b) <-> a (1, 0) + b (1/2, sqrt(3)/2)
  auto level = [](int a, int b) { return std::max({std::abs(a), std::abs(b), std::abs(a + b)}); };
  const int width = 2 * n + 1;
  std::vector<int> index(static_cast<std::size_t>(width) * width, -1);
  auto slot = [&](int a, int b) -> int& { return index[(b + n) * width + (a + n)]; };
  const double s3 = std::sqrt(3.0);
  for (int b = -n; b <= n; ++b) {
    for (int a = -n; a <= n; ++a) {
      const int lv = level(a, b);
      if (lv > n) continue;
      Vec2 p(0.0, 0.0);
      if (lv > 0) {
        const Vec2 hex(a + 0.5 * b, 0.5 * s3 * b);
        // hexagon side m spans angles [m pi/3, (m+1) pi/3]; t is the fraction along it
        double ang = std::atan2(hex.y(), hex.x());
        if (ang < 0) ang += 2.0 * std::numbers::pi;
        int side = static_cast<int>(std::floor(ang / (std::numbers::pi / 3.0) + 1e-12));
        side = std::clamp(side, 0, 5);
        const double c0 = std::cos(side * std::numbers::pi / 3.0), s0 = std::sin(side * std::numbers::pi / 3.0);
        const double c1 = std::cos((side + 1) * std::numbers::pi / 3.0),
                     s1 = std::sin((side + 1) * std::numbers::pi / 3.0);
        const Vec2 start(lv * c0, lv * s0), end(lv * c1, lv * s1);
        const double t = std::clamp((hex - start).dot(end - start) / (end - start).squaredNorm(), 0.0, 1.0);
        const double theta = (side + t) * std::numbers::pi / 3.0;
        const double r = radius * lv / n;
        p = Vec2(r * std::cos(theta), r * std::sin(theta));
        if (lv == n) p *= radius / p.norm();
      }
      slot(a, b) = static_cast<int>(mesh.vertices.size());
      mesh.vertices.push_back(p);
    }
  }
  auto inside = [&](int a, int b) { return a >= -n && a <= n && b >= -n && b <= n && level(a, b) <= n; };
  for (int b = -n; b < n; ++b) {
    for (int a = -n; a < n; ++a) {
      if (inside(a, b) && inside(a + 1, b) && inside(a, b + 1)) {
        mesh.triangles.push_back({slot(a, b), slot(a + 1, b), slot(a, b + 1)});
      }
      if (inside(a + 1, b) && inside(a + 1, b + 1) && inside(a, b + 1)) {
        mesh.triangles.push_back({slot(a + 1, b), slot(a + 1, b + 1), slot(a, b + 1)});
      }
    }
  }
  detail::mark_boundary(mesh);
  detail::identity_dofs(mesh);
  mesh.h = detail::max_diameter(mesh);
  return mesh;
}

/// Refinement r uses 4 * 2^(r-1) rings, so h halves and the triangle count
/// quadruples per level.
inline TriangleMesh disk_mesh(double radius, int refinement) {
  require(refinement >= 1 && refinement <= 12, ErrorKind::InvalidParameter, "disk_mesh refinement outside [1, 12]");
  return disk_mesh_rings(radius, 4 << (refinement - 1));
}

struct MeshReport {
  bool positive_areas = true;
  bool conforming = true;
  bool periodic_consistent = true;
  std::string message;

  bool ok() const { return positive_areas && conforming && periodic_consistent; }
};

inline MeshReport check_mesh(const TriangleMesh& mesh) {
  MeshReport rep;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    if (!(triangle_area(mesh, t) > 0.0)) {
      rep.positive_areas = false;
      rep.message = "triangle " + std::to_string(t) + " has non-positive area";
      break;
    }
  }
  for (const auto& [edge, c] : detail::edge_counts(mesh)) {
    const bool boundary_edge = mesh.on_boundary[edge.first] && mesh.on_boundary[edge.second];
    if (c > 2 || (c == 1 && !boundary_edge)) {
      rep.conforming = false;
      rep.message = "edge (" + std::to_string(edge.first) + "," + std::to_string(edge.second) + ") used " +
                    std::to_string(c) + " times";
      break;
    }
  }
  if (mesh.periodic()) {
    for (int v : mesh.boundary) {
      const Vec2 d = mesh.vertices[v] - mesh.vertices[mesh.periodic_map[v]];
      const Vec2 r(d.x() - std::round(d.x()), d.y() - std::round(d.y()));
      if (r.norm() > 1e-12) {
        rep.periodic_consistent = false;
        rep.message = "vertex " + std::to_string(v) + " is not a lattice translate of its master";
        break;
      }
    }
  }
  return rep;
}

/// Plain text: vertex and triangle counts, then "x y" lines, then "i j k"
/// lines with zero-based indices.
inline void write_mesh(std::ostream& os, const TriangleMesh& mesh) {
  char buf[96];
  os << mesh.num_vertices() << ' ' << mesh.num_triangles() << '\n';
  for (const auto& v : mesh.vertices) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", v.x(), v.y());
    os << buf;
  }
  for (const auto& t : mesh.triangles) os << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

/// Triangle of a structured square mesh containing x (clamped to the grid),
/// together with barycentric coordinates.
inline std::pair<int, Eigen::Vector3d> locate_in_grid(const TriangleMesh& mesh, const Vec2& x) {
  require(mesh.grid_divisions > 0, ErrorKind::InvalidParameter, "locate_in_grid needs a structured mesh");
  const int d = mesh.grid_divisions;
  const Vec2 u = (x - mesh.grid_lo) / mesh.grid_size * d;
  const int i = std::clamp(static_cast<int>(std::floor(u.x())), 0, d - 1);
  const int j = std::clamp(static_cast<int>(std::floor(u.y())), 0, d - 1);
  int best = -1;
  Eigen::Vector3d best_bary;
  double best_min = -1e300;
  for (int k = 0; k < 2; ++k) {
    const int t = 2 * (j * d + i) + k;
    const auto& tri = mesh.triangles[t];
    const Vec2& a = mesh.vertices[tri[0]];
    const Vec2& b = mesh.vertices[tri[1]];
    const Vec2& c = mesh.vertices[tri[2]];
    const double area = signed_area(a, b, c);
    Eigen::Vector3d bary(signed_area(x, b, c) / area, signed_area(a, x, c) / area, signed_area(a, b, x) / area);
    if (bary.minCoeff() > best_min) {
      best_min = bary.minCoeff();
      best = t;
      best_bary = bary;
    }
  }
  return {best, best_bary};
}

}  // namespace tehom
