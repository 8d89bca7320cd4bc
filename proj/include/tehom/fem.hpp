#pragma once

// P1 element matrices on a TriangleMesh. Rows and columns are indexed by
// mesh.dof, so periodic identifications are summed in automatically.

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <vector>

#include "tehom/coeffs.hpp"
#include "tehom/linalg/sparse.hpp"
#include "tehom/mesh.hpp"

namespace tehom {

using TensorFn = std::function<Mat2(const Vec2&)>;
using ScalarFn = std::function<double(const Vec2&)>;

enum class Quadrature {
  EdgeMidpoint,  // three edge midpoints, weight |T|/3
  Interior,  // three interior points (1/6, 1/6, 2/3), weight |T|/3
};

/// Edge midpoints sit on material interfaces of cell-aligned meshes, so
/// piecewise coefficients are sampled at interior points instead.
inline Quadrature quadrature_for(FieldKind kind) {
  return kind == FieldKind::Piecewise ? Quadrature::Interior : Quadrature::EdgeMidpoint;
}

struct Element {
  std::array<int, 3> dofs;
  std::array<Vec2, 3> nodes;
  double area;
  Eigen::Matrix<double, 2, 3> grads;  // column i = grad of basis i
};

inline Element element(const TriangleMesh& mesh, int t) {
  Element e;
  const auto& tri = mesh.triangles[t];
  for (int i = 0; i < 3; ++i) {
    e.dofs[i] = mesh.dof[tri[i]];
    e.nodes[i] = mesh.vertices[tri[i]];
  }
  e.area = signed_area(e.nodes[0], e.nodes[1], e.nodes[2]);
  for (int i = 0; i < 3; ++i) {
    const Vec2& b = e.nodes[(i + 1) % 3];
    const Vec2& c = e.nodes[(i + 2) % 3];
    e.grads(0, i) = (b.y() - c.y()) / (2.0 * e.area);
    e.grads(1, i) = (c.x() - b.x()) / (2.0 * e.area);
  }
  return e;
}

/// Quadrature points and the values of the three basis functions there.
inline std::array<std::pair<Vec2, Eigen::Vector3d>, 3> quadrature_points(const Element& e, Quadrature rule) {
  std::array<std::pair<Vec2, Eigen::Vector3d>, 3> out;
  for (int q = 0; q < 3; ++q) {
    Eigen::Vector3d bary;
    if (rule == Quadrature::EdgeMidpoint) {
      bary.setConstant(0.5);
      bary[q] = 0.0;
    } else {
      bary.setConstant(1.0 / 6.0);
      bary[q] = 2.0 / 3.0;
    }
    out[q] = {bary[0] * e.nodes[0] + bary[1] * e.nodes[1] + bary[2] * e.nodes[2], bary};
  }
  return out;
}

/// Barycentric points and weights (summing to one) of `rule` applied on the
/// 4^levels pieces of uniform refinement. Refining resolves coefficients
/// that oscillate on the scale of the mesh.
inline std::vector<std::pair<Eigen::Vector3d, double>> reference_rule(Quadrature rule, int levels) {
  using Tri = std::array<Eigen::Vector3d, 3>;
  std::vector<Tri> pieces{{Eigen::Vector3d::UnitX(), Eigen::Vector3d::UnitY(), Eigen::Vector3d::UnitZ()}};
  for (int l = 0; l < levels; ++l) {
    std::vector<Tri> next;
    next.reserve(4 * pieces.size());
    for (const Tri& t : pieces) {
      const Eigen::Vector3d m01 = 0.5 * (t[0] + t[1]), m12 = 0.5 * (t[1] + t[2]), m02 = 0.5 * (t[0] + t[2]);
      next.push_back({t[0], m01, m02});
      next.push_back({m01, t[1], m12});
      next.push_back({m02, m12, t[2]});
      next.push_back({m01, m12, m02});
    }
    pieces = std::move(next);
  }
  std::vector<std::pair<Eigen::Vector3d, double>> out;
  const double w = 1.0 / (3.0 * static_cast<double>(pieces.size()));
  for (const Tri& t : pieces) {
    for (int q = 0; q < 3; ++q) {
      Eigen::Vector3d local;
      if (rule == Quadrature::EdgeMidpoint) {
        local.setConstant(0.5);
        local[q] = 0.0;
      } else {
        local.setConstant(1.0 / 6.0);
        local[q] = 2.0 / 3.0;
      }
      out.emplace_back(local[0] * t[0] + local[1] * t[1] + local[2] * t[2], w);
    }
  }
  return out;
}

inline SparseMatrix assemble_stiffness(const TriangleMesh& mesh, const TensorFn& a, Quadrature rule, int levels = 0) {
  const auto ref = reference_rule(rule, levels);
  std::vector<Triplet> entries;
  entries.reserve(9 * mesh.triangles.size());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const Element e = element(mesh, t);
    Mat2 avg = Mat2::Zero();
    for (const auto& [b, w] : ref) avg += w * a(b[0] * e.nodes[0] + b[1] * e.nodes[1] + b[2] * e.nodes[2]);
    const Eigen::Matrix3d local = e.area * e.grads.transpose() * avg * e.grads;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) entries.emplace_back(e.dofs[i], e.dofs[j], local(i, j));
  }
  return assemble(mesh.num_dofs, mesh.num_dofs, entries);
}

inline SparseMatrix assemble_stiffness(const TriangleMesh& mesh) {
  return assemble_stiffness(mesh, [](const Vec2&) -> Mat2 { return Mat2::Identity(); }, Quadrature::EdgeMidpoint);
}

inline SparseMatrix assemble_mass(const TriangleMesh& mesh, const ScalarFn& n, Quadrature rule, int levels = 0) {
  const auto ref = reference_rule(rule, levels);
  std::vector<Triplet> entries;
  entries.reserve(9 * mesh.triangles.size());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const Element e = element(mesh, t);
    Eigen::Matrix3d local = Eigen::Matrix3d::Zero();
    for (const auto& [b, w] : ref) local += w * n(b[0] * e.nodes[0] + b[1] * e.nodes[1] + b[2] * e.nodes[2]) * b * b.transpose();
    local *= e.area;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) entries.emplace_back(e.dofs[i], e.dofs[j], local(i, j));
  }
  return assemble(mesh.num_dofs, mesh.num_dofs, entries);
}

inline SparseMatrix assemble_mass(const TriangleMesh& mesh) {
  return assemble_mass(mesh, [](const Vec2&) { return 1.0; }, Quadrature::EdgeMidpoint);
}

/// Row sums of the unweighted mass matrix, i.e. the integrals of the basis
/// functions.
inline VectorX lumped_mass(const TriangleMesh& mesh) {
  VectorX d = VectorX::Zero(mesh.num_dofs);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const Element e = element(mesh, t);
    for (int i = 0; i < 3; ++i) d[e.dofs[i]] += e.area / 3.0;
  }
  return d;
}

/// Value of the P1 function with nodal values u (indexed by dof) at
/// barycentric position `bary` of triangle t.
inline double interpolate(const TriangleMesh& mesh, const VectorX& u, int t, const Eigen::Vector3d& bary) {
  const auto& tri = mesh.triangles[t];
  return bary[0] * u[mesh.dof[tri[0]]] + bary[1] * u[mesh.dof[tri[1]]] + bary[2] * u[mesh.dof[tri[2]]];
}

/// Interior dofs (not on the geometric boundary) and the embedding map
/// from the interior numbering to all dofs.
struct InteriorMap {
  std::vector<int> interior;  // dof of each interior unknown
  std::vector<int> position;  // position[dof] = interior index or -1
};

inline InteriorMap interior_map(const TriangleMesh& mesh) {
  require(!mesh.periodic(), ErrorKind::InvalidParameter, "interior_map expects a non-periodic mesh");
  InteriorMap map;
  map.position.assign(mesh.num_dofs, -1);
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (!mesh.on_boundary[v]) {
      map.position[mesh.dof[v]] = static_cast<int>(map.interior.size());
      map.interior.push_back(mesh.dof[v]);
    }
  }
  return map;
}

/// E: interior unknowns -> all dofs (zero on the boundary).
inline SparseMatrix embedding(const TriangleMesh& mesh, const InteriorMap& map) {
  std::vector<Triplet> entries;
  for (int i = 0; i < static_cast<int>(map.interior.size()); ++i) entries.emplace_back(map.interior[i], i, 1.0);
  return assemble(mesh.num_dofs, static_cast<Eigen::Index>(map.interior.size()), entries);
}

inline TensorFn tensor_fn(const CoefficientField& f) {
  return [f](const Vec2& x) { return evaluate_a(f, x); };
}

inline ScalarFn scalar_fn(const CoefficientField& f) {
  return [f](const Vec2& x) { return evaluate_n(f, x); };
}

}  // namespace tehom
