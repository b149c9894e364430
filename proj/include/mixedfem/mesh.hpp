#pragma once

#include <array>
#include <string>
#include <vector>

#include "mixedfem/tensors.hpp"

namespace mixedfem {

enum class ElementKind { Tet, Tri, Rod };

int verts_per_element(ElementKind kind);

// Simulation mesh: rest geometry plus per-element derived quantities.
// Immutable after construction.
struct SimMesh {
  ElementKind kind = ElementKind::Tet;
  std::vector<Vec3> rest_positions;
  std::vector<std::array<int, 4>> elements;  // unused slots = -1
  std::vector<MatX> grad_ops;                // n x 3 per element
  std::vector<double> volumes;               // m^3
  std::vector<Vec3> ref_normals;             // tri and rod
  std::vector<Vec3> ref_binormals;           // rod only

  int num_vertices() const { return static_cast<int>(rest_positions.size()); }
  int num_elements() const { return static_cast<int>(elements.size()); }
  int verts_per_element() const { return mixedfem::verts_per_element(kind); }

  VecX rest_vector() const;
  double bbox_diagonal() const;

  // 3 x n matrix of element vertex positions drawn from a stacked vector.
  MatX element_positions(const VecX& q, int e) const;
  // Deformation gradient of element e at configuration q.
  Mat3 deformation_gradient(const VecX& q, int e) const;
};

// Gradient operators (supplemental forms). Edge vectors are columns of T.
Eigen::Matrix<double, 4, 3> tet_gradient(const Mat3& T);
Eigen::Matrix<double, 3, 3> tri_gradient(const Eigen::Matrix<double, 3, 2>& T);
Eigen::Matrix<double, 2, 3> rod_gradient(const Vec3& T);

// Reference frames: unit rest normal for triangles, orthonormal
// (normal, binormal) pair perpendicular to the rest edge for rods.
Vec3 tri_normal(const Vec3& x0, const Vec3& x1, const Vec3& x2);
std::pair<Vec3, Vec3> rod_frame(const Vec3& edge);

// Build a mesh from in-memory geometry, populating all derived fields.
// thickness applies to tri meshes, cross_section to rod meshes.
SimMesh build_mesh(std::vector<Vec3> positions,
                   std::vector<std::array<int, 4>> elements, ElementKind kind,
                   double thickness = 1e-3, double cross_section = 1e-6);

// Load from disk. Formats: tet = ASCII node/element pairs, tri = OBJ
// (v/f records), rod = vertex lines followed by 2-index edge lines.
SimMesh load_mesh(const std::string& path, ElementKind kind,
                  double thickness = 1e-3, double cross_section = 1e-6);

void save_frame_obj(const std::string& path, const SimMesh& mesh,
                    const VecX& q);

}  // namespace mixedfem
