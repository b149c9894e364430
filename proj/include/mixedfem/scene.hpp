#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mixedfem/materials.hpp"
#include "mixedfem/mesh.hpp"

namespace mixedfem {

struct PinMotionKey {
  double time = 0.0;
  Vec3 translate = Vec3::Zero();
  Vec3 axis = Vec3::UnitY();
  double degrees = 0.0;
};

struct PinGroup {
  std::vector<int> vertices;          // explicit indices
  std::optional<Vec3> box_min, box_max;  // or an axis-aligned box selector
  std::vector<PinMotionKey> motion;   // empty = static pin

  // vertex set after applying the box selector to the rest positions
  std::vector<int> resolve(const SimMesh& mesh) const;
  // rigid transform of a rest position at time t (keyframes interpolate
  // linearly; the pose holds after the last key)
  Vec3 position_at(const Vec3& rest, const Vec3& centroid, double t) const;
};

struct GroundPlane {
  double height = 0.0;      // plane y = height, up = +y
  double stiffness = 1e5;   // N/m
  double damping = 10.0;    // N s/m
};

struct SolverSettings {
  double cg_tol = 1e-7;
  int cg_maxiter = 0;  // 0 = 10*sqrt(dim), capped at 2000
  double tikhonov = 1e-6;
  bool fixed_iterations = true;  // interactive mode: exactly n x m iterations
  bool line_search = true;
  double tol_dq = 1e-6;          // outer, relative to bbox
  double tol_constraint = 1e-6;  // outer, inf-norm of Ws - Jq
  double tol_rotation = 1e-8;    // inner, per-element Frobenius change
  double alpha0 = 10.0;          // penalty schedule start
  double alpha_growth = 1.5;     // per inner iteration
  int ls_max_backtracks = 20;
};

struct SceneConfig {
  std::string mesh_path;
  ElementKind kind = ElementKind::Tet;
  MaterialParams material;
  double timestep = 0.01;     // h
  int substeps = 5;           // m, inner iterations
  int outer_iterations = 1;   // n
  Vec3 gravity = Vec3::Zero();
  std::vector<PinGroup> pins;
  std::optional<GroundPlane> ground;
  double thickness = 1e-3;      // shells
  double cross_section = 1e-6;  // rods
  SolverSettings solver;
};

// Parse the declarative scene file (JSON; schema documented in the README).
// Schema violations report the offending field by name.
SceneConfig load_scene(const std::string& path);
SceneConfig parse_scene(const std::string& json_text);

// Free-DOF projection induced by the pinned vertex set.
struct DofProjection {
  int num_full = 0;
  std::vector<int> free_of_full;  // full dof -> free dof or -1
  std::vector<int> full_of_free;

  static DofProjection build(const std::vector<int>& pinned_vertices,
                             int num_vertices);

  int num_free() const { return static_cast<int>(full_of_free.size()); }
  VecX restrict(const VecX& full) const;
  // free values placed into a copy of `base` (pinned coordinates kept)
  VecX expand(const VecX& free, const VecX& base) const;
  SpMat selection() const;  // num_full x num_free
};

// Diagonal lumped mass, 3|V|; each element spreads rho*dv equally.
VecX lumped_mass(const SimMesh& mesh, double rho);

// One-sided linear penalty against the plane, plus damping opposing the
// normal approach velocity of penetrating vertices.
VecX contact_force(const VecX& q, const VecX& velocity, const GroundPlane& ground);
// Diagonal stiffness of the penalty at configuration q (k on the vertical
// coordinate of penetrating vertices), used to take the penalty implicitly.
VecX contact_stiffness_diag(const VecX& q, const GroundPlane& ground);
double contact_energy(const VecX& q, const GroundPlane& ground);

}  // namespace mixedfem
