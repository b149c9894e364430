#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "mixedfem/linsolve.hpp"
#include "mixedfem/materials.hpp"
#include "mixedfem/mesh.hpp"
#include "mixedfem/operators.hpp"
#include "mixedfem/scene.hpp"

namespace mixedfem {

struct SolverState {
  VecX q;       // 3|V|
  VecX q_prev;  // 3|V|
  VecX s;       // 6|T|
  VecX l;       // 9|T|
  std::vector<Mat3> R;
};

struct SubstepStats {
  int step = 0;
  int substep = 0;
  double assembly_ms = 0, kkt_solve_ms = 0, rotation_ms = 0;
  int cg_iters = 0;
  double cg_residual = 0, constraint_residual = 0, energy = 0;
};

// Forward-Euler predictor.
VecX warm_start(const VecX& qt, const VecX& qtm1, const VecX& f_ext,
                const VecX& mass_diag, double h);

// Second-order material data at the outer linearization point; frozen
// across the inner alternating-projection iterations.
struct MaterialLinearization {
  std::vector<Mat6> Hinv;  // inverse of dv_i * d2psi/ds2 (SPD-projected)
  VecX g;                  // dv_i * dpsi/ds, stacked
};

MaterialLinearization linearize_materials(const SimMesh& mesh,
                                          const MaterialParams& mat,
                                          const VecX& s);

// Quadratic incremental model around (q, s) at fixed rotations: the reduced
// saddle system and right-hand side whose solution (dq, l) is the model's
// stationary point, plus the pieces needed to recover ds.
struct QuadraticModel {
  SaddleSystem system;
  VecX rhs;
  MaterialLinearization lin;
  std::vector<Mat96> W_blocks;  // rowvec(R_i symmat(.)), unscaled
  VecX constraint;              // W s - J q (- frame correction), F-units
};

// mu sets the compliance scale 1/(dv mu) on the complement of range(W_i):
// the rotation coupling is penalized at shear stiffness instead of being
// pinned by the tiny regularizer, which keeps the reaction multipliers at
// stress scale and lets the global step move vertices through element
// rotations. The slack vanishes as the local step aligns R with F.
QuadraticModel build_quadratic_model(
    const SimMesh& mesh, const MaterialLinearization& lin, const SpMat& J_full,
    const SpMat& J_free, const std::vector<Mat3>& R, const VecX& q,
    const VecX& s, const VecX& a, double h, const VecX& mass_diag,
    const VecX& extra_diag, const VecX& f_ext, const DofProjection& proj,
    double mu, double tikhonov, bool flip_rhs_sign = false);

struct GlobalStepResult {
  VecX dq_free;
  VecX l;
  VecX ds;
  PcgResult cg;
};

GlobalStepResult global_step(const QuadraticModel& model,
                             const ConstantPreconditioner& precond, double tol,
                             int maxiter);

// Per-element Procrustes rotation update; Jq holds the unscaled J*q product.
// beta_floor is a density: the penalty floor for element i is
// beta_floor * dv_i, a deadband that ignores noise-level multipliers.
// Returns the largest Frobenius-norm rotation change.
double local_step(const SimMesh& mesh, const VecX& Jq, const VecX& s,
                  const VecX& l, double alpha, double beta_floor,
                  std::vector<Mat3>& R);

struct LineSearchResult {
  double t = 0.0;
  bool stagnated = false;
};

// Largest t in {1, 1/2, 1/4, ...} >= 2^-20 with merit(t) <= merit(0).
// merit returns nullopt when the candidate violates a domain guard.
LineSearchResult backtracking_line_search(
    const std::function<std::optional<double>(double)>& merit, double merit0,
    int max_backtracks = 20);

class Simulation {
 public:
  Simulation(SimMesh mesh, SceneConfig config);

  void step();
  // zero the velocity (dynamic relaxation toward statics)
  void reset_velocity() { state_.q_prev = state_.q; }

  const SimMesh& mesh() const { return mesh_; }
  const SceneConfig& config() const { return config_; }
  const SolverState& state() const { return state_; }
  SolverState& state() { return state_; }
  const VecX& mass() const { return mass_; }
  const SpMat& coupling() const { return J_full_; }
  const DofProjection& projection() const { return proj_; }
  const ConstantPreconditioner& preconditioner() const { return precond_; }
  const std::vector<SubstepStats>& stats() const { return stats_; }
  const std::vector<int>& pinned_vertices() const { return pinned_; }

  double time() const { return time_; }
  int steps_done() const { return step_index_; }
  VecX velocity() const { return (state_.q - state_.q_prev) / config_.timestep; }
  bool last_step_stagnated() const { return last_stagnated_; }

  // gravity plus contact at configuration q
  VecX external_force(const VecX& q, const VecX& vel) const;
  // augmented Lagrangian merit; nullopt if a stretch leaves the material
  // domain. W blocks and l are held fixed.
  std::optional<double> merit(const VecX& q, const VecX& s,
                              const std::vector<Mat96>& W_blocks, const VecX& l,
                              double beta_bar, const VecX& qt,
                              const VecX& qtm1) const;

  // mutation-testing hook: flips the W H^{-1} g term in the KKT rhs
  void set_flip_rhs_sign(bool flip) { flip_rhs_sign_ = flip; }

 private:
  VecX pinned_positions(double t) const;

  SimMesh mesh_;
  SceneConfig config_;
  SpMat J_full_;         // unscaled
  SpMat J_free_;         // free columns only
  VecX mass_;
  std::vector<int> pinned_;
  DofProjection proj_;
  std::vector<Vec3> group_centroids_;
  ConstantPreconditioner precond_;
  SolverState state_;
  std::vector<SubstepStats> stats_;
  double time_ = 0.0;
  int step_index_ = 0;
  bool last_stagnated_ = false;
  bool flip_rhs_sign_ = false;
};

}  // namespace mixedfem
