#pragma once

// Independent reference implementations used by the validation checks.
// Everything here recomputes results from first principles (naive tensor
// contractions, dense solves, finite differences, Monte-Carlo sampling)
// and must stay decoupled from the production solve path it cross-checks.

#include <functional>
#include <random>

#include "mixedfem/materials.hpp"
#include "mixedfem/mesh.hpp"
#include "mixedfem/scene.hpp"
#include "mixedfem/tensors.hpp"

namespace mixedfem::oracle {

using Rng = std::mt19937;

Mat3 random_rotation(Rng& rng);
// random stretch 6-vector with det(symmat(s)) above the given floor
Vec6 random_stretch(Rng& rng, double det_floor = 0.2);

// --- naive tensor machinery (supplemental definitions, literal loops) ---

double tensor_B(int i, int j, int k);   // 3x3x9
double tensor_C(int i, int j, int k);   // 3x3x6
double tensor_D(int n, int i, int j, int k);  // 3 x n x 3n

Mat3 naive_B_dot(const Vec9& l);
Mat3 naive_C_dot(const Vec6& s);
Vec9 naive_B_contract(const Mat3& M);
Vec6 naive_C_contract(const Mat3& M);
// W block from the four-index Z = B . C contracted against R
Mat96 naive_W_block(const Mat3& R);
// dense J assembled from sum_i P_i^T (B^T : (G_i D^T)) N_i
MatX naive_J(const SimMesh& mesh);

// --- finite differences ---

VecX fd_gradient(const std::function<double(const VecX&)>& f, const VecX& x,
                 double step_scale = 1e-5);
MatX fd_jacobian(const std::function<VecX(const VecX&)>& f, const VecX& x,
                 double step_scale = 1e-5);

// --- dense saddle oracle ---

// Solves the unreduced dense KKT system in (dq_free, ds, l) built from the
// naive tensors, by LU. Material derivative blocks come from the materials
// module (the reduction, assembly, and sign conventions are what this
// oracle pins down).
struct DenseKktSolution {
  VecX dq_free;
  VecX ds;
  VecX l;
};
DenseKktSolution dense_kkt_solve(const SimMesh& mesh, const MaterialParams& mat,
                                 const std::vector<Mat3>& R, const VecX& q,
                                 const VecX& s, const VecX& a, double h,
                                 const VecX& mass_diag, const VecX& f_ext,
                                 const DofProjection& proj, double tikhonov);

// --- Procrustes Monte-Carlo maximality ---

// max over `samples` uniformly random rotations of <R, M>_F
double best_sampled_objective(const Mat3& M, int samples, Rng& rng);

// --- displacement-only Newton reference (neo-Hookean on F) ---

// Static equilibrium of min_q  sum_i dv_i psi_nh(F_i(q)) - q^T f_ext with
// pinned vertices eliminated; dense Newton with FD Hessian of the analytic
// gradient and backtracking on the energy. Returns the full q.
VecX newton_static_solve(const SimMesh& mesh, const MaterialParams& mat,
                         const DofProjection& proj, const VecX& f_ext,
                         int max_iters = 60, double grad_tol = 1e-9);

}  // namespace mixedfem::oracle
