#pragma once

#include <Eigen/SparseCholesky>
#include <memory>
#include <vector>

#include "mixedfem/tensors.hpp"

namespace mixedfem {

// Symmetric indefinite operator
//   [ diag(mass_over_h2)   J^T ]
//   [ J                   -C   ]
// where C holds per-element 9x9 compliance blocks W (dv_i H_i)^{-1} W^T plus
// the Tikhonov shift. Constraint rows are unscaled (deformation-gradient
// units; the integration weights live in H), and J keeps only the free
// (unpinned) position columns. The multipliers are therefore dv_i-weighted
// stresses, which keeps the 1e-6 shift small against the physical
// compliance 1/(dv_i mu) at practical element sizes.
struct SaddleSystem {
  VecX mass_over_h2;            // length nq; may include contact stiffness
  SpMat J;                      // nl x nq
  std::vector<Mat9> compliance;  // applied with a minus sign

  int nq() const { return static_cast<int>(mass_over_h2.size()); }
  int nl() const { return static_cast<int>(J.rows()); }
  int dim() const { return nq() + nl(); }

  VecX apply(const VecX& x) const;
};

// Prefactorized constant form of the saddle matrix with the compliance
// block replaced by (1/(dv_i mu) + eps) I. Computed once per simulation.
class ConstantPreconditioner {
 public:
  ConstantPreconditioner() = default;
  ConstantPreconditioner(const VecX& mass_over_h2, const SpMat& J, double mu,
                         const std::vector<double>& volumes, double tikhonov);

  VecX apply(const VecX& rhs) const;
  bool valid() const { return ldlt_ != nullptr; }

 private:
  // behind a pointer so the preconditioner stays movable
  std::shared_ptr<Eigen::SimplicialLDLT<SpMat>> ldlt_;
};

ConstantPreconditioner factor_preconditioner(const VecX& mass_over_h2,
                                             const SpMat& J, double mu,
                                             const std::vector<double>& volumes,
                                             double tikhonov);

struct PcgResult {
  VecX x;
  int iterations = 0;
  double rel_residual = 0.0;
  bool converged = false;
};

int default_pcg_maxiter(int dim);

// Conjugate gradient on the indefinite saddle system with the constant
// indefinite preconditioner; restarts once if the p^T A p sign flips.
PcgResult pcg_saddle(const SaddleSystem& system, const VecX& rhs,
                     const ConstantPreconditioner& precond, double tol = 1e-7,
                     int maxiter = 0);

}  // namespace mixedfem
