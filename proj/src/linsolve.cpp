#include "mixedfem/linsolve.hpp"

#include <cmath>
#include <stdexcept>

namespace mixedfem {

VecX SaddleSystem::apply(const VecX& x) const {
  const int n = nq(), m = nl();
  VecX out(n + m);
  auto u = x.head(n);
  auto y = x.tail(m);
  out.head(n) = mass_over_h2.cwiseProduct(u) + J.transpose() * y;
  out.tail(m) = J * u;
#pragma omp parallel for
  for (long i = 0; i < static_cast<long>(compliance.size()); ++i)
    out.segment<9>(n + 9 * i) -= compliance[i] * y.segment<9>(9 * i);
  return out;
}

ConstantPreconditioner::ConstantPreconditioner(const VecX& mass_over_h2,
                                               const SpMat& J, double mu,
                                               const std::vector<double>& volumes,
                                               double tikhonov) {
  if (!(mu > 0)) throw std::invalid_argument("preconditioner requires mu > 0");
  const int n = static_cast<int>(mass_over_h2.size());
  const int m = static_cast<int>(J.rows());

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(2 * J.nonZeros()) + n + m);
  for (int i = 0; i < n; ++i) trips.emplace_back(i, i, mass_over_h2[i]);
  for (int k = 0; k < J.outerSize(); ++k)
    for (SpMat::InnerIterator it(J, k); it; ++it) {
      trips.emplace_back(n + static_cast<int>(it.row()),
                         static_cast<int>(it.col()), it.value());
      trips.emplace_back(static_cast<int>(it.col()),
                         n + static_cast<int>(it.row()), it.value());
    }
  for (int e = 0; e < m / 9; ++e) {
    const double c = (1.0 + tikhonov) / (volumes[e] * mu);
    for (int r = 0; r < 9; ++r)
      trips.emplace_back(n + 9 * e + r, n + 9 * e + r, -c);
  }
  SpMat K(n + m, n + m);
  K.setFromTriplets(trips.begin(), trips.end());
  K.makeCompressed();

  ldlt_ = std::make_shared<Eigen::SimplicialLDLT<SpMat>>();
  ldlt_->compute(K);
  if (ldlt_->info() != Eigen::Success)
    throw std::runtime_error(
        "constant saddle preconditioner factorization failed; "
        "check mesh quality and pin configuration");
}

VecX ConstantPreconditioner::apply(const VecX& rhs) const {
  if (!ldlt_) throw std::logic_error("preconditioner not factorized");
  return ldlt_->solve(rhs);
}

ConstantPreconditioner factor_preconditioner(const VecX& mass_over_h2,
                                             const SpMat& J, double mu,
                                             const std::vector<double>& volumes,
                                             double tikhonov) {
  return ConstantPreconditioner(mass_over_h2, J, mu, volumes, tikhonov);
}

int default_pcg_maxiter(int dim) {
  return std::min(2000, static_cast<int>(10.0 * std::sqrt(static_cast<double>(dim))) + 1);
}

PcgResult pcg_saddle(const SaddleSystem& system, const VecX& rhs,
                     const ConstantPreconditioner& precond, double tol,
                     int maxiter) {
  const int dim = system.dim();
  if (rhs.size() != dim) throw std::invalid_argument("pcg_saddle: rhs size mismatch");
  if (maxiter <= 0) maxiter = default_pcg_maxiter(dim);

  PcgResult res;
  res.x = VecX::Zero(dim);
  const double bnorm = rhs.norm();
  if (bnorm == 0.0) {
    res.converged = true;
    return res;
  }

  VecX r = rhs;
  VecX z = precond.apply(r);
  VecX p = z;
  double rz = r.dot(z);
  double ref_sign = 0.0;
  bool restarted = false;

  for (int it = 0; it < maxiter; ++it) {
    VecX Ap = system.apply(p);
    double pAp = p.dot(Ap);
    if (!std::isfinite(pAp))
      throw std::runtime_error("pcg_saddle: NaN at iteration " + std::to_string(it));
    if (ref_sign == 0.0 && pAp != 0.0) ref_sign = pAp > 0 ? 1.0 : -1.0;
    if (!restarted && pAp * ref_sign < 0.0) {
      // curvature sign flipped on the indefinite system; restart once
      restarted = true;
      r = rhs - system.apply(res.x);
      z = precond.apply(r);
      p = z;
      rz = r.dot(z);
      ref_sign = 0.0;
      continue;
    }
    if (pAp == 0.0) break;
    const double alpha = rz / pAp;
    res.x += alpha * p;
    r -= alpha * Ap;
    res.iterations = it + 1;
    res.rel_residual = r.norm() / bnorm;
    if (!std::isfinite(res.rel_residual))
      throw std::runtime_error("pcg_saddle: NaN at iteration " + std::to_string(it));
    if (res.rel_residual <= tol) {
      res.converged = true;
      return res;
    }
    z = precond.apply(r);
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  return res;
}

}  // namespace mixedfem
