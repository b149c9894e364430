#include "mixedfem/solver.hpp"

#include <chrono>
#include <cmath>

#include "mixedfem/rotation.hpp"

namespace mixedfem {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// per-element frame correction subtracted from S in the constraint
Mat3 frame_correction(const SimMesh& mesh, int e) {
  if (mesh.kind == ElementKind::Tet) return Mat3::Zero();
  const Vec3& n = mesh.ref_normals[e];
  Mat3 corr = n * n.transpose();
  if (mesh.kind == ElementKind::Rod) {
    const Vec3& b = mesh.ref_binormals[e];
    corr += b * b.transpose();
  }
  return corr;
}

}  // namespace

VecX warm_start(const VecX& qt, const VecX& qtm1, const VecX& f_ext,
                const VecX& mass_diag, double h) {
  return 2.0 * qt - qtm1 + h * h * f_ext.cwiseQuotient(mass_diag);
}

MaterialLinearization linearize_materials(const SimMesh& mesh,
                                          const MaterialParams& mat,
                                          const VecX& s) {
  const int T = mesh.num_elements();
  MaterialLinearization lin;
  lin.Hinv.resize(T);
  lin.g.resize(6 * T);
  for (int e = 0; e < T; ++e) {
    const double dv = mesh.volumes[e];
    const Vec6 se = s.segment<6>(6 * e);
    lin.Hinv[e] = (dv * hessian(se, mat, true)).inverse();
    lin.g.segment<6>(6 * e) = dv * gradient(se, mat);
  }
  return lin;
}

QuadraticModel build_quadratic_model(
    const SimMesh& mesh, const MaterialLinearization& lin, const SpMat& J_full,
    const SpMat& J_free, const std::vector<Mat3>& R, const VecX& q,
    const VecX& s, const VecX& a, double h, const VecX& mass_diag,
    const VecX& extra_diag, const VecX& f_ext, const DofProjection& proj,
    double mu, double tikhonov, bool flip_rhs_sign) {
  const int T = mesh.num_elements();
  QuadraticModel m;
  m.lin = lin;
  m.W_blocks.resize(T);

  const VecX Jq = J_full * q;
  m.constraint.resize(9 * T);
  m.system.compliance.resize(T);
  VecX whg(9 * T);
  for (int e = 0; e < T; ++e) {
    const Vec6 se = s.segment<6>(6 * e);
    m.W_blocks[e] = rotation_block(R[e]);

    // columns of W are orthogonal with squared norms (1,1,1,2,2,2), so
    // W D W^T with D = those inverses projects onto range(W)
    const Vec6 wnorm(1.0, 1.0, 1.0, 0.5, 0.5, 0.5);
    const Mat9 range_proj =
        m.W_blocks[e] * wnorm.asDiagonal() * m.W_blocks[e].transpose();
    m.system.compliance[e] =
        m.W_blocks[e] * lin.Hinv[e] * m.W_blocks[e].transpose() +
        (1.0 / (mesh.volumes[e] * mu)) * (Mat9::Identity() - range_proj) +
        (tikhonov / (mesh.volumes[e] * mu)) * Mat9::Identity();

    Vec9 c = m.W_blocks[e] * se - Jq.segment<9>(9 * e);
    if (mesh.kind != ElementKind::Tet)
      c -= rowvec(R[e] * frame_correction(mesh, e));
    m.constraint.segment<9>(9 * e) = c;
    whg.segment<9>(9 * e) =
        m.W_blocks[e] * (lin.Hinv[e] * lin.g.segment<6>(6 * e));
  }

  m.system.J = J_free;
  m.system.mass_over_h2 = proj.restrict(mass_diag) / (h * h);
  if (extra_diag.size() > 0) m.system.mass_over_h2 += proj.restrict(extra_diag);

  m.rhs.resize(m.system.dim());
  m.rhs.head(m.system.nq()) =
      proj.restrict(f_ext - mass_diag.cwiseProduct(a) / (h * h));
  // Stationarity of the incremental model fixes the minus sign on the
  // W H^{-1} g term; the flip is a deliberate mutation hook for the
  // dense-oracle check.
  const double sign = flip_rhs_sign ? 1.0 : -1.0;
  m.rhs.tail(m.system.nl()) = m.constraint + sign * whg;
  return m;
}

GlobalStepResult global_step(const QuadraticModel& model,
                             const ConstantPreconditioner& precond, double tol,
                             int maxiter) {
  GlobalStepResult r;
  r.cg = pcg_saddle(model.system, model.rhs, precond, tol, maxiter);
  r.dq_free = r.cg.x.head(model.system.nq());
  r.l = r.cg.x.tail(model.system.nl());
  const int T = static_cast<int>(model.lin.Hinv.size());
  r.ds.resize(6 * T);
  for (int e = 0; e < T; ++e) {
    r.ds.segment<6>(6 * e) =
        model.lin.Hinv[e] *
        (model.W_blocks[e].transpose() * r.l.segment<9>(9 * e) -
         model.lin.g.segment<6>(6 * e));
  }
  return r;
}

double local_step(const SimMesh& mesh, const VecX& Jq, const VecX& s,
                  const VecX& l, double alpha, double beta_floor,
                  std::vector<Mat3>& R) {
  double max_change = 0.0;
#pragma omp parallel for reduction(max : max_change)
  for (int e = 0; e < mesh.num_elements(); ++e) {
    // beta scales with the multiplier magnitude so the stress term
    // contributes at most ~1/alpha to the Procrustes target; at optimality
    // R^T lambda is symmetric and the term stops rotating R. Noise-level
    // multipliers below the deadband (beta_floor is a density, scaled by
    // element measure) are dropped outright: dividing them by a floor would
    // amplify solver noise into rotation jitter.
    const Vec9 le = l.segment<9>(9 * e);
    const double beta = alpha * le.lpNorm<Eigen::Infinity>();
    const Mat3 F = matvec9(Jq.segment<9>(9 * e));
    const Mat3 S = symmat(s.segment<6>(6 * e)) - frame_correction(mesh, e);
    Mat3 target = F * S.transpose();
    if (beta >= beta_floor * mesh.volumes[e] && beta > 0.0)
      target += (matvec9(le) / beta) * S.transpose();
    Mat3 Rnew = polar_rotation(target);
    max_change = std::max(max_change, (Rnew - R[e]).norm());
    R[e] = Rnew;
  }
  return max_change;
}

LineSearchResult backtracking_line_search(
    const std::function<std::optional<double>(double)>& merit, double merit0,
    int max_backtracks) {
  double t = 1.0;
  for (int k = 0; k <= max_backtracks && t >= 1.0 / (1 << 20); ++k, t *= 0.5) {
    auto m = merit(t);
    if (m && *m <= merit0) return {t, false};
  }
  return {0.0, true};
}

Simulation::Simulation(SimMesh mesh, SceneConfig config)
    : mesh_(std::move(mesh)), config_(std::move(config)) {
  config_.material.validate();
  J_full_ = assemble_J(mesh_);
  mass_ = lumped_mass(mesh_, config_.material.rho);

  for (const auto& group : config_.pins) {
    auto verts = group.resolve(mesh_);
    Vec3 centroid = Vec3::Zero();
    for (int v : verts) centroid += mesh_.rest_positions[v];
    if (!verts.empty()) centroid /= static_cast<double>(verts.size());
    group_centroids_.push_back(centroid);
    pinned_.insert(pinned_.end(), verts.begin(), verts.end());
  }
  proj_ = DofProjection::build(pinned_, mesh_.num_vertices());

  // coupling over free columns; constant for the whole run
  J_free_ = (J_full_ * proj_.selection()).eval();
  J_free_.makeCompressed();

  precond_ = factor_preconditioner(proj_.restrict(mass_) /
                                       (config_.timestep * config_.timestep),
                                   J_free_, config_.material.mu(),
                                   mesh_.volumes, config_.solver.tikhonov);

  state_.q = mesh_.rest_vector();
  state_.q_prev = state_.q;
  state_.s.resize(6 * mesh_.num_elements());
  Vec6 id = sym_to_vec(Mat3::Identity());
  for (int e = 0; e < mesh_.num_elements(); ++e) state_.s.segment<6>(6 * e) = id;
  state_.l = VecX::Zero(9 * mesh_.num_elements());
  state_.R.assign(mesh_.num_elements(), Mat3::Identity());
}

VecX Simulation::pinned_positions(double t) const {
  VecX q = state_.q;
  for (size_t gi = 0; gi < config_.pins.size(); ++gi) {
    const auto& group = config_.pins[gi];
    for (int v : group.resolve(mesh_)) {
      q.segment<3>(3 * v) =
          group.position_at(mesh_.rest_positions[v], group_centroids_[gi], t);
    }
  }
  return q;
}

VecX Simulation::external_force(const VecX& q, const VecX& vel) const {
  VecX f(3 * mesh_.num_vertices());
  for (int v = 0; v < mesh_.num_vertices(); ++v)
    f.segment<3>(3 * v) = mass_[3 * v] * config_.gravity;
  if (config_.ground) f += contact_force(q, vel, *config_.ground);
  return f;
}

std::optional<double> Simulation::merit(const VecX& q, const VecX& s,
                                        const std::vector<Mat96>& W_blocks,
                                        const VecX& l, double beta_bar,
                                        const VecX& qt, const VecX& qtm1) const {
  double E = 0.0;
  try {
    for (int e = 0; e < mesh_.num_elements(); ++e)
      E += mesh_.volumes[e] * energy(s.segment<6>(6 * e), config_.material);
  } catch (const NonPhysicalStretch&) {
    return std::nullopt;
  }
  const double h = config_.timestep;
  VecX a = q - 2.0 * qt + qtm1;
  E += 0.5 / (h * h) * a.dot(mass_.cwiseProduct(a));
  for (int v = 0; v < mesh_.num_vertices(); ++v)
    E -= mass_[3 * v] * config_.gravity.dot(q.segment<3>(3 * v));
  if (config_.ground) E += contact_energy(q, *config_.ground);

  VecX Jq = J_full_ * q;
  VecX c(9 * mesh_.num_elements());
  for (int e = 0; e < mesh_.num_elements(); ++e) {
    Vec9 ce = W_blocks[e] * s.segment<6>(6 * e) - Jq.segment<9>(9 * e);
    if (mesh_.kind != ElementKind::Tet)
      ce -= rowvec(state_.R[e] * frame_correction(mesh_, e));
    c.segment<9>(9 * e) = ce;
  }
  E += -l.dot(c) + 0.5 * beta_bar * c.squaredNorm();
  return E;
}

void Simulation::step() {
  const double h = config_.timestep;
  const auto& sv = config_.solver;
  const double mu = config_.material.mu();
  const VecX qt = state_.q;
  const VecX qtm1 = state_.q_prev;
  const double bbox = std::max(mesh_.bbox_diagonal(), 1e-30);

  // forward-Euler warm start on free dofs; pins follow their script
  VecX q_work = pinned_positions(time_ + h);
  {
    VecX f0 = external_force(qt, (qt - qtm1) / h);
    VecX pred = warm_start(qt, qtm1, f0, mass_, h);
    q_work = proj_.expand(proj_.restrict(pred), q_work);
  }
  VecX s_work = state_.s;
  state_.l.setZero();

  VecX f_contact = VecX::Zero(q_work.size());
  VecX k_contact;
  VecX f_gravity(3 * mesh_.num_vertices());
  for (int v = 0; v < mesh_.num_vertices(); ++v)
    f_gravity.segment<3>(3 * v) = mass_[3 * v] * config_.gravity;

  double alpha = sv.alpha0;
  last_stagnated_ = false;
  std::vector<Mat96> W_last(mesh_.num_elements());
  double beta_bar = mu;

  int substep_counter = 0;
  for (int outer = 0; outer < config_.outer_iterations; ++outer) {
    const VecX q0 = q_work;
    const VecX s0 = s_work;

    bool inner_converged = false;
    double constraint_inf = 0.0;
    QuadraticModel model;
    for (int inner = 0; inner < config_.substeps; ++inner) {
      SubstepStats row;
      row.step = step_index_;
      row.substep = substep_counter++;

      auto t_rot = Clock::now();
      VecX Jq = J_full_ * q_work;
      double rot_change =
          local_step(mesh_, Jq, s_work, state_.l, alpha, 1e-8 * mu, state_.R);
      {
        // mean penalty for the line-search merit
        double sum = 0.0;
        for (int e = 0; e < mesh_.num_elements(); ++e)
          sum += std::max(
              alpha * state_.l.segment<9>(9 * e).lpNorm<Eigen::Infinity>(), mu);
        beta_bar = sum / std::max(mesh_.num_elements(), 1);
      }
      row.rotation_ms = ms_since(t_rot);

      auto t_asm = Clock::now();
      // relinearize about the current stretch: the stretch update below is
      // ds = H^{-1}(W^T y - g) and assumes g is the gradient at s_work
      const MaterialLinearization lin =
          linearize_materials(mesh_, config_.material, s_work);
      // contact relinearized about the current iterate: the penalty is stiff,
      // so freezing it at the warm start injects energy on impact
      if (config_.ground) {
        f_contact = contact_force(q_work, (q_work - qt) / h, *config_.ground);
        k_contact = contact_stiffness_diag(q_work, *config_.ground);
      }
      VecX f_ext = f_gravity + f_contact;
      VecX a = q_work - 2.0 * qt + qtm1;
      model = build_quadratic_model(mesh_, lin, J_full_, J_free_, state_.R,
                                    q_work, s_work, a, h, mass_, k_contact,
                                    f_ext, proj_, mu, sv.tikhonov,
                                    flip_rhs_sign_);
      row.assembly_ms = ms_since(t_asm);

      auto t_kkt = Clock::now();
      auto result = global_step(model, precond_, sv.cg_tol, sv.cg_maxiter);
      row.kkt_solve_ms = ms_since(t_kkt);
      row.cg_iters = result.cg.iterations;
      row.cg_residual = result.cg.rel_residual;

      // keep neo-Hookean iterates inside det(S) > 0 so the next
      // linearization stays well defined
      double t_inner = 1.0;
      if (config_.material.model == MaterialModel::NeoHookean) {
        auto feasible = [&](double t) {
          for (int e = 0; e < mesh_.num_elements(); ++e) {
            Vec6 se = s_work.segment<6>(6 * e) + t * result.ds.segment<6>(6 * e);
            if (!(symmat(se).determinant() > 1e-10)) return false;
          }
          return true;
        };
        while (t_inner > 1.0 / (1 << 20) && !feasible(t_inner)) t_inner *= 0.5;
        if (!feasible(t_inner)) t_inner = 0.0;
      }
      state_.l = result.l;
      q_work = proj_.expand(proj_.restrict(q_work) + t_inner * result.dq_free,
                            q_work);
      s_work += t_inner * result.ds;
      W_last = model.W_blocks;

      // post-update feasibility
      {
        VecX Jq2 = J_full_ * q_work;
        double norm2 = 0.0;
        constraint_inf = 0.0;
        for (int e = 0; e < mesh_.num_elements(); ++e) {
          Vec9 ce = model.W_blocks[e] * s_work.segment<6>(6 * e) -
                    Jq2.segment<9>(9 * e);
          if (mesh_.kind != ElementKind::Tet)
            ce -= rowvec(state_.R[e] * frame_correction(mesh_, e));
          norm2 += ce.squaredNorm();
          constraint_inf = std::max(constraint_inf, ce.lpNorm<Eigen::Infinity>());
        }
        row.constraint_residual = std::sqrt(norm2);
      }
      {
        auto m = merit(q_work, s_work, model.W_blocks, state_.l, 0.0, qt, qtm1);
        row.energy = m ? *m : std::numeric_limits<double>::quiet_NaN();
      }
      stats_.push_back(row);

      alpha *= sv.alpha_growth;
      if (!sv.fixed_iterations && rot_change <= sv.tol_rotation) {
        inner_converged = true;
        break;
      }
    }

    // backtracking line search on the inner-loop direction
    const VecX dq_dir = q_work - q0;
    const VecX ds_dir = s_work - s0;
    auto eval = [&](double t) {
      return merit(q0 + t * dq_dir, s0 + t * ds_dir, W_last, state_.l, beta_bar,
                   qt, qtm1);
    };
    auto m0 = eval(0.0);
    if (!m0) throw NonPhysicalStretch("invalid stretch at line-search origin");
    auto ls = backtracking_line_search(eval, *m0, sv.ls_max_backtracks);
    if (ls.stagnated) {
      last_stagnated_ = true;
      q_work = q0;
      s_work = s0;
    } else if (ls.t < 1.0) {
      q_work = q0 + ls.t * dq_dir;
      s_work = s0 + ls.t * ds_dir;
    }

    if (!sv.fixed_iterations) {
      const double dq_inf = (ls.t * dq_dir).lpNorm<Eigen::Infinity>();
      if ((dq_inf <= sv.tol_dq * bbox && constraint_inf <= sv.tol_constraint) ||
          (inner_converged && ls.stagnated))
        break;
    }
    (void)inner_converged;
  }

  state_.q_prev = qt;
  state_.q = q_work;
  state_.s = s_work;
  time_ += h;
  ++step_index_;
}

}  // namespace mixedfem
