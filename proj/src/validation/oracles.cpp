#include "oracles.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace mixedfem::oracle {

Mat3 random_rotation(Rng& rng) {
  std::normal_distribution<double> norm(0.0, 1.0);
  Eigen::Quaterniond quat(norm(rng), norm(rng), norm(rng), norm(rng));
  while (quat.norm() < 1e-6)
    quat = Eigen::Quaterniond(norm(rng), norm(rng), norm(rng), norm(rng));
  quat.normalize();
  return quat.toRotationMatrix();
}

Vec6 random_stretch(Rng& rng, double det_floor) {
  std::uniform_real_distribution<double> ev(0.5, 1.8);
  for (;;) {
    Mat3 Q = random_rotation(rng);
    Vec3 d(ev(rng), ev(rng), ev(rng));
    Mat3 S = Q * d.asDiagonal() * Q.transpose();
    if (S.determinant() > det_floor) return sym_to_vec(S);
  }
}

double tensor_B(int i, int j, int k) { return (k == 3 * i + j) ? 1.0 : 0.0; }

double tensor_C(int i, int j, int k) {
  // symmetric slot table from the 6-vector ordering
  static const int slot[3][3] = {{0, 5, 4}, {5, 1, 3}, {4, 3, 2}};
  return (slot[i][j] == k) ? 1.0 : 0.0;
}

double tensor_D(int n, int i, int j, int k) {
  (void)n;
  return (i == k % 3 && 3 * j == k - i) ? 1.0 : 0.0;
}

Mat3 naive_B_dot(const Vec9& l) {
  Mat3 M = Mat3::Zero();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 9; ++k) M(i, j) += tensor_B(i, j, k) * l[k];
  return M;
}

Mat3 naive_C_dot(const Vec6& s) {
  Mat3 M = Mat3::Zero();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 6; ++k) M(i, j) += tensor_C(i, j, k) * s[k];
  return M;
}

Vec9 naive_B_contract(const Mat3& M) {
  Vec9 v = Vec9::Zero();
  for (int k = 0; k < 9; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) v[k] += tensor_B(i, j, k) * M(i, j);
  return v;
}

Vec6 naive_C_contract(const Mat3& M) {
  Vec6 v = Vec6::Zero();
  for (int k = 0; k < 6; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) v[k] += tensor_C(i, j, k) * M(i, j);
  return v;
}

Mat96 naive_W_block(const Mat3& R) {
  // Z_{ijkl} = sum_m B_{kmi} C_{lmj};  W_{ij} = sum_{kl} Z_{ijkl} R_{kl}
  Mat96 W = Mat96::Zero();
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 6; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          double z = 0.0;
          for (int m = 0; m < 3; ++m) z += tensor_B(k, m, i) * tensor_C(l, m, j);
          W(i, j) += z * R(k, l);
        }
  return W;
}

MatX naive_J(const SimMesh& mesh) {
  const int n = mesh.verts_per_element();
  MatX J = MatX::Zero(9 * mesh.num_elements(), 3 * mesh.num_vertices());
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const MatX& G = mesh.grad_ops[e];  // n x 3
    // E = G^T . D^T, a 3 x 3 x 3n tensor; block = B^T : E
    MatX block = MatX::Zero(9, 3 * n);
    for (int k9 = 0; k9 < 9; ++k9)
      for (int kq = 0; kq < 3 * n; ++kq) {
        double acc = 0.0;
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) {
            // E_{ijk} = sum_c G_{ci} D^T_{cjk} = sum_c G_{ci} D_{jck}
            double E = 0.0;
            for (int c = 0; c < n; ++c) E += G(c, i) * tensor_D(n, j, c, kq);
            acc += tensor_B(j, i, k9) * E;  // B^T_{ijk} = B_{jik}
          }
        block(k9, kq) = acc;
      }
    for (int c = 0; c < n; ++c)
      J.block(9 * e, 3 * mesh.elements[e][c], 9, 3) +=
          block.block(0, 3 * c, 9, 3);
  }
  return J;
}

VecX fd_gradient(const std::function<double(const VecX&)>& f, const VecX& x,
                 double step_scale) {
  VecX g(x.size());
  VecX xp = x;
  for (int i = 0; i < x.size(); ++i) {
    const double h = step_scale * (1.0 + std::abs(x[i]));
    xp[i] = x[i] + h;
    const double fp = f(xp);
    xp[i] = x[i] - h;
    const double fm = f(xp);
    xp[i] = x[i];
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

MatX fd_jacobian(const std::function<VecX(const VecX&)>& f, const VecX& x,
                 double step_scale) {
  VecX xp = x;
  MatX Jac;
  for (int i = 0; i < x.size(); ++i) {
    const double h = step_scale * (1.0 + std::abs(x[i]));
    xp[i] = x[i] + h;
    const VecX fp = f(xp);
    xp[i] = x[i] - h;
    const VecX fm = f(xp);
    xp[i] = x[i];
    if (Jac.size() == 0) Jac.resize(fp.size(), x.size());
    Jac.col(i) = (fp - fm) / (2.0 * h);
  }
  return Jac;
}

DenseKktSolution dense_kkt_solve(const SimMesh& mesh, const MaterialParams& mat,
                                 const std::vector<Mat3>& R, const VecX& q,
                                 const VecX& s, const VecX& a, double h,
                                 const VecX& mass_diag, const VecX& f_ext,
                                 const DofProjection& proj, double tikhonov) {
  const int T = mesh.num_elements();
  const int nf = proj.num_free();
  const int ns = 6 * T;
  const int nl = 9 * T;

  // constraint rows stay in deformation-gradient units; the integration
  // weights dv enter through H and g only
  MatX Jd = naive_J(mesh);
  MatX Js = MatX::Zero(nl, nf);
  for (int e = 0; e < T; ++e)
    for (int i = 0; i < nf; ++i)
      Js.block<9, 1>(9 * e, i) = Jd.block<9, 1>(9 * e, proj.full_of_free[i]);

  MatX Ws = MatX::Zero(nl, ns);
  MatX H = MatX::Zero(ns, ns);
  VecX g(ns);
  VecX bn = VecX::Zero(nl);
  for (int e = 0; e < T; ++e) {
    const double dv = mesh.volumes[e];
    Ws.block<9, 6>(9 * e, 6 * e) = naive_W_block(R[e]);
    H.block<6, 6>(6 * e, 6 * e) = dv * hessian(s.segment<6>(6 * e), mat, true);
    g.segment<6>(6 * e) = dv * gradient(s.segment<6>(6 * e), mat);
    if (mesh.kind != ElementKind::Tet) {
      const Vec3& nrm = mesh.ref_normals[e];
      Mat3 corr = nrm * nrm.transpose();
      if (mesh.kind == ElementKind::Rod) {
        const Vec3& b = mesh.ref_binormals[e];
        corr += b * b.transpose();
      }
      bn.segment<9>(9 * e) = naive_B_contract(R[e] * corr);
    }
  }

  const int dim = nf + ns + nl;
  MatX A = MatX::Zero(dim, dim);
  VecX rhs(dim);
  for (int i = 0; i < nf; ++i)
    A(i, i) = mass_diag[proj.full_of_free[i]] / (h * h);
  A.block(0, nf + ns, nf, nl) = Js.transpose();
  A.block(nf, nf, ns, ns) = H;
  A.block(nf, nf + ns, ns, nl) = -Ws.transpose();
  A.block(nf + ns, 0, nl, nf) = Js;
  A.block(nf + ns, nf, nl, ns) = -Ws;
  // rotation-direction softening at 1/(dv mu) on the complement of range(W)
  // plus a relative Tikhonov term, mirroring the production compliance
  for (int e = 0; e < T; ++e) {
    const MatX We = Ws.block<9, 6>(9 * e, 6 * e);
    const Vec6 wnorm(1.0, 1.0, 1.0, 0.5, 0.5, 0.5);
    const Mat9 proj_range = We * wnorm.asDiagonal() * We.transpose();
    const double scale = 1.0 / (mesh.volumes[e] * mat.mu());
    A.block(nf + ns + 9 * e, nf + ns + 9 * e, 9, 9) -=
        scale * (Mat9::Identity() - proj_range) +
        tikhonov * scale * Mat9::Identity();
  }

  rhs.head(nf) = proj.restrict(f_ext - mass_diag.cwiseProduct(a) / (h * h));
  rhs.segment(nf, ns) = -g;
  rhs.tail(nl) = Ws * s - Jd * q - bn;

  VecX x = Eigen::FullPivLU<MatX>(A).solve(rhs);
  DenseKktSolution sol;
  sol.dq_free = x.head(nf);
  sol.ds = x.segment(nf, ns);
  sol.l = x.tail(nl);
  return sol;
}

double best_sampled_objective(const Mat3& M, int samples, Rng& rng) {
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i)
    best = std::max(best, (random_rotation(rng).transpose() * M).trace());
  return best;
}

namespace {

double nh_energy_F(const Mat3& F, double mu, double la) {
  const double d = F.determinant();
  if (!(d > 0)) return std::numeric_limits<double>::infinity();
  const double logd = std::log(d);
  return 0.5 * mu * (F.squaredNorm() - 3.0) - mu * logd + 0.5 * la * logd * logd;
}

Mat3 nh_piola_F(const Mat3& F, double mu, double la) {
  const Mat3 Fit = F.inverse().transpose();
  return mu * (F - Fit) + la * std::log(F.determinant()) * Fit;
}

}  // namespace

VecX newton_static_solve(const SimMesh& mesh, const MaterialParams& mat,
                         const DofProjection& proj, const VecX& f_ext,
                         int max_iters, double grad_tol) {
  const double mu = mat.mu(), la = mat.lambda();
  const VecX q0 = mesh.rest_vector();

  auto total_energy = [&](const VecX& qf) {
    const VecX q = proj.expand(qf, q0);
    double E = -q.dot(f_ext);
    for (int e = 0; e < mesh.num_elements(); ++e)
      E += mesh.volumes[e] *
           nh_energy_F(mesh.deformation_gradient(q, e), mu, la);
    return E;
  };
  auto grad = [&](const VecX& qf) {
    const VecX q = proj.expand(qf, q0);
    VecX G = -f_ext;
    for (int e = 0; e < mesh.num_elements(); ++e) {
      const Mat3 F = mesh.deformation_gradient(q, e);
      const MatX dQ =
          mesh.volumes[e] * nh_piola_F(F, mu, la) * mesh.grad_ops[e].transpose();
      for (int c = 0; c < mesh.verts_per_element(); ++c)
        G.segment<3>(3 * mesh.elements[e][c]) += dQ.col(c);
    }
    return VecX(proj.restrict(G));
  };

  VecX qf = proj.restrict(q0);
  for (int it = 0; it < max_iters; ++it) {
    const VecX G = grad(qf);
    if (G.lpNorm<Eigen::Infinity>() < grad_tol) break;
    MatX Hd = fd_jacobian(grad, qf, 1e-6);
    Hd = 0.5 * (Hd + Hd.transpose()).eval();
    Eigen::LDLT<MatX> ldlt;
    double reg = 0.0;
    VecX dir;
    for (;;) {
      ldlt.compute(Hd + reg * MatX::Identity(Hd.rows(), Hd.cols()));
      dir = ldlt.solve(-G);
      if (dir.dot(G) < 0) break;  // descent
      reg = (reg == 0.0) ? 1e-6 * Hd.norm() : 10.0 * reg;
    }
    const double E0 = total_energy(qf);
    double t = 1.0;
    while (t > 1e-12 && !(total_energy(qf + t * dir) < E0)) t *= 0.5;
    if (t <= 1e-12) break;
    qf += t * dir;
  }
  return proj.expand(qf, q0);
}

}  // namespace mixedfem::oracle
