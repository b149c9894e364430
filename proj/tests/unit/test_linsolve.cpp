#include <doctest.h>

#include <Eigen/Dense>

#include "helpers.hpp"
#include "mixedfem/linsolve.hpp"
#include "mixedfem/mesh_gen.hpp"
#include "mixedfem/operators.hpp"

using namespace mixedfem;

namespace {

// Small single-tet saddle system with randomized SPD compliance.
SaddleSystem make_test_system() {
  SimMesh mesh = box_tet_mesh(1, 1, 1, 0.4, 0.4, 0.4);
  SaddleSystem sys;
  sys.J = assemble_J(mesh);
  sys.mass_over_h2 = VecX::Constant(sys.J.cols(), 2.5);
  sys.compliance.resize(mesh.num_elements());
  for (auto& C : sys.compliance) {
    MatX A = MatX::Random(9, 9);
    C = A * A.transpose() + 0.5 * Mat9::Identity();
  }
  return sys;
}

MatX dense_of(const SaddleSystem& sys) {
  const int n = sys.dim();
  MatX A(n, n);
  for (int i = 0; i < n; ++i) {
    VecX e = VecX::Zero(n);
    e[i] = 1.0;
    A.col(i) = sys.apply(e);
  }
  return A;
}

}  // namespace

TEST_CASE("saddle apply matches the block definition") {
  SaddleSystem sys = make_test_system();
  MatX A = dense_of(sys);
  CHECK((A - A.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  // upper-left block is the mass diagonal
  for (int i = 0; i < sys.nq(); ++i)
    CHECK(A(i, i) == doctest::Approx(2.5).epsilon(1e-14));
  // lower-right block is minus the compliance
  for (int e = 0; e < static_cast<int>(sys.compliance.size()); ++e) {
    MatX block = A.block(sys.nq() + 9 * e, sys.nq() + 9 * e, 9, 9);
    CHECK((block + sys.compliance[e]).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("pcg with the constant preconditioner matches a dense LU solve") {
  SimMesh mesh = box_tet_mesh(1, 1, 1, 0.4, 0.4, 0.4);
  SaddleSystem sys = make_test_system();
  ConstantPreconditioner pre = factor_preconditioner(
      sys.mass_over_h2, sys.J, /*mu=*/1e4, mesh.volumes, 1e-6);
  REQUIRE(pre.valid());

  VecX rhs(sys.dim());
  for (int i = 0; i < rhs.size(); ++i) rhs[i] = testutil::uniform(-1, 1);

  PcgResult res = pcg_saddle(sys, rhs, pre, 1e-10, 500);
  VecX want = dense_of(sys).lu().solve(rhs);
  CHECK(res.converged);
  CHECK((res.x - want).norm() / want.norm() < 1e-6);
}

TEST_CASE("preconditioner inverts its own constant system") {
  SimMesh mesh = box_tet_mesh(1, 1, 1, 0.4, 0.4, 0.4);
  SpMat J = assemble_J(mesh);
  VecX m = VecX::Constant(J.cols(), 3.0);
  const double mu = 5e3, tik = 1e-6;
  ConstantPreconditioner pre = factor_preconditioner(m, J, mu, mesh.volumes, tik);

  SaddleSystem constant;
  constant.J = J;
  constant.mass_over_h2 = m;
  constant.compliance.resize(mesh.num_elements());
  for (int e = 0; e < mesh.num_elements(); ++e)
    constant.compliance[e] =
        ((1.0 + tik) / (mesh.volumes[e] * mu)) * Mat9::Identity();

  VecX x(constant.dim());
  for (int i = 0; i < x.size(); ++i) x[i] = testutil::uniform(-1, 1);
  CHECK((pre.apply(constant.apply(x)) - x).norm() / x.norm() < 1e-9);
}

TEST_CASE("default iteration cap grows with problem size") {
  CHECK(default_pcg_maxiter(100) > 10);
  CHECK(default_pcg_maxiter(4000000) <= 2000);
}

TEST_CASE("preconditioner rejects non-positive mu") {
  SimMesh mesh = box_tet_mesh(1, 1, 1, 0.4, 0.4, 0.4);
  SpMat J = assemble_J(mesh);
  VecX m = VecX::Constant(J.cols(), 3.0);
  CHECK_THROWS_AS(factor_preconditioner(m, J, 0.0, mesh.volumes, 1e-6),
                  std::invalid_argument);
}
