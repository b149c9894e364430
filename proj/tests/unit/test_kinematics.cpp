#include <doctest.h>

#include "helpers.hpp"
#include "mixedfem/mesh_gen.hpp"
#include "mixedfem/operators.hpp"
#include "mixedfem/tensors.hpp"

using namespace mixedfem;

TEST_CASE("symmat / sym_to_vec round trip") {
  for (int trial = 0; trial < 50; ++trial) {
    Vec6 s;
    for (int i = 0; i < 6; ++i) s[i] = testutil::uniform(-2, 2);
    Mat3 S = symmat(s);
    CHECK((S - S.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((sym_to_vec(S) - s).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("contraction doubles shears for symmetric inputs") {
  for (int trial = 0; trial < 50; ++trial) {
    Vec6 s;
    for (int i = 0; i < 6; ++i) s[i] = testutil::uniform(-2, 2);
    Vec6 c = contract_sym(symmat(s));
    CHECK((c.head<3>() - s.head<3>()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((c.tail<3>() - 2.0 * s.tail<3>()).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("rowvec / matvec9 round trip") {
  Mat3 M = testutil::random_matrix();
  CHECK((matvec9(rowvec(M)) - M).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("rotation_block matches the direct product R * symmat(s)") {
  for (int trial = 0; trial < 50; ++trial) {
    Mat3 R = testutil::random_rotation();
    Vec6 s;
    for (int i = 0; i < 6; ++i) s[i] = testutil::uniform(-2, 2);
    Vec9 got = rotation_block(R) * s;
    Vec9 want = rowvec(R * symmat(s));
    CHECK((got - want).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("rotation_block columns are orthogonal with norms (1,1,1,2,2,2)") {
  Mat3 R = testutil::random_rotation();
  Mat96 W = rotation_block(R);
  Mat6 G = W.transpose() * W;
  Vec6 want;
  want << 1, 1, 1, 2, 2, 2;
  CHECK((G - Mat6(want.asDiagonal())).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("J*q slices equal the per-element deformation gradients") {
  SimMesh tets = box_tet_mesh(2, 2, 2, 0.3, 0.3, 0.3);
  for (const SimMesh& mesh :
       {tets, surface_of_tets(tets), edges_of_tets(tets)}) {
    SpMat J = assemble_J(mesh);
    REQUIRE(J.rows() == 9 * mesh.num_elements());
    REQUIRE(J.cols() == 3 * mesh.num_vertices());
    VecX q = mesh.rest_vector();
    for (int i = 0; i < q.size(); ++i) q[i] += testutil::uniform(-0.05, 0.05);
    VecX Jq = J * q;
    for (int e = 0; e < mesh.num_elements(); ++e) {
      Vec9 want = rowvec(mesh.deformation_gradient(q, e));
      CHECK((Jq.segment<9>(9 * e) - want).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("apply_W and apply_Wt are adjoint") {
  SimMesh mesh = box_tet_mesh(2, 1, 1, 0.3, 0.2, 0.2);
  std::vector<Mat3> R(mesh.num_elements());
  for (auto& r : R) r = testutil::random_rotation();
  std::vector<Mat96> W = assemble_W(R);
  VecX s(6 * mesh.num_elements()), l(9 * mesh.num_elements());
  for (int i = 0; i < s.size(); ++i) s[i] = testutil::uniform(-1, 1);
  for (int i = 0; i < l.size(); ++i) l[i] = testutil::uniform(-1, 1);
  CHECK(apply_W(W, s).dot(l) ==
        doctest::Approx(s.dot(apply_Wt(W, l))).epsilon(1e-12));
}

TEST_CASE("normal correction slice equals rowvec(R n n^T) for shells") {
  SimMesh shell = grid_tri_mesh(2, 2, 0.4, 0.4);
  std::vector<Mat3> R(shell.num_elements());
  for (auto& r : R) r = testutil::random_rotation();
  VecX b = normal_rhs_term(shell, R);
  for (int e = 0; e < shell.num_elements(); ++e) {
    const Vec3& n = shell.ref_normals[e];
    Vec9 want = rowvec(R[e] * (n * n.transpose()));
    CHECK((b.segment<9>(9 * e) - want).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("normal correction includes the binormal for rods") {
  SimMesh rods = chain_rod_mesh(3, 0.6);
  std::vector<Mat3> R(rods.num_elements());
  for (auto& r : R) r = testutil::random_rotation();
  VecX b = normal_rhs_term(rods, R);
  for (int e = 0; e < rods.num_elements(); ++e) {
    const Vec3& n = rods.ref_normals[e];
    const Vec3& bn = rods.ref_binormals[e];
    Vec9 want = rowvec(R[e] * (n * n.transpose() + bn * bn.transpose()));
    CHECK((b.segment<9>(9 * e) - want).cwiseAbs().maxCoeff() < 1e-13);
  }
}
