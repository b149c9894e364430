#include <doctest.h>

#include "helpers.hpp"
#include "mixedfem/mesh_gen.hpp"
#include "mixedfem/solver.hpp"

using namespace mixedfem;

TEST_CASE("warm start is the forward-Euler predictor") {
  VecX qt(3), qtm1(3), f(3), m(3);
  qt << 1, 2, 3;
  qtm1 << 0.5, 1.5, 2.5;
  f << 1, -2, 0.5;
  m << 2, 2, 2;
  const double h = 0.1;
  VecX pred = warm_start(qt, qtm1, f, m, h);
  for (int i = 0; i < 3; ++i)
    CHECK(pred[i] == doctest::Approx(2 * qt[i] - qtm1[i] + h * h * f[i] / m[i])
                         .epsilon(1e-14));
}

TEST_CASE("line search accepts a full step on a decreasing merit") {
  auto merit = [](double t) -> std::optional<double> { return 1.0 - t; };
  LineSearchResult r = backtracking_line_search(merit, 1.0);
  CHECK(r.t == 1.0);
  CHECK(!r.stagnated);
}

TEST_CASE("line search halves past domain violations") {
  auto merit = [](double t) -> std::optional<double> {
    if (t > 0.3) return std::nullopt;  // domain guard
    return -t;
  };
  LineSearchResult r = backtracking_line_search(merit, 0.0);
  CHECK(r.t == 0.25);
}

TEST_CASE("line search reports stagnation when nothing helps") {
  auto merit = [](double t) -> std::optional<double> { return 1.0 + t; };
  LineSearchResult r = backtracking_line_search(merit, 1.0);
  CHECK(r.stagnated);
}

TEST_CASE("material linearization inverts the volume-weighted hessian") {
  SimMesh mesh = box_tet_mesh(1, 1, 1, 0.3, 0.3, 0.3);
  MaterialParams mat;
  mat.model = MaterialModel::Corot;
  VecX s(6 * mesh.num_elements());
  for (int e = 0; e < mesh.num_elements(); ++e) {
    Vec6 se;
    se << 1.1, 0.95, 1.02, 0.03, -0.02, 0.01;
    s.segment<6>(6 * e) = se;
  }
  MaterialLinearization lin = linearize_materials(mesh, mat, s);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    Mat6 H = mesh.volumes[e] * hessian(s.segment<6>(6 * e), mat, true);
    CHECK((lin.Hinv[e] * H - Mat6::Identity()).cwiseAbs().maxCoeff() < 1e-8);
    Vec6 g = mesh.volumes[e] * gradient(s.segment<6>(6 * e), mat);
    CHECK((lin.g.segment<6>(6 * e) - g).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("a consistent rigidly-rotated state has zero constraint residual") {
  SimMesh mesh = box_tet_mesh(1, 1, 1, 0.3, 0.3, 0.3);
  SceneConfig cfg;
  cfg.material.model = MaterialModel::ARAP;
  Simulation sim(mesh, cfg);

  Mat3 R0 = testutil::random_rotation();
  VecX q = mesh.rest_vector();
  for (int v = 0; v < mesh.num_vertices(); ++v)
    q.segment<3>(3 * v) = R0 * q.segment<3>(3 * v);
  VecX s(6 * mesh.num_elements());
  for (int e = 0; e < mesh.num_elements(); ++e)
    s.segment<6>(6 * e) = sym_to_vec(Mat3::Identity());
  std::vector<Mat3> R(mesh.num_elements(), R0);

  MaterialLinearization lin = linearize_materials(mesh, cfg.material, s);
  VecX a = VecX::Zero(q.size()), f = VecX::Zero(q.size());
  QuadraticModel model = build_quadratic_model(
      mesh, lin, sim.coupling(), sim.coupling(), R, q, s, a, cfg.timestep,
      sim.mass(), VecX(), f, sim.projection(), cfg.material.mu(),
      cfg.solver.tikhonov);
  CHECK(model.constraint.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("local step leaves aligned rotations unchanged") {
  SimMesh mesh = box_tet_mesh(1, 1, 1, 0.3, 0.3, 0.3);
  Mat3 R0 = testutil::random_rotation();
  VecX q = mesh.rest_vector();
  for (int v = 0; v < mesh.num_vertices(); ++v)
    q.segment<3>(3 * v) = R0 * q.segment<3>(3 * v);
  SpMat J;
  {
    SceneConfig cfg;
    Simulation sim(mesh, cfg);
    J = sim.coupling();
  }
  VecX Jq = J * q;
  VecX s(6 * mesh.num_elements());
  for (int e = 0; e < mesh.num_elements(); ++e)
    s.segment<6>(6 * e) = sym_to_vec(Mat3::Identity());
  VecX l = VecX::Zero(9 * mesh.num_elements());
  std::vector<Mat3> R(mesh.num_elements(), R0);
  double change = local_step(mesh, Jq, s, l, 10.0, 1e-4, R);
  CHECK(change < 1e-12);
  for (const Mat3& r : R) CHECK((r - R0).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("a pinned rest scene stays exactly at rest") {
  SimMesh mesh = box_tet_mesh(2, 2, 2, 0.2, 0.2, 0.2);
  SceneConfig cfg;
  cfg.material.model = MaterialModel::NeoHookean;
  cfg.substeps = 3;
  PinGroup g;
  g.vertices = {0};
  cfg.pins.push_back(g);
  Simulation sim(mesh, cfg);
  VecX q0 = sim.state().q;
  for (int i = 0; i < 20; ++i) sim.step();
  CHECK((sim.state().q - q0).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("linear momentum is conserved for a free body") {
  SimMesh mesh = box_tet_mesh(2, 2, 2, 0.2, 0.2, 0.2);
  SceneConfig cfg;
  cfg.material.model = MaterialModel::Corot;
  cfg.substeps = 3;
  Simulation sim(mesh, cfg);
  Vec3 v0(0.3, -0.1, 0.2);
  for (int v = 0; v < mesh.num_vertices(); ++v)
    sim.state().q_prev.segment<3>(3 * v) -= cfg.timestep * v0;

  auto momentum = [&]() {
    Vec3 p = Vec3::Zero();
    VecX vel = sim.velocity();
    for (int v = 0; v < mesh.num_vertices(); ++v)
      p += sim.mass()[3 * v] * vel.segment<3>(3 * v);
    return p;
  };
  Vec3 p0 = momentum();
  for (int i = 0; i < 50; ++i) sim.step();
  CHECK((momentum() - p0).norm() <= 1e-6 * p0.norm());
}

TEST_CASE("stats rows accumulate per inner iteration") {
  SimMesh mesh = box_tet_mesh(1, 1, 1, 0.2, 0.2, 0.2);
  SceneConfig cfg;
  cfg.substeps = 4;
  cfg.outer_iterations = 2;
  Simulation sim(mesh, cfg);
  for (int i = 0; i < 3; ++i) sim.step();
  CHECK(sim.stats().size() == 3u * 4u * 2u);
}
